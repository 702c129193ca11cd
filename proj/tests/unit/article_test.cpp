// Must match the configuration the core library compiles httplib with.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <gtest/gtest.h>

#include <sstream>
#include <thread>

#include "attn/article.hpp"
#include "attn/errors.hpp"

namespace attn {
namespace {

const std::string kLong = "Vacinas foram testadas em milhares de voluntarios antes da aprovacao.";

TEST(ExtractTest, PrefersArticleElement) {
  const std::string html = "<html><head><title>T</title></head><body><div>" + kLong +
                           " outside</div><article><h1>Titulo</h1><p>Corpo &amp; mais &#233;</p></article></body></html>";
  EXPECT_EQ(extract_article_text(html), "Titulo\nCorpo & mais \xc3\xa9");
}

TEST(ExtractTest, DropsChromeScriptsAndLinkFarms) {
  const std::string html = "<body><nav>Home About Contact Menu Items Here</nav>"
                           "<script>var x = 'not text at all, really not';</script>"
                           "<div><a href='/a'>Leia tambem esta outra materia</a> <a href='/b'>e esta</a></div>"
                           "<!-- <p>commented paragraph with plenty of characters</p> -->"
                           "<p>" + kLong + "</p><footer>Copyright notice with enough words</footer></body>";
  EXPECT_EQ(extract_article_text(html), kLong);
}

TEST(ExtractTest, ShortOrEmptyPagesYieldNothing) {
  EXPECT_EQ(extract_article_text("<p>oi</p>"), "");
  EXPECT_EQ(extract_article_text(""), "");
  EXPECT_EQ(extract_article_text("<header><p>" + kLong + "</p></header>"), "");
}

class LocalServer : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Get("/ok", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<html><body><p>" + kLong + "</p></body></html>", "text/html; charset=utf-8");
    });
    server_.Get("/pdf", [](const httplib::Request&, httplib::Response& res) { res.set_content("%PDF", "application/pdf"); });
    server_.Get("/empty", [](const httplib::Request&, httplib::Response& res) { res.set_content("<p>x</p>", "text/html"); });
    server_.Get("/moved", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ok"); });
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(LocalServer, FetchOutcomes) {
  FetchOptions opt;
  opt.timeout = std::chrono::seconds(5);
  const auto ok = fetch_article_text(url("/ok"), opt);
  ASSERT_TRUE(ok.ok()) << *ok.error;
  EXPECT_EQ(*ok.text, kLong);
  EXPECT_EQ(fetch_article_text(url("/moved"), opt).text, ok.text);
  EXPECT_EQ(fetch_article_text(url("/missing"), opt).error, "http status 404");
  EXPECT_EQ(fetch_article_text(url("/pdf"), opt).error, "non-HTML content type 'application/pdf'");
  EXPECT_EQ(fetch_article_text(url("/empty"), opt).error, "extraction-empty");
  EXPECT_EQ(fetch_article_text("ftp://example.org/x", opt).error, "unsupported URL");
}

TEST_F(LocalServer, CacheFetchesOnceAndRoundTrips) {
  ArticleCache cache;
  const std::vector<std::string> urls{url("/ok"), url("/pdf")};
  cache.fetch_missing(urls, false);
  ASSERT_EQ(cache.size(), 2u);
  std::ostringstream out;
  cache.save(out);

  ArticleCache reloaded;
  std::istringstream in(out.str());
  reloaded.load(in);
  EXPECT_EQ(*reloaded.find(url("/ok")), *cache.find(url("/ok")));
  EXPECT_FALSE(reloaded.find(url("/pdf"))->ok());

  server_.stop();
  const std::vector<std::string> more{url("/ok"), url("/new")};
  reloaded.fetch_missing(more, true);
  EXPECT_TRUE(reloaded.find(url("/ok"))->ok());
  EXPECT_EQ(reloaded.find(url("/new"))->error, "offline: not cached");
}

TEST(ArticleCacheTest, RejectsInconsistentRecords) {
  ArticleCache cache;
  std::istringstream both("{\"url\":\"u\",\"text\":\"a\",\"error\":\"b\"}\n");
  EXPECT_THROW(cache.load(both, "cache.jsonl"), DataError);
  std::istringstream junk("not json\n");
  EXPECT_THROW(cache.load(junk), DataError);
}

}  // namespace
}  // namespace attn
