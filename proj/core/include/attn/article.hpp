#pragma once

#include <chrono>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace attn {

// Outcome of recovering the article text behind a shared link. Exactly one
// of text / error is set.
struct ArticleResult {
  std::string url;
  std::optional<std::string> text;
  std::optional<std::string> error;

  bool ok() const { return text.has_value(); }
  bool operator==(const ArticleResult&) const = default;
};

// Main text of an HTML page: script/style/navigation chrome removed, the
// <article> element preferred when present, otherwise blocks kept by text
// density (visible text vs markup) and link density. Returns "" when
// nothing survives.
std::string extract_article_text(std::string_view html);

struct FetchOptions {
  std::chrono::seconds timeout{10};
  int max_redirects = 5;
};

// Downloads and extracts one page. Never throws: timeouts, HTTP errors,
// non-HTML bodies and empty extractions come back as error records.
ArticleResult fetch_article_text(const std::string& url, const FetchOptions& options = {});

// URL -> result cache persisted as JSONL {"url","text","error"} so reruns
// can be fully offline.
class ArticleCache {
 public:
  void load(std::istream& in, std::string_view source = "url cache");
  void save(std::ostream& out) const;

  const ArticleResult* find(const std::string& url) const;
  void insert(ArticleResult result);
  std::size_t size() const { return entries_.size(); }

  // Fetches every URL not yet cached. With offline set, missing URLs are
  // recorded as "offline: not cached" failures instead.
  void fetch_missing(std::span<const std::string> urls, bool offline, const FetchOptions& options = {});

 private:
  std::map<std::string, ArticleResult> entries_;
};

}  // namespace attn
