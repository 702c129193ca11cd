#include "attn/article.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "attn/errors.hpp"

namespace attn {
namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Removes every <tag ...>...</tag> element (case-insensitive, non-nested).
std::string strip_elements(const std::string& html, std::string_view tag) {
  const std::string lower = lower_ascii(html);
  const std::string open = "<" + std::string(tag);
  const std::string close = "</" + std::string(tag);
  std::string out;
  std::size_t pos = 0;
  while (pos < html.size()) {
    std::size_t start = lower.find(open, pos);
    // Require a tag boundary so "<header" does not match "<head".
    while (start != std::string::npos) {
      const std::size_t after = start + open.size();
      if (after >= lower.size() || lower[after] == '>' || std::isspace(static_cast<unsigned char>(lower[after])) ||
          lower[after] == '/') {
        break;
      }
      start = lower.find(open, after);
    }
    if (start == std::string::npos) {
      out.append(html, pos, std::string::npos);
      break;
    }
    out.append(html, pos, start - pos);
    const std::size_t end = lower.find(close, start);
    if (end == std::string::npos) break;
    const std::size_t gt = lower.find('>', end);
    pos = gt == std::string::npos ? html.size() : gt + 1;
    out += ' ';
  }
  return out;
}

std::string strip_comments(const std::string& html) {
  std::string out;
  std::size_t pos = 0;
  while (pos < html.size()) {
    const std::size_t start = html.find("<!--", pos);
    if (start == std::string::npos) {
      out.append(html, pos, std::string::npos);
      break;
    }
    out.append(html, pos, start - pos);
    const std::size_t end = html.find("-->", start + 4);
    pos = end == std::string::npos ? html.size() : end + 3;
  }
  return out;
}

void append_codepoint(unsigned long cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x110000) {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string decode_entities(std::string_view s) {
  static const std::map<std::string, std::string, std::less<>> kNamed = {
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "}};
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const std::size_t semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += '&';
      continue;
    }
    const std::string_view name = s.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
      const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      const std::string digits(name.substr(hex ? 2 : 1));
      char* end = nullptr;
      const unsigned long cp = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
      if (!digits.empty() && end && *end == '\0') {
        append_codepoint(cp, out);
        i = semi;
        continue;
      }
    } else if (const auto it = kNamed.find(name); it != kNamed.end()) {
      out += it->second;
      i = semi;
      continue;
    }
    out += '&';
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
    } else {
      if (space && !out.empty()) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

bool is_block_tag(std::string_view name) {
  static constexpr std::string_view kBlocks[] = {"p",  "div", "section", "article", "br", "li", "td", "tr",
                                                 "h1", "h2",  "h3",      "h4",      "h5", "h6", "blockquote",
                                                 "ul", "ol",  "table",   "main",    "pre"};
  return std::find(std::begin(kBlocks), std::end(kBlocks), name) != std::end(kBlocks);
}

struct Block {
  std::string text;
  std::size_t markup = 0;
  std::size_t link_text = 0;
};

// Splits markup into blocks at block-level tag boundaries.
std::vector<Block> blocks_of(std::string_view html) {
  std::vector<Block> blocks(1);
  bool in_link = false;
  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      const std::size_t next = html.find('<', i);
      const std::size_t end = next == std::string_view::npos ? html.size() : next;
      const std::string chunk = decode_entities(html.substr(i, end - i));
      blocks.back().text += chunk;
      if (in_link) blocks.back().link_text += collapse_whitespace(chunk).size();
      i = end;
      continue;
    }
    const std::size_t gt = html.find('>', i);
    const std::size_t end = gt == std::string_view::npos ? html.size() : gt + 1;
    std::string_view tag = html.substr(i + 1, end - i - 2);
    blocks.back().markup += end - i;
    const bool closing = !tag.empty() && tag[0] == '/';
    if (closing) tag.remove_prefix(1);
    std::size_t name_end = 0;
    while (name_end < tag.size() && std::isalnum(static_cast<unsigned char>(tag[name_end]))) ++name_end;
    const std::string name = lower_ascii(tag.substr(0, name_end));
    if (name == "a") in_link = !closing;
    if (is_block_tag(name)) blocks.emplace_back();
    i = end;
  }
  for (auto& b : blocks) b.text = collapse_whitespace(b.text);
  std::erase_if(blocks, [](const Block& b) { return b.text.empty(); });
  return blocks;
}

std::string join_blocks(const std::vector<Block>& blocks) {
  std::string out;
  for (const auto& b : blocks) {
    if (!out.empty()) out += '\n';
    out += b.text;
  }
  return out;
}

// Inner HTML of the <article> element with the most characters.
std::optional<std::string> article_body(const std::string& html) {
  const std::string lower = lower_ascii(html);
  std::optional<std::string> best;
  std::size_t pos = 0;
  while ((pos = lower.find("<article", pos)) != std::string::npos) {
    const std::size_t open_end = lower.find('>', pos);
    if (open_end == std::string::npos) break;
    const std::size_t close = lower.find("</article", open_end);
    const std::size_t stop = close == std::string::npos ? html.size() : close;
    std::string body = html.substr(open_end + 1, stop - open_end - 1);
    if (!best || body.size() > best->size()) best = std::move(body);
    pos = stop;
  }
  return best;
}

std::optional<std::string> json_string(const nlohmann::json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

std::string extract_article_text(std::string_view raw) {
  std::string html = strip_comments(std::string(raw));
  for (const char* tag : {"script", "style", "noscript", "nav", "header", "footer", "aside", "form", "iframe", "svg",
                          "head"}) {
    html = strip_elements(html, tag);
  }
  if (auto body = article_body(html)) {
    const auto text = join_blocks(blocks_of(*body));
    if (!text.empty()) return text;
  }
  std::vector<Block> kept;
  for (auto& b : blocks_of(html)) {
    const double text_len = static_cast<double>(b.text.size());
    const double density = text_len / (text_len + static_cast<double>(b.markup));
    const double link_density = static_cast<double>(b.link_text) / text_len;
    if (b.text.size() >= 25 && density >= 0.5 && link_density < 0.5) kept.push_back(std::move(b));
  }
  return join_blocks(kept);
}

ArticleResult fetch_article_text(const std::string& url, const FetchOptions& options) {
  ArticleResult result{url, std::nullopt, std::nullopt};
  std::string target = url;
  if (lower_ascii(target).starts_with("www.")) target = "http://" + target;
  const std::string lower = lower_ascii(target);
  const std::size_t scheme_end = lower.find("://");
  if (scheme_end == std::string::npos || (!lower.starts_with("http://") && !lower.starts_with("https://"))) {
    result.error = "unsupported URL";
    return result;
  }
  const std::size_t path_start = target.find('/', scheme_end + 3);
  const std::string origin = path_start == std::string::npos ? target : target.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : target.substr(path_start);
  try {
    httplib::Client client(origin);
    client.set_connection_timeout(options.timeout);
    client.set_read_timeout(options.timeout);
    client.set_follow_location(options.max_redirects > 0);
    const auto res = client.Get(path);
    if (!res) {
      result.error = "request failed: " + httplib::to_string(res.error());
      return result;
    }
    if (res->status != 200) {
      result.error = "http status " + std::to_string(res->status);
      return result;
    }
    const std::string type = lower_ascii(res->get_header_value("Content-Type"));
    if (!type.empty() && type.find("html") == std::string::npos) {
      result.error = "non-HTML content type '" + type + "'";
      return result;
    }
    auto text = extract_article_text(res->body);
    if (text.empty()) {
      result.error = "extraction-empty";
      return result;
    }
    result.text = std::move(text);
  } catch (const std::exception& e) {
    result.error = std::string("fetch error: ") + e.what();
  }
  return result;
}

void ArticleCache::load(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      ArticleResult r;
      r.url = obj.at("url").get<std::string>();
      r.text = json_string(obj, "text");
      r.error = json_string(obj, "error");
      if (r.text.has_value() == r.error.has_value()) {
        throw DataError("exactly one of text/error must be set");
      }
      insert(std::move(r));
    } catch (const std::exception& e) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void ArticleCache::save(std::ostream& out) const {
  for (const auto& [url, r] : entries_) {
    nlohmann::json obj = nlohmann::json::object();
    obj["url"] = r.url;
    obj["text"] = r.text ? nlohmann::json(*r.text) : nlohmann::json(nullptr);
    obj["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr);
    out << obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

const ArticleResult* ArticleCache::find(const std::string& url) const {
  const auto it = entries_.find(url);
  return it == entries_.end() ? nullptr : &it->second;
}

void ArticleCache::insert(ArticleResult result) {
  auto key = result.url;
  entries_.insert_or_assign(std::move(key), std::move(result));
}

void ArticleCache::fetch_missing(std::span<const std::string> urls, bool offline, const FetchOptions& options) {
  for (const auto& url : urls) {
    if (find(url)) continue;
    if (offline) {
      insert({url, std::nullopt, "offline: not cached"});
    } else {
      insert(fetch_article_text(url, options));
    }
  }
}

}  // namespace attn
