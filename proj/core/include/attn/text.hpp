#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace attn {

// Stopword list and surface-form -> lemma table used by preprocess().
struct TextResources {
  std::unordered_set<std::string> stopwords;
  std::unordered_map<std::string, std::string> lemmas;

  // Stopwords: one word per line, '#' starts a comment. Lemma table: one
  // "surface<TAB>lemma" pair per line. Entries are lower-cased on load.
  // Throws ConfigError if either file cannot be read.
  static TextResources load(const std::filesystem::path& stopwords_file, const std::filesystem::path& lemma_file);
  static TextResources parse(std::istream& stopwords, std::istream& lemmas);
};

// Lower-cases ASCII and Latin-1/Latin Extended-A letters encoded as UTF-8;
// other code points pass through unchanged.
std::string fold_case(std::string_view text);

// Splits into word tokens: runs of letters/digits, where any non-ASCII code
// point outside the general-punctuation blocks counts as a letter. Accents
// are preserved.
std::vector<std::string> tokenize(std::string_view text);

// Lower-case, tokenize, drop stopwords, map each token through the lemma
// table (identity when absent).
std::vector<std::string> preprocess(std::string_view text, const TextResources& resources);

}  // namespace attn
