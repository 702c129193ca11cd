#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "attn/article.hpp"
#include "attn/cascade.hpp"
#include "attn/ingest.hpp"
#include "attn/text.hpp"

namespace attn {

// Interns lemmas to dense ids shared by message and fact-check vectors.
class Vocabulary {
 public:
  std::uint32_t intern(const std::string& lemma);
  std::size_t size() const { return ids_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
};

// Sparse term-frequency vector, sorted by term id.
struct TextVector {
  std::string owner_id;
  std::vector<std::pair<std::uint32_t, double>> weights;
  double norm = 0.0;
  double squared_norm = 0.0;

  static TextVector from_lemmas(std::string owner_id, std::span<const std::string> lemmas, Vocabulary& vocabulary);
  // Sorts, merges duplicate terms, drops non-positive weights.
  static TextVector from_weights(std::string owner_id, std::vector<std::pair<std::uint32_t, double>> weights);
};

// m.f / (|m| |f|), clamped to [0, 1]. Iterates the shorter vector and
// binary-searches the longer one. Throws DomainError when either norm is 0.
double cosine_similarity(const TextVector& m, const TextVector& f);

// A piece of message text: the message body or the article behind one of
// its links.
struct TextDocument {
  std::string group_id;
  std::string message_id;
  std::string text;
};

struct FactCheck {
  std::string factcheck_id;
  std::string source;
  std::string text;
};

enum class MatchStatus { candidate, confirmed, rejected };

std::string_view to_string(MatchStatus status);
std::optional<MatchStatus> parse_match_status(std::string_view text);

struct FalsehoodMatch {
  std::string group_id;
  std::string message_id;
  std::string factcheck_id;
  double score = 0.0;
  MatchStatus status = MatchStatus::candidate;

  bool operator==(const FalsehoodMatch&) const = default;
};

struct MatchOptions {
  // Pairs must score strictly above this.
  double threshold = 0.5;
  unsigned jobs = 1;
};

// Text documents of every text message plus the cached article texts of
// their links. Media messages contribute nothing.
std::vector<TextDocument> collect_documents(std::span<const Message> messages, const ArticleCache* articles);

// Scores every (message, fact-check) pair sharing at least one lemma via an
// inverted index, keeps the best score per pair, and returns candidates
// above the threshold ordered by score descending, then ids.
// Throws DomainError on an empty fact-check corpus.
std::vector<FalsehoodMatch> match_corpus(std::span<const TextDocument> documents, std::span<const FactCheck> factchecks,
                                         const TextResources& resources, const MatchOptions& options = {});

// Merges a reviewed file into the candidate list. Each reviewed entry must
// name an existing candidate; status may only move away from candidate.
// Throws DataError otherwise.
std::vector<FalsehoodMatch> apply_review(std::span<const FalsehoodMatch> candidates,
                                         std::span<const FalsehoodMatch> reviewed);

enum class CascadeFalsehood { falsehood, unclassified };

std::string_view to_string(CascadeFalsehood label);
std::optional<CascadeFalsehood> parse_cascade_falsehood(std::string_view text);

struct CascadeLabeling {
  std::map<std::string, CascadeFalsehood> labels;
  std::size_t falsehood_cascades = 0;
  // Falsehood cascades whose root message itself has a confirmed match.
  std::size_t root_matched = 0;

  double root_matched_fraction() const {
    return falsehood_cascades == 0 ? 0.0 : static_cast<double>(root_matched) / static_cast<double>(falsehood_cascades);
  }
};

// A cascade is falsehood iff any of its messages has a confirmed match;
// candidates and rejected matches are ignored. Throws DataError when a
// confirmed match names a message absent from `messages`.
CascadeLabeling label_cascades(std::span<const Cascade> cascades, std::span<const FalsehoodMatch> matches,
                               std::span<const Message> messages);

std::vector<FactCheck> read_factchecks(std::istream& in, std::string_view source = "factchecks");
void write_factchecks(std::ostream& out, std::span<const FactCheck> factchecks);

// {"group_id","message_id","factcheck_id","score","status"} per line.
void write_matches(std::ostream& out, std::span<const FalsehoodMatch> matches);
std::vector<FalsehoodMatch> read_matches(std::istream& in, std::string_view source = "matches");

// cascade_id,falsehood
void write_falsehood_labels(std::ostream& out, const CascadeLabeling& labeling);
std::map<std::string, CascadeFalsehood> read_falsehood_labels(std::istream& in, std::string_view source = "falsehood");

}  // namespace attn
