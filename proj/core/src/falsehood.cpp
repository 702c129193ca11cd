#include "attn/falsehood.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "attn/csv.hpp"
#include "attn/errors.hpp"
#include "attn/parallel.hpp"

namespace attn {
namespace {

using nlohmann::json;

using MatchKey = std::tuple<std::string, std::string, std::string>;

MatchKey key_of(const FalsehoodMatch& m) { return {m.group_id, m.message_id, m.factcheck_id}; }

double squared_norm_of(const std::vector<std::pair<std::uint32_t, double>>& weights) {
  double ss = 0.0;
  for (const auto& [term, w] : weights) ss += w * w;
  return ss;
}

}  // namespace

std::uint32_t Vocabulary::intern(const std::string& lemma) {
  const auto [it, inserted] = ids_.try_emplace(lemma, static_cast<std::uint32_t>(ids_.size()));
  return it->second;
}

TextVector TextVector::from_lemmas(std::string owner_id, std::span<const std::string> lemmas, Vocabulary& vocabulary) {
  std::vector<std::pair<std::uint32_t, double>> weights;
  weights.reserve(lemmas.size());
  for (const auto& l : lemmas) weights.emplace_back(vocabulary.intern(l), 1.0);
  return from_weights(std::move(owner_id), std::move(weights));
}

TextVector TextVector::from_weights(std::string owner_id, std::vector<std::pair<std::uint32_t, double>> weights) {
  std::sort(weights.begin(), weights.end());
  TextVector v;
  v.owner_id = std::move(owner_id);
  for (const auto& [term, w] : weights) {
    if (!(w > 0.0)) continue;
    if (!v.weights.empty() && v.weights.back().first == term) {
      v.weights.back().second += w;
    } else {
      v.weights.emplace_back(term, w);
    }
  }
  v.squared_norm = squared_norm_of(v.weights);
  v.norm = std::sqrt(v.squared_norm);
  return v;
}

double cosine_similarity(const TextVector& m, const TextVector& f) {
  if (m.norm <= 0.0 || f.norm <= 0.0) {
    throw DomainError("similarity undefined for empty text vector ('" + (m.norm <= 0.0 ? m.owner_id : f.owner_id) +
                      "')");
  }
  const auto& small = m.weights.size() <= f.weights.size() ? m.weights : f.weights;
  const auto& large = m.weights.size() <= f.weights.size() ? f.weights : m.weights;
  double dot = 0.0;
  for (const auto& [term, w] : small) {
    const auto it = std::lower_bound(large.begin(), large.end(), term,
                                     [](const auto& entry, std::uint32_t t) { return entry.first < t; });
    if (it != large.end() && it->first == term) dot += w * it->second;
  }
  // One rounding in the denominator keeps exact cases exact.
  return std::clamp(dot / std::sqrt(m.squared_norm * f.squared_norm), 0.0, 1.0);
}

std::string_view to_string(MatchStatus status) {
  switch (status) {
    case MatchStatus::candidate: return "candidate";
    case MatchStatus::confirmed: return "confirmed";
    case MatchStatus::rejected: return "rejected";
  }
  return "unknown";
}

std::optional<MatchStatus> parse_match_status(std::string_view text) {
  if (text == "candidate") return MatchStatus::candidate;
  if (text == "confirmed") return MatchStatus::confirmed;
  if (text == "rejected") return MatchStatus::rejected;
  return std::nullopt;
}

std::vector<TextDocument> collect_documents(std::span<const Message> messages, const ArticleCache* articles) {
  std::vector<TextDocument> docs;
  for (const auto& m : messages) {
    if (m.kind != MessageKind::text) continue;
    if (!m.text.empty()) docs.push_back({m.group_id, m.message_id, m.text});
    if (!articles) continue;
    for (const auto& url : m.urls) {
      const auto* r = articles->find(url);
      if (r && r->text) docs.push_back({m.group_id, m.message_id, *r->text});
    }
  }
  return docs;
}

std::vector<FalsehoodMatch> match_corpus(std::span<const TextDocument> documents, std::span<const FactCheck> factchecks,
                                         const TextResources& resources, const MatchOptions& options) {
  if (factchecks.empty()) throw DomainError("fact-check corpus is empty");

  std::vector<std::vector<std::string>> fc_lemmas(factchecks.size());
  std::vector<std::vector<std::string>> doc_lemmas(documents.size());
  parallel_for(factchecks.size(), options.jobs,
               [&](std::size_t i) { fc_lemmas[i] = preprocess(factchecks[i].text, resources); });
  parallel_for(documents.size(), options.jobs,
               [&](std::size_t i) { doc_lemmas[i] = preprocess(documents[i].text, resources); });

  Vocabulary vocabulary;
  std::vector<TextVector> fc_vectors;
  fc_vectors.reserve(factchecks.size());
  for (std::size_t i = 0; i < factchecks.size(); ++i) {
    fc_vectors.push_back(TextVector::from_lemmas(factchecks[i].factcheck_id, fc_lemmas[i], vocabulary));
  }
  std::vector<TextVector> doc_vectors;
  doc_vectors.reserve(documents.size());
  for (std::size_t i = 0; i < documents.size(); ++i) {
    doc_vectors.push_back(TextVector::from_lemmas(documents[i].message_id, doc_lemmas[i], vocabulary));
  }

  std::vector<std::vector<std::uint32_t>> postings(vocabulary.size());
  for (std::size_t f = 0; f < fc_vectors.size(); ++f) {
    for (const auto& [term, w] : fc_vectors[f].weights) postings[term].push_back(static_cast<std::uint32_t>(f));
  }

  std::vector<std::vector<FalsehoodMatch>> found(documents.size());
  parallel_for(documents.size(), options.jobs, [&](std::size_t d) {
    const auto& v = doc_vectors[d];
    if (v.norm <= 0.0) return;
    std::vector<std::uint32_t> candidates;
    for (const auto& [term, w] : v.weights) {
      candidates.insert(candidates.end(), postings[term].begin(), postings[term].end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (const auto f : candidates) {
      if (fc_vectors[f].norm <= 0.0) continue;
      const double score = cosine_similarity(v, fc_vectors[f]);
      if (score > options.threshold) {
        found[d].push_back({documents[d].group_id, documents[d].message_id, factchecks[f].factcheck_id, score,
                            MatchStatus::candidate});
      }
    }
  });

  std::map<MatchKey, FalsehoodMatch> best;
  for (auto& list : found) {
    for (auto& m : list) {
      auto key = key_of(m);
      const auto it = best.find(key);
      if (it == best.end()) {
        best.emplace(std::move(key), std::move(m));
      } else if (m.score > it->second.score) {
        it->second.score = m.score;
      }
    }
  }
  std::vector<FalsehoodMatch> out;
  out.reserve(best.size());
  for (auto& [key, m] : best) out.push_back(std::move(m));
  std::stable_sort(out.begin(), out.end(),
                   [](const FalsehoodMatch& a, const FalsehoodMatch& b) { return a.score > b.score; });
  return out;
}

std::vector<FalsehoodMatch> apply_review(std::span<const FalsehoodMatch> candidates,
                                         std::span<const FalsehoodMatch> reviewed) {
  std::vector<FalsehoodMatch> merged(candidates.begin(), candidates.end());
  std::map<MatchKey, std::size_t> index;
  for (std::size_t i = 0; i < merged.size(); ++i) index.emplace(key_of(merged[i]), i);
  for (const auto& r : reviewed) {
    const auto it = index.find(key_of(r));
    const std::string name = r.group_id + ":" + r.message_id + " / " + r.factcheck_id;
    if (it == index.end()) throw DataError("review names pair " + name + " that is not a candidate");
    auto& target = merged[it->second];
    if (r.status == target.status) continue;
    if (target.status != MatchStatus::candidate) {
      throw DataError("review moves pair " + name + " from " + std::string(to_string(target.status)) + " to " +
                      std::string(to_string(r.status)));
    }
    target.status = r.status;
  }
  return merged;
}

std::string_view to_string(CascadeFalsehood label) {
  return label == CascadeFalsehood::falsehood ? "falsehood" : "unclassified";
}

std::optional<CascadeFalsehood> parse_cascade_falsehood(std::string_view text) {
  if (text == "falsehood") return CascadeFalsehood::falsehood;
  if (text == "unclassified") return CascadeFalsehood::unclassified;
  return std::nullopt;
}

CascadeLabeling label_cascades(std::span<const Cascade> cascades, std::span<const FalsehoodMatch> matches,
                               std::span<const Message> messages) {
  std::set<std::pair<std::string_view, std::string_view>> known;
  for (const auto& m : messages) known.emplace(m.group_id, m.message_id);
  std::set<std::pair<std::string_view, std::string_view>> confirmed;
  for (const auto& m : matches) {
    if (m.status != MatchStatus::confirmed) continue;
    if (!known.contains({m.group_id, m.message_id})) {
      throw DataError("confirmed match references unknown message '" + m.message_id + "' in group '" + m.group_id +
                      "'");
    }
    confirmed.emplace(m.group_id, m.message_id);
  }
  CascadeLabeling out;
  for (const auto& c : cascades) {
    bool hit = false;
    for (const auto& n : c.nodes) {
      if (confirmed.contains({c.group_id, n.message_id})) {
        hit = true;
        break;
      }
    }
    out.labels[c.cascade_id] = hit ? CascadeFalsehood::falsehood : CascadeFalsehood::unclassified;
    if (hit) {
      ++out.falsehood_cascades;
      if (confirmed.contains({c.group_id, c.root().message_id})) ++out.root_matched;
    }
  }
  return out;
}

std::vector<FactCheck> read_factchecks(std::istream& in, std::string_view source) {
  std::vector<FactCheck> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    try {
      const auto obj = json::parse(line);
      FactCheck fc;
      fc.factcheck_id = obj.at("factcheck_id").get<std::string>();
      fc.source = obj.value("source", std::string());
      fc.text = obj.at("text").get<std::string>();
      if (!ids.insert(fc.factcheck_id).second) throw DataError("duplicate factcheck_id '" + fc.factcheck_id + "'");
      out.push_back(std::move(fc));
    } catch (const json::exception& e) {
      throw DataError(where + ": malformed fact-check record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return out;
}

void write_factchecks(std::ostream& out, std::span<const FactCheck> factchecks) {
  for (const auto& fc : factchecks) {
    json obj = {{"factcheck_id", fc.factcheck_id}, {"source", fc.source}, {"text", fc.text}};
    out << obj.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

void write_matches(std::ostream& out, std::span<const FalsehoodMatch> matches) {
  for (const auto& m : matches) {
    json obj = json::object();
    obj["group_id"] = m.group_id;
    obj["message_id"] = m.message_id;
    obj["factcheck_id"] = m.factcheck_id;
    obj["score"] = m.score;
    obj["status"] = to_string(m.status);
    out << obj.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

std::vector<FalsehoodMatch> read_matches(std::istream& in, std::string_view source) {
  std::vector<FalsehoodMatch> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    try {
      const auto obj = json::parse(line);
      FalsehoodMatch m;
      m.group_id = obj.value("group_id", std::string());
      m.message_id = obj.at("message_id").get<std::string>();
      m.factcheck_id = obj.at("factcheck_id").get<std::string>();
      m.score = obj.at("score").get<double>();
      const auto status = parse_match_status(obj.at("status").get<std::string>());
      if (!status) throw DataError("unknown status '" + obj.at("status").get<std::string>() + "'");
      m.status = *status;
      out.push_back(std::move(m));
    } catch (const json::exception& e) {
      throw DataError(where + ": malformed match record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return out;
}

void write_falsehood_labels(std::ostream& out, const CascadeLabeling& labeling) {
  write_csv_row(out, {"cascade_id", "falsehood"});
  for (const auto& [id, label] : labeling.labels) write_csv_row(out, {id, std::string(to_string(label))});
}

std::map<std::string, CascadeFalsehood> read_falsehood_labels(std::istream& in, std::string_view source) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  std::map<std::string, CascadeFalsehood> labels;
  if (!reader.next(fields)) return labels;
  const CsvHeader header(fields);
  const auto id = header.require("cascade_id", source);
  const auto label = header.require("falsehood", source);
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(reader.line());
    if (fields.size() != header.size()) throw DataError(where + ": wrong number of fields");
    const auto parsed = parse_cascade_falsehood(fields[label]);
    if (!parsed) throw DataError(where + ": bad falsehood label '" + fields[label] + "'");
    labels[fields[id]] = *parsed;
  }
  return labels;
}

}  // namespace attn
