#include "refscore/corpus.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "refscore/errors.hpp"
#include "refscore/rng.hpp"

namespace refscore {

using json = nlohmann::json;

void Corpus::add_document(DocumentRecord doc) {
  if (doc.text.empty()) throw ParseError("document '" + doc.doc_id + "' has empty text");
  if (docs_.count(doc.doc_id))
    throw DuplicationError("duplicate doc_id '" + doc.doc_id + "'");
  if (doc.sentences.empty()) doc.sentences = split_sentences(doc.text);
  doc_order_.push_back(doc.doc_id);
  docs_.emplace(doc.doc_id, std::move(doc));
}

void Corpus::add_summary(SummaryRecord summary) {
  if (summary.text.empty())
    throw ParseError("summary '" + summary.summary_id + "' has empty text");
  if (!docs_.count(summary.doc_id))
    throw ReferentialIntegrityError("summary '" + summary.summary_id +
                                    "' references unknown doc '" + summary.doc_id + "'");
  if (summary.sentences.empty()) summary.sentences = split_sentences(summary.text);
  if (summary.origin == SummaryOrigin::reference)
    first_reference_.try_emplace(summary.doc_id, summaries_.size());
  summaries_.push_back(std::move(summary));
}

const DocumentRecord& Corpus::document(const std::string& doc_id) const {
  auto it = docs_.find(doc_id);
  if (it == docs_.end())
    throw ReferentialIntegrityError("unknown doc_id '" + doc_id + "'");
  return it->second;
}

const SummaryRecord* Corpus::reference_summary(const std::string& doc_id) const {
  auto it = first_reference_.find(doc_id);
  return it == first_reference_.end() ? nullptr : &summaries_[it->second];
}

std::size_t Corpus::count_origin(SummaryOrigin origin) const {
  std::size_t n = 0;
  for (const auto& s : summaries_)
    if (s.origin == origin) ++n;
  return n;
}

namespace {

json parse_line(const std::string& line, const std::string& path, std::size_t lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ParseError(path + ":" + std::to_string(lineno) + ": malformed JSON line");
  return j;
}

std::string require_string(const json& j, const char* field, const std::string& path,
                           std::size_t lineno) {
  if (!j.contains(field) || !j[field].is_string())
    throw ParseError(path + ":" + std::to_string(lineno) + ": missing or non-string field \"" +
                     field + "\"");
  return j[field].get<std::string>();
}

double require_number(const json& j, const char* field, const std::string& path,
                      std::size_t lineno) {
  if (!j.contains(field) || !j[field].is_number())
    throw ParseError(path + ":" + std::to_string(lineno) + ": missing or non-numeric field \"" +
                     field + "\"");
  return j[field].get<double>();
}

}  // namespace

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file: " + path);
  Corpus corpus;
  // Two passes over the buffered lines: documents first, so summaries may
  // appear in any order relative to their document.
  std::vector<std::pair<std::size_t, json>> summary_lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, path, lineno);
    std::string kind = require_string(j, "kind", path, lineno);
    if (kind == "doc") {
      DocumentRecord doc;
      doc.doc_id = require_string(j, "doc_id", path, lineno);
      doc.text = require_string(j, "text", path, lineno);
      if (j.contains("domain")) doc.domain = j["domain"].get<std::string>();
      corpus.add_document(std::move(doc));
    } else if (kind == "summary") {
      summary_lines.emplace_back(lineno, std::move(j));
    } else {
      throw ParseError(path + ":" + std::to_string(lineno) + ": unknown kind \"" + kind + "\"");
    }
  }
  for (auto& [ln, j] : summary_lines) {
    SummaryRecord s;
    s.summary_id = require_string(j, "summary_id", path, ln);
    s.doc_id = require_string(j, "doc_id", path, ln);
    s.text = require_string(j, "text", path, ln);
    std::string origin = require_string(j, "origin", path, ln);
    if (origin == "reference")
      s.origin = SummaryOrigin::reference;
    else if (origin == "system")
      s.origin = SummaryOrigin::system;
    else
      throw ParseError(path + ":" + std::to_string(ln) + ": bad origin \"" + origin + "\"");
    corpus.add_summary(std::move(s));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write corpus file: " + path);
  for (const auto& id : corpus.doc_ids()) {
    const auto& d = corpus.document(id);
    json j{{"kind", "doc"}, {"doc_id", d.doc_id}, {"text", d.text}, {"domain", d.domain}};
    out << j.dump() << '\n';
  }
  for (const auto& s : corpus.summaries()) {
    json j{{"kind", "summary"},
           {"summary_id", s.summary_id},
           {"doc_id", s.doc_id},
           {"text", s.text},
           {"origin", s.origin == SummaryOrigin::reference ? "reference" : "system"}};
    out << j.dump() << '\n';
  }
}

SplitAssignment make_splits(const Corpus& corpus, double f_train, double f_val, double f_test,
                            std::uint64_t seed) {
  if (f_train <= 0 || f_val <= 0 || f_test <= 0)
    throw ConfigurationError("split fractions must be positive");
  if (std::abs(f_train + f_val + f_test - 1.0) > 1e-9)
    throw ConfigurationError("split fractions must sum to 1");
  const std::size_t n = corpus.num_documents();
  if (n < 3) throw InsufficientDataError("need at least 3 documents to split");

  std::vector<std::string> ids = corpus.doc_ids();
  Rng rng(seed);
  rng.shuffle(ids);

  std::size_t n_train = static_cast<std::size_t>(std::llround(f_train * n));
  std::size_t n_val = static_cast<std::size_t>(std::llround(f_val * n));
  if (n_train + n_val >= n) n_val = n - n_train - 1;
  SplitAssignment split;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_train)
      split.train.insert(ids[i]);
    else if (i < n_train + n_val)
      split.validation.insert(ids[i]);
    else
      split.test.insert(ids[i]);
  }
  return split;
}

HumanEvalData load_human_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open human-score file: " + path);
  HumanEvalData data;
  std::set<std::string> set_ids;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::pair<std::size_t, json>> score_lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, path, lineno);
    std::string kind = require_string(j, "kind", path, lineno);
    if (kind == "docset") {
      DocumentSet set;
      set.set_id = require_string(j, "set_id", path, lineno);
      if (!j.contains("doc_ids") || !j["doc_ids"].is_array() || j["doc_ids"].empty())
        throw ParseError(path + ":" + std::to_string(lineno) + ": docset needs non-empty doc_ids");
      for (const auto& v : j["doc_ids"]) set.doc_ids.push_back(v.get<std::string>());
      if (!set_ids.insert(set.set_id).second)
        throw DuplicationError("duplicate set_id '" + set.set_id + "'");
      data.sets.push_back(std::move(set));
    } else if (kind == "human") {
      score_lines.emplace_back(lineno, std::move(j));
    } else {
      throw ParseError(path + ":" + std::to_string(lineno) + ": unknown kind \"" + kind + "\"");
    }
  }
  for (auto& [ln, j] : score_lines) {
    HumanScoreRecord rec;
    rec.set_id = require_string(j, "set_id", path, ln);
    rec.summarizer_id = require_string(j, "summarizer_id", path, ln);
    rec.modified_pyramid = require_number(j, "modified_pyramid", path, ln);
    rec.linguistic_quality = require_number(j, "linguistic_quality", path, ln);
    rec.overall = require_number(j, "overall", path, ln);
    // a plain "pyramid" field is accepted and ignored
    if (!set_ids.count(rec.set_id))
      throw ReferentialIntegrityError("human score references unknown set '" + rec.set_id + "'");
    if (!seen.emplace(rec.set_id, rec.summarizer_id).second)
      throw DuplicationError("duplicate (set_id, summarizer_id): (" + rec.set_id + ", " +
                             rec.summarizer_id + ")");
    data.scores.push_back(std::move(rec));
  }
  return data;
}

Vocabulary build_vocabulary(const Corpus& corpus, const std::set<std::string>& doc_ids) {
  Vocabulary vocab;
  for (const auto& id : corpus.doc_ids()) {
    if (!doc_ids.count(id)) continue;
    vocab.add_all(tokenize(corpus.document(id).text, id));
  }
  for (const auto& s : corpus.summaries()) {
    if (s.origin != SummaryOrigin::reference || !doc_ids.count(s.doc_id)) continue;
    vocab.add_all(tokenize(s.text, s.summary_id));
  }
  if (vocab.size() == 0) throw InsufficientDataError("vocabulary is empty");
  return vocab;
}

Vocabulary build_vocabulary(const Corpus& corpus) {
  std::set<std::string> all(corpus.doc_ids().begin(), corpus.doc_ids().end());
  if (all.empty()) throw InsufficientDataError("corpus is empty");
  return build_vocabulary(corpus, all);
}

}  // namespace refscore
