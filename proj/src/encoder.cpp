#include "refscore/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "refscore/errors.hpp"
#include "refscore/rng.hpp"

namespace refscore {

using json = nlohmann::json;

namespace {

const char* unit_name(PaddingUnit u) {
  switch (u) {
    case PaddingUnit::sentence: return "sentence";
    case PaddingUnit::word: return "word";
    case PaddingUnit::joint_token: return "joint_token";
  }
  return "?";
}

PaddingUnit parse_unit(const std::string& s) {
  if (s == "sentence") return PaddingUnit::sentence;
  if (s == "word") return PaddingUnit::word;
  if (s == "joint_token") return PaddingUnit::joint_token;
  throw ConfigurationError("unknown padding unit '" + s + "'");
}

std::string policy_identity(const PaddingPolicy& p) {
  std::ostringstream os;
  os << "unit=" << unit_name(p.unit) << "|doc=" << p.doc_limit << "|sum=" << p.summary_limit
     << "|budget=" << p.joint_budget;
  return os.str();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

}  // namespace

JointPlan plan_joint_truncation(int doc_len, int summary_len, int budget) {
  if (doc_len < 0 || summary_len < 0) throw ConfigurationError("negative token count");
  const int avail = budget - JointPlan::kControlTokens;
  if (avail < 0) throw ConfigurationError("joint budget smaller than control tokens");
  JointPlan plan;
  const long total = static_cast<long>(doc_len) + summary_len;
  if (total <= avail) {
    plan.doc_keep = doc_len;
    plan.summary_keep = summary_len;
    plan.pad = avail - static_cast<int>(total);
  } else {
    plan.doc_keep = static_cast<int>(static_cast<long>(avail) * doc_len / total);
    plan.summary_keep = avail - plan.doc_keep;
    plan.pad = 0;
  }
  return plan;
}

VecF EncoderBinding::embed_unit(const std::string&) const {
  throw EncoderUnavailableError("binding '" + identity_ + "' has no per-unit embeddings");
}

VecF EncoderBinding::embed_joint(const std::vector<std::string>&,
                                 const std::vector<std::string>&) const {
  throw EncoderUnavailableError("binding '" + identity_ + "' has no joint embeddings");
}

// ---------------------------------------------------------------------------
// hashed_test

namespace {

class HashedBinding : public EncoderBinding {
 public:
  HashedBinding(int dimension, PaddingPolicy policy, std::uint64_t seed)
      : EncoderBinding(EncoderKind::hashed_test, dimension, policy,
                       "hashed_test|d=" + std::to_string(dimension) + "|" +
                           policy_identity(policy) + "|seed=" + std::to_string(seed)),
        seed_(seed) {}

  VecF token_vector(const std::string& token) const {
    Rng rng(fnv1a(token, seed_ ^ 0x9e3779b97f4a7c15ULL));
    VecF v(dimension_);
    for (int i = 0; i < dimension_; ++i)
      v(i) = static_cast<float>(rng.next_real(-1.0, 1.0));
    return v;
  }

  VecF embed_unit(const std::string& unit) const override {
    TokenSequence toks = tokenize(unit);
    VecF sum = VecF::Zero(dimension_);
    for (const auto& t : toks.tokens) sum += token_vector(t);
    if (toks.empty()) return sum;
    sum /= static_cast<float>(toks.size());
    float norm = sum.norm();
    if (norm > 0) sum /= norm;
    return sum;
  }

  VecF embed_joint(const std::vector<std::string>& doc_tokens,
                   const std::vector<std::string>& summary_tokens) const override {
    auto plan = plan_joint_truncation(static_cast<int>(doc_tokens.size()),
                                      static_cast<int>(summary_tokens.size()),
                                      policy_.joint_budget);
    std::uint64_t h = seed_ ^ 0x2545f4914f6cdd1dULL;
    auto mix = [&](const std::string& tok) { h = fnv1a(tok, h) ^ (h << 1); };
    mix("[CLS]");
    for (int i = 0; i < plan.doc_keep; ++i) mix(doc_tokens[static_cast<std::size_t>(i)]);
    mix("[SEP]");
    for (int i = 0; i < plan.summary_keep; ++i) mix(summary_tokens[static_cast<std::size_t>(i)]);
    mix("[SEP]");
    // pad tokens do not perturb the hash; they are position fillers only
    Rng rng(h);
    VecF v(dimension_);
    for (int i = 0; i < dimension_; ++i)
      v(i) = static_cast<float>(rng.next_real(-1.0, 1.0));
    float norm = v.norm();
    if (norm > 0) v /= norm;
    return v;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace

std::shared_ptr<EncoderBinding> make_hashed_binding(int dimension, PaddingPolicy policy,
                                                    std::uint64_t seed) {
  if (dimension <= 0) throw ConfigurationError("embedding dimension must be positive");
  return std::make_shared<HashedBinding>(dimension, policy, seed);
}

// ---------------------------------------------------------------------------
// word_table

namespace {

class WordTableBinding : public EncoderBinding {
 public:
  WordTableBinding(std::map<std::string, VecF> table, int dimension, PaddingPolicy policy,
                   const std::string& path)
      : EncoderBinding(EncoderKind::word_table, dimension, policy,
                       "word_table|d=" + std::to_string(dimension) + "|" +
                           policy_identity(policy) + "|path=" + path),
        table_(std::move(table)) {}

  VecF embed_unit(const std::string& unit) const override {
    TokenSequence toks = tokenize(unit);
    VecF sum = VecF::Zero(dimension_);
    if (toks.empty()) return sum;
    for (const auto& t : toks.tokens) {
      auto it = table_.find(t);
      if (it != table_.end()) sum += it->second;  // OOV contributes the zero vector
    }
    sum /= static_cast<float>(toks.size());
    return sum;
  }

 private:
  std::map<std::string, VecF> table_;
};

}  // namespace

std::shared_ptr<EncoderBinding> load_word_table(const std::string& path, PaddingPolicy policy) {
  std::ifstream in(path);
  if (!in) throw EncoderUnavailableError("cannot open word table: " + path);
  std::map<std::string, VecF> table;
  int dim = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string token;
    is >> token;
    std::vector<float> vals;
    float v;
    while (is >> v) vals.push_back(v);
    if (vals.empty())
      throw FormatError(path + ":" + std::to_string(lineno) + ": no values for token");
    if (dim < 0) dim = static_cast<int>(vals.size());
    if (static_cast<int>(vals.size()) != dim)
      throw FormatError(path + ":" + std::to_string(lineno) + ": ragged row (" +
                        std::to_string(vals.size()) + " values, expected " + std::to_string(dim) +
                        ")");
    table[token] = Eigen::Map<VecF>(vals.data(), dim);
  }
  if (dim < 0) throw FormatError("word table is empty: " + path);
  return std::make_shared<WordTableBinding>(std::move(table), dim, policy, path);
}

// ---------------------------------------------------------------------------
// precomputed sidecar

namespace {

class PrecomputedBinding : public EncoderBinding {
 public:
  PrecomputedBinding(std::map<std::string, MatF> sequences, std::map<std::string, VecF> joints,
                     int dimension, PaddingPolicy policy, const std::string& path)
      : EncoderBinding(EncoderKind::precomputed, dimension, policy,
                       "precomputed|d=" + std::to_string(dimension) + "|" +
                           policy_identity(policy) + "|path=" + path),
        sequences_(std::move(sequences)),
        joints_(std::move(joints)) {}

  const MatF& sequence_for(const std::string& key) const {
    auto it = sequences_.find(key);
    if (it == sequences_.end())
      throw MissingEmbeddingError("no precomputed embedding for key '" + key + "'");
    return it->second;
  }

  VecF embed_joint_key(const std::string& key) const {
    auto it = joints_.find(key);
    if (it == joints_.end())
      throw MissingEmbeddingError("no precomputed joint embedding for key '" + key + "'");
    return it->second;
  }

  std::size_t num_sequences() const { return sequences_.size(); }

 private:
  std::map<std::string, MatF> sequences_;
  std::map<std::string, VecF> joints_;
};

}  // namespace

std::shared_ptr<EncoderBinding> load_precomputed(const std::string& path, PaddingPolicy policy) {
  std::ifstream in(path);
  if (!in) throw EncoderUnavailableError("cannot open sidecar: " + path);
  std::map<std::string, MatF> sequences;
  std::map<std::string, VecF> joints;
  int dim = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw ParseError(path + ":" + std::to_string(lineno) + ": malformed JSON line");
    std::string key = j.at("key").get<std::string>();
    if (j.contains("vectors")) {
      auto rows = j["vectors"].get<std::vector<std::vector<float>>>();
      if (rows.empty()) throw FormatError(path + ": empty vectors for key '" + key + "'");
      MatF m(rows.size(), rows[0].size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size())
          throw FormatError(path + ": ragged vectors for key '" + key + "'");
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
      }
      if (dim < 0) dim = static_cast<int>(m.cols());
      sequences[key] = std::move(m);
    } else if (j.contains("vector")) {
      auto vals = j["vector"].get<std::vector<float>>();
      VecF v = Eigen::Map<VecF>(vals.data(), static_cast<Eigen::Index>(vals.size()));
      if (dim < 0) dim = static_cast<int>(v.size());
      joints[key] = std::move(v);
    } else {
      throw FormatError(path + ":" + std::to_string(lineno) + ": need \"vectors\" or \"vector\"");
    }
  }
  if (dim < 0) throw FormatError("sidecar is empty: " + path);
  return std::make_shared<PrecomputedBinding>(std::move(sequences), std::move(joints), dim,
                                              policy, path);
}

void save_precomputed_sequence(const std::string& path,
                               const std::map<std::string, MatF>& entries) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write sidecar: " + path);
  for (const auto& [key, m] : entries) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    out << json{{"key", key}, {"vectors", std::move(rows)}}.dump() << '\n';
  }
}

void save_precomputed_joint(const std::string& path, const std::map<std::string, VecF>& entries) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write sidecar: " + path);
  for (const auto& [key, v] : entries) {
    json vals = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) vals.push_back(v(i));
    out << json{{"key", key}, {"vector", std::move(vals)}}.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------

std::shared_ptr<EncoderBinding> binding_from_identity(const std::string& identity) {
  std::map<std::string, std::string> kv;
  std::string head;
  std::istringstream is(identity);
  std::string part;
  bool first = true;
  while (std::getline(is, part, '|')) {
    if (first) {
      head = part;
      first = false;
      continue;
    }
    auto eq = part.find('=');
    if (eq == std::string::npos)
      throw FormatError("bad binding identity: " + identity);
    kv[part.substr(0, eq)] = part.substr(eq + 1);
  }
  PaddingPolicy policy;
  if (kv.count("unit")) policy.unit = parse_unit(kv["unit"]);
  if (kv.count("doc")) policy.doc_limit = std::stoi(kv["doc"]);
  if (kv.count("sum")) policy.summary_limit = std::stoi(kv["sum"]);
  if (kv.count("budget")) policy.joint_budget = std::stoi(kv["budget"]);
  if (head == "hashed_test")
    return make_hashed_binding(std::stoi(kv.at("d")), policy,
                               std::stoull(kv.at("seed")));
  if (head == "word_table") return load_word_table(kv.at("path"), policy);
  if (head == "precomputed") return load_precomputed(kv.at("path"), policy);
  throw FormatError("unknown binding kind in identity: " + identity);
}

PaddingPolicy compute_padding_limits(const Corpus& corpus, double quantile, PaddingUnit unit) {
  if (quantile <= 0 || quantile >= 1) throw ConfigurationError("quantile must be in (0,1)");
  if (corpus.num_documents() == 0) throw InsufficientDataError("empty corpus");
  auto length_of = [&](const std::string& text, const std::vector<std::string>& sentences) {
    return unit == PaddingUnit::sentence ? sentences.size() : tokenize(text).size();
  };
  std::vector<std::size_t> doc_lens, sum_lens;
  for (const auto& id : corpus.doc_ids()) {
    const auto& d = corpus.document(id);
    doc_lens.push_back(length_of(d.text, d.sentences));
  }
  for (const auto& s : corpus.summaries()) sum_lens.push_back(length_of(s.text, s.sentences));
  auto quantile_len = [&](std::vector<std::size_t>& lens) -> int {
    if (lens.empty()) return 1;
    std::sort(lens.begin(), lens.end());
    std::size_t idx = static_cast<std::size_t>(
        std::ceil(quantile * static_cast<double>(lens.size())));
    if (idx == 0) idx = 1;
    return static_cast<int>(std::max<std::size_t>(1, lens[idx - 1]));
  };
  PaddingPolicy policy;
  policy.unit = unit;
  policy.doc_limit = quantile_len(doc_lens);
  policy.summary_limit = quantile_len(sum_lens);
  return policy;
}

EmbeddingSequence encode_sequence(const DocumentRecord& doc, const std::string& summary_text,
                                  const EncoderBinding& binding) {
  const PaddingPolicy& policy = binding.policy();
  if (policy.unit == PaddingUnit::joint_token)
    throw ConfigurationError("encode_sequence needs a sentence or word padding unit");

  auto units_of = [&](const std::string& text,
                      const std::vector<std::string>& sentences) -> std::vector<std::string> {
    if (policy.unit == PaddingUnit::sentence)
      return sentences.empty() ? split_sentences(text) : sentences;
    return tokenize(text).tokens;
  };
  std::vector<std::string> doc_units = units_of(doc.text, doc.sentences);
  std::vector<std::string> sum_units = units_of(summary_text, {});

  const int rows = policy.doc_limit + policy.summary_limit;
  const int d = binding.dimension();
  EmbeddingSequence seq;
  seq.matrix = MatF::Zero(rows, d);
  seq.mask.assign(static_cast<std::size_t>(rows), false);
  seq.doc_rows = policy.doc_limit;
  seq.summary_rows = policy.summary_limit;

  if (binding.kind() == EncoderKind::precomputed) {
    const auto& pre = static_cast<const PrecomputedBinding&>(binding);
    auto fill = [&](const std::string& key, int offset, int limit) {
      const MatF& m = pre.sequence_for(key);
      int keep = std::min<int>(limit, static_cast<int>(m.rows()));
      for (int r = 0; r < keep; ++r) {
        seq.matrix.row(offset + r) = m.row(r);
        seq.mask[static_cast<std::size_t>(offset + r)] = true;
      }
    };
    fill("doc:" + doc.doc_id, 0, policy.doc_limit);
    fill("sum:" + hex64(fnv1a(summary_text)), policy.doc_limit, policy.summary_limit);
    return seq;
  }

  auto fill = [&](const std::vector<std::string>& units, int offset, int limit) {
    int keep = std::min<int>(limit, static_cast<int>(units.size()));
    for (int r = 0; r < keep; ++r) {
      seq.matrix.row(offset + r) = binding.embed_unit(units[static_cast<std::size_t>(r)]);
      seq.mask[static_cast<std::size_t>(offset + r)] = true;
    }
  };
  fill(doc_units, 0, policy.doc_limit);
  fill(sum_units, policy.doc_limit, policy.summary_limit);
  return seq;
}

JointEncoding encode_joint(const std::vector<std::string>& doc_tokens,
                           const std::vector<std::string>& summary_tokens,
                           const EncoderBinding& binding) {
  if (binding.kind() == EncoderKind::precomputed) {
    auto plan = plan_joint_truncation(static_cast<int>(doc_tokens.size()),
                                      static_cast<int>(summary_tokens.size()),
                                      binding.policy().joint_budget);
    std::uint64_t hd = 0xcbf29ce484222325ULL, hs = 0xcbf29ce484222325ULL;
    for (int i = 0; i < plan.doc_keep; ++i)
      hd = fnv1a(doc_tokens[static_cast<std::size_t>(i)], hd) ^ (hd << 1);
    for (int i = 0; i < plan.summary_keep; ++i)
      hs = fnv1a(summary_tokens[static_cast<std::size_t>(i)], hs) ^ (hs << 1);
    const auto& pre = static_cast<const PrecomputedBinding&>(binding);
    return {pre.embed_joint_key("joint:" + hex64(hd) + ":" + hex64(hs))};
  }
  return {binding.embed_joint(doc_tokens, summary_tokens)};
}

MatF encode_pair(const DocumentRecord& doc, const std::string& summary_text,
                 const EncoderBinding& binding) {
  if (binding.policy().unit == PaddingUnit::joint_token) {
    JointEncoding enc =
        encode_joint(tokenize(doc.text).tokens, tokenize(summary_text).tokens, binding);
    return enc.vector.transpose();
  }
  return encode_sequence(doc, summary_text, binding).matrix;
}

}  // namespace refscore
