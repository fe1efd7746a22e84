#include "refscore/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "refscore/errors.hpp"

namespace refscore {

using json = nlohmann::json;

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::original: return "original";
    case Provenance::crosspair: return "crosspair";
    case Provenance::mut_add: return "mut_add";
    case Provenance::mut_delete: return "mut_delete";
    case Provenance::mut_replace: return "mut_replace";
  }
  return "?";
}

SampleMethod parse_method(const std::string& name) {
  if (name == "crosspair") return SampleMethod::crosspair;
  if (name == "add") return SampleMethod::add;
  if (name == "delete") return SampleMethod::del;
  if (name == "replace") return SampleMethod::replace;
  throw ConfigurationError("unknown sample method '" + name + "'");
}

namespace {

// round-half-up
std::size_t mutation_count(double fraction, std::size_t m) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(m) + 0.5));
}

// k distinct positions out of m, ascending
std::vector<std::size_t> pick_positions(std::size_t m, std::size_t k, Rng& rng) {
  std::vector<std::size_t> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;
  for (std::size_t i = 0; i < k; ++i)
    std::swap(all[i], all[i + rng.next_below(m - i)]);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

const std::string& random_token(const Vocabulary& vocab, Rng& rng) {
  const auto& toks = vocab.sorted_tokens();
  return toks[rng.next_below(toks.size())];
}

}  // namespace

MutationResult mutate_add(const TokenSequence& summary, double fraction, const Vocabulary& vocab,
                          Rng& rng) {
  if (summary.empty()) throw DegenerateInputError("cannot mutate empty summary");
  if (vocab.size() == 0) throw InsufficientDataError("empty vocabulary");
  if (fraction < 0 || fraction > 1) throw ConfigurationError("fraction out of [0,1]");
  const std::size_t m = summary.size();
  const std::size_t k = mutation_count(fraction, m);
  MutationResult res;
  res.tokens = summary;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t pos = rng.next_below(res.tokens.size() + 1);
    res.tokens.tokens.insert(res.tokens.tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                             random_token(vocab, rng));
  }
  res.achieved_fraction = static_cast<double>(k) / static_cast<double>(m);
  return res;
}

MutationResult mutate_delete(const TokenSequence& summary, double fraction, Rng& rng) {
  if (summary.empty()) throw DegenerateInputError("cannot mutate empty summary");
  if (fraction < 0 || fraction >= 1) throw ConfigurationError("fraction out of [0,1)");
  const std::size_t m = summary.size();
  const std::size_t k = mutation_count(fraction, m);
  if (k >= m) throw DegenerateInputError("deletion would empty the summary");
  auto positions = pick_positions(m, k, rng);
  MutationResult res;
  res.tokens.source_id = summary.source_id;
  std::size_t next = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (next < positions.size() && positions[next] == i) {
      ++next;
      continue;
    }
    res.tokens.tokens.push_back(summary.tokens[i]);
  }
  res.achieved_fraction = static_cast<double>(k) / static_cast<double>(m);
  return res;
}

MutationResult mutate_replace(const TokenSequence& summary, double fraction,
                              const Vocabulary& vocab, Rng& rng) {
  if (summary.empty()) throw DegenerateInputError("cannot mutate empty summary");
  if (fraction < 0 || fraction > 1) throw ConfigurationError("fraction out of [0,1]");
  const std::size_t m = summary.size();
  const std::size_t k = mutation_count(fraction, m);
  MutationResult res;
  res.tokens = summary;
  auto positions = pick_positions(m, k, rng);
  for (std::size_t pos : positions) {
    const std::string& old = summary.tokens[pos];
    if (vocab.size() == 1 && vocab.contains(old))
      throw CannotReplaceError("vocabulary has no token differing from '" + old + "'");
    std::string repl;
    do {
      repl = random_token(vocab, rng);
    } while (repl == old);
    res.tokens.tokens[pos] = std::move(repl);
  }
  res.achieved_fraction = static_cast<double>(k) / static_cast<double>(m);
  return res;
}

namespace {

std::vector<std::string> docs_with_reference(const Corpus& corpus,
                                             const std::set<std::string>& split) {
  std::vector<std::string> ids;
  for (const auto& id : corpus.doc_ids())
    if (split.count(id) && corpus.reference_summary(id)) ids.push_back(id);
  return ids;
}

std::vector<double> grid_values(double step) {
  if (step <= 0 || step >= 1) throw ConfigurationError("grid step must be in (0,1)");
  const double n = 1.0 / step;
  if (std::abs(n - std::round(n)) > 1e-9)
    throw ConfigurationError("grid step must divide 1 evenly");
  std::vector<double> values;
  for (std::size_t i = 1; i < static_cast<std::size_t>(std::llround(n)); ++i)
    values.push_back(step * static_cast<double>(i));
  return values;
}

}  // namespace

std::vector<LabeledSample> cross_pair(const Corpus& corpus, const std::set<std::string>& split,
                                      const SamplerConfig& config) {
  auto ids = docs_with_reference(corpus, split);
  if (ids.size() < 2)
    throw InsufficientDataError("cross pairing needs at least 2 documents with references");
  std::vector<LabeledSample> samples;
  for (const auto& id : ids) {
    Rng rng(sub_seed(config.seed, id));
    const SummaryRecord* own = corpus.reference_summary(id);
    LabeledSample pos;
    pos.doc_id = id;
    pos.summary_tokens = tokenize(own->text, own->summary_id);
    pos.label = 1.0;
    pos.provenance = Provenance::original;
    samples.push_back(std::move(pos));
    // negatives: distinct other documents
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < ids.size(); ++j)
      if (ids[j] != id) others.push_back(j);
    const std::size_t want = std::min(config.negatives_per_article, others.size());
    for (std::size_t i = 0; i < want; ++i)
      std::swap(others[i], others[i + rng.next_below(others.size() - i)]);
    for (std::size_t i = 0; i < want; ++i) {
      const SummaryRecord* neg_sum = corpus.reference_summary(ids[others[i]]);
      LabeledSample neg;
      neg.doc_id = id;
      neg.summary_tokens = tokenize(neg_sum->text, neg_sum->summary_id);
      neg.label = 0.0;
      neg.provenance = Provenance::crosspair;
      samples.push_back(std::move(neg));
    }
  }
  return samples;
}

std::vector<LabeledSample> build_training_set(const Corpus& corpus,
                                              const std::set<std::string>& split,
                                              SampleMethod method, const SamplerConfig& config,
                                              const Vocabulary& vocab) {
  if (config.negatives_per_article < 1)
    throw ConfigurationError("negatives_per_article must be >= 1");
  std::vector<LabeledSample> samples;
  if (method == SampleMethod::crosspair) {
    samples = cross_pair(corpus, split, config);
  } else {
    auto ids = docs_with_reference(corpus, split);
    if (ids.empty()) throw InsufficientDataError("no documents with reference summaries");
    const auto grid = grid_values(config.grid_step);
    for (const auto& id : ids) {
      Rng rng(sub_seed(config.seed, id));
      const SummaryRecord* own = corpus.reference_summary(id);
      TokenSequence gold = tokenize(own->text, own->summary_id);
      LabeledSample pos;
      pos.doc_id = id;
      pos.summary_tokens = gold;
      pos.label = 1.0;
      pos.provenance = Provenance::original;
      samples.push_back(std::move(pos));
      for (std::size_t j = 0; j < config.negatives_per_article; ++j) {
        double fraction = config.rate_distribution == RateDistribution::uniform_grid
                              ? grid[j % grid.size()]
                              : rng.next_real();
        MutationResult res;
        Provenance prov;
        switch (method) {
          case SampleMethod::add:
            res = mutate_add(gold, fraction, vocab, rng);
            prov = Provenance::mut_add;
            break;
          case SampleMethod::del:
            res = mutate_delete(gold, fraction, rng);
            prov = Provenance::mut_delete;
            break;
          default:
            res = mutate_replace(gold, fraction, vocab, rng);
            prov = Provenance::mut_replace;
            break;
        }
        LabeledSample neg;
        neg.doc_id = id;
        neg.summary_tokens = std::move(res.tokens);
        neg.mutation_fraction = res.achieved_fraction;
        neg.label = 1.0 - res.achieved_fraction;
        neg.provenance = prov;
        samples.push_back(std::move(neg));
      }
    }
  }
  Rng shuffle_rng(sub_seed(config.seed, "shuffle"));
  shuffle_rng.shuffle(samples);
  return samples;
}

void save_samples(const std::vector<LabeledSample>& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write sample file: " + path);
  for (const auto& s : samples) {
    json j{{"doc_id", s.doc_id},
           {"summary", s.summary_tokens.joined()},
           {"label", s.label},
           {"provenance", provenance_name(s.provenance)},
           {"mutation_fraction", s.mutation_fraction}};
    out << j.dump() << '\n';
  }
}

std::vector<LabeledSample> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sample file: " + path);
  std::vector<LabeledSample> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw ParseError(path + ":" + std::to_string(lineno) + ": malformed JSON line");
    LabeledSample s;
    s.doc_id = j.at("doc_id").get<std::string>();
    s.summary_tokens = tokenize(j.at("summary").get<std::string>(), s.doc_id);
    s.label = j.at("label").get<double>();
    std::string prov = j.at("provenance").get<std::string>();
    if (prov == "original") s.provenance = Provenance::original;
    else if (prov == "crosspair") s.provenance = Provenance::crosspair;
    else if (prov == "mut_add") s.provenance = Provenance::mut_add;
    else if (prov == "mut_delete") s.provenance = Provenance::mut_delete;
    else if (prov == "mut_replace") s.provenance = Provenance::mut_replace;
    else throw ParseError(path + ":" + std::to_string(lineno) + ": bad provenance '" + prov + "'");
    s.mutation_fraction = j.at("mutation_fraction").get<double>();
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace refscore
