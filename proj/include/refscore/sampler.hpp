#ifndef REFSCORE_SAMPLER_HPP
#define REFSCORE_SAMPLER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "refscore/corpus.hpp"
#include "refscore/rng.hpp"
#include "refscore/textproc.hpp"

namespace refscore {

enum class Provenance { original, crosspair, mut_add, mut_delete, mut_replace };
enum class SampleMethod { crosspair, add, del, replace };

const char* provenance_name(Provenance p);
SampleMethod parse_method(const std::string& name);

struct LabeledSample {
  std::string doc_id;
  TokenSequence summary_tokens;
  double label = 1.0;  // 1 - mutation_fraction for mutated samples
  Provenance provenance = Provenance::original;
  double mutation_fraction = 0.0;
};

enum class RateDistribution { uniform_continuous, uniform_grid };

struct SamplerConfig {
  std::size_t negatives_per_article = 1;
  RateDistribution rate_distribution = RateDistribution::uniform_grid;
  double grid_step = 0.1;  // grid is {step, 2*step, ...} below 1
  std::uint64_t seed = 0;
};

struct MutationResult {
  TokenSequence tokens;
  double achieved_fraction = 0.0;  // k / m, with k round-half-up of fraction * m
};

// Inserts round(fraction * m) vocabulary tokens at uniform positions.
MutationResult mutate_add(const TokenSequence& summary, double fraction, const Vocabulary& vocab,
                          Rng& rng);
// Deletes round(fraction * m) distinct positions; refuses to empty the summary.
MutationResult mutate_delete(const TokenSequence& summary, double fraction, Rng& rng);
// Replaces round(fraction * m) distinct positions with differing vocabulary tokens.
MutationResult mutate_replace(const TokenSequence& summary, double fraction,
                              const Vocabulary& vocab, Rng& rng);

// One positive (the document's own reference summary, label 1) plus
// negatives_per_article cross-paired negatives (label 0) per document.
std::vector<LabeledSample> cross_pair(const Corpus& corpus, const std::set<std::string>& split,
                                      const SamplerConfig& config);

std::vector<LabeledSample> build_training_set(const Corpus& corpus,
                                              const std::set<std::string>& split,
                                              SampleMethod method, const SamplerConfig& config,
                                              const Vocabulary& vocab);

void save_samples(const std::vector<LabeledSample>& samples, const std::string& path);
std::vector<LabeledSample> load_samples(const std::string& path);

}  // namespace refscore

#endif  // REFSCORE_SAMPLER_HPP
