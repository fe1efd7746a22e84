#ifndef REFSCORE_ENCODER_HPP
#define REFSCORE_ENCODER_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "refscore/corpus.hpp"
#include "refscore/textproc.hpp"

namespace refscore {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatF = Mat<float>;
using VecF = Vec<float>;

enum class PaddingUnit { sentence, word, joint_token };

struct PaddingPolicy {
  PaddingUnit unit = PaddingUnit::sentence;
  int doc_limit = 47;
  int summary_limit = 3;
  int joint_budget = 512;  // includes the 3 control tokens
};

// Rows = doc_limit + summary_limit. Masked (padding) rows are all-zero.
struct EmbeddingSequence {
  MatF matrix;
  std::vector<bool> mask;
  int doc_rows = 0;
  int summary_rows = 0;
};

struct JointEncoding {
  VecF vector;
};

// Deterministic split of a (doc, summary) length pair against the token
// budget: pads when under, truncates proportionally when over. Document share
// rounds down, remainder goes to the summary.
struct JointPlan {
  int doc_keep = 0;
  int summary_keep = 0;
  int pad = 0;
  static constexpr int kControlTokens = 3;  // [CLS] + 2 [SEP]
};
JointPlan plan_joint_truncation(int doc_len, int summary_len, int budget);

enum class EncoderKind { word_table, hashed_test, precomputed, external_sentence, external_joint };

class EncoderBinding {
 public:
  virtual ~EncoderBinding() = default;

  EncoderKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  const PaddingPolicy& policy() const { return policy_; }
  const std::string& identity() const { return identity_; }

  // Per-unit (sentence or word) embedding; used by encode_sequence.
  virtual VecF embed_unit(const std::string& unit) const;
  // Joint pair vector; used by encode_joint.
  virtual VecF embed_joint(const std::vector<std::string>& doc_tokens,
                           const std::vector<std::string>& summary_tokens) const;

 protected:
  EncoderBinding(EncoderKind kind, int dimension, PaddingPolicy policy, std::string identity)
      : kind_(kind), dimension_(dimension), policy_(policy), identity_(std::move(identity)) {}

  EncoderKind kind_;
  int dimension_;
  PaddingPolicy policy_;
  std::string identity_;
};

// Dependency-free stand-in encoder: token hash seeds a random projection,
// token vectors are averaged per unit and unit-normalized. Pure function of
// (seed, text), identical across processes.
std::shared_ptr<EncoderBinding> make_hashed_binding(int dimension, PaddingPolicy policy,
                                                    std::uint64_t seed);

// GloVe-style text table: `token v1 ... vd` per line. OOV tokens map to zero.
std::shared_ptr<EncoderBinding> load_word_table(const std::string& path, PaddingPolicy policy);

// Offline sidecar: JSONL {"key":...,"vectors":[[...]]} or {"key":...,"vector":[...]}.
std::shared_ptr<EncoderBinding> load_precomputed(const std::string& path, PaddingPolicy policy);
void save_precomputed_sequence(const std::string& path,
                               const std::map<std::string, MatF>& entries);
void save_precomputed_joint(const std::string& path, const std::map<std::string, VecF>& entries);

// Reconstruct a binding from its identity string (inverse of identity()).
// File-backed bindings resolve their paths here; a missing file surfaces as
// encoder-unavailable.
std::shared_ptr<EncoderBinding> binding_from_identity(const std::string& identity);

PaddingPolicy compute_padding_limits(const Corpus& corpus, double quantile, PaddingUnit unit);

EmbeddingSequence encode_sequence(const DocumentRecord& doc, const std::string& summary_text,
                                  const EncoderBinding& binding);
JointEncoding encode_joint(const std::vector<std::string>& doc_tokens,
                           const std::vector<std::string>& summary_tokens,
                           const EncoderBinding& binding);

// Encoding of a (document, summary) pair as the head input matrix:
// sequence bindings give (doc_limit + summary_limit) x d, joint bindings a
// single 1 x H row.
MatF encode_pair(const DocumentRecord& doc, const std::string& summary_text,
                 const EncoderBinding& binding);

}  // namespace refscore

#endif  // REFSCORE_ENCODER_HPP
