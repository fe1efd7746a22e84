#ifndef REFSCORE_MODEL_HPP
#define REFSCORE_MODEL_HPP

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "refscore/corpus.hpp"
#include "refscore/encoder.hpp"
#include "refscore/heads.hpp"
#include "refscore/sampler.hpp"

namespace refscore {

enum class Loss { mse, bce };

struct TrainConfig {
  Loss loss = Loss::mse;
  double learning_rate = 1e-3;  // RMSProp
  int early_stop_patience = 3;
  int max_epochs = 50;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

// Validation-loss tracking with strict-improvement patience. "Improving"
// means strictly lower than the best seen so far (min_delta = 0).
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}

  struct Verdict {
    bool improved = false;
    bool stop = false;
  };

  Verdict observe(double val_loss) {
    Verdict v;
    if (val_loss < best_) {
      best_ = val_loss;
      best_epoch_ = epoch_;
      since_ = 0;
      v.improved = true;
    } else {
      ++since_;
      v.stop = since_ >= patience_;
    }
    ++epoch_;
    return v;
  }

  int best_epoch() const { return best_epoch_; }  // 0-based
  double best_loss() const { return best_; }

 private:
  int patience_;
  int epoch_ = 0;
  int best_epoch_ = -1;
  int since_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

class TrainedScorer {
 public:
  TrainedScorer(std::unique_ptr<Head<float>> head, HeadConfig head_config,
                std::string binding_identity, TrainConfig train_config,
                std::vector<EpochRecord> history, Eigen::Index rows, Eigen::Index cols);

  double predict(const DocumentRecord& doc, const std::string& summary_text) const;
  double predict_encoded(const MatF& encoding) const;

  const Head<float>& head() const { return *head_; }
  Head<float>& head() { return *head_; }
  const HeadConfig& head_config() const { return head_config_; }
  const std::string& binding_identity() const { return binding_identity_; }
  const TrainConfig& train_config() const { return train_config_; }
  const std::vector<EpochRecord>& history() const { return history_; }
  Eigen::Index input_rows() const { return rows_; }
  Eigen::Index input_cols() const { return cols_; }

  // Resolved lazily so that a model file referencing a missing encoder loads
  // fine and only fails at predict time.
  const EncoderBinding& binding() const;

 private:
  std::unique_ptr<Head<float>> head_;
  HeadConfig head_config_;
  std::string binding_identity_;
  TrainConfig train_config_;
  std::vector<EpochRecord> history_;
  Eigen::Index rows_, cols_;
  mutable std::shared_ptr<EncoderBinding> binding_;
};

// RMSProp + patience-based early stopping; returns the parameters from the
// epoch with the best validation loss.
TrainedScorer train(const std::vector<LabeledSample>& train_samples,
                    const std::vector<LabeledSample>& val_samples, const Corpus& corpus,
                    const EncoderBinding& binding, const HeadConfig& head_config,
                    const TrainConfig& train_config);

void save_model(const TrainedScorer& scorer, const std::string& path);
TrainedScorer load_model(const std::string& path);

const char* loss_name(Loss loss);
Loss parse_loss(const std::string& name);
const char* head_kind_name(HeadKind kind);
HeadKind parse_head_kind(const std::string& name);

}  // namespace refscore

#endif  // REFSCORE_MODEL_HPP
