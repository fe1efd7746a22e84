#include "refscore/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "refscore/errors.hpp"
#include "refscore/rng.hpp"

namespace refscore {

using json = nlohmann::json;

const char* loss_name(Loss loss) { return loss == Loss::mse ? "mse" : "bce"; }

Loss parse_loss(const std::string& name) {
  if (name == "mse") return Loss::mse;
  if (name == "bce") return Loss::bce;
  throw ConfigurationError("unknown loss '" + name + "'");
}

const char* head_kind_name(HeadKind kind) {
  switch (kind) {
    case HeadKind::fc_only: return "fc_only";
    case HeadKind::cnn: return "cnn";
    case HeadKind::lstm: return "lstm";
  }
  return "?";
}

HeadKind parse_head_kind(const std::string& name) {
  if (name == "fc_only") return HeadKind::fc_only;
  if (name == "cnn") return HeadKind::cnn;
  if (name == "lstm") return HeadKind::lstm;
  throw ConfigurationError("unknown head kind '" + name + "'");
}

TrainedScorer::TrainedScorer(std::unique_ptr<Head<float>> head, HeadConfig head_config,
                             std::string binding_identity, TrainConfig train_config,
                             std::vector<EpochRecord> history, Eigen::Index rows,
                             Eigen::Index cols)
    : head_(std::move(head)),
      head_config_(head_config),
      binding_identity_(std::move(binding_identity)),
      train_config_(train_config),
      history_(std::move(history)),
      rows_(rows),
      cols_(cols) {}

const EncoderBinding& TrainedScorer::binding() const {
  if (!binding_) binding_ = binding_from_identity(binding_identity_);
  return *binding_;
}

double TrainedScorer::predict_encoded(const MatF& encoding) const {
  return static_cast<double>(head_->forward(encoding));
}

double TrainedScorer::predict(const DocumentRecord& doc, const std::string& summary_text) const {
  return predict_encoded(encode_pair(doc, summary_text, binding()));
}

namespace {

double batch_loss(Loss loss, double y, double t) {
  if (loss == Loss::mse) {
    double e = y - t;
    return e * e;
  }
  const double eps = 1e-12;
  return -(t * std::log(y + eps) + (1.0 - t) * std::log(1.0 - y + eps));
}

std::vector<MatF> encode_all(const std::vector<LabeledSample>& samples, const Corpus& corpus,
                             const EncoderBinding& binding) {
  std::vector<MatF> out;
  out.reserve(samples.size());
  for (const auto& s : samples)
    out.push_back(encode_pair(corpus.document(s.doc_id), s.summary_tokens.joined(), binding));
  return out;
}

}  // namespace

TrainedScorer train(const std::vector<LabeledSample>& train_samples,
                    const std::vector<LabeledSample>& val_samples, const Corpus& corpus,
                    const EncoderBinding& binding, const HeadConfig& head_config,
                    const TrainConfig& cfg) {
  if (train_samples.empty()) throw InsufficientDataError("no training samples");
  if (cfg.early_stop_patience < 1) throw ConfigurationError("patience must be >= 1");
  if (cfg.loss == Loss::bce) {
    for (const auto& s : train_samples)
      if (s.label != 0.0 && s.label != 1.0)
        throw LabelLossMismatchError("bce loss requires labels in {0,1}, got " +
                                     std::to_string(s.label));
  }

  std::vector<MatF> X = encode_all(train_samples, corpus, binding);
  std::vector<MatF> Xv = encode_all(val_samples, corpus, binding);
  const Eigen::Index rows = X[0].rows();
  const Eigen::Index cols = X[0].cols();

  auto head = build_head<float>(rows, cols, head_config, cfg.seed);
  const Eigen::Index P = head->num_params();

  Vec<float> params = head->params();
  Vec<float> cache = Vec<float>::Zero(P);  // RMSProp squared-gradient average
  Vec<float> grad(P);
  const float decay = 0.9f;
  const float eps = 1e-8f;
  const float lr = static_cast<float>(cfg.learning_rate);

  auto eval_loss = [&](const std::vector<MatF>& xs,
                       const std::vector<LabeledSample>& ss) -> double {
    if (xs.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      total += batch_loss(cfg.loss, head->forward(xs[i]), ss[i].label);
    return total / static_cast<double>(xs.size());
  };

  std::vector<std::size_t> order(X.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  EarlyStopper stopper(cfg.early_stop_patience);
  Vec<float> best_params = params;
  std::vector<EpochRecord> history;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    Rng rng(sub_seed(cfg.seed, "epoch" + std::to_string(epoch)));
    rng.shuffle(order);
    double train_total = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const double bsize = static_cast<double>(end - start);
      grad.setZero();
      head->set_params(params);
      for (std::size_t i = start; i < end; ++i) {
        const auto& sample = train_samples[order[i]];
        const double t = sample.label;
        auto dz_of_y = [&](float y) -> float {
          double yd = y;
          train_total += batch_loss(cfg.loss, yd, t);
          if (cfg.loss == Loss::bce) return static_cast<float>((yd - t) / bsize);
          return static_cast<float>(2.0 * (yd - t) * yd * (1.0 - yd) / bsize);
        };
        head->forward_backward(X[order[i]], dz_of_y, grad);
      }
      cache = decay * cache + (1.0f - decay) * grad.cwiseProduct(grad);
      params -= lr * grad.cwiseQuotient((cache.cwiseSqrt().array() + eps).matrix());
    }
    head->set_params(params);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = train_total / static_cast<double>(order.size());
    rec.val_loss = Xv.empty() ? rec.train_loss : eval_loss(Xv, val_samples);
    history.push_back(rec);

    auto verdict = stopper.observe(rec.val_loss);
    if (verdict.improved) best_params = params;
    if (verdict.stop) break;
  }

  head->set_params(best_params);
  return TrainedScorer(std::move(head), head_config, binding.identity(), cfg,
                       std::move(history), rows, cols);
}

// ---------------------------------------------------------------------------
// model file: magic + JSON header + raw little-endian float32 parameters

namespace {

constexpr char kMagic[4] = {'R', 'F', 'S', 'C'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw IncompatibleModelError("truncated model file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void save_model(const TrainedScorer& scorer, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write model file: " + path);
  out.write(kMagic, 4);
  write_u32(out, kVersion);

  const auto& hc = scorer.head_config();
  const auto& tc = scorer.train_config();
  json hist = json::array();
  for (const auto& r : scorer.history())
    hist.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_loss", r.val_loss}});
  json header{{"head", head_kind_name(hc.kind)},
              {"fc_hidden", hc.fc_hidden},
              {"cnn_filters", hc.cnn_filters},
              {"cnn_kernel_rows", hc.cnn_kernel_rows},
              {"lstm_units", hc.lstm_units},
              {"rows", scorer.input_rows()},
              {"cols", scorer.input_cols()},
              {"binding", scorer.binding_identity()},
              {"train_config",
               {{"loss", loss_name(tc.loss)},
                {"learning_rate", tc.learning_rate},
                {"early_stop_patience", tc.early_stop_patience},
                {"max_epochs", tc.max_epochs},
                {"batch_size", tc.batch_size},
                {"seed", tc.seed}}},
              {"history", std::move(hist)}};
  std::string hs = header.dump();
  write_u32(out, static_cast<std::uint32_t>(hs.size()));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));

  const Vec<float>& p = scorer.head().params();
  write_u32(out, static_cast<std::uint32_t>(p.size()));
  static_assert(sizeof(float) == 4);
  // IEEE754 little-endian on all supported targets
  out.write(reinterpret_cast<const char*>(p.data()),
            static_cast<std::streamsize>(p.size() * sizeof(float)));
}

TrainedScorer load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IncompatibleModelError("cannot open model file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw IncompatibleModelError("bad magic header in " + path);
  std::uint32_t version = read_u32(in);
  if (version != kVersion)
    throw IncompatibleModelError("unsupported model version " + std::to_string(version));

  std::uint32_t hlen = read_u32(in);
  std::string hs(hlen, '\0');
  in.read(hs.data(), hlen);
  if (!in) throw IncompatibleModelError("truncated model header");
  json header = json::parse(hs, nullptr, false);
  if (header.is_discarded()) throw IncompatibleModelError("corrupt model header");

  HeadConfig hc;
  hc.kind = parse_head_kind(header.at("head").get<std::string>());
  hc.fc_hidden = header.at("fc_hidden").get<int>();
  hc.cnn_filters = header.at("cnn_filters").get<int>();
  hc.cnn_kernel_rows = header.at("cnn_kernel_rows").get<int>();
  hc.lstm_units = header.at("lstm_units").get<int>();
  Eigen::Index rows = header.at("rows").get<Eigen::Index>();
  Eigen::Index cols = header.at("cols").get<Eigen::Index>();

  TrainConfig tc;
  const auto& jtc = header.at("train_config");
  tc.loss = parse_loss(jtc.at("loss").get<std::string>());
  tc.learning_rate = jtc.at("learning_rate").get<double>();
  tc.early_stop_patience = jtc.at("early_stop_patience").get<int>();
  tc.max_epochs = jtc.at("max_epochs").get<int>();
  tc.batch_size = jtc.at("batch_size").get<int>();
  tc.seed = jtc.at("seed").get<std::uint64_t>();

  std::vector<EpochRecord> history;
  for (const auto& r : header.at("history")) {
    EpochRecord rec;
    rec.epoch = r.at("epoch").get<int>();
    rec.train_loss = r.at("train_loss").get<double>();
    rec.val_loss = r.at("val_loss").get<double>();
    history.push_back(rec);
  }

  auto head = build_head<float>(rows, cols, hc, /*seed=*/0);
  std::uint32_t pcount = read_u32(in);
  if (static_cast<Eigen::Index>(pcount) != head->num_params())
    throw IncompatibleModelError("parameter count mismatch in " + path);
  Vec<float> params(pcount);
  in.read(reinterpret_cast<char*>(params.data()),
          static_cast<std::streamsize>(pcount * sizeof(float)));
  if (!in) throw IncompatibleModelError("truncated parameter block in " + path);
  head->set_params(params);

  return TrainedScorer(std::move(head), hc, header.at("binding").get<std::string>(), tc,
                       std::move(history), rows, cols);
}

}  // namespace refscore
