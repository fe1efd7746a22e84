#ifndef REFSCORE_HEADS_HPP
#define REFSCORE_HEADS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "refscore/encoder.hpp"
#include "refscore/errors.hpp"
#include "refscore/rng.hpp"

namespace refscore {

enum class HeadKind { fc_only, cnn, lstm };

struct HeadConfig {
  HeadKind kind = HeadKind::fc_only;
  int fc_hidden = 128;
  int cnn_filters = 128;
  int cnn_kernel_rows = 5;
  int lstm_units = 128;  // 25 for word-level inputs, 128 for sentence-level
};

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  if (z >= 0) return Scalar(1) / (Scalar(1) + std::exp(-z));
  Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

// A scoring head maps one encoded (document, summary) pair -- a rows x d
// matrix, or a 1 x H joint vector -- to a score in (0, 1). Parameters live in
// one flat vector so the optimizer and the model file never care about the
// internal layout.
template <typename Scalar>
class Head {
 public:
  virtual ~Head() = default;

  virtual HeadKind kind() const = 0;
  virtual Scalar forward(const Mat<Scalar>& x) const = 0;

  // Runs forward, asks `dz_of_y` for dLoss/dlogit at the prediction, and adds
  // the parameter gradient into `grad` (sized num_params). Returns the
  // prediction.
  virtual Scalar forward_backward(const Mat<Scalar>& x,
                                  const std::function<Scalar(Scalar)>& dz_of_y,
                                  Vec<Scalar>& grad) const = 0;

  Eigen::Index num_params() const { return params_.size(); }
  const Vec<Scalar>& params() const { return params_; }
  void set_params(const Vec<Scalar>& p) {
    if (p.size() != params_.size()) throw DimensionError("parameter vector size mismatch");
    params_ = p;
  }

 protected:
  Vec<Scalar> params_;
};

namespace detail {

template <typename Scalar>
void glorot_fill(Eigen::Map<Mat<Scalar>> m, Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = static_cast<Scalar>(rng.next_real(-r, r));
}

}  // namespace detail

// flatten -> dense(hidden, relu) -> dense(1) -> sigmoid
template <typename Scalar>
class FcHead : public Head<Scalar> {
 public:
  FcHead(Eigen::Index input_dim, Eigen::Index hidden, std::uint64_t seed)
      : n_(input_dim), h_(hidden) {
    if (n_ <= 0 || h_ <= 0) throw ConfigurationError("fc head needs positive sizes");
    this->params_ = Vec<Scalar>::Zero(h_ * n_ + h_ + h_ + 1);
    Rng rng(seed);
    detail::glorot_fill<Scalar>(W1(), n_, h_, rng);
    detail::glorot_fill<Scalar>(
        Eigen::Map<Mat<Scalar>>(this->params_.data() + h_ * n_ + h_, h_, 1), h_, 1, rng);
  }

  HeadKind kind() const override { return HeadKind::fc_only; }

  Scalar forward(const Mat<Scalar>& x) const override {
    Vec<Scalar> a;
    return run(x, a);
  }

  Scalar forward_backward(const Mat<Scalar>& x, const std::function<Scalar(Scalar)>& dz_of_y,
                          Vec<Scalar>& grad) const override {
    Vec<Scalar> flat = flatten(x);
    Vec<Scalar> z1 = W1() * flat + b1();
    Vec<Scalar> a = z1.cwiseMax(Scalar(0));
    Scalar z = w2().dot(a) + this->params_(this->params_.size() - 1);
    Scalar y = sigmoid(z);
    Scalar dz = dz_of_y(y);

    Eigen::Map<Mat<Scalar>> gW1(grad.data(), h_, n_);
    Eigen::Map<Vec<Scalar>> gb1(grad.data() + h_ * n_, h_);
    Eigen::Map<Vec<Scalar>> gw2(grad.data() + h_ * n_ + h_, h_);
    Vec<Scalar> da = dz * w2();
    Vec<Scalar> dz1 = (z1.array() > 0).template cast<Scalar>().matrix().cwiseProduct(da);
    gW1.noalias() += dz1 * flat.transpose();
    gb1 += dz1;
    gw2 += dz * a;
    grad(grad.size() - 1) += dz;
    return y;
  }

 private:
  Vec<Scalar> flatten(const Mat<Scalar>& x) const {
    if (x.size() != n_) throw DimensionError("fc head input size mismatch");
    return Eigen::Map<const Vec<Scalar>>(x.data(), n_);
  }
  Scalar run(const Mat<Scalar>& x, Vec<Scalar>& a) const {
    Vec<Scalar> z1 = W1() * flatten(x) + b1();
    a = z1.cwiseMax(Scalar(0));
    Scalar z = w2().dot(a) + this->params_(this->params_.size() - 1);
    return sigmoid(z);
  }
  Eigen::Map<Mat<Scalar>> W1() {
    return Eigen::Map<Mat<Scalar>>(this->params_.data(), h_, n_);
  }
  Eigen::Map<const Mat<Scalar>> W1() const {
    return Eigen::Map<const Mat<Scalar>>(this->params_.data(), h_, n_);
  }
  Eigen::Map<const Vec<Scalar>> b1() const {
    return Eigen::Map<const Vec<Scalar>>(this->params_.data() + h_ * n_, h_);
  }
  Eigen::Map<const Vec<Scalar>> w2() const {
    return Eigen::Map<const Vec<Scalar>>(this->params_.data() + h_ * n_ + h_, h_);
  }

  Eigen::Index n_, h_;
};

// valid 2D convolution with kernels spanning the full embedding width (rows
// slide, columns never mix), relu, global max pool per filter, dense(1),
// sigmoid
template <typename Scalar>
class CnnHead : public Head<Scalar> {
 public:
  CnnHead(Eigen::Index rows, Eigen::Index cols, Eigen::Index filters, Eigen::Index kernel_rows,
          std::uint64_t seed)
      : rows_(rows), cols_(cols), f_(filters), k_(kernel_rows) {
    if (k_ > rows_)
      throw ConfigurationError("cnn kernel rows (" + std::to_string(k_) +
                               ") exceed input rows (" + std::to_string(rows_) + ")");
    if (f_ <= 0 || k_ <= 0) throw ConfigurationError("cnn head needs positive sizes");
    this->params_ = Vec<Scalar>::Zero(f_ * k_ * cols_ + f_ + f_ + 1);
    Rng rng(seed);
    detail::glorot_fill<Scalar>(Eigen::Map<Mat<Scalar>>(this->params_.data(), f_, k_ * cols_),
                                k_ * cols_, 1, rng);
    detail::glorot_fill<Scalar>(
        Eigen::Map<Mat<Scalar>>(this->params_.data() + f_ * k_ * cols_ + f_, f_, 1), f_, 1, rng);
  }

  HeadKind kind() const override { return HeadKind::cnn; }

  Scalar forward(const Mat<Scalar>& x) const override {
    Vec<Scalar> pooled;
    std::vector<Eigen::Index> argmax;
    return run(x, pooled, argmax);
  }

  Scalar forward_backward(const Mat<Scalar>& x, const std::function<Scalar(Scalar)>& dz_of_y,
                          Vec<Scalar>& grad) const override {
    Vec<Scalar> pooled;
    std::vector<Eigen::Index> argmax;
    Scalar y = run(x, pooled, argmax);
    Scalar dz = dz_of_y(y);

    Eigen::Map<const Mat<Scalar>> K(this->params_.data(), f_, k_ * cols_);
    Eigen::Map<Mat<Scalar>> gK(grad.data(), f_, k_ * cols_);
    Eigen::Map<Vec<Scalar>> gbK(grad.data() + f_ * k_ * cols_, f_);
    Eigen::Map<Vec<Scalar>> gw2(grad.data() + f_ * k_ * cols_ + f_, f_);
    for (Eigen::Index f = 0; f < f_; ++f) {
      gw2(f) += dz * pooled(f);
      // relu grad: pooled value 0 means the winning pre-activation was <= 0
      if (pooled(f) <= Scalar(0)) continue;
      Scalar dm = dz * w2()(f);
      Eigen::Index t = argmax[static_cast<std::size_t>(f)];
      Mat<Scalar> window = x.block(t, 0, k_, cols_);
      gK.row(f) += dm * Eigen::Map<const Vec<Scalar>>(window.data(), k_ * cols_).transpose();
      gbK(f) += dm;
    }
    grad(grad.size() - 1) += dz;
    return y;
  }

 private:
  Scalar run(const Mat<Scalar>& x, Vec<Scalar>& pooled, std::vector<Eigen::Index>& argmax) const {
    if (x.rows() != rows_ || x.cols() != cols_)
      throw DimensionError("cnn head input shape mismatch");
    Eigen::Map<const Mat<Scalar>> K(this->params_.data(), f_, k_ * cols_);
    Eigen::Map<const Vec<Scalar>> bK(this->params_.data() + f_ * k_ * cols_, f_);
    const Eigen::Index steps = rows_ - k_ + 1;
    pooled = Vec<Scalar>::Zero(f_);
    argmax.assign(static_cast<std::size_t>(f_), 0);
    for (Eigen::Index f = 0; f < f_; ++f) {
      Scalar best = Scalar(0);  // relu floor
      Eigen::Index best_t = 0;
      Scalar best_pre = -std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index t = 0; t < steps; ++t) {
        Mat<Scalar> window = x.block(t, 0, k_, cols_);
        Scalar pre =
            K.row(f).dot(Eigen::Map<const Vec<Scalar>>(window.data(), k_ * cols_)) + bK(f);
        if (pre > best_pre) {
          best_pre = pre;
          best_t = t;
        }
      }
      best = std::max(Scalar(0), best_pre);
      pooled(f) = best;
      argmax[static_cast<std::size_t>(f)] = best_t;
    }
    Scalar z = w2().dot(pooled) + this->params_(this->params_.size() - 1);
    return sigmoid(z);
  }
  Eigen::Map<const Vec<Scalar>> w2() const {
    return Eigen::Map<const Vec<Scalar>>(this->params_.data() + f_ * k_ * cols_ + f_, f_);
  }

  Eigen::Index rows_, cols_, f_, k_;
};

// single-layer LSTM over rows, last hidden state -> dense(1) -> sigmoid
template <typename Scalar>
class LstmHead : public Head<Scalar> {
 public:
  LstmHead(Eigen::Index rows, Eigen::Index cols, Eigen::Index units, std::uint64_t seed)
      : rows_(rows), d_(cols), u_(units) {
    if (u_ <= 0) throw ConfigurationError("lstm head needs positive unit count");
    // Wx (4u x d), Wh (4u x u), b (4u), w2 (u), b2 -- gate order i, f, g, o
    this->params_ = Vec<Scalar>::Zero(4 * u_ * d_ + 4 * u_ * u_ + 4 * u_ + u_ + 1);
    Rng rng(seed);
    detail::glorot_fill<Scalar>(Eigen::Map<Mat<Scalar>>(this->params_.data(), 4 * u_, d_), d_,
                                u_, rng);
    detail::glorot_fill<Scalar>(
        Eigen::Map<Mat<Scalar>>(this->params_.data() + 4 * u_ * d_, 4 * u_, u_), u_, u_, rng);
    detail::glorot_fill<Scalar>(
        Eigen::Map<Mat<Scalar>>(this->params_.data() + 4 * u_ * d_ + 4 * u_ * u_ + 4 * u_, u_, 1),
        u_, 1, rng);
  }

  HeadKind kind() const override { return HeadKind::lstm; }

  Scalar forward(const Mat<Scalar>& x) const override {
    Cache c;
    return run(x, c);
  }

  Scalar forward_backward(const Mat<Scalar>& x, const std::function<Scalar(Scalar)>& dz_of_y,
                          Vec<Scalar>& grad) const override {
    Cache c;
    Scalar y = run(x, c);
    Scalar dz = dz_of_y(y);

    const Eigen::Index T = rows_;
    Eigen::Map<const Mat<Scalar>> Wx(this->params_.data(), 4 * u_, d_);
    Eigen::Map<const Mat<Scalar>> Wh(this->params_.data() + 4 * u_ * d_, 4 * u_, u_);
    Eigen::Map<Mat<Scalar>> gWx(grad.data(), 4 * u_, d_);
    Eigen::Map<Mat<Scalar>> gWh(grad.data() + 4 * u_ * d_, 4 * u_, u_);
    Eigen::Map<Vec<Scalar>> gb(grad.data() + 4 * u_ * d_ + 4 * u_ * u_, 4 * u_);
    Eigen::Map<Vec<Scalar>> gw2(grad.data() + 4 * u_ * d_ + 4 * u_ * u_ + 4 * u_, u_);

    gw2 += dz * c.h.col(T);
    grad(grad.size() - 1) += dz;
    Vec<Scalar> dh = dz * w2();
    Vec<Scalar> dc = Vec<Scalar>::Zero(u_);
    for (Eigen::Index t = T - 1; t >= 0; --t) {
      auto i = c.gates.col(t).segment(0, u_);
      auto f = c.gates.col(t).segment(u_, u_);
      auto g = c.gates.col(t).segment(2 * u_, u_);
      auto o = c.gates.col(t).segment(3 * u_, u_);
      Vec<Scalar> tanhc = c.c.col(t + 1).array().tanh().matrix();
      Vec<Scalar> do_ = dh.cwiseProduct(tanhc);
      dc += dh.cwiseProduct(o).cwiseProduct(
          (Scalar(1) - tanhc.array().square()).matrix());
      Vec<Scalar> di = dc.cwiseProduct(g);
      Vec<Scalar> df = dc.cwiseProduct(c.c.col(t));
      Vec<Scalar> dg = dc.cwiseProduct(i);
      Vec<Scalar> dgate(4 * u_);
      dgate.segment(0, u_) = di.cwiseProduct(i).cwiseProduct((Scalar(1) - i.array()).matrix());
      dgate.segment(u_, u_) = df.cwiseProduct(f).cwiseProduct((Scalar(1) - f.array()).matrix());
      dgate.segment(2 * u_, u_) = dg.cwiseProduct((Scalar(1) - g.array().square()).matrix());
      dgate.segment(3 * u_, u_) =
          do_.cwiseProduct(o).cwiseProduct((Scalar(1) - o.array()).matrix());
      gWx.noalias() += dgate * x.row(t);
      gWh.noalias() += dgate * c.h.col(t).transpose();
      gb += dgate;
      dh = Wh.transpose() * dgate;
      dc = dc.cwiseProduct(f);
    }
    return y;
  }

 private:
  struct Cache {
    Mat<Scalar> h;      // u x (T+1), column 0 is the zero initial state
    Mat<Scalar> c;      // u x (T+1)
    Mat<Scalar> gates;  // 4u x T, post-activation
  };

  Scalar run(const Mat<Scalar>& x, Cache& cache) const {
    if (x.rows() != rows_ || x.cols() != d_)
      throw DimensionError("lstm head input shape mismatch");
    Eigen::Map<const Mat<Scalar>> Wx(this->params_.data(), 4 * u_, d_);
    Eigen::Map<const Mat<Scalar>> Wh(this->params_.data() + 4 * u_ * d_, 4 * u_, u_);
    Eigen::Map<const Vec<Scalar>> b(this->params_.data() + 4 * u_ * d_ + 4 * u_ * u_, 4 * u_);
    const Eigen::Index T = rows_;
    cache.h = Mat<Scalar>::Zero(u_, T + 1);
    cache.c = Mat<Scalar>::Zero(u_, T + 1);
    cache.gates = Mat<Scalar>::Zero(4 * u_, T);
    for (Eigen::Index t = 0; t < T; ++t) {
      Vec<Scalar> pre = Wx * x.row(t).transpose() + Wh * cache.h.col(t) + b;
      auto gate = cache.gates.col(t);
      for (Eigen::Index j = 0; j < u_; ++j) {
        gate(j) = sigmoid(pre(j));                       // i
        gate(u_ + j) = sigmoid(pre(u_ + j));             // f
        gate(2 * u_ + j) = std::tanh(pre(2 * u_ + j));   // g
        gate(3 * u_ + j) = sigmoid(pre(3 * u_ + j));     // o
      }
      cache.c.col(t + 1) = gate.segment(u_, u_).cwiseProduct(cache.c.col(t)) +
                           gate.segment(0, u_).cwiseProduct(gate.segment(2 * u_, u_));
      cache.h.col(t + 1) =
          gate.segment(3 * u_, u_).cwiseProduct(cache.c.col(t + 1).array().tanh().matrix());
    }
    Scalar z = w2().dot(cache.h.col(T)) + this->params_(this->params_.size() - 1);
    return sigmoid(z);
  }
  Eigen::Map<const Vec<Scalar>> w2() const {
    return Eigen::Map<const Vec<Scalar>>(
        this->params_.data() + 4 * u_ * d_ + 4 * u_ * u_ + 4 * u_, u_);
  }

  Eigen::Index rows_, d_, u_;
};

// Parameters are a deterministic function of (shape, config, seed).
template <typename Scalar>
std::unique_ptr<Head<Scalar>> build_head(Eigen::Index rows, Eigen::Index cols,
                                         const HeadConfig& config, std::uint64_t seed) {
  switch (config.kind) {
    case HeadKind::fc_only:
      return std::make_unique<FcHead<Scalar>>(rows * cols, config.fc_hidden, seed);
    case HeadKind::cnn:
      return std::make_unique<CnnHead<Scalar>>(rows, cols, config.cnn_filters,
                                               config.cnn_kernel_rows, seed);
    case HeadKind::lstm:
      return std::make_unique<LstmHead<Scalar>>(rows, cols, config.lstm_units, seed);
  }
  throw ConfigurationError("unknown head kind");
}

}  // namespace refscore

#endif  // REFSCORE_HEADS_HPP
