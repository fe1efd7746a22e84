#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "refscore/heads.hpp"
#include "refscore/rng.hpp"

using namespace refscore;

namespace {

// loss over a tiny batch, as a function of the parameter vector
template <typename LossFn>
double loss_at(Head<double>& head, const Vec<double>& params,
               const std::vector<Mat<double>>& xs, const std::vector<double>& ts, LossFn loss) {
  head.set_params(params);
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) total += loss(head.forward(xs[i]), ts[i]);
  return total / static_cast<double>(xs.size());
}

struct GradCheck {
  double max_rel_err = 0.0;
};

// analytic gradient vs central finite differences
template <typename LossFn, typename DzFn>
GradCheck gradient_check(Head<double>& head, const std::vector<Mat<double>>& xs,
                         const std::vector<double>& ts, LossFn loss, DzFn dz) {
  const Vec<double> params = head.params();
  Vec<double> analytic = Vec<double>::Zero(head.num_params());
  head.set_params(params);
  const double batch = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double t = ts[i];
    head.forward_backward(
        xs[i], [&](double y) { return dz(y, t) / batch; }, analytic);
  }

  const double h = 1e-5;
  GradCheck result;
  for (Eigen::Index p = 0; p < params.size(); ++p) {
    Vec<double> plus = params, minus = params;
    plus(p) += h;
    minus(p) -= h;
    double numeric =
        (loss_at(head, plus, xs, ts, loss) - loss_at(head, minus, xs, ts, loss)) / (2.0 * h);
    double denom = std::max({std::abs(numeric), std::abs(analytic(p)), 1e-8});
    result.max_rel_err = std::max(result.max_rel_err, std::abs(numeric - analytic(p)) / denom);
  }
  head.set_params(params);
  return result;
}

std::vector<Mat<double>> random_inputs(Eigen::Index rows, Eigen::Index cols, int count,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Mat<double>> xs;
  for (int i = 0; i < count; ++i) {
    Mat<double> x(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) x(r, c) = rng.next_real(-1.0, 1.0);
    xs.push_back(std::move(x));
  }
  return xs;
}

double mse_loss(double y, double t) { return (y - t) * (y - t); }
double mse_dz(double y, double t) { return 2.0 * (y - t) * y * (1.0 - y); }
double bce_loss(double y, double t) {
  return -(t * std::log(y + 1e-12) + (1.0 - t) * std::log(1.0 - y + 1e-12));
}
double bce_dz(double y, double t) { return y - t; }

}  // namespace

TEST_CASE("fc head parameter count and output range") {
  FcHead<double> head(6 * 4, 8, 3);
  CHECK(head.num_params() == 8 * 24 + 8 + 8 + 1);
  for (const auto& x : random_inputs(6, 4, 10, 5)) {
    double y = head.forward(x);
    CHECK(y > 0.0);
    CHECK(y < 1.0);
  }
}

TEST_CASE("fc head gradients match finite differences (mse and bce)") {
  FcHead<double> head(6 * 4, 5, 11);
  auto xs = random_inputs(6, 4, 4, 21);
  std::vector<double> ts = {0.2, 0.9, 0.5, 0.7};
  auto r = gradient_check(head, xs, ts, mse_loss, mse_dz);
  CHECK(r.max_rel_err < 1e-4);
  std::vector<double> binary = {0.0, 1.0, 1.0, 0.0};
  auto rb = gradient_check(head, xs, binary, bce_loss, bce_dz);
  CHECK(rb.max_rel_err < 1e-4);
}

TEST_CASE("cnn head gradients match finite differences") {
  CnnHead<double> head(6, 4, 3, 2, 13);
  auto xs = random_inputs(6, 4, 4, 33);
  std::vector<double> ts = {0.1, 0.8, 0.4, 0.6};
  auto r = gradient_check(head, xs, ts, mse_loss, mse_dz);
  CHECK(r.max_rel_err < 1e-4);
}

TEST_CASE("lstm head gradients match finite differences") {
  LstmHead<double> head(5, 3, 4, 17);
  auto xs = random_inputs(5, 3, 3, 44);
  std::vector<double> ts = {0.3, 0.6, 0.9};
  auto r = gradient_check(head, xs, ts, mse_loss, mse_dz);
  CHECK(r.max_rel_err < 1e-4);
}

TEST_CASE("cnn kernels slide over rows only") {
  // two inputs identical except in a column of a row far from the max window
  // must still produce valid convolutions; kernel spanning full width means a
  // per-column change shifts only windows covering that row
  CnnHead<double> head(6, 4, 2, 3, 7);
  auto xs = random_inputs(6, 4, 1, 3);
  Mat<double> x = xs[0];
  double base = head.forward(x);
  CHECK(base > 0.0);
  // kernel taller than the input is a configuration error
  CHECK_THROWS_AS(CnnHead<double>(4, 4, 2, 5, 7), ConfigurationError);
}

TEST_CASE("build_head is deterministic in (shape, config, seed)") {
  HeadConfig cfg;
  cfg.kind = HeadKind::lstm;
  cfg.lstm_units = 4;
  auto a = build_head<double>(5, 3, cfg, 99);
  auto b = build_head<double>(5, 3, cfg, 99);
  CHECK((a->params() - b->params()).norm() == 0.0);
  auto c = build_head<double>(5, 3, cfg, 100);
  CHECK((a->params() - c->params()).norm() > 0.0);
}
