#include "refscore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "refscore/errors.hpp"

namespace refscore {

double accuracy(const std::vector<double>& predictions, const std::vector<double>& labels,
                double threshold) {
  if (predictions.size() != labels.size())
    throw DimensionError("accuracy: prediction/label length mismatch");
  if (predictions.empty()) throw DimensionError("accuracy: empty input");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double predicted = predictions[i] >= threshold ? 1.0 : 0.0;
    if (predicted == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw DimensionError("pearson: need at least 2 points");
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw UndefinedCorrelationError("pearson: zero variance input");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("spearman: length mismatch");
  if (x.size() < 2) throw DimensionError("spearman: need at least 2 points");
  return pearson(average_ranks(x), average_ranks(y));
}

namespace {

double harmonic_f1(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

std::map<std::vector<std::string>, std::size_t> ngram_counts(
    const std::vector<std::string>& tokens, int n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i)
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i) + n)];
  return counts;
}

}  // namespace

RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, int n) {
  if (n < 1) throw ConfigurationError("rouge_n: n must be >= 1");
  if (static_cast<int>(reference.size()) < n)
    throw UndefinedScoreError("rouge_n: reference shorter than n");
  auto cand = ngram_counts(candidate, n);
  auto ref = ngram_counts(reference, n);
  std::size_t overlap = 0, cand_total = 0, ref_total = 0;
  for (const auto& [g, c] : cand) cand_total += c;
  for (const auto& [g, c] : ref) {
    ref_total += c;
    auto it = cand.find(g);
    if (it != cand.end()) overlap += std::min(c, it->second);
  }
  RougeScore s;
  s.variant = RougeVariant::rouge_n;
  s.n = n;
  s.precision = cand_total == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(cand_total);
  s.recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
  s.f1 = harmonic_f1(s.precision, s.recall);
  return s;
}

RougeScore rouge_w(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, double weight) {
  if (weight <= 1.0) throw ConfigurationError("rouge_w: weight must be > 1");
  if (candidate.empty() || reference.empty())
    throw UndefinedScoreError("rouge_w: empty input");
  const std::size_t m = reference.size();
  const std::size_t n = candidate.size();
  auto f = [&](double k) { return std::pow(k, weight); };
  auto f_inv = [&](double v) { return std::pow(v, 1.0 / weight); };
  // Exact weighted LCS. The folklore single-pass recurrence that tracks one
  // run length per cell is greedy about extending runs and undershoots on
  // ~10% of random inputs, so instead: run[i][j] is the common-suffix run
  // length ending at (i-1, j-1), and h[i][j] the best total over matchings
  // confined to the prefixes with all runs closed. A run of length k ending
  // at (i, j) contributes f(k) on top of the best closed score at the cell
  // just before the run started.
  std::vector<std::vector<std::size_t>> run(m + 1, std::vector<std::size_t>(n + 1, 0));
  std::vector<std::vector<double>> h(m + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      double best = std::max(h[i - 1][j], h[i][j - 1]);
      if (reference[i - 1] == candidate[j - 1]) {
        run[i][j] = run[i - 1][j - 1] + 1;
        for (std::size_t k = 1; k <= run[i][j]; ++k)
          best = std::max(best, h[i - k][j - k] + f(static_cast<double>(k)));
      }
      h[i][j] = best;
    }
  }
  RougeScore s;
  s.variant = RougeVariant::rouge_w;
  s.weight = weight;
  s.recall = f_inv(h[m][n] / f(static_cast<double>(m)));
  s.precision = f_inv(h[m][n] / f(static_cast<double>(n)));
  s.f1 = harmonic_f1(s.precision, s.recall);
  return s;
}

}  // namespace refscore
