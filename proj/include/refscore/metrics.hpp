#ifndef REFSCORE_METRICS_HPP
#define REFSCORE_METRICS_HPP

#include <string>
#include <vector>

namespace refscore {

struct CorrelationResult {
  double pearson = 0.0;
  double spearman = 0.0;
  std::size_t n = 0;
};

enum class RougeVariant { rouge_n, rouge_w };

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  RougeVariant variant = RougeVariant::rouge_n;
  int n = 1;             // rouge_n only
  double weight = 1.2;   // rouge_w only
};

double accuracy(const std::vector<double>& predictions, const std::vector<double>& labels,
                double threshold = 0.5);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
// Pearson correlation of average ranks (ties get the mean of their rank span).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> average_ranks(const std::vector<double>& values);

// Clipped n-gram overlap between candidate and reference.
RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, int n);

// Weighted LCS with consecutive-run weighting f(k) = k^weight.
RougeScore rouge_w(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, double weight = 1.2);

}  // namespace refscore

#endif  // REFSCORE_METRICS_HPP
