#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace moocgraph {

// Confusion-matrix summary with dropout (label 1) as the positive class.
struct EvalReport {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  double accuracy = 0.0;
  double kappa = 0.0;
  double fnr = 0.0;  // fn / (fn + tp); 0 without positives

  // Percentage of actual dropouts that were identified: 100 * (1 - fnr).
  double dropout_recall_percent() const { return 100.0 * (1.0 - fnr); }

  bool operator==(const EvalReport&) const = default;
};

EvalReport report_from_confusion(std::size_t tp, std::size_t fn, std::size_t fp, std::size_t tn);

// Throws std::invalid_argument on empty or mismatched inputs.
EvalReport evaluate(std::span<const int> predictions, std::span<const int> labels);

// Cohen's kappa (p_o - p_e) / (1 - p_e); 0 when p_e == 1.
double cohen_kappa(std::size_t tp, std::size_t fn, std::size_t fp, std::size_t tn);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;  // two-tailed
  std::size_t df = 0;
  bool infinite = false;  // zero-variance differences with nonzero mean
};

// Paired t-test on per-instance differences a_i - b_i. Throws
// std::invalid_argument for fewer than two pairs or mismatched lengths.
TTestResult paired_ttest(std::span<const int> a, std::span<const int> b);

struct BootstrapResult {
  double kappa_a = 0.0;
  double kappa_b = 0.0;
  double p_value = 1.0;  // one-sided: P(kappa_a - kappa_b <= 0) under resampling
  std::size_t resamples = 0;
};

// Paired bootstrap over test instances comparing two predictors' kappa.
BootstrapResult paired_bootstrap_kappa(std::span<const int> predictions_a, std::span<const int> predictions_b,
                                       std::span<const int> labels, std::size_t resamples, std::uint64_t seed);

std::string to_json(const EvalReport& report);
std::string to_json(const TTestResult& result);

}  // namespace moocgraph
