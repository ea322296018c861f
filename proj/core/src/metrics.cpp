#include "moocgraph/metrics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

namespace moocgraph {

double cohen_kappa(std::size_t tp, std::size_t fn, std::size_t fp, std::size_t tn) {
  const double total = static_cast<double>(tp + fn + fp + tn);
  if (total == 0.0) return 0.0;
  const double p_o = static_cast<double>(tp + tn) / total;
  const double pred_pos = static_cast<double>(tp + fp) / total;
  const double pred_neg = static_cast<double>(fn + tn) / total;
  const double act_pos = static_cast<double>(tp + fn) / total;
  const double act_neg = static_cast<double>(fp + tn) / total;
  const double p_e = pred_pos * act_pos + pred_neg * act_neg;
  if (p_e == 1.0) return 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

EvalReport report_from_confusion(std::size_t tp, std::size_t fn, std::size_t fp, std::size_t tn) {
  EvalReport r;
  r.tp = tp;
  r.fn = fn;
  r.fp = fp;
  r.tn = tn;
  const std::size_t total = tp + fn + fp + tn;
  r.accuracy = total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
  r.kappa = cohen_kappa(tp, fn, fp, tn);
  r.fnr = tp + fn > 0 ? static_cast<double>(fn) / static_cast<double>(tp + fn) : 0.0;
  return r;
}

EvalReport evaluate(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) throw std::invalid_argument("evaluate: length mismatch");
  if (predictions.empty()) throw std::invalid_argument("evaluate: empty input");
  std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = predictions[i] == 1;
    const bool actual = labels[i] == 1;
    if (actual) {
      pred ? ++tp : ++fn;
    } else {
      pred ? ++fp : ++tn;
    }
  }
  return report_from_confusion(tp, fn, fp, tn);
}

TTestResult paired_ttest(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_ttest: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("paired_ttest: need at least two pairs");
  const std::size_t n = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (a[i] - b[i]) - mean;
    ss += d * d;
  }
  TTestResult r;
  r.df = n - 1;
  const double variance = ss / static_cast<double>(n - 1);
  if (variance == 0.0) {
    if (mean == 0.0) return r;  // t = 0, p = 1
    r.infinite = true;
    r.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.t = mean / std::sqrt(variance / static_cast<double>(n));
  boost::math::students_t dist(static_cast<double>(r.df));
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  return r;
}

BootstrapResult paired_bootstrap_kappa(std::span<const int> predictions_a, std::span<const int> predictions_b,
                                       std::span<const int> labels, std::size_t resamples, std::uint64_t seed) {
  if (predictions_a.size() != labels.size() || predictions_b.size() != labels.size()) {
    throw std::invalid_argument("paired_bootstrap_kappa: length mismatch");
  }
  if (labels.empty()) throw std::invalid_argument("paired_bootstrap_kappa: empty input");
  BootstrapResult r;
  r.kappa_a = evaluate(predictions_a, labels).kappa;
  r.kappa_b = evaluate(predictions_b, labels).kappa;
  r.resamples = resamples;

  const std::size_t n = labels.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<int> pa(n), pb(n), lab(n);
  std::size_t not_better = 0;
  for (std::size_t rep = 0; rep < resamples; ++rep) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = pick(rng);
      pa[k] = predictions_a[idx];
      pb[k] = predictions_b[idx];
      lab[k] = labels[idx];
    }
    if (evaluate(pa, lab).kappa - evaluate(pb, lab).kappa <= 0.0) ++not_better;
  }
  r.p_value = static_cast<double>(not_better + 1) / static_cast<double>(resamples + 1);
  return r;
}

std::string to_json(const EvalReport& report) {
  nlohmann::ordered_json doc = {
      {"accuracy", report.accuracy},
      {"kappa", report.kappa},
      {"fnr", report.fnr},
      {"dropout_recall_percent", report.dropout_recall_percent()},
      {"confusion", {{"tp", report.tp}, {"fn", report.fn}, {"fp", report.fp}, {"tn", report.tn}}}};
  return doc.dump(2);
}

std::string to_json(const TTestResult& result) {
  nlohmann::ordered_json doc;
  doc["t"] = result.infinite ? nlohmann::ordered_json(result.t > 0 ? "inf" : "-inf") : nlohmann::ordered_json(result.t);
  doc["p"] = result.p;
  doc["df"] = result.df;
  doc["infinite"] = result.infinite;
  return doc.dump(2);
}

}  // namespace moocgraph
