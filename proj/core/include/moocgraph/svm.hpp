#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "moocgraph/features.hpp"

namespace moocgraph {

// Sorted (column, value) pairs; zero entries omitted.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

// exp(-gamma * ||x - y||^2). Dense overload throws std::invalid_argument on
// a length mismatch.
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);
double rbf_kernel(const SparseVector& x, const SparseVector& y, double gamma);

struct SvmParams {
  double C = 1.0;
  std::optional<double> gamma;        // unset: 1 / number of features
  std::map<int, double> class_cost;   // label -> multiplier; empty: inverse class frequency
  double tolerance = 1e-3;            // stop when the maximal KKT violation drops below this
  std::size_t max_passes = 10000;     // one pass = n working-pair updates
  std::uint64_t seed = 0;             // fallback working-pair selection
  std::size_t cache_mb = 256;         // kernel row cache
};

// cost[c] = n_majority / n_c, so the majority class costs 1.
std::map<int, double> inverse_frequency_costs(std::span<const int> labels);

struct TrainingData {
  std::vector<SparseVector> x;
  std::vector<int> labels;  // 0 / 1
  std::size_t dimension = 0;
};

TrainingData to_training_data(const Dataset& data);

// Maps a feature vector onto `feature_index` columns; unknown names dropped.
SparseVector to_sparse(const FeatureMap& features, const std::vector<std::string>& feature_index);

struct SupportVector {
  SparseVector x;
  int label = 0;
  double alpha = 0.0;
};

struct TrainedModel {
  std::vector<SupportVector> support_vectors;
  double bias = 0.0;
  SvmParams params;  // gamma and class_cost resolved
  std::size_t dimension = 0;
  bool converged = false;
  std::size_t iterations = 0;
};

// Optional instrumentation for tests: dual objective after every update
// and the final alphas for all training points.
struct TrainTrace {
  std::vector<double> dual_objective;
  std::vector<double> alphas;
};

// Soft-margin dual with per-class box 0 <= alpha_i <= C * cost[y_i], solved
// by SMO with maximal-violating-pair selection. Throws TrainingError on empty
// or single-class data; non-convergence is reported via `converged`.
TrainedModel train_svm(const TrainingData& data, const SvmParams& params, TrainTrace* trace = nullptr);
TrainedModel train_svm(const Dataset& data, const SvmParams& params);

// sum alpha_i y_i K(x_i, x) + bias, with y in {-1, +1} (+1 = dropout).
double decision_value(const TrainedModel& model, const SparseVector& x);

// 1 if the decision value is strictly positive, else 0. Throws
// std::invalid_argument if x has a column beyond the model dimension.
int predict(const TrainedModel& model, const SparseVector& x);
int predict(const TrainedModel& model, std::span<const double> dense);

std::vector<int> predict_all(const TrainedModel& model, const Dataset& data);

void save_model(const TrainedModel& model, std::ostream& out);
TrainedModel load_model(std::istream& in);

}  // namespace moocgraph
