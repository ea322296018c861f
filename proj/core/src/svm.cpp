#include "moocgraph/svm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <list>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "moocgraph/dataset_io.hpp"
#include "moocgraph/errors.hpp"

namespace moocgraph {

namespace {

constexpr double kTau = 1e-12;
constexpr int kModelFormatVersion = 1;

double squared_distance(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    double d = 0.0;
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      d = ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      d = ib->second;
      ++ib;
    } else {
      d = ia->second - ib->second;
      ++ia;
      ++ib;
    }
    sum += d * d;
  }
  return sum;
}

// LRU cache of kernel rows K(i, .).
class KernelRows {
 public:
  KernelRows(const std::vector<SparseVector>& x, double gamma, std::size_t cache_mb)
      : x_(x), gamma_(gamma) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.size()) * sizeof(double);
    capacity_ = std::max<std::size_t>(2, (cache_mb << 20) / row_bytes);
  }

  const std::vector<double>& row(std::size_t i) {
    if (auto it = rows_.find(i); it != rows_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.second);
      return it->second.first;
    }
    if (rows_.size() >= capacity_) {
      rows_.erase(lru_.back());
      lru_.pop_back();
    }
    std::vector<double> values(x_.size());
    for (std::size_t k = 0; k < x_.size(); ++k) values[k] = std::exp(-gamma_ * squared_distance(x_[i], x_[k]));
    lru_.push_front(i);
    auto [it, inserted] = rows_.emplace(i, std::make_pair(std::move(values), lru_.begin()));
    return it->second.first;
  }

 private:
  const std::vector<SparseVector>& x_;
  double gamma_;
  std::size_t capacity_;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>> rows_;
};

std::string fmt(double v) { return format_double(v); }

}  // namespace

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) throw std::invalid_argument("rbf_kernel: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return std::exp(-gamma * sum);
}

double rbf_kernel(const SparseVector& x, const SparseVector& y, double gamma) {
  return std::exp(-gamma * squared_distance(x, y));
}

std::map<int, double> inverse_frequency_costs(std::span<const int> labels) {
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  std::size_t majority = 0;
  for (const auto& [label, n] : counts) majority = std::max(majority, n);
  std::map<int, double> costs;
  for (const auto& [label, n] : counts) costs[label] = static_cast<double>(majority) / static_cast<double>(n);
  return costs;
}

SparseVector to_sparse(const FeatureMap& features, const std::vector<std::string>& feature_index) {
  SparseVector out;
  out.reserve(features.size());
  for (const auto& [name, value] : features) {
    if (value == 0.0) continue;
    auto it = std::lower_bound(feature_index.begin(), feature_index.end(), name);
    if (it == feature_index.end() || *it != name) continue;
    out.emplace_back(static_cast<std::uint32_t>(it - feature_index.begin()), value);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TrainingData to_training_data(const Dataset& data) {
  TrainingData td;
  td.dimension = data.feature_index.size();
  td.x.reserve(data.instances.size());
  td.labels.reserve(data.instances.size());
  for (const auto& inst : data.instances) {
    td.x.push_back(to_sparse(inst.features, data.feature_index));
    td.labels.push_back(inst.label);
  }
  return td;
}

TrainedModel train_svm(const TrainingData& data, const SvmParams& params, TrainTrace* trace) {
  const std::size_t n = data.x.size();
  if (n == 0) throw TrainingError("training set is empty");
  if (data.labels.size() != n) throw TrainingError("label count differs from instance count");
  bool has_pos = false;
  bool has_neg = false;
  for (int l : data.labels) {
    if (l != 0 && l != 1) throw TrainingError("labels must be 0 or 1");
    (l == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw TrainingError("training data contains a single class");
  if (!(params.C > 0.0)) throw std::invalid_argument("C must be positive");
  if (!(params.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");

  TrainedModel model;
  model.params = params;
  model.dimension = data.dimension;
  if (!model.params.gamma) model.params.gamma = data.dimension > 0 ? 1.0 / static_cast<double>(data.dimension) : 1.0;
  if (model.params.class_cost.empty()) model.params.class_cost = inverse_frequency_costs(data.labels);
  for (int label : {0, 1}) {
    auto [it, fresh] = model.params.class_cost.try_emplace(label, 1.0);
    if (!(it->second > 0.0)) throw std::invalid_argument("class costs must be positive");
  }
  const double gamma = *model.params.gamma;
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");

  std::vector<double> y(n);
  std::vector<double> upper(n);
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = data.labels[k] == 1 ? 1.0 : -1.0;
    upper[k] = params.C * model.params.class_cost.at(data.labels[k]);
  }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  KernelRows kernel(data.x, gamma, params.cache_mb);
  std::mt19937_64 rng(params.seed);
  double objective = 0.0;  // primal form of the dual: 1/2 a'Qa - e'a

  auto in_up = [&](std::size_t t) { return y[t] > 0 ? alpha[t] < upper[t] : alpha[t] > 0.0; };
  auto in_low = [&](std::size_t t) { return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < upper[t]; };

  const std::size_t max_iter =
      params.max_passes > std::numeric_limits<std::size_t>::max() / n ? std::numeric_limits<std::size_t>::max()
                                                                       : params.max_passes * n;

  // Analytic two-variable step; returns false if neither alpha moved.
  auto update_pair = [&](std::size_t i, std::size_t j) {
    const auto& ki = kernel.row(i);
    const double kij = ki[j];
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    const double ci = upper[i];
    const double cj = upper[j];
    double& ai = alpha[i];
    double& aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = 2.0 - 2.0 * kij;  // Q_ii + Q_jj + 2 Q_ij with Q_ij = -K_ij
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = -diff; }
      }
      if (diff > ci - cj) {
        if (ai > ci) { ai = ci; aj = ci - diff; }
      } else {
        if (aj > cj) { aj = cj; ai = cj + diff; }
      }
    } else {
      double quad = 2.0 - 2.0 * kij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > ci) {
        if (ai > ci) { ai = ci; aj = sum - ci; }
      } else {
        if (aj < 0.0) { aj = 0.0; ai = sum; }
      }
      if (sum > cj) {
        if (aj > cj) { aj = cj; ai = sum - cj; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = sum; }
      }
    }
    const double di = ai - old_i;
    const double dj = aj - old_j;
    if (di == 0.0 && dj == 0.0) return false;

    const double qij = y[i] * y[j] * kij;
    objective += grad[i] * di + grad[j] * dj + 0.5 * (di * di + dj * dj) + qij * di * dj;
    const auto& kj = kernel.row(j);
    const auto& ki_again = kernel.row(i);
    for (std::size_t k = 0; k < n; ++k) {
      grad[k] += y[k] * (y[i] * ki_again[k] * di + y[j] * kj[k] * dj);
    }
    if (trace) trace->dual_objective.push_back(-objective);
    return true;
  };

  std::size_t iter = 0;
  bool converged = false;
  while (true) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) { gmax = v; i = t; }
      if (in_low(t) && v < gmin) { gmin = v; j = t; }
    }
    if (i == n || j == n || gmax - gmin < params.tolerance) {
      converged = true;
      break;
    }
    if (iter >= max_iter) break;

    if (!update_pair(i, j)) {
      // Degenerate step on the maximal pair: retry with a random violator.
      std::vector<std::size_t> candidates;
      for (std::size_t t = 0; t < n; ++t) {
        if (t != i && in_low(t) && -y[t] * grad[t] < gmax - params.tolerance) candidates.push_back(t);
      }
      bool moved = false;
      std::shuffle(candidates.begin(), candidates.end(), rng);
      for (std::size_t t : candidates) {
        if (update_pair(i, t)) { moved = true; break; }
      }
      if (!moved) break;
    }
    ++iter;
  }

  // Bias from free support vectors, else the midpoint of the feasible range.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double yg = y[k] * grad[k];
    if (alpha[k] >= upper[k]) {
      if (y[k] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[k] <= 0.0) {
      if (y[k] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;

  model.bias = -rho;
  model.converged = converged;
  model.iterations = iter;
  for (std::size_t k = 0; k < n; ++k) {
    if (alpha[k] > 0.0) model.support_vectors.push_back({data.x[k], data.labels[k], alpha[k]});
  }
  if (trace) trace->alphas = alpha;
  return model;
}

TrainedModel train_svm(const Dataset& data, const SvmParams& params) {
  return train_svm(to_training_data(data), params);
}

double decision_value(const TrainedModel& model, const SparseVector& x) {
  const double gamma = model.params.gamma.value_or(1.0);
  double sum = model.bias;
  for (const auto& sv : model.support_vectors) {
    const double y = sv.label == 1 ? 1.0 : -1.0;
    sum += sv.alpha * y * rbf_kernel(sv.x, x, gamma);
  }
  return sum;
}

int predict(const TrainedModel& model, const SparseVector& x) {
  for (const auto& [col, value] : x) {
    if (col >= model.dimension) throw std::invalid_argument("predict: feature column beyond model dimension");
  }
  return decision_value(model, x) > 0.0 ? 1 : 0;
}

int predict(const TrainedModel& model, std::span<const double> dense) {
  if (dense.size() != model.dimension) throw std::invalid_argument("predict: dimension mismatch");
  SparseVector x;
  for (std::size_t k = 0; k < dense.size(); ++k) {
    if (dense[k] != 0.0) x.emplace_back(static_cast<std::uint32_t>(k), dense[k]);
  }
  return predict(model, x);
}

std::vector<int> predict_all(const TrainedModel& model, const Dataset& data) {
  std::vector<int> out;
  out.reserve(data.instances.size());
  for (const auto& inst : data.instances) out.push_back(predict(model, to_sparse(inst.features, data.feature_index)));
  return out;
}

void save_model(const TrainedModel& model, std::ostream& out) {
  out << "moocgraph-svm " << kModelFormatVersion << '\n';
  out << "dimension " << model.dimension << '\n';
  out << "C " << fmt(model.params.C) << '\n';
  out << "gamma " << fmt(model.params.gamma.value_or(1.0)) << '\n';
  out << "tolerance " << fmt(model.params.tolerance) << '\n';
  out << "max_passes " << model.params.max_passes << '\n';
  out << "seed " << model.params.seed << '\n';
  for (const auto& [label, cost] : model.params.class_cost) out << "class_cost " << label << ' ' << fmt(cost) << '\n';
  out << "bias " << fmt(model.bias) << '\n';
  out << "converged " << (model.converged ? 1 : 0) << '\n';
  out << "iterations " << model.iterations << '\n';
  out << "support_vectors " << model.support_vectors.size() << '\n';
  for (const auto& sv : model.support_vectors) {
    out << sv.label << ' ' << fmt(sv.alpha);
    for (const auto& [col, value] : sv.x) out << ' ' << (col + 1) << ':' << fmt(value);
    out << '\n';
  }
}

namespace {

template <class T>
T parse_value(const std::string& s) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("malformed model value '" + s + "'");
  return v;
}

}  // namespace

TrainedModel load_model(std::istream& in) {
  if (!in.good()) throw IoError("model stream is not readable");
  TrainedModel model;
  model.params.class_cost.clear();
  std::string line;
  if (!std::getline(in, line) || line != "moocgraph-svm " + std::to_string(kModelFormatVersion)) {
    throw IoError("not a moocgraph-svm model (version " + std::to_string(kModelFormatVersion) + ")");
  }
  std::size_t expected_svs = 0;
  bool header_done = false;
  while (!header_done && std::getline(in, line)) {
    std::istringstream row(line);
    std::string key;
    std::string value;
    row >> key >> value;
    if (key == "dimension") model.dimension = parse_value<std::size_t>(value);
    else if (key == "C") model.params.C = parse_value<double>(value);
    else if (key == "gamma") model.params.gamma = parse_value<double>(value);
    else if (key == "tolerance") model.params.tolerance = parse_value<double>(value);
    else if (key == "max_passes") model.params.max_passes = parse_value<std::size_t>(value);
    else if (key == "seed") model.params.seed = parse_value<std::uint64_t>(value);
    else if (key == "class_cost") {
      std::string cost;
      row >> cost;
      model.params.class_cost[parse_value<int>(value)] = parse_value<double>(cost);
    } else if (key == "bias") model.bias = parse_value<double>(value);
    else if (key == "converged") model.converged = value == "1";
    else if (key == "iterations") model.iterations = parse_value<std::size_t>(value);
    else if (key == "support_vectors") {
      expected_svs = parse_value<std::size_t>(value);
      header_done = true;
    } else {
      throw IoError("unknown model key '" + key + "'");
    }
  }
  if (!header_done) throw IoError("truncated model header");
  for (std::size_t k = 0; k < expected_svs; ++k) {
    if (!std::getline(in, line)) throw IoError("truncated support vector list");
    std::istringstream row(line);
    std::string label;
    std::string alpha;
    row >> label >> alpha;
    SupportVector sv;
    sv.label = parse_value<int>(label);
    sv.alpha = parse_value<double>(alpha);
    std::string entry;
    while (row >> entry) {
      const auto colon = entry.find(':');
      if (colon == std::string::npos) throw IoError("malformed support vector entry");
      const auto col = parse_value<std::uint32_t>(entry.substr(0, colon));
      if (col == 0 || col > model.dimension) throw IoError("support vector column out of range");
      sv.x.emplace_back(col - 1, parse_value<double>(entry.substr(colon + 1)));
    }
    model.support_vectors.push_back(std::move(sv));
  }
  return model;
}

}  // namespace moocgraph
