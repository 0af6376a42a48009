#include "reveal/core_model.hpp"

#include "reveal/kv_text.hpp"
#include "reveal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace reveal {

FeatureMap::FeatureMap(std::size_t num_contexts, std::size_t num_actions, std::size_t dim)
    : FeatureMap(num_contexts, num_actions, dim,
                 std::vector<double>(num_contexts * num_actions * dim, 0.0)) {}

FeatureMap::FeatureMap(std::size_t num_contexts, std::size_t num_actions, std::size_t dim,
                       std::vector<double> table)
    : num_contexts_(num_contexts), num_actions_(num_actions), dim_(dim), table_(std::move(table)) {
  if (num_contexts == 0 || num_actions == 0 || dim == 0) {
    throw InvalidInput("feature map needs K, |A| and d all positive");
  }
  if (table_.size() != num_contexts * num_actions * dim) {
    throw InvalidInput("feature table has " + std::to_string(table_.size()) + " entries, expected " +
                       std::to_string(num_contexts * num_actions * dim));
  }
  for (double v : table_) {
    if (!std::isfinite(v)) throw InvalidInput("feature table contains a non-finite entry");
  }
}

std::size_t FeatureMap::offset(std::size_t k, std::size_t a) const {
  if (k >= num_contexts_ || a >= num_actions_) {
    throw InvalidInput("feature index (" + std::to_string(k) + ", " + std::to_string(a) +
                       ") out of range");
  }
  return (k * num_actions_ + a) * dim_;
}

Eigen::Map<const Vector> FeatureMap::feature(std::size_t k, std::size_t a) const {
  return Eigen::Map<const Vector>(table_.data() + offset(k, a), static_cast<Eigen::Index>(dim_));
}

void FeatureMap::set_feature(std::size_t k, std::size_t a, const Vector& phi) {
  if (static_cast<std::size_t>(phi.size()) != dim_) throw InvalidInput("feature length != d");
  if (!phi.allFinite()) throw InvalidInput("feature contains a non-finite entry");
  std::copy(phi.data(), phi.data() + dim_, table_.begin() + static_cast<std::ptrdiff_t>(offset(k, a)));
}

double FeatureMap::max_norm() const {
  double best = 0.0;
  for (std::size_t k = 0; k < num_contexts_; ++k) {
    for (std::size_t a = 0; a < num_actions_; ++a) best = std::max(best, feature(k, a).norm());
  }
  return best;
}

void BanditInstance::validate() const {
  const auto d = static_cast<Eigen::Index>(features.dim());
  if (features.table().empty()) throw InvalidInput("instance has an empty feature map");
  if (theta_star.size() != d) throw InvalidInput("theta* length != d");
  if (context_dist.size() != static_cast<Eigen::Index>(features.num_contexts())) {
    throw InvalidInput("p* length != K");
  }
  if (!theta_star.allFinite() || !context_dist.allFinite()) {
    throw InvalidInput("instance contains non-finite values");
  }
  if ((context_dist.array() < 0.0).any()) throw InvalidInput("p* has a negative entry");
  if (std::abs(context_dist.sum() - 1.0) > 1e-12) throw InvalidInput("p* does not sum to 1");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw InvalidInput("noise_std must be >= 0");
  if (!(theta_star.norm() <= theta_bound * (1.0 + 1e-12))) {
    throw InvalidInput("||theta*|| exceeds the bound W");
  }
}

Vector weighted_feature(const FeatureMap& features, const Vector& dist, std::size_t action) {
  if (dist.size() != static_cast<Eigen::Index>(features.num_contexts())) {
    throw InvalidInput("distribution length " + std::to_string(dist.size()) + " != K = " +
                       std::to_string(features.num_contexts()));
  }
  if (action >= features.num_actions()) throw InvalidInput("action index out of range");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(features.dim()));
  for (std::size_t k = 0; k < features.num_contexts(); ++k) {
    out += dist[static_cast<Eigen::Index>(k)] * features.feature(k, action);
  }
  return out;
}

std::vector<Vector> weighted_features(const FeatureMap& features, const Vector& dist) {
  std::vector<Vector> out;
  out.reserve(features.num_actions());
  for (std::size_t a = 0; a < features.num_actions(); ++a) out.push_back(weighted_feature(features, dist, a));
  return out;
}

std::size_t context_from_uniform(const Vector& dist, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (Eigen::Index k = 0; k < dist.size(); ++k) {
    if (dist[k] <= 0.0) continue;
    last_positive = static_cast<std::size_t>(k);
    cumulative += dist[k];
    if (u < cumulative) return static_cast<std::size_t>(k);
  }
  // Rounding left u just above the total mass.
  return last_positive;
}

std::size_t sample_context(const BanditInstance& instance, Rng& rng) {
  return context_from_uniform(instance.context_dist, uniform01(rng));
}

double expected_reward(const BanditInstance& instance, std::size_t context, std::size_t action) {
  return instance.features.feature(context, action).dot(instance.theta_star);
}

double realize_reward(const BanditInstance& instance, std::size_t context, std::size_t action,
                      Rng& rng) {
  const double noise = standard_normal(rng);
  return expected_reward(instance, context, action) + instance.noise_std * noise;
}

FeatureMap synthetic_feature_map(std::size_t num_contexts, std::size_t num_actions) {
  if (num_contexts < 1) throw InvalidInput("need at least one context");
  if (num_actions < 2) throw InvalidInput("need at least two actions");
  const std::size_t m = num_actions - 1;
  const std::size_t d = 2 * m + 1;
  FeatureMap map(num_contexts, num_actions, d);
  for (std::size_t k = 0; k < num_contexts; ++k) {
    const double s = static_cast<double>(k + 1) / static_cast<double>(num_contexts);
    for (std::size_t a = 0; a < num_actions; ++a) {
      Vector phi = Vector::Zero(static_cast<Eigen::Index>(d));
      phi[static_cast<Eigen::Index>(m)] = s;
      if (a > 0) {
        phi[static_cast<Eigen::Index>(a - 1)] = 1.0;
        phi[static_cast<Eigen::Index>(m + a)] = s;
      }
      map.set_feature(k, a, phi);
    }
  }
  return map;
}

BanditInstance generate_synthetic_instance(std::size_t num_contexts, std::size_t num_actions,
                                           Rng& rng, const SyntheticOptions& options) {
  BanditInstance inst;
  inst.features = synthetic_feature_map(num_contexts, num_actions);
  const auto d = static_cast<Eigen::Index>(inst.features.dim());
  inst.theta_star.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) inst.theta_star[j] = uniform01(rng);
  inst.context_dist.resize(static_cast<Eigen::Index>(num_contexts));
  for (Eigen::Index k = 0; k < inst.context_dist.size(); ++k) {
    // Keep every context reachable; a zero draw has probability 2^-53.
    inst.context_dist[k] = std::max(uniform01(rng), std::numeric_limits<double>::min());
  }
  inst.context_dist /= inst.context_dist.sum();

  double max_reward = 0.0;
  for (std::size_t k = 0; k < num_contexts; ++k) {
    for (std::size_t a = 0; a < num_actions; ++a) {
      max_reward = std::max(max_reward, expected_reward(inst, k, a));
    }
  }
  if (max_reward > 1.0) inst.theta_star /= max_reward;
  inst.noise_std = options.noise_std;
  inst.theta_bound = inst.theta_star.norm();
  return inst;
}

GroundTruth ground_truth(const BanditInstance& instance) {
  instance.validate();
  const auto& f = instance.features;
  const std::size_t K = f.num_contexts();
  const std::size_t A = f.num_actions();
  GroundTruth gt;
  gt.u_star.resize(static_cast<Eigen::Index>(K));
  gt.best_action.assign(K, 0);
  for (std::size_t k = 0; k < K; ++k) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < A; ++a) {
      const double r = expected_reward(instance, k, a);
      if (r > best) {
        best = r;
        gt.best_action[k] = a;
      }
    }
    gt.u_star[static_cast<Eigen::Index>(k)] = best;
  }
  gt.weighted_features = weighted_features(f, instance.context_dist);
  gt.v_star = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < A; ++a) {
    const double r = gt.weighted_features[a].dot(instance.theta_star);
    if (r > gt.v_star) {
      gt.v_star = r;
      gt.v_action = a;
    }
  }
  gt.u_max = gt.u_star.maxCoeff();
  gt.u_min = gt.u_star.minCoeff();
  gt.eta_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < gt.u_star.size(); ++k) {
    const double gap = gt.u_star[k] - gt.v_star;
    if (gap > 0.0) gt.eta_min = std::min(gt.eta_min, gap);
  }
  gt.has_positive_gap = std::isfinite(gt.eta_min);
  gt.delta_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t b = a + 1; b < A; ++b) {
        gt.delta_min = std::min(gt.delta_min, (f.feature(k, a) - f.feature(k, b)).norm());
      }
    }
  }
  return gt;
}

GapNormalizer::GapNormalizer(double u_max, double u_min) : u_min_(u_min), span_(u_max - u_min) {
  if (!(span_ > 0.0) || !std::isfinite(span_)) {
    throw DegenerateInstance("normalization needs u_max > u_min");
  }
}

double GapNormalizer::gap(double difference) const {
  return std::clamp(difference / span_, -1.0, 1.0);
}

std::vector<double> normalize_gaps(std::span<const double> values, double u_max, double u_min) {
  const GapNormalizer norm(u_max, u_min);
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(norm.value(v));
  return out;
}

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void save_instance(const BanditInstance& instance, std::ostream& out) {
  instance.validate();
  KeyValueDocument doc;
  doc.set("num_contexts", std::to_string(instance.features.num_contexts()));
  doc.set("num_actions", std::to_string(instance.features.num_actions()));
  doc.set("dim", std::to_string(instance.features.dim()));
  doc.set("noise_std", format_double(instance.noise_std));
  doc.set("theta_bound", format_double(instance.theta_bound));
  doc.set("theta_star", join_doubles(to_std(instance.theta_star)));
  doc.set("context_dist", join_doubles(to_std(instance.context_dist)));
  doc.set("features", join_doubles(instance.features.table()));
  doc.write(out);
}

void save_instance(const BanditInstance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write instance to '" + path + "'");
  save_instance(instance, out);
  if (!out) throw InvalidInput("write failed for '" + path + "'");
}

namespace {

BanditInstance from_document(const KeyValueDocument& doc) {
  BanditInstance inst;
  inst.features = FeatureMap(doc.get_size("num_contexts"), doc.get_size("num_actions"),
                             doc.get_size("dim"), doc.get_doubles("features"));
  inst.noise_std = doc.get_double("noise_std");
  inst.theta_bound = doc.get_double("theta_bound");
  inst.theta_star = to_eigen(doc.get_doubles("theta_star"));
  inst.context_dist = to_eigen(doc.get_doubles("context_dist"));
  inst.validate();
  return inst;
}

}  // namespace

BanditInstance load_instance(std::istream& in) { return from_document(KeyValueDocument::parse(in)); }

BanditInstance load_instance(const std::string& path) {
  const auto doc = KeyValueDocument::load(path);
  try {
    return from_document(doc);
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

}  // namespace reveal
