#pragma once

#include "reveal/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace reveal {

// Dense table of feature vectors phi(k, a), stored row-major as (k, a, j).
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::size_t num_contexts, std::size_t num_actions, std::size_t dim);
  FeatureMap(std::size_t num_contexts, std::size_t num_actions, std::size_t dim,
             std::vector<double> table);

  std::size_t num_contexts() const { return num_contexts_; }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t dim() const { return dim_; }
  const std::vector<double>& table() const { return table_; }

  Eigen::Map<const Vector> feature(std::size_t k, std::size_t a) const;
  void set_feature(std::size_t k, std::size_t a, const Vector& phi);

  // L: the largest Euclidean norm over all stored vectors.
  double max_norm() const;

 private:
  std::size_t offset(std::size_t k, std::size_t a) const;

  std::size_t num_contexts_ = 0;
  std::size_t num_actions_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> table_;
};

struct BanditInstance {
  FeatureMap features;
  Vector theta_star;
  Vector context_dist;  // p*
  double noise_std = 0.1;
  double theta_bound = 1.0;  // W

  // Throws InvalidInput on shape errors, a non-normalized p*, or ||theta*|| > W.
  void validate() const;
};

struct SyntheticOptions {
  double noise_std = 0.1;
};

struct GroundTruth {
  Vector u_star;                         // per context: max_a <theta*, phi(k, a)>
  std::vector<std::size_t> best_action;  // per context argmax, lowest index on ties
  double v_star = 0.0;                   // max_a <theta*, phi_bar(a)>
  std::size_t v_action = 0;
  double eta_min = 0.0;                  // +inf when no context beats v*
  bool has_positive_gap = false;
  double u_max = 0.0;
  double u_min = 0.0;
  double delta_min = 0.0;                // +inf with a single action
  std::vector<Vector> weighted_features;  // phi_bar(a)
};

Vector weighted_feature(const FeatureMap& features, const Vector& dist, std::size_t action);
std::vector<Vector> weighted_features(const FeatureMap& features, const Vector& dist);

std::size_t sample_context(const BanditInstance& instance, Rng& rng);
// Inverse-CDF lookup for a uniform draw in [0, 1).
std::size_t context_from_uniform(const Vector& dist, double u);

double expected_reward(const BanditInstance& instance, std::size_t context, std::size_t action);
double realize_reward(const BanditInstance& instance, std::size_t context, std::size_t action,
                      Rng& rng);

// One-hot action block (action 0 is the all-zero baseline), scalar context
// value (k+1)/K, then the action-by-context interaction block. d = 2|A| - 1.
FeatureMap synthetic_feature_map(std::size_t num_contexts, std::size_t num_actions);
BanditInstance generate_synthetic_instance(std::size_t num_contexts, std::size_t num_actions,
                                           Rng& rng, const SyntheticOptions& options = {});

GroundTruth ground_truth(const BanditInstance& instance);

// Affine map x -> (x - u_min) / (u_max - u_min).
class GapNormalizer {
 public:
  GapNormalizer(double u_max, double u_min);

  double value(double x) const { return (x - u_min_) / span_; }
  // Differences only need the scale; the result is clamped to [-1, 1].
  double gap(double difference) const;
  double scale() const { return span_; }

 private:
  double u_min_;
  double span_;
};

std::vector<double> normalize_gaps(std::span<const double> values, double u_max, double u_min);

void save_instance(const BanditInstance& instance, std::ostream& out);
void save_instance(const BanditInstance& instance, const std::string& path);
BanditInstance load_instance(std::istream& in);
BanditInstance load_instance(const std::string& path);

}  // namespace reveal
