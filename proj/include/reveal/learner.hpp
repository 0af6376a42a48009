#pragma once

#include "reveal/core_model.hpp"

#include <Eigen/Cholesky>

#include <optional>
#include <utility>
#include <vector>

namespace reveal {

// gamma = 1 + sqrt(2 ln(1/delta) + d ln(1 + T W^2 L^2 / d)); pairs with lambda = 1/W^2.
double radius_gamma(double delta, std::size_t dim, std::size_t horizon, double theta_bound,
                    double feature_bound);

// Ridge estimate with ellipsoidal confidence region
// { theta : ||theta - theta_hat||_V <= radius }.
class ConfidenceSet {
 public:
  ConfidenceSet() = default;
  ConfidenceSet(std::size_t dim, double lambda, double radius);

  void update(const Vector& phi, double reward);

  double ucb(const Vector& phi) const;
  // ||phi||_{V^{-1}}
  double width(const Vector& phi) const;
  double log_det() const;
  // ||theta - theta_hat||_V
  double ellipsoid_distance(const Vector& theta) const;

  std::size_t dim() const { return static_cast<std::size_t>(g_.size()); }
  double lambda() const { return lambda_; }
  double radius() const { return radius_; }
  const Matrix& design_matrix() const { return v_; }
  const Vector& response_sum() const { return g_; }
  const Vector& theta_hat() const { return theta_; }

  std::optional<std::size_t> last_sync;

 private:
  void refactor();

  double lambda_ = 1.0;
  double radius_ = 1.0;
  Matrix v_;
  Vector g_;
  Vector theta_;
  Eigen::LLT<Matrix> llt_;
};

ConfidenceSet update_ridge(const ConfidenceSet& set, const Vector& phi, double reward);
double ucb_value(const ConfidenceSet& set, const Vector& phi);

struct OptimisticChoice {
  std::size_t action = 0;
  double value = 0.0;
};

// Argmax of ucb over actions for a concrete context; lowest index wins ties.
OptimisticChoice optimistic_contextual(const ConfidenceSet& set, const FeatureMap& features,
                                       std::size_t context);
// Same over a list of weighted features phi_bar(a).
OptimisticChoice optimistic_weighted(const ConfidenceSet& set, const std::vector<Vector>& weighted);

// The recommender's copy of the revealer's set, stamped with the sync time.
ConfidenceSet sync_on_reveal(const ConfidenceSet& revealer, std::size_t t);

// Right-hand side of the self-normalized concentration event:
// sqrt(2 ln(1/delta) + ln(det V / lambda^d)) + sqrt(lambda) ||theta*||.
double concentration_radius(const ConfidenceSet& set, double delta, double theta_norm);

class GaussianPosterior {
 public:
  GaussianPosterior() = default;
  GaussianPosterior(std::size_t dim, double prior_precision);

  // theta = mean + L^{-T} z with precision = L L^T.
  Vector sample(Rng& rng) const;
  void update(const Vector& phi, double reward);

  const Matrix& precision() const { return precision_; }
  const Vector& weighted_sum() const { return g_; }
  const Vector& mean() const { return mean_; }

 private:
  void refactor();

  Matrix precision_;
  Vector g_;
  Vector mean_;
  Eigen::LLT<Matrix> llt_;
};

std::pair<Vector, GaussianPosterior> ts_sample_and_update(const GaussianPosterior& posterior,
                                                         const Vector& feature_used, double reward,
                                                         Rng& rng);

struct ContextEstimate {
  std::vector<double> counts;  // m(k, t)
  double total = 0.0;

  explicit ContextEstimate(std::size_t num_contexts = 0) : counts(num_contexts, 0.0) {}
  // Empirical frequencies; all zero before the first observation.
  Vector p_hat() const;
};

void update_context_counts(ContextEstimate& estimate, std::size_t context);

// zeta_k = sqrt(2 p(1-p) ln(2KT/delta) / max(m,1)) + 7 ln(2KT/delta) / (3 max(m-1,1)).
Vector bernstein_radius(const ContextEstimate& estimate, double delta, std::size_t num_contexts,
                        std::size_t horizon);

}  // namespace reveal
