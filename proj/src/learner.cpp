#include "reveal/learner.hpp"

#include "reveal/rng.hpp"

#include <cmath>

namespace reveal {

double radius_gamma(double delta, std::size_t dim, std::size_t horizon, double theta_bound,
                    double feature_bound) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("delta must lie in (0, 1)");
  const double d = static_cast<double>(dim);
  const double wl = theta_bound * theta_bound * feature_bound * feature_bound;
  return 1.0 + std::sqrt(2.0 * std::log(1.0 / delta) +
                         d * std::log(1.0 + static_cast<double>(horizon) * wl / d));
}

ConfidenceSet::ConfidenceSet(std::size_t dim, double lambda, double radius)
    : lambda_(lambda), radius_(radius) {
  if (dim == 0) throw InvalidInput("confidence set needs d > 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be positive");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw InvalidInput("radius must be non-negative");
  const auto n = static_cast<Eigen::Index>(dim);
  v_ = lambda * Matrix::Identity(n, n);
  g_ = Vector::Zero(n);
  refactor();
}

void ConfidenceSet::refactor() {
  llt_.compute(v_);
  if (llt_.info() != Eigen::Success) throw NumericError("design matrix lost positive definiteness");
  theta_ = llt_.solve(g_);
}

void ConfidenceSet::update(const Vector& phi, double reward) {
  if (phi.size() != g_.size()) throw InvalidInput("feature length != d");
  if (!phi.allFinite() || !std::isfinite(reward)) throw InvalidInput("non-finite ridge update");
  v_.noalias() += phi * phi.transpose();
  g_ += reward * phi;
  refactor();
}

double ConfidenceSet::width(const Vector& phi) const {
  return llt_.matrixL().solve(phi).norm();
}

double ConfidenceSet::ucb(const Vector& phi) const { return phi.dot(theta_) + radius_ * width(phi); }

double ConfidenceSet::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

double ConfidenceSet::ellipsoid_distance(const Vector& theta) const {
  const Vector diff = theta - theta_;
  return std::sqrt(std::max(0.0, diff.dot(v_ * diff)));
}

ConfidenceSet update_ridge(const ConfidenceSet& set, const Vector& phi, double reward) {
  ConfidenceSet out = set;
  out.update(phi, reward);
  return out;
}

double ucb_value(const ConfidenceSet& set, const Vector& phi) { return set.ucb(phi); }

OptimisticChoice optimistic_contextual(const ConfidenceSet& set, const FeatureMap& features,
                                       std::size_t context) {
  OptimisticChoice best{0, set.ucb(features.feature(context, 0))};
  for (std::size_t a = 1; a < features.num_actions(); ++a) {
    const double v = set.ucb(features.feature(context, a));
    if (v > best.value) best = {a, v};
  }
  return best;
}

OptimisticChoice optimistic_weighted(const ConfidenceSet& set, const std::vector<Vector>& weighted) {
  if (weighted.empty()) throw InvalidInput("no actions to choose from");
  OptimisticChoice best{0, set.ucb(weighted[0])};
  for (std::size_t a = 1; a < weighted.size(); ++a) {
    const double v = set.ucb(weighted[a]);
    if (v > best.value) best = {a, v};
  }
  return best;
}

ConfidenceSet sync_on_reveal(const ConfidenceSet& revealer, std::size_t t) {
  ConfidenceSet out = revealer;
  out.last_sync = t;
  return out;
}

double concentration_radius(const ConfidenceSet& set, double delta, double theta_norm) {
  const double d = static_cast<double>(set.dim());
  const double log_ratio = set.log_det() - d * std::log(set.lambda());
  return std::sqrt(2.0 * std::log(1.0 / delta) + log_ratio) + std::sqrt(set.lambda()) * theta_norm;
}

GaussianPosterior::GaussianPosterior(std::size_t dim, double prior_precision) {
  if (dim == 0) throw InvalidInput("posterior needs d > 0");
  if (!(prior_precision > 0.0)) throw InvalidInput("prior precision must be positive");
  const auto n = static_cast<Eigen::Index>(dim);
  precision_ = prior_precision * Matrix::Identity(n, n);
  g_ = Vector::Zero(n);
  refactor();
}

void GaussianPosterior::refactor() {
  llt_.compute(precision_);
  if (llt_.info() != Eigen::Success) throw NumericError("posterior precision is not positive definite");
  mean_ = llt_.solve(g_);
}

Vector GaussianPosterior::sample(Rng& rng) const {
  Vector z(mean_.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = standard_normal(rng);
  return mean_ + llt_.matrixU().solve(z);
}

void GaussianPosterior::update(const Vector& phi, double reward) {
  if (phi.size() != g_.size()) throw InvalidInput("feature length != d");
  if (!phi.allFinite() || !std::isfinite(reward)) throw InvalidInput("non-finite posterior update");
  precision_.noalias() += phi * phi.transpose();
  g_ += reward * phi;
  refactor();
}

std::pair<Vector, GaussianPosterior> ts_sample_and_update(const GaussianPosterior& posterior,
                                                         const Vector& feature_used, double reward,
                                                         Rng& rng) {
  Vector theta = posterior.sample(rng);
  GaussianPosterior next = posterior;
  next.update(feature_used, reward);
  return {std::move(theta), std::move(next)};
}

Vector ContextEstimate::p_hat() const {
  Vector p = Vector::Zero(static_cast<Eigen::Index>(counts.size()));
  if (total <= 0.0) return p;
  for (std::size_t k = 0; k < counts.size(); ++k) p[static_cast<Eigen::Index>(k)] = counts[k] / total;
  return p;
}

void update_context_counts(ContextEstimate& estimate, std::size_t context) {
  if (context >= estimate.counts.size()) throw InvalidInput("context index out of range");
  estimate.counts[context] += 1.0;
  estimate.total += 1.0;
}

Vector bernstein_radius(const ContextEstimate& estimate, double delta, std::size_t num_contexts,
                        std::size_t horizon) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("delta must lie in (0, 1)");
  const double log_term =
      std::log(2.0 * static_cast<double>(num_contexts) * static_cast<double>(horizon) / delta);
  const Vector p = estimate.p_hat();
  Vector zeta(p.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const double m = estimate.counts[static_cast<std::size_t>(k)];
    zeta[k] = std::sqrt(2.0 * p[k] * (1.0 - p[k]) * log_term / std::max(m, 1.0)) +
              7.0 * log_term / (3.0 * std::max(m - 1.0, 1.0));
  }
  return zeta;
}

}  // namespace reveal
