#include "delayrl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace delayrl {

StepStatistics::StepStatistics(int horizon, int dim, int num_states, double sigma,
                               double lambda)
    : horizon_(horizon),
      dim_(dim),
      num_states_(num_states),
      sigma_(sigma),
      lambda_(lambda),
      inv_sigma_sq_(1.0 / (sigma * sigma)) {
  if (horizon_ < 1 || dim_ < 1 || num_states_ < 1)
    throw std::invalid_argument("StepStatistics: sizes must be positive");
  if (!(sigma_ > 0.0) || !(lambda_ > 0.0))
    throw std::invalid_argument("StepStatistics: sigma and lambda must be positive");
  steps_.resize(horizon_);
  for (auto& step : steps_) {
    step.gram = SpdMatrix::identity(dim_, lambda_);
    step.shadow = SpdMatrix::identity(dim_, lambda_);
    step.reward_vec.assign(dim_, 0.0);
    step.next_agg.assign(num_states_, Vec(dim_, 0.0));
  }
}

StepStatistics::StepStatistics(const LinearMDP& mdp, double sigma, double lambda)
    : StepStatistics(mdp.horizon(), mdp.dim(), mdp.num_states(), sigma, lambda) {
  mdp_ = &mdp;
}

void StepStatistics::add_arrived(int h, std::span<const double> phi, double reward,
                                 int next_state) {
  if (h < 0 || h >= horizon_)
    throw IndexOutOfRange("add_arrived: step " + std::to_string(h) + " out of range");
  if (next_state < 0 || next_state >= num_states_)
    throw IndexOutOfRange("add_arrived: next state out of range");
  Step& step = steps_[h];
  step.gram.add_outer(phi, inv_sigma_sq_);
  for (int i = 0; i < dim_; ++i) {
    step.reward_vec[i] += phi[i] * reward;
    step.next_agg[next_state][i] += phi[i];
  }
  ++step.count;
  step.raw.push_back({Vec(phi.begin(), phi.end()), reward, next_state});
}

void StepStatistics::add_shadow(int h, std::span<const double> phi) {
  if (h < 0 || h >= horizon_)
    throw IndexOutOfRange("add_shadow: step " + std::to_string(h) + " out of range");
  steps_[h].shadow.add_outer(phi, inv_sigma_sq_);
}

void StepStatistics::ingest_arrivals(std::span<const Trajectory> trajectories) {
  if (!mdp_)
    throw std::logic_error("ingest_arrivals: statistics not bound to an MDP");
  for (const Trajectory& traj : trajectories) {
    if (traj.steps.size() != static_cast<size_t>(horizon_))
      throw DimensionMismatch("ingest_arrivals: trajectory length " +
                              std::to_string(traj.steps.size()) + " vs horizon " +
                              std::to_string(horizon_));
    for (int h = 0; h < horizon_; ++h) {
      const Transition& t = traj.steps[h];
      add_arrived(h, mdp_->features(t.state, t.action), t.reward, t.next_state);
    }
  }
}

void StepStatistics::observe_shadow(const Trajectory& traj) {
  if (!mdp_)
    throw std::logic_error("observe_shadow: statistics not bound to an MDP");
  if (traj.steps.size() != static_cast<size_t>(horizon_))
    throw DimensionMismatch("observe_shadow: trajectory length mismatch");
  for (int h = 0; h < horizon_; ++h) {
    const Transition& t = traj.steps[h];
    add_shadow(h, mdp_->features(t.state, t.action));
  }
}

Vec StepStatistics::assemble_targets(int h, std::span<const double> v_next) const {
  if (h < 0 || h >= horizon_)
    throw IndexOutOfRange("assemble_targets: step out of range");
  if (static_cast<int>(v_next.size()) != num_states_)
    throw DimensionMismatch("assemble_targets: need one value per state");
  const Step& step = steps_[h];
  Vec b(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) b[i] = step.reward_vec[i];
  for (int t = 0; t < num_states_; ++t) {
    const double v = v_next[t];
    if (v == 0.0) continue;
    const Vec& agg = step.next_agg[t];
    for (int i = 0; i < dim_; ++i) b[i] += agg[i] * v;
  }
  for (int i = 0; i < dim_; ++i) b[i] *= inv_sigma_sq_;
  return b;
}

namespace {

double ensemble_q(const LinearMDP& mdp, const std::vector<Vec>& weights, int s, int a) {
  std::span<const double> phi = mdp.features(s, a);
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& w : weights) {
    double q = 0.0;
    for (size_t i = 0; i < phi.size(); ++i) q += phi[i] * w[i];
    best = std::max(best, q);
  }
  return best;
}

// Values fed into the next regression: per state, the best action value
// truncated at the remaining steps and floored at zero.
template <typename QFn>
Vec truncated_values(const LinearMDP& mdp, int h, QFn&& q_fn) {
  const double cap = static_cast<double>(mdp.horizon() - h);
  Vec v(mdp.num_states(), 0.0);
  for (int s = 0; s < mdp.num_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.num_actions(); ++a) best = std::max(best, q_fn(s, a));
    v[s] = std::clamp(best, 0.0, cap);
  }
  return v;
}

}  // namespace

Policy psvi_plan(const StepStatistics& stats, const LinearMDP& mdp, double nu,
                 int ensemble_size, const StreamFactory& rng) {
  if (ensemble_size < 1) throw std::invalid_argument("psvi_plan: need at least one sample");
  const int H = mdp.horizon();
  std::vector<std::vector<Vec>> ensembles(H);
  Vec v_next(mdp.num_states(), 0.0);
  for (int h = H - 1; h >= 0; --h) {
    const CholeskyFactor chol = cholesky_factor(stats.gram(h));
    const Vec b = stats.assemble_targets(h, v_next);
    const Vec w_hat = solve_spd(chol, b);
    ensembles[h].reserve(ensemble_size);
    for (int m = 0; m < ensemble_size; ++m) {
      RngStream chain = rng.stream("psvi-chain", static_cast<std::uint64_t>(h), m);
      ensembles[h].push_back(sample_gaussian(w_hat, chol, nu, chain));
    }
    if (h > 0)
      v_next = truncated_values(mdp, h, [&](int s, int a) {
        return ensemble_q(mdp, ensembles[h], s, a);
      });
  }
  return Policy(mdp, std::move(ensembles));
}

Vec lmc(const SpdMatrix& gram, std::span<const double> target,
        std::span<const double> w0, double step_size, int iterations,
        double temperature, RngStream& rng) {
  const int n = gram.dim();
  if (static_cast<int>(target.size()) != n || static_cast<int>(w0.size()) != n)
    throw DimensionMismatch("lmc: vector lengths do not match the Gram matrix");
  if (!(step_size > 0.0)) throw std::invalid_argument("lmc: step size must be positive");
  if (iterations < 0) throw std::invalid_argument("lmc: negative iteration count");
  Vec w(w0.begin(), w0.end());
  const double noise_scale = std::sqrt(2.0 * step_size * temperature);
  for (int t = 0; t < iterations; ++t) {
    const Vec grad_lin = gram.multiply(w);
    for (int i = 0; i < n; ++i) w[i] -= 2.0 * step_size * (grad_lin[i] - target[i]);
    if (noise_scale > 0.0)
      for (int i = 0; i < n; ++i) w[i] += noise_scale * rng.normal();
    double norm_sq = 0.0;
    for (double wi : w) norm_sq += wi * wi;
    if (norm_sq > 1e12)
      throw Divergence("lmc: iterate norm exceeded 1e6 at iteration " + std::to_string(t));
  }
  return w;
}

GaussianLaw lmc_closed_form(const SpdMatrix& gram, std::span<const double> target,
                            std::span<const double> w0, double step_size,
                            long iterations, double temperature) {
  const int n = gram.dim();
  if (static_cast<int>(target.size()) != n || static_cast<int>(w0.size()) != n)
    throw DimensionMismatch("lmc_closed_form: vector lengths do not match");
  SpdMatrix contraction(n);  // A = I - 2 * eta * gram
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      contraction(i, j) = (i == j ? 1.0 : 0.0) - 2.0 * step_size * gram(i, j);
  try {
    (void)cholesky_factor(contraction);
  } catch (const NotPositiveDefinite&) {
    throw StepTooLarge("lmc_closed_form: step size reaches 1/(2 max eigenvalue)");
  }

  const CholeskyFactor chol = cholesky_factor(gram);
  const Vec ridge = solve_spd(chol, target);
  const SpdMatrix a_n = sym_power(contraction, iterations);

  GaussianLaw law;
  law.mean.assign(n, 0.0);
  const Vec a_n_w0 = a_n.multiply(w0);
  const Vec a_n_ridge = a_n.multiply(ridge);
  for (int i = 0; i < n; ++i) law.mean[i] = a_n_w0[i] + ridge[i] - a_n_ridge[i];

  // temperature * (I - A^{2N}) * gram^{-1} * (I + A)^{-1}
  const SpdMatrix a_2n = sym_product(a_n, a_n);
  SpdMatrix residual(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) residual(i, j) = (i == j ? 1.0 : 0.0) - a_2n(i, j);
  SpdMatrix one_plus_a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      one_plus_a(i, j) = (i == j ? 1.0 : 0.0) + contraction(i, j);
  const SpdMatrix gram_inv = spd_inverse(chol);
  const SpdMatrix one_plus_a_inv = spd_inverse(cholesky_factor(one_plus_a));
  SpdMatrix cov = sym_product(sym_product(residual, gram_inv), one_plus_a_inv);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cov(i, j) *= temperature;
  law.covariance = std::move(cov);
  return law;
}

Policy lpsvi_plan(const StepStatistics& stats, const LinearMDP& mdp,
                  const LmcParams& params, const StreamFactory& rng,
                  const Policy* previous) {
  if (params.chains < 1) throw std::invalid_argument("lpsvi_plan: need at least one chain");
  const int H = mdp.horizon();
  const Vec zero(mdp.dim(), 0.0);
  std::vector<std::vector<Vec>> ensembles(H);
  Vec v_next(mdp.num_states(), 0.0);
  for (int h = H - 1; h >= 0; --h) {
    const SpdMatrix& gram = stats.gram(h);
    const Vec b = stats.assemble_targets(h, v_next);
    const double eta = params.step_size > 0.0
                           ? params.step_size
                           : params.c_eta / max_eigenvalue(gram);
    ensembles[h].reserve(params.chains);
    for (int m = 0; m < params.chains; ++m) {
      const Vec* start = &zero;
      if (params.warm_start && previous && previous->has_ensembles() &&
          m < static_cast<int>(previous->ensemble(h).size()))
        start = &previous->ensemble(h)[m];
      RngStream chain = rng.stream("lmc-chain", static_cast<std::uint64_t>(h), m);
      ensembles[h].push_back(lmc(gram, b, *start, eta, params.iterations,
                                 params.temperature, chain));
    }
    if (h > 0)
      v_next = truncated_values(mdp, h, [&](int s, int a) {
        return ensemble_q(mdp, ensembles[h], s, a);
      });
  }
  return Policy(mdp, std::move(ensembles));
}

namespace {

Policy ucbvi_plan_impl(const StepStatistics& stats, const LinearMDP& mdp,
                       std::span<const double> beta_per_step) {
  const int H = mdp.horizon();
  if (static_cast<int>(beta_per_step.size()) != H)
    throw DimensionMismatch("ucbvi_plan: need one beta per step");
  std::vector<Policy::BonusStep> steps(H);
  Vec v_next(mdp.num_states(), 0.0);
  for (int h = H - 1; h >= 0; --h) {
    steps[h].gram = cholesky_factor(stats.gram(h));
    steps[h].beta = beta_per_step[h];
    const Vec b = stats.assemble_targets(h, v_next);
    steps[h].w = solve_spd(steps[h].gram, b);
    if (h > 0)
      v_next = truncated_values(mdp, h, [&](int s, int a) {
        std::span<const double> phi = mdp.features(s, a);
        double q = 0.0;
        for (size_t i = 0; i < phi.size(); ++i) q += phi[i] * steps[h].w[i];
        const Vec solved = solve_spd(steps[h].gram, phi);
        double quad = 0.0;
        for (size_t i = 0; i < phi.size(); ++i) quad += phi[i] * solved[i];
        return q + steps[h].beta * std::sqrt(std::max(quad, 0.0));
      });
  }
  return Policy(mdp, std::move(steps));
}

}  // namespace

Policy ucbvi_plan(const StepStatistics& stats, const LinearMDP& mdp, double beta) {
  const Vec betas(mdp.horizon(), beta);
  return ucbvi_plan_impl(stats, mdp, betas);
}

Policy ucbvi_plan(const StepStatistics& stats, const LinearMDP& mdp,
                  std::span<const double> beta_per_step) {
  return ucbvi_plan_impl(stats, mdp, beta_per_step);
}

}  // namespace delayrl
