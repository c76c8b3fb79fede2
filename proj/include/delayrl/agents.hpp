#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "delayrl/environment.hpp"
#include "delayrl/numerics.hpp"
#include "delayrl/policy.hpp"
#include "delayrl/rng.hpp"

namespace delayrl {

struct Divergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StepTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arrived transition kept verbatim so aggregate statistics can be checked
// against a brute-force reconstruction.
struct ArrivedStep {
  Vec phi;
  double reward = 0.0;
  int next_state = 0;
};

// Per-step sufficient statistics of the regularized least-squares problems
// the planners solve. For step h the Gram matrix is
//   sigma^-2 * sum of phi phi^T over arrived episodes + lambda * I
// and targets are assembled from the reward sum and per-next-state feature
// sums, so a value estimate can be plugged in without revisiting episodes.
// The shadow Gram tracks the same sum over all generated episodes, arrived
// or not, for diagnosing what the delay withholds.
class StepStatistics {
 public:
  StepStatistics(int horizon, int dim, int num_states, double sigma, double lambda);
  StepStatistics(const LinearMDP& mdp, double sigma, double lambda);

  void ingest_arrivals(std::span<const Trajectory> trajectories);
  void observe_shadow(const Trajectory& trajectory);

  // Low-level entries behind the two methods above.
  void add_arrived(int h, std::span<const double> phi, double reward, int next_state);
  void add_shadow(int h, std::span<const double> phi);

  // Linear term sigma^-2 * (sum phi r + sum_s' (sum phi at s') v_next[s'])
  // of the least-squares problem at step h given next-step values v_next.
  Vec assemble_targets(int h, std::span<const double> v_next) const;

  const SpdMatrix& gram(int h) const { return steps_.at(h).gram; }
  const SpdMatrix& shadow_gram(int h) const { return steps_.at(h).shadow; }
  const Vec& reward_vec(int h) const { return steps_.at(h).reward_vec; }
  long count(int h) const { return steps_.at(h).count; }
  const std::vector<ArrivedStep>& arrived(int h) const { return steps_.at(h).raw; }

  int horizon() const { return horizon_; }
  int dim() const { return dim_; }
  int num_states() const { return num_states_; }
  double sigma() const { return sigma_; }
  double lambda() const { return lambda_; }

 private:
  struct Step {
    SpdMatrix gram;
    SpdMatrix shadow;
    Vec reward_vec;
    std::vector<Vec> next_agg;  // per next state: sum of arrived features
    long count = 0;
    std::vector<ArrivedStep> raw;
  };

  const LinearMDP* mdp_ = nullptr;
  int horizon_;
  int dim_;
  int num_states_;
  double sigma_;
  double lambda_;
  double inv_sigma_sq_;
  std::vector<Step> steps_;
};

// Posterior-sampling planner: per step, ensemble_size draws from
// N(ridge solution, nu^2 * gram^{-1}); values are the ensemble maximum,
// truncated at the remaining steps and floored at zero when they feed the
// next regression.
Policy psvi_plan(const StepStatistics& stats, const LinearMDP& mdp, double nu,
                 int ensemble_size, const StreamFactory& rng);

// Noisy gradient descent on the regularized least-squares loss
//   L(w) = |Phi^T w - y|^2 + lambda |w|^2   (gradient 2 * (gram * w - target)):
//   w <- w - step_size * gradient + sqrt(2 * step_size * temperature) * noise.
// Throws Divergence if |w| exceeds 1e6 at any iterate.
Vec lmc(const SpdMatrix& gram, std::span<const double> target,
        std::span<const double> w0, double step_size, int iterations,
        double temperature, RngStream& rng);

// Exact law of the lmc iterate after `iterations` steps: with
// A = I - 2 * step_size * gram the mean is A^N w0 + (I - A^N) ridge and the
// covariance is temperature * (I - A^{2N}) gram^{-1} (I + A)^{-1}. Used as a
// reference law in tests, never inside planning. Throws StepTooLarge when A
// is not positive definite.
struct GaussianLaw {
  Vec mean;
  SpdMatrix covariance;
};
GaussianLaw lmc_closed_form(const SpdMatrix& gram, std::span<const double> target,
                            std::span<const double> w0, double step_size,
                            long iterations, double temperature);

struct LmcParams {
  double c_eta = 0.5;      // step_size = c_eta / max eigenvalue of the Gram
  double step_size = 0.0;  // explicit step size when positive
  int iterations = 40;
  double temperature = 0.02;
  int chains = 2;
  bool warm_start = true;
};

// Langevin planner: per step, `chains` LMC runs replace exact posterior
// sampling; chains warm-start from the previous episode's weights when
// available. The statistics are expected to be built with sigma = 1.
Policy lpsvi_plan(const StepStatistics& stats, const LinearMDP& mdp,
                  const LmcParams& params, const StreamFactory& rng,
                  const Policy* previous = nullptr);

// Optimistic baseline: ridge solution plus beta * |phi|_{gram^{-1}} bonus.
// The statistics are expected to be built with sigma = 1. The second form
// takes one beta per step.
Policy ucbvi_plan(const StepStatistics& stats, const LinearMDP& mdp, double beta);
Policy ucbvi_plan(const StepStatistics& stats, const LinearMDP& mdp,
                  std::span<const double> beta_per_step);

}  // namespace delayrl
