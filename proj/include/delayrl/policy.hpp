#pragma once

#include <span>
#include <vector>

#include "delayrl/environment.hpp"
#include "delayrl/numerics.hpp"

namespace delayrl {

// Anything that can pick actions. Deterministic rules override sample_action
// to avoid consuming randomness; stochastic rules fill action_probs and use
// the default inverse-CDF sampler.
class DecisionRule {
 public:
  virtual ~DecisionRule() = default;
  virtual int num_actions() const = 0;
  virtual void action_probs(int h, int s, std::span<double> out) const = 0;
  virtual int sample_action(int h, int s, RngStream& rng) const;
};

// Greedy policy extracted by a planner. Holds, per step, either an ensemble
// of weight vectors (value estimate = max over the ensemble of feature . w)
// or a single weight vector with an exploration bonus beta * |feature|_{G^-1}
// computed from the Cholesky factor of the step's Gram matrix G.
class Policy : public DecisionRule {
 public:
  struct BonusStep {
    Vec w;
    double beta = 0.0;
    CholeskyFactor gram;
  };

  Policy(const LinearMDP& mdp, std::vector<std::vector<Vec>> ensembles);
  Policy(const LinearMDP& mdp, std::vector<BonusStep> bonus_steps);

  int horizon() const { return horizon_; }
  int num_actions() const override;

  // Raw value estimate before truncation.
  double q_value(int h, int s, int a) const;

  // Values are truncated at the number of remaining steps.
  double truncation(int h) const { return static_cast<double>(horizon_ - h); }

  // argmax over actions of min(q_value, truncation); ties take the lowest
  // action index.
  int act(int h, int s) const;

  void action_probs(int h, int s, std::span<double> out) const override;
  int sample_action(int h, int s, RngStream& rng) const override;

  // Ensemble weights for step h (planners use these to warm-start).
  const std::vector<Vec>& ensemble(int h) const { return ensembles_[h]; }
  bool has_ensembles() const { return !ensembles_.empty(); }

 private:
  const LinearMDP* mdp_;
  int horizon_;
  std::vector<std::vector<Vec>> ensembles_;
  std::vector<BonusStep> bonus_;
};

}  // namespace delayrl
