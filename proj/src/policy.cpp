#include "delayrl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace delayrl {

Policy::Policy(const LinearMDP& mdp, std::vector<std::vector<Vec>> ensembles)
    : mdp_(&mdp), horizon_(mdp.horizon()), ensembles_(std::move(ensembles)) {
  if (ensembles_.size() != static_cast<size_t>(horizon_))
    throw DimensionMismatch("Policy: need an ensemble per step");
  for (const auto& e : ensembles_)
    if (e.empty()) throw std::invalid_argument("Policy: empty ensemble");
}

Policy::Policy(const LinearMDP& mdp, std::vector<BonusStep> bonus_steps)
    : mdp_(&mdp), horizon_(mdp.horizon()), bonus_(std::move(bonus_steps)) {
  if (bonus_.size() != static_cast<size_t>(horizon_))
    throw DimensionMismatch("Policy: need a bonus step per step");
}

int Policy::num_actions() const { return mdp_->num_actions(); }

double Policy::q_value(int h, int s, int a) const {
  std::span<const double> phi = mdp_->features(s, a);
  if (!ensembles_.empty()) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec& w : ensembles_[h]) {
      double q = 0.0;
      for (size_t i = 0; i < phi.size(); ++i) q += phi[i] * w[i];
      best = std::max(best, q);
    }
    return best;
  }
  const BonusStep& step = bonus_[h];
  double q = 0.0;
  for (size_t i = 0; i < phi.size(); ++i) q += phi[i] * step.w[i];
  const Vec solved = solve_spd(step.gram, phi);
  double quad = 0.0;
  for (size_t i = 0; i < phi.size(); ++i) quad += phi[i] * solved[i];
  return q + step.beta * std::sqrt(std::max(quad, 0.0));
}

int Policy::act(int h, int s) const {
  const double cap = truncation(h);
  int best_action = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < mdp_->num_actions(); ++a) {
    const double value = std::min(q_value(h, s, a), cap);
    if (value > best) {
      best = value;
      best_action = a;
    }
  }
  return best_action;
}

void Policy::action_probs(int h, int s, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  out[act(h, s)] = 1.0;
}

int Policy::sample_action(int h, int s, RngStream&) const { return act(h, s); }

}  // namespace delayrl
