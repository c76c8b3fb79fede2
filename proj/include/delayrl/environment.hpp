#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "delayrl/numerics.hpp"
#include "delayrl/rng.hpp"

namespace delayrl {

struct TooManyActions : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One step of an executed episode.
struct Transition {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = 0;
};

// A full episode, stamped with the episode index that generated it.
struct Trajectory {
  long origin_episode = 0;
  std::vector<Transition> steps;

  double total_return() const {
    double sum = 0.0;
    for (const auto& t : steps) sum += t.reward;
    return sum;
  }
};

// Finite-horizon MDP with factored dynamics: transition probabilities are
// inner products feature(s,a) . measure_h(s') and mean rewards are
// feature(s,a) . reward_weight_h, optionally overridden by a tabular reward.
class LinearMDP {
 public:
  LinearMDP(int num_states, int num_actions, int horizon,
            std::vector<Vec> features,                       // (s * A + a) -> R^d
            std::vector<Vec> reward_weights,                 // per step -> R^d
            std::vector<std::vector<Vec>> transition_measures,  // per step, per s' -> R^d
            int initial_state = 0);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }
  int dim() const { return dim_; }
  int initial_state() const { return initial_state_; }

  std::span<const double> features(int s, int a) const;
  double reward(int h, int s, int a) const;

  // Probability row P_h(. | s, a), entries clamped into [0, 1].
  Vec transition_probs(int h, int s, int a) const;

  // Replaces the linear reward with an explicit per-(s, a) table, shared
  // across steps. Dynamics stay factored.
  void override_rewards(std::vector<double> table);

 private:
  void check_indices(int h, int s, int a) const;
  void validate() const;

  int num_states_;
  int num_actions_;
  int horizon_;
  int dim_;
  int initial_state_;
  std::vector<Vec> features_;
  std::vector<Vec> reward_weights_;
  std::vector<std::vector<Vec>> transition_measures_;
  std::vector<double> reward_override_;  // empty unless overridden
};

enum class RewardMode { Feature, Tabular };

// Two-state hard-exploration environment with 8-bit action codes.
// feature(s, a) = [bits(a), match(s, a), 1 - match(s, a)] in R^10 where
// match(s, a) = 1 iff (s == 0) == (a == 0). In Feature mode the reward is
// r * match + (1 - r) * (1 - match); Tabular mode pays r only at (s=0, a=0)
// and 1 - r elsewhere. Step h flips the next state by the bit alpha[h].
LinearMDP build_synthetic_mdp(int num_actions, int horizon, double r,
                              const std::vector<int>& alpha,
                              RewardMode mode = RewardMode::Feature);

// Five-state chain with two actions (0 = left, 1 = right) embedded with
// one-hot features of dimension 10; the only large reward sits at the far
// right end, a small consolation reward at the left end.
LinearMDP build_riverswim_mdp(int horizon);

// Optimal state and state-action values from exact backward induction.
// v[h] has one entry per state for h = 0..H (v[H] is the terminal zero row);
// q[h][s][a] for h = 0..H-1.
struct ValueTable {
  std::vector<Vec> v;
  std::vector<std::vector<Vec>> q;
};

ValueTable exact_optimal_values(const LinearMDP& mdp);

class DecisionRule;

// Plays one episode from the initial state, sampling next states with the
// given stream; records exact rewards.
Trajectory rollout(const LinearMDP& mdp, const DecisionRule& policy,
                   RngStream& rng, long origin_episode = 0);

// Exact value of the policy from the initial state (no simulation).
double evaluate_policy(const LinearMDP& mdp, const DecisionRule& policy);

}  // namespace delayrl
