#include "delayrl/environment.hpp"

#include <algorithm>
#include <cmath>

#include "delayrl/policy.hpp"

namespace delayrl {

LinearMDP::LinearMDP(int num_states, int num_actions, int horizon,
                     std::vector<Vec> features, std::vector<Vec> reward_weights,
                     std::vector<std::vector<Vec>> transition_measures,
                     int initial_state)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      initial_state_(initial_state),
      features_(std::move(features)),
      reward_weights_(std::move(reward_weights)),
      transition_measures_(std::move(transition_measures)) {
  if (num_states_ < 1 || num_actions_ < 1 || horizon_ < 1)
    throw std::invalid_argument("LinearMDP: sizes must be positive");
  if (features_.size() != static_cast<size_t>(num_states_) * num_actions_)
    throw std::invalid_argument("LinearMDP: need one feature vector per (s, a)");
  dim_ = static_cast<int>(features_.front().size());
  if (initial_state_ < 0 || initial_state_ >= num_states_)
    throw std::invalid_argument("LinearMDP: initial state out of range");
  validate();
}

void LinearMDP::validate() const {
  for (const auto& f : features_)
    if (static_cast<int>(f.size()) != dim_)
      throw std::invalid_argument("LinearMDP: inconsistent feature dimension");
  if (reward_weights_.size() != static_cast<size_t>(horizon_) ||
      transition_measures_.size() != static_cast<size_t>(horizon_))
    throw std::invalid_argument("LinearMDP: need weights and measures for every step");
  for (int h = 0; h < horizon_; ++h) {
    if (static_cast<int>(reward_weights_[h].size()) != dim_)
      throw std::invalid_argument("LinearMDP: reward weight dimension mismatch");
    if (static_cast<int>(transition_measures_[h].size()) != num_states_)
      throw std::invalid_argument("LinearMDP: need a measure per next state");
    for (const auto& mu : transition_measures_[h])
      if (static_cast<int>(mu.size()) != dim_)
        throw std::invalid_argument("LinearMDP: measure dimension mismatch");
  }
  // Probability rows must be rows of a stochastic matrix up to tolerance.
  for (int h = 0; h < horizon_; ++h)
    for (int s = 0; s < num_states_; ++s)
      for (int a = 0; a < num_actions_; ++a) {
        std::span<const double> phi = features(s, a);
        double sum = 0.0;
        for (int t = 0; t < num_states_; ++t) {
          double p = 0.0;
          const Vec& mu = transition_measures_[h][t];
          for (int i = 0; i < dim_; ++i) p += phi[i] * mu[i];
          if (p < -1e-12 || p > 1.0 + 1e-12)
            throw std::invalid_argument("LinearMDP: transition probability out of range");
          sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9)
          throw std::invalid_argument("LinearMDP: transition row does not sum to one");
      }
}

void LinearMDP::check_indices(int h, int s, int a) const {
  if (h < 0 || h >= horizon_ || s < 0 || s >= num_states_ || a < 0 || a >= num_actions_)
    throw IndexOutOfRange("LinearMDP: index (h=" + std::to_string(h) + ", s=" +
                          std::to_string(s) + ", a=" + std::to_string(a) +
                          ") out of range");
}

std::span<const double> LinearMDP::features(int s, int a) const {
  if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_)
    throw IndexOutOfRange("LinearMDP: state-action (" + std::to_string(s) + ", " +
                          std::to_string(a) + ") out of range");
  return features_[static_cast<size_t>(s) * num_actions_ + a];
}

double LinearMDP::reward(int h, int s, int a) const {
  check_indices(h, s, a);
  if (!reward_override_.empty())
    return reward_override_[static_cast<size_t>(s) * num_actions_ + a];
  std::span<const double> phi = features(s, a);
  const Vec& theta = reward_weights_[h];
  double r = 0.0;
  for (int i = 0; i < dim_; ++i) r += phi[i] * theta[i];
  return r;
}

Vec LinearMDP::transition_probs(int h, int s, int a) const {
  check_indices(h, s, a);
  std::span<const double> phi = features(s, a);
  Vec probs(num_states_, 0.0);
  for (int t = 0; t < num_states_; ++t) {
    const Vec& mu = transition_measures_[h][t];
    double p = 0.0;
    for (int i = 0; i < dim_; ++i) p += phi[i] * mu[i];
    probs[t] = std::clamp(p, 0.0, 1.0);
  }
  return probs;
}

void LinearMDP::override_rewards(std::vector<double> table) {
  if (table.size() != static_cast<size_t>(num_states_) * num_actions_)
    throw std::invalid_argument("override_rewards: need one entry per (s, a)");
  reward_override_ = std::move(table);
}

LinearMDP build_synthetic_mdp(int num_actions, int horizon, double r,
                              const std::vector<int>& alpha, RewardMode mode) {
  if (num_actions > 256)
    throw TooManyActions("build_synthetic_mdp: at most 256 actions fit the 8-bit code");
  if (num_actions < 1) throw std::invalid_argument("build_synthetic_mdp: need actions");
  if (static_cast<int>(alpha.size()) != horizon)
    throw std::invalid_argument("build_synthetic_mdp: need one alpha bit per step");
  for (int bit : alpha)
    if (bit != 0 && bit != 1)
      throw std::invalid_argument("build_synthetic_mdp: alpha entries must be bits");
  if (r < 0.0 || r > 1.0)
    throw std::invalid_argument("build_synthetic_mdp: r must lie in [0, 1]");

  const int num_states = 2;
  const int dim = 10;
  std::vector<Vec> features;
  features.reserve(static_cast<size_t>(num_states) * num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) {
      Vec phi(dim, 0.0);
      for (int i = 0; i < 8; ++i) phi[i] = static_cast<double>((a >> i) & 1);
      const double match = ((s == 0) == (a == 0)) ? 1.0 : 0.0;
      phi[8] = match;
      phi[9] = 1.0 - match;
      features.push_back(std::move(phi));
    }

  std::vector<Vec> reward_weights(horizon, Vec(dim, 0.0));
  for (int h = 0; h < horizon; ++h) {
    reward_weights[h][8] = r;
    reward_weights[h][9] = 1.0 - r;
  }

  std::vector<std::vector<Vec>> measures(horizon, std::vector<Vec>(num_states, Vec(dim, 0.0)));
  for (int h = 0; h < horizon; ++h)
    for (int t = 0; t < num_states; ++t) {
      // On a matching action the next state is alpha[h]; otherwise its flip.
      measures[h][t][8] = static_cast<double>((1 - t) ^ alpha[h]);
      measures[h][t][9] = static_cast<double>(t ^ alpha[h]);
    }

  LinearMDP mdp(num_states, num_actions, horizon, std::move(features),
                std::move(reward_weights), std::move(measures), 0);
  if (mode == RewardMode::Tabular) {
    std::vector<double> table(static_cast<size_t>(num_states) * num_actions, 1.0 - r);
    table[0] = r;  // only (s=0, a=0) pays the large reward
    mdp.override_rewards(std::move(table));
  }
  return mdp;
}

LinearMDP build_riverswim_mdp(int horizon) {
  const int num_states = 5;
  const int num_actions = 2;
  const int dim = 10;

  std::vector<Vec> features(static_cast<size_t>(num_states) * num_actions, Vec(dim, 0.0));
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a)
      features[static_cast<size_t>(s) * num_actions + a][s * num_actions + a] = 1.0;

  Vec theta(dim, 0.0);
  theta[0 * num_actions + 0] = 0.005;  // paddling back to shore
  theta[4 * num_actions + 1] = 1.0;    // swimming at the far end
  std::vector<Vec> reward_weights(horizon, theta);

  // P(s' | s, a) as a table; one-hot features turn each column into a measure.
  std::vector<std::vector<double>> table(static_cast<size_t>(num_states) * num_actions,
                                         std::vector<double>(num_states, 0.0));
  for (int s = 0; s < num_states; ++s) {
    table[static_cast<size_t>(s) * num_actions + 0][std::max(s - 1, 0)] = 1.0;
    auto& right = table[static_cast<size_t>(s) * num_actions + 1];
    if (s == 0) {
      right[1] = 0.3;
      right[0] = 0.7;
    } else if (s == 4) {
      right[4] = 0.6;
      right[3] = 0.4;
    } else {
      right[s + 1] = 0.3;
      right[s] = 0.6;
      right[s - 1] = 0.1;
    }
  }
  std::vector<Vec> measures_one(num_states, Vec(dim, 0.0));
  for (int t = 0; t < num_states; ++t)
    for (int s = 0; s < num_states; ++s)
      for (int a = 0; a < num_actions; ++a)
        measures_one[t][s * num_actions + a] = table[static_cast<size_t>(s) * num_actions + a][t];
  std::vector<std::vector<Vec>> measures(horizon, measures_one);

  return LinearMDP(num_states, num_actions, horizon, std::move(features),
                   std::move(reward_weights), std::move(measures), 0);
}

ValueTable exact_optimal_values(const LinearMDP& mdp) {
  const int H = mdp.horizon();
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  ValueTable table;
  table.v.assign(H + 1, Vec(S, 0.0));
  table.q.assign(H, std::vector<Vec>(S, Vec(A, 0.0)));
  for (int h = H - 1; h >= 0; --h)
    for (int s = 0; s < S; ++s) {
      double best = 0.0;
      for (int a = 0; a < A; ++a) {
        double q = mdp.reward(h, s, a);
        const Vec probs = mdp.transition_probs(h, s, a);
        for (int t = 0; t < S; ++t) q += probs[t] * table.v[h + 1][t];
        table.q[h][s][a] = q;
        if (a == 0 || q > best) best = q;
      }
      table.v[h][s] = best;
    }
  return table;
}

int DecisionRule::sample_action(int h, int s, RngStream& rng) const {
  std::vector<double> probs(num_actions(), 0.0);
  action_probs(h, s, probs);
  const double u = rng.uniform01();
  double cum = 0.0;
  int last = 0;
  for (size_t a = 0; a < probs.size(); ++a) {
    if (probs[a] <= 0.0) continue;
    cum += probs[a];
    last = static_cast<int>(a);
    if (u <= cum) return last;
  }
  return last;
}

Trajectory rollout(const LinearMDP& mdp, const DecisionRule& policy, RngStream& rng,
                   long origin_episode) {
  Trajectory traj;
  traj.origin_episode = origin_episode;
  traj.steps.reserve(mdp.horizon());
  int s = mdp.initial_state();
  for (int h = 0; h < mdp.horizon(); ++h) {
    const int a = policy.sample_action(h, s, rng);
    const Vec probs = mdp.transition_probs(h, s, a);
    const double u = rng.uniform01();
    double cum = 0.0;
    int next = mdp.num_states() - 1;
    for (int t = 0; t < mdp.num_states(); ++t) {
      cum += probs[t];
      if (u <= cum) {
        next = t;
        break;
      }
    }
    traj.steps.push_back({s, a, mdp.reward(h, s, a), next});
    s = next;
  }
  return traj;
}

double evaluate_policy(const LinearMDP& mdp, const DecisionRule& policy) {
  const int H = mdp.horizon();
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  if (policy.num_actions() != A)
    throw DimensionMismatch("evaluate_policy: policy and MDP disagree on actions");
  Vec v(S, 0.0);
  std::vector<double> probs(A);
  for (int h = H - 1; h >= 0; --h) {
    Vec next(S, 0.0);
    for (int s = 0; s < S; ++s) {
      policy.action_probs(h, s, probs);
      double value = 0.0;
      for (int a = 0; a < A; ++a) {
        if (probs[a] == 0.0) continue;
        double q = mdp.reward(h, s, a);
        const Vec p = mdp.transition_probs(h, s, a);
        for (int t = 0; t < S; ++t) q += p[t] * v[t];
        value += probs[a] * q;
      }
      next[s] = value;
    }
    v = std::move(next);
  }
  return v[mdp.initial_state()];
}

}  // namespace delayrl
