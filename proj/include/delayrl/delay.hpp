#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "delayrl/environment.hpp"
#include "delayrl/rng.hpp"

namespace delayrl {

struct NonMonotoneEpisode : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DelayKind { Constant, Multinomial, Poisson, Pareto };

// Distribution of the feedback delay attached to each episode. Pareto is the
// heavy-tailed Lomax variant discretized by flooring.
struct DelayDistribution {
  DelayKind kind = DelayKind::Constant;
  long constant_value = 0;
  std::vector<long> values;   // multinomial support
  std::vector<double> probs;  // multinomial weights
  double mean = 0.0;          // poisson
  double shape = 1.0;         // pareto
  double scale = 1.0;         // pareto

  static DelayDistribution constant(long value);
  static DelayDistribution multinomial(std::vector<long> values, std::vector<double> probs);
  static DelayDistribution poisson(double mean);
  static DelayDistribution pareto(double shape, double scale);

  void validate() const;
};

long sample_delay(const DelayDistribution& dist, RngStream& rng);

// Holds finished episodes until their delay expires. An episode generated at
// episode k with delay tau becomes usable at the start of episode k + tau + 1.
class DelayedFeedbackBuffer {
 public:
  // traj.origin_episode must be stamped; delay must be nonnegative.
  void push_trajectory(Trajectory traj, long delay);

  // All trajectories usable when planning `episode` (available_from <=
  // episode), ordered by origin episode. Each trajectory is returned exactly
  // once; calls must use strictly increasing episode indices.
  std::vector<Trajectory> release_arrivals(long episode);

  size_t pending_count() const { return pending_total_; }
  size_t pushed_count() const { return pushed_; }

 private:
  std::map<long, std::vector<Trajectory>> pending_;  // available_from -> batch
  size_t pending_total_ = 0;
  size_t pushed_ = 0;
  long last_release_episode_ = 0;
  bool released_once_ = false;
};

}  // namespace delayrl
