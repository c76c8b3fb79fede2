#include "delayrl/delay.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace delayrl {

DelayDistribution DelayDistribution::constant(long value) {
  DelayDistribution d;
  d.kind = DelayKind::Constant;
  d.constant_value = value;
  d.validate();
  return d;
}

DelayDistribution DelayDistribution::multinomial(std::vector<long> values,
                                                 std::vector<double> probs) {
  DelayDistribution d;
  d.kind = DelayKind::Multinomial;
  d.values = std::move(values);
  d.probs = std::move(probs);
  d.validate();
  return d;
}

DelayDistribution DelayDistribution::poisson(double mean) {
  DelayDistribution d;
  d.kind = DelayKind::Poisson;
  d.mean = mean;
  d.validate();
  return d;
}

DelayDistribution DelayDistribution::pareto(double shape, double scale) {
  DelayDistribution d;
  d.kind = DelayKind::Pareto;
  d.shape = shape;
  d.scale = scale;
  d.validate();
  return d;
}

void DelayDistribution::validate() const {
  switch (kind) {
    case DelayKind::Constant:
      if (constant_value < 0)
        throw std::invalid_argument("delay: constant value must be nonnegative");
      break;
    case DelayKind::Multinomial: {
      if (values.empty() || values.size() != probs.size())
        throw std::invalid_argument("delay: multinomial needs matching values and probs");
      double sum = 0.0;
      for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0)
          throw std::invalid_argument("delay: multinomial values must be nonnegative");
        if (probs[i] < 0.0)
          throw std::invalid_argument("delay: multinomial probs must be nonnegative");
        sum += probs[i];
      }
      if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("delay: multinomial probs must sum to one");
      break;
    }
    case DelayKind::Poisson:
      if (!(mean >= 0.0))
        throw std::invalid_argument("delay: poisson mean must be nonnegative");
      break;
    case DelayKind::Pareto:
      if (!(shape > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("delay: pareto shape and scale must be positive");
      break;
  }
}

long sample_delay(const DelayDistribution& dist, RngStream& rng) {
  switch (dist.kind) {
    case DelayKind::Constant:
      return dist.constant_value;
    case DelayKind::Multinomial: {
      const double u = rng.uniform01();
      double cum = 0.0;
      for (size_t i = 0; i < dist.values.size(); ++i) {
        cum += dist.probs[i];
        if (u <= cum) return dist.values[i];
      }
      return dist.values.back();
    }
    case DelayKind::Poisson:
      return rng.poisson(dist.mean);
    case DelayKind::Pareto: {
      // Lomax draw scale * (U^{-1/shape} - 1), floored to an integer delay.
      const double u = rng.uniform01();
      const double raw = dist.scale * (std::pow(u, -1.0 / dist.shape) - 1.0);
      return static_cast<long>(std::floor(raw));
    }
  }
  throw std::logic_error("sample_delay: unknown kind");
}

void DelayedFeedbackBuffer::push_trajectory(Trajectory traj, long delay) {
  if (delay < 0) throw std::invalid_argument("push_trajectory: negative delay");
  const long available_from = traj.origin_episode + delay + 1;
  pending_[available_from].push_back(std::move(traj));
  ++pending_total_;
  ++pushed_;
}

std::vector<Trajectory> DelayedFeedbackBuffer::release_arrivals(long episode) {
  if (released_once_ && episode <= last_release_episode_)
    throw NonMonotoneEpisode("release_arrivals: episode " + std::to_string(episode) +
                             " not after " + std::to_string(last_release_episode_));
  released_once_ = true;
  last_release_episode_ = episode;

  std::vector<Trajectory> out;
  auto end = pending_.upper_bound(episode);
  for (auto it = pending_.begin(); it != end; ++it)
    for (auto& traj : it->second) out.push_back(std::move(traj));
  pending_.erase(pending_.begin(), end);
  pending_total_ -= out.size();
  std::sort(out.begin(), out.end(), [](const Trajectory& a, const Trajectory& b) {
    return a.origin_episode < b.origin_episode;
  });
  return out;
}

}  // namespace delayrl
