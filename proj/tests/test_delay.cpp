#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "delayrl/delay.hpp"

using namespace delayrl;

namespace {

Trajectory stub_trajectory(long origin) {
  Trajectory t;
  t.origin_episode = origin;
  t.steps.push_back({0, 0, 0.0, 0});
  return t;
}

}  // namespace

TEST_CASE("constant delays are constant") {
  const DelayDistribution dist = DelayDistribution::constant(7);
  RngStream rng(1);
  for (int i = 0; i < 100; ++i) CHECK(sample_delay(dist, rng) == 7);
  CHECK_THROWS_AS(DelayDistribution::constant(-1), std::invalid_argument);
}

TEST_CASE("multinomial delays recover their weights") {
  const DelayDistribution dist =
      DelayDistribution::multinomial({10, 20, 30}, {0.5, 0.3, 0.2});
  RngStream rng(9);
  std::map<long, long> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample_delay(dist, rng)];
  CHECK(counts.size() == 3);
  CHECK(std::fabs(counts[10] / double(n) - 0.5) < 0.01);
  CHECK(std::fabs(counts[20] / double(n) - 0.3) < 0.01);
  CHECK(std::fabs(counts[30] / double(n) - 0.2) < 0.01);

  CHECK_THROWS_AS(DelayDistribution::multinomial({1, 2}, {0.5, 0.4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DelayDistribution::multinomial({1}, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DelayDistribution::multinomial({-1}, {1.0}), std::invalid_argument);
}

TEST_CASE("poisson delays recover their mean") {
  const double mean = 50.0;
  const DelayDistribution dist = DelayDistribution::poisson(mean);
  RngStream rng(17);
  const int n = 10000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const long d = sample_delay(dist, rng);
    CHECK(d >= 0);
    sum += static_cast<double>(d);
  }
  CHECK(std::fabs(sum / n - mean) <= 3.0 * std::sqrt(mean / n) * std::sqrt(mean));
}

TEST_CASE("heavy-tailed delays have the configured median") {
  // Floor of scale * (U^{-1/shape} - 1) has median scale * (2^{1/shape} - 1);
  // with shape 1 and scale 500 that is 500.
  const DelayDistribution dist = DelayDistribution::pareto(1.0, 500.0);
  RngStream rng(23);
  const int n = 100000;
  std::vector<long> draws(n);
  for (int i = 0; i < n; ++i) {
    draws[i] = sample_delay(dist, rng);
    CHECK(draws[i] >= 0);
  }
  std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
  const long median = draws[n / 2];
  CHECK(std::labs(median - 500) <= 25);

  CHECK_THROWS_AS(DelayDistribution::pareto(0.0, 500.0), std::invalid_argument);
  CHECK_THROWS_AS(DelayDistribution::pareto(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("push and release follow origin + delay + 1") {
  DelayedFeedbackBuffer buffer;
  buffer.push_trajectory(stub_trajectory(3), 2);  // usable from episode 6
  buffer.push_trajectory(stub_trajectory(7), 0);  // usable from episode 8
  CHECK(buffer.pending_count() == 2);

  CHECK(buffer.release_arrivals(5).empty());
  const auto at6 = buffer.release_arrivals(6);
  REQUIRE(at6.size() == 1);
  CHECK(at6[0].origin_episode == 3);
  CHECK(buffer.release_arrivals(7).empty());
  const auto at8 = buffer.release_arrivals(8);
  REQUIRE(at8.size() == 1);
  CHECK(at8[0].origin_episode == 7);
  CHECK(buffer.pending_count() == 0);
  CHECK(buffer.pushed_count() == 2);
}

TEST_CASE("zero delay means available at the next episode") {
  DelayedFeedbackBuffer buffer;
  for (long k = 1; k <= 20; ++k) {
    const auto arrivals = buffer.release_arrivals(k);
    if (k == 1) {
      CHECK(arrivals.empty());
    } else {
      REQUIRE(arrivals.size() == 1);
      CHECK(arrivals[0].origin_episode == k - 1);
    }
    buffer.push_trajectory(stub_trajectory(k), 0);
  }
}

TEST_CASE("constant delay five first arrives at episode seven") {
  DelayedFeedbackBuffer buffer;
  for (long k = 1; k <= 10; ++k) {
    const auto arrivals = buffer.release_arrivals(k);
    if (k < 7)
      CHECK(arrivals.empty());
    else {
      REQUIRE(arrivals.size() == 1);
      CHECK(arrivals[0].origin_episode == k - 6);
    }
    buffer.push_trajectory(stub_trajectory(k), 5);
  }
}

TEST_CASE("every trajectory is released exactly once, in origin order") {
  DelayedFeedbackBuffer buffer;
  RngStream rng(37);
  const DelayDistribution dist = DelayDistribution::poisson(10.0);
  const long pushes = 200;
  std::map<long, long> released_at;

  for (long k = 1; k <= 1000; ++k) {
    const auto arrivals = buffer.release_arrivals(k);
    for (size_t i = 0; i < arrivals.size(); ++i) {
      if (i > 0)
        CHECK(arrivals[i - 1].origin_episode < arrivals[i].origin_episode);
      CHECK(!released_at.contains(arrivals[i].origin_episode));
      released_at[arrivals[i].origin_episode] = k;
    }
    if (k <= pushes) {
      const long delay = sample_delay(dist, rng);
      buffer.push_trajectory(stub_trajectory(k), delay);
      // Strictly positive horizon until availability.
      CHECK(k + delay + 1 > k);
    }
  }
  CHECK(released_at.size() == static_cast<size_t>(pushes));
  CHECK(buffer.pending_count() == 0);
}

TEST_CASE("releases at a given episode match the availability rule exactly") {
  DelayedFeedbackBuffer buffer;
  RngStream rng(41);
  std::map<long, long> delays;
  for (long k = 1; k <= 100; ++k) {
    delays[k] = static_cast<long>(rng.uniform01() * 12.0);
    buffer.push_trajectory(stub_trajectory(k), delays[k]);
  }
  for (long k = 1; k <= 120; ++k) {
    const auto arrivals = buffer.release_arrivals(k);
    for (const auto& t : arrivals)
      CHECK(t.origin_episode + delays[t.origin_episode] + 1 == k);
  }
}

TEST_CASE("huge delays never arrive within the run") {
  DelayedFeedbackBuffer buffer;
  buffer.push_trajectory(stub_trajectory(1), 1000000);
  for (long k = 2; k <= 100; ++k) CHECK(buffer.release_arrivals(k).empty());
  CHECK(buffer.pending_count() == 1);
}

TEST_CASE("release episodes must increase strictly") {
  DelayedFeedbackBuffer buffer;
  buffer.release_arrivals(5);
  CHECK_THROWS_AS(buffer.release_arrivals(5), NonMonotoneEpisode);
  CHECK_THROWS_AS(buffer.release_arrivals(4), NonMonotoneEpisode);
  CHECK_NOTHROW(buffer.release_arrivals(6));
}

TEST_CASE("negative delays are rejected") {
  DelayedFeedbackBuffer buffer;
  CHECK_THROWS_AS(buffer.push_trajectory(stub_trajectory(1), -1), std::invalid_argument);
}
