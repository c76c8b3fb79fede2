#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delayrl/agents.hpp"
#include "delayrl/delay.hpp"
#include "delayrl/environment.hpp"

namespace delayrl {

struct InvalidDelta : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EnvKind { Synthetic, RiverSwim };
enum class AgentKind { Psvi, Lpsvi, Ucbvi };

// How the optimistic baseline scales its bonus: a single coefficient
// (c_beta / 2) * d * H * sqrt(log(d * H)) shared by every step and episode,
// or (c_beta / 2) * d * sqrt(episode) * (steps remaining after h).
enum class BonusRule { Fixed, PerStep };

struct EnvConfig {
  EnvKind kind = EnvKind::Synthetic;
  int num_actions = 20;                // synthetic
  double r = 0.99;                     // synthetic
  std::uint64_t alpha_seed = 1;        // synthetic: seeds the per-step flip bits
  std::vector<int> alpha_bits;         // synthetic: explicit bits override the seed
  RewardMode reward_mode = RewardMode::Feature;  // synthetic
};

struct AgentConfig {
  AgentKind kind = AgentKind::Psvi;
  int ensemble_size = 2;      // posterior samples (psvi) or chains (lpsvi)
  double sigma = 1.0;         // psvi noise scale; the others run at sigma = 1
  std::optional<double> nu;   // psvi; defaults to sqrt(dim) * horizon
  double c_eta = 0.5;         // lpsvi step-size rule
  int iterations = 40;        // lpsvi
  double temperature = 0.02;  // lpsvi
  bool warm_start = true;     // lpsvi
  double c_beta = 0.1;        // ucbvi
  std::optional<double> beta;  // ucbvi explicit fixed bonus coefficient
  BonusRule bonus_rule = BonusRule::Fixed;
};

struct ExperimentConfig {
  EnvConfig env;
  AgentConfig agent;
  DelayDistribution delay;  // defaults to constant 0
  long episodes = 1000;
  int horizon = 20;
  std::vector<std::uint64_t> seeds{0};
  double lambda = 1.0;
  std::string out = "metrics.csv";

  void validate() const;
};

struct MetricsRow {
  std::uint64_t seed = 0;
  long episode = 0;  // 1-based
  double realized_return = 0.0;
  double policy_value = 0.0;
  double regret = 0.0;
  double cum_regret = 0.0;
  long delay = 0;
  long arrivals = 0;
};

// Snapshot handed to an optional per-episode observer immediately after
// planning (before the episode is played), so the statistics reflect exactly
// what the planner saw.
struct EpisodeView {
  std::uint64_t seed;
  long episode;  // 1-based
  const LinearMDP& mdp;
  const StepStatistics& stats;
  const Policy& policy;
  const std::vector<Trajectory>& arrivals;
};
using EpisodeInspector = std::function<void(const EpisodeView&)>;

// The environment a config describes; identical across seeds.
LinearMDP build_environment(const ExperimentConfig& config);

// Runs every configured seed sequentially: per episode, release and ingest
// matured feedback, plan, play, score against the exact optimal value, then
// enqueue the episode with a sampled delay. Rows come back ordered by seed
// then episode. All randomness is drawn from named substreams of the seed,
// so results are reproducible bit for bit.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& config,
                                       const EpisodeInspector& inspect = {});

// Ensemble size the regret analysis asks for at failure probability delta,
// ceil(log(4 * horizon * episodes / delta) / log(64 / 63)), with a note on
// what it leaves unpinned. Practical runs use far smaller ensembles.
struct TheoreticalParams {
  long ensemble_size = 0;
  std::string note;
};
TheoreticalParams theoretical_params(double delta, int horizon, long episodes,
                                     int dim = 10);

// CSV with a fixed header; reals carry six significant digits.
std::string format_metrics(std::span<const MetricsRow> rows);
void write_metrics(std::span<const MetricsRow> rows, const std::string& path);

// JSON config file; every field is optional and falls back to the defaults
// above. parse_config takes the raw text (used by tests), load_config a path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Compact CLI delay spec: "constant:5", "multinomial:10,20,30:0.5,0.3,0.2",
// "poisson:50", "pareto:1.0:500".
DelayDistribution parse_delay_spec(const std::string& spec);

EnvKind parse_env_kind(const std::string& name);
AgentKind parse_agent_kind(const std::string& name);

}  // namespace delayrl
