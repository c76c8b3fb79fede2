#include "delayrl/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "delayrl/policy.hpp"

namespace delayrl {

void ExperimentConfig::validate() const {
  if (episodes < 1) throw std::invalid_argument("config: episodes must be positive");
  if (horizon < 1) throw std::invalid_argument("config: horizon must be positive");
  if (seeds.empty()) throw std::invalid_argument("config: need at least one seed");
  if (!(lambda > 0.0)) throw std::invalid_argument("config: lambda must be positive");
  if (agent.ensemble_size < 1)
    throw std::invalid_argument("config: ensemble size must be positive");
  if (agent.kind == AgentKind::Psvi && !(agent.sigma > 0.0))
    throw std::invalid_argument("config: sigma must be positive");
  delay.validate();
}

LinearMDP build_environment(const ExperimentConfig& config) {
  if (config.env.kind == EnvKind::RiverSwim) return build_riverswim_mdp(config.horizon);
  std::vector<int> alpha = config.env.alpha_bits;
  if (alpha.empty()) {
    RngStream bits(derive_seed(config.env.alpha_seed, "alpha"));
    alpha.resize(config.horizon);
    for (int h = 0; h < config.horizon; ++h) alpha[h] = bits.uniform01() < 0.5 ? 0 : 1;
  }
  return build_synthetic_mdp(config.env.num_actions, config.horizon, config.env.r,
                             alpha, config.env.reward_mode);
}

namespace {

Policy plan_episode(const ExperimentConfig& config, const StepStatistics& stats,
                    const LinearMDP& mdp, long episode, const StreamFactory& seed_rng,
                    const Policy* previous) {
  const AgentConfig& agent = config.agent;
  const StreamFactory plan_rng = seed_rng.fork("plan", static_cast<std::uint64_t>(episode));
  switch (agent.kind) {
    case AgentKind::Psvi: {
      const double nu = agent.nu.value_or(std::sqrt(mdp.dim()) * config.horizon);
      return psvi_plan(stats, mdp, nu, agent.ensemble_size, plan_rng);
    }
    case AgentKind::Lpsvi: {
      LmcParams params;
      params.c_eta = agent.c_eta;
      params.iterations = agent.iterations;
      params.temperature = agent.temperature;
      params.chains = agent.ensemble_size;
      params.warm_start = agent.warm_start;
      return lpsvi_plan(stats, mdp, params, plan_rng, previous);
    }
    case AgentKind::Ucbvi: {
      const double d = mdp.dim();
      const double H = config.horizon;
      if (agent.bonus_rule == BonusRule::Fixed) {
        const double beta =
            agent.beta.value_or(0.5 * agent.c_beta * d * H * std::sqrt(std::log(d * H)));
        return ucbvi_plan(stats, mdp, beta);
      }
      Vec betas(config.horizon);
      for (int h = 0; h < config.horizon; ++h)
        betas[h] = 0.5 * agent.c_beta * d * std::sqrt(static_cast<double>(episode)) *
                   (H - 1.0 - h);
      return ucbvi_plan(stats, mdp, betas);
    }
  }
  throw std::logic_error("plan_episode: unknown agent kind");
}

}  // namespace

std::vector<MetricsRow> run_experiment(const ExperimentConfig& config,
                                       const EpisodeInspector& inspect) {
  config.validate();
  const LinearMDP mdp = build_environment(config);
  const ValueTable optimal = exact_optimal_values(mdp);
  const double optimal_value = optimal.v[0][mdp.initial_state()];
  const double sigma = config.agent.kind == AgentKind::Psvi ? config.agent.sigma : 1.0;

  std::vector<MetricsRow> rows;
  rows.reserve(config.seeds.size() * static_cast<size_t>(config.episodes));
  for (const std::uint64_t seed : config.seeds) {
    const StreamFactory seed_rng{derive_seed(seed, "experiment")};
    StepStatistics stats(mdp, sigma, config.lambda);
    DelayedFeedbackBuffer buffer;
    std::optional<Policy> previous;
    double cum_regret = 0.0;
    for (long k = 1; k <= config.episodes; ++k) {
      const std::vector<Trajectory> arrivals = buffer.release_arrivals(k);
      stats.ingest_arrivals(arrivals);
      Policy policy = plan_episode(config, stats, mdp, k, seed_rng,
                                   previous ? &*previous : nullptr);
      if (inspect) inspect(EpisodeView{seed, k, mdp, stats, policy, arrivals});

      RngStream rollout_rng = seed_rng.stream("rollout", static_cast<std::uint64_t>(k));
      Trajectory traj = rollout(mdp, policy, rollout_rng, k);
      stats.observe_shadow(traj);

      const double policy_value = evaluate_policy(mdp, policy);
      const double regret = optimal_value - policy_value;
      cum_regret += regret;

      RngStream delay_rng = seed_rng.stream("delay", static_cast<std::uint64_t>(k));
      const long delay = sample_delay(config.delay, delay_rng);
      const double realized = traj.total_return();
      buffer.push_trajectory(std::move(traj), delay);

      rows.push_back({seed, k, realized, policy_value, regret, cum_regret, delay,
                      static_cast<long>(arrivals.size())});
      previous = std::move(policy);
    }
  }
  return rows;
}

TheoreticalParams theoretical_params(double delta, int horizon, long episodes, int dim) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw InvalidDelta("theoretical_params: delta must lie strictly in (0, 1)");
  if (horizon < 1 || episodes < 1 || dim < 1)
    throw std::invalid_argument("theoretical_params: sizes must be positive");
  TheoreticalParams out;
  const double ratio = 4.0 * static_cast<double>(horizon) *
                       static_cast<double>(episodes) / delta;
  out.ensemble_size = static_cast<long>(std::ceil(std::log(ratio) / std::log(64.0 / 63.0)));
  out.note = "ensemble size for failure probability " + std::to_string(delta) +
             " at dim " + std::to_string(dim) +
             "; the matching noise scale depends on unpublished proof constants";
  return out;
}

std::string format_metrics(std::span<const MetricsRow> rows) {
  std::string out = "seed,episode,return,policy_value,regret,cum_regret,delay,arrivals\n";
  char buf[256];
  for (const MetricsRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%llu,%ld,%#.6g,%#.6g,%#.6g,%#.6g,%ld,%ld\n",
                  static_cast<unsigned long long>(r.seed), r.episode, r.realized_return,
                  r.policy_value, r.regret, r.cum_regret, r.delay, r.arrivals);
    out += buf;
  }
  return out;
}

void write_metrics(std::span<const MetricsRow> rows, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("write_metrics: cannot open " + path);
  const std::string text = format_metrics(rows);
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw IoError("write_metrics: failed writing " + path);
}

namespace {

using nlohmann::json;

RewardMode parse_reward_mode(const std::string& name) {
  if (name == "feature") return RewardMode::Feature;
  if (name == "tabular") return RewardMode::Tabular;
  throw std::invalid_argument("config: unknown reward mode '" + name + "'");
}

BonusRule parse_bonus_rule(const std::string& name) {
  if (name == "fixed") return BonusRule::Fixed;
  if (name == "per_step") return BonusRule::PerStep;
  throw std::invalid_argument("config: unknown bonus rule '" + name + "'");
}

DelayDistribution delay_from_json(const json& j) {
  const std::string kind = j.value("kind", "constant");
  if (kind == "constant")
    return DelayDistribution::constant(j.value("value", 0L));
  if (kind == "multinomial")
    return DelayDistribution::multinomial(j.at("values").get<std::vector<long>>(),
                                          j.at("probs").get<std::vector<double>>());
  if (kind == "poisson") return DelayDistribution::poisson(j.at("mean").get<double>());
  if (kind == "pareto")
    return DelayDistribution::pareto(j.at("shape").get<double>(),
                                     j.at("scale").get<double>());
  throw std::invalid_argument("config: unknown delay kind '" + kind + "'");
}

}  // namespace

EnvKind parse_env_kind(const std::string& name) {
  if (name == "synthetic") return EnvKind::Synthetic;
  if (name == "riverswim") return EnvKind::RiverSwim;
  throw std::invalid_argument("config: unknown environment '" + name + "'");
}

AgentKind parse_agent_kind(const std::string& name) {
  if (name == "psvi") return AgentKind::Psvi;
  if (name == "lpsvi") return AgentKind::Lpsvi;
  if (name == "ucbvi") return AgentKind::Ucbvi;
  throw std::invalid_argument("config: unknown agent '" + name + "'");
}

ExperimentConfig parse_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  ExperimentConfig config;
  if (j.contains("env")) {
    const json& e = j.at("env");
    config.env.kind = parse_env_kind(e.value("kind", "synthetic"));
    config.env.num_actions = e.value("num_actions", config.env.num_actions);
    config.env.r = e.value("r", config.env.r);
    config.env.alpha_seed = e.value("alpha_seed", config.env.alpha_seed);
    if (e.contains("alpha_bits"))
      config.env.alpha_bits = e.at("alpha_bits").get<std::vector<int>>();
    config.env.reward_mode = parse_reward_mode(e.value("reward_mode", "feature"));
  }
  if (j.contains("agent")) {
    const json& a = j.at("agent");
    config.agent.kind = parse_agent_kind(a.value("kind", "psvi"));
    config.agent.ensemble_size = a.value("ensemble_size", config.agent.ensemble_size);
    config.agent.sigma = a.value("sigma", config.agent.sigma);
    if (a.contains("nu")) config.agent.nu = a.at("nu").get<double>();
    config.agent.c_eta = a.value("c_eta", config.agent.c_eta);
    config.agent.iterations = a.value("iterations", config.agent.iterations);
    config.agent.temperature = a.value("temperature", config.agent.temperature);
    config.agent.warm_start = a.value("warm_start", config.agent.warm_start);
    config.agent.c_beta = a.value("c_beta", config.agent.c_beta);
    if (a.contains("beta")) config.agent.beta = a.at("beta").get<double>();
    config.agent.bonus_rule = parse_bonus_rule(a.value("bonus_rule", "fixed"));
  }
  if (j.contains("delay")) config.delay = delay_from_json(j.at("delay"));
  config.episodes = j.value("episodes", config.episodes);
  config.horizon = j.value("horizon", config.horizon);
  if (j.contains("seeds")) config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  config.lambda = j.value("lambda", config.lambda);
  config.out = j.value("out", config.out);
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("load_config: cannot open " + path);
  std::ostringstream text;
  text << file.rdbuf();
  return parse_config(text.str());
}

DelayDistribution parse_delay_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream stream(spec);
  while (std::getline(stream, part, ':')) parts.push_back(part);
  if (parts.empty()) throw std::invalid_argument("delay spec: empty");

  auto split_list = [](const std::string& text) {
    std::vector<double> values;
    std::string item;
    std::istringstream s(text);
    while (std::getline(s, item, ',')) values.push_back(std::stod(item));
    return values;
  };

  const std::string& kind = parts[0];
  if (kind == "constant") {
    if (parts.size() != 2) throw std::invalid_argument("delay spec: constant:VALUE");
    return DelayDistribution::constant(std::stol(parts[1]));
  }
  if (kind == "multinomial") {
    if (parts.size() != 3)
      throw std::invalid_argument("delay spec: multinomial:V1,V2,..:P1,P2,..");
    std::vector<long> values;
    for (double v : split_list(parts[1])) values.push_back(static_cast<long>(v));
    return DelayDistribution::multinomial(std::move(values), split_list(parts[2]));
  }
  if (kind == "poisson") {
    if (parts.size() != 2) throw std::invalid_argument("delay spec: poisson:MEAN");
    return DelayDistribution::poisson(std::stod(parts[1]));
  }
  if (kind == "pareto") {
    if (parts.size() != 3) throw std::invalid_argument("delay spec: pareto:SHAPE:SCALE");
    return DelayDistribution::pareto(std::stod(parts[1]), std::stod(parts[2]));
  }
  throw std::invalid_argument("delay spec: unknown kind '" + kind + "'");
}

}  // namespace delayrl
