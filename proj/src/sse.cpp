#include "beamsweep/sse.hpp"

#include <algorithm>
#include <cmath>

namespace beamsweep {

PruningVector PruningVector::from_dec(int p_dec, int h_levels) {
  if (h_levels < 1) throw std::invalid_argument("PruningVector: h_levels must be >= 1");
  const int limit = 1 << (h_levels - 1);
  if (p_dec < 0 || p_dec >= limit) {
    throw std::invalid_argument("PruningVector: p_dec must be in [0, 2^(H-1))");
  }
  PruningVector p;
  p.bits_.resize(h_levels);
  for (int h = 1; h < h_levels; ++h) {
    p.bits_[h - 1] = static_cast<std::uint8_t>((p_dec >> (h_levels - 1 - h)) & 1);
  }
  p.bits_[h_levels - 1] = 1;
  return p;
}

PruningVector PruningVector::from_bits(const std::string& bits) {
  if (bits.empty()) throw std::invalid_argument("PruningVector: empty bit string");
  PruningVector p;
  p.bits_.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("PruningVector: bits must be 0/1");
    p.bits_.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  if (p.bits_.back() != 1) throw std::invalid_argument("PruningVector: p_H must be 1");
  return p;
}

int PruningVector::dec() const {
  int v = 0;
  for (int h = 1; h < h_levels(); ++h) v = (v << 1) | bits_[h - 1];
  return v;
}

std::string PruningVector::bit_string() const {
  std::string s;
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::vector<std::pair<int, int>> played_level_sizes(const PruningVector& p) {
  std::vector<std::pair<int, int>> out;
  int size = 1;  // |S_0| = 1 (the root)
  for (int h = 1; h <= p.h_levels(); ++h) {
    size *= 2;
    if (p.plays(h)) {
      out.emplace_back(h, size);
      size = 1;
    }
  }
  return out;
}

int total_arms(const PruningVector& p) {
  int n = 0;
  for (auto [h, s] : played_level_sizes(p)) n += s;
  return n;
}

double epsilon_at_level(double epsilon, double gain, int h_levels, int level) {
  if (level < 1 || level > h_levels) throw std::invalid_argument("epsilon_at_level: bad level");
  return std::pow(gain, -(h_levels - level)) * epsilon;
}

std::vector<Vertex> expand_contenders(const std::vector<Vertex>& prev_winners) {
  if (prev_winners.empty()) throw std::invalid_argument("expand_contenders: empty set");
  std::vector<Vertex> out;
  out.reserve(prev_winners.size() * 2);
  for (const Vertex& v : prev_winners) {
    out.push_back(v.left_child());
    out.push_back(v.right_child());
  }
  std::sort(out.begin(), out.end(),
            [](const Vertex& a, const Vertex& b) { return a.index < b.index; });
  return out;
}

double exploration_rate(long long t, double delta, int n_total) {
  if (t < 1) throw std::invalid_argument("exploration_rate: t must be >= 1");
  const double td = static_cast<double>(t);
  return std::log(15.0 * n_total * td * td * td * td / (4.0 * delta));
}

namespace {

// beta' for the fixed-variance (Hoeffding) mode: ln(N_H alpha1 t^alpha / delta).
double fv_exploration_rate(long long t, const SseConfig& cfg, int n_total) {
  return std::log(n_total * cfg.fv_alpha1 * std::pow(static_cast<double>(t), cfg.fv_alpha) /
                  cfg.delta);
}

}  // namespace

double confidence_radius(const ArmStats& stats, long long t, const SseConfig& cfg, int n_total,
                         OpCounter* ops) {
  if (cfg.confidence_mode == ConfidenceMode::kEmpiricalVariance) {
    if (stats.n < 2) return std::numeric_limits<double>::infinity();
    const double beta = exploration_rate(t, cfg.delta, n_total);
    const double n = static_cast<double>(stats.n);
    const double first = std::sqrt(4.0 * cfg.b_param * stats.var * beta / n);
    const double second = 2.0 * std::sqrt(2.0 * cfg.b_param * cfg.c_param) * beta / (n - 1.0);
    // beta: 8 scalar ops; first term: 5; second term: 7; sum: 1.
    if (ops) ops->add(8 + 13);
    return first + second;
  }
  if (stats.n < 1) return std::numeric_limits<double>::infinity();
  const double beta = fv_exploration_rate(t, cfg, n_total);
  // beta': 5 scalar ops; radius: 4.
  if (ops) ops->add(5 + 4);
  return std::sqrt(cfg.b_param * beta / (2.0 * static_cast<double>(stats.n)));
}

void update_arm(ArmStats& stats, double y, long long t, const SseConfig& cfg, int n_total,
                OpCounter* ops) {
  if (y < 0.0) throw std::invalid_argument("update_arm: rewards are nonnegative");
  stats.n += 1;
  const double delta1 = y - stats.mean;
  stats.mean += delta1 / static_cast<double>(stats.n);
  const double delta2 = y - stats.mean;
  stats.m2 += delta1 * delta2;
  stats.var = stats.m2 / static_cast<double>(stats.n);
  if (ops) ops->add(8);
  stats.radius = confidence_radius(stats, t, cfg, n_total, ops);
  stats.ucb = stats.mean + stats.radius;
  stats.lcb = stats.mean - stats.radius;
  if (ops) ops->add(2);
}

std::pair<int, int> select_indices(LevelGame& game, const SseConfig& cfg, OpCounter* ops) {
  const int n = static_cast<int>(game.contenders.size());
  if (n < 2) throw std::logic_error("select_indices: need at least two contenders");
  for (const auto& s : game.stats) {
    if (cfg.confidence_mode == ConfidenceMode::kEmpiricalVariance && s.n < 2) {
      throw std::logic_error("select_indices: all contenders need n >= 2");
    }
  }

  // Top-2 UCBs so max_{j != i} U_j is a constant-time lookup per arm.
  int best_u = 0, second_u = -1;
  for (int i = 1; i < n; ++i) {
    if (game.stats[i].ucb > game.stats[best_u].ucb) {
      second_u = best_u;
      best_u = i;
    } else if (second_u < 0 || game.stats[i].ucb > game.stats[second_u].ucb) {
      second_u = i;
    }
  }

  int gamma = 0;
  if (cfg.confidence_mode == ConfidenceMode::kEmpiricalVariance) {
    for (int i = 0; i < n; ++i) {
      const double rival_ucb = (i == best_u) ? game.stats[second_u].ucb : game.stats[best_u].ucb;
      game.stats[i].gap = rival_ucb - game.stats[i].lcb;
      if (game.stats[i].gap < game.stats[gamma].gap) gamma = i;
    }
  } else {
    // Fixed-variance mode tracks the empirical best instead of the least-gap
    // arm; gaps are still recorded for reporting.
    for (int i = 0; i < n; ++i) {
      const double rival_ucb = (i == best_u) ? game.stats[second_u].ucb : game.stats[best_u].ucb;
      game.stats[i].gap = rival_ucb - game.stats[i].lcb;
      if (game.stats[i].mean > game.stats[gamma].mean) gamma = i;
    }
  }

  int u = (gamma == best_u) ? second_u : best_u;
  // top-2 scan: 2(n-1); per-arm rival pick + subtraction + argmin/argmax: 3n;
  // u pick: 1.
  if (ops) ops->add(2LL * (n - 1) + 3LL * n + 1);
  game.gamma_idx = gamma;
  game.u_idx = u;
  return {gamma, u};
}

int choose_arm(const LevelGame& game, OpCounter* ops) {
  if (game.gamma_idx < 0 || game.u_idx < 0) throw std::logic_error("choose_arm: indices unset");
  if (ops) ops->add(1);
  return game.stats[game.gamma_idx].radius >= game.stats[game.u_idx].radius ? game.gamma_idx
                                                                            : game.u_idx;
}

RunLevelResult run_level(LevelGame& game, const RewardSource& source, const SseConfig& cfg,
                         OpCounter* ops, const StepObserver* observer, long long global_t_offset,
                         std::optional<Vertex> committed) {
  const int n = static_cast<int>(game.contenders.size());
  if (n < 2) throw std::logic_error("run_level: need at least two contenders");
  game.stats.assign(n, ArmStats{});
  game.t = 0;
  game.gamma_idx = -1;
  game.u_idx = -1;

  RunLevelResult result;
  auto emit = [&](int pos, double y) {
    if (!observer) return;
    StepInfo info;
    info.global_t = global_t_offset + game.t;
    info.level = game.level;
    info.level_t = game.t;
    info.sampled = game.contenders[pos];
    info.reward = y;
    info.committed = committed;
    if (game.gamma_idx >= 0) {
      info.running_choice = game.contenders[game.gamma_idx];
      info.gamma_index = game.contenders[game.gamma_idx].index;
      info.gap_gamma = game.stats[game.gamma_idx].gap;
    } else {
      info.running_choice = committed;
    }
    if (game.u_idx >= 0) info.u_index = game.contenders[game.u_idx].index;
    const ArmStats& s = game.stats[pos];
    info.mean = s.mean;
    info.var = s.var;
    info.radius = s.radius;
    info.ucb = s.ucb;
    info.lcb = s.lcb;
    (*observer)(info);
  };

  auto sample = [&](int pos) {
    const double y = source(game.contenders[pos]);
    game.t += 1;
    update_arm(game.stats[pos], y, game.t, cfg, game.n_total, ops);
    emit(pos, y);
  };

  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < n; ++i) sample(i);
  }

  while (true) {
    auto [gamma, u] = select_indices(game, cfg, ops);
    bool stop;
    if (cfg.confidence_mode == ConfidenceMode::kEmpiricalVariance) {
      stop = game.stats[gamma].gap < game.eps_level;
    } else {
      stop = game.stats[u].ucb - game.stats[gamma].lcb < game.eps_level;
    }
    if (ops) ops->add(1);
    if (stop) break;
    if (game.t >= cfg.max_level_samples) {
      result.budget_exhausted = true;
      break;
    }
    const int x = choose_arm(game, ops);
    if (cfg.check_invariants && cfg.confidence_mode == ConfidenceMode::kEmpiricalVariance) {
      const ArmStats& sg = game.stats[gamma];
      const ArmStats& su = game.stats[u];
      if (x == u && su.lcb > sg.lcb) result.choice_invariant_violations++;
      if (x == gamma && su.ucb > sg.ucb) result.choice_invariant_violations++;
      if (sg.gap > 2.0 * game.stats[x].radius) result.choice_invariant_violations++;
    }
    sample(x);
  }

  result.winner = game.contenders[game.gamma_idx];
  result.samples = game.t;
  return result;
}

namespace {

SseOutcome run_sse_impl(const SseConfig& cfg, const RewardSource& source,
                        const StepObserver* observer) {
  if (cfg.pruning.h_levels() != cfg.h_levels) {
    throw std::invalid_argument("run_sse: pruning vector length must equal h_levels");
  }
  const int n_total = total_arms(cfg.pruning);
  SseOutcome outcome;
  OpCounter ops;
  std::vector<Vertex> survivors = {Vertex{0, 1}};
  std::optional<Vertex> committed;
  long long global_t = 0;

  for (int h = 1; h <= cfg.h_levels; ++h) {
    survivors = expand_contenders(survivors);
    if (!cfg.pruning.plays(h)) continue;

    LevelGame game;
    game.level = h;
    game.contenders = survivors;
    game.n_total = n_total;
    const long long ops_before = ops.count;
    game.eps_level = epsilon_at_level(cfg.epsilon, cfg.gain, cfg.h_levels, h);
    ops.add(2);
    RunLevelResult res = run_level(game, source, cfg, &ops, observer, global_t, committed);
    outcome.per_level.push_back({h, res.samples, res.winner, ops.count - ops_before});
    outcome.total_samples += res.samples;
    outcome.choice_invariant_violations += res.choice_invariant_violations;
    global_t += res.samples;
    if (res.budget_exhausted) outcome.budget_exhausted = true;
    committed = res.winner;
    survivors = {res.winner};
  }

  outcome.chosen_leaf = survivors.front().index;
  outcome.op_count = ops.count;
  return outcome;
}

}  // namespace

SseOutcome run_sse(const SseConfig& cfg, const HierarchicalCodebook& cb,
                   const ChannelScenario& scenario, Rng& rng, const StepObserver* observer) {
  if (cb.h_levels() != cfg.h_levels) {
    throw std::invalid_argument("run_sse: codebook depth must match config");
  }
  PathSet state = scenario.paths;
  Eigen::VectorXcd h = channel_vector(state, cb.array_cfg());
  const bool time_varying = scenario.fading.mode != FadingMode::kStatic;
  RewardSource source = [&](Vertex v) {
    if (time_varying) {
      state = advance_fading(std::move(state), scenario.fading, rng);
      h = channel_vector(state, cb.array_cfg());
    }
    return observe_reward(cb.vector(v), h, scenario.sigma2, rng);
  };
  return run_sse_impl(cfg, source, observer);
}

SseOutcome run_sse_with_source(const SseConfig& cfg, const RewardSource& source,
                               const StepObserver* observer) {
  return run_sse_impl(cfg, source, observer);
}

}  // namespace beamsweep
