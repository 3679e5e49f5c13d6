#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "apc/physics.hpp"
#include "apc/timing.hpp"

// Frontier dynamic program over repeater paths. Stage j holds a set of
// non-dominated (fidelity, cost, time, success probability) candidates for
// the entanglement spanning links 0..j; each stage extends every candidate
// with every surviving per-link purification choice for link j followed by
// a swap at the shared node.

namespace apc {

enum class Objective { MinTimeThenCost, MinCostThenTime, ParetoSet, Goodput };

enum class GenAggregation { Parallel, Sequential };

enum class ProtocolSet { Both, BbpsswOnly, DejmpsOnly };

inline const char* to_string(Objective o) {
  switch (o) {
    case Objective::MinTimeThenCost: return "min_time_then_cost";
    case Objective::MinCostThenTime: return "min_cost_then_time";
    case Objective::ParetoSet: return "pareto_set";
    case Objective::Goodput: return "goodput";
  }
  return "goodput";
}

struct PlannerConfig {
  int r_max = 3;
  int frontier_width = 64;
  double f_min_local = 0.0;          // hard floor on per-link output fidelity
  Objective objective = Objective::Goodput;
  GenAggregation gen_agg = GenAggregation::Parallel;
  ProtocolSet protocols = ProtocolSet::Both;
  GateCounts round_counts{0, 1, 2};  // per purification round
  GateCounts swap_counts{0, 1, 2};   // per swap (BSM + readouts)
  int end_to_end_rounds_max = 0;     // post-swap recurrence on the full path
  double policy_delta = 0.05;        // Bell-coefficient spread favoring DEJMPS
  double policy_p2_threshold = 0.01; // two-qubit noise favoring DEJMPS
  double attempt_cap = default_attempt_cap;
};

struct PlanGoal {
  double target_fidelity = 0.5;
  Objective objective = Objective::Goodput;
};

struct LinkChoice {
  int link_index = 0;
  int rounds = 0;
  Protocol protocol = Protocol::BBPSSW;
};

struct LinkOutcome {
  double f_out = 1.0;
  double p_succ = 1.0;
  double c_pairs = 1.0;
  double time = 0.0;  // purification latency, rounds * round_time
};

struct DesignEntry {
  LinkChoice choice;
  LinkOutcome outcome;
};

struct TraceNode {
  std::shared_ptr<const TraceNode> parent;
  LinkChoice choice;
  LinkOutcome outcome;
};

struct Candidate {
  double f = 1.0;       // fidelity of the pair spanning links 0..j
  double c = 0.0;       // summed raw-pair cost
  double t_gen = 0.0;   // generation span for links 0..j
  double t_swap = 0.0;  // accumulated purification + swap latency
  double p = 1.0;       // joint purification/BSM success probability
  std::shared_ptr<const TraceNode> trace;
  int length = 0;

  double total_time() const { return t_gen + t_swap; }
};

struct Plan {
  std::vector<LinkChoice> choices;
  std::vector<LinkOutcome> link_outcomes;
  int end_to_end_rounds = 0;
  double f_end = 0.0;
  double p_succ_path = 0.0;
  double makespan = 0.0;
  double c_pairs_path = 0.0;
  bool feasible = false;
  double goodput = 0.0;
};

// ---------------------------------------------------------------------------
// Per-link design space
// ---------------------------------------------------------------------------

/// Evaluates every (protocol, rounds) purification choice for one link,
/// drops choices below `f_min_local`, then removes choices beaten on both
/// cost and latency by another choice of at least their fidelity (within
/// 1e-12). Exact metric duplicates collapse to the first in enumeration
/// order (BBPSSW before DEJMPS, rounds ascending).
inline std::vector<DesignEntry> link_design_space(const LinkParams& link, int link_index,
                                                  const DeviceNoise& noise,
                                                  const TimingParams& timing,
                                                  const PlannerConfig& cfg) {
  const double dwell = round_time(cfg.round_counts, timing, link);
  std::vector<DesignEntry> entries;
  auto consider = [&](Protocol proto) {
    for (int r = 0; r <= cfg.r_max; ++r) {
      MultiRoundResult res = multi_round(link.initial_state(), proto, r, noise,
                                         cfg.round_counts, 0.0, dwell, link.t2_eff);
      if (!res.feasible) continue;
      const double f_out = fidelity_of(res.state);
      if (f_out < cfg.f_min_local) continue;
      entries.push_back({{link_index, r, proto},
                         {f_out, res.p_succ, res.c_pairs, r * dwell}});
    }
  };
  if (cfg.protocols != ProtocolSet::DejmpsOnly) consider(Protocol::BBPSSW);
  if (cfg.protocols != ProtocolSet::BbpsswOnly) consider(Protocol::DEJMPS);

  std::vector<DesignEntry> kept;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const LinkOutcome& e = entries[i].outcome;
    bool drop = false;
    for (std::size_t j = 0; j < entries.size() && !drop; ++j) {
      if (j == i) continue;
      const LinkOutcome& o = entries[j].outcome;
      const bool duplicate = o.f_out == e.f_out && o.p_succ == e.p_succ &&
                             o.c_pairs == e.c_pairs && o.time == e.time;
      if (duplicate) {
        drop = j < i;
        continue;
      }
      const bool no_worse = o.c_pairs <= e.c_pairs && o.time <= e.time;
      const bool strict = o.c_pairs < e.c_pairs || o.time < e.time;
      if (no_worse && strict && o.f_out >= e.f_out - 1e-12) drop = true;
    }
    if (!drop) kept.push_back(entries[i]);
  }
  return kept;
}

/// Rule-of-thumb protocol bias: DEJMPS when the heralded state is visibly
/// asymmetric or two-qubit gate noise is high (its per-round success rate
/// is then the better lever), BBPSSW otherwise.
inline Protocol select_protocol_policy(const LinkParams& link, const DeviceNoise& noise,
                                       const PlannerConfig& cfg) {
  if (link.initial_bell && link.initial_bell->asymmetry() >= cfg.policy_delta) {
    return Protocol::DEJMPS;
  }
  if (noise.p2 > cfg.policy_p2_threshold) {
    return Protocol::DEJMPS;
  }
  return Protocol::BBPSSW;
}

// ---------------------------------------------------------------------------
// Candidate extension
// ---------------------------------------------------------------------------

/// Timing context for one DP stage, precomputed in plan_path: the stage
/// link's own expected generation time, the aggregated generation span of
/// the prefix before/after adding it, and the swap latency at its near node.
struct StageTiming {
  double gen_own = 0.0;
  double t_gen_before = 0.0;
  double t_gen_after = 0.0;
  double swap_time = 0.0;
};

/// Extends a prefix candidate with a purification choice for the next link,
/// then (beyond the first link) a swap. Memory dwell is charged against the
/// stage link's T2_eff: the fresh pair waits out the generation span minus
/// its own generation time (parallel mode only), the prefix pair waits out
/// the added generation span plus the purification and swap latency.
inline Candidate extend(const Candidate& prev, const DesignEntry& entry,
                        const LinkParams& link, const StageTiming& stage,
                        GenAggregation agg) {
  const bool first = prev.length == 0;
  const double sibling_dwell =
      agg == GenAggregation::Parallel ? std::max(0.0, stage.t_gen_after - stage.gen_own) : 0.0;
  const double f_link = decohere(entry.outcome.f_out, sibling_dwell, link.t2_eff);

  Candidate next;
  next.length = prev.length + 1;
  next.c = prev.c + entry.outcome.c_pairs;
  next.t_gen = stage.t_gen_after;
  if (first) {
    next.f = f_link;
    next.p = entry.outcome.p_succ;
    next.t_swap = entry.outcome.time;
  } else {
    const double prev_dwell = (stage.t_gen_after - stage.t_gen_before) +
                              entry.outcome.time + stage.swap_time;
    const double f_prev = decohere(prev.f, prev_dwell, link.t2_eff);
    next.f = swap_compose(f_prev, f_link);
    next.p = prev.p * entry.outcome.p_succ * link.p_bsm;
    next.t_swap = prev.t_swap + entry.outcome.time + stage.swap_time;
  }
  next.trace = std::make_shared<TraceNode>(TraceNode{prev.trace, entry.choice, entry.outcome});
  return next;
}

// ---------------------------------------------------------------------------
// Frontier pruning
// ---------------------------------------------------------------------------

inline bool dominates(const Candidate& x, const Candidate& y) {
  if (x.f < y.f || x.p < y.p) return false;
  if (x.total_time() > y.total_time() || x.c > y.c) return false;
  return x.f > y.f || x.p > y.p || x.total_time() < y.total_time() || x.c < y.c;
}

inline bool metric_equal(const Candidate& x, const Candidate& y) {
  return x.f == y.f && x.p == y.p && x.total_time() == y.total_time() && x.c == y.c;
}

namespace detail {

inline double rate_proxy(double p, double t) {
  return t > 0.0 ? p / t : std::numeric_limits<double>::infinity();
}

/// Beam ordering used once dominance filtering still leaves more than
/// `width` candidates: the objective's own scalarization first, then ties
/// toward lower cost, lower time, higher fidelity, higher success.
inline bool beam_less(const Candidate& a, const Candidate& b, const PlanGoal& goal) {
  switch (goal.objective) {
    case Objective::Goodput: {
      // Prefix fidelity only degrades with further swaps, so a candidate
      // already below target can never become feasible.
      const bool fa = a.f >= goal.target_fidelity;
      const bool fb = b.f >= goal.target_fidelity;
      if (fa != fb) return fa;
      const double ra = rate_proxy(a.p, a.total_time());
      const double rb = rate_proxy(b.p, b.total_time());
      if (ra != rb) return ra > rb;
      break;
    }
    case Objective::MinTimeThenCost:
      if (a.total_time() != b.total_time()) return a.total_time() < b.total_time();
      break;
    case Objective::MinCostThenTime:
      if (a.c != b.c) return a.c < b.c;
      break;
    case Objective::ParetoSet:
      break;
  }
  if (a.c != b.c) return a.c < b.c;
  if (a.total_time() != b.total_time()) return a.total_time() < b.total_time();
  if (a.f != b.f) return a.f > b.f;
  if (a.p != b.p) return a.p > b.p;
  return false;
}

}  // namespace detail

/// Removes candidates dominated on (fidelity, time, cost, success) and
/// exact duplicates (first in generation order wins), then truncates to
/// `width` by the objective's beam ordering.
inline void prune(std::vector<Candidate>& frontier, int width, const PlanGoal& goal) {
  if (width < 1) throw std::domain_error("prune: width must be >= 1");
  std::vector<char> dead(frontier.size(), 0);
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    if (dead[i]) continue;
    for (std::size_t j = i + 1; j < frontier.size(); ++j) {
      if (dead[j]) continue;
      if (metric_equal(frontier[i], frontier[j]) || dominates(frontier[i], frontier[j])) {
        dead[j] = 1;
      } else if (dominates(frontier[j], frontier[i])) {
        dead[i] = 1;
        break;
      }
    }
  }
  std::vector<Candidate> alive;
  alive.reserve(frontier.size());
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    if (!dead[i]) alive.push_back(std::move(frontier[i]));
  }
  std::stable_sort(alive.begin(), alive.end(), [&](const Candidate& a, const Candidate& b) {
    return detail::beam_less(a, b, goal);
  });
  if (alive.size() > static_cast<std::size_t>(width)) {
    alive.resize(width);
  }
  frontier = std::move(alive);
}

// ---------------------------------------------------------------------------
// Path planning
// ---------------------------------------------------------------------------

namespace detail {

inline Plan finalize(const Candidate& cand, const PlanGoal& goal) {
  Plan plan;
  plan.choices.resize(cand.length);
  plan.link_outcomes.resize(cand.length);
  const TraceNode* node = cand.trace.get();
  for (int i = cand.length - 1; i >= 0 && node != nullptr; --i) {
    plan.choices[i] = node->choice;
    plan.link_outcomes[i] = node->outcome;
    node = node->parent.get();
  }
  plan.f_end = cand.f;
  plan.p_succ_path = cand.p;
  plan.makespan = cand.total_time();
  plan.c_pairs_path = cand.c;
  plan.feasible = plan.f_end >= goal.target_fidelity;
  plan.goodput = plan.feasible ? rate_proxy(plan.p_succ_path, plan.makespan) : 0.0;
  return plan;
}

inline void apply_end_to_end_rounds(Plan& plan, int rounds, std::span<const LinkParams> links,
                                    const TimingParams& timing, const DeviceNoise& noise,
                                    const PlannerConfig& cfg, const PlanGoal& goal) {
  LinkParams whole;
  whole.length_km = 0.0;
  double t2_min = std::numeric_limits<double>::infinity();
  for (const LinkParams& l : links) {
    whole.length_km += l.length_km;
    t2_min = std::min(t2_min, l.t2_eff);
  }
  const double e2e_round = round_time(cfg.round_counts, timing, whole);
  MultiRoundResult res =
      multi_round(WernerPair::from_fidelity(clamp01(plan.f_end)), Protocol::BBPSSW, rounds,
                  noise, cfg.round_counts, 0.0, e2e_round, t2_min);
  plan.end_to_end_rounds = rounds;
  if (!res.feasible) {
    plan.f_end = fidelity_of(res.state);
    plan.p_succ_path = 0.0;
    plan.feasible = false;
    plan.goodput = 0.0;
    return;
  }
  plan.f_end = fidelity_of(res.state);
  plan.p_succ_path *= res.p_succ;
  plan.c_pairs_path *= std::pow(2.0, rounds) / res.p_succ;
  plan.makespan += rounds * e2e_round;
  plan.feasible = plan.f_end >= goal.target_fidelity;
  plan.goodput = plan.feasible ? rate_proxy(plan.p_succ_path, plan.makespan) : 0.0;
}

/// Strict "x is a better pick than y" under the goal; false on full tie so
/// a stable scan keeps the earliest candidate.
inline bool better_plan(const Plan& x, const Plan& y, const PlanGoal& goal) {
  if (x.feasible != y.feasible) return x.feasible;
  if (x.feasible) {
    switch (goal.objective) {
      case Objective::Goodput:
        if (x.goodput != y.goodput) return x.goodput > y.goodput;
        break;
      case Objective::MinTimeThenCost:
      case Objective::ParetoSet:
        if (x.makespan != y.makespan) return x.makespan < y.makespan;
        if (x.c_pairs_path != y.c_pairs_path) return x.c_pairs_path < y.c_pairs_path;
        break;
      case Objective::MinCostThenTime:
        if (x.c_pairs_path != y.c_pairs_path) return x.c_pairs_path < y.c_pairs_path;
        if (x.makespan != y.makespan) return x.makespan < y.makespan;
        break;
    }
  } else {
    // Closest to feasible: highest final fidelity, then best raw rate.
    if (x.f_end != y.f_end) return x.f_end > y.f_end;
    const double rx = rate_proxy(x.p_succ_path, x.makespan);
    const double ry = rate_proxy(y.p_succ_path, y.makespan);
    if (rx != ry) return rx > ry;
  }
  if (x.f_end != y.f_end) return x.f_end > y.f_end;
  if (x.makespan != y.makespan) return x.makespan < y.makespan;
  if (x.c_pairs_path != y.c_pairs_path) return x.c_pairs_path < y.c_pairs_path;
  if (x.p_succ_path != y.p_succ_path) return x.p_succ_path > y.p_succ_path;
  return false;
}

struct PathRun {
  std::vector<Plan> finals;  // deterministic generation order
  bool viable = false;       // false: some link had no design entry or no gen time
};

inline PathRun run_path(std::span<const LinkParams> links, const TimingParams& timing,
                        const DeviceNoise& noise, const PlannerConfig& cfg,
                        const PlanGoal& goal,
                        const std::vector<std::vector<DesignEntry>>& designs) {
  const std::size_t n = links.size();
  PathRun run;

  std::vector<double> probs(n), periods(n), gen_own(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (designs[j].empty()) return run;
    probs[j] = gen_success_prob(links[j], timing);
    periods[j] = attempt_period(links[j], timing);
    auto g = gen_time(links[j], timing, cfg.attempt_cap);
    if (!g) return run;
    gen_own[j] = *g;
  }

  std::vector<double> t_gen_prefix(n);
  if (cfg.gen_agg == GenAggregation::Sequential) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += gen_own[j];
      t_gen_prefix[j] = acc;
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      auto e = expected_max_gen_time({probs.data(), j + 1}, {periods.data(), j + 1});
      if (!e) return run;
      t_gen_prefix[j] = *e;
    }
  }

  std::vector<Candidate> frontier{Candidate{}};
  for (std::size_t j = 0; j < n; ++j) {
    StageTiming stage{gen_own[j], j == 0 ? 0.0 : t_gen_prefix[j - 1], t_gen_prefix[j],
                      round_time(cfg.swap_counts, timing, links[j])};
    std::vector<Candidate> next;
    next.reserve(frontier.size() * designs[j].size());
    for (const Candidate& cand : frontier) {
      for (const DesignEntry& entry : designs[j]) {
        next.push_back(extend(cand, entry, links[j], stage, cfg.gen_agg));
      }
    }
    prune(next, cfg.frontier_width, goal);
    frontier = std::move(next);
  }

  run.viable = true;
  for (const Candidate& cand : frontier) {
    Plan base = finalize(cand, goal);
    run.finals.push_back(base);
    for (int re = 1; re <= cfg.end_to_end_rounds_max; ++re) {
      Plan ext = base;
      apply_end_to_end_rounds(ext, re, links, timing, noise, cfg, goal);
      run.finals.push_back(std::move(ext));
    }
  }
  return run;
}

inline Plan select_plan(const PathRun& run, const PlanGoal& goal) {
  if (!run.viable || run.finals.empty()) {
    return Plan{};  // infeasible, zero goodput
  }
  const Plan* best = &run.finals.front();
  for (const Plan& p : run.finals) {
    if (better_plan(p, *best, goal)) best = &p;
  }
  return *best;
}

}  // namespace detail

/// Plans one path end to end. Throws std::domain_error on an empty path;
/// an unreachable target yields feasible = false with the closest-to-target
/// plan and zero goodput.
inline Plan plan_path(std::span<const LinkParams> links, const TimingParams& timing,
                      const DeviceNoise& noise, const PlannerConfig& cfg,
                      const PlanGoal& goal) {
  if (links.empty()) throw std::domain_error("plan_path: empty path");
  std::vector<std::vector<DesignEntry>> designs(links.size());
  for (std::size_t j = 0; j < links.size(); ++j) {
    designs[j] = link_design_space(links[j], static_cast<int>(j), noise, timing, cfg);
  }
  return detail::select_plan(detail::run_path(links, timing, noise, cfg, goal, designs), goal);
}

/// The surviving end-of-path frontier as plans: non-dominated on
/// (f_end, makespan, c_pairs, p_succ), sorted by makespan then cost.
inline std::vector<Plan> plan_path_frontier(std::span<const LinkParams> links,
                                            const TimingParams& timing,
                                            const DeviceNoise& noise,
                                            const PlannerConfig& cfg, const PlanGoal& goal) {
  if (links.empty()) throw std::domain_error("plan_path_frontier: empty path");
  std::vector<std::vector<DesignEntry>> designs(links.size());
  for (std::size_t j = 0; j < links.size(); ++j) {
    designs[j] = link_design_space(links[j], static_cast<int>(j), noise, timing, cfg);
  }
  detail::PathRun run = detail::run_path(links, timing, noise, cfg, goal, designs);
  std::vector<Plan> out;
  for (std::size_t i = 0; i < run.finals.size(); ++i) {
    const Plan& p = run.finals[i];
    bool drop = false;
    for (std::size_t j = 0; j < run.finals.size() && !drop; ++j) {
      if (j == i) continue;
      const Plan& o = run.finals[j];
      const bool equal = o.f_end == p.f_end && o.makespan == p.makespan &&
                         o.c_pairs_path == p.c_pairs_path && o.p_succ_path == p.p_succ_path;
      if (equal) {
        drop = j < i;
        continue;
      }
      const bool no_worse = o.f_end >= p.f_end && o.makespan <= p.makespan &&
                            o.c_pairs_path <= p.c_pairs_path && o.p_succ_path >= p.p_succ_path;
      const bool strict = o.f_end > p.f_end || o.makespan < p.makespan ||
                          o.c_pairs_path < p.c_pairs_path || o.p_succ_path > p.p_succ_path;
      if (no_worse && strict) drop = true;
    }
    if (!drop) out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(), [](const Plan& a, const Plan& b) {
    if (a.makespan != b.makespan) return a.makespan < b.makespan;
    if (a.c_pairs_path != b.c_pairs_path) return a.c_pairs_path < b.c_pairs_path;
    return a.f_end > b.f_end;
  });
  return out;
}

/// Fixed-recipe baseline: the same DP accounting with every link pinned to
/// `rounds` rounds of `protocol`. Infeasible round counts (nothing left
/// after the fidelity floor) make the whole plan infeasible.
inline Plan plan_static(std::span<const LinkParams> links, int rounds, Protocol protocol,
                        const TimingParams& timing, const DeviceNoise& noise,
                        const PlannerConfig& cfg, const PlanGoal& goal) {
  if (links.empty()) throw std::domain_error("plan_static: empty path");
  if (rounds < 0 || rounds > cfg.r_max) {
    throw std::domain_error("plan_static: rounds outside [0, r_max]");
  }
  std::vector<std::vector<DesignEntry>> designs(links.size());
  for (std::size_t j = 0; j < links.size(); ++j) {
    const LinkParams& link = links[j];
    const double dwell = round_time(cfg.round_counts, timing, link);
    MultiRoundResult res = multi_round(link.initial_state(), protocol, rounds, noise,
                                       cfg.round_counts, 0.0, dwell, link.t2_eff);
    const double f_out = fidelity_of(res.state);
    if (!res.feasible || f_out < cfg.f_min_local) continue;
    designs[j].push_back({{static_cast<int>(j), rounds, protocol},
                          {f_out, res.p_succ, res.c_pairs, rounds * dwell}});
  }
  PlannerConfig static_cfg = cfg;
  static_cfg.end_to_end_rounds_max = 0;
  return detail::select_plan(
      detail::run_path(links, timing, noise, static_cfg, goal, designs), goal);
}

}  // namespace apc
