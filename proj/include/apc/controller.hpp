#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "apc/cv.hpp"
#include "apc/ghz.hpp"
#include "apc/planner.hpp"

// Request/response facade over the planner plus the GHZ and CV post-stage
// models. All request validation happens here; the layers below assume
// in-range parameters.

namespace apc {

enum class ValidationCode {
  EmptyPath,
  TargetOutOfRange,
  NegativeTime,
  ProbabilityOutOfRange,
  FidelityOutOfRange,
  NonPositiveLength,
  InvalidPartyCount,
  InvalidParameter,
};

inline const char* to_string(ValidationCode c) {
  switch (c) {
    case ValidationCode::EmptyPath: return "empty_path";
    case ValidationCode::TargetOutOfRange: return "target_out_of_range";
    case ValidationCode::NegativeTime: return "negative_time";
    case ValidationCode::ProbabilityOutOfRange: return "probability_out_of_range";
    case ValidationCode::FidelityOutOfRange: return "fidelity_out_of_range";
    case ValidationCode::NonPositiveLength: return "non_positive_length";
    case ValidationCode::InvalidPartyCount: return "invalid_party_count";
    case ValidationCode::InvalidParameter: return "invalid_parameter";
  }
  return "invalid_parameter";
}

struct ValidationIssue {
  ValidationCode code = ValidationCode::InvalidParameter;
  std::string field;
  std::string message;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues)
      : std::runtime_error(render(issues)), issues_(std::move(issues)) {}

  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  static std::string render(const std::vector<ValidationIssue>& issues) {
    std::ostringstream os;
    os << "invalid request:";
    for (const auto& i : issues) {
      os << " [" << to_string(i.code) << " " << i.field << ": " << i.message << "]";
    }
    return os.str();
  }

  std::vector<ValidationIssue> issues_;
};

struct BipartiteMode {};

struct GhzStarMode {
  int parties = 3;  // hub plus path.size() leaves
  GhzPassParams pass;
};

struct CvMode {
  CvState state;
  NlaParams nla;
};

using PlanMode = std::variant<BipartiteMode, GhzStarMode, CvMode>;

struct PlanRequest {
  std::string source = "A";
  std::string destination = "B";
  std::vector<LinkParams> path;
  double target_fidelity = 0.5;
  Objective objective = Objective::Goodput;
  PlanMode mode = BipartiteMode{};
};

struct GhzResult {
  GhzState fused;        // after fusing the purified arms
  GhzState final_state;  // after the check passes
  double p_succ_passes = 1.0;
  int ancilla_cost = 0;
  double pass_time = 0.0;
  std::vector<Plan> arm_plans;
};

struct CvResult {
  CvState state_out;
  double f_cv = 0.0;
  double p_succ = 1.0;
  double c_cv = 1.0;
  double t_cv = 0.0;
};

struct PlanResponse {
  Plan plan;
  std::optional<GhzResult> ghz;
  std::optional<CvResult> cv;
  std::vector<Plan> pareto;  // filled for Objective::ParetoSet
  double planning_time_s = 0.0;
};

class ApcController {
 public:
  ApcController() = default;
  ApcController(PlannerConfig cfg, DeviceNoise noise, TimingParams timing)
      : cfg_(cfg), noise_(noise), timing_(timing) {
    std::vector<ValidationIssue> issues;
    validate_device(issues);
    if (!issues.empty()) throw ValidationError(std::move(issues));
  }

  const PlannerConfig& config() const { return cfg_; }
  const DeviceNoise& noise() const { return noise_; }
  const TimingParams& timing() const { return timing_; }

  /// Validates, dispatches on mode, measures wall-clock planning time.
  /// Throws ValidationError; never throws for an unreachable target.
  PlanResponse plan(const PlanRequest& request) const {
    validate(request);
    const auto t0 = std::chrono::steady_clock::now();
    PlanResponse response;
    if (std::holds_alternative<GhzStarMode>(request.mode)) {
      plan_ghz(request, std::get<GhzStarMode>(request.mode), response);
    } else if (std::holds_alternative<CvMode>(request.mode)) {
      plan_cv(request, std::get<CvMode>(request.mode), response);
    } else {
      plan_bipartite(request, response);
    }
    const auto t1 = std::chrono::steady_clock::now();
    response.planning_time_s = std::chrono::duration<double>(t1 - t0).count();
    return response;
  }

  void validate(const PlanRequest& request) const {
    std::vector<ValidationIssue> issues;
    validate_device(issues);
    if (request.path.empty()) {
      issues.push_back({ValidationCode::EmptyPath, "path", "path has no links"});
    }
    if (!(request.target_fidelity > 0.0 && request.target_fidelity <= 1.0)) {
      issues.push_back({ValidationCode::TargetOutOfRange, "target_fidelity",
                        "must lie in (0,1]"});
    }
    for (std::size_t i = 0; i < request.path.size(); ++i) {
      const LinkParams& link = request.path[i];
      const std::string prefix = "path[" + std::to_string(i) + "].";
      if (!(link.length_km > 0.0)) {
        issues.push_back({ValidationCode::NonPositiveLength, prefix + "length_km",
                          "must be positive"});
      }
      if (!(link.f0 >= 0.0 && link.f0 <= 1.0)) {
        issues.push_back({ValidationCode::FidelityOutOfRange, prefix + "f0",
                          "must lie in [0,1]"});
      }
      if (!(link.p_bsm > 0.0 && link.p_bsm <= 1.0)) {
        issues.push_back({ValidationCode::ProbabilityOutOfRange, prefix + "p_bsm",
                          "must lie in (0,1]"});
      }
      if (link.p_gen_override && !(*link.p_gen_override > 0.0 && *link.p_gen_override <= 1.0)) {
        issues.push_back({ValidationCode::ProbabilityOutOfRange, prefix + "p_gen_override",
                          "must lie in (0,1]"});
      }
      if (!(link.t2_eff > 0.0)) {
        issues.push_back({ValidationCode::NegativeTime, prefix + "t2_eff",
                          "must be positive"});
      }
      if (link.initial_bell && !link.initial_bell->valid(1e-9)) {
        issues.push_back({ValidationCode::InvalidParameter, prefix + "initial_bell",
                          "coefficients must be nonnegative and sum to 1"});
      }
    }
    if (const auto* ghz = std::get_if<GhzStarMode>(&request.mode)) {
      if (ghz->parties < 2) {
        issues.push_back({ValidationCode::InvalidPartyCount, "mode.parties",
                          "need at least 2 parties"});
      } else if (request.path.size() != static_cast<std::size_t>(ghz->parties) - 1) {
        issues.push_back({ValidationCode::InvalidPartyCount, "path",
                          "star with k parties needs k-1 links"});
      }
      if (!(ghz->pass.f_anc >= 0.0 && ghz->pass.f_anc <= 1.0)) {
        issues.push_back({ValidationCode::FidelityOutOfRange, "mode.pass.f_anc",
                          "must lie in [0,1]"});
      }
      if (!(ghz->pass.p_meas_ghz >= 0.0 && ghz->pass.p_meas_ghz <= 1.0)) {
        issues.push_back({ValidationCode::ProbabilityOutOfRange, "mode.pass.p_meas_ghz",
                          "must lie in [0,1]"});
      }
      if (ghz->pass.passes < 0) {
        issues.push_back({ValidationCode::InvalidParameter, "mode.pass.passes",
                          "must be nonnegative"});
      }
    }
    if (const auto* cv = std::get_if<CvMode>(&request.mode)) {
      if (cv->state.squeezing_r < 0.0) {
        issues.push_back({ValidationCode::InvalidParameter, "mode.state.squeezing_r",
                          "must be nonnegative"});
      }
      if (!(cv->state.transmissivity_eta > 0.0 && cv->state.transmissivity_eta <= 1.0)) {
        issues.push_back({ValidationCode::ProbabilityOutOfRange, "mode.state.transmissivity_eta",
                          "must lie in (0,1]"});
      }
      if (std::abs(std::tanh(cv->state.squeezing_r) - cv->state.lambda_tms) > 1e-9) {
        issues.push_back({ValidationCode::InvalidParameter, "mode.state.lambda_tms",
                          "must equal tanh(squeezing_r)"});
      }
      if (cv->nla.gain_g < 1.0) {
        issues.push_back({ValidationCode::InvalidParameter, "mode.nla.gain_g",
                          "must be >= 1"});
      }
      if (cv->nla.stages_k < 0) {
        issues.push_back({ValidationCode::InvalidParameter, "mode.nla.stages_k",
                          "must be nonnegative"});
      }
      if (cv->nla.prefactor_a && !(*cv->nla.prefactor_a > 0.0 && *cv->nla.prefactor_a <= 1.0)) {
        issues.push_back({ValidationCode::ProbabilityOutOfRange, "mode.nla.prefactor_a",
                          "must lie in (0,1]"});
      }
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
  }

 private:
  void validate_device(std::vector<ValidationIssue>& issues) const {
    auto check_prob = [&](double v, const char* field) {
      if (!(v >= 0.0 && v <= 1.0)) {
        issues.push_back({ValidationCode::ProbabilityOutOfRange, field, "must lie in [0,1]"});
      }
    };
    check_prob(noise_.p1, "noise.p1");
    check_prob(noise_.p2, "noise.p2");
    check_prob(noise_.p_meas, "noise.p_meas");
    auto check_time = [&](double v, const char* field) {
      if (v < 0.0) {
        issues.push_back({ValidationCode::NegativeTime, field, "must be nonnegative"});
      }
    };
    check_time(timing_.t_1q, "timing.t_1q");
    check_time(timing_.t_cnot, "timing.t_cnot");
    check_time(timing_.t_meas, "timing.t_meas");
    check_time(timing_.t_classical_per_round, "timing.t_classical_per_round");
    check_time(timing_.attempt_period, "timing.attempt_period");
    if (!(timing_.speed_of_light_fiber > 0.0)) {
      issues.push_back({ValidationCode::InvalidParameter, "timing.speed_of_light_fiber",
                        "must be positive"});
    }
    if (timing_.attenuation_db_per_km < 0.0) {
      issues.push_back({ValidationCode::InvalidParameter, "timing.attenuation_db_per_km",
                        "must be nonnegative"});
    }
    if (!(timing_.p_det > 0.0 && timing_.p_det <= 1.0)) {
      issues.push_back({ValidationCode::ProbabilityOutOfRange, "timing.p_det",
                        "must lie in (0,1]"});
    }
    if (cfg_.r_max < 0) {
      issues.push_back({ValidationCode::InvalidParameter, "planner.r_max",
                        "must be nonnegative"});
    }
    if (cfg_.frontier_width < 1) {
      issues.push_back({ValidationCode::InvalidParameter, "planner.frontier_width",
                        "must be >= 1"});
    }
    if (!(cfg_.f_min_local >= 0.0 && cfg_.f_min_local <= 1.0)) {
      issues.push_back({ValidationCode::FidelityOutOfRange, "planner.f_min_local",
                        "must lie in [0,1]"});
    }
    if (cfg_.end_to_end_rounds_max < 0) {
      issues.push_back({ValidationCode::InvalidParameter, "planner.end_to_end_rounds_max",
                        "must be nonnegative"});
    }
  }

  void plan_bipartite(const PlanRequest& request, PlanResponse& response) const {
    PlanGoal goal{request.target_fidelity, request.objective};
    PlannerConfig cfg = cfg_;
    cfg.objective = request.objective;
    response.plan = plan_path(request.path, timing_, noise_, cfg, goal);
    if (request.objective == Objective::ParetoSet) {
      response.pareto = plan_path_frontier(request.path, timing_, noise_, cfg, goal);
    }
  }

  // Each arm is planned independently against the per-link target; the hub
  // joins the fusion as a local, unit-fidelity party, so an N-party star
  // fuses (N-1) planned arms plus the hub's own qubit.
  void plan_ghz(const PlanRequest& request, const GhzStarMode& mode,
                PlanResponse& response) const {
    PlanGoal goal{request.target_fidelity, request.objective};
    PlannerConfig cfg = cfg_;
    cfg.objective = request.objective;

    GhzResult ghz;
    std::vector<double> arm_fidelities{1.0};  // hub party
    double p_arms = 1.0;
    double arm_makespan = 0.0;
    double c_total = 0.0;
    double rtt_far = 0.0;
    bool arms_feasible = true;
    for (const LinkParams& link : request.path) {
      Plan arm = plan_path({&link, 1}, timing_, noise_, cfg, goal);
      arms_feasible = arms_feasible && arm.feasible;
      arm_fidelities.push_back(arm.f_end);
      p_arms *= arm.p_succ_path;
      arm_makespan = std::max(arm_makespan, arm.makespan);
      c_total += arm.c_pairs_path;
      rtt_far = std::max(rtt_far, classical_rtt(link, timing_));
      ghz.arm_plans.push_back(std::move(arm));
    }

    ghz.fused = ghz_from_arms(arm_fidelities);
    const double per_check = timing_.t_cnot + timing_.t_meas;
    GhzMultiPassResult passes = ghz_multi_pass(ghz.fused, mode.pass, per_check, rtt_far);
    ghz.final_state = passes.state;
    ghz.p_succ_passes = passes.p_succ;
    ghz.ancilla_cost = passes.ancilla_cost;
    ghz.pass_time = passes.pass_time;

    Plan combined;
    for (const Plan& arm : ghz.arm_plans) {
      for (const LinkChoice& c : arm.choices) combined.choices.push_back(c);
      for (const LinkOutcome& o : arm.link_outcomes) combined.link_outcomes.push_back(o);
    }
    // Re-number: each arm planned its single link as index 0.
    for (std::size_t i = 0; i < combined.choices.size(); ++i) {
      combined.choices[i].link_index = static_cast<int>(i);
    }
    combined.f_end = ghz.final_state.fidelity;
    combined.p_succ_path = p_arms * passes.p_succ;
    combined.makespan = arm_makespan + passes.pass_time;
    combined.c_pairs_path = c_total;
    combined.feasible = arms_feasible && passes.feasible;
    combined.goodput = combined.feasible && combined.makespan > 0.0
                           ? combined.p_succ_path / combined.makespan
                           : 0.0;
    response.plan = std::move(combined);
    response.ghz = std::move(ghz);
  }

  // Source-local squeezed pair over the first path link: NLA heralding uses
  // that link's classical round trip, and the target applies to the CV
  // entanglement proxy instead of a Bell fidelity.
  void plan_cv(const PlanRequest& request, const CvMode& mode, PlanResponse& response) const {
    const LinkParams& link = request.path.front();
    const double stage_time = timing_.t_cnot + timing_.t_meas;
    const double rtt = classical_rtt(link, timing_);
    NlaResult nla = nla_apply(mode.state, mode.nla, stage_time, rtt);

    CvResult cv;
    cv.state_out = nla.state;
    cv.f_cv = cv_fidelity_proxy(nla.state);
    cv.p_succ = nla.p_succ;
    cv.c_cv = nla.c_cv;
    cv.t_cv = nla.t_cv;

    Plan plan;
    plan.f_end = cv.f_cv;
    plan.p_succ_path = cv.p_succ;
    plan.c_pairs_path = cv.c_cv;
    auto g = gen_time(link, timing_, cfg_.attempt_cap);
    plan.makespan = (g ? *g : 0.0) + cv.t_cv;
    plan.feasible = g.has_value() && cv.f_cv >= request.target_fidelity;
    plan.goodput = plan.feasible && plan.makespan > 0.0
                       ? plan.p_succ_path / plan.makespan
                       : 0.0;
    response.plan = std::move(plan);
    response.cv = cv;
  }

  PlannerConfig cfg_{};
  DeviceNoise noise_{};
  TimingParams timing_{};
};

}  // namespace apc
