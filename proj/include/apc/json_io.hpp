#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "apc/controller.hpp"

// JSON bindings for requests, responses, and device/planner configuration.
// Times are seconds, lengths kilometers. Absent optional fields keep their
// defaults; t2_eff omitted means no memory decoherence.

namespace apc {

using nlohmann::json;

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "bbpssw") return Protocol::BBPSSW;
  if (s == "dejmps") return Protocol::DEJMPS;
  throw std::invalid_argument("unknown protocol: " + s);
}

inline Objective objective_from_string(const std::string& s) {
  if (s == "min_time_then_cost") return Objective::MinTimeThenCost;
  if (s == "min_cost_then_time") return Objective::MinCostThenTime;
  if (s == "pareto_set") return Objective::ParetoSet;
  if (s == "goodput") return Objective::Goodput;
  throw std::invalid_argument("unknown objective: " + s);
}

inline void to_json(json& j, const DeviceNoise& n) {
  j = json{{"p1", n.p1}, {"p2", n.p2}, {"p_meas", n.p_meas}};
}

inline void from_json(const json& j, DeviceNoise& n) {
  n.p1 = j.value("p1", n.p1);
  n.p2 = j.value("p2", n.p2);
  n.p_meas = j.value("p_meas", n.p_meas);
}

inline void to_json(json& j, const GateCounts& c) {
  j = json{{"n_1q", c.n_1q}, {"n_2q", c.n_2q}, {"n_meas", c.n_meas}};
}

inline void from_json(const json& j, GateCounts& c) {
  c.n_1q = j.value("n_1q", c.n_1q);
  c.n_2q = j.value("n_2q", c.n_2q);
  c.n_meas = j.value("n_meas", c.n_meas);
}

inline void to_json(json& j, const TimingParams& t) {
  j = json{{"t_1q", t.t_1q},
           {"t_cnot", t.t_cnot},
           {"t_meas", t.t_meas},
           {"t_classical_per_round", t.t_classical_per_round},
           {"speed_of_light_fiber", t.speed_of_light_fiber},
           {"attenuation_db_per_km", t.attenuation_db_per_km},
           {"attempt_period", t.attempt_period},
           {"p_det", t.p_det}};
}

inline void from_json(const json& j, TimingParams& t) {
  t.t_1q = j.value("t_1q", t.t_1q);
  t.t_cnot = j.value("t_cnot", t.t_cnot);
  t.t_meas = j.value("t_meas", t.t_meas);
  t.t_classical_per_round = j.value("t_classical_per_round", t.t_classical_per_round);
  t.speed_of_light_fiber = j.value("speed_of_light_fiber", t.speed_of_light_fiber);
  t.attenuation_db_per_km = j.value("attenuation_db_per_km", t.attenuation_db_per_km);
  t.attempt_period = j.value("attempt_period", t.attempt_period);
  t.p_det = j.value("p_det", t.p_det);
}

inline void to_json(json& j, const BellDiagonal& b) {
  j = json::array({b.a, b.b, b.c, b.d});
}

inline void from_json(const json& j, BellDiagonal& b) {
  if (!j.is_array() || j.size() != 4) {
    throw std::invalid_argument("initial_bell must be [a,b,c,d]");
  }
  b = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline void to_json(json& j, const LinkParams& l) {
  j = json{{"length_km", l.length_km}, {"f0", l.f0}, {"p_bsm", l.p_bsm}};
  if (l.p_gen_override) j["p_gen_override"] = *l.p_gen_override;
  if (std::isfinite(l.t2_eff)) j["t2_eff"] = l.t2_eff;
  if (l.initial_bell) j["initial_bell"] = *l.initial_bell;
}

inline void from_json(const json& j, LinkParams& l) {
  l.length_km = j.value("length_km", l.length_km);
  l.f0 = j.value("f0", l.f0);
  l.p_bsm = j.value("p_bsm", l.p_bsm);
  if (j.contains("p_gen_override") && !j["p_gen_override"].is_null()) {
    l.p_gen_override = j["p_gen_override"].get<double>();
  }
  if (j.contains("t2_eff") && !j["t2_eff"].is_null()) {
    l.t2_eff = j["t2_eff"].get<double>();
  }
  if (j.contains("initial_bell") && !j["initial_bell"].is_null()) {
    l.initial_bell = j["initial_bell"].get<BellDiagonal>();
  }
}

inline void to_json(json& j, const PlannerConfig& c) {
  const char* protocols = c.protocols == ProtocolSet::Both
                              ? "both"
                              : (c.protocols == ProtocolSet::BbpsswOnly ? "bbpssw" : "dejmps");
  j = json{{"r_max", c.r_max},
           {"frontier_width", c.frontier_width},
           {"f_min_local", c.f_min_local},
           {"objective", to_string(c.objective)},
           {"gen_agg", c.gen_agg == GenAggregation::Parallel ? "parallel" : "sequential"},
           {"protocols", protocols},
           {"round_counts", c.round_counts},
           {"swap_counts", c.swap_counts},
           {"end_to_end_rounds_max", c.end_to_end_rounds_max},
           {"policy_delta", c.policy_delta},
           {"policy_p2_threshold", c.policy_p2_threshold},
           {"attempt_cap", c.attempt_cap}};
}

inline void from_json(const json& j, PlannerConfig& c) {
  c.r_max = j.value("r_max", c.r_max);
  c.frontier_width = j.value("frontier_width", c.frontier_width);
  c.f_min_local = j.value("f_min_local", c.f_min_local);
  if (j.contains("objective")) c.objective = objective_from_string(j["objective"]);
  if (j.contains("gen_agg")) {
    const std::string agg = j["gen_agg"];
    if (agg == "parallel") {
      c.gen_agg = GenAggregation::Parallel;
    } else if (agg == "sequential") {
      c.gen_agg = GenAggregation::Sequential;
    } else {
      throw std::invalid_argument("unknown gen_agg: " + agg);
    }
  }
  if (j.contains("protocols")) {
    const std::string p = j["protocols"];
    if (p == "both") {
      c.protocols = ProtocolSet::Both;
    } else if (p == "bbpssw") {
      c.protocols = ProtocolSet::BbpsswOnly;
    } else if (p == "dejmps") {
      c.protocols = ProtocolSet::DejmpsOnly;
    } else {
      throw std::invalid_argument("unknown protocol set: " + p);
    }
  }
  if (j.contains("round_counts")) c.round_counts = j["round_counts"].get<GateCounts>();
  if (j.contains("swap_counts")) c.swap_counts = j["swap_counts"].get<GateCounts>();
  c.end_to_end_rounds_max = j.value("end_to_end_rounds_max", c.end_to_end_rounds_max);
  c.policy_delta = j.value("policy_delta", c.policy_delta);
  c.policy_p2_threshold = j.value("policy_p2_threshold", c.policy_p2_threshold);
  c.attempt_cap = j.value("attempt_cap", c.attempt_cap);
}

inline void to_json(json& j, const GhzPassParams& p) {
  j = json{{"f_anc", p.f_anc}, {"p_meas_ghz", p.p_meas_ghz}, {"passes", p.passes}};
}

inline void from_json(const json& j, GhzPassParams& p) {
  p.f_anc = j.value("f_anc", p.f_anc);
  p.p_meas_ghz = j.value("p_meas_ghz", p.p_meas_ghz);
  p.passes = j.value("passes", p.passes);
}

inline void to_json(json& j, const CvState& s) {
  j = json{{"squeezing_r", s.squeezing_r},
           {"lambda_tms", s.lambda_tms},
           {"transmissivity_eta", s.transmissivity_eta}};
}

inline void from_json(const json& j, CvState& s) {
  const double r = j.value("squeezing_r", 0.0);
  const double eta = j.value("transmissivity_eta", 1.0);
  s = CvState{r, j.value("lambda_tms", std::tanh(r)), eta};
}

inline void to_json(json& j, const NlaParams& p) {
  j = json{{"gain_g", p.gain_g}, {"stages_k", p.stages_k}};
  if (p.prefactor_a) j["prefactor_a"] = *p.prefactor_a;
}

inline void from_json(const json& j, NlaParams& p) {
  p.gain_g = j.value("gain_g", p.gain_g);
  p.stages_k = j.value("stages_k", p.stages_k);
  if (j.contains("prefactor_a") && !j["prefactor_a"].is_null()) {
    p.prefactor_a = j["prefactor_a"].get<double>();
  }
}

inline void to_json(json& j, const PlanMode& m) {
  if (const auto* ghz = std::get_if<GhzStarMode>(&m)) {
    j = json{{"type", "ghz_star"}, {"parties", ghz->parties}, {"pass", ghz->pass}};
  } else if (const auto* cv = std::get_if<CvMode>(&m)) {
    j = json{{"type", "cv"}, {"state", cv->state}, {"nla", cv->nla}};
  } else {
    j = json{{"type", "bipartite"}};
  }
}

inline void from_json(const json& j, PlanMode& m) {
  const std::string type = j.value("type", "bipartite");
  if (type == "bipartite") {
    m = BipartiteMode{};
  } else if (type == "ghz_star") {
    GhzStarMode ghz;
    ghz.parties = j.value("parties", ghz.parties);
    if (j.contains("pass")) ghz.pass = j["pass"].get<GhzPassParams>();
    m = ghz;
  } else if (type == "cv") {
    CvMode cv;
    if (j.contains("state")) cv.state = j["state"].get<CvState>();
    if (j.contains("nla")) cv.nla = j["nla"].get<NlaParams>();
    m = cv;
  } else {
    throw std::invalid_argument("unknown mode type: " + type);
  }
}

inline void to_json(json& j, const PlanRequest& r) {
  j = json{{"source", r.source},
           {"destination", r.destination},
           {"path", r.path},
           {"target_fidelity", r.target_fidelity},
           {"objective", to_string(r.objective)},
           {"mode", r.mode}};
}

inline void from_json(const json& j, PlanRequest& r) {
  r.source = j.value("source", r.source);
  r.destination = j.value("destination", r.destination);
  if (j.contains("path")) r.path = j["path"].get<std::vector<LinkParams>>();
  r.target_fidelity = j.value("target_fidelity", r.target_fidelity);
  if (j.contains("objective")) r.objective = objective_from_string(j["objective"]);
  if (j.contains("mode")) r.mode = j["mode"].get<PlanMode>();
}

inline void to_json(json& j, const LinkChoice& c) {
  j = json{{"link_index", c.link_index}, {"rounds", c.rounds},
           {"protocol", to_string(c.protocol)}};
}

inline void to_json(json& j, const LinkOutcome& o) {
  j = json{{"f_out", o.f_out}, {"p_succ", o.p_succ},
           {"c_pairs", o.c_pairs}, {"time_s", o.time}};
}

inline void to_json(json& j, const Plan& p) {
  j = json{{"choices", p.choices},
           {"link_outcomes", p.link_outcomes},
           {"end_to_end_rounds", p.end_to_end_rounds},
           {"f_end", p.f_end},
           {"p_succ_path", p.p_succ_path},
           {"makespan_s", p.makespan},
           {"c_pairs_path", p.c_pairs_path},
           {"feasible", p.feasible},
           {"goodput_per_s", p.goodput}};
}

inline void to_json(json& j, const GhzState& s) {
  j = json{{"n_parties", s.n_parties}, {"fidelity", s.fidelity}};
}

inline void to_json(json& j, const GhzResult& g) {
  j = json{{"fused", g.fused},
           {"final_state", g.final_state},
           {"p_succ_passes", g.p_succ_passes},
           {"ancilla_cost", g.ancilla_cost},
           {"pass_time_s", g.pass_time},
           {"arm_plans", g.arm_plans}};
}

inline void to_json(json& j, const CvResult& c) {
  j = json{{"state_out", c.state_out},
           {"f_cv", c.f_cv},
           {"p_succ", c.p_succ},
           {"c_cv", c.c_cv},
           {"t_cv_s", c.t_cv}};
}

inline void to_json(json& j, const PlanResponse& r) {
  j = json{{"plan", r.plan}, {"planning_time_s", r.planning_time_s}};
  if (r.ghz) j["ghz"] = *r.ghz;
  if (r.cv) j["cv"] = *r.cv;
  if (!r.pareto.empty()) j["pareto"] = r.pareto;
}

inline void to_json(json& j, const ValidationIssue& i) {
  j = json{{"code", to_string(i.code)}, {"field", i.field}, {"message", i.message}};
}

/// Full planning document for the CLI: device configuration plus request.
struct PlanDocument {
  PlannerConfig planner;
  DeviceNoise noise;
  TimingParams timing;
  PlanRequest request;
};

inline void to_json(json& j, const PlanDocument& d) {
  j = json{{"planner", d.planner}, {"noise", d.noise}, {"timing", d.timing},
           {"request", d.request}};
}

inline void from_json(const json& j, PlanDocument& d) {
  if (j.contains("planner")) d.planner = j["planner"].get<PlannerConfig>();
  if (j.contains("noise")) d.noise = j["noise"].get<DeviceNoise>();
  if (j.contains("timing")) d.timing = j["timing"].get<TimingParams>();
  if (j.contains("request")) {
    d.request = j["request"].get<PlanRequest>();
  } else {
    d.request = j.get<PlanRequest>();  // bare request document
  }
}

}  // namespace apc
