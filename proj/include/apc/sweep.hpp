#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "apc/json_io.hpp"

// Deterministic parameter sweeps over the planner plus a planning-latency
// benchmark. Each experiment resolves to a grid of plan requests; every row
// of the CSV output is one (grid point, strategy) pair. All columns except
// planning_time_s are reproducible byte for byte across runs.

namespace apc {

enum class Experiment {
  GoodputVsTarget,
  NoiseCliff,
  T2Threshold,
  DistanceTargetGrid,
  ProtocolCompare,
  GhzScaling,
  CvNla,
  PlanningLatency,
};

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::GoodputVsTarget: return "goodput_vs_target";
    case Experiment::NoiseCliff: return "noise_cliff";
    case Experiment::T2Threshold: return "t2_threshold";
    case Experiment::DistanceTargetGrid: return "distance_target_grid";
    case Experiment::ProtocolCompare: return "protocol_compare";
    case Experiment::GhzScaling: return "ghz_scaling";
    case Experiment::CvNla: return "cv_nla";
    case Experiment::PlanningLatency: return "planning_latency";
  }
  return "goodput_vs_target";
}

inline Experiment experiment_from_string(const std::string& s) {
  for (Experiment e : {Experiment::GoodputVsTarget, Experiment::NoiseCliff,
                       Experiment::T2Threshold, Experiment::DistanceTargetGrid,
                       Experiment::ProtocolCompare, Experiment::GhzScaling,
                       Experiment::CvNla, Experiment::PlanningLatency}) {
    if (s == to_string(e)) return e;
  }
  throw std::invalid_argument("unknown experiment: " + s);
}

struct SweepAxis {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  int steps = 1;
  bool log_scale = false;

  std::vector<double> values() const {
    if (steps < 1) throw std::invalid_argument("axis steps must be >= 1");
    std::vector<double> v;
    v.reserve(steps);
    if (steps == 1) {
      v.push_back(start);
      return v;
    }
    if (log_scale) {
      if (!(start > 0.0 && stop > 0.0)) {
        throw std::invalid_argument("log axis needs positive bounds");
      }
      const double ratio = std::log(stop / start) / (steps - 1);
      for (int i = 0; i < steps; ++i) v.push_back(start * std::exp(ratio * i));
    } else {
      const double step = (stop - start) / (steps - 1);
      for (int i = 0; i < steps; ++i) v.push_back(start + step * i);
    }
    return v;
  }
};

/// Everything a grid point needs besides the axis values.
struct SweepBase {
  int hops = 1;
  LinkParams link;
  DeviceNoise noise;
  TimingParams timing;
  PlannerConfig planner;
  double target_fidelity = 0.85;
  Objective objective = Objective::Goodput;
  bool static_baselines = true;
  bool both_protocol_baselines = false;
  // GHZ star
  int parties = 3;
  GhzPassParams ghz_pass;
  // CV
  double squeezing_r = 1.2;
  double transmissivity_eta = 0.85;
  NlaParams nla;
  // latency benchmark
  std::vector<int> bench_lengths{1, 10, 100, 1000};
  int bench_repeats = 3;
};

struct SweepSpec {
  Experiment experiment = Experiment::GoodputVsTarget;
  SweepBase base;
  std::vector<SweepAxis> axes;
  std::uint64_t seed = 0;  // recorded in the manifest; sweeps draw no randomness
};

struct SweepRow {
  std::string strategy;
  double axis1 = 0.0;
  std::optional<double> axis2;
  int selected_rounds = 0;
  std::string selected_protocol;
  double f_end = 0.0;
  double p_succ = 0.0;
  double makespan = 0.0;
  double c_pairs = 0.0;
  double goodput = 0.0;
  bool feasible = false;
  double planning_time = 0.0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<std::string> columns;
  std::vector<SweepRow> rows;
  json manifest;
};

// ---------------------------------------------------------------------------
// Experiment defaults (one per supported figure-style study)
// ---------------------------------------------------------------------------

inline SweepSpec default_spec(Experiment e) {
  SweepSpec spec;
  spec.experiment = e;
  SweepBase& b = spec.base;
  b.noise = {1e-3, 1e-3, 1e-3};
  b.link.length_km = 15.0;
  b.link.f0 = 0.85;
  b.link.t2_eff = 0.1;
  switch (e) {
    case Experiment::GoodputVsTarget:
      b.planner.r_max = 4;
      spec.axes = {{"target_fidelity", 0.84, 0.92, 17, false}};
      break;
    case Experiment::NoiseCliff:
      b.hops = 3;
      b.link.length_km = 8.0;
      b.link.f0 = 0.93;
      b.target_fidelity = 0.85;
      spec.axes = {{"epsilon", 1e-4, 3e-2, 25, true}};
      break;
    case Experiment::T2Threshold:
      b.hops = 3;
      b.link.length_km = 8.0;
      b.link.f0 = 0.92;
      b.target_fidelity = 0.76;
      // Gate noise high enough that extra rounds cannot buy back the
      // coherence budget: the viable region is swap-only.
      b.noise = {1e-2, 1e-2, 1e-2};
      spec.axes = {{"t2_eff", 1e-3, 1.0, 25, true}};
      break;
    case Experiment::DistanceTargetGrid:
      b.link.f0 = 0.90;
      b.link.t2_eff = 0.08;
      b.planner.r_max = 6;
      spec.axes = {{"length_km", 5.0, 60.0, 12, false},
                   {"target_fidelity", 0.86, 0.93, 8, false}};
      break;
    case Experiment::ProtocolCompare:
      b.link.t2_eff = 0.15;
      b.both_protocol_baselines = true;
      spec.axes = {{"target_fidelity", 0.84, 0.91, 15, false}};
      break;
    case Experiment::GhzScaling:
      b.hops = 2;
      b.link.length_km = 12.0;
      b.link.f0 = 0.80;
      b.target_fidelity = 0.85;  // per-arm link target
      b.static_baselines = false;
      b.ghz_pass = {0.98, 0.01, 1};
      spec.axes = {{"parties", 3.0, 8.0, 6, false}};
      break;
    case Experiment::CvNla:
      b.static_baselines = false;
      b.target_fidelity = 0.95;
      b.squeezing_r = 1.2;
      b.transmissivity_eta = 0.85;
      b.nla.stages_k = 2;
      spec.axes = {{"gain_g", 1.0, 2.0, 21, false}};
      break;
    case Experiment::PlanningLatency:
      b.static_baselines = false;
      b.link.length_km = 1.0;
      b.link.f0 = 0.88;
      b.link.p_gen_override = 0.9999;
      b.link.t2_eff = 1.0;
      break;
  }
  return spec;
}

inline void to_json(json& j, const SweepAxis& a) {
  j = json{{"name", a.name}, {"start", a.start}, {"stop", a.stop},
           {"steps", a.steps}, {"log", a.log_scale}};
}

inline void from_json(const json& j, SweepAxis& a) {
  a.name = j.at("name").get<std::string>();
  a.start = j.value("start", a.start);
  a.stop = j.value("stop", a.stop);
  a.steps = j.value("steps", a.steps);
  a.log_scale = j.value("log", a.log_scale);
}

inline void to_json(json& j, const SweepBase& b) {
  j = json{{"hops", b.hops},
           {"link", b.link},
           {"noise", b.noise},
           {"timing", b.timing},
           {"planner", b.planner},
           {"target_fidelity", b.target_fidelity},
           {"objective", to_string(b.objective)},
           {"static_baselines", b.static_baselines},
           {"both_protocol_baselines", b.both_protocol_baselines},
           {"parties", b.parties},
           {"ghz_pass", b.ghz_pass},
           {"squeezing_r", b.squeezing_r},
           {"transmissivity_eta", b.transmissivity_eta},
           {"nla", b.nla},
           {"bench_lengths", b.bench_lengths},
           {"bench_repeats", b.bench_repeats}};
}

inline void from_json(const json& j, SweepBase& b) {
  b.hops = j.value("hops", b.hops);
  if (j.contains("link")) from_json(j["link"], b.link);
  if (j.contains("noise")) from_json(j["noise"], b.noise);
  if (j.contains("timing")) from_json(j["timing"], b.timing);
  if (j.contains("planner")) from_json(j["planner"], b.planner);
  b.target_fidelity = j.value("target_fidelity", b.target_fidelity);
  if (j.contains("objective")) b.objective = objective_from_string(j["objective"]);
  b.static_baselines = j.value("static_baselines", b.static_baselines);
  b.both_protocol_baselines = j.value("both_protocol_baselines", b.both_protocol_baselines);
  b.parties = j.value("parties", b.parties);
  if (j.contains("ghz_pass")) from_json(j["ghz_pass"], b.ghz_pass);
  b.squeezing_r = j.value("squeezing_r", b.squeezing_r);
  b.transmissivity_eta = j.value("transmissivity_eta", b.transmissivity_eta);
  if (j.contains("nla")) from_json(j["nla"], b.nla);
  if (j.contains("bench_lengths")) b.bench_lengths = j["bench_lengths"].get<std::vector<int>>();
  b.bench_repeats = j.value("bench_repeats", b.bench_repeats);
}

/// Specs deserialize on top of the experiment's defaults, so a bare
/// {"experiment": "noise_cliff"} is a complete document.
inline void from_json(const json& j, SweepSpec& s) {
  const Experiment e = experiment_from_string(j.value("experiment", "goodput_vs_target"));
  s = default_spec(e);
  if (j.contains("base")) from_json(j["base"], s.base);
  if (j.contains("axes")) s.axes = j["axes"].get<std::vector<SweepAxis>>();
  s.seed = j.value("seed", s.seed);
}

inline void to_json(json& j, const SweepSpec& s) {
  j = json{{"experiment", to_string(s.experiment)}, {"base", s.base},
           {"axes", s.axes}, {"seed", s.seed}};
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

namespace detail {

inline void apply_axis(SweepBase& b, const std::string& name, double v) {
  if (name == "target_fidelity") {
    b.target_fidelity = v;
  } else if (name == "epsilon") {
    b.noise = {v, v, v};
  } else if (name == "t2_eff") {
    b.link.t2_eff = v;
  } else if (name == "length_km") {
    b.link.length_km = v;
  } else if (name == "f0") {
    b.link.f0 = v;
  } else if (name == "parties") {
    b.parties = static_cast<int>(std::lround(v));
    b.hops = b.parties - 1;
  } else if (name == "gain_g") {
    b.nla.gain_g = v;
  } else if (name == "stages_k") {
    b.nla.stages_k = static_cast<int>(std::lround(v));
  } else if (name == "squeezing_r") {
    b.squeezing_r = v;
  } else if (name == "transmissivity_eta") {
    b.transmissivity_eta = v;
  } else if (name == "chain_length") {
    b.hops = static_cast<int>(std::lround(v));
  } else {
    throw std::invalid_argument("unknown sweep axis: " + name);
  }
}

inline std::vector<LinkParams> make_chain(const SweepBase& b) {
  return std::vector<LinkParams>(static_cast<std::size_t>(b.hops), b.link);
}

inline void fill_choice_columns(const Plan& plan, SweepRow& row) {
  int rounds = 0;
  bool any = false, all_bbpssw = true, all_dejmps = true;
  for (const LinkChoice& c : plan.choices) {
    rounds = std::max(rounds, c.rounds);
    any = true;
    if (c.protocol == Protocol::BBPSSW) all_dejmps = false;
    if (c.protocol == Protocol::DEJMPS) all_bbpssw = false;
  }
  row.selected_rounds = rounds;
  if (!any) {
    row.selected_protocol = "none";
  } else if (all_bbpssw) {
    row.selected_protocol = "bbpssw";
  } else if (all_dejmps) {
    row.selected_protocol = "dejmps";
  } else {
    row.selected_protocol = "mixed";
  }
}

inline SweepRow row_from_plan(const Plan& plan, double planning_time) {
  SweepRow row;
  fill_choice_columns(plan, row);
  row.f_end = plan.f_end;
  row.p_succ = plan.p_succ_path;
  row.makespan = plan.makespan;
  row.c_pairs = plan.c_pairs_path;
  row.goodput = plan.goodput;
  row.feasible = plan.feasible;
  row.planning_time = planning_time;
  return row;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Runs the experiment grid single-threaded in axis order (axis1 outer,
/// axis2 inner), emitting the adaptive row first and then any static
/// baseline rows per grid point.
inline SweepResult run_sweep(const SweepSpec& spec) {
  SweepResult result;
  result.spec = spec;
  result.columns = {"experiment", "strategy", "axis1", "axis2", "selected_rounds",
                    "selected_protocol", "f_end", "p_succ", "makespan_s",
                    "c_pairs", "goodput_per_s", "feasible", "planning_time_s"};

  std::vector<double> axis1{0.0}, axis2;
  if (!spec.axes.empty()) axis1 = spec.axes[0].values();
  if (spec.axes.size() > 1) axis2 = spec.axes[1].values();
  if (spec.axes.size() > 2) throw std::invalid_argument("at most two sweep axes");

  auto emit_point = [&](const SweepBase& b, double a1, std::optional<double> a2) {
    std::vector<LinkParams> chain = detail::make_chain(b);
    ApcController controller(b.planner, b.noise, b.timing);
    PlanRequest request;
    request.path = chain;
    request.target_fidelity = b.target_fidelity;
    request.objective = b.objective;
    if (spec.experiment == Experiment::GhzScaling) {
      request.mode = GhzStarMode{b.parties, b.ghz_pass};
    } else if (spec.experiment == Experiment::CvNla) {
      request.mode = CvMode{CvState::make(b.squeezing_r, b.transmissivity_eta), b.nla};
    }
    PlanResponse response = controller.plan(request);
    SweepRow row = detail::row_from_plan(response.plan, response.planning_time_s);
    row.strategy = "apc";
    row.axis1 = a1;
    row.axis2 = a2;
    if (spec.experiment == Experiment::CvNla) row.selected_protocol = "cv";
    result.rows.push_back(row);

    if (!b.static_baselines) return;
    PlanGoal goal{b.target_fidelity, b.objective};
    std::vector<Protocol> protocols{Protocol::BBPSSW};
    if (b.both_protocol_baselines) protocols.push_back(Protocol::DEJMPS);
    for (Protocol proto : protocols) {
      for (int r = 0; r <= b.planner.r_max; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        Plan plan = plan_static(chain, r, proto, b.timing, b.noise, b.planner, goal);
        SweepRow srow = detail::row_from_plan(plan, detail::seconds_since(t0));
        srow.strategy = b.both_protocol_baselines
                            ? std::string("static_") + to_string(proto) + "_r" + std::to_string(r)
                            : std::string("static_r") + std::to_string(r);
        srow.axis1 = a1;
        srow.axis2 = a2;
        srow.selected_rounds = r;
        srow.selected_protocol = to_string(proto);
        result.rows.push_back(srow);
      }
    }
  };

  if (spec.experiment == Experiment::PlanningLatency) {
    for (int n : spec.base.bench_lengths) {
      SweepBase b = spec.base;
      b.hops = n;
      std::vector<LinkParams> chain = detail::make_chain(b);
      ApcController controller(b.planner, b.noise, b.timing);
      PlanRequest request;
      request.path = chain;
      request.target_fidelity = b.target_fidelity;
      request.objective = b.objective;
      double total = 0.0;
      PlanResponse response;
      for (int rep = 0; rep < std::max(1, b.bench_repeats); ++rep) {
        response = controller.plan(request);
        total += response.planning_time_s;
      }
      SweepRow row = detail::row_from_plan(response.plan,
                                           total / std::max(1, b.bench_repeats));
      row.strategy = "apc";
      row.axis1 = n;
      result.rows.push_back(row);
    }
  } else {
    for (double a1 : axis1) {
      if (axis2.empty()) {
        SweepBase b = spec.base;
        if (!spec.axes.empty()) detail::apply_axis(b, spec.axes[0].name, a1);
        emit_point(b, a1, std::nullopt);
      } else {
        for (double a2 : axis2) {
          SweepBase b = spec.base;
          detail::apply_axis(b, spec.axes[0].name, a1);
          detail::apply_axis(b, spec.axes[1].name, a2);
          emit_point(b, a1, a2);
        }
      }
    }
  }

  result.manifest = json{{"spec", spec},
                         {"columns", result.columns},
                         {"axis1", spec.axes.empty() ? json(nullptr) : json(spec.axes[0].name)},
                         {"axis2", spec.axes.size() > 1 ? json(spec.axes[1].name) : json(nullptr)},
                         {"rows", result.rows.size()}};
  return result;
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

/// RFC-4180 quoting; numbers are rendered with %.9g so repeated runs match
/// byte for byte.
inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::string csv_string(const SweepResult& result) {
  std::string out;
  for (std::size_t i = 0; i < result.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(result.columns[i]);
  }
  out += '\n';
  for (const SweepRow& row : result.rows) {
    out += csv_escape(std::string(to_string(result.spec.experiment)));
    out += ',';
    out += csv_escape(row.strategy);
    out += ',';
    out += csv_number(row.axis1);
    out += ',';
    if (row.axis2) out += csv_number(*row.axis2);
    out += ',';
    out += std::to_string(row.selected_rounds);
    out += ',';
    out += csv_escape(row.selected_protocol);
    out += ',';
    out += csv_number(row.f_end);
    out += ',';
    out += csv_number(row.p_succ);
    out += ',';
    out += csv_number(row.makespan);
    out += ',';
    out += csv_number(row.c_pairs);
    out += ',';
    out += csv_number(row.goodput);
    out += ',';
    out += row.feasible ? "true" : "false";
    out += ',';
    out += csv_number(row.planning_time);
    out += '\n';
  }
  return out;
}

/// Writes the CSV and a sibling `<path>.manifest.json` with the resolved
/// spec. Throws std::runtime_error on I/O failure.
inline void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream csv(path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open for writing: " + path);
  csv << csv_string(result);
  if (!csv) throw std::runtime_error("write failed: " + path);
  std::ofstream manifest(path + ".manifest.json", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot open for writing: " + path + ".manifest.json");
  manifest << result.manifest.dump(2) << '\n';
  if (!manifest) throw std::runtime_error("write failed: " + path + ".manifest.json");
}

// ---------------------------------------------------------------------------
// Planning-latency benchmark
// ---------------------------------------------------------------------------

struct LatencyRow {
  int chain_length = 0;
  double mean_plan_s = 0.0;
  double per_link_s = 0.0;
};

inline std::vector<LatencyRow> bench_latency(const SweepBase& base,
                                             std::span<const int> lengths, int repeats) {
  std::vector<LatencyRow> rows;
  for (int n : lengths) {
    SweepBase b = base;
    b.hops = n;
    ApcController controller(b.planner, b.noise, b.timing);
    PlanRequest request;
    request.path = detail::make_chain(b);
    request.target_fidelity = b.target_fidelity;
    request.objective = b.objective;
    double total = 0.0;
    for (int rep = 0; rep < std::max(1, repeats); ++rep) {
      total += controller.plan(request).planning_time_s;
    }
    const double mean = total / std::max(1, repeats);
    rows.push_back({n, mean, mean / std::max(1, n)});
  }
  return rows;
}

}  // namespace apc
