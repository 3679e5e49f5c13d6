#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apc/json_io.hpp"
#include "apc/sweep.hpp"

// CLI entry point. Exit codes: 0 success, 2 invalid input (bad flags,
// malformed JSON, failed request validation), 1 runtime failure.

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string plan_csv(const apc::PlanResponse& response) {
  std::string out = "link_index,rounds,protocol,f_out,p_succ,c_pairs,time_s\n";
  const apc::Plan& plan = response.plan;
  for (std::size_t i = 0; i < plan.choices.size(); ++i) {
    const apc::LinkChoice& c = plan.choices[i];
    const apc::LinkOutcome& o = plan.link_outcomes[i];
    out += std::to_string(c.link_index) + ',' + std::to_string(c.rounds) + ',' +
           apc::to_string(c.protocol) + ',' + apc::csv_number(o.f_out) + ',' +
           apc::csv_number(o.p_succ) + ',' + apc::csv_number(o.c_pairs) + ',' +
           apc::csv_number(o.time) + '\n';
  }
  return out;
}

struct CommonOverrides {
  int frontier_width = 0;  // 0: keep configured value
  int r_max = -1;

  void apply(apc::PlannerConfig& cfg) const {
    if (frontier_width > 0) cfg.frontier_width = frontier_width;
    if (r_max >= 0) cfg.r_max = r_max;
  }
};

int run_plan(const std::string& request_path, const std::string& out_path,
             const std::string& format, const CommonOverrides& overrides) {
  apc::PlanDocument doc = apc::json::parse(read_input(request_path)).get<apc::PlanDocument>();
  overrides.apply(doc.planner);
  apc::ApcController controller(doc.planner, doc.noise, doc.timing);
  apc::PlanResponse response = controller.plan(doc.request);
  if (format == "csv") {
    write_output(out_path, plan_csv(response));
  } else {
    write_output(out_path, apc::json(response).dump(2) + "\n");
  }
  std::cerr << "[plan] " << doc.request.source << " -> " << doc.request.destination
            << ": f_end=" << response.plan.f_end << " feasible="
            << (response.plan.feasible ? "true" : "false") << "\n";
  return 0;
}

int run_sweep(const std::string& spec_path, const std::string& experiment,
              const std::string& out_path, const std::string& format,
              std::uint64_t seed, bool seed_set, const CommonOverrides& overrides) {
  apc::SweepSpec spec;
  if (!spec_path.empty()) {
    spec = apc::json::parse(read_input(spec_path)).get<apc::SweepSpec>();
  } else if (!experiment.empty()) {
    spec = apc::default_spec(apc::experiment_from_string(experiment));
  } else {
    throw std::invalid_argument("sweep needs --spec or --experiment");
  }
  overrides.apply(spec.base.planner);
  if (seed_set) spec.seed = seed;

  apc::SweepResult result = apc::run_sweep(spec);
  std::string path = out_path;
  if (format == "json") {
    apc::json rows = apc::json::array();
    for (const apc::SweepRow& r : result.rows) {
      apc::json row{{"experiment", apc::to_string(result.spec.experiment)},
                    {"strategy", r.strategy},
                    {"axis1", r.axis1},
                    {"selected_rounds", r.selected_rounds},
                    {"selected_protocol", r.selected_protocol},
                    {"f_end", r.f_end},
                    {"p_succ", r.p_succ},
                    {"makespan_s", r.makespan},
                    {"c_pairs", r.c_pairs},
                    {"goodput_per_s", r.goodput},
                    {"feasible", r.feasible},
                    {"planning_time_s", r.planning_time}};
      if (r.axis2) row["axis2"] = *r.axis2;
      rows.push_back(std::move(row));
    }
    apc::json doc{{"manifest", result.manifest}, {"rows", rows}};
    write_output(path, doc.dump(2) + "\n");
  } else {
    if (path.empty()) {
      path = std::string(apc::to_string(spec.experiment)) + ".csv";
    }
    apc::write_sweep_csv(result, path);
    std::cerr << "[sweep] " << apc::to_string(spec.experiment) << ": wrote "
              << result.rows.size() << " rows to " << path << "\n";
  }
  return 0;
}

int run_bench(const std::vector<int>& lengths, int repeats, const std::string& out_path,
              const CommonOverrides& overrides) {
  apc::SweepBase base = apc::default_spec(apc::Experiment::PlanningLatency).base;
  overrides.apply(base.planner);
  std::vector<apc::LatencyRow> rows = apc::bench_latency(base, lengths, repeats);
  std::string out = "chain_length,mean_plan_s,per_link_s\n";
  for (const apc::LatencyRow& r : rows) {
    out += std::to_string(r.chain_length) + ',' + apc::csv_number(r.mean_plan_s) + ',' +
           apc::csv_number(r.per_link_s) + '\n';
  }
  write_output(out_path, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive purification controller for repeater paths"};
  app.require_subcommand(1);

  CommonOverrides overrides;
  std::string out_path;
  std::string format = "json";

  auto* plan_cmd = app.add_subcommand("plan", "plan one request from a JSON document");
  std::string request_path;
  plan_cmd->add_option("--request", request_path, "request JSON ('-' for stdin)")->required();
  plan_cmd->add_option("--out", out_path, "output path (default stdout)");
  plan_cmd->add_option("--format", format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  plan_cmd->add_option("--frontier-width", overrides.frontier_width, "override beam width");
  plan_cmd->add_option("--rmax", overrides.r_max, "override max purification rounds");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep to CSV/JSON");
  std::string spec_path, experiment;
  std::uint64_t seed = 0;
  sweep_cmd->add_option("--spec", spec_path, "sweep spec JSON");
  sweep_cmd->add_option("--experiment", experiment,
                        "built-in experiment (goodput_vs_target, noise_cliff, t2_threshold, "
                        "distance_target_grid, protocol_compare, ghz_scaling, cv_nla, "
                        "planning_latency)");
  sweep_cmd->add_option("--out", out_path, "output path (default <experiment>.csv)");
  auto* sweep_format = sweep_cmd->add_option("--format", format, "csv|json")
                           ->check(CLI::IsMember({"json", "csv"}));
  auto* seed_opt = sweep_cmd->add_option("--seed", seed, "recorded in the manifest");
  sweep_cmd->add_option("--frontier-width", overrides.frontier_width, "override beam width");
  sweep_cmd->add_option("--rmax", overrides.r_max, "override max purification rounds");

  auto* bench_cmd = app.add_subcommand("bench", "planning latency vs chain length");
  std::vector<int> lengths{1, 10, 100, 1000};
  int repeats = 3;
  bench_cmd->add_option("--lengths", lengths, "chain lengths")->delimiter(',');
  bench_cmd->add_option("--repeats", repeats, "repetitions per length");
  bench_cmd->add_option("--out", out_path, "output path (default stdout)");
  bench_cmd->add_option("--frontier-width", overrides.frontier_width, "override beam width");
  bench_cmd->add_option("--rmax", overrides.r_max, "override max purification rounds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*plan_cmd) {
      return run_plan(request_path, out_path, format, overrides);
    }
    if (*sweep_cmd) {
      const std::string sweep_fmt = sweep_format->count() > 0 ? format : "csv";
      return run_sweep(spec_path, experiment, out_path, sweep_fmt, seed,
                       seed_opt->count() > 0, overrides);
    }
    if (*bench_cmd) {
      return run_bench(lengths, repeats, out_path, overrides);
    }
  } catch (const apc::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const apc::json::exception& e) {
    std::cerr << "invalid JSON: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
