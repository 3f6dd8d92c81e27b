// SPDX-License-Identifier: Apache-2.0
// frictionnet: validation, inference, domain evaluation, drive simulation and
// sensor-log replay for the road-condition Bayesian network.
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frictionnet/domain_eval.hpp"
#include "frictionnet/drive_sim.hpp"
#include "frictionnet/inference.hpp"
#include "frictionnet/model_io.hpp"
#include "frictionnet/replay.hpp"
#include "frictionnet/util.hpp"

namespace fn = frictionnet;

namespace {

fn::Model load_model_or_die(const std::string& path) {
  if (path.empty())
    throw fn::Error(fn::ErrorCode::invalid_argument,
                    "no model file (use --model or FRICTIONNET_MODEL)");
  return fn::load_model(path);
}

void print_warnings(const fn::Model& model) {
  for (const auto& w : model.warnings)
    std::cout << "warning: renormalized " << w.table << " row [" << w.row << "] (sum "
              << fn::util::format_fixed(w.sum, 6) << ")\n";
}

int cmd_validate(const std::string& model_path) {
  const fn::Model model = load_model_or_die(model_path);
  print_warnings(model);
  std::size_t rows = 0;
  for (int i = 0; i < model.network.size(); ++i) rows += model.network.cpt(i).rows.size();
  std::cout << "ok: " << model.network.size() << " variables, " << rows << " cpt rows, "
            << model.warnings.size() << " renormalization warnings\n";
  return 0;
}

int cmd_infer(const std::string& model_path, const std::vector<std::string>& evidence_args,
              const std::vector<std::string>& queries) {
  const fn::Model model = load_model_or_die(model_path);
  const fn::bn::Network& net = model.network;

  fn::bn::Evidence evidence;
  for (const auto& item : evidence_args) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw fn::Error(fn::ErrorCode::invalid_argument,
                      "evidence must be VAR=STATE, got '" + item + "'");
    const std::string var = item.substr(0, eq);
    const std::string state = item.substr(eq + 1);
    const int v = net.index_of(var);
    if (!evidence.emplace(var, net.state_index(v, state)).second)
      throw fn::Error(fn::ErrorCode::invalid_argument, var + " observed twice");
  }

  for (const auto& query : queries) {
    const auto dist = fn::bn::posterior_ve(net, query, evidence);
    const fn::bn::Variable& v = net.variable(net.index_of(query));
    std::cout << query << ":\n";
    for (std::size_t s = 0; s < dist.p.size(); ++s)
      std::cout << "  " << v.states[s] << " " << fn::util::format_fixed(dist.p[s], 6) << "\n";
  }
  return 0;
}

int cmd_eval_domain(const std::string& model_path, const std::string& out_path,
                    const std::vector<std::string>& subset_args, bool weighted, int threads) {
  const fn::Model model = load_model_or_die(model_path);
  std::vector<fn::sweep::SensorSubset> subsets;
  if (subset_args.empty()) {
    subsets = fn::sweep::all_subsets();
  } else {
    for (const auto& arg : subset_args) subsets.push_back(fn::sweep::SensorSubset::parse(arg));
  }
  fn::sweep::EvalOptions options;
  options.threads = threads;
  const auto result = fn::sweep::evaluate_subsets(model.network, subsets, options);
  fn::sweep::emit_report(result, out_path, weighted);
  std::cout << "wrote " << out_path << " (" << result.rows.size() << " rows, n="
            << (result.rows.empty() ? 0 : result.rows.front().n) << " combinations)\n";
  return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& scenario_path,
                 std::uint64_t seed, double rate, const std::string& out_path,
                 std::string truth_path) {
  const fn::Model model = load_model_or_die(model_path);
  const auto scenario = fn::sim::load_scenario(scenario_path);
  const auto drive = fn::sim::generate_drive(model.network, scenario, model.config, rate, seed);
  if (truth_path.empty()) {
    std::filesystem::path p(out_path);
    p.replace_extension();
    truth_path = p.string() + "_truth.csv";
  }
  fn::replay::write_log_csv(drive.records, out_path);
  fn::replay::write_truth_csv(drive.truth, model.network, truth_path);
  std::cout << "wrote " << out_path << " and " << truth_path << " (" << drive.records.size()
            << " records)\n";
  return 0;
}

int cmd_replay(const std::string& model_path, const std::string& log_path,
               const std::string& truth_path, const std::string& out_path,
               std::string report_path, double camera_distance, double gate_threshold) {
  const fn::Model model = load_model_or_die(model_path);
  const auto log = fn::replay::load_log_csv(log_path);
  fn::replay::ReplayConfig config;
  config.wetness = model.config.wetness;
  config.camera_distance_m = camera_distance;
  config.gate.threshold = gate_threshold;
  const auto series = fn::replay::run_replay(model.network, log, config);
  fn::replay::write_posterior_csv(series, out_path);
  std::cout << "wrote " << out_path << " (" << series.steps.size() << " steps)\n";

  if (truth_path.empty()) {
    std::cout << "no ground truth given; report skipped\n";
    return 0;
  }
  const auto truth = fn::replay::load_truth_csv(truth_path, model.network);
  const auto report = fn::replay::replay_report(series, truth);
  if (report_path.empty()) {
    std::filesystem::path p(out_path);
    p.replace_extension();
    report_path = p.string() + "_report.csv";
  }
  fn::replay::write_report_csv(report, report_path);
  std::cout << "wrote " << report_path << "\n";
  auto row = [](const char* name, const fn::replay::ReplayReport::Row& r) {
    std::cout << name << ": acc(P)=" << fn::util::format_fixed(r.acc_pavement, 6)
              << " acc(W)=" << fn::util::format_fixed(r.acc_weather, 6)
              << " H(P)=" << fn::util::format_fixed(r.hellinger_pavement, 6)
              << " H(W)=" << fn::util::format_fixed(r.hellinger_weather, 6) << "\n";
  };
  row("camera", report.camera);
  row("bn", report.bn);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Road-condition Bayesian network toolkit"};
  app.require_subcommand(1);

  std::string model_path;
  app.add_option("-m,--model", model_path, "model definition file")
      ->envname("FRICTIONNET_MODEL");

  auto* validate = app.add_subcommand("validate", "load and validate a model file");

  auto* infer = app.add_subcommand("infer", "posterior distributions for query variables");
  std::vector<std::string> evidence_args, queries;
  infer->add_option("-e,--evidence", evidence_args, "observed VAR=STATE (repeatable)");
  infer->add_option("-q,--query", queries, "query variable (repeatable)")->required();

  auto* eval = app.add_subcommand("eval-domain", "exhaustive sensor-subset evaluation");
  std::string out_path, scenario_path, log_path, truth_path, report_path;
  std::vector<std::string> subset_args;
  bool weighted = false;
  int threads = 0;
  eval->add_option("-o,--out", out_path, "report CSV path")->required();
  eval->add_option("--subsets", subset_args,
                   "restrict to these sensor subsets (comma-joined names; '' = no evidence)");
  eval->add_flag("--weighted", weighted, "also emit probability-weighted means");
  eval->add_option("--threads", threads, "worker threads (0 = auto)");

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic drive");
  std::uint64_t seed = 0;
  double rate = 10.0;
  simulate->add_option("-s,--scenario", scenario_path, "scenario JSON")->required();
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--rate", rate, "sample rate in Hz");
  simulate->add_option("-o,--out", out_path, "sensor log CSV path")->required();
  simulate->add_option("--truth", truth_path, "ground-truth CSV path");

  auto* replay = app.add_subcommand("replay", "stream a sensor log through the network");
  double camera_distance = 6.3, gate_threshold = 0.1;
  replay->add_option("-l,--log", log_path, "sensor log CSV")->required();
  replay->add_option("-t,--truth", truth_path, "ground-truth CSV (enables the report)");
  replay->add_option("-o,--out", out_path, "posterior CSV path")->required();
  replay->add_option("--report", report_path, "report CSV path");
  replay->add_option("--camera-distance", camera_distance, "ROI distance s in meters");
  replay->add_option("--gate-threshold", gate_threshold, "observer sensitivity gate");

  try {
    app.parse(argc, argv);
    if (validate->parsed()) return cmd_validate(model_path);
    if (infer->parsed()) return cmd_infer(model_path, evidence_args, queries);
    if (eval->parsed())
      return cmd_eval_domain(model_path, out_path, subset_args, weighted, threads);
    if (simulate->parsed())
      return cmd_simulate(model_path, scenario_path, seed, rate, out_path, truth_path);
    if (replay->parsed())
      return cmd_replay(model_path, log_path, truth_path, out_path, report_path, camera_distance,
                        gate_threshold);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const fn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
