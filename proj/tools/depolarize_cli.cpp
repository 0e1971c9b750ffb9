#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "depolarize/depolarize.hpp"

namespace dp = depolarize;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kIo = 3, kNumeric = 4, kDimension = 5 };

unsigned threads_from_env() {
  const char* raw = std::getenv("DEPOLARIZE_THREADS");
  if (raw == nullptr || *raw == '\0') return 1;
  const auto value = dp::io::detail::parse_number<unsigned>(raw);
  if (!value) throw dp::ConfigError("DEPOLARIZE_THREADS must be a non-negative integer");
  return *value;
}

dp::Budget parse_budget(const std::string& text) {
  if (text == "half_n") return dp::HalfN{};
  const auto k = dp::io::detail::parse_number<std::size_t>(text);
  if (!k) throw dp::ConfigError("budget must be a non-negative integer or 'half_n'");
  return *k;
}

dp::CandidateMode parse_candidates(const std::string& text) {
  if (text == "nonedges") return dp::CandidateMode::nonedges;
  if (text == "all") return dp::CandidateMode::all;
  throw dp::ConfigError("candidates must be 'nonedges' or 'all'");
}

std::optional<dp::CheegerMode> parse_h_mode(const std::string& text) {
  if (text.empty() || text == "auto") return std::nullopt;
  if (text == "exact") return dp::CheegerMode::exact;
  if (text == "sweep") return dp::CheegerMode::sweep;
  throw dp::ConfigError("h-mode must be 'exact', 'sweep' or 'auto'");
}

struct RunArgs {
  std::string graph, generate, opinions, opinion_model, budget = "half_n", candidates = "nonedges", h_mode, out = ".";
  std::vector<std::string> heuristics;
  std::uint64_t seed = 0;
  double w_max = 1.0, radius = 1.0;
  std::size_t random_repeats = 1;
};

int run(const RunArgs& a) {
  dp::ExperimentConfig cfg;
  if (!a.graph.empty()) cfg.graph_path = a.graph;
  if (!a.generate.empty()) cfg.generator = dp::parse_graph_model(a.generate);
  if (!a.opinions.empty()) cfg.opinions_path = a.opinions;
  if (!a.opinion_model.empty()) cfg.opinion_model = dp::parse_opinion_model(a.opinion_model);
  if (a.heuristics.empty()) {
    cfg.heuristics.assign(dp::kAllHeuristics.begin(), dp::kAllHeuristics.end());
  } else {
    for (const auto& name : a.heuristics) {
      const auto h = dp::parse_heuristic(name);
      if (!h) throw dp::ConfigError("unknown heuristic '" + name + "'");
      cfg.heuristics.push_back(*h);
    }
  }
  cfg.budget = parse_budget(a.budget);
  cfg.seed = a.seed;
  cfg.w_max = a.w_max;
  cfg.candidates = parse_candidates(a.candidates);
  cfg.h_mode = parse_h_mode(a.h_mode);
  cfg.radius = a.radius;
  cfg.random_repeats = a.random_repeats;
  cfg.threads = threads_from_env();
  cfg.output_dir = a.out;
  const dp::json summary = dp::run_experiment(cfg);
  for (const auto& [name, entry] : summary["heuristics"].items()) {
    std::cout << name << ": " << entry["steps_executed"] << " steps, polarization "
              << entry["initial"]["polarization"] << " -> " << entry["final"]["polarization"] << '\n';
  }
  return kOk;
}

struct GenerateArgs {
  std::string model, opinion_model, out_graph, out_opinions, sidecar;
  std::uint64_t seed = 0;
};

int generate(const GenerateArgs& a) {
  dp::GeneratorSpec spec{dp::parse_graph_model(a.model), dp::Uniform01{}};
  spec.opinions = a.opinion_model.empty() ? dp::default_opinion_model(spec.graph) : dp::parse_opinion_model(a.opinion_model);
  dp::Rng rng(a.seed);
  const dp::GeneratedInstance inst = dp::generate(spec, rng);
  dp::io::write_edge_list(a.out_graph, inst.graph);
  dp::io::write_opinions(a.out_opinions, inst.opinions);
  const std::string sidecar = a.sidecar.empty() ? a.out_graph + ".json" : a.sidecar;
  std::ofstream out(sidecar);
  if (!out) throw dp::IoError("cannot write " + sidecar);
  out << dp::generator_sidecar(spec, a.seed, inst).dump(2) << '\n';
  if (!out) throw dp::IoError("write failed for " + sidecar);
  return kOk;
}

struct MetricsArgs {
  std::string graph, opinions, h_mode;
  double w_max = 1.0, radius = 1.0;
};

int metrics(const MetricsArgs& a) {
  const dp::Graph g = dp::io::read_edge_list(a.graph, a.w_max);
  const dp::Opinions s = dp::io::read_opinions(a.opinions);
  dp::check_dimensions(g, s, "metrics");
  const dp::CheegerMode mode = parse_h_mode(a.h_mode).value_or(dp::default_cheeger_mode(g.n()));
  if (mode == dp::CheegerMode::exact && g.n() > dp::kExactCheegerLimit)
    throw dp::ConfigError("exact h mode is limited to n <= 20");
  std::cout << dp::metrics_report(g, s, mode, a.radius).dump(2) << '\n';
  return kOk;
}

struct PreprocessArgs {
  std::string graph, opinions, out_graph, out_opinions, mapping;
  double w_max = 1.0;
};

int preprocess(const PreprocessArgs& a) {
  const dp::Graph g = dp::io::read_edge_list(a.graph, a.w_max);
  const dp::Opinions s = dp::io::read_opinions(a.opinions);
  const dp::io::Preprocessed p = dp::io::drop_isolated(g, s);
  dp::io::write_edge_list(a.out_graph, p.graph);
  dp::io::write_opinions(a.out_opinions, p.opinions);
  std::cerr << "dropped " << g.n() - p.graph.n() << " isolated vertices: n " << g.n() << " -> " << p.graph.n()
            << ", m " << p.graph.edge_count() << '\n';
  if (!a.mapping.empty()) {
    std::ofstream out(a.mapping);
    if (!out) throw dp::IoError("cannot write " + a.mapping);
    out << "new_id,original_id\n";
    for (std::size_t k = 0; k < p.original_ids.size(); ++k) out << k << ',' << p.original_ids[k] << '\n';
    if (!out) throw dp::IoError("write failed for " + a.mapping);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization-reducing edge interventions under Friedkin-Johnsen dynamics"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run the budgeted planner for one or more heuristics");
  auto* graph_opt = run_cmd->add_option("--graph", run_args.graph, "Edge-list file");
  auto* gen_opt = run_cmd->add_option("--generate", run_args.generate, "Generator, e.g. sbm:n=200,p_in=0.05,q_out=0.005");
  graph_opt->excludes(gen_opt);
  run_cmd->add_option("--opinions", run_args.opinions, "Innate opinions file");
  run_cmd->add_option("--opinion-model", run_args.opinion_model, "uniform | beta:a1,b1,a2,b2 (generated graphs)");
  run_cmd->add_option("--heuristic", run_args.heuristics, "random | ds | cd | fd (repeatable; default all)");
  run_cmd->add_option("--budget", run_args.budget, "Number of saturations or half_n")->capture_default_str();
  run_cmd->add_option("--seed", run_args.seed, "RNG seed")->capture_default_str();
  run_cmd->add_option("--w-max", run_args.w_max, "Weight cap")->capture_default_str();
  run_cmd->add_option("--candidates", run_args.candidates, "nonedges | all")->capture_default_str();
  run_cmd->add_option("--h-mode", run_args.h_mode, "exact | sweep (default: exact for n <= 20)");
  run_cmd->add_option("--radius", run_args.radius, "Adversarial radius R")->capture_default_str();
  run_cmd->add_option("--random-repeats", run_args.random_repeats, "Seeds for the random baseline")->capture_default_str();
  run_cmd->add_option("--out", run_args.out, "Output directory")->capture_default_str();

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "Sample a synthetic graph and opinions");
  gen_cmd->add_option("--model", gen_args.model, "er:n=..,p=.. | sbm:n=..,p_in=..,q_out=.. | pa:n=..,m=..")->required();
  gen_cmd->add_option("--opinion-model", gen_args.opinion_model, "uniform | beta:a1,b1,a2,b2");
  gen_cmd->add_option("--seed", gen_args.seed, "RNG seed")->capture_default_str();
  gen_cmd->add_option("--out-graph", gen_args.out_graph, "Edge-list output")->required();
  gen_cmd->add_option("--out-opinions", gen_args.out_opinions, "Opinions output")->required();
  gen_cmd->add_option("--sidecar", gen_args.sidecar, "JSON sidecar (default: <out-graph>.json)");

  MetricsArgs metrics_args;
  auto* metrics_cmd = app.add_subcommand("metrics", "Print graph and opinion metrics as JSON");
  metrics_cmd->add_option("--graph", metrics_args.graph, "Edge-list file")->required();
  metrics_cmd->add_option("--opinions", metrics_args.opinions, "Innate opinions file")->required();
  metrics_cmd->add_option("--w-max", metrics_args.w_max, "Weight cap")->capture_default_str();
  metrics_cmd->add_option("--h-mode", metrics_args.h_mode, "exact | sweep");
  metrics_cmd->add_option("--radius", metrics_args.radius, "Adversarial radius R")->capture_default_str();

  PreprocessArgs pre_args;
  auto* pre_cmd = app.add_subcommand("preprocess", "Drop isolated vertices and renumber");
  pre_cmd->add_option("--graph", pre_args.graph, "Edge-list file")->required();
  pre_cmd->add_option("--opinions", pre_args.opinions, "Innate opinions file")->required();
  pre_cmd->add_option("--out-graph", pre_args.out_graph, "Edge-list output")->required();
  pre_cmd->add_option("--out-opinions", pre_args.out_opinions, "Opinions output")->required();
  pre_cmd->add_option("--mapping", pre_args.mapping, "CSV of new_id,original_id");
  pre_cmd->add_option("--w-max", pre_args.w_max, "Weight cap")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*gen_cmd) return generate(gen_args);
    if (*metrics_cmd) return metrics(metrics_args);
    if (*pre_cmd) return preprocess(pre_args);
  } catch (const dp::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const dp::DimensionError& e) {
    std::cerr << "dimension mismatch: " << e.what() << '\n';
    return kDimension;
  } catch (const dp::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::logic_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}
