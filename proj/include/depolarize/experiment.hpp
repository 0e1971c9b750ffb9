#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "depolarize/dynamics.hpp"
#include "depolarize/error.hpp"
#include "depolarize/generators.hpp"
#include "depolarize/graph.hpp"
#include "depolarize/io.hpp"
#include "depolarize/isoperimetric.hpp"
#include "depolarize/planner.hpp"
#include "depolarize/rng.hpp"
#include "depolarize/spectral.hpp"

namespace depolarize {

using nlohmann::json;

/// Budget token resolved against the (preprocessed) vertex count: floor(n/2).
struct HalfN {};
using Budget = std::variant<std::size_t, HalfN>;

inline std::size_t resolve_budget(const Budget& b, std::size_t n) {
  if (std::holds_alternative<HalfN>(b)) return n / 2;
  return std::get<std::size_t>(b);
}

inline std::string_view to_string(CandidateMode m) { return m == CandidateMode::all ? "all" : "nonedges"; }
inline std::string_view to_string(CheegerMode m) { return m == CheegerMode::exact ? "exact" : "sweep"; }

inline CheegerMode default_cheeger_mode(std::size_t n) {
  return n <= kExactCheegerLimit ? CheegerMode::exact : CheegerMode::sweep;
}

struct ExperimentConfig {
  std::optional<std::string> graph_path;
  std::optional<GraphModel> generator;
  std::optional<std::string> opinions_path;
  std::optional<OpinionModel> opinion_model;  ///< used with a generator when no opinions file is given
  std::vector<Heuristic> heuristics;
  Budget budget = HalfN{};
  std::uint64_t seed = 0;
  double w_max = 1.0;
  CandidateMode candidates = CandidateMode::nonedges;
  std::optional<CheegerMode> h_mode;  ///< default: exact for n <= 20, sweep otherwise
  double radius = 1.0;                ///< adversarial radius R for worst-case reports
  std::size_t random_repeats = 1;     ///< extra seeds for the random baseline
  unsigned threads = 1;
  std::string output_dir = ".";
};

// ---------------------------------------------------------------------------
// Spec strings: "er:n=1000,p=0.02", "sbm:n=1000,p_in=0.05,q_out=0.005",
// "pa:n=1000,m=5"; opinions "uniform", "beta:1,5,5,1", "file:<path>".

namespace detail {

inline std::map<std::string, std::string> parse_kv(std::string_view body, std::string_view what) {
  std::map<std::string, std::string> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    const std::size_t end = std::min(body.find(',', start), body.size());
    const std::string_view item = body.substr(start, end - start);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError(std::string(what) + ": expected key=value, got '" + std::string(item) + "'");
    out.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    start = end + 1;
  }
  return out;
}

template <class T>
T take(std::map<std::string, std::string>& kv, const std::string& key, std::string_view what) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError(std::string(what) + ": missing '" + key + "'");
  const auto value = io::detail::parse_number<T>(it->second);
  if (!value) throw ConfigError(std::string(what) + ": bad value for '" + key + "'");
  kv.erase(it);
  return *value;
}

inline void no_extra(const std::map<std::string, std::string>& kv, std::string_view what) {
  if (!kv.empty()) throw ConfigError(std::string(what) + ": unknown key '" + kv.begin()->first + "'");
}

}  // namespace detail

inline GraphModel parse_graph_model(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("graph model must look like 'er:n=100,p=0.1'");
  const std::string_view kind = text.substr(0, colon);
  auto kv = detail::parse_kv(text.substr(colon + 1), kind);
  GraphModel model;
  if (kind == "er") {
    model = ErdosRenyi{detail::take<std::size_t>(kv, "n", kind), detail::take<double>(kv, "p", kind)};
  } else if (kind == "sbm") {
    model = TwoBlockSbm{detail::take<std::size_t>(kv, "n", kind), detail::take<double>(kv, "p_in", kind),
                        detail::take<double>(kv, "q_out", kind)};
  } else if (kind == "pa") {
    model = PreferentialAttachment{detail::take<std::size_t>(kv, "n", kind), detail::take<std::size_t>(kv, "m", kind)};
  } else {
    throw ConfigError("unknown graph model '" + std::string(kind) + "'");
  }
  detail::no_extra(kv, kind);
  try {
    validate(GeneratorSpec{model, Uniform01{}});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return model;
}

inline OpinionModel parse_opinion_model(std::string_view text) {
  if (text == "uniform") return Uniform01{};
  if (text.substr(0, 5) == "file:") return FromFile{std::string(text.substr(5))};
  if (text.substr(0, 5) == "beta:") {
    std::vector<double> params;
    std::string_view rest = text.substr(5);
    while (!rest.empty()) {
      const std::size_t comma = std::min(rest.find(','), rest.size());
      const auto x = io::detail::parse_number<double>(rest.substr(0, comma));
      if (!x || !(*x > 0.0)) throw ConfigError("beta opinion model needs positive parameters");
      params.push_back(*x);
      rest.remove_prefix(std::min(comma + 1, rest.size()));
    }
    if (params.size() != 4) throw ConfigError("beta opinion model needs four parameters a1,b1,a2,b2");
    return BetaByBlock{params[0], params[1], params[2], params[3]};
  }
  throw ConfigError("unknown opinion model '" + std::string(text) + "'");
}

/// Opinions a generator uses when none are given: Beta(1,5)/Beta(5,1) by
/// block for the SBM, uniform otherwise.
inline OpinionModel default_opinion_model(const GraphModel& model) {
  if (std::holds_alternative<TwoBlockSbm>(model)) return BetaByBlock{};
  return Uniform01{};
}

inline json to_json(const GraphModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ErdosRenyi>) return {{"kind", "erdos_renyi"}, {"n", m.n}, {"p", m.p}};
        if constexpr (std::is_same_v<M, TwoBlockSbm>)
          return {{"kind", "sbm_two_block"}, {"n", m.n}, {"p_in", m.p_in}, {"q_out", m.q_out},
                  {"block_sizes", {first_block_size(m.n), m.n - first_block_size(m.n)}},
                  {"block_convention", "vertices [0, ceil(n/2)) form block 0"}};
        if constexpr (std::is_same_v<M, PreferentialAttachment>)
          return {{"kind", "preferential_attachment"}, {"n", m.n}, {"m", m.m},
                  {"seed_clique", m.m + 1},
                  {"attachment", "m distinct targets, sequential draws proportional to degree"}};
      },
      model);
}

inline json to_json(const OpinionModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Uniform01>) return {{"kind", "uniform01"}};
        if constexpr (std::is_same_v<M, BetaByBlock>)
          return {{"kind", "beta_by_block"}, {"a1", m.a1}, {"b1", m.b1}, {"a2", m.a2}, {"b2", m.b2}};
        if constexpr (std::is_same_v<M, FromFile>) return {{"kind", "from_file"}, {"path", m.path}};
      },
      model);
}

inline json generator_sidecar(const GeneratorSpec& spec, std::uint64_t seed, const GeneratedInstance& inst) {
  return {{"graph_model", to_json(spec.graph)},
          {"opinion_model", to_json(spec.opinions)},
          {"seed", seed},
          {"rng", "mt19937_64"},
          {"n", inst.graph.n()},
          {"m", inst.graph.edge_count()},
          {"blocks", inst.blocks}};
}

// ---------------------------------------------------------------------------
// Reports

inline json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

/// One-shot metrics for a graph and innate opinions.
inline json metrics_report(const Graph& g, const Opinions& s, CheegerMode h_mode, double radius = 1.0) {
  check_dimensions(g, s, "metrics");
  const Opinions z = equilibrium_opinions(g, s);
  const double gap = spectral_gap(g);
  json out = {{"n", g.n()},
              {"m", g.edge_count()},
              {"w_max", g.w_max()},
              {"innate_polarization", polarization(s)},
              {"polarization", polarization(z)},
              {"spectral_gap", gap},
              {"assortativity", optional_number(opinion_assortativity(g, s))},
              {"complete_graph_floor", complete_graph_floor(s, g.w_max())},
              {"radius", radius},
              {"worst_case_polarization", worst_case_polarization(gap, radius)}};
  if (g.n() >= 2) {
    const ContractionBounds b = polarization_bounds(g, s, h_mode);
    out["polarization_bounds"] = {{"lower", b.lower},
                                  {"upper", b.upper},
                                  {"isoperimetric", b.isoperimetric},
                                  {"h_mode", to_string(b.h_mode)},
                                  {"upper_is_heuristic", b.upper_is_heuristic}};
  }
  return out;
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
  auto cell = [](const std::optional<double>& x) { return x ? io::format_double(*x) : std::string(); };
  out << "step,i,j,weight_added,polarization,spectral_gap,assortativity\n";
  out << "0,,,," << io::format_double(t.initial.polarization) << ',' << io::format_double(t.initial.spectral_gap)
      << ',' << cell(t.initial.assortativity) << '\n';
  for (const InterventionStep& s : t.steps) {
    out << s.step_index << ',' << s.edge.i << ',' << s.edge.j << ',' << io::format_double(s.weight_added) << ','
        << io::format_double(s.after.polarization) << ',' << io::format_double(s.after.spectral_gap) << ','
        << cell(s.after.assortativity) << '\n';
  }
}

inline json metrics_json(const StepMetrics& m, double radius) {
  return {{"polarization", m.polarization},
          {"spectral_gap", m.spectral_gap},
          {"assortativity", optional_number(m.assortativity)},
          {"worst_case_polarization", worst_case_polarization(m.spectral_gap, radius)}};
}

struct ExperimentInput {
  Graph graph;
  Opinions opinions;
};

/// Loads or generates the graph and opinions named by the config.
inline ExperimentInput load_input(const ExperimentConfig& cfg) {
  if (cfg.graph_path.has_value() == cfg.generator.has_value())
    throw ConfigError("exactly one of a graph file or a generator must be given");
  if (!(cfg.w_max > 0.0)) throw ConfigError("w_max must be positive");
  if (cfg.graph_path) {
    if (!cfg.opinions_path) throw ConfigError("an opinions file is required with a graph file");
    Graph g = io::read_edge_list(*cfg.graph_path, cfg.w_max);
    Opinions s = io::read_opinions(*cfg.opinions_path);
    check_dimensions(g, s, "run");
    return {std::move(g), std::move(s)};
  }
  if (cfg.w_max != 1.0) throw ConfigError("generated graphs are unweighted; w_max must be 1");
  GeneratorSpec spec{*cfg.generator, cfg.opinion_model.value_or(default_opinion_model(*cfg.generator))};
  if (cfg.opinions_path) spec.opinions = FromFile{*cfg.opinions_path};
  Rng rng(cfg.seed);
  GeneratedInstance inst = generate(spec, rng);
  return {std::move(inst.graph), std::move(inst.opinions)};
}

/// Runs every configured heuristic from the same initial graph, writing
/// `<heuristic>_trajectory.csv` files and `summary.json` into output_dir.
/// Returns the summary.
inline json run_experiment(const ExperimentConfig& cfg) {
  if (cfg.heuristics.empty()) throw ConfigError("at least one heuristic is required");
  if (!(cfg.radius > 0.0)) throw ConfigError("radius must be positive");
  if (cfg.random_repeats == 0) throw ConfigError("random repeats must be at least 1");
  ExperimentInput input = load_input(cfg);
  const Graph& g = input.graph;
  const Opinions& s = input.opinions;
  const std::size_t budget = resolve_budget(cfg.budget, g.n());
  const CheegerMode h_mode = cfg.h_mode.value_or(default_cheeger_mode(g.n()));
  if (h_mode == CheegerMode::exact && g.n() > kExactCheegerLimit)
    throw ConfigError("exact h mode is limited to n <= " + std::to_string(kExactCheegerLimit));

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output_dir + ": " + ec.message());
  const std::filesystem::path dir(cfg.output_dir);

  PlannerOptions opts;
  opts.candidates = cfg.candidates;
  opts.threads = cfg.threads;

  json summary = {{"n", g.n()},
                  {"m", g.edge_count()},
                  {"budget", budget},
                  {"seed", cfg.seed},
                  {"w_max", g.w_max()},
                  {"candidates", to_string(cfg.candidates)},
                  {"radius", cfg.radius},
                  {"innate_polarization", polarization(s)},
                  {"complete_graph_floor", complete_graph_floor(s, g.w_max())}};
  if (g.n() >= 2) {
    const ContractionBounds b = polarization_bounds(g, s, h_mode);
    summary["polarization_bounds"] = {{"lower", b.lower},
                                      {"upper", b.upper},
                                      {"isoperimetric", b.isoperimetric},
                                      {"h_mode", to_string(h_mode)},
                                      {"upper_is_heuristic", b.upper_is_heuristic}};
  }

  auto write_csv = [&](const std::string& name, const Trajectory& t) {
    const auto path = (dir / name).string();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    write_trajectory_csv(out, t);
    if (!out) throw IoError("write failed for " + path);
  };

  json per_heuristic = json::object();
  for (Heuristic h : cfg.heuristics) {
    const std::string name(to_string(h));
    const std::size_t repeats = h == Heuristic::random ? cfg.random_repeats : 1;
    json entry;
    json per_seed = json::array();
    double mean_pol = 0.0, mean_gap = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      const std::uint64_t seed = cfg.seed + r;
      Rng rng(seed);
      const Trajectory t = run_budgeted(g, s, h, budget, rng, opts);
      write_csv(r == 0 ? name + "_trajectory.csv" : name + "_r" + std::to_string(r) + "_trajectory.csv", t);
      if (r == 0) {
        entry = {{"steps_executed", t.steps.size()},
                 {"initial", metrics_json(t.initial, cfg.radius)},
                 {"final", metrics_json(t.final_metrics(), cfg.radius)}};
      }
      per_seed.push_back({{"seed", seed}, {"final", metrics_json(t.final_metrics(), cfg.radius)}});
      mean_pol += t.final_metrics().polarization;
      mean_gap += t.final_metrics().spectral_gap;
    }
    if (repeats > 1) {
      entry["per_seed"] = per_seed;
      entry["mean_final"] = {{"polarization", mean_pol / static_cast<double>(repeats)},
                             {"spectral_gap", mean_gap / static_cast<double>(repeats)}};
    }
    per_heuristic[name] = entry;
  }
  summary["heuristics"] = per_heuristic;

  const auto summary_path = (dir / "summary.json").string();
  std::ofstream out(summary_path);
  if (!out) throw IoError("cannot write " + summary_path);
  out << summary.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + summary_path);
  return summary;
}

}  // namespace depolarize
