#include "sgm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sgm {

namespace {

using nlohmann::json;

[[noreturn]] void cfg_fail(const std::string& msg) { fail("config_error", msg); }

json parse_json(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) cfg_fail("malformed JSON");
  return j;
}

// Every key of `obj` must be listed in `allowed`; typos surface by name.
void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) cfg_fail(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) cfg_fail("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) cfg_fail(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) cfg_fail(std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

std::uint64_t get_u64(const json& obj, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !v.is_number_integer())
    cfg_fail(std::string("'") + key + "' must be a non-negative integer");
  if (v.is_number_integer() && v.get<long long>() < 0)
    cfg_fail(std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) cfg_fail(std::string("'") + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) cfg_fail(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

GraphSpec parse_graph(const json& j) {
  check_keys(j, "graph", {"kind", "p", "cliques", "rewire_prob", "edge_prob"});
  GraphSpec g;
  const std::string kind = get_string(j, "kind", "small_world");
  if (kind == "small_world")
    g.kind = GraphKind::SmallWorldCliques;
  else if (kind == "chain")
    g.kind = GraphKind::Chain;
  else if (kind == "erdos_renyi")
    g.kind = GraphKind::ErdosRenyi;
  else
    cfg_fail("graph kind '" + kind + "' is not one of small_world, chain, erdos_renyi");
  g.p = get_int(j, "p", g.p);
  g.cliques = get_int(j, "cliques", g.cliques);
  g.rewire_prob = get_number(j, "rewire_prob", g.rewire_prob);
  g.edge_prob = get_number(j, "edge_prob", g.edge_prob);
  return g;
}

ThetaSpec parse_theta(const json& j) {
  check_keys(j, "theta", {"magnitude", "signs", "pd_margin"});
  ThetaSpec t;
  t.magnitude = get_number(j, "magnitude", t.magnitude);
  const std::string signs = get_string(j, "signs", "random");
  if (signs == "random")
    t.signs = SignScheme::RandomSign;
  else if (signs == "positive")
    t.signs = SignScheme::AllPositive;
  else
    cfg_fail("theta signs '" + signs + "' is not one of random, positive");
  t.pd_margin = get_number(j, "pd_margin", t.pd_margin);
  return t;
}

ScenarioSpec parse_scenario_json(const json& j) {
  check_keys(j, "scenario", {"kind", "graph", "theta", "nu_true", "n", "block", "pot"});
  ScenarioSpec s;
  const std::string kind = get_string(j, "kind", "subbotin");
  if (kind == "subbotin")
    s.kind = ScenarioKind::Subbotin;
  else if (kind == "block_maxima")
    s.kind = ScenarioKind::BlockMaxima;
  else if (kind == "pot")
    s.kind = ScenarioKind::Pot;
  else
    cfg_fail("scenario kind '" + kind + "' is not one of subbotin, block_maxima, pot");
  if (j.contains("graph")) s.graph = parse_graph(j.at("graph"));
  if (j.contains("theta")) s.theta = parse_theta(j.at("theta"));
  s.nu_true = get_int(j, "nu_true", s.nu_true);
  s.n = get_int(j, "n", s.n);
  if (j.contains("block")) {
    const json& b = j.at("block");
    check_keys(b, "block", {"n_blocks", "block_size", "gumbel_mean", "filler_corr"});
    s.block.n_blocks = get_int(b, "n_blocks", s.block.n_blocks);
    s.block.block_size = get_int(b, "block_size", s.block.block_size);
    s.block.gumbel_mean = get_number(b, "gumbel_mean", s.block.gumbel_mean);
    s.block.filler_corr = get_number(b, "filler_corr", s.block.filler_corr);
  }
  if (j.contains("pot")) {
    const json& p = j.at("pot");
    check_keys(p, "pot",
               {"n", "threshold", "decay", "branching", "extremes_per_row", "filler_corr"});
    s.pot.n = get_int(p, "n", s.pot.n);
    s.pot.threshold = get_number(p, "threshold", s.pot.threshold);
    s.pot.decay = get_number(p, "decay", s.pot.decay);
    s.pot.branching = get_number(p, "branching", s.pot.branching);
    s.pot.extremes_per_row = get_number(p, "extremes_per_row", s.pot.extremes_per_row);
    s.pot.filler_corr = get_number(p, "filler_corr", s.pot.filler_corr);
  }
  return s;
}

MethodSpec parse_method(const json& j) {
  check_keys(j, "method", {"kind", "nu", "tau", "smoothing", "block_size"});
  const std::string kind = get_string(j, "kind", "");
  if (kind == "subbotin") return MethodSpec::subbotin(get_int(j, "nu", 8));
  if (kind == "gaussian_ns") return MethodSpec::gaussian_ns();
  if (kind == "quantile")
    return MethodSpec::quantile(get_number(j, "tau", 0.5), get_number(j, "smoothing", 1e-3));
  if (kind == "copula") return MethodSpec::copula(get_int(j, "block_size", 10));
  cfg_fail("method kind '" + kind + "' is not one of subbotin, gaussian_ns, quantile, copula");
}

ExperimentConfig parse_experiment_json(const json& j) {
  check_keys(j, "experiment",
             {"scenario", "methods", "replicates", "seed", "rule", "solver", "include_timing",
              "threads"});
  ExperimentConfig c;
  if (j.contains("scenario")) c.scenario = parse_scenario_json(j.at("scenario"));
  if (j.contains("methods")) {
    const json& ms = j.at("methods");
    if (!ms.is_array() || ms.empty()) cfg_fail("'methods' must be a non-empty array");
    c.methods.clear();
    for (const auto& m : ms) c.methods.push_back(parse_method(m));
  } else {
    cfg_fail("'methods' is required");
  }
  c.replicates = get_int(j, "replicates", c.replicates);
  if (c.replicates < 1) cfg_fail("'replicates' must be at least 1");
  c.seed = get_u64(j, "seed", c.seed);
  const std::string rule = get_string(j, "rule", "and");
  if (rule == "and")
    c.rule = CombinationRule::And;
  else if (rule == "or")
    c.rule = CombinationRule::Or;
  else
    cfg_fail("rule '" + rule + "' is not one of and, or");
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "solver", {"tol", "max_iter", "step_shrink", "init_step"});
    c.solver.tol = get_number(s, "tol", c.solver.tol);
    c.solver.max_iter = get_int(s, "max_iter", c.solver.max_iter);
    c.solver.step_shrink = get_number(s, "step_shrink", c.solver.step_shrink);
    c.solver.init_step = get_number(s, "init_step", c.solver.init_step);
  }
  c.include_timing = get_bool(j, "include_timing", c.include_timing);
  c.threads = get_int(j, "threads", c.threads);
  return c;
}

json scenario_json(const ScenarioSpec& s) {
  json j;
  j["kind"] = s.kind == ScenarioKind::Subbotin
                  ? "subbotin"
                  : s.kind == ScenarioKind::BlockMaxima ? "block_maxima" : "pot";
  j["graph"] = {{"kind", s.graph.kind == GraphKind::SmallWorldCliques
                             ? "small_world"
                             : s.graph.kind == GraphKind::Chain ? "chain" : "erdos_renyi"},
                {"p", s.graph.p},
                {"cliques", s.graph.cliques},
                {"rewire_prob", s.graph.rewire_prob},
                {"edge_prob", s.graph.edge_prob}};
  j["theta"] = {{"magnitude", s.theta.magnitude},
                {"signs", s.theta.signs == SignScheme::RandomSign ? "random" : "positive"},
                {"pd_margin", s.theta.pd_margin}};
  j["nu_true"] = s.nu_true;
  j["n"] = s.n;
  j["block"] = {{"n_blocks", s.block.n_blocks},
                {"block_size", s.block.block_size},
                {"gumbel_mean", s.block.gumbel_mean},
                {"filler_corr", s.block.filler_corr}};
  j["pot"] = {{"n", s.pot.n},
              {"threshold", s.pot.threshold},
              {"decay", s.pot.decay},
              {"branching", s.pot.branching},
              {"extremes_per_row", s.pot.extremes_per_row},
              {"filler_corr", s.pot.filler_corr}};
  return j;
}

json method_json(const MethodSpec& m) {
  switch (m.kind) {
    case MethodKind::Subbotin:
      return {{"kind", "subbotin"}, {"nu", m.nu}};
    case MethodKind::GaussianNs:
      return {{"kind", "gaussian_ns"}};
    case MethodKind::Quantile:
      return {{"kind", "quantile"}, {"tau", m.tau}, {"smoothing", m.smoothing}};
    case MethodKind::CopulaBlockMax:
      return {{"kind", "copula"}, {"block_size", m.block_size}};
  }
  cfg_fail("unknown method kind");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io_error", "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& json_text) {
  return parse_scenario_json(parse_json(json_text));
}

ExperimentConfig parse_experiment(const std::string& json_text) {
  return parse_experiment_json(parse_json(json_text));
}

ScenarioSpec load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

ExperimentConfig load_experiment(const std::string& path) {
  return parse_experiment(read_file(path));
}

std::string scenario_to_json(const ScenarioSpec& spec) { return scenario_json(spec).dump(2); }

std::string experiment_to_json(const ExperimentConfig& cfg) {
  json j;
  j["scenario"] = scenario_json(cfg.scenario);
  json ms = json::array();
  for (const auto& m : cfg.methods) ms.push_back(method_json(m));
  j["methods"] = ms;
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.seed;
  j["rule"] = cfg.rule == CombinationRule::And ? "and" : "or";
  j["solver"] = {{"tol", cfg.solver.tol},
                 {"max_iter", cfg.solver.max_iter},
                 {"step_shrink", cfg.solver.step_shrink},
                 {"init_step", cfg.solver.init_step}};
  j["include_timing"] = cfg.include_timing;
  j["threads"] = cfg.threads;
  return j.dump(2);
}

std::uint64_t config_hash(const std::string& canonical_json) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_json) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace sgm
