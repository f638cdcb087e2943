#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "minimax/harness.hpp"
#include "minimax/schedules.hpp"

// JSON config parsing and validation. Unknown keys are hard errors so typos
// cannot silently fall back to defaults.

namespace minimax {

namespace {

using nlohmann::json;

void expect_keys(const json& obj, const std::vector<std::string>& allowed,
                 const std::string& where) {
  if (!obj.is_object())
    throw std::invalid_argument("config: expected an object at " + where);
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw std::invalid_argument("config: unknown key '" + item.key() + "' in " + where);
  }
}

double get_num(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw std::invalid_argument(std::string("config: '") + key + "' must be a number");
  return obj[key].get<double>();
}

long get_int(const json& obj, const char* key, long fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw std::invalid_argument(std::string("config: '") + key + "' must be an integer");
  return obj[key].get<long>();
}

Vec get_vec(const json& arr, const std::string& where) {
  if (!arr.is_array())
    throw std::invalid_argument("config: expected an array at " + where);
  Vec out;
  for (const auto& v : arr) {
    if (!v.is_number())
      throw std::invalid_argument("config: non-numeric entry in " + where);
    out.push_back(v.get<double>());
  }
  return out;
}

FeasibleSet parse_set(const json& obj, const std::string& where) {
  expect_keys(obj, {"type", "lower", "upper", "center", "radius", "dim"}, where);
  const std::string type = obj.at("type").get<std::string>();
  if (type == "box")
    return Box{get_vec(obj.at("lower"), where + ".lower"),
               get_vec(obj.at("upper"), where + ".upper")};
  if (type == "ball")
    return Ball{get_vec(obj.at("center"), where + ".center"),
                obj.at("radius").get<double>()};
  if (type == "simplex") return Simplex{static_cast<int>(obj.at("dim").get<long>())};
  if (type == "unbounded")
    return Unbounded{static_cast<int>(obj.at("dim").get<long>()),
                     get_num(obj, "radius", 0.0)};
  throw std::invalid_argument("config: unknown set type '" + type + "' in " + where);
}

ProxTerm parse_prox(const json& obj, const std::string& where) {
  expect_keys(obj, {"type", "weight", "set"}, where);
  const std::string type = obj.at("type").get<std::string>();
  if (type == "zero") return ZeroTerm{};
  if (type == "l1") return L1Term{obj.at("weight").get<double>()};
  if (type == "indicator") return IndicatorTerm{parse_set(obj.at("set"), where + ".set")};
  throw std::invalid_argument("config: unknown prox type '" + type + "' in " + where);
}

PowerSeq parse_seq(const json& obj, const std::string& where) {
  expect_keys(obj, {"scale", "shift", "num13", "offset"}, where);
  PowerSeq seq;
  seq.scale = get_num(obj, "scale", 1.0);
  seq.shift = get_num(obj, "shift", 2.0);
  seq.num13 = static_cast<int>(get_int(obj, "num13", 5));
  seq.offset = get_num(obj, "offset", 0.0);
  return seq;
}

// L may be the string "auto", resolved against the oracle's Lipschitz bound.
ScheduleConfig parse_schedule(const json& obj, const std::string& where, bool& l_auto) {
  expect_keys(obj, {"mode", "L", "beta", "batch", "a1", "a2", "a4", "a5", "a6",
                    "sequences"},
              where);
  ScheduleConfig sc;
  const std::string mode =
      obj.contains("mode") ? obj.at("mode").get<std::string>() : "theorem";
  if (mode == "theorem")
    sc.mode = ScheduleMode::theorem;
  else if (mode == "manual")
    sc.mode = ScheduleMode::manual;
  else
    throw std::invalid_argument("config: schedule mode must be theorem|manual");

  l_auto = false;
  if (obj.contains("L") && obj["L"].is_string()) {
    if (obj["L"].get<std::string>() != "auto")
      throw std::invalid_argument("config: L must be a number or \"auto\"");
    l_auto = true;
  } else {
    sc.L = get_num(obj, "L", 1.0);
  }
  sc.beta = get_num(obj, "beta", 0.1);
  sc.batch = static_cast<int>(get_int(obj, "batch", 1));
  sc.a1 = get_num(obj, "a1", 0.1);
  sc.a2 = get_num(obj, "a2", 0.1);
  sc.a4 = get_num(obj, "a4", 0.01);
  sc.a5 = get_num(obj, "a5", 1.0);
  sc.a6 = get_num(obj, "a6", 1.0);

  if (sc.mode == ScheduleMode::manual) {
    if (!obj.contains("sequences"))
      throw std::invalid_argument("config: manual schedule needs 'sequences'");
    const auto& seqs = obj["sequences"];
    expect_keys(seqs, {"eta", "alpha", "rho", "gamma", "theta"}, where + ".sequences");
    ManualSchedule m;
    m.eta = parse_seq(seqs.at("eta"), where + ".sequences.eta");
    m.alpha = parse_seq(seqs.at("alpha"), where + ".sequences.alpha");
    m.rho = parse_seq(seqs.at("rho"), where + ".sequences.rho");
    m.gamma = parse_seq(seqs.at("gamma"), where + ".sequences.gamma");
    m.theta = parse_seq(seqs.at("theta"), where + ".sequences.theta");
    sc.manual = m;
  } else if (obj.contains("sequences")) {
    throw std::invalid_argument("config: 'sequences' only valid in manual mode");
  }
  return sc;
}

ProblemConfig parse_problem(const json& obj) {
  expect_keys(obj, {"name", "params"}, "problem");
  const std::string name = obj.at("name").get<std::string>();
  const json params = obj.contains("params") ? obj["params"] : json::object();
  if (name == "quadratic") {
    expect_keys(params,
                {"dx", "dy", "a_min", "a_max", "c_min", "c_max", "b_scale", "noise",
                 "box_halfwidth_x", "box_halfwidth_y", "seed"},
                "problem.params");
    QuadraticProblem p;
    p.spec.dx = static_cast<int>(get_int(params, "dx", 2));
    p.spec.dy = static_cast<int>(get_int(params, "dy", 2));
    p.spec.a_min = get_num(params, "a_min", -1.0);
    p.spec.a_max = get_num(params, "a_max", 1.0);
    p.spec.c_min = get_num(params, "c_min", 0.0);
    p.spec.c_max = get_num(params, "c_max", 1.0);
    p.spec.b_scale = get_num(params, "b_scale", 1.0);
    p.spec.noise = get_num(params, "noise", 0.0);
    p.spec.box_halfwidth_x = get_num(params, "box_halfwidth_x", 10.0);
    p.spec.box_halfwidth_y = get_num(params, "box_halfwidth_y", 10.0);
    p.seed = static_cast<std::uint64_t>(get_int(params, "seed", 7));
    return p;
  }
  if (name == "wgan") {
    expect_keys(params,
                {"real_mean", "real_std", "z_std", "gen_halfwidth", "disc_halfwidth"},
                "problem.params");
    WganProblem p;
    p.real_mean = get_num(params, "real_mean", 0.0);
    p.real_std = get_num(params, "real_std", 0.1);
    p.z_std = get_num(params, "z_std", 1.0);
    p.gen_halfwidth = get_num(params, "gen_halfwidth", 2.0);
    p.disc_halfwidth = get_num(params, "disc_halfwidth", 2.0);
    return p;
  }
  if (name == "robust_multidomain") {
    expect_keys(params, {"synthetic", "csv_paths", "x_halfwidth"}, "problem.params");
    const double halfwidth = get_num(params, "x_halfwidth", 1e3);
    if (params.contains("csv_paths")) {
      if (params.contains("synthetic"))
        throw std::invalid_argument("config: give either csv_paths or synthetic");
      RobustCsvProblem p;
      p.x_halfwidth = halfwidth;
      for (const auto& v : params["csv_paths"]) p.paths.push_back(v.get<std::string>());
      return p;
    }
    const json syn = params.contains("synthetic") ? params["synthetic"] : json::object();
    expect_keys(syn,
                {"domains", "features", "points_per_domain", "separation", "noise_sigma",
                 "flip_rates", "seed"},
                "problem.params.synthetic");
    RobustSyntheticProblem p;
    p.x_halfwidth = halfwidth;
    p.domains = static_cast<int>(get_int(syn, "domains", 3));
    p.features = static_cast<int>(get_int(syn, "features", 5));
    p.points_per_domain = static_cast<int>(get_int(syn, "points_per_domain", 500));
    p.separation = get_num(syn, "separation", 2.0);
    p.noise_sigma = get_num(syn, "noise_sigma", 1.0);
    if (syn.contains("flip_rates"))
      p.flip_rates = get_vec(syn["flip_rates"], "problem.params.synthetic.flip_rates");
    p.seed = static_cast<std::uint64_t>(get_int(syn, "seed", 11));
    return p;
  }
  throw std::invalid_argument("config: unknown problem '" + name + "'");
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "formda") return Algorithm::formda;
  if (s == "formda_ns") return Algorithm::formda_ns;
  if (s == "sgda") return Algorithm::sgda;
  throw std::invalid_argument("config: unknown algorithm '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  expect_keys(root,
              {"problem", "solvers", "seeds", "max_iters", "gap_eval_stride",
               "eval_batch", "output_dir", "record_wall_time", "init"},
              "top level");

  ExperimentConfig cfg;
  if (!root.contains("problem"))
    throw std::invalid_argument("config: missing 'problem'");
  cfg.problem = parse_problem(root["problem"]);

  if (!root.contains("solvers") || !root["solvers"].is_array() ||
      root["solvers"].empty())
    throw std::invalid_argument("config: 'solvers' must be a nonempty array");

  for (const auto& s : root["solvers"]) {
    expect_keys(s,
                {"label", "algorithm", "schedule", "prox_x", "prox_y", "sgda_alpha",
                 "sgda_beta", "batch", "stop_tolerance", "allow_unvalidated"},
                "solver entry");
    SolverEntry entry;
    entry.label = s.at("label").get<std::string>();
    entry.spec.algorithm = parse_algorithm(s.at("algorithm").get<std::string>());
    entry.spec.stop_tolerance = get_num(s, "stop_tolerance", 0.0);
    entry.spec.allow_unvalidated =
        s.contains("allow_unvalidated") && s["allow_unvalidated"].get<bool>();
    bool l_auto = false;
    if (entry.spec.algorithm == Algorithm::sgda) {
      if (s.contains("schedule"))
        throw std::invalid_argument("config: sgda entries take 'batch', not 'schedule'");
      entry.spec.schedule.batch = static_cast<int>(get_int(s, "batch", 1));
      entry.spec.sgda_alpha = get_num(s, "sgda_alpha", 0.05);
      entry.spec.sgda_beta = get_num(s, "sgda_beta", 0.05);
    } else {
      if (!s.contains("schedule"))
        throw std::invalid_argument("config: solver entry needs 'schedule'");
      entry.spec.schedule = parse_schedule(s["schedule"], "schedule", l_auto);
      if (s.contains("prox_x")) entry.spec.prox_x = parse_prox(s["prox_x"], "prox_x");
      if (s.contains("prox_y")) entry.spec.prox_y = parse_prox(s["prox_y"], "prox_y");
    }
    entry.schedule_L_auto = l_auto;
    cfg.solvers.push_back(std::move(entry));
  }

  if (!root.contains("seeds") || !root["seeds"].is_array())
    throw std::invalid_argument("config: 'seeds' must be an array");
  for (const auto& v : root["seeds"])
    cfg.seeds.push_back(static_cast<std::uint64_t>(v.get<long long>()));

  cfg.max_iters = get_int(root, "max_iters", 1000);
  cfg.gap_eval_stride = get_int(root, "gap_eval_stride", 10);
  cfg.eval_batch = static_cast<int>(get_int(root, "eval_batch", 1000));
  if (root.contains("output_dir")) cfg.output_dir = root["output_dir"].get<std::string>();
  if (root.contains("record_wall_time"))
    cfg.record_wall_time = root["record_wall_time"].get<bool>();
  if (root.contains("init")) {
    expect_keys(root["init"], {"x", "y"}, "init");
    if (root["init"].contains("x")) cfg.x0 = get_vec(root["init"]["x"], "init.x");
    if (root["init"].contains("y")) cfg.y0 = get_vec(root["init"]["y"], "init.y");
  }

  // Globals land in every solver spec.
  for (auto& entry : cfg.solvers) {
    entry.spec.max_iters = cfg.max_iters;
    entry.spec.gap_eval_stride = cfg.gap_eval_stride;
    entry.spec.eval_batch = cfg.eval_batch;
    entry.spec.record_wall_time = cfg.record_wall_time;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ConfigReport validate_config(const ExperimentConfig& config) {
  ConfigReport report;
  auto err = [&](std::string m) { report.errors.push_back(std::move(m)); };
  auto warn = [&](std::string m) { report.warnings.push_back(std::move(m)); };

  if (config.seeds.empty()) err("seed list is empty");
  if (config.solvers.empty()) err("no solvers configured");
  if (config.max_iters < 1) err("max_iters must be >= 1");
  if (config.gap_eval_stride < 1) err("gap_eval_stride must be >= 1");
  if (config.eval_batch < 1) err("eval_batch must be >= 1");

  int dx = -1, dy = -1;
  std::unique_ptr<StochasticOracle> oracle;
  try {
    oracle = make_problem(config.problem);
    dx = oracle->dx();
    dy = oracle->dy();
  } catch (const std::exception& e) {
    err(std::string("problem not constructible: ") + e.what());
  }
  if (config.x0 && dx >= 0 && static_cast<int>(config.x0->size()) != dx)
    err("init.x dimension mismatch");
  if (config.y0 && dy >= 0 && static_cast<int>(config.y0->size()) != dy)
    err("init.y dimension mismatch");

  for (const auto& entry : config.solvers) {
    const std::string tag = "solver '" + entry.label + "': ";
    if (entry.label.empty()) err("solver label empty");
    if (entry.spec.schedule.batch < 1) err(tag + "batch must be >= 1");
    if (entry.spec.algorithm == Algorithm::sgda) {
      if (!(entry.spec.sgda_alpha > 0.0) || !(entry.spec.sgda_beta > 0.0))
        err(tag + "sgda stepsizes must be positive");
      continue;
    }
    try {
      validate(entry.spec.prox_x);
      validate(entry.spec.prox_y);
    } catch (const std::exception& e) {
      err(tag + e.what());
    }
    if (entry.spec.schedule.mode == ScheduleMode::manual) {
      if (!entry.spec.schedule.manual) {
        err(tag + "manual mode without sequences");
      } else if (!entry.spec.allow_unvalidated) {
        err(tag + "manual schedule requires allow_unvalidated");
      } else {
        warn(tag + "manual schedule: theorem constraints waived");
      }
      continue;
    }
    ScheduleConfig resolved = entry.spec.schedule;
    if (entry.schedule_L_auto && oracle)
      resolved.L = smoothness_from_lipschitz(oracle->lipschitz_estimate());
    const auto sched_report = validate_constraints(resolved);
    if (!sched_report.ok) {
      std::string failed;
      for (const auto& c : sched_report.checks)
        if (!c.ok) failed += (failed.empty() ? "" : "; ") + c.name;
      if (entry.spec.allow_unvalidated)
        warn(tag + "constraints failed with override: " + failed);
      else
        err(tag + "constraint violated: " + failed);
    }
  }

  report.ok = report.errors.empty();
  return report;
}

}  // namespace minimax
