#include "hodgeflow/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace hodgeflow {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& constraint) {
  throw ValidationError(field + ": " + constraint);
}

void require_object(const json& j, const std::string& name) {
  if (!j.is_object()) fail(name, "must be a JSON object");
}

void check_allowed_keys(const json& j, const std::string& name,
                        const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) fail(name + "." + key, "unknown field");
  }
}

const json& require_key(const json& j, const std::string& name,
                        const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) fail(name + "." + key, "required field is missing");
  return *it;
}

double get_double(const json& j, const std::string& name, const std::string& key) {
  const json& v = require_key(j, name, key);
  if (!v.is_number()) fail(name + "." + key, "must be a number");
  return v.get<double>();
}

double get_double_or(const json& j, const std::string& name, const std::string& key,
                     double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) fail(name + "." + key, "must be a number");
  return v.get<double>();
}

long get_integer(const json& j, const std::string& name, const std::string& key) {
  const json& v = require_key(j, name, key);
  if (!v.is_number_integer()) fail(name + "." + key, "must be an integer");
  return v.get<long>();
}

long get_integer_or(const json& j, const std::string& name, const std::string& key,
                    long fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(name + "." + key, "must be an integer");
  return v.get<long>();
}

std::uint64_t get_seed_or(const json& j, const std::string& name,
                          const std::string& key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0))
    fail(name + "." + key, "must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool get_bool_or(const json& j, const std::string& name, const std::string& key,
                 bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(name + "." + key, "must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& name,
                       const std::string& key) {
  const json& v = require_key(j, name, key);
  if (!v.is_string()) fail(name + "." + key, "must be a string");
  return v.get<std::string>();
}

DensityModel parse_model_inner(const json& j, const std::string& name, bool allow_tension) {
  require_object(j, name);
  const std::string type = get_string(j, name, "type");
  if (type == "polytropic") {
    check_allowed_keys(j, name, {"type", "gamma"});
    const double gamma = get_double(j, name, "gamma");
    if (!(gamma > 1.0)) fail(name + ".gamma", "must be greater than 1");
    return Polytropic{gamma};
  }
  if (type == "shallow") {
    check_allowed_keys(j, name, {"type", "C"});
    const double C = get_double(j, name, "C");
    if (!(C > 0.0)) fail(name + ".C", "must be positive");
    return Shallow{C};
  }
  if (type == "limiting_exponential") {
    check_allowed_keys(j, name, {"type"});
    return LimitingExponential{};
  }
  if (type == "incompressible") {
    check_allowed_keys(j, name, {"type"});
    return Incompressible{};
  }
  if (type == "surface_tension") {
    if (!allow_tension)
      fail(name + ".type", "surface_tension cannot be its own base");
    check_allowed_keys(j, name, {"type", "base", "mu"});
    const double mu = get_double(j, name, "mu");
    if (!(mu >= 0.0)) fail(name + ".mu", "must be nonnegative");
    const DensityModel base =
        parse_model_inner(require_key(j, name, "base"), name + ".base", false);
    WithSurfaceTension st;
    st.mu = mu;
    if (const auto* v = std::get_if<Polytropic>(&base)) st.base = *v;
    else if (const auto* s = std::get_if<Shallow>(&base)) st.base = *s;
    else if (const auto* l = std::get_if<LimitingExponential>(&base)) st.base = *l;
    else st.base = std::get<Incompressible>(base);
    return st;
  }
  fail(name + ".type",
       "must be one of polytropic, shallow, limiting_exponential, "
       "incompressible, surface_tension");
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw ValidationError(what + ": not valid JSON");
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config file: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), "config file " + path);
}

DensityModel parse_density_model(const json& j) {
  DensityModel m = parse_model_inner(j, "model", true);
  validate_model(m);
  return m;
}

TorusGrid parse_grid(const json& j) {
  require_object(j, "grid");
  check_allowed_keys(j, "grid", {"n", "sizes", "period"});
  const long n = get_integer(j, "grid", "n");
  if (n != 1 && n != 2) fail("grid.n", "must be 1 or 2");

  const json& sizes_j = require_key(j, "grid", "sizes");
  if (!sizes_j.is_array() || sizes_j.size() != std::size_t(n))
    fail("grid.sizes", "must be an array of length n");
  std::vector<int> sizes;
  for (const json& v : sizes_j) {
    if (!v.is_number_integer()) fail("grid.sizes", "entries must be integers");
    const long s = v.get<long>();
    if (s < 4 || s > 1 << 20) fail("grid.sizes", "entries must be in [4, 2^20]");
    sizes.push_back(int(s));
  }

  std::vector<double> period(std::size_t(n), 2.0 * std::numbers::pi);
  if (j.contains("period")) {
    const json& per_j = j.at("period");
    if (!per_j.is_array() || per_j.size() != std::size_t(n))
      fail("grid.period", "must be an array of length n");
    period.clear();
    for (const json& v : per_j) {
      if (!v.is_number()) fail("grid.period", "entries must be numbers");
      const double p = v.get<double>();
      if (!(p > 0.0) || !std::isfinite(p))
        fail("grid.period", "entries must be positive and finite");
      period.push_back(p);
    }
  }
  return TorusGrid(std::move(sizes), std::move(period));
}

InitSpec parse_init(const json& j) {
  require_object(j, "init");
  const std::string type = get_string(j, "init", "type");
  InitSpec spec;
  if (type == "constant") {
    check_allowed_keys(j, "init", {"type", "point"});
    spec.kind = InitSpec::Kind::Constant;
  } else if (type == "wrap") {
    check_allowed_keys(j, "init", {"type", "winding"});
    spec.kind = InitSpec::Kind::Wrap;
    const long w = get_integer_or(j, "init", "winding", 1);
    if (w == 0 || w < -1000 || w > 1000)
      fail("init.winding", "must be a nonzero integer in [-1000, 1000]");
    spec.winding = int(w);
  } else if (type == "random_perturbation") {
    check_allowed_keys(j, "init",
                       {"type", "point", "seed", "amplitude", "smoothing_passes"});
    spec.kind = InitSpec::Kind::RandomPerturbation;
    spec.seed = get_seed_or(j, "init", "seed", 0);
    spec.amplitude = get_double_or(j, "init", "amplitude", 0.1);
    if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude))
      fail("init.amplitude", "must be nonnegative and finite");
    const long sp = get_integer_or(j, "init", "smoothing_passes", 2);
    if (sp < 0 || sp > 64) fail("init.smoothing_passes", "must be in [0, 64]");
    spec.smoothing_passes = int(sp);
  } else {
    fail("init.type", "must be one of constant, wrap, random_perturbation");
  }
  if (j.contains("point")) {
    const json& pt = j.at("point");
    if (!pt.is_array() || pt.empty())
      fail("init.point", "must be a non-empty array of numbers");
    for (const json& v : pt) {
      if (!v.is_number()) fail("init.point", "entries must be numbers");
      spec.point.push_back(v.get<double>());
    }
  }
  return spec;
}

SolveOptions parse_solve_options(const json& j) {
  require_object(j, "options");
  check_allowed_keys(j, "options",
                     {"max_iterations", "gradient_norm_tolerance", "initial_step",
                      "backtracking_factor", "sufficient_decrease", "q_max", "seed"});
  SolveOptions opts;
  opts.max_iterations = get_integer_or(j, "options", "max_iterations",
                                       opts.max_iterations);
  opts.gradient_norm_tolerance = get_double_or(
      j, "options", "gradient_norm_tolerance", opts.gradient_norm_tolerance);
  opts.initial_step = get_double_or(j, "options", "initial_step", opts.initial_step);
  opts.backtracking_factor =
      get_double_or(j, "options", "backtracking_factor", opts.backtracking_factor);
  opts.sufficient_decrease =
      get_double_or(j, "options", "sufficient_decrease", opts.sufficient_decrease);
  if (j.contains("q_max")) {
    const double qm = get_double(j, "options", "q_max");
    if (!(qm > 0.0)) fail("options.q_max", "must be positive");
    opts.q_max = qm;
  }
  opts.seed = get_seed_or(j, "options", "seed", opts.seed);
  try {
    validate_options(opts);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("options: ") + e.what());
  }
  return opts;
}

ExperimentConfig parse_experiment(const json& j, const std::string& subcommand) {
  require_object(j, "config");
  std::set<std::string> allowed = {"version", "grid", "model", "target_m", "init"};
  const bool probing = subcommand == "stability" || subcommand == "theorem-check";
  allowed.insert("options");
  if (probing) {
    allowed.insert("probes");
    allowed.insert("probe_seed");
    allowed.insert("t_step");
    allowed.insert("minimize_first");
  }
  check_allowed_keys(j, "config", allowed);

  const long version = get_integer(j, "config", "version");
  if (version != 1) fail("config.version", "must be 1");

  const long target_m = get_integer(j, "config", "target_m");
  const long min_m = subcommand == "theorem-check" ? 2 : 1;
  if (target_m < min_m || target_m > 15)
    fail("config.target_m",
         "must be an integer in [" + std::to_string(min_m) + ", 15]");

  ExperimentConfig cfg{
      parse_grid(require_key(j, "config", "grid")),
      parse_density_model(require_key(j, "config", "model")),
      int(target_m),
      parse_init(require_key(j, "config", "init")),
      SolveOptions{},
      StabilityOptions{},
      true};

  if (j.contains("options")) cfg.options = parse_solve_options(j.at("options"));
  if (!cfg.init.point.empty() &&
      int(cfg.init.point.size()) != cfg.target_m + 1)
    fail("init.point", "must have target_m + 1 components");

  if (probing) {
    const long probes = get_integer_or(j, "config", "probes", 8);
    if (probes < 0 || probes > 4096) fail("config.probes", "must be in [0, 4096]");
    cfg.probe_options.probes = int(probes);
    cfg.probe_options.seed = get_seed_or(j, "config", "probe_seed", 0);
    cfg.probe_options.t_step = get_double_or(j, "config", "t_step", 1e-4);
    if (!(cfg.probe_options.t_step > 0.0) || !std::isfinite(cfg.probe_options.t_step))
      fail("config.t_step", "must be positive and finite");
    cfg.minimize_first = get_bool_or(j, "config", "minimize_first", true);
  }
  return cfg;
}

}  // namespace hodgeflow
