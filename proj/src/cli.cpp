#include "hodgeflow/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hodgeflow/channel.hpp"
#include "hodgeflow/config.hpp"
#include "hodgeflow/density.hpp"
#include "hodgeflow/grid.hpp"
#include "hodgeflow/solver.hpp"
#include "hodgeflow/sphere.hpp"
#include "hodgeflow/stability.hpp"

namespace hodgeflow {

namespace {

using nlohmann::json;

struct CommonOut {
  std::string out_path;  // empty = stdout
  std::string dump_dir;  // empty = no field dumps
  bool no_timestamp = false;
};

std::string now_utc() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw ValidationError("--out: cannot open for writing: " + out_path);
  f << text;
}

void emit_json(json j, const CommonOut& out) {
  if (!out.no_timestamp) j["timestamp"] = now_utc();
  write_text(j.dump(2) + "\n", out.out_path);
}

// Shortest round-trip decimal form, shared by JSON and CSV output.
std::string fmt(double x) { return json(x).dump(); }

json opt_to_json(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return json(*v);
  return json("none");
}

std::filesystem::path prepare_dump_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("--dump-dir: cannot create " + dir);
  return std::filesystem::path(dir);
}

void dump_scalar_csv(const std::filesystem::path& path, const char* column,
                     std::span<const double> values) {
  std::ofstream f(path);
  if (!f) throw ValidationError("--dump-dir: cannot write " + path.string());
  f << "cell," << column << "\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    f << i << ',' << fmt(values[i]) << "\n";
}

void dump_regimes_csv(const std::filesystem::path& path,
                      const std::vector<FlowRegime>& regimes) {
  std::ofstream f(path);
  if (!f) throw ValidationError("--dump-dir: cannot write " + path.string());
  f << "cell,regime\n";
  for (std::size_t i = 0; i < regimes.size(); ++i)
    f << i << ',' << to_string(regimes[i]) << "\n";
}

json regimes_to_json(const RegimeCounts& c) {
  return json{{"tranquil", c.tranquil}, {"sonic", c.sonic}, {"shooting", c.shooting}};
}

json solve_to_json(const CriticalPointReport& r) {
  return json{{"converged", r.converged},
              {"termination", r.termination},
              {"final_energy", r.final_energy},
              {"gradient_norm", r.gradient_norm},
              {"residual_norm", r.residual_norm},
              {"iterations", r.iterations},
              {"max_q", r.max_q},
              {"min_rho", r.min_rho},
              {"regimes", regimes_to_json(r.regimes)}};
}

json stability_to_json(const StabilityReport& r) {
  json probes = json::array();
  for (const ProbeRecord& p : r.probe_values)
    probes.push_back(json{{"kind", p.kind}, {"index", p.index}, {"value", p.value}});
  return json{{"verdict", r.verdict},
              {"min_value", r.min_value},
              {"max_value", r.max_value},
              {"index_value", r.index_value},
              {"gradient_norm", r.gradient_norm},
              {"near_critical", r.near_critical},
              {"max_q", r.max_q},
              {"seed", r.seed},
              {"probes", probes}};
}

double parse_csv_double(const std::string& s, const std::string& what) {
  double v{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last)
    throw ValidationError(what + ": not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) {
    while (!cur.empty() && (cur.back() == '\r' || cur.back() == ' ')) cur.pop_back();
    std::size_t b = 0;
    while (b < cur.size() && cur[b] == ' ') ++b;
    out.push_back(cur.substr(b));
  }
  return out;
}

// ---- density-table ----------------------------------------------------------

std::string density_table_csv(const DensityModel& model, double qmax, long steps) {
  if (!(qmax > 0.0) || !std::isfinite(qmax))
    throw ValidationError("--qmax: must be positive and finite");
  if (steps < 1 || steps > 10'000'000)
    throw ValidationError("--steps: must be in [1, 1e7]");

  std::vector<double> qs;
  qs.reserve(std::size_t(steps) + 2);
  for (long i = 0; i <= steps; ++i)
    qs.push_back(qmax * double(i) / double(steps));

  const double sup = admissible_q_sup(model);
  std::erase_if(qs, [sup](double q) { return q >= sup; });

  // The sonic transition is the one row readers always look for; sample it
  // exactly when it falls inside the table's range.
  if (const std::optional<double> qc = q_crit(model)) {
    if (*qc <= qmax && *qc < sup) {
      const bool present = std::any_of(qs.begin(), qs.end(), [&](double q) {
        return std::abs(q - *qc) <= 1e-12 * std::max(1.0, *qc);
      });
      if (!present) qs.push_back(*qc);
    }
  }
  std::sort(qs.begin(), qs.end());

  std::ostringstream os;
  os << "Q,rho,e,dQrho2,F,regime\n";
  for (double q : qs) {
    os << fmt(q) << ',' << fmt(rho(model, q)) << ','
       << fmt(variational_density(model, q)) << ','
       << fmt(mass_flux_derivative(model, q)) << ',';
    const std::optional<double> F = froude(model, q);
    if (F)
      os << fmt(*F);
    else
      os << "none";
    os << ',' << to_string(classify(model, q)) << "\n";
  }
  return os.str();
}

// ---- bore -------------------------------------------------------------------

json bore_to_json(const BoreProblem& p, const BoreResult& r) {
  return json{{"inputs", json{{"H", p.H}, {"delta", p.delta}, {"v1", p.v1}, {"g", p.g}}},
              {"epsilon_exact", r.epsilon_exact},
              {"epsilon_linear", r.epsilon_linear},
              {"froude", r.froude},
              {"regime", to_string(r.regime)},
              {"downstream_speed", r.downstream_speed},
              {"incline_ratio", r.incline_ratio},
              {"residuals", json{{"energy", r.energy_residual},
                                 {"continuity", r.continuity_residual},
                                 {"combined", r.combined_residual}}}};
}

std::vector<BoreProblem> load_bore_batch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("--batch: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("--batch: empty file " + path);
  const std::vector<std::string> header = split_csv_row(line);
  const bool with_g = header.size() == 4;
  const bool ok = (header.size() == 3 || with_g) && header[0] == "H" &&
                  header[1] == "delta" && header[2] == "v1" &&
                  (!with_g || header[3] == "g");
  if (!ok)
    throw ValidationError("--batch: header must be 'H,delta,v1' or 'H,delta,v1,g'");

  std::vector<BoreProblem> out;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv_row(line);
    const std::string where = "--batch row " + std::to_string(row);
    if (f.size() != header.size())
      throw ValidationError(where + ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(f.size()));
    BoreProblem p;
    p.H = parse_csv_double(f[0], where + " H");
    p.delta = parse_csv_double(f[1], where + " delta");
    p.v1 = parse_csv_double(f[2], where + " v1");
    if (with_g) p.g = parse_csv_double(f[3], where + " g");
    out.push_back(p);
  }
  if (out.empty()) throw ValidationError("--batch: no data rows in " + path);
  return out;
}

// ---- experiment subcommands ---------------------------------------------------

int cmd_minimize(const std::string& config_path, const CommonOut& out) {
  const ExperimentConfig cfg =
      parse_experiment(load_json_file(config_path), "minimize");
  SphereMap u0 = make_initial_map(cfg.grid, cfg.target_m + 1, cfg.init);
  auto [u, rep] = minimize(cfg.grid, cfg.model, std::move(u0), cfg.options);

  json j = solve_to_json(rep);
  j["command"] = "minimize";
  if (!out.dump_dir.empty()) {
    const std::filesystem::path dir = prepare_dump_dir(out.dump_dir);
    save_sphere_map_csv((dir / "final_map.csv").string(), u);
    const std::vector<double> q = q_field(cfg.grid, differential(cfg.grid, u.f));
    dump_scalar_csv(dir / "q_field.csv", "Q", q);
    auto [regimes, counts] = regime_map(cfg.grid, cfg.model, u);
    (void)counts;
    dump_regimes_csv(dir / "regimes.csv", regimes);
  }
  emit_json(std::move(j), out);
  return rep.converged ? 0 : 3;
}

void dump_probe_fields(const std::filesystem::path& dir, const StabilityReport& rep) {
  for (std::size_t i = 0; i < rep.probe_fields.size(); ++i) {
    const ProbeRecord& r = rep.probe_values[i];
    const std::string name =
        "probe_" + r.kind + "_" + std::to_string(r.index) + ".csv";
    save_ambient_field_csv((dir / name).string(), rep.probe_fields[i]);
  }
}

int cmd_stability(const std::string& config_path, const CommonOut& out) {
  ExperimentConfig cfg = parse_experiment(load_json_file(config_path), "stability");
  cfg.probe_options.keep_probe_fields = !out.dump_dir.empty();

  SphereMap u = make_initial_map(cfg.grid, cfg.target_m + 1, cfg.init);
  json j;
  j["command"] = "stability";
  bool converged = true;
  if (cfg.minimize_first) {
    auto [crit, rep] = minimize(cfg.grid, cfg.model, std::move(u), cfg.options);
    u = std::move(crit);
    j["solve"] = solve_to_json(rep);
    converged = rep.converged;
  }
  const StabilityReport srep = stability_probe(cfg.grid, cfg.model, u, cfg.probe_options);
  json sj = stability_to_json(srep);
  for (auto& [key, value] : sj.items()) j[key] = value;

  if (!out.dump_dir.empty()) {
    const std::filesystem::path dir = prepare_dump_dir(out.dump_dir);
    save_sphere_map_csv((dir / "final_map.csv").string(), u);
    const std::vector<double> q = q_field(cfg.grid, differential(cfg.grid, u.f));
    dump_scalar_csv(dir / "q_field.csv", "Q", q);
    dump_probe_fields(dir, srep);
  }
  emit_json(std::move(j), out);
  return converged ? 0 : 3;
}

int cmd_theorem_check(const std::string& config_path, const CommonOut& out) {
  ExperimentConfig cfg =
      parse_experiment(load_json_file(config_path), "theorem-check");
  cfg.probe_options.keep_probe_fields = !out.dump_dir.empty();

  TheoremExperimentConfig tcfg;
  tcfg.target_m = cfg.target_m;
  tcfg.probe_options = cfg.probe_options;
  tcfg.solve_options = cfg.options;
  tcfg.minimize_first = cfg.minimize_first;

  SphereMap u0 = make_initial_map(cfg.grid, cfg.target_m + 1, cfg.init);
  const TheoremExperimentResult res =
      theorem_experiment(cfg.grid, cfg.model, std::move(u0), tcfg);

  json j{{"command", "theorem-check"},
         {"verdict", res.verdict},
         {"detail", res.detail},
         {"trivial", res.trivial},
         {"solve", solve_to_json(res.solve_report)},
         {"stability", stability_to_json(res.stability_report)}};
  if (!out.dump_dir.empty()) {
    const std::filesystem::path dir = prepare_dump_dir(out.dump_dir);
    dump_probe_fields(dir, res.stability_report);
  }
  emit_json(std::move(j), out);
  return res.verdict == "pass" ? 0 : 3;
}

// ---- dispatch -----------------------------------------------------------------

int dispatch(std::vector<std::string> args) {
  CLI::App app{
      "hodgeflow: density laws, critical points, and stability experiments "
      "for sphere-valued flow potentials on periodic grids"};
  app.require_subcommand(1);

  // density-table
  auto* table = app.add_subcommand(
      "density-table", "Tabulate rho, e, flux derivative, Froude number and "
                       "regime over a range of squared speeds (CSV)");
  std::string table_model;
  double table_qmax = 1.0;
  long table_steps = 10;
  std::string table_out;
  table->add_option("--model", table_model, "density model as JSON")->required();
  table->add_option("--qmax", table_qmax, "largest sampled Q")->required();
  table->add_option("--steps", table_steps, "number of uniform intervals")->required();
  table->add_option("--out", table_out, "write CSV here instead of stdout");

  // classify
  auto* cls = app.add_subcommand(
      "classify", "Classify one squared speed as Tranquil/Sonic/Shooting (JSON)");
  std::string cls_model;
  double cls_q = 0.0;
  double cls_tol = 1e-9;
  CommonOut cls_out;
  cls->add_option("--model", cls_model, "density model as JSON")->required();
  cls->add_option("--q", cls_q, "squared speed to classify")->required();
  cls->add_option("--tol", cls_tol, "sonic band on the flux derivative");
  cls->add_option("--out", cls_out.out_path, "write JSON here instead of stdout");
  cls->add_flag("--no-timestamp", cls_out.no_timestamp, "omit the timestamp field");

  // bore
  auto* bore = app.add_subcommand(
      "bore", "Surface elevation response to a channel floor incline (JSON)");
  double bore_H = 0.0, bore_delta = 0.0, bore_v1 = 0.0, bore_g = 9.80665;
  std::string bore_batch;
  CommonOut bore_out;
  auto* opt_H = bore->add_option("--H", bore_H, "upstream depth");
  auto* opt_delta = bore->add_option("--delta", bore_delta, "floor incline");
  auto* opt_v1 = bore->add_option("--v1", bore_v1, "upstream speed");
  bore->add_option("--g", bore_g, "gravitational acceleration");
  bore->add_option("--batch", bore_batch,
                   "CSV of problems (header H,delta,v1[,g]), one result per row");
  bore->add_option("--out", bore_out.out_path, "write JSON here instead of stdout");
  bore->add_flag("--no-timestamp", bore_out.no_timestamp, "omit the timestamp field");

  // minimize / stability / theorem-check share the config-file interface.
  struct ConfigCmd {
    CLI::App* sub = nullptr;
    std::string config;
    CommonOut out;
  };
  auto add_config_cmd = [&app](const char* name, const char* help) {
    ConfigCmd c;
    c.sub = app.add_subcommand(name, help);
    c.sub->add_option("--config", c.config, "experiment JSON file")->required();
    c.sub->add_option("--out", c.out.out_path, "write JSON here instead of stdout");
    c.sub->add_option("--dump-dir", c.out.dump_dir, "directory for field CSV dumps");
    c.sub->add_flag("--no-timestamp", c.out.no_timestamp, "omit the timestamp field");
    return c;
  };
  ConfigCmd mini = add_config_cmd(
      "minimize", "Drive an initial map to a critical point of the flow energy");
  ConfigCmd stab = add_config_cmd(
      "stability", "Probe the second variation around a (minimized) map");
  ConfigCmd thm = add_config_cmd(
      "theorem-check",
      "Minimize, then verify that only constant critical points are stable");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (table->parsed()) {
    const DensityModel model =
        parse_density_model(parse_json_text(table_model, "--model"));
    write_text(density_table_csv(model, table_qmax, table_steps), table_out);
    return 0;
  }

  if (cls->parsed()) {
    if (!(cls_tol >= 0.0)) throw ValidationError("--tol: must be nonnegative");
    const json mj = parse_json_text(cls_model, "--model");
    const DensityModel model = parse_density_model(mj);
    json j{{"command", "classify"},
           {"model", mj},
           {"q", cls_q},
           {"regime", to_string(classify(model, cls_q, cls_tol))},
           {"mass_flux_derivative", mass_flux_derivative(model, cls_q)},
           {"froude", opt_to_json(froude(model, cls_q))},
           {"q_crit", opt_to_json(q_crit(model))},
           {"cavitation_speed", opt_to_json(cavitation_speed(model))}};
    emit_json(std::move(j), cls_out);
    return 0;
  }

  if (bore->parsed()) {
    json j{{"command", "bore"}};
    if (!bore_batch.empty()) {
      if (*opt_H || *opt_delta || *opt_v1)
        throw ValidationError("--batch: cannot be combined with --H/--delta/--v1");
      json results = json::array();
      for (const BoreProblem& p : load_bore_batch(bore_batch))
        results.push_back(bore_to_json(p, bore_exact(p)));
      j["results"] = std::move(results);
    } else {
      if (!*opt_H || !*opt_delta || !*opt_v1)
        throw ValidationError("bore: --H, --delta and --v1 are required "
                              "(or use --batch)");
      BoreProblem p;
      p.H = bore_H;
      p.delta = bore_delta;
      p.v1 = bore_v1;
      p.g = bore_g;
      const BoreResult r = bore_exact(p);
      json rj = bore_to_json(p, r);
      for (auto& [key, value] : rj.items()) j[key] = value;
    }
    emit_json(std::move(j), bore_out);
    return 0;
  }

  if (mini.sub->parsed()) return cmd_minimize(mini.config, mini.out);
  if (stab.sub->parsed()) return cmd_stability(stab.config, stab.out);
  if (thm.sub->parsed()) return cmd_theorem_check(thm.config, thm.out);

  throw std::logic_error("no subcommand dispatched");
}

}  // namespace

int run_cli(std::vector<std::string> args) {
  try {
    return dispatch(std::move(args));
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(std::size_t(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(std::move(args));
}

}  // namespace hodgeflow
