#include "hodgeflow/sphere.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hodgeflow/util.hpp"

namespace hodgeflow {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double norm(std::span<const double> y) {
  double s = 0.0;
  for (double x : y) s += x * x;
  return std::sqrt(s);
}

void check_unit(std::span<const double> u, const char* what) {
  if (std::abs(norm(u) - 1.0) > 1e-8)
    throw std::invalid_argument(std::string(what) + ": base point is not unit");
}

}  // namespace

void project_in_place(std::span<double> y) {
  double n = norm(y);
  if (n <= kDegenerateNorm)
    throw std::domain_error("project: input too close to the origin");
  double inv = 1.0 / n;
  for (double& x : y) x *= inv;
}

std::vector<double> project(std::span<const double> y) {
  std::vector<double> out(y.begin(), y.end());
  project_in_place(out);
  return out;
}

void tangent_project_in_place(std::span<const double> u, std::span<double> psi) {
  if (u.size() != psi.size())
    throw std::invalid_argument("tangent_project: dimension mismatch");
  check_unit(u, "tangent_project");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * psi[i];
  for (std::size_t i = 0; i < u.size(); ++i) psi[i] -= dot * u[i];
}

std::vector<double> tangent_project(std::span<const double> u,
                                    std::span<const double> psi) {
  std::vector<double> out(psi.begin(), psi.end());
  tangent_project_in_place(u, out);
  return out;
}

std::vector<double> second_fundamental_term(std::span<const double> u,
                                            std::span<const double> du_axes) {
  if (u.empty() || du_axes.size() % u.size() != 0)
    throw std::invalid_argument("second_fundamental_term: dimension mismatch");
  check_unit(u, "second_fundamental_term");
  double q = 0.0;
  for (double x : du_axes) q += x * x;
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = -q * u[i];
  return out;
}

void SphereMap::validate(double tol) const {
  if (f.ambient < 2)
    throw std::invalid_argument("sphere map: ambient dimension must be >= 2");
  for (int c = 0; c < f.cells; ++c) {
    if (std::abs(norm(f.at(c)) - 1.0) > tol)
      throw std::invalid_argument("sphere map: cell " + std::to_string(c) +
                                  " is not unit within tolerance");
  }
}

void SphereMap::renormalize() {
  for (int c = 0; c < f.cells; ++c) project_in_place(f.at(c));
}

SphereMap project_map(const TorusGrid& g, AmbientField raw) {
  if (raw.cells != g.cells())
    throw std::invalid_argument("project_map: field shape mismatch");
  SphereMap u{std::move(raw)};
  u.renormalize();
  return u;
}

void tangent_project_field_in_place(const SphereMap& u, AmbientField& psi) {
  if (psi.cells != u.f.cells || psi.ambient != u.f.ambient)
    throw std::invalid_argument("tangent_project_field: shape mismatch");
  for (int c = 0; c < psi.cells; ++c) {
    auto uc = u.f.at(c);
    auto pc = psi.at(c);
    double dot = 0.0;
    for (std::size_t i = 0; i < uc.size(); ++i) dot += uc[i] * pc[i];
    for (std::size_t i = 0; i < uc.size(); ++i) pc[i] -= dot * uc[i];
  }
}

AmbientField tangent_project_field(const SphereMap& u, const AmbientField& psi) {
  AmbientField out = psi;
  tangent_project_field_in_place(u, out);
  return out;
}

double max_tangency_defect(const SphereMap& u, const AmbientField& psi) {
  if (psi.cells != u.f.cells || psi.ambient != u.f.ambient)
    throw std::invalid_argument("max_tangency_defect: shape mismatch");
  double worst = 0.0;
  for (int c = 0; c < psi.cells; ++c) {
    auto uc = u.f.at(c);
    auto pc = psi.at(c);
    double dot = 0.0;
    for (std::size_t i = 0; i < uc.size(); ++i) dot += uc[i] * pc[i];
    worst = std::max(worst, std::abs(dot));
  }
  return worst;
}

SphereMap constant_map(const TorusGrid& g, std::span<const double> point) {
  if (point.size() < 2)
    throw std::invalid_argument("constant_map: ambient dimension must be >= 2");
  std::vector<double> p = project(point);
  SphereMap u{AmbientField(g.cells(), int(p.size()))};
  for (int c = 0; c < g.cells(); ++c) {
    auto dst = u.f.at(c);
    for (std::size_t i = 0; i < p.size(); ++i) dst[i] = p[i];
  }
  return u;
}

SphereMap circle_wrap(const TorusGrid& g, int ambient, int winding, int axis) {
  if (ambient < 2)
    throw std::invalid_argument("circle_wrap: ambient dimension must be >= 2");
  if (winding == 0) throw std::invalid_argument("circle_wrap: winding must be nonzero");
  if (axis < 0 || axis >= g.dim())
    throw std::invalid_argument("circle_wrap: axis out of range");
  SphereMap u{AmbientField(g.cells(), ambient)};
  const int n = g.size(axis);
  for (int c = 0; c < g.cells(); ++c) {
    int i = g.coords(c)[std::size_t(axis)];
    double theta = kTwoPi * double(winding) * double(i) / double(n);
    auto dst = u.f.at(c);
    dst[0] = std::cos(theta);
    dst[1] = std::sin(theta);
    for (int t = 2; t < ambient; ++t) dst[std::size_t(t)] = 0.0;
  }
  return u;
}

AmbientField smooth_once(const TorusGrid& g, const AmbientField& f) {
  if (f.cells != g.cells())
    throw std::invalid_argument("smooth_once: field shape mismatch");
  AmbientField out(f.cells, f.ambient);
  const double w = 1.0 / double(1 + 2 * g.dim());
  for (int c = 0; c < f.cells; ++c) {
    auto dst = out.at(c);
    auto src = f.at(c);
    for (int t = 0; t < f.ambient; ++t) dst[std::size_t(t)] = src[std::size_t(t)];
    for (int a = 0; a < g.dim(); ++a) {
      auto fw = f.at(g.forward(a)[std::size_t(c)]);
      auto bw = f.at(g.backward(a)[std::size_t(c)]);
      for (int t = 0; t < f.ambient; ++t)
        dst[std::size_t(t)] += fw[std::size_t(t)] + bw[std::size_t(t)];
    }
    for (int t = 0; t < f.ambient; ++t) dst[std::size_t(t)] *= w;
  }
  return out;
}

SphereMap random_perturbation_map(const TorusGrid& g, int ambient,
                                  std::span<const double> base_point,
                                  std::uint64_t seed, double amplitude,
                                  int smoothing_passes) {
  if (int(base_point.size()) != ambient)
    throw std::invalid_argument("random_perturbation_map: base point dimension mismatch");
  if (!(amplitude >= 0.0))
    throw std::invalid_argument("random_perturbation_map: amplitude must be >= 0");
  std::vector<double> p = project(base_point);
  AmbientField eta(g.cells(), ambient);
  GaussianRng rng(mix_seed(seed, 0));
  for (double& x : eta.v) x = rng.next();
  for (int pass = 0; pass < smoothing_passes; ++pass) eta = smooth_once(g, eta);
  double ms = 0.0;
  for (double x : eta.v) ms += x * x;
  double rms = std::sqrt(ms / double(g.cells()));
  double scale = rms > 0.0 ? amplitude / rms : 0.0;
  SphereMap u{AmbientField(g.cells(), ambient)};
  for (int c = 0; c < g.cells(); ++c) {
    auto dst = u.f.at(c);
    auto e = eta.at(c);
    for (int t = 0; t < ambient; ++t)
      dst[std::size_t(t)] = p[std::size_t(t)] + scale * e[std::size_t(t)];
  }
  u.renormalize();
  return u;
}

SphereMap make_initial_map(const TorusGrid& g, int ambient, const InitSpec& spec) {
  if (ambient < 2)
    throw std::invalid_argument("make_initial_map: ambient dimension must be >= 2");
  std::vector<double> point = spec.point;
  if (point.empty()) {
    point.assign(std::size_t(ambient), 0.0);
    point.back() = 1.0;
  }
  if (int(point.size()) != ambient)
    throw std::invalid_argument("make_initial_map: point dimension mismatch");
  switch (spec.kind) {
    case InitSpec::Kind::Constant:
      return constant_map(g, point);
    case InitSpec::Kind::Wrap:
      return circle_wrap(g, ambient, spec.winding);
    case InitSpec::Kind::RandomPerturbation:
      return random_perturbation_map(g, ambient, point, spec.seed, spec.amplitude,
                                     spec.smoothing_passes);
  }
  throw std::invalid_argument("make_initial_map: unknown init kind");
}

void save_sphere_map_csv(const std::string& path, const SphereMap& u) {
  save_ambient_field_csv(path, u.f);
}

void save_ambient_field_csv(const std::string& path, const AmbientField& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "cell";
  for (int t = 0; t < f.ambient; ++t) out << ",u" << t;
  out << "\n";
  out.precision(17);
  for (int c = 0; c < f.cells; ++c) {
    out << c;
    auto row = f.at(c);
    for (double x : row) out << ',' << x;
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

SphereMap load_sphere_map_csv(const std::string& path, const TorusGrid& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("cell", 0) != 0)
    throw std::runtime_error("sphere map csv: missing header in " + path);
  int ambient = -1;
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw std::runtime_error("sphere map csv: bad number at line " +
                                 std::to_string(lineno));
      }
    }
    if (vals.size() < 3)
      throw std::runtime_error("sphere map csv: too few columns at line " +
                               std::to_string(lineno));
    if (ambient < 0) ambient = int(vals.size()) - 1;
    if (int(vals.size()) - 1 != ambient)
      throw std::runtime_error("sphere map csv: ragged row at line " +
                               std::to_string(lineno));
    if (std::llround(vals[0]) != (long long)(rows.size()))
      throw std::runtime_error("sphere map csv: cell index out of order at line " +
                               std::to_string(lineno));
    rows.push_back(std::move(vals));
  }
  if (int(rows.size()) != g.cells())
    throw std::runtime_error("sphere map csv: expected " + std::to_string(g.cells()) +
                             " cells, got " + std::to_string(rows.size()));
  SphereMap u{AmbientField(g.cells(), ambient)};
  for (int c = 0; c < g.cells(); ++c) {
    auto dst = u.f.at(c);
    double n2 = 0.0;
    for (int t = 0; t < ambient; ++t) {
      dst[std::size_t(t)] = rows[std::size_t(c)][std::size_t(t) + 1];
      n2 += dst[std::size_t(t)] * dst[std::size_t(t)];
    }
    double drift = std::abs(std::sqrt(n2) - 1.0);
    if (drift > kRenormalizableDrift)
      throw std::runtime_error("sphere map csv: cell " + std::to_string(c) +
                               " departs from the unit sphere by " +
                               std::to_string(drift));
    // Repair only cells that actually drifted; cells already within the map
    // invariant load back bit for bit.
    if (drift > kUnitNormTol) project_in_place(dst);
  }
  u.validate();
  return u;
}

}  // namespace hodgeflow
