#include "mhdlab/diagnostics.hpp"

#include "mhdlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mhdlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double magnetic_energy(const Discretization& disc, const EdgeField& B) {
  const Mesh& m = disc.mesh();
  double s = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& c = m.cell(k);
    Eigen::VectorXd b(c.faces.size());
    for (std::size_t j = 0; j < c.faces.size(); ++j) b[j] = B[c.faces[j]];
    s += 0.5 * b.dot(disc.edge_mass(k) * b);
  }
  return s;
}

// Normal face velocity used by the transport fluxes of either scheme.
double transport_velocity(const Discretization& disc, const DiscreteState& s, int face) {
  return disc.variant() == Variant::scheme1 ? face_velocity(disc.mesh(), s.u, face)
                                            : face_velocity(disc.mesh(), s.uhat, face);
}

CellField velocity_divergence(const Discretization& disc, const DiscreteState& s) {
  return disc.variant() == Variant::scheme1 ? div_h(disc.mesh(), s.u) : div_h_pc(disc.mesh(), s.uhat);
}

std::vector<Mat2> velocity_gradient(const Discretization& disc, const DiscreteState& s) {
  return disc.variant() == Variant::scheme1 ? grad_h(disc.mesh(), s.u) : grad_h_pc(disc.mesh(), s.uhat);
}

Vec2 velocity_at(const Discretization& disc, const DiscreteState& s, int cell, const Point& x) {
  return disc.variant() == Variant::scheme1 ? cr_value(disc.mesh(), s.u, cell, x) : s.uhat[cell];
}

}  // namespace

double total_mass(const Mesh& m, const CellField& rho) {
  double s = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) s += m.cell(k).measure * rho[k];
  return s;
}

EnergyParts energy_parts(const Discretization& disc, const DiscreteState& s) {
  const Mesh& m = disc.mesh();
  const Params& p = disc.params();
  EnergyParts e;
  for (int k = 0; k < m.num_cells(); ++k) {
    const double vol = m.cell(k).measure;
    e.kinetic += 0.5 * vol * s.rho[k] * s.uhat[k].squaredNorm();
    e.internal += vol * pressure_potential(p, s.rho[k]);
  }
  e.magnetic = magnetic_energy(disc, s.B);
  return e;
}

double total_energy(const Discretization& disc, const DiscreteState& s) { return energy_parts(disc, s).total(); }

EnergyReport energy_report(const Discretization& disc, const DiscreteState& prev, const DiscreteState& next) {
  const Mesh& m = disc.mesh();
  const Params& p = disc.params();
  const double dt = next.t - prev.t;
  if (!(dt > 0.0)) throw std::invalid_argument("energy_report: states are not consecutive in time");
  const double he = p.diffusion();

  EnergyReport r;
  r.t = next.t;
  r.dt = dt;
  r.energy = energy_parts(disc, next);
  const double e_prev = energy_parts(disc, prev).total();

  const auto div = velocity_divergence(disc, next);
  const auto w = curl_h(m, next.B);
  if (disc.variant() == Variant::scheme1) {
    const auto g = grad_h(m, next.u);
    for (int k = 0; k < m.num_cells(); ++k) {
      const double vol = m.cell(k).measure;
      r.viscous += vol * (p.mu * g[k].squaredNorm() + p.nu() * div[k] * div[k]);
    }
  } else {
    for (const auto& f : m.faces()) {
      r.viscous += p.mu * f.measure * (next.uhat[f.out] - next.uhat[f.in]).squaredNorm() / f.dsigma;
    }
    for (int k = 0; k < m.num_cells(); ++k) r.viscous += (p.mu + p.lambda) * m.cell(k).measure * div[k] * div[k];
  }
  for (int k = 0; k < m.num_cells(); ++k) r.resistive += p.alpha * m.cell(k).measure * w[k] * w[k];

  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& c = m.cell(k);
    const Vec2 du = (next.uhat[k] - prev.uhat[k]) / dt;
    r.D[0] += 0.5 * dt * c.measure * prev.rho[k] * du.squaredNorm();
    Eigen::VectorXd db(c.faces.size());
    for (std::size_t j = 0; j < c.faces.size(); ++j) db[j] = (next.B[c.faces[j]] - prev.B[c.faces[j]]) / dt;
    r.D[1] += 0.5 * dt * db.dot(disc.edge_mass(k) * db);
    r.D[2] += c.measure * bregman(p, prev.rho[k], next.rho[k]) / dt;
  }

  r.min_face_D4 = std::numeric_limits<double>::max();
  r.min_face_D5 = std::numeric_limits<double>::max();
  for (int s = 0; s < m.num_faces(); ++s) {
    const auto& f = m.face(s);
    if (f.exterior()) continue;
    const double us = transport_velocity(disc, next, s);
    const double ri = next.rho[f.in], ro = next.rho[f.out];
    const double up = us >= 0.0 ? ri : ro;
    const double down = us >= 0.0 ? ro : ri;
    const double d4 = f.measure * (0.5 * up * std::abs(us) + he * 0.5 * (ri + ro)) *
                      (next.uhat[f.out] - next.uhat[f.in]).squaredNorm();
    const double d5 = f.measure * (he * (ro - ri) * (pressure_potential_d1(p, ro) - pressure_potential_d1(p, ri)) +
                                   std::abs(us) * bregman(p, up, down));
    r.D[3] += d4;
    r.D[4] += d5;
    r.min_face_D4 = std::min(r.min_face_D4, d4);
    r.min_face_D5 = std::min(r.min_face_D5, d5);
  }

  double dissipation = r.viscous + r.resistive;
  for (double d : r.D) dissipation += d;
  r.residual = std::abs((r.energy.total() - e_prev) / dt + dissipation);
  r.slack = r.energy.total() + dt * (r.viscous + r.resistive) - e_prev;
  return r;
}

RenormalizedBalance renormalized_balance(const Discretization& disc, const DiscreteState& prev,
                                         const DiscreteState& next) {
  const Mesh& m = disc.mesh();
  const double dt = next.t - prev.t;
  const double he = disc.params().diffusion();
  const auto div = velocity_divergence(disc, next);
  RenormalizedBalance b;
  for (int k = 0; k < m.num_cells(); ++k) {
    const double vol = m.cell(k).measure;
    const double r = next.rho[k], r0 = prev.rho[k];
    b.lhs += vol * ((r * r - r0 * r0) / dt + r * r * div[k]);
    b.rhs -= vol * dt * ((r - r0) / dt) * ((r - r0) / dt);
  }
  for (int s = 0; s < m.num_faces(); ++s) {
    const auto& f = m.face(s);
    if (f.exterior()) continue;
    const double j = next.rho[f.out] - next.rho[f.in];
    b.rhs -= f.measure * 2.0 * j * j * (he + 0.5 * std::abs(transport_velocity(disc, next, s)));
  }
  return b;
}

double relative_energy(const Discretization& disc, const DiscreteState& s, const ScalarFn& r, const VectorFn& U,
                       const VectorFn& b) {
  const Mesh& m = disc.mesh();
  const Params& p = disc.params();
  double acc = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) {
    const double rho = s.rho[k];
    for (const auto& q : cell_rule(m, k, 5)) {
      const double rq = r(q.x);
      if (!(rq > 0.0)) throw std::invalid_argument("relative_energy: reference density must be positive");
      acc += q.w * (0.5 * rho * (s.uhat[k] - U(q.x)).squaredNorm() +
                    0.5 * (edge_value(m, s.B, k, q.x) - b(q.x)).squaredNorm() + bregman(p, rho, rq));
    }
  }
  return acc;
}

std::vector<double> weak_divergence(const Mesh& m, const EdgeField& B) {
  std::vector<double> out(m.num_vertices(), 0.0);
  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& c = m.cell(k);
    const int nl = static_cast<int>(c.faces.size());
    Eigen::VectorXd b(nl);
    for (int j = 0; j < nl; ++j) b[j] = B[c.faces[j]];
    const Eigen::VectorXd mb = mhdlab::edge_mass(m, k) * b;
    for (int v : c.vertices) {
      // edge dofs of grad(hat_v) on this cell
      double s = 0.0;
      for (int j = 0; j < nl; ++j) {
        const auto& f = m.face(c.faces[j]);
        const double g = ((f.vertices[1] == v) - (f.vertices[0] == v)) / f.measure;
        s += g * mb[j];
      }
      out[v] += s;
    }
  }
  for (int v = 0; v < m.num_vertices(); ++v)
    if (m.boundary_vertex(v)) out[v] = 0.0;
  return out;
}

double weak_divfree_residual(const Mesh& m, const EdgeField& B) {
  double r = 0.0;
  for (double v : weak_divergence(m, B)) r = std::max(r, std::abs(v));
  return r;
}

// ---------------------------------------------------------------------------

Dual sin(Dual a) {
  const double c = std::cos(a.v);
  return {std::sin(a.v), c * a.dx, c * a.dy};
}

Dual cos(Dual a) {
  const double s = -std::sin(a.v);
  return {std::cos(a.v), s * a.dx, s * a.dy};
}

namespace {

constexpr double k2Pi = 2.0 * kPi;

Dual box_bump(Dual x, Dual y) {
  const Dual sx = sin(kPi * x), sy = sin(kPi * y);
  return sx * sx * sy * sy;
}

}  // namespace

TestFamily default_test_family(Variant variant) {
  TestFamily f;
  // Six low-frequency trigonometric profiles shared by all equations.
  const std::vector<DualScalar> trig = {
      [](Dual x, Dual) { return sin(k2Pi * x); },
      [](Dual, Dual y) { return cos(k2Pi * y); },
      [](Dual x, Dual y) { return sin(k2Pi * x) * cos(k2Pi * y); },
      [](Dual x, Dual y) { return cos(k2Pi * (x + y)); },
      [](Dual x, Dual y) { return sin(k2Pi * x) * sin(2.0 * k2Pi * y); },
      [](Dual x, Dual y) { return cos(2.0 * k2Pi * x) * cos(k2Pi * y) + sin(k2Pi * y); },
  };
  f.phi = trig;
  if (variant == Variant::scheme2) {
    for (int i = 0; i < 6; ++i) {
      f.v.push_back({trig[i], trig[(i + 1) % 6]});
      f.C.push_back({trig[(i + 2) % 6], trig[(i + 3) % 6]});
    }
    f.psi = trig;  // each profile has zero mean on the torus
    return f;
  }
  for (int i = 0; i < 6; ++i) {
    const DualScalar a = trig[i], b = trig[(i + 1) % 6];
    f.v.push_back({[a](Dual x, Dual y) { return box_bump(x, y) * (1.0 + 0.5 * a(x, y)); },
                   [b](Dual x, Dual y) { return box_bump(x, y) * b(x, y); }});
    // C1 vanishes on y = 0, 1 and C2 on x = 0, 1: zero tangential trace
    const DualScalar c1 = trig[(i + 2) % 6], c2 = trig[(i + 3) % 6];
    f.C.push_back({[c1](Dual x, Dual y) { return sin(kPi * y) * (1.0 + 0.5 * c1(x, y)); },
                   [c2](Dual x, Dual y) { return sin(kPi * x) * c2(x, y); }});
    f.psi.push_back([a](Dual x, Dual y) { return sin(kPi * x) * sin(kPi * y) * (1.0 + 0.5 * a(x, y)); });
  }
  return f;
}

namespace {

struct Sampled {
  Point x;
  double w;
  Dual a, b;  // scalar value, or the two components of a vector
};

// Test function values at the degree-5 quadrature points of every cell.
template <class Eval>
std::vector<std::vector<Sampled>> sample(const Mesh& m, Eval eval) {
  std::vector<std::vector<Sampled>> out(m.num_cells());
  for (int k = 0; k < m.num_cells(); ++k) {
    for (const auto& q : cell_rule(m, k, 5)) {
      const Dual X(q.x.x(), 1.0, 0.0), Y(q.x.y(), 0.0, 1.0);
      auto [a, b] = eval(X, Y);
      out[k].push_back({q.x, q.w, a, b});
    }
  }
  return out;
}

}  // namespace

ConsistencyLevel consistency_residuals(const Discretization& disc, const std::vector<DiscreteState>& states,
                                       const TestFamily& family) {
  if (states.size() < 2) throw std::invalid_argument("consistency_residuals: need at least two time levels");
  const Mesh& m = disc.mesh();
  const Params& p = disc.params();
  const double T = states.back().t;
  auto theta = [T](double t) { return 0.5 * (1.0 + std::cos(kPi * t / T)); };
  auto Theta = [T](double a, double b) {
    return 0.5 * (b - a) + T / (2.0 * kPi) * (std::sin(kPi * b / T) - std::sin(kPi * a / T));
  };
  const int nc = m.num_cells();

  // Per-level cell data reused by every family member.
  struct LevelData {
    std::vector<Mat2> S;
    CellField w;
  };
  std::vector<LevelData> lv(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto g = velocity_gradient(disc, states[k]);
    lv[k].S.resize(nc);
    for (int c = 0; c < nc; ++c) lv[k].S[c] = stress(p, g[c]);
    lv[k].w = curl_h(m, states[k].B);
  }

  ConsistencyLevel out;
  out.h = m.h();

  for (const auto& phi : family.phi) {
    const auto smp = sample(m, [&](Dual x, Dual y) { return std::pair{phi(x, y), Dual()}; });
    auto space = [&](const DiscreteState& s, double& mass, double& flux) {
      mass = flux = 0.0;
      for (int c = 0; c < nc; ++c)
        for (const auto& q : smp[c]) {
          mass += q.w * s.rho[c] * q.a.v;
          flux += q.w * s.rho[c] * velocity_at(disc, s, c, q.x).dot(Vec2(q.a.dx, q.a.dy));
        }
    };
    double mass0, flux0;
    space(states[0], mass0, flux0);
    double acc = theta(0.0) * mass0;
    for (std::size_t k = 1; k < states.size(); ++k) {
      double mass, flux;
      space(states[k], mass, flux);
      const double ta = states[k - 1].t, tb = states[k].t;
      acc += (theta(tb) - theta(ta)) * mass + Theta(ta, tb) * flux;
    }
    out.e[0] = std::max(out.e[0], std::abs(acc));
  }

  for (const auto& v : family.v) {
    const auto smp = sample(m, [&](Dual x, Dual y) { return std::pair{v.x(x, y), v.y(x, y)}; });
    auto space = [&](std::size_t k, double& mass, double& rest) {
      const auto& s = states[k];
      mass = rest = 0.0;
      for (int c = 0; c < nc; ++c) {
        const Vec2 mom = s.rho[c] * s.uhat[c];
        const double pc = pressure(p, s.rho[c]);
        for (const auto& q : smp[c]) {
          const Vec2 val(q.a.v, q.b.v);
          Mat2 gv;  // gv(a, b) = d_b v_a
          gv << q.a.dx, q.a.dy, q.b.dx, q.b.dy;
          const Vec2 uq = velocity_at(disc, s, c, q.x);
          const Vec2 bq = edge_value(m, s.B, c, q.x);
          mass += q.w * mom.dot(val);
          rest += q.w * ((mom * uq.transpose()).cwiseProduct(gv).sum() + pc * gv.trace() -
                         lv[k].S[c].cwiseProduct(gv).sum() + lv[k].w[c] * Vec2(-bq.y(), bq.x()).dot(val));
        }
      }
    };
    double mass0, rest0;
    space(0, mass0, rest0);
    double acc = theta(0.0) * mass0;
    for (std::size_t k = 1; k < states.size(); ++k) {
      double mass, rest;
      space(k, mass, rest);
      const double ta = states[k - 1].t, tb = states[k].t;
      acc += (theta(tb) - theta(ta)) * mass + Theta(ta, tb) * rest;
    }
    out.e[1] = std::max(out.e[1], std::abs(acc));
  }

  for (const auto& C : family.C) {
    const auto smp = sample(m, [&](Dual x, Dual y) { return std::pair{C.x(x, y), C.y(x, y)}; });
    auto space = [&](std::size_t k, double& mass, double& rest) {
      const auto& s = states[k];
      mass = rest = 0.0;
      for (int c = 0; c < nc; ++c)
        for (const auto& q : smp[c]) {
          const Vec2 bq = edge_value(m, s.B, c, q.x);
          const double curlC = q.b.dx - q.a.dy;
          mass += q.w * bq.dot(Vec2(q.a.v, q.b.v));
          rest += q.w * (-p.alpha * lv[k].w[c] + cross2(velocity_at(disc, s, c, q.x), bq)) * curlC;
        }
    };
    double mass0, rest0;
    space(0, mass0, rest0);
    double acc = theta(0.0) * mass0;
    for (std::size_t k = 1; k < states.size(); ++k) {
      double mass, rest;
      space(k, mass, rest);
      const double ta = states[k - 1].t, tb = states[k].t;
      acc += (theta(tb) - theta(ta)) * mass + Theta(ta, tb) * rest;
    }
    out.e[2] = std::max(out.e[2], std::abs(acc));
  }

  for (const auto& psi : family.psi) {
    const auto smp = sample(m, [&](Dual x, Dual y) { return std::pair{psi(x, y), Dual()}; });
    for (const auto& s : states) {
      double acc = 0.0;
      for (int c = 0; c < nc; ++c)
        for (const auto& q : smp[c]) acc += q.w * edge_value(m, s.B, c, q.x).dot(Vec2(q.a.dx, q.a.dy));
      out.e[3] = std::max(out.e[3], std::abs(acc));
    }
  }
  return out;
}

std::optional<double> eoc(const std::vector<double>& errors, const std::vector<double>& h) {
  if (errors.size() != h.size() || errors.size() < 2) {
    throw std::invalid_argument("eoc: need matching error and h lists with at least two levels");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0)) return std::nullopt;
    if (!(h[i] > 0.0)) throw std::invalid_argument("eoc: mesh sizes must be positive");
    const double x = std::log(h[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

void write_energy_header(std::ostream& os) {
  os << "t,kinetic,internal,magnetic,viscous,resistive,D1,D2,D3,D4,D5,residual,mass,min_density,divfree_residual\n";
}

void write_energy_row(std::ostream& os, const EnergyReport& r, double mass, double min_density,
                      double divfree_residual) {
  os << std::setprecision(17) << r.t << ',' << r.energy.kinetic << ',' << r.energy.internal << ','
     << r.energy.magnetic << ',' << r.viscous << ',' << r.resistive;
  for (double d : r.D) os << ',' << d;
  os << ',' << r.residual << ',' << mass << ',' << min_density << ',' << divfree_residual << '\n';
}

void write_energy_initial(std::ostream& os, double t, const EnergyParts& e, double mass, double min_density,
                          double divfree_residual) {
  os << std::setprecision(17) << t << ',' << e.kinetic << ',' << e.internal << ',' << e.magnetic
     << ",0,0,0,0,0,0,0,0," << mass << ',' << min_density << ',' << divfree_residual << '\n';
}

void write_eoc_table(std::ostream& os, const std::vector<ConsistencyLevel>& levels) {
  os << "h,e1,e2,e3,e4,eoc1,eoc2,eoc3,eoc4\n" << std::setprecision(17);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    os << levels[l].h;
    for (double e : levels[l].e) os << ',' << e;
    for (int i = 0; i < 4; ++i) {
      os << ',';
      if (l == 0) continue;
      const auto r = eoc({levels[l - 1].e[i], levels[l].e[i]}, {levels[l - 1].h, levels[l].h});
      if (r) os << *r;
      else os << "exact";
    }
    os << '\n';
  }
  if (levels.size() >= 2) {
    os << "fit,,,,";
    for (int i = 0; i < 4; ++i) {
      std::vector<double> e, h;
      for (const auto& lvl : levels) {
        e.push_back(lvl.e[i]);
        h.push_back(lvl.h);
      }
      const auto r = eoc(e, h);
      os << ',';
      if (r) os << *r;
      else os << "exact";
    }
    os << '\n';
  }
}

}  // namespace mhdlab
