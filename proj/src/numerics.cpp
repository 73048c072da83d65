#include "mhdlab/numerics.hpp"

#include "mhdlab/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mhdlab {

const char* to_string(Variant v) { return v == Variant::scheme1 ? "scheme1" : "scheme2"; }

double Params::diffusion() const { return std::pow(h, epsilon); }

void check_params(const Params& p) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(p.mu > 0.0, "mu must be positive");
  require(p.lambda >= 0.0, "lambda must be nonnegative");
  require(p.alpha > 0.0, "alpha must be positive");
  require(p.a > 0.0, "a must be positive");
  require(p.gamma > 1.0, "gamma must exceed 1");
  require(p.h > 0.0 && p.dt > 0.0, "dt and h must be positive");
  const double c = p.dt / p.h;
  require(c >= 0.1 - 1e-12 && c <= 10.0 + 1e-12, "dt/h must lie in [0.1, 10]");
}

namespace {

void require_density(double rho, const char* what) {
  if (!(rho >= 0.0)) {
    std::ostringstream os;
    os << what << ": negative density " << rho;
    throw std::domain_error(os.str());
  }
}

}  // namespace

double pressure(const Params& p, double rho) {
  require_density(rho, "pressure");
  return p.a * std::pow(rho, p.gamma);
}

double pressure_potential(const Params& p, double rho) {
  require_density(rho, "pressure_potential");
  return p.a / (p.gamma - 1.0) * std::pow(rho, p.gamma);
}

double pressure_potential_d1(const Params& p, double rho) {
  require_density(rho, "pressure_potential");
  return p.a * p.gamma / (p.gamma - 1.0) * std::pow(rho, p.gamma - 1.0);
}

double pressure_potential_d2(const Params& p, double rho) {
  require_density(rho, "pressure_potential");
  return p.a * p.gamma * std::pow(rho, p.gamma - 2.0);
}

double bregman(const Params& p, double x, double y) {
  // For gamma = 2 the expression collapses to a (x - y)^2; use it to avoid cancellation.
  if (p.gamma == 2.0) return p.a * (x - y) * (x - y);
  return pressure_potential(p, x) - pressure_potential(p, y) - pressure_potential_d1(p, y) * (x - y);
}

Mat2 stress(const Params& p, const Mat2& g) {
  const double div = g.trace();
  return p.mu * (g + g.transpose() - (2.0 / p.d) * div * Mat2::Identity()) + p.lambda * div * Mat2::Identity();
}

std::optional<std::string> validate_epsilon(double gamma, int d, double eps, Variant v) {
  std::ostringstream os;
  if (v == Variant::scheme1) {
    const double lo = 4.0 * d / (1.0 + 3.0 * d);
    if (!(gamma > lo)) {
      os << "gamma = " << gamma << " must exceed 4d/(1+3d) = " << lo << " for scheme1";
      return os.str();
    }
  } else if (!(gamma > 1.0)) {
    os << "gamma = " << gamma << " must exceed 1";
    return os.str();
  }
  if (gamma >= 2.0) {
    if (eps > 0.0) return std::nullopt;
    os << "epsilon = " << eps << " outside the admissible interval (0, inf) for gamma >= 2";
    return os.str();
  }
  const double hi = 2.0 * gamma - 1.0 - d / 3.0;
  if (eps > 0.0 && eps < hi) return std::nullopt;
  os << "epsilon = " << eps << " outside the admissible interval (0, " << hi << ") for gamma = " << gamma;
  return os.str();
}

Vec2 edge_integral(const Mesh& m, const EdgeField& b, int cell) {
  const auto& c = m.cell(cell);
  if (c.coords.size() == 3) {
    Vec2 s = Vec2::Zero();
    for (const auto& q : midpoint_rule(m, cell)) s += q.w * edge_value(m, b, cell, q.x);
    return s;
  }
  // bottom/top carry the x-component, left/right the y-component; each is linear across the cell
  return c.measure * Vec2(0.5 * (b[c.faces[0]] + b[c.faces[1]]), 0.5 * (b[c.faces[2]] + b[c.faces[3]]));
}

std::vector<Vec2> lorentz(const Mesh& m, const EdgeField& B, const EdgeField& B_old) {
  const auto w = curl_h(m, B);
  if (m.periodic()) {
    std::vector<Vec2> out(m.num_cells());
    for (int k = 0; k < m.num_cells(); ++k) {
      const Vec2 b = edge_integral(m, B_old, k);
      out[k] = w[k] * Vec2(-b.y(), b.x());
    }
    return out;
  }
  // The integrand is quadratic; the edge-midpoint rule is exact and the CR
  // basis function of face l is 1 at its own midpoint and 0 at the other two.
  std::vector<Vec2> out(m.num_faces(), Vec2::Zero());
  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& c = m.cell(k);
    for (int l = 0; l < 3; ++l) {
      const Vec2 b = edge_value(m, B_old, k, m.face(c.faces[l]).centroid);
      out[c.faces[l]] += (c.measure / 3.0) * w[k] * Vec2(-b.y(), b.x());
    }
  }
  return out;
}

double lorentz_work(const Mesh& m, const EdgeField& B, const CRField& u, const EdgeField& B_old) {
  const auto w = curl_h(m, B);
  double s = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& c = m.cell(k);
    for (int l = 0; l < 3; ++l) {
      const Vec2 b = edge_value(m, B_old, k, m.face(c.faces[l]).centroid);
      s += (c.measure / 3.0) * w[k] * cross2(u[c.faces[l]], b);
    }
  }
  return s;
}

double lorentz_work(const Mesh& m, const EdgeField& B, const CellVectorField& u, const EdgeField& B_old) {
  const auto w = curl_h(m, B);
  double s = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) s += w[k] * cross2(u[k], edge_integral(m, B_old, k));
  return s;
}

}  // namespace mhdlab
