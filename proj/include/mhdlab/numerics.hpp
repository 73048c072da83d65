// Constitutive laws and numerical fluxes.

#ifndef MHDLAB_NUMERICS_HPP
#define MHDLAB_NUMERICS_HPP

#include "mhdlab/fespace.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace mhdlab {

enum class Variant { scheme1, scheme2 };

const char* to_string(Variant v);

struct Params {
  double mu = 0.1;       // shear viscosity
  double lambda = 0.0;   // bulk viscosity
  double alpha = 0.1;    // resistivity
  double a = 1.0;        // pressure constant
  double gamma = 2.0;    // adiabatic exponent
  double epsilon = 1.0;  // artificial diffusion exponent
  double dt = 0.1;
  double T = 0.1;
  double h = 0.1;
  int d = 2;

  double nu() const { return (d - 2.0) / d * mu + lambda; }
  double diffusion() const;  // h^epsilon
};

/// Checks mu, lambda, alpha, a, gamma and the dt/h ratio; throws std::invalid_argument.
void check_params(const Params& p);

double pressure(const Params& p, double rho);
/// H(rho) = a/(gamma-1) rho^gamma and its first two derivatives.
double pressure_potential(const Params& p, double rho);
double pressure_potential_d1(const Params& p, double rho);
double pressure_potential_d2(const Params& p, double rho);
/// H(x) - H(y) - H'(y)(x - y) >= 0.
double bregman(const Params& p, double x, double y);

/// Newtonian stress mu (G + G^T - (2/d) tr G I) + lambda tr G I, with d = 2.
Mat2 stress(const Params& p, const Mat2& grad);

inline double pos(double f) { return 0.5 * (f + std::abs(f)); }
inline double neg(double f) { return 0.5 * (f - std::abs(f)); }

/// r_in [u]^+ + r_out [u]^-.
inline double upwind(double r_in, double r_out, double u) { return r_in * pos(u) + r_out * neg(u); }
inline Vec2 upwind(const Vec2& r_in, const Vec2& r_out, double u) { return r_in * pos(u) + r_out * neg(u); }

/// Upwind value minus h^eps (r_out - r_in).
inline double diffusive_flux(double r_in, double r_out, double u, double h_eps) {
  return upwind(r_in, r_out, u) - h_eps * (r_out - r_in);
}
inline Vec2 diffusive_flux(const Vec2& r_in, const Vec2& r_out, double u, double h_eps) {
  return upwind(r_in, r_out, u) - h_eps * (r_out - r_in);
}

/// Admissible epsilon windows: eps > 0 for gamma >= 2, eps in (0, 2 gamma - 1 - d/3) below.
/// Scheme-I additionally needs gamma > 4d/(1+3d); Scheme-II only gamma > 1.
/// Returns a description of the violated window, or nothing when admissible.
std::optional<std::string> validate_epsilon(double gamma, int d, double eps, Variant v);

/// Lorentz force tested against velocity basis functions. Scheme-I: one vector
/// per face, the integral of (curl B) x B_old against the CR basis of that face
/// (interior and exterior faces alike). Scheme-II: one vector per cell, the
/// integral over the cell.
std::vector<Vec2> lorentz(const Mesh& m, const EdgeField& B, const EdgeField& B_old);

/// Integral of curl_h(B) (u x B_old) over the domain, exact for both velocity types.
double lorentz_work(const Mesh& m, const EdgeField& B, const CRField& u, const EdgeField& B_old);
double lorentz_work(const Mesh& m, const EdgeField& B, const CellVectorField& u, const EdgeField& B_old);

/// Cell integral of an edge field (exact).
Vec2 edge_integral(const Mesh& m, const EdgeField& b, int cell);

}  // namespace mhdlab

#endif  // MHDLAB_NUMERICS_HPP
