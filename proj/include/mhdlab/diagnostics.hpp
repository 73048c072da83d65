// Measurements on discrete states and trajectories: energies and the
// per-step energy balance, the relative energy, weak divergence of B,
// consistency residuals of the weak formulation, and EOC fitting.

#ifndef MHDLAB_DIAGNOSTICS_HPP
#define MHDLAB_DIAGNOSTICS_HPP

#include "mhdlab/scheme.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mhdlab {

struct EnergyParts {
  double kinetic = 0.0;   // 1/2 int rho |u-hat|^2
  double internal = 0.0;  // int H(rho)
  double magnetic = 0.0;  // 1/2 int |B|^2
  double total() const { return kinetic + internal + magnetic; }
};

EnergyParts energy_parts(const Discretization& disc, const DiscreteState& s);
double total_energy(const Discretization& disc, const DiscreteState& s);
double total_mass(const Mesh& m, const CellField& rho);

/// Terms of the discrete energy balance of one step prev -> next:
///   D_t E + viscous + resistive + D1 + ... + D5 = 0.
/// D3 and D5 use the exact Bregman form of H, which equals the mean-value
/// form with H''(xi), H''(zeta) for every gamma, so `residual` is the
/// identity defect in all cases.
struct EnergyReport {
  double t = 0.0;
  double dt = 0.0;
  EnergyParts energy;      // at `next`
  double viscous = 0.0;    // scheme1: mu |grad u|^2 + nu |div u|^2; scheme2: mu sum |s| |[[u]]|^2/d_s + (mu+lambda) |div u|^2
  double resistive = 0.0;  // alpha |curl B|^2
  std::array<double, 5> D{};
  double residual = 0.0;   // |D_t E + dissipation + sum D|
  double slack = 0.0;      // E(next) + dt (viscous + resistive) - E(prev), nonpositive for a stable step
  double min_face_D4 = 0.0;  // smallest single-face contribution
  double min_face_D5 = 0.0;
};

EnergyReport energy_report(const Discretization& disc, const DiscreteState& prev, const DiscreteState& next);

/// Renormalized continuity with b(rho) = rho^2 (b'' = 2):
///   lhs = int (D_t b(rho) + (rho b' - b) div_h u)
///   rhs = -(dt/2) int 2 |D_t rho|^2 - sum_s |s| 2 [[rho]]^2 (h^eps + |u_s|/2)
/// Holds exactly whenever the continuity residual vanishes.
struct RenormalizedBalance {
  double lhs = 0.0;
  double rhs = 0.0;
};
RenormalizedBalance renormalized_balance(const Discretization& disc, const DiscreteState& prev,
                                         const DiscreteState& next);

/// int (1/2 rho |u-hat - U|^2 + 1/2 |B - b|^2 + H(rho) - H(r) - H'(r)(rho - r)).
/// Throws std::invalid_argument if r is not positive at a quadrature point.
double relative_energy(const Discretization& disc, const DiscreteState& s, const ScalarFn& r,
                       const VectorFn& U, const VectorFn& b);

/// int B . grad psi_v for every vertex hat psi_v of W_h (interior vertices
/// only on the triangulated square, where B has zero tangential trace).
std::vector<double> weak_divergence(const Mesh& m, const EdgeField& B);
double weak_divfree_residual(const Mesh& m, const EdgeField& B);

// ---------------------------------------------------------------------------
// Consistency residuals.

/// Scalar with value and exact first spatial derivatives.
struct Dual {
  double v = 0.0, dx = 0.0, dy = 0.0;
  Dual() = default;
  Dual(double c) : v(c) {}  // NOLINT: constants convert implicitly
  Dual(double v_, double dx_, double dy_) : v(v_), dx(dx_), dy(dy_) {}
};
inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
inline Dual operator-(Dual a) { return {-a.v, -a.dx, -a.dy}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy}; }
Dual sin(Dual a);
Dual cos(Dual a);

using DualScalar = std::function<Dual(Dual x, Dual y)>;
struct DualVector {
  DualScalar x, y;
};

/// Spatial parts of the test functions; the time factor is fixed to
/// theta(t) = cos^2(pi t / (2T)).
struct TestFamily {
  std::vector<DualScalar> phi;   // continuity
  std::vector<DualVector> v;     // momentum
  std::vector<DualVector> C;     // induction
  std::vector<DualScalar> psi;   // divergence constraint
};

/// Six members per equation. scheme1: v compactly supported in the square,
/// C with zero tangential trace, psi vanishing on the boundary.
/// scheme2: trigonometric polynomials on the torus (psi with zero mean).
TestFamily default_test_family(Variant v);

struct ConsistencyLevel {
  double h = 0.0;
  std::array<double, 4> e{};  // max over the family of |e_i|
};

/// `states` must hold every time level t^0 = 0 < ... < t^N = T.
ConsistencyLevel consistency_residuals(const Discretization& disc, const std::vector<DiscreteState>& states,
                                       const TestFamily& family);

/// Least-squares slope of log e against log h. Returns nothing ("exact") if
/// some error is zero or negative. Needs at least two levels.
std::optional<double> eoc(const std::vector<double>& errors, const std::vector<double>& h);

// ---------------------------------------------------------------------------
// CSV output.

void write_energy_header(std::ostream& os);
void write_energy_row(std::ostream& os, const EnergyReport& r, double mass, double min_density,
                      double divfree_residual);
/// Row for the initial state: energies only, dissipation columns zero.
void write_energy_initial(std::ostream& os, double t, const EnergyParts& e, double mass, double min_density,
                          double divfree_residual);
void write_eoc_table(std::ostream& os, const std::vector<ConsistencyLevel>& levels);

}  // namespace mhdlab

#endif  // MHDLAB_DIAGNOSTICS_HPP
