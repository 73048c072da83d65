#include "mhdlab/scenarios.hpp"

#include <cmath>
#include <stdexcept>

namespace mhdlab {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kPi = 3.14159265358979323846;

double s2(double x) { return std::sin(kTwoPi * x); }
double c2(double x) { return std::cos(kTwoPi * x); }

// Periodic smooth data. B is the rotated gradient of sin(2 pi x) sin(2 pi y) / (2 pi).
double rho_periodic(const Point& p) { return 1.0 + 0.5 * s2(p.x()); }
Vec2 u_periodic(const Point& p) { return {s2(p.y()), 0.0}; }
Vec2 B_periodic(const Point& p) { return {s2(p.x()) * c2(p.y()), -c2(p.x()) * s2(p.y())}; }

// Dirichlet-compatible data on the unit square: u vanishes on the boundary,
// B is divergence free with zero tangential trace.
Vec2 u_box(const Point& p) {
  const double sx = std::sin(kPi * p.x()), sy = std::sin(kPi * p.y());
  return {sx * sx * s2(p.y()), -s2(p.x()) * sy * sy};
}
Vec2 B_box(const Point& p) { return {-c2(p.x()) * s2(p.y()), s2(p.x()) * c2(p.y())}; }

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"constant", "smooth-periodic", "perturbed-constant",
                                                 "orszag-tang-like"};
  return names;
}

Scenario make_scenario(const std::string& name, Variant v) {
  const bool box = v == Variant::scheme1;
  Scenario s;
  s.name = name;
  if (name == "constant") {
    s.rho = [](const Point&) { return 1.0; };
    s.u = [](const Point&) { return Vec2(0.0, 0.0); };
    if (box) s.B = [](const Point&) { return Vec2(0.0, 0.0); };
    else s.B = [](const Point&) { return Vec2(1.0, 0.0); };
  } else if (name == "smooth-periodic") {
    s.rho = rho_periodic;
    s.u = box ? VectorFn(u_box) : VectorFn(u_periodic);
    s.B = box ? VectorFn(B_box) : VectorFn(B_periodic);
  } else if (name == "perturbed-constant") {
    if (box) {
      s.rho = [](const Point& p) { return 1.0 + 0.05 * s2(p.x()); };
      s.u = [](const Point& p) -> Vec2 { return 0.1 * u_box(p); };
      s.B = [](const Point& p) -> Vec2 { return 0.1 * B_box(p); };
    } else {
      s.rho = [](const Point& p) { return 1.0 + 0.05 * s2(p.x()); };
      s.u = [](const Point& p) -> Vec2 { return 0.1 * u_periodic(p); };
      s.B = [](const Point& p) -> Vec2 { return Vec2(1.0, 0.0) + 0.1 * B_periodic(p); };
    }
  } else if (name == "orszag-tang-like") {
    if (box) throw std::invalid_argument("scenario orszag-tang-like needs periodic boundaries (scheme2)");
    const double b0 = 1.0 / std::sqrt(4.0 * kPi);
    s.rho = [](const Point&) { return 1.0; };
    s.u = [](const Point& p) { return Vec2(-s2(p.y()), s2(p.x())); };
    s.B = [b0](const Point& p) { return Vec2(-b0 * s2(p.y()), b0 * std::sin(2 * kTwoPi * p.x())); };
  } else {
    std::string known;
    for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown scenario '" + name + "' (known: " + known + ")");
  }
  return s;
}

}  // namespace mhdlab
