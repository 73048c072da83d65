#include "mhdlab/diagnostics.hpp"

#include "mhdlab/quadrature.hpp"
#include "mhdlab/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

namespace mhdlab {
namespace {

Mesh mesh_for(Variant v, int n) { return v == Variant::scheme1 ? build_tri_mesh(n) : build_periodic_mesh(n, 2); }

DiscreteState constant_state(const Discretization& d, double rho, const Vec2& u, const Vec2& B) {
  return initial_state(d, [rho](const Point&) { return rho; }, [u](const Point&) { return u; },
                       [B](const Point&) { return B; });
}

TEST(Energy, Examples) {
  for (Variant v : {Variant::scheme1, Variant::scheme2}) {
    const Mesh m = mesh_for(v, 4);
    Params p;
    p.dt = m.h();
    const Discretization d(m, v, p);
    EXPECT_NEAR(total_energy(d, constant_state(d, 1.0, Vec2::Zero(), Vec2::Zero())), 1.0, 1e-14);
  }
  const Mesh m = build_periodic_mesh(4, 2);
  Params p;
  p.dt = m.h();
  const Discretization d(m, Variant::scheme2, p);
  EXPECT_NEAR(total_energy(d, constant_state(d, 1.0, Vec2::Zero(), Vec2(1.0, 0.0))), 1.5, 1e-14);
  const auto e = energy_parts(d, constant_state(d, 2.0, Vec2(1.0, 2.0), Vec2(0.0, 3.0)));
  EXPECT_NEAR(e.kinetic, 0.5 * 2.0 * 5.0, 1e-13);
  EXPECT_NEAR(e.internal, 4.0, 1e-13);
  EXPECT_NEAR(e.magnetic, 4.5, 1e-13);
}

TEST(Energy, NonnegativeForRandomStates) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> R(0.0, 3.0), V(-2.0, 2.0);
  for (Variant v : {Variant::scheme1, Variant::scheme2}) {
    const Mesh m = mesh_for(v, 4);
    Params p;
    p.dt = m.h();
    p.gamma = 1.4;
    p.epsilon = 0.5;
    const Discretization d(m, v, p);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd x(d.num_unknowns());
      for (int i = 0; i < x.size(); ++i) x[i] = i < d.num_cells() ? R(rng) : V(rng);
      DiscreteState s = d.zero_state();
      d.unpack(x, s);
      const auto e = energy_parts(d, s);
      EXPECT_GE(e.kinetic, 0.0);
      EXPECT_GE(e.internal, 0.0);
      EXPECT_GE(e.magnetic, 0.0);
    }
  }
}

TEST(EnergyReport, ConstantStepIsQuiet) {
  for (Variant v : {Variant::scheme1, Variant::scheme2}) {
    const Mesh m = mesh_for(v, 4);
    Params p;
    p.dt = m.h();
    const Discretization d(m, v, p);
    const auto sc = make_scenario("constant", v);
    const auto s0 = initial_state(d, sc.rho, sc.u, sc.B);
    const auto s1 = step(d, s0).state;
    const auto r = energy_report(d, s0, s1);
    EXPECT_NEAR(r.viscous, 0.0, 1e-15);
    EXPECT_NEAR(r.resistive, 0.0, 1e-15);
    for (double D : r.D) EXPECT_NEAR(D, 0.0, 1e-15);
    EXPECT_NEAR(r.residual, 0.0, 1e-15);
    EXPECT_NEAR(r.slack, 0.0, 1e-15);
  }
}

class EnergyBalance : public ::testing::TestWithParam<std::tuple<Variant, double>> {};
INSTANTIATE_TEST_SUITE_P(Diagnostics, EnergyBalance,
                         ::testing::Combine(::testing::Values(Variant::scheme1, Variant::scheme2),
                                            ::testing::Values(1.4, 2.0)),
                         [](const auto& info) {
                           return std::string(to_string(std::get<0>(info.param))) + "_gamma" +
                                  (std::get<1>(info.param) == 2.0 ? "2" : "1_4");
                         });

// The identity is assembled from the two states only, without the solver.
TEST_P(EnergyBalance, IdentityAndStability) {
  const auto [v, gamma] = GetParam();
  const Mesh m = mesh_for(v, 8);
  Params p;
  p.dt = m.h();
  p.gamma = gamma;
  p.epsilon = gamma < 2.0 ? 0.8 : 1.0;
  const Discretization d(m, v, p);
  const auto sc = make_scenario("smooth-periodic", v);
  const auto s0 = initial_state(d, sc.rho, sc.u, sc.B);
  const double E0 = total_energy(d, s0);
  const auto s1 = step(d, s0).state;
  const auto r = energy_report(d, s0, s1);
  EXPECT_LE(r.residual, 1e-8 * E0);
  EXPECT_LE(r.slack, 1e-10);
  EXPECT_GT(r.viscous, 0.0);
  EXPECT_GT(r.resistive, 0.0);
  for (double D : r.D) EXPECT_GE(D, -1e-14);
  EXPECT_GE(r.min_face_D4, -1e-14);
  EXPECT_GE(r.min_face_D5, -1e-14);
  EXPECT_NEAR(r.energy.total(), total_energy(d, s1), 1e-14);
  EXPECT_DOUBLE_EQ(r.dt, p.dt);

  const auto rb = renormalized_balance(d, s0, s1);
  EXPECT_NEAR(rb.lhs, rb.rhs, 1e-12);
  EXPECT_LT(rb.rhs, 0.0);
}

TEST(RelativeEnergy, Examples) {
  const Mesh m = build_periodic_mesh(4, 2);
  Params p;
  p.dt = m.h();
  const Discretization d(m, Variant::scheme2, p);
  const auto s = constant_state(d, 1.3, Vec2(0.2, -0.1), Vec2(0.5, 0.3));
  EXPECT_NEAR(relative_energy(d, s, [](const Point&) { return 1.3; }, [](const Point&) { return Vec2(0.2, -0.1); },
                              [](const Point&) { return Vec2(0.5, 0.3); }),
              0.0, 1e-15);
  const auto z = constant_state(d, 1.0, Vec2::Zero(), Vec2::Zero());
  const VectorFn zero = [](const Point&) { return Vec2(0, 0); };
  EXPECT_NEAR(relative_energy(d, z, [](const Point&) { return 2.0; }, zero, zero), 1.0, 1e-14);
  EXPECT_THROW(relative_energy(d, z, [](const Point& x) { return x.x() - 0.5; }, zero, zero), std::invalid_argument);
}

TEST(RelativeEnergy, NonnegativeForRandomPairs) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> R(0.0, 3.0), V(-1.0, 1.0), P(0.0, 1.0);
  const Mesh m = build_tri_mesh(4);
  Params p;
  p.dt = m.h();
  p.gamma = 1.4;
  p.epsilon = 0.5;
  const Discretization d(m, Variant::scheme1, p);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(d.num_unknowns());
    for (int i = 0; i < x.size(); ++i) x[i] = i < d.num_cells() ? R(rng) : V(rng);
    DiscreteState s = d.zero_state();
    d.unpack(x, s);
    const double r0 = 0.6 + P(rng), r1 = 0.5 * P(rng), ph = P(rng);
    const double u0 = V(rng), u1 = V(rng), b0 = V(rng), b1 = V(rng);
    const double e = relative_energy(
        d, s, [=](const Point& q) { return r0 + r1 * std::sin(2 * M_PI * (q.x() + ph)); },
        [=](const Point& q) -> Vec2 { return {u0 * std::cos(2 * M_PI * q.y()), u1}; },
        [=](const Point& q) -> Vec2 { return {b0, b1 * q.x()}; });
    EXPECT_GE(e, 0.0);
  }
}

TEST(Eoc, Examples) {
  EXPECT_NEAR(*eoc({0.4, 0.2, 0.1}, {0.4, 0.2, 0.1}), 1.0, 1e-14);
  EXPECT_NEAR(*eoc({0.4, 0.1, 0.025}, {0.4, 0.2, 0.1}), 2.0, 1e-14);
  EXPECT_NEAR(*eoc({0.3, 0.3, 0.3}, {0.4, 0.2, 0.1}), 0.0, 1e-14);
  EXPECT_FALSE(eoc({0.1, 0.0}, {0.2, 0.1}));
  EXPECT_THROW(eoc({0.1}, {0.2}), std::invalid_argument);
  EXPECT_THROW(eoc({0.1, 0.2}, {0.2}), std::invalid_argument);
}

TEST(WeakDivergence, ConstantOnTorus) {
  const Mesh m = build_periodic_mesh(4, 2);
  const auto B = interpolate_Nedelec(m, [](const Point&) { return Vec2(0.7, -1.9); });
  EXPECT_LT(weak_divfree_residual(m, B), 1e-15);
}

// Gradient of the hat function of vertex v on cell k, by central differences
// of the interpolated potential (exact for P1 and Q1).
Vec2 hat_gradient(const Mesh& m, int v, int k, const Point& x) {
  PotentialField e(m);
  e[v] = 1.0;
  const double h = 1e-4;
  const Point dx(h, 0, 0), dy(0, h, 0);
  return Vec2(potential_value(m, e, k, x + dx) - potential_value(m, e, k, x - dx),
              potential_value(m, e, k, x + dy) - potential_value(m, e, k, x - dy)) /
         (2 * h);
}

// B = grad psi0 + constant: the constant part is invisible and the residual
// is the stiffness matrix applied to psi0.
TEST(WeakDivergence, HelmholtzSplitting) {
  for (bool periodic : {true, false}) {
    const Mesh m = periodic ? build_periodic_mesh(4, 2) : build_tri_mesh(4);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> V(-1.0, 1.0);
    PotentialField psi(m);
    for (int v = 0; v < m.num_vertices(); ++v)
      if (!m.boundary_vertex(v)) psi[v] = V(rng);
    EdgeField B = grad_potential(m, psi);
    if (periodic) {
      const auto c = interpolate_Nedelec(m, [](const Point&) { return Vec2(0.4, 1.1); });
      for (int e = 0; e < m.num_edges(); ++e) B[e] += c[e];
    }
    const auto w = weak_divergence(m, B);
    double maxabs = 0.0;
    for (int i = 0; i < m.num_vertices(); ++i) {
      if (m.boundary_vertex(i)) continue;
      double k_psi = 0.0;
      for (int k = 0; k < m.num_cells(); ++k) {
        const auto& vs = m.cell(k).vertices;
        if (std::find(vs.begin(), vs.end(), i) == vs.end()) continue;
        for (const auto& q : cell_rule(m, k, 3)) {
          const Vec2 gi = hat_gradient(m, i, k, q.x);
          for (int j : vs) k_psi += q.w * psi[j] * gi.dot(hat_gradient(m, j, k, q.x));
        }
      }
      EXPECT_NEAR(w[i], k_psi, 1e-7) << "vertex " << i;
      maxabs = std::max(maxabs, std::abs(k_psi));
    }
    EXPECT_GT(maxabs, 0.1);
    double wmax = 0.0;
    for (double x : w) wmax = std::max(wmax, std::abs(x));
    EXPECT_DOUBLE_EQ(weak_divfree_residual(m, B), wmax);
  }
}

TEST(Dual, Derivatives) {
  const Dual x(0.3, 1, 0), y(0.7, 0, 1);
  const Dual f = sin(2.0 * x) * cos(y) + x * y - 3.0;
  EXPECT_NEAR(f.v, std::sin(0.6) * std::cos(0.7) + 0.21 - 3.0, 1e-15);
  EXPECT_NEAR(f.dx, 2.0 * std::cos(0.6) * std::cos(0.7) + 0.7, 1e-15);
  EXPECT_NEAR(f.dy, -std::sin(0.6) * std::sin(0.7) + 0.3, 1e-15);
}

TEST(TestFamily, BoundaryBehaviour) {
  const auto f = default_test_family(Variant::scheme1);
  ASSERT_EQ(f.phi.size(), 6u);
  ASSERT_EQ(f.v.size(), 6u);
  ASSERT_EQ(f.C.size(), 6u);
  ASSERT_EQ(f.psi.size(), 6u);
  for (double t : {0.0, 0.17, 0.5, 0.81, 1.0}) {
    for (const auto& [x, y, tx, ty] : {std::array<double, 4>{t, 0.0, 1, 0}, std::array<double, 4>{t, 1.0, 1, 0},
                                       std::array<double, 4>{0.0, t, 0, 1}, std::array<double, 4>{1.0, t, 0, 1}}) {
      for (int i = 0; i < 6; ++i) {
        EXPECT_NEAR(f.v[i].x(x, y).v, 0.0, 1e-15);
        EXPECT_NEAR(f.v[i].y(x, y).v, 0.0, 1e-15);
        // grad v vanishes too (compact support)
        EXPECT_NEAR(f.v[i].x(Dual(x, 1, 0), Dual(y, 0, 1)).dx, 0.0, 1e-14);
        EXPECT_NEAR(tx * f.C[i].x(x, y).v + ty * f.C[i].y(x, y).v, 0.0, 1e-15);
        EXPECT_NEAR(f.psi[i](x, y).v, 0.0, 1e-15);
      }
    }
  }
}

TEST(Consistency, ConstantTrajectoryIsExact) {
  for (Variant v : {Variant::scheme1, Variant::scheme2}) {
    const Mesh m = mesh_for(v, 4);
    Params p;
    p.dt = m.h();
    p.T = 4 * p.dt;
    const Discretization d(m, v, p);
    const auto sc = make_scenario("constant", v);
    const auto tr = run(d, initial_state(d, sc.rho, sc.u, sc.B), 1);
    const auto c = consistency_residuals(d, tr.states, default_test_family(v));
    EXPECT_DOUBLE_EQ(c.h, m.h());
    for (double e : c.e) EXPECT_LT(e, 1e-13) << to_string(v);
  }
}

TEST(Consistency, ResidualsShrinkUnderRefinement) {
  std::array<double, 4> coarse{};
  for (int n : {4, 8}) {
    const Mesh m = build_tri_mesh(n);
    Params p;
    p.dt = m.h();
    p.T = 0.5;
    const Discretization d(m, Variant::scheme1, p);
    const auto sc = make_scenario("perturbed-constant", Variant::scheme1);
    const auto tr = run(d, initial_state(d, sc.rho, sc.u, sc.B), 1);
    const auto c = consistency_residuals(d, tr.states, default_test_family(Variant::scheme1));
    for (int i = 0; i < 4; ++i) {
      EXPECT_TRUE(std::isfinite(c.e[i]));
      EXPECT_GT(c.e[i], 0.0);
      if (n == 8) EXPECT_LT(c.e[i], coarse[i]) << "e" << i + 1;
    }
    coarse = c.e;
  }
  const Mesh m = build_tri_mesh(4);
  Params p;
  p.dt = m.h();
  const Discretization d(m, Variant::scheme1, p);
  EXPECT_THROW(consistency_residuals(d, {d.zero_state()}, default_test_family(Variant::scheme1)),
               std::invalid_argument);
}

TEST(Csv, EnergyAndEocTables) {
  std::ostringstream os;
  write_energy_header(os);
  EXPECT_EQ(os.str(),
            "t,kinetic,internal,magnetic,viscous,resistive,D1,D2,D3,D4,D5,residual,mass,min_density,"
            "divfree_residual\n");
  EnergyReport r;
  r.t = 0.5;
  r.energy.kinetic = 1;
  r.D = {1, 2, 3, 4, 5};
  std::ostringstream row;
  write_energy_row(row, r, 1.0, 0.5, 0.0);
  EXPECT_EQ(row.str(), "0.5,1,0,0,0,0,1,2,3,4,5,0,1,0.5,0\n");

  std::vector<ConsistencyLevel> lv(3);
  for (int l = 0; l < 3; ++l) {
    lv[l].h = 0.4 / (1 << l);
    lv[l].e = {0.4 / (1 << l), 0.1 / (1 << (2 * l)), 0.3, 0.0};
  }
  std::ostringstream t;
  write_eoc_table(t, lv);
  std::istringstream in(t.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "h,e1,e2,e3,e4,eoc1,eoc2,eoc3,eoc4");
  EXPECT_EQ(lines[1], "0.40000000000000002,0.40000000000000002,0.10000000000000001,0.29999999999999999,0,,,,");
  EXPECT_EQ(lines[4].substr(0, 4), "fit,");
  EXPECT_NE(lines[4].find(",exact"), std::string::npos);
  // local orders on the second row: e1 first order, e2 second, e3 flat, e4 exact
  std::vector<std::string> cols;
  std::istringstream cs(lines[2]);
  for (std::string c; std::getline(cs, c, ',');) cols.push_back(c);
  ASSERT_EQ(cols.size(), 9u);
  EXPECT_NEAR(std::stod(cols[5]), 1.0, 1e-12);
  EXPECT_NEAR(std::stod(cols[6]), 2.0, 1e-12);
  EXPECT_NEAR(std::stod(cols[7]), 0.0, 1e-12);
  EXPECT_EQ(cols[8], "exact");
}

}  // namespace
}  // namespace mhdlab
