#include "mhdlab/fespace.hpp"
#include "mhdlab/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace mhdlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<Mesh> both_meshes(int n) { return {build_tri_mesh(n), build_periodic_mesh(n, 2)}; }

// Slope of log(e) against log(h) between the coarsest and finest level.
double slope(const std::vector<double>& e, const std::vector<double>& h) {
  return std::log(e.front() / e.back()) / std::log(h.front() / h.back());
}

template <class F>
double l2_cells(const Mesh& m, F&& err_sq) {
  double s = 0.0;
  for (int k = 0; k < m.num_cells(); ++k)
    for (const auto& q : cell_rule(m, k, 5)) s += q.w * err_sq(k, q.x);
  return std::sqrt(s);
}

}  // namespace

TEST(ProjectQ, ReproducesConstantsAndCentroids) {
  const auto m = build_periodic_mesh(2, 2);
  const auto c = project_Q(m, [](const Point&) { return 3.5; });
  for (double v : c.v) EXPECT_NEAR(v, 3.5, 1e-14);
  const auto x = project_Q(m, [](const Point& p) { return p.x(); });
  EXPECT_NEAR(x[0], 0.25, 1e-15);  // cell [0, 1/2]^2
}

TEST(ProjectQ, PreservesIntegral) {
  for (const auto& m : both_meshes(6)) {
    const auto r = project_Q(m, [](const Point& p) { return 1.0 + 0.5 * std::sin(2 * kPi * p.x()); });
    double mass = 0.0;
    for (int k = 0; k < m.num_cells(); ++k) mass += m.cell(k).measure * r[k];
    EXPECT_NEAR(mass, 1.0, 1e-14);
  }
}

TEST(Interpolation, ReproducesConstantsAndLinears) {
  const auto m = build_tri_mesh(3);
  const Vec2 c(0.3, -1.2);
  const auto u = interpolate_CR(m, [&](const Point&) { return c; });
  for (const auto& v : u.v) EXPECT_LT((v - c).norm(), 1e-14);

  auto lin = [](const Point& p) { return Vec2(1 + 2 * p.x() - p.y(), 0.5 * p.x() + 3 * p.y()); };
  const auto ul = interpolate_CR(m, lin);
  Mat2 exact;
  exact << 2, -1, 0.5, 3;
  for (const auto& g : grad_h(m, ul)) EXPECT_LT((g - exact).norm(), 1e-12);
  for (int k = 0; k < m.num_cells(); ++k) {
    const Point x = 0.2 * m.cell(k).coords[0] + 0.5 * m.cell(k).coords[1] + 0.3 * m.cell(k).coords[2];
    EXPECT_LT((cr_value(m, ul, k, x) - lin(x)).norm(), 1e-13);
  }

  const auto psi = interpolate_W(m, [](const Point& p) { return p.x() - 0.5; });
  for (int v = 0; v < m.num_vertices(); ++v) EXPECT_NEAR(psi[v], m.vertices()[v].x() - 0.5, 1e-14);
  const auto zero = interpolate_W(m, [](const Point&) { return 0.0; });
  for (double v : zero.v) EXPECT_EQ(v, 0.0);

  for (const auto& mm : both_meshes(3)) {
    const auto b = interpolate_Nedelec(mm, [&](const Point&) { return c; });
    for (const double w : curl_h(mm, b).v) EXPECT_NEAR(w, 0.0, 1e-12);
    for (int k = 0; k < mm.num_cells(); ++k)
      EXPECT_LT((edge_value(mm, b, k, mm.cell(k).centroid) - c).norm(), 1e-13);
  }
}

TEST(Interpolation, PotentialHasZeroMean) {
  for (const auto& m : both_meshes(5)) {
    const auto p = interpolate_W(m, [](const Point& x) { return std::exp(x.x()) * x.y(); });
    EXPECT_NEAR(mean_value(m, p), 0.0, 1e-12);
  }
}

TEST(Nedelec, QuadCurlOfShearField) {
  const auto m = build_periodic_mesh(2, 2);
  // (0, x) on the first cell only: the dofs of the right edge are 1/2 (x = 1/2).
  EdgeField b(m);
  const auto& c = m.cell(0);
  b[c.faces[2]] = 0.0;
  b[c.faces[3]] = 0.5;
  EXPECT_NEAR(curl_h(m, b)[0], 1.0, 1e-14);
  const auto v = edge_value(m, b, 0, Point(0.25, 0.1, 0));
  EXPECT_NEAR(v.x(), 0.0, 1e-15);
  EXPECT_NEAR(v.y(), 0.25, 1e-15);
}

TEST(Nedelec, ShapeFunctionsAreDualToDofs) {
  for (const auto& m : both_meshes(3)) {
    for (int k = 0; k < m.num_cells(); ++k) {
      const auto& c = m.cell(k);
      for (std::size_t e = 0; e < c.faces.size(); ++e) {
        const auto& f = m.face(c.faces[e]);
        // The face rule walks the unwrapped face; shift it next to this cell.
        Point shift = Point::Zero();
        if (m.periodic()) {
          for (int a = 0; a < 2; ++a) shift[a] = std::round(c.centroid[a] - f.centroid[a]);
        }
        const Vec2 t = xy(f.tangent);
        for (std::size_t j = 0; j < c.faces.size(); ++j) {
          double mean = 0.0;
          for (const auto& q : face_rule(m, c.faces[e])) mean += q.w * edge_shape(m, k, q.x + shift)[j].dot(t);
          mean /= f.measure;
          EXPECT_NEAR(mean, e == j ? 1.0 : 0.0, 1e-13) << "cell " << k << " edge " << e << " shape " << j;
        }
      }
    }
  }
}

TEST(Nedelec, MassMatrixMatchesHighOrderQuadrature) {
  for (const auto& m : both_meshes(3)) {
    for (int k = 0; k < m.num_cells(); ++k) {
      const auto mass = edge_mass(m, k);
      const int nl = static_cast<int>(mass.rows());
      Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(nl, nl);
      for (const auto& q : cell_rule(m, k, 5)) {
        const auto phi = edge_shape(m, k, q.x);
        for (int i = 0; i < nl; ++i)
          for (int j = 0; j < nl; ++j) ref(i, j) += q.w * phi[i].dot(phi[j]);
      }
      EXPECT_LT((mass - ref).norm(), 1e-14);
      EXPECT_LT((mass - mass.transpose()).norm(), 1e-16);
    }
  }
}

TEST(Nedelec, GradientsOfPotentialsAreEdgeFields) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> U(-1, 1);
  for (const auto& m : both_meshes(4)) {
    PotentialField p(m);
    for (auto& v : p.v) v = U(gen);
    const auto g = grad_potential(m, p);
    for (const double w : curl_h(m, g).v) EXPECT_NEAR(w, 0.0, 1e-12);
    const double d = 1e-6;
    for (int k = 0; k < m.num_cells(); ++k) {
      const Point x = m.cell(k).centroid + Point(0.1 / m.cells_per_dim(), -0.05 / m.cells_per_dim(), 0);
      const Vec2 fd((potential_value(m, p, k, x + Point(d, 0, 0)) - potential_value(m, p, k, x - Point(d, 0, 0))) / (2 * d),
                    (potential_value(m, p, k, x + Point(0, d, 0)) - potential_value(m, p, k, x - Point(0, d, 0))) / (2 * d));
      EXPECT_LT((edge_value(m, g, k, x) - fd).norm(), 1e-8);
    }
  }
}

TEST(CrouzeixRaviart, FaceMeansAgreeFromBothSides) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> U(-1, 1);
  const auto m = build_tri_mesh(4);
  CRField u(m);
  for (auto& v : u.v) v = Vec2(U(gen), U(gen));
  for (int s = 0; s < m.num_faces(); ++s) {
    const auto& f = m.face(s);
    for (int k : {f.in, f.out}) {
      if (k < 0) continue;
      Vec2 mean = Vec2::Zero();
      for (const auto& q : face_rule(m, s)) mean += q.w * cr_value(m, u, k, q.x);
      EXPECT_LT((mean / f.measure - u[s]).norm(), 1e-13);
    }
  }
}

TEST(CrouzeixRaviart, DivergenceTheoremPerCell) {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> U(-1, 1);
  const auto m = build_tri_mesh(5);
  CRField u(m);
  for (auto& v : u.v) v = Vec2(U(gen), U(gen));
  const auto dv = div_h(m, u);
  double lhs = 0.0, rhs = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) {
    lhs += m.cell(k).measure * dv[k];
    const auto& c = m.cell(k);
    for (int l = 0; l < 3; ++l) {
      // boundary integral of the reconstructed field, by quadrature
      const auto& f = m.face(c.faces[l]);
      for (const auto& q : face_rule(m, c.faces[l]))
        rhs += q.w * cr_value(m, u, k, q.x).dot(c.face_sign[l] * xy(f.normal));
    }
  }
  EXPECT_NEAR(lhs, rhs, 1e-12);
  for (double d : div_h(m, CRField(m, Vec2(2, 3))).v) EXPECT_NEAR(d, 0.0, 1e-12);
}

TEST(InterpolationEstimates, FirstOrderForAllInterpolants) {
  std::vector<double> hs, eq, ev, ew_t, ew_q, eb_t, eb_q, ec_t, ec_q;
  for (int n : {4, 8, 16, 32}) {
    const auto tri = build_tri_mesh(n);
    const auto quad = build_periodic_mesh(n, 2);
    hs.push_back(1.0 / n);

    auto f = [](const Point& p) { return std::sin(2 * kPi * p.x()); };
    const auto fq = project_Q(tri, f);
    eq.push_back(l2_cells(tri, [&](int k, const Point& x) { return std::pow(f(x) - fq[k], 2); }));

    auto v = [](const Point& p) { return Vec2(std::sin(2 * kPi * p.y()), 0.0); };
    const auto vi = interpolate_CR(tri, v);
    ev.push_back(l2_cells(tri, [&](int k, const Point& x) { return (v(x) - cr_value(tri, vi, k, x)).squaredNorm(); }));

    auto psi = [](const Point& p) { return std::cos(2 * kPi * p.x()); };
    for (const Mesh* m : {&tri, &quad}) {
      const auto pi = interpolate_W(*m, psi);
      const double e = l2_cells(*m, [&](int k, const Point& x) { return std::pow(psi(x) - potential_value(*m, pi, k, x), 2); });
      (m == &tri ? ew_t : ew_q).push_back(e);
    }

    auto B = [](const Point& p) -> Vec2 { return Vec2(-std::sin(2 * kPi * p.y()), std::sin(2 * kPi * p.x())) / (2 * kPi); };
    auto curlB = [](const Point& p) { return std::cos(2 * kPi * p.x()) + std::cos(2 * kPi * p.y()); };
    for (const Mesh* m : {&tri, &quad}) {
      const auto bi = interpolate_Nedelec(*m, B);
      const auto w = curl_h(*m, bi);
      const double eb = l2_cells(*m, [&](int k, const Point& x) { return (B(x) - edge_value(*m, bi, k, x)).squaredNorm(); });
      const double ec = l2_cells(*m, [&](int k, const Point& x) { return std::pow(curlB(x) - w[k], 2); });
      (m == &tri ? eb_t : eb_q).push_back(eb);
      (m == &tri ? ec_t : ec_q).push_back(ec);
    }
  }
  EXPECT_GE(slope(eq, hs), 0.9);
  EXPECT_GE(slope(ev, hs), 0.9);
  EXPECT_GE(slope(ew_t, hs), 0.9);
  EXPECT_GE(slope(ew_q, hs), 0.9);
  EXPECT_GE(slope(eb_t, hs), 0.9);
  EXPECT_GE(slope(eb_q, hs), 0.9);
  EXPECT_GE(slope(ec_t, hs), 0.9);
  EXPECT_GE(slope(ec_q, hs), 0.9);
}

TEST(PiecewiseConstantDivergence, TelescopesAndConverges) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> U(-1, 1);
  const auto m = build_periodic_mesh(6, 2);
  CellVectorField u(m);
  for (auto& v : u.v) v = Vec2(U(gen), U(gen));
  double s = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) s += m.cell(k).measure * div_h_pc(m, u)[k];
  EXPECT_NEAR(s, 0.0, 1e-14);
  for (double d : div_h_pc(m, CellVectorField(m, Vec2(1, 2))).v) EXPECT_NEAR(d, 0.0, 1e-13);

  std::vector<double> e, hs;
  for (int n : {4, 8, 16, 32}) {
    const auto mm = build_periodic_mesh(n, 2);
    const auto uq = project_Q(mm, [](const Point& p) { return Vec2(std::sin(2 * kPi * p.x()), 0.0); });
    const auto d = div_h_pc(mm, uq);
    e.push_back(l2_cells(mm, [&](int k, const Point& x) { return std::pow(2 * kPi * std::cos(2 * kPi * x.x()) - d[k], 2); }));
    hs.push_back(1.0 / n);
  }
  EXPECT_GE(slope(e, hs), 0.9);
  EXPECT_THROW(div_h_pc(build_tri_mesh(2), CellVectorField(build_tri_mesh(2))), std::invalid_argument);
}

TEST(Traces, JumpAndAverage) {
  const auto m = build_periodic_mesh(2, 2);
  CellField f(m);
  const auto& face = m.face(0);
  f[face.in] = 1.0;
  f[face.out] = 3.0;
  const auto t = trace_jump_avg(m, f, 0);
  EXPECT_EQ(t.jump, 2.0);
  EXPECT_EQ(t.avg, 2.0);
  // flipping the orientation swaps the traces
  EXPECT_EQ(jump(t.out, t.in), -t.jump);
  EXPECT_EQ(avg(t.out, t.in), t.avg);
  f[face.out] = 1.0;
  const auto same = trace_jump_avg(m, f, 0);
  EXPECT_EQ(same.jump, 0.0);
  EXPECT_EQ(same.avg, 1.0);

  const auto tri = build_tri_mesh(2);
  int ext = 0;
  while (!tri.face(ext).exterior()) ++ext;
  EXPECT_THROW(trace_jump_avg(tri, CellField(tri), ext), std::invalid_argument);
  EXPECT_EQ(trace_jump_avg(tri, CellField(tri, 2.0), ext, 0.0).jump, -2.0);
}

TEST(Traces, FaceVelocity) {
  const auto m = build_periodic_mesh(2, 2);
  int vertical = 0;  // normal (1, 0)
  ASSERT_DOUBLE_EQ(m.face(vertical).normal.x(), 1.0);
  EXPECT_DOUBLE_EQ(face_velocity(m, CellVectorField(m, Vec2(1, 0)), vertical), 1.0);
  EXPECT_DOUBLE_EQ(face_velocity(m, CellVectorField(m, Vec2(0, 1)), vertical), 0.0);
  const int horizontal = m.num_cells();  // normal (0, 1)
  CRField u(m);
  u[horizontal] = Vec2(2, -1);
  EXPECT_DOUBLE_EQ(face_velocity(m, u, horizontal), -1.0);
}

TEST(Csv, OneRowPerDof) {
  const auto m = build_tri_mesh(2);
  std::ostringstream os;
  write_csv(os, m, "u", CRField(m));
  int rows = 0;
  for (char c : os.str()) rows += c == '\n';
  EXPECT_EQ(rows, m.num_faces());
}
