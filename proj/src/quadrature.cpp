#include "mhdlab/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace mhdlab {

namespace {

struct Bary {
  double l0, l1, l2, w;
};

const std::array<Bary, 3> kGauss3 = {{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0},
}};

constexpr double kA1 = 0.059715871789770, kB1 = 0.470142064105115, kW1 = 0.132394152788506;
constexpr double kA2 = 0.797426985353087, kB2 = 0.101286507323456, kW2 = 0.125939180544827;

const std::array<Bary, 7> kDunavant5 = {{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {kA1, kB1, kB1, kW1},
    {kB1, kA1, kB1, kW1},
    {kB1, kB1, kA1, kW1},
    {kA2, kB2, kB2, kW2},
    {kB2, kA2, kB2, kW2},
    {kB2, kB2, kA2, kW2},
}};

struct Gauss1D {
  std::vector<double> x;  // on [0, 1]
  std::vector<double> w;  // sum to 1
};

Gauss1D gauss_legendre(int npts) {
  switch (npts) {
    case 2: {
      const double d = 0.5 / std::sqrt(3.0);
      return {{0.5 - d, 0.5 + d}, {0.5, 0.5}};
    }
    case 3: {
      const double d = 0.5 * std::sqrt(0.6);
      return {{0.5 - d, 0.5, 0.5 + d}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
    }
    default:
      throw std::invalid_argument("gauss_legendre: unsupported point count");
  }
}

template <std::size_t N>
std::vector<QuadPoint> on_triangle(const Cell& c, const std::array<Bary, N>& rule) {
  std::vector<QuadPoint> out;
  out.reserve(N);
  for (const auto& b : rule) {
    out.push_back({b.l0 * c.coords[0] + b.l1 * c.coords[1] + b.l2 * c.coords[2], b.w * c.measure});
  }
  return out;
}

}  // namespace

std::vector<QuadPoint> cell_rule(const Mesh& mesh, int cell, int degree) {
  if (mesh.dim() != 2) throw std::invalid_argument("cell_rule: only 2D cells are supported");
  if (degree > 5) throw std::invalid_argument("cell_rule: degree > 5 not available");
  const auto& c = mesh.cell(cell);
  if (!mesh.periodic()) {
    return degree <= 2 ? on_triangle(c, kGauss3) : on_triangle(c, kDunavant5);
  }
  const auto g = gauss_legendre(degree <= 3 ? 2 : 3);
  const Point& o = c.coords[0];
  const double hx = c.coords[1].x() - o.x();
  const double hy = c.coords[3].y() - o.y();
  std::vector<QuadPoint> out;
  for (std::size_t j = 0; j < g.x.size(); ++j)
    for (std::size_t i = 0; i < g.x.size(); ++i)
      out.push_back({Point(o.x() + g.x[i] * hx, o.y() + g.x[j] * hy, 0.0), g.w[i] * g.w[j] * c.measure});
  return out;
}

std::vector<QuadPoint> midpoint_rule(const Mesh& mesh, int cell) {
  const auto& c = mesh.cell(cell);
  if (c.coords.size() != 3) throw std::invalid_argument("midpoint_rule: triangles only");
  std::vector<QuadPoint> out(3);
  for (int l = 0; l < 3; ++l) {
    out[l] = {0.5 * (c.coords[(l + 1) % 3] + c.coords[(l + 2) % 3]), c.measure / 3.0};
  }
  return out;
}

std::vector<QuadPoint> face_rule(const Mesh& mesh, int face) {
  const auto& f = mesh.face(face);
  const auto g = gauss_legendre(3);
  std::vector<QuadPoint> out;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    out.push_back({f.a + g.x[i] * f.measure * f.tangent, g.w[i] * f.measure});
  }
  return out;
}

}  // namespace mhdlab
