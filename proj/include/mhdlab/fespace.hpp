// Discrete function spaces on 2D meshes and the operators acting on them.
//
//   Q_h  piecewise constants                       CellField / CellVectorField
//   V_h  Crouzeix-Raviart, one vector per face     CRField
//   N_h  lowest-order edge elements                EdgeField
//   W_h  continuous P1 (triangles) / Q1 (quads)    PotentialField
//
// Edge degrees of freedom are mean tangential components along the global
// face tangent. On triangles the local shape functions are the scaled Whitney
// forms |e| (l_a grad l_b - l_b grad l_a); on rectangles they are
// ((1 - y), 0), (y, 0), (0, 1 - x), (0, x) in reference coordinates, which
// span {(a1 + b1 y, a2 + b2 x)}.
//
// 2D curl conventions: curl B = d1 B2 - d2 B1 (scalar), and the Lorentz force
// curl B x B is w (-B2, B1) with w = curl B.

#ifndef MHDLAB_FESPACE_HPP
#define MHDLAB_FESPACE_HPP

#include "mhdlab/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mhdlab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using ScalarFn = std::function<double(const Point&)>;
using VectorFn = std::function<Vec2(const Point&)>;

inline Vec2 xy(const Point& p) { return {p.x(), p.y()}; }
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct CellField {
  std::vector<double> v;
  CellField() = default;
  explicit CellField(const Mesh& m, double value = 0.0) : v(m.num_cells(), value) {}
  double operator[](int k) const { return v[k]; }
  double& operator[](int k) { return v[k]; }
  int size() const { return static_cast<int>(v.size()); }
};

struct CellVectorField {
  std::vector<Vec2> v;
  CellVectorField() = default;
  explicit CellVectorField(const Mesh& m, const Vec2& value = Vec2::Zero()) : v(m.num_cells(), value) {}
  const Vec2& operator[](int k) const { return v[k]; }
  Vec2& operator[](int k) { return v[k]; }
  int size() const { return static_cast<int>(v.size()); }
};

struct CRField {
  std::vector<Vec2> v;  // face-mean value per face
  CRField() = default;
  explicit CRField(const Mesh& m, const Vec2& value = Vec2::Zero()) : v(m.num_faces(), value) {}
  const Vec2& operator[](int s) const { return v[s]; }
  Vec2& operator[](int s) { return v[s]; }
  int size() const { return static_cast<int>(v.size()); }
};

struct EdgeField {
  std::vector<double> v;  // mean tangential component per edge
  EdgeField() = default;
  explicit EdgeField(const Mesh& m, double value = 0.0) : v(m.num_edges(), value) {}
  double operator[](int e) const { return v[e]; }
  double& operator[](int e) { return v[e]; }
  int size() const { return static_cast<int>(v.size()); }
};

struct PotentialField {
  std::vector<double> v;  // vertex values
  PotentialField() = default;
  explicit PotentialField(const Mesh& m, double value = 0.0) : v(m.num_vertices(), value) {}
  double operator[](int i) const { return v[i]; }
  double& operator[](int i) { return v[i]; }
  int size() const { return static_cast<int>(v.size()); }
};

// ---------------------------------------------------------------------------
// Local shape functions. `x` is an unwrapped point inside the cell.

/// Barycentric coordinates on a triangle.
std::array<double, 3> barycentric(const Cell& c, const Point& x);
/// Gradients of the barycentric coordinates on a triangle.
std::array<Vec2, 3> barycentric_gradients(const Mesh& m, int cell);

/// Crouzeix-Raviart shape functions (one per local face) at x.
std::array<double, 3> cr_shape(const Mesh& m, int cell, const Point& x);
/// Edge shape functions at x, in global edge orientation (3 or 4 entries).
std::vector<Vec2> edge_shape(const Mesh& m, int cell, const Point& x);
/// Curl of each edge shape function on the cell (constant).
std::vector<double> edge_shape_curl(const Mesh& m, int cell);
/// Element mass matrix of the edge shape functions (exact).
Eigen::MatrixXd edge_mass(const Mesh& m, int cell);

Vec2 cr_value(const Mesh& m, const CRField& u, int cell, const Point& x);
Vec2 cr_mean(const Mesh& m, const CRField& u, int cell);
Vec2 edge_value(const Mesh& m, const EdgeField& b, int cell, const Point& x);
double potential_value(const Mesh& m, const PotentialField& p, int cell, const Point& x);

// ---------------------------------------------------------------------------
// Projections and interpolants.

CellField project_Q(const Mesh& m, const ScalarFn& f);
CellVectorField project_Q(const Mesh& m, const VectorFn& f);
/// Exact cell averages of a CR field (the cached u-hat of a state).
CellVectorField project_Q(const Mesh& m, const CRField& u);

/// Face means of v. With `no_slip` the exterior face values are set to zero.
CRField interpolate_CR(const Mesh& m, const VectorFn& v, bool no_slip = false);
/// Mean tangential components of b. With `tangential_bc` the exterior edges are set to zero.
EdgeField interpolate_Nedelec(const Mesh& m, const VectorFn& b, bool tangential_bc = false);
/// Vertex interpolation followed by subtraction of the mean.
PotentialField interpolate_W(const Mesh& m, const ScalarFn& psi);

double mean_value(const Mesh& m, const PotentialField& p);

// ---------------------------------------------------------------------------
// Discrete differential operators.

/// Element-wise gradient of a CR field, G(a, b) = d_b u_a.
std::vector<Mat2> grad_h(const Mesh& m, const CRField& u);
CellField div_h(const Mesh& m, const CRField& u);
CellField curl_h(const Mesh& m, const EdgeField& b);
/// Exact gradient of a potential as an edge field.
EdgeField grad_potential(const Mesh& m, const PotentialField& p);

/// (div u)_K = 1/|K| sum_sigma |sigma| {{u}} . n_{sigma,K}; periodic mesh only.
CellField div_h_pc(const Mesh& m, const CellVectorField& u);
/// Companion cell gradient 1/|K| sum_sigma |sigma| {{u}} (x) n_{sigma,K}; periodic mesh only.
std::vector<Mat2> grad_h_pc(const Mesh& m, const CellVectorField& u);

struct Trace {
  double in;
  double out;
  double jump;  // out - in
  double avg;
};

inline double jump(double in, double out) { return out - in; }
inline double avg(double in, double out) { return 0.5 * (out + in); }

/// Traces of a piecewise constant field on an interior face.
/// Throws std::invalid_argument on exterior faces.
Trace trace_jump_avg(const Mesh& m, const CellField& f, int face);
/// Same, with the exterior trace supplied by the boundary condition.
Trace trace_jump_avg(const Mesh& m, const CellField& f, int face, double exterior_value);

/// Normal face velocity u_sigma = (1/|sigma|) int_sigma u . n_sigma.
double face_velocity(const Mesh& m, const CRField& u, int face);
double face_velocity(const Mesh& m, const CellVectorField& u, int face);

// ---------------------------------------------------------------------------
// CSV: one row per dof (id, location, values).

void write_csv(std::ostream& os, const Mesh& m, const std::string& name, const CellField& f);
void write_csv(std::ostream& os, const Mesh& m, const std::string& name, const CellVectorField& f);
void write_csv(std::ostream& os, const Mesh& m, const std::string& name, const CRField& f);
void write_csv(std::ostream& os, const Mesh& m, const std::string& name, const EdgeField& f);
void write_csv(std::ostream& os, const Mesh& m, const std::string& name, const PotentialField& f);

}  // namespace mhdlab

#endif  // MHDLAB_FESPACE_HPP
