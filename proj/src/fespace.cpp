#include "mhdlab/fespace.hpp"

#include "mhdlab/quadrature.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace mhdlab {

namespace {

bool is_triangle(const Cell& c) { return c.coords.size() == 3; }

void require_2d(const Mesh& m, const char* what) {
  if (m.dim() != 2) throw std::invalid_argument(std::string(what) + ": 2D meshes only");
}

Vec2 outward(const Mesh& m, int cell, int local) {
  const auto& c = m.cell(cell);
  return c.face_sign[local] * xy(m.face(c.faces[local]).normal);
}

int local_index(const Cell& c, int vertex) {
  for (std::size_t i = 0; i < c.vertices.size(); ++i)
    if (c.vertices[i] == vertex) return static_cast<int>(i);
  throw std::logic_error("local_index: vertex not in cell");
}

}  // namespace

std::array<double, 3> barycentric(const Cell& c, const Point& x) {
  const Vec2 p0 = xy(c.coords[0]);
  Mat2 t;
  t.col(0) = xy(c.coords[1]) - p0;
  t.col(1) = xy(c.coords[2]) - p0;
  const Vec2 l = t.inverse() * (xy(x) - p0);
  return {1.0 - l.x() - l.y(), l.x(), l.y()};
}

std::array<Vec2, 3> barycentric_gradients(const Mesh& m, int cell) {
  const auto& c = m.cell(cell);
  std::array<Vec2, 3> g;
  for (int k = 0; k < 3; ++k) {
    g[k] = -m.face(c.faces[k]).measure * outward(m, cell, k) / (2.0 * c.measure);
  }
  return g;
}

std::array<double, 3> cr_shape(const Mesh& m, int cell, const Point& x) {
  const auto l = barycentric(m.cell(cell), x);
  return {1.0 - 2.0 * l[0], 1.0 - 2.0 * l[1], 1.0 - 2.0 * l[2]};
}

std::vector<Vec2> edge_shape(const Mesh& m, int cell, const Point& x) {
  const auto& c = m.cell(cell);
  if (is_triangle(c)) {
    const auto l = barycentric(c, x);
    const auto g = barycentric_gradients(m, cell);
    std::vector<Vec2> out(3);
    for (int e = 0; e < 3; ++e) {
      const auto& f = m.face(c.faces[e]);
      const int a = local_index(c, f.vertices[0]);
      const int b = local_index(c, f.vertices[1]);
      out[e] = f.measure * (l[a] * g[b] - l[b] * g[a]);
    }
    return out;
  }
  const Point& o = c.coords[0];
  const double xs = (x.x() - o.x()) / (c.coords[1].x() - o.x());
  const double ys = (x.y() - o.y()) / (c.coords[3].y() - o.y());
  return {Vec2(1.0 - ys, 0.0), Vec2(ys, 0.0), Vec2(0.0, 1.0 - xs), Vec2(0.0, xs)};
}

std::vector<double> edge_shape_curl(const Mesh& m, int cell) {
  const auto& c = m.cell(cell);
  std::vector<double> out(c.faces.size());
  for (std::size_t l = 0; l < c.faces.size(); ++l) {
    out[l] = c.edge_orient[l] * m.face(c.faces[l]).measure / c.measure;
  }
  return out;
}

Eigen::MatrixXd edge_mass(const Mesh& m, int cell) {
  const auto& c = m.cell(cell);
  const int nl = static_cast<int>(c.faces.size());
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nl, nl);
  const auto rule = is_triangle(c) ? midpoint_rule(m, cell) : cell_rule(m, cell, 2);
  for (const auto& q : rule) {
    const auto phi = edge_shape(m, cell, q.x);
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j) mass(i, j) += q.w * phi[i].dot(phi[j]);
  }
  return mass;
}

Vec2 cr_value(const Mesh& m, const CRField& u, int cell, const Point& x) {
  const auto& c = m.cell(cell);
  const auto phi = cr_shape(m, cell, x);
  Vec2 out = Vec2::Zero();
  for (int l = 0; l < 3; ++l) out += phi[l] * u[c.faces[l]];
  return out;
}

Vec2 cr_mean(const Mesh& m, const CRField& u, int cell) {
  const auto& c = m.cell(cell);
  return (u[c.faces[0]] + u[c.faces[1]] + u[c.faces[2]]) / 3.0;
}

Vec2 edge_value(const Mesh& m, const EdgeField& b, int cell, const Point& x) {
  const auto& c = m.cell(cell);
  const auto phi = edge_shape(m, cell, x);
  Vec2 out = Vec2::Zero();
  for (std::size_t l = 0; l < phi.size(); ++l) out += b[c.faces[l]] * phi[l];
  return out;
}

double potential_value(const Mesh& m, const PotentialField& p, int cell, const Point& x) {
  const auto& c = m.cell(cell);
  if (is_triangle(c)) {
    const auto l = barycentric(c, x);
    return l[0] * p[c.vertices[0]] + l[1] * p[c.vertices[1]] + l[2] * p[c.vertices[2]];
  }
  const Point& o = c.coords[0];
  const double xs = (x.x() - o.x()) / (c.coords[1].x() - o.x());
  const double ys = (x.y() - o.y()) / (c.coords[3].y() - o.y());
  return (1 - xs) * (1 - ys) * p[c.vertices[0]] + xs * (1 - ys) * p[c.vertices[1]] +
         xs * ys * p[c.vertices[2]] + (1 - xs) * ys * p[c.vertices[3]];
}

CellField project_Q(const Mesh& m, const ScalarFn& f) {
  require_2d(m, "project_Q");
  CellField out(m);
  for (int k = 0; k < m.num_cells(); ++k) {
    double s = 0.0;
    for (const auto& q : cell_rule(m, k, 5)) s += q.w * f(q.x);
    out[k] = s / m.cell(k).measure;
  }
  return out;
}

CellVectorField project_Q(const Mesh& m, const VectorFn& f) {
  require_2d(m, "project_Q");
  CellVectorField out(m);
  for (int k = 0; k < m.num_cells(); ++k) {
    Vec2 s = Vec2::Zero();
    for (const auto& q : cell_rule(m, k, 5)) s += q.w * f(q.x);
    out[k] = s / m.cell(k).measure;
  }
  return out;
}

CellVectorField project_Q(const Mesh& m, const CRField& u) {
  CellVectorField out(m);
  for (int k = 0; k < m.num_cells(); ++k) out[k] = cr_mean(m, u, k);
  return out;
}

CRField interpolate_CR(const Mesh& m, const VectorFn& v, bool no_slip) {
  require_2d(m, "interpolate_CR");
  CRField out(m);
  for (int s = 0; s < m.num_faces(); ++s) {
    if (no_slip && m.face(s).exterior()) continue;
    Vec2 acc = Vec2::Zero();
    for (const auto& q : face_rule(m, s)) acc += q.w * v(q.x);
    out[s] = acc / m.face(s).measure;
  }
  return out;
}

EdgeField interpolate_Nedelec(const Mesh& m, const VectorFn& b, bool tangential_bc) {
  require_2d(m, "interpolate_Nedelec");
  EdgeField out(m);
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& f = m.face(e);
    if (tangential_bc && f.exterior()) continue;
    const Vec2 t = xy(f.tangent);
    double acc = 0.0;
    for (const auto& q : face_rule(m, e)) acc += q.w * b(q.x).dot(t);
    out[e] = acc / f.measure;
  }
  return out;
}

double mean_value(const Mesh& m, const PotentialField& p) {
  double s = 0.0;
  for (const auto& c : m.cells()) {
    double a = 0.0;
    for (int v : c.vertices) a += p[v];
    s += c.measure * a / static_cast<double>(c.vertices.size());
  }
  return s / m.total_measure();
}

PotentialField interpolate_W(const Mesh& m, const ScalarFn& psi) {
  require_2d(m, "interpolate_W");
  PotentialField out(m);
  for (int v = 0; v < m.num_vertices(); ++v) out[v] = psi(m.vertices()[v]);
  const double mean = mean_value(m, out);
  for (auto& x : out.v) x -= mean;
  return out;
}

std::vector<Mat2> grad_h(const Mesh& m, const CRField& u) {
  std::vector<Mat2> g(m.num_cells(), Mat2::Zero());
  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& c = m.cell(k);
    if (!is_triangle(c)) throw std::invalid_argument("grad_h: Crouzeix-Raviart fields live on triangles");
    for (int l = 0; l < 3; ++l) {
      g[k] += m.face(c.faces[l]).measure * u[c.faces[l]] * outward(m, k, l).transpose();
    }
    g[k] /= c.measure;
  }
  return g;
}

CellField div_h(const Mesh& m, const CRField& u) {
  const auto g = grad_h(m, u);
  CellField out(m);
  for (int k = 0; k < m.num_cells(); ++k) out[k] = g[k].trace();
  return out;
}

CellField curl_h(const Mesh& m, const EdgeField& b) {
  CellField out(m);
  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& c = m.cell(k);
    double s = 0.0;
    for (std::size_t l = 0; l < c.faces.size(); ++l)
      s += c.edge_orient[l] * m.face(c.faces[l]).measure * b[c.faces[l]];
    out[k] = s / c.measure;
  }
  return out;
}

EdgeField grad_potential(const Mesh& m, const PotentialField& p) {
  EdgeField out(m);
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& f = m.face(e);
    out[e] = (p[f.vertices[1]] - p[f.vertices[0]]) / f.measure;
  }
  return out;
}

CellField div_h_pc(const Mesh& m, const CellVectorField& u) {
  if (!m.periodic()) throw std::invalid_argument("div_h_pc: defined on the periodic mesh only");
  CellField out(m);
  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& c = m.cell(k);
    double s = 0.0;
    for (std::size_t l = 0; l < c.faces.size(); ++l) {
      const auto& f = m.face(c.faces[l]);
      s += f.measure * 0.5 * (u[k] + u[f.other(k)]).dot(outward(m, k, static_cast<int>(l)));
    }
    out[k] = s / c.measure;
  }
  return out;
}

std::vector<Mat2> grad_h_pc(const Mesh& m, const CellVectorField& u) {
  if (!m.periodic()) throw std::invalid_argument("grad_h_pc: defined on the periodic mesh only");
  std::vector<Mat2> g(m.num_cells(), Mat2::Zero());
  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& c = m.cell(k);
    for (std::size_t l = 0; l < c.faces.size(); ++l) {
      const auto& f = m.face(c.faces[l]);
      g[k] += f.measure * 0.5 * (u[k] + u[f.other(k)]) * outward(m, k, static_cast<int>(l)).transpose();
    }
    g[k] /= c.measure;
  }
  return g;
}

Trace trace_jump_avg(const Mesh& m, const CellField& f, int face) {
  const auto& s = m.face(face);
  if (s.exterior()) {
    throw std::invalid_argument("trace_jump_avg: face " + std::to_string(face) +
                                " is exterior; supply the boundary trace");
  }
  const double in = f[s.in];
  const double out = f[s.out];
  return {in, out, jump(in, out), avg(in, out)};
}

Trace trace_jump_avg(const Mesh& m, const CellField& f, int face, double exterior_value) {
  const auto& s = m.face(face);
  const double in = f[s.in];
  const double out = s.exterior() ? exterior_value : f[s.out];
  return {in, out, jump(in, out), avg(in, out)};
}

double face_velocity(const Mesh& m, const CRField& u, int face) {
  return u[face].dot(xy(m.face(face).normal));
}

double face_velocity(const Mesh& m, const CellVectorField& u, int face) {
  const auto& f = m.face(face);
  const Vec2 out = f.exterior() ? Vec2::Zero() : u[f.out];
  return 0.5 * (u[f.in] + out).dot(xy(f.normal));
}

namespace {

void row(std::ostream& os, const std::string& name, int id, const Point& x) {
  os << name << "," << id << "," << x.x() << "," << x.y();
}

}  // namespace

void write_csv(std::ostream& os, const Mesh& m, const std::string& name, const CellField& f) {
  os << std::setprecision(17);
  for (int k = 0; k < f.size(); ++k) {
    row(os, name, k, m.cell(k).centroid);
    os << "," << f[k] << ",\n";
  }
}

void write_csv(std::ostream& os, const Mesh& m, const std::string& name, const CellVectorField& f) {
  os << std::setprecision(17);
  for (int k = 0; k < f.size(); ++k) {
    row(os, name, k, m.cell(k).centroid);
    os << "," << f[k].x() << "," << f[k].y() << "\n";
  }
}

void write_csv(std::ostream& os, const Mesh& m, const std::string& name, const CRField& f) {
  os << std::setprecision(17);
  for (int s = 0; s < f.size(); ++s) {
    row(os, name, s, m.face(s).centroid);
    os << "," << f[s].x() << "," << f[s].y() << "\n";
  }
}

void write_csv(std::ostream& os, const Mesh& m, const std::string& name, const EdgeField& f) {
  os << std::setprecision(17);
  for (int e = 0; e < f.size(); ++e) {
    row(os, name, e, m.face(e).centroid);
    os << "," << f[e] << ",\n";
  }
}

void write_csv(std::ostream& os, const Mesh& m, const std::string& name, const PotentialField& f) {
  os << std::setprecision(17);
  for (int v = 0; v < f.size(); ++v) {
    row(os, name, v, m.vertices()[v]);
    os << "," << f[v] << ",\n";
  }
}

}  // namespace mhdlab
