#include "mhdlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mhdlab {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

void require_n(int n) {
  if (n < 2) {
    throw std::invalid_argument("mesh: need at least 2 cells per dimension, got n = " +
                                std::to_string(n));
  }
}

void link_faces(std::vector<Cell>& cells, const std::vector<Face>& faces) {
  for (int k = 0; k < static_cast<int>(cells.size()); ++k) {
    auto& c = cells[k];
    c.face_sign.resize(c.faces.size());
    for (std::size_t l = 0; l < c.faces.size(); ++l) {
      c.face_sign[l] = faces[c.faces[l]].in == k ? 1 : -1;
    }
  }
}

}  // namespace

double Mesh::total_measure() const {
  double s = 0.0;
  for (const auto& c : cells_) s += c.measure;
  return s;
}

double Mesh::quasi_uniformity() const {
  double lo = std::numeric_limits<double>::max();
  double hi = 0.0;
  for (const auto& c : cells_) {
    lo = std::min(lo, c.diameter);
    hi = std::max(hi, c.diameter);
  }
  return hi / lo;
}

std::vector<int> Mesh::neighbours(int k) const {
  std::vector<int> out;
  for (int s : cells_[k].faces) {
    const auto& f = faces_[s];
    if (!f.exterior()) out.push_back(f.other(k));
  }
  return out;
}

Mesh build_periodic_mesh(int n, int dim) {
  require_n(n);
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("build_periodic_mesh: dimension must be 2 or 3, got " +
                                std::to_string(dim));
  }
  Mesh m(MeshKind::periodic, dim, n);
  const double hs = 1.0 / n;
  m.h_ = std::sqrt(static_cast<double>(dim)) * hs;

  if (dim == 2) {
    auto vid = [n](int i, int j) { return wrap(j, n) * n + wrap(i, n); };
    auto cid = [n](int i, int j) { return wrap(j, n) * n + wrap(i, n); };
    auto vface = [n](int i, int j) { return wrap(j, n) * n + wrap(i, n); };
    auto hface = [n](int i, int j) { return n * n + wrap(j, n) * n + wrap(i, n); };

    m.vertices_.resize(n * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) m.vertices_[vid(i, j)] = Point(i * hs, j * hs, 0.0);
    m.boundary_vertex_.assign(n * n, false);

    m.faces_.resize(2 * n * n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        auto& v = m.faces_[vface(i, j)];
        v.vertices = {vid(i, j), vid(i, j + 1)};
        v.a = Point(i * hs, j * hs, 0.0);
        v.tangent = Point(0.0, 1.0, 0.0);
        v.normal = Point(1.0, 0.0, 0.0);
        v.centroid = Point(i * hs, (j + 0.5) * hs, 0.0);
        v.measure = hs;
        v.dsigma = hs;
        v.in = cid(i - 1, j);
        v.out = cid(i, j);

        auto& hf = m.faces_[hface(i, j)];
        hf.vertices = {vid(i, j), vid(i + 1, j)};
        hf.a = Point(i * hs, j * hs, 0.0);
        hf.tangent = Point(1.0, 0.0, 0.0);
        hf.normal = Point(0.0, 1.0, 0.0);
        hf.centroid = Point((i + 0.5) * hs, j * hs, 0.0);
        hf.measure = hs;
        hf.dsigma = hs;
        hf.in = cid(i, j - 1);
        hf.out = cid(i, j);
      }
    }

    m.cells_.resize(n * n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        auto& c = m.cells_[cid(i, j)];
        c.vertices = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
        c.coords = {Point(i * hs, j * hs, 0.0), Point((i + 1) * hs, j * hs, 0.0),
                    Point((i + 1) * hs, (j + 1) * hs, 0.0), Point(i * hs, (j + 1) * hs, 0.0)};
        c.faces = {hface(i, j), hface(i, j + 1), vface(i, j), vface(i + 1, j)};
        c.edge_orient = {1, -1, -1, 1};
        c.measure = hs * hs;
        c.diameter = std::sqrt(2.0) * hs;
        c.centroid = Point((i + 0.5) * hs, (j + 0.5) * hs, 0.0);
      }
    }
  } else {
    const int n3 = n * n * n;
    auto id = [n](int i, int j, int k) {
      return (wrap(k, n) * n + wrap(j, n)) * n + wrap(i, n);
    };
    m.vertices_.resize(n3);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m.vertices_[id(i, j, k)] = Point(i * hs, j * hs, k * hs);
    m.boundary_vertex_.assign(n3, false);

    // Face (axis a, cell c) is the lower face of c along a.
    auto fid = [&](int a, int i, int j, int k) { return a * n3 + id(i, j, k); };
    m.faces_.resize(3 * n3);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const int ijk[3] = {i, j, k};
          for (int a = 0; a < 3; ++a) {
            auto& f = m.faces_[fid(a, i, j, k)];
            int lo[3] = {i, j, k};
            lo[a] -= 1;
            f.in = id(lo[0], lo[1], lo[2]);
            f.out = id(i, j, k);
            f.normal = Point::Zero();
            f.normal[a] = 1.0;
            f.measure = hs * hs;
            f.dsigma = hs;
            Point c((i + 0.5) * hs, (j + 0.5) * hs, (k + 0.5) * hs);
            c[a] = ijk[a] * hs;
            f.centroid = c;
            f.a = Point(i * hs, j * hs, k * hs);
            const int b = (a + 1) % 3;
            const int d = (a + 2) % 3;
            int p[3] = {i, j, k};
            auto vtx = [&](int db, int dd) {
              int q[3] = {p[0], p[1], p[2]};
              q[b] += db;
              q[d] += dd;
              return id(q[0], q[1], q[2]);
            };
            f.vertices = {vtx(0, 0), vtx(1, 0), vtx(1, 1), vtx(0, 1)};
          }
        }
      }
    }

    m.cells_.resize(n3);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          auto& c = m.cells_[id(i, j, k)];
          for (int dk = 0; dk < 2; ++dk)
            for (int dj = 0; dj < 2; ++dj)
              for (int di = 0; di < 2; ++di) {
                c.vertices.push_back(id(i + di, j + dj, k + dk));
                c.coords.emplace_back((i + di) * hs, (j + dj) * hs, (k + dk) * hs);
              }
          c.faces = {fid(0, i, j, k), fid(0, i + 1, j, k), fid(1, i, j, k),
                     fid(1, i, j + 1, k), fid(2, i, j, k), fid(2, i, j, k + 1)};
          c.measure = hs * hs * hs;
          c.diameter = std::sqrt(3.0) * hs;
          c.centroid = Point((i + 0.5) * hs, (j + 0.5) * hs, (k + 0.5) * hs);
        }
      }
    }
  }
  link_faces(m.cells_, m.faces_);
  return m;
}

Mesh build_tri_mesh(int n) {
  require_n(n);
  Mesh m(MeshKind::triangulated, 2, n);
  const double hs = 1.0 / n;
  m.h_ = std::sqrt(2.0) * hs;

  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  auto lower = [n](int i, int j) { return 2 * (j * n + i); };      // v00, v10, v11
  auto upper = [n](int i, int j) { return 2 * (j * n + i) + 1; };  // v00, v11, v01
  auto hface = [n](int i, int j) { return j * n + i; };
  auto vface = [n](int i, int j) { return n * (n + 1) + j * (n + 1) + i; };
  auto dface = [n](int i, int j) { return 2 * n * (n + 1) + j * n + i; };

  m.vertices_.resize((n + 1) * (n + 1));
  m.boundary_vertex_.resize(m.vertices_.size());
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      m.vertices_[vid(i, j)] = Point(i * hs, j * hs, 0.0);
      m.boundary_vertex_[vid(i, j)] = i == 0 || j == 0 || i == n || j == n;
    }
  }

  m.cells_.resize(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      auto& lo = m.cells_[lower(i, j)];
      lo.vertices = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)};
      lo.faces = {vface(i + 1, j), dface(i, j), hface(i, j)};
      auto& up = m.cells_[upper(i, j)];
      up.vertices = {vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)};
      up.faces = {hface(i, j + 1), vface(i, j), dface(i, j)};
    }
  }
  for (auto& c : m.cells_) {
    for (int v : c.vertices) c.coords.push_back(m.vertices_[v]);
    const Point e1 = c.coords[1] - c.coords[0];
    const Point e2 = c.coords[2] - c.coords[0];
    c.measure = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    c.centroid = (c.coords[0] + c.coords[1] + c.coords[2]) / 3.0;
    c.diameter = std::max({(c.coords[1] - c.coords[0]).norm(), (c.coords[2] - c.coords[1]).norm(),
                           (c.coords[0] - c.coords[2]).norm()});
  }

  const int nfaces = 3 * n * n + 2 * n;
  m.faces_.resize(nfaces);
  auto set_face = [&](int s, int v0, int v1, int in, int out) {
    auto& f = m.faces_[s];
    f.vertices = {v0, v1};
    f.a = m.vertices_[v0];
    const Point d = m.vertices_[v1] - m.vertices_[v0];
    f.measure = d.norm();
    f.tangent = d / f.measure;
    f.centroid = 0.5 * (m.vertices_[v0] + m.vertices_[v1]);
    f.in = in;
    f.out = out;
    // Outward from `in`: perpendicular to the tangent, away from the centroid of `in`.
    Point nrm(f.tangent.y(), -f.tangent.x(), 0.0);
    if (nrm.dot(f.centroid - m.cells_[in].centroid) < 0.0) nrm = -nrm;
    f.normal = nrm;
    if (out >= 0) {
      f.dsigma = (m.cells_[in].centroid - m.cells_[out].centroid).norm();
    } else {
      f.dsigma = std::abs(nrm.dot(f.centroid - m.cells_[in].centroid));
    }
  };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int below = j > 0 ? upper(i, j - 1) : -1;
      const int above = j < n ? lower(i, j) : -1;
      if (below >= 0 && above >= 0) set_face(hface(i, j), vid(i, j), vid(i + 1, j), below, above);
      else set_face(hface(i, j), vid(i, j), vid(i + 1, j), below >= 0 ? below : above, -1);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const int left = i > 0 ? lower(i - 1, j) : -1;
      const int right = i < n ? upper(i, j) : -1;
      if (left >= 0 && right >= 0) set_face(vface(i, j), vid(i, j), vid(i, j + 1), left, right);
      else set_face(vface(i, j), vid(i, j), vid(i, j + 1), left >= 0 ? left : right, -1);
    }
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      set_face(dface(i, j), vid(i, j), vid(i + 1, j + 1), upper(i, j), lower(i, j));

  link_faces(m.cells_, m.faces_);
  for (auto& c : m.cells_) {
    c.edge_orient.resize(3);
    for (int k = 0; k < 3; ++k) {
      const Point ccw = c.coords[(k + 2) % 3] - c.coords[(k + 1) % 3];
      c.edge_orient[k] = m.faces_[c.faces[k]].tangent.dot(ccw) > 0.0 ? 1 : -1;
    }
  }
  return m;
}

void dump_mesh(std::ostream& os, const Mesh& mesh) {
  os << "# mesh kind=" << (mesh.periodic() ? "periodic" : "triangulated") << " dim=" << mesh.dim()
     << " n=" << mesh.cells_per_dim() << " h=" << mesh.h() << "\n";
  os << "vertices " << mesh.num_vertices() << "\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto& p = mesh.vertices()[v];
    os << v << " " << p.x() << " " << p.y();
    if (mesh.dim() == 3) os << " " << p.z();
    os << "\n";
  }
  os << "cells " << mesh.num_cells() << "\n";
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const auto& c = mesh.cell(k);
    os << k << " measure=" << c.measure << " vertices=";
    for (int v : c.vertices) os << v << ",";
    os << " faces=";
    for (std::size_t l = 0; l < c.faces.size(); ++l)
      os << c.faces[l] << (c.face_sign[l] > 0 ? "+" : "-") << ",";
    os << "\n";
  }
  os << "faces " << mesh.num_faces() << "\n";
  for (int s = 0; s < mesh.num_faces(); ++s) {
    const auto& f = mesh.face(s);
    os << s << " in=" << f.in << " out=" << f.out << " measure=" << f.measure << " normal=("
       << f.normal.x() << "," << f.normal.y();
    if (mesh.dim() == 3) os << "," << f.normal.z();
    os << ")" << (f.exterior() ? " exterior" : "") << "\n";
  }
}

}  // namespace mhdlab
