// Uniform meshes for the two discretizations:
//   - a periodic structured quad/cuboid mesh of the unit torus
//   - a triangulation of the unit square (every square cut along its
//     south-west to north-east diagonal) with exterior faces on the boundary
//
// In 2D the faces of a cell are segments and double as the edges that carry
// the edge-element degrees of freedom; face k and edge k are the same object.

#ifndef MHDLAB_MESH_HPP
#define MHDLAB_MESH_HPP

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace mhdlab {

using Point = Eigen::Vector3d;

enum class MeshKind { periodic, triangulated };

struct Cell {
  std::vector<int> vertices;     // counter-clockwise in 2D
  std::vector<Point> coords;     // unwrapped vertex coordinates
  // Local face order. Triangle: face k is opposite vertex k.
  // Quad: bottom, top, left, right. Hexahedron: x-, x+, y-, y+, z-, z+.
  std::vector<int> faces;
  std::vector<int> face_sign;    // +1 when this cell is faces[k].in
  std::vector<int> edge_orient;  // 2D: +1 when the edge tangent runs counter-clockwise around the cell
  double measure = 0.0;
  double diameter = 0.0;
  Point centroid = Point::Zero();
};

struct Face {
  std::vector<int> vertices;  // 2D: tail, head of the tangent
  Point a = Point::Zero();    // 2D: unwrapped tail point
  Point normal = Point::Zero();   // unit, outward from `in`
  Point tangent = Point::Zero();  // 2D only
  Point centroid = Point::Zero();
  double measure = 0.0;
  double dsigma = 0.0;  // centroid distance to the neighbour (to the face for exterior faces)
  int in = -1;
  int out = -1;  // -1 on exterior faces

  bool exterior() const { return out < 0; }
  int other(int cell) const { return cell == in ? out : in; }
};

class Mesh {
 public:
  Mesh(MeshKind kind, int dim, int n) : kind_(kind), dim_(dim), n_(n) {}

  MeshKind kind() const { return kind_; }
  bool periodic() const { return kind_ == MeshKind::periodic; }
  int dim() const { return dim_; }
  int cells_per_dim() const { return n_; }
  double h() const { return h_; }

  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const Cell& cell(int k) const { return cells_[k]; }
  const Face& face(int s) const { return faces_[s]; }

  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_edges() const { return dim_ == 2 ? num_faces() : 0; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }

  // Vertex on the domain boundary (always false on the torus).
  bool boundary_vertex(int v) const { return boundary_vertex_[v]; }

  double total_measure() const;
  double quasi_uniformity() const;  // max/min cell diameter

  // Cells sharing a face with `k`.
  std::vector<int> neighbours(int k) const;

  friend Mesh build_periodic_mesh(int n, int dim);
  friend Mesh build_tri_mesh(int n);

 private:
  MeshKind kind_;
  int dim_;
  int n_;
  double h_ = 0.0;
  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::vector<bool> boundary_vertex_;
};

/// Periodic uniform mesh of the unit torus with n^dim cells of side 1/n.
/// Throws std::invalid_argument for n < 2 or dim outside {2, 3}.
Mesh build_periodic_mesh(int n, int dim);

/// Unit square split into n^2 squares, each cut into two triangles along the
/// diagonal from its lower-left to its upper-right corner.
Mesh build_tri_mesh(int n);

/// Plain-text listing of vertices, cells and faces with adjacency.
void dump_mesh(std::ostream& os, const Mesh& mesh);

}  // namespace mhdlab

#endif  // MHDLAB_MESH_HPP
