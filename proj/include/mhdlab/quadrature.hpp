// Fixed quadrature rules on the mesh cells and faces. Weights are scaled so
// that they sum to the measure of the cell or face.

#ifndef MHDLAB_QUADRATURE_HPP
#define MHDLAB_QUADRATURE_HPP

#include "mhdlab/mesh.hpp"

#include <vector>

namespace mhdlab {

struct QuadPoint {
  Point x;
  double w;
};

/// Rule exact for polynomials of total degree `degree` on triangles and of
/// degree `degree` per variable on quads. Supported: degree <= 5.
/// Triangles: 3-point Gauss (degree 2) or 7-point Dunavant (degree 5).
/// Quads: 2x2 or 3x3 tensor Gauss.
std::vector<QuadPoint> cell_rule(const Mesh& mesh, int cell, int degree);

/// Edge-midpoint rule on a triangle (degree 2). Point l is the midpoint of local face l.
std::vector<QuadPoint> midpoint_rule(const Mesh& mesh, int cell);

/// 3-point Gauss-Legendre along a 2D face, using unwrapped coordinates.
std::vector<QuadPoint> face_rule(const Mesh& mesh, int face);

}  // namespace mhdlab

#endif  // MHDLAB_QUADRATURE_HPP
