// Implicit time stepping for the two mixed finite-volume / finite-element
// methods.
//
//   scheme1  triangles, density in Q_h, velocity in the no-slip CR space,
//            magnetic field in the edge space with zero tangential trace.
//   scheme2  periodic rectangles, density and velocity in Q_h, magnetic
//            field in the quad edge space.
//
// Each step solves the coupled backward-Euler system with a damped Newton
// iteration on the full residual. The Jacobian is built by finite
// differences with column colouring; the colouring uses the cell-graph
// distance over which an unknown can influence a residual (1 for scheme1,
// 2 for scheme2 because of the averaged divergence in the momentum flux).

#ifndef MHDLAB_SCHEME_HPP
#define MHDLAB_SCHEME_HPP

#include "mhdlab/fespace.hpp"
#include "mhdlab/numerics.hpp"

#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhdlab {

struct DiscreteState {
  double t = 0.0;
  CellField rho;
  CRField u;             // scheme1 velocity; empty for scheme2
  CellVectorField uhat;  // scheme1: cell means of u; scheme2: the velocity itself
  EdgeField B;
};

struct StepReport {
  int iterations = 0;          // Newton iterations (1 when the initial guess already solves the step)
  double residual = 0.0;       // final scaled max-norm residual
  int linear_iterations = 0;   // Krylov iterations summed over the step (0 for direct solves)
  double min_density = 0.0;
  double wall_seconds = 0.0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NewtonDivergence : public SolverError {
 public:
  using SolverError::SolverError;
};
class PositivityLoss : public SolverError {
 public:
  using SolverError::SolverError;
};
class LinearSolveFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

struct SolverOptions {
  double tolerance = 1e-12;         // scaled residual, max norm
  double linear_tolerance = 1e-12;  // relative, Krylov path only
  int max_iterations = 100;
  int direct_limit = 10000;         // unknowns below which a sparse LU is used
};

class Discretization {
 public:
  Discretization(const Mesh& mesh, Variant variant, const Params& params, SolverOptions opts = {});

  const Mesh& mesh() const { return *mesh_; }
  Variant variant() const { return variant_; }
  const Params& params() const { return params_; }
  const SolverOptions& options() const { return opts_; }

  // Unknown layout: [rho per cell | 2 velocity components per velocity dof | B per free edge].
  int num_cells() const { return mesh_->num_cells(); }
  int num_velocity_dofs() const { return static_cast<int>(velocity_dofs_.size()); }
  int num_free_edges() const { return static_cast<int>(free_edges_.size()); }
  int num_unknowns() const { return num_cells() + 2 * num_velocity_dofs() + num_free_edges(); }
  /// scheme1: free face ids; scheme2: cell ids.
  const std::vector<int>& velocity_dofs() const { return velocity_dofs_; }
  const std::vector<int>& free_edges() const { return free_edges_; }

  Eigen::VectorXd pack(const DiscreteState& s) const;
  /// Writes x into s (velocity and field dofs outside the free sets stay zero) and refreshes uhat.
  void unpack(const Eigen::VectorXd& x, DiscreteState& s) const;
  DiscreteState zero_state() const;

  /// Full residual in the unknown layout; dt = next.t - prev.t.
  Eigen::VectorXd residual(const DiscreteState& next, const DiscreteState& prev) const;
  /// Per-row weight 1 / (measure of the test-function support).
  const Eigen::VectorXd& row_scale() const { return row_scale_; }

  // Per-cell data reused by the assembly.
  const Eigen::MatrixXd& edge_mass(int cell) const { return mass_[cell]; }
  const std::vector<double>& edge_curl(int cell) const { return curl_[cell]; }
  /// scheme1: value of edge field b at the midpoint of local face l of the cell.
  Vec2 edge_value_at_midpoint(const EdgeField& b, int cell, int l) const;
  /// Cell integral of u x b, exact for both velocity types.
  double cross_integral(const DiscreteState& s, const EdgeField& b, int cell) const;
  /// curl_h b on one cell.
  double curl_h_cell(const EdgeField& b, int cell) const;

  /// Rows touched by each unknown (sparsity of the Jacobian), and a column colouring.
  const std::vector<std::vector<int>>& pattern() const { return pattern_; }
  const std::vector<int>& colours() const { return colour_; }
  int num_colours() const { return num_colours_; }

  /// Finite-difference Jacobian of the residual at `next`.
  Eigen::SparseMatrix<double> jacobian(const DiscreteState& next, const DiscreteState& prev) const;

 private:
  void residual_scheme1(const DiscreteState& s, const DiscreteState& prev, double dt,
                        Eigen::VectorXd& r) const;
  void residual_scheme2(const DiscreteState& s, const DiscreteState& prev, double dt,
                        Eigen::VectorXd& r) const;
  void residual_induction(const DiscreteState& s, const DiscreteState& prev, double dt,
                          Eigen::VectorXd& r) const;
  void build_pattern();

  const Mesh* mesh_;
  Variant variant_;
  Params params_;
  SolverOptions opts_;
  std::vector<int> velocity_dofs_;
  std::vector<int> velocity_index_;  // face (scheme1) or cell (scheme2) -> dof index or -1
  std::vector<int> free_edges_;
  std::vector<int> edge_index_;      // edge -> free index or -1
  std::vector<Eigen::MatrixXd> mass_;
  std::vector<std::vector<double>> curl_;
  std::vector<std::array<std::array<Vec2, 3>, 3>> mid_shape_;  // [cell][face l][shape j]
  Eigen::VectorXd row_scale_;
  std::vector<std::vector<int>> pattern_;
  std::vector<int> colour_;
  int num_colours_ = 0;
};

/// Projected initial data. scheme1 imposes the no-slip and zero tangential
/// traces; see the implementation for the treatment of the discrete
/// divergence of B. Throws std::invalid_argument if a cell average of rho0 is not positive.
DiscreteState initial_state(const Discretization& disc, const ScalarFn& rho0, const VectorFn& u0,
                            const VectorFn& B0);

/// Residual blocks, each in its own dof numbering.
Eigen::VectorXd residual_continuity(const Discretization& disc, const DiscreteState& next,
                                    const DiscreteState& prev);
Eigen::VectorXd residual_momentum(const Discretization& disc, const DiscreteState& next,
                                  const DiscreteState& prev);
Eigen::VectorXd residual_induction(const Discretization& disc, const DiscreteState& next,
                                   const DiscreteState& prev);

struct StepResult {
  DiscreteState state;
  StepReport report;
};

/// One backward-Euler step of length dt (defaults to params().dt).
StepResult step(const Discretization& disc, const DiscreteState& prev, double dt = 0.0);

/// Step lengths covering [0, T]: ceil(T/dt) steps, the last one shortened if needed.
std::vector<double> time_steps(double T, double dt);

struct Trajectory {
  std::vector<DiscreteState> states;  // every `stride`-th state, always the first and last
  std::vector<StepReport> reports;    // one per step
};

using StepObserver = std::function<void(int k, const DiscreteState& prev, const DiscreteState& next,
                                        const StepReport& report)>;

/// Steps from `init` to params().T. Step errors are rethrown with the failing step index.
Trajectory run(const Discretization& disc, const DiscreteState& init, int stride = 1,
               const StepObserver& observer = {});

}  // namespace mhdlab

#endif  // MHDLAB_SCHEME_HPP
