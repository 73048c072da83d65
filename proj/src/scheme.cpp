#include "mhdlab/scheme.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace mhdlab {

namespace {

std::vector<int> cell_support_of_face(const Face& f) {
  if (f.exterior()) return {f.in};
  return {f.in, f.out};
}

double max_abs_scaled(const Eigen::VectorXd& r, const Eigen::VectorXd& scale) {
  return r.size() == 0 ? 0.0 : r.cwiseProduct(scale).cwiseAbs().maxCoeff();
}

}  // namespace

Discretization::Discretization(const Mesh& mesh, Variant variant, const Params& params, SolverOptions opts)
    : mesh_(&mesh), variant_(variant), params_(params), opts_(opts) {
  if (mesh.dim() != 2) throw std::invalid_argument("only two-dimensional schemes are implemented");
  if ((variant == Variant::scheme1) == mesh.periodic()) {
    throw std::invalid_argument(std::string(to_string(variant)) + " needs a " +
                                (variant == Variant::scheme1 ? "triangulated" : "periodic") + " mesh");
  }
  params_.h = mesh.h();
  params_.d = mesh.dim();
  check_params(params_);
  if (auto bad = validate_epsilon(params_.gamma, params_.d, params_.epsilon, variant)) {
    throw std::invalid_argument(*bad);
  }

  const int nc = mesh.num_cells();
  if (variant == Variant::scheme1) {
    velocity_index_.assign(mesh.num_faces(), -1);
    for (int s = 0; s < mesh.num_faces(); ++s) {
      if (mesh.face(s).exterior()) continue;
      velocity_index_[s] = static_cast<int>(velocity_dofs_.size());
      velocity_dofs_.push_back(s);
    }
  } else {
    velocity_dofs_.resize(nc);
    std::iota(velocity_dofs_.begin(), velocity_dofs_.end(), 0);
    velocity_index_ = velocity_dofs_;
  }
  edge_index_.assign(mesh.num_edges(), -1);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (variant == Variant::scheme1 && mesh.face(e).exterior()) continue;
    edge_index_[e] = static_cast<int>(free_edges_.size());
    free_edges_.push_back(e);
  }

  mass_.resize(nc);
  curl_.resize(nc);
  if (variant == Variant::scheme1) mid_shape_.resize(nc);
  for (int k = 0; k < nc; ++k) {
    mass_[k] = mhdlab::edge_mass(mesh, k);
    curl_[k] = edge_shape_curl(mesh, k);
    if (variant == Variant::scheme1) {
      const auto& c = mesh.cell(k);
      for (int l = 0; l < 3; ++l) {
        const auto phi = edge_shape(mesh, k, mesh.face(c.faces[l]).centroid);
        for (int j = 0; j < 3; ++j) mid_shape_[k][l][j] = phi[j];
      }
    }
  }
  build_pattern();
}

void Discretization::build_pattern() {
  const Mesh& m = *mesh_;
  const int nc = num_cells();
  const int nu = num_velocity_dofs();
  const int n = num_unknowns();

  // Cell support of unknown / test function j (same layout for both).
  std::vector<std::vector<int>> support(n);
  for (int k = 0; k < nc; ++k) support[k] = {k};
  for (int i = 0; i < nu; ++i) {
    const auto s = variant_ == Variant::scheme1 ? cell_support_of_face(m.face(velocity_dofs_[i]))
                                                : std::vector<int>{velocity_dofs_[i]};
    support[nc + 2 * i] = s;
    support[nc + 2 * i + 1] = s;
  }
  for (int i = 0; i < num_free_edges(); ++i) support[nc + 2 * nu + i] = cell_support_of_face(m.face(free_edges_[i]));

  row_scale_.resize(n);
  std::vector<std::vector<int>> cell_rows(nc);
  for (int j = 0; j < n; ++j) {
    double area = 0.0;
    for (int k : support[j]) {
      area += m.cell(k).measure;
      cell_rows[k].push_back(j);
    }
    row_scale_[j] = 1.0 / area;
  }

  const int reach = variant_ == Variant::scheme1 ? 1 : 2;
  std::vector<std::vector<int>> near(nc);
  for (int k = 0; k < nc; ++k) {
    std::set<int> ring = {k};
    for (int r = 0; r < reach; ++r) {
      std::set<int> grown = ring;
      for (int c : ring)
        for (int nb : m.neighbours(c)) grown.insert(nb);
      ring.swap(grown);
    }
    near[k].assign(ring.begin(), ring.end());
  }

  pattern_.assign(n, {});
  for (int j = 0; j < n; ++j) {
    std::vector<int> rows;
    for (int k : support[j])
      for (int c : near[k]) rows.insert(rows.end(), cell_rows[c].begin(), cell_rows[c].end());
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    pattern_[j] = std::move(rows);
  }

  // Greedy colouring: columns in one colour touch disjoint rows.
  colour_.assign(n, -1);
  std::vector<std::vector<char>> used;
  for (int j = 0; j < n; ++j) {
    int c = 0;
    for (;; ++c) {
      if (c == static_cast<int>(used.size())) used.emplace_back(n, 0);
      bool clash = false;
      for (int i : pattern_[j]) {
        if (used[c][i]) {
          clash = true;
          break;
        }
      }
      if (!clash) break;
    }
    colour_[j] = c;
    for (int i : pattern_[j]) used[c][i] = 1;
  }
  num_colours_ = static_cast<int>(used.size());
}

Eigen::VectorXd Discretization::pack(const DiscreteState& s) const {
  const int nc = num_cells();
  const int nu = num_velocity_dofs();
  Eigen::VectorXd x(num_unknowns());
  for (int k = 0; k < nc; ++k) x[k] = s.rho[k];
  for (int i = 0; i < nu; ++i) {
    const Vec2& v = variant_ == Variant::scheme1 ? s.u[velocity_dofs_[i]] : s.uhat[velocity_dofs_[i]];
    x[nc + 2 * i] = v.x();
    x[nc + 2 * i + 1] = v.y();
  }
  for (int i = 0; i < num_free_edges(); ++i) x[nc + 2 * nu + i] = s.B[free_edges_[i]];
  return x;
}

void Discretization::unpack(const Eigen::VectorXd& x, DiscreteState& s) const {
  const Mesh& m = *mesh_;
  const int nc = num_cells();
  const int nu = num_velocity_dofs();
  if (s.rho.size() != nc) s.rho = CellField(m);
  if (s.uhat.size() != nc) s.uhat = CellVectorField(m);
  if (s.B.size() != m.num_edges()) s.B = EdgeField(m);
  if (variant_ == Variant::scheme1 && s.u.size() != m.num_faces()) s.u = CRField(m);
  for (int k = 0; k < nc; ++k) s.rho[k] = x[k];
  for (int i = 0; i < nu; ++i) {
    const Vec2 v(x[nc + 2 * i], x[nc + 2 * i + 1]);
    if (variant_ == Variant::scheme1) s.u[velocity_dofs_[i]] = v;
    else s.uhat[velocity_dofs_[i]] = v;
  }
  for (int i = 0; i < num_free_edges(); ++i) s.B[free_edges_[i]] = x[nc + 2 * nu + i];
  if (variant_ == Variant::scheme1) s.uhat = project_Q(m, s.u);
}

DiscreteState Discretization::zero_state() const {
  DiscreteState s;
  unpack(Eigen::VectorXd::Zero(num_unknowns()), s);
  return s;
}

Vec2 Discretization::edge_value_at_midpoint(const EdgeField& b, int cell, int l) const {
  const auto& c = mesh_->cell(cell);
  const auto& phi = mid_shape_[cell][l];
  return b[c.faces[0]] * phi[0] + b[c.faces[1]] * phi[1] + b[c.faces[2]] * phi[2];
}

double Discretization::cross_integral(const DiscreteState& s, const EdgeField& b, int cell) const {
  const auto& c = mesh_->cell(cell);
  if (variant_ == Variant::scheme2) return cross2(s.uhat[cell], edge_integral(*mesh_, b, cell));
  double acc = 0.0;
  for (int l = 0; l < 3; ++l) acc += cross2(s.u[c.faces[l]], edge_value_at_midpoint(b, cell, l));
  return acc * c.measure / 3.0;
}

Eigen::VectorXd Discretization::residual(const DiscreteState& next, const DiscreteState& prev) const {
  const double dt = next.t - prev.t;
  if (!(dt > 0.0)) throw std::invalid_argument("residual: next.t must exceed prev.t");
  Eigen::VectorXd r = Eigen::VectorXd::Zero(num_unknowns());
  if (variant_ == Variant::scheme1) residual_scheme1(next, prev, dt, r);
  else residual_scheme2(next, prev, dt, r);
  residual_induction(next, prev, dt, r);
  return r;
}

void Discretization::residual_scheme1(const DiscreteState& s, const DiscreteState& prev, double dt,
                                      Eigen::VectorXd& r) const {
  const Mesh& m = *mesh_;
  const Params& p = params_;
  const int nc = num_cells();
  const double he = p.diffusion();
  const auto uhat = project_Q(m, s.u);
  const auto uhat_old = project_Q(m, prev.u);
  std::vector<Vec2> rm(m.num_faces(), Vec2::Zero());

  for (int k = 0; k < nc; ++k) {
    const auto& c = m.cell(k);
    r[k] += c.measure * (s.rho[k] - prev.rho[k]) / dt;
    const Vec2 mass = c.measure * (s.rho[k] * uhat[k] - prev.rho[k] * uhat_old[k]) / (3.0 * dt);

    // grad_h u and the stress-like tensor tested with grad of the CR basis
    Mat2 g = Mat2::Zero();
    for (int l = 0; l < 3; ++l) {
      const auto& f = m.face(c.faces[l]);
      g += f.measure * s.u[c.faces[l]] * (c.face_sign[l] * xy(f.normal)).transpose();
    }
    g /= c.measure;
    const Mat2 P = p.mu * g + (p.nu() * g.trace() - pressure(p, s.rho[k])) * Mat2::Identity();

    const double w = curl_h_cell(s.B, k);
    for (int l = 0; l < 3; ++l) {
      const auto& f = m.face(c.faces[l]);
      const Vec2 n = c.face_sign[l] * xy(f.normal);
      const Vec2 b = edge_value_at_midpoint(prev.B, k, l);
      rm[c.faces[l]] += mass + f.measure * (P * n) - (c.measure / 3.0) * w * Vec2(-b.y(), b.x());
    }
  }

  for (int sf = 0; sf < m.num_faces(); ++sf) {
    const auto& f = m.face(sf);
    if (f.exterior()) continue;
    const double us = s.u[sf].dot(xy(f.normal));
    const double fr = diffusive_flux(s.rho[f.in], s.rho[f.out], us, he);
    r[f.in] += f.measure * fr;
    r[f.out] -= f.measure * fr;
    const Vec2 fm = diffusive_flux(Vec2(s.rho[f.in] * uhat[f.in]), Vec2(s.rho[f.out] * uhat[f.out]), us, he);
    // -|sigma| F . [[v-hat]] with v-hat = e_a / 3 on the cells touching the test face
    for (int t : m.cell(f.in).faces) rm[t] += f.measure * fm / 3.0;
    for (int t : m.cell(f.out).faces) rm[t] -= f.measure * fm / 3.0;
  }

  for (int i = 0; i < num_velocity_dofs(); ++i) {
    r[nc + 2 * i] = rm[velocity_dofs_[i]].x();
    r[nc + 2 * i + 1] = rm[velocity_dofs_[i]].y();
  }
}

void Discretization::residual_scheme2(const DiscreteState& s, const DiscreteState& prev, double dt,
                                      Eigen::VectorXd& r) const {
  const Mesh& m = *mesh_;
  const Params& p = params_;
  const int nc = num_cells();
  const double he = p.diffusion();
  const auto& u = s.uhat;
  const auto div = div_h_pc(m, u);
  std::vector<Vec2> rm(nc, Vec2::Zero());

  for (int k = 0; k < nc; ++k) {
    const auto& c = m.cell(k);
    r[k] += c.measure * (s.rho[k] - prev.rho[k]) / dt;
    const Vec2 b = edge_integral(m, prev.B, k);
    rm[k] += c.measure * (s.rho[k] * u[k] - prev.rho[k] * prev.uhat[k]) / dt -
             curl_h_cell(s.B, k) * Vec2(-b.y(), b.x());
  }
  for (int sf = 0; sf < m.num_faces(); ++sf) {
    const auto& f = m.face(sf);
    const Vec2 n = xy(f.normal);
    const double us = 0.5 * (u[f.in] + u[f.out]).dot(n);
    const double fr = diffusive_flux(s.rho[f.in], s.rho[f.out], us, he);
    r[f.in] += f.measure * fr;
    r[f.out] -= f.measure * fr;
    const Vec2 fm = diffusive_flux(Vec2(s.rho[f.in] * u[f.in]), Vec2(s.rho[f.out] * u[f.out]), us, he);
    const double pavg = 0.5 * (pressure(p, s.rho[f.in]) + pressure(p, s.rho[f.out]));
    const double davg = 0.5 * (div[f.in] + div[f.out]);
    const Vec2 x = fm + pavg * n - p.mu * (u[f.out] - u[f.in]) / f.dsigma - (p.mu + p.lambda) * davg * n;
    rm[f.in] += f.measure * x;
    rm[f.out] -= f.measure * x;
  }
  for (int k = 0; k < nc; ++k) {
    r[nc + 2 * k] = rm[k].x();
    r[nc + 2 * k + 1] = rm[k].y();
  }
}

void Discretization::residual_induction(const DiscreteState& s, const DiscreteState& prev, double dt,
                                        Eigen::VectorXd& r) const {
  const Mesh& m = *mesh_;
  const int off = num_cells() + 2 * num_velocity_dofs();
  for (int k = 0; k < num_cells(); ++k) {
    const auto& c = m.cell(k);
    const int nl = static_cast<int>(c.faces.size());
    Eigen::VectorXd db(nl);
    for (int j = 0; j < nl; ++j) db[j] = (s.B[c.faces[j]] - prev.B[c.faces[j]]) / dt;
    const Eigen::VectorXd mdb = mass_[k] * db;
    const double w = curl_h_cell(s.B, k);
    const double transport = cross_integral(s, prev.B, k);
    for (int i = 0; i < nl; ++i) {
      const int idx = edge_index_[c.faces[i]];
      if (idx < 0) continue;
      r[off + idx] += mdb[i] + curl_[k][i] * (params_.alpha * c.measure * w - transport);
    }
  }
}

double Discretization::curl_h_cell(const EdgeField& b, int cell) const {
  const auto& c = mesh_->cell(cell);
  double w = 0.0;
  for (std::size_t l = 0; l < c.faces.size(); ++l) w += curl_[cell][l] * b[c.faces[l]];
  return w;
}

Eigen::SparseMatrix<double> Discretization::jacobian(const DiscreteState& next, const DiscreteState& prev) const {
  const int n = num_unknowns();
  const Eigen::VectorXd x = pack(next);
  const Eigen::VectorXd r0 = residual(next, prev);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 40);
  std::vector<std::vector<int>> by_colour(num_colours_);
  for (int j = 0; j < n; ++j) by_colour[colour_[j]].push_back(j);

  DiscreteState work = next;
  Eigen::VectorXd xp = x;
  for (const auto& cols : by_colour) {
    for (int j : cols) xp[j] = x[j] + 1e-7 * std::max(1.0, std::abs(x[j]));
    unpack(xp, work);
    const Eigen::VectorXd r1 = residual(work, prev);
    for (int j : cols) {
      const double d = xp[j] - x[j];
      for (int i : pattern_[j]) {
        const double v = (r1[i] - r0[i]) / d;
        if (v != 0.0) trip.emplace_back(i, j, v);
      }
      xp[j] = x[j];
    }
  }
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

DiscreteState initial_state(const Discretization& disc, const ScalarFn& rho0, const VectorFn& u0,
                            const VectorFn& B0) {
  const Mesh& m = disc.mesh();
  DiscreteState s;
  s.rho = project_Q(m, rho0);
  for (int k = 0; k < m.num_cells(); ++k) {
    if (!(s.rho[k] > 0.0)) {
      std::ostringstream os;
      os << "initial density has non-positive cell average " << s.rho[k] << " on cell " << k;
      throw std::invalid_argument(os.str());
    }
  }
  const bool bc = disc.variant() == Variant::scheme1;
  if (bc) {
    s.u = interpolate_CR(m, u0, true);
    s.uhat = project_Q(m, s.u);
  } else {
    s.uhat = project_Q(m, u0);
  }
  s.B = interpolate_Nedelec(m, B0, bc);
  return s;
}

Eigen::VectorXd residual_continuity(const Discretization& disc, const DiscreteState& next,
                                    const DiscreteState& prev) {
  return disc.residual(next, prev).head(disc.num_cells());
}

Eigen::VectorXd residual_momentum(const Discretization& disc, const DiscreteState& next,
                                  const DiscreteState& prev) {
  return disc.residual(next, prev).segment(disc.num_cells(), 2 * disc.num_velocity_dofs());
}

Eigen::VectorXd residual_induction(const Discretization& disc, const DiscreteState& next,
                                   const DiscreteState& prev) {
  return disc.residual(next, prev).tail(disc.num_free_edges());
}

namespace {

Eigen::VectorXd solve_linear(const Discretization& disc, const Eigen::SparseMatrix<double>& J,
                             const Eigen::VectorXd& rhs, int& krylov_iterations) {
  const auto& opts = disc.options();
  if (J.rows() >= opts.direct_limit) {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> it;
    it.setTolerance(opts.linear_tolerance);
    it.setMaxIterations(std::max<int>(1000, static_cast<int>(J.rows())));
    it.compute(J);
    Eigen::VectorXd x = it.solve(rhs);
    krylov_iterations += static_cast<int>(it.iterations());
    if (it.info() == Eigen::Success) return x;
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(J);
  if (lu.info() != Eigen::Success) throw LinearSolveFailure("sparse LU factorization failed: " + lu.lastErrorMessage());
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw LinearSolveFailure("sparse LU solve failed");
  return x;
}

}  // namespace

StepResult step(const Discretization& disc, const DiscreteState& prev, double dt) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& opts = disc.options();
  const Eigen::VectorXd& scale = disc.row_scale();
  const int nc = disc.num_cells();
  if (dt <= 0.0) dt = disc.params().dt;
  if (const auto lo = std::min_element(prev.rho.v.begin(), prev.rho.v.end()); lo != prev.rho.v.end() && !(*lo > 0.0)) {
    std::ostringstream os;
    os << "incoming density " << *lo << " in cell " << (lo - prev.rho.v.begin()) << " is not positive";
    throw PositivityLoss(os.str());
  }

  StepResult out;
  DiscreteState& next = out.state;
  next = prev;
  next.t = prev.t + dt;
  Eigen::VectorXd x = disc.pack(next);
  Eigen::VectorXd r = disc.residual(next, prev);
  double norm = max_abs_scaled(r, scale);
  int iter = 0;
  double last_ratio = 0.0;

  while (norm > opts.tolerance) {
    // Rounding floor: accept once progress has stalled far below any physical scale.
    if (iter > 0 && norm < 1e3 * opts.tolerance && last_ratio > 0.5) break;
    if (iter >= opts.max_iterations) {
      std::ostringstream os;
      os << "Newton iteration cap " << opts.max_iterations << " reached, residual " << norm;
      throw NewtonDivergence(os.str());
    }
    const auto J = disc.jacobian(next, prev);
    const Eigen::VectorXd dx = solve_linear(disc, J, -r, out.report.linear_iterations);

    double lam = 1.0;
    while ((x.head(nc) + lam * dx.head(nc)).minCoeff() <= 0.0) {
      lam *= 0.5;
      if (lam < 1e-12) throw PositivityLoss("Newton update cannot keep the density positive");
    }
    DiscreteState trial = next;
    Eigen::VectorXd xt, rt;
    double nt = 0.0;
    for (int ls = 0;; ++ls) {
      xt = x + lam * dx;
      disc.unpack(xt, trial);
      rt = disc.residual(trial, prev);
      nt = max_abs_scaled(rt, scale);
      if (!std::isfinite(nt)) {
        lam *= 0.5;
        if (ls > 40) throw NewtonDivergence("non-finite residual during line search");
        continue;
      }
      if (nt <= (1.0 - 1e-4 * lam) * norm || nt <= 10.0 * opts.tolerance || ls >= 20) break;
      lam *= 0.5;
    }
    last_ratio = nt / norm;
    x = xt;
    next = trial;
    r = rt;
    norm = nt;
    ++iter;
  }

  out.report.iterations = std::max(iter, 1);
  out.report.residual = norm;
  out.report.min_density = *std::min_element(next.rho.v.begin(), next.rho.v.end());
  if (!(out.report.min_density > 0.0)) {
    std::ostringstream os;
    os << "density " << out.report.min_density << " is not positive";
    throw PositivityLoss(os.str());
  }
  out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<double> time_steps(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("time_steps: T and dt must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-12)));
  std::vector<double> steps(n, dt);
  steps.back() = T - (n - 1) * dt;
  return steps;
}

namespace {

template <class E>
[[noreturn]] void rethrow_at(const E& e, int k, double t) {
  std::ostringstream os;
  os << "step " << k << " (t = " << t << "): " << e.what();
  throw E(os.str());
}

}  // namespace

Trajectory run(const Discretization& disc, const DiscreteState& init, int stride, const StepObserver& observer) {
  if (stride < 1) throw std::invalid_argument("run: stride must be at least 1");
  Trajectory traj;
  traj.states.push_back(init);
  const auto dts = time_steps(disc.params().T, disc.params().dt);
  DiscreteState cur = init;
  for (int k = 1; k <= static_cast<int>(dts.size()); ++k) {
    StepResult res;
    try {
      res = step(disc, cur, dts[k - 1]);
    } catch (const NewtonDivergence& e) {
      rethrow_at(e, k, cur.t);
    } catch (const PositivityLoss& e) {
      rethrow_at(e, k, cur.t);
    } catch (const LinearSolveFailure& e) {
      rethrow_at(e, k, cur.t);
    }
    if (observer) observer(k, cur, res.state, res.report);
    traj.reports.push_back(res.report);
    cur = std::move(res.state);
    if (k % stride == 0 || k == static_cast<int>(dts.size())) traj.states.push_back(cur);
  }
  return traj;
}

}  // namespace mhdlab
