// mhdlab: run simulations, refinement studies and invariant checks.
//
//   mhdlab run <config> [--out DIR] [--stride K] [--seed S]
//   mhdlab study <config> --levels 4,8,16 [--out DIR] [--seed S]
//   mhdlab check [config] [--seed S]
//
// Exit status: 0 success, 1 failed check, 2 bad configuration or usage,
// 3 solver failure. Failures print one "error: kind=... " line on stderr.

#include "mhdlab/config.hpp"
#include "mhdlab/diagnostics.hpp"
#include "mhdlab/scenarios.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace mhdlab;

namespace {

Mesh make_mesh(const RunConfig& c, int n) {
  return c.variant == Variant::scheme1 ? build_tri_mesh(n) : build_periodic_mesh(n, c.d);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  return os;
}

void write_fields(const fs::path& dir, int k, const Discretization& d, const DiscreteState& s) {
  std::ofstream os = open_out(dir / ("fields_" + std::to_string(k) + ".csv"));
  os << "field,id,x,y,v1,v2\n";
  const Mesh& m = d.mesh();
  write_csv(os, m, "rho", s.rho);
  write_csv(os, m, "u_hat", s.uhat);
  if (d.variant() == Variant::scheme1) write_csv(os, m, "u", s.u);
  write_csv(os, m, "B", s.B);
  write_csv(os, m, "curl_B", curl_h(m, s.B));
}

double max_abs(const std::vector<double>& v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

int cmd_run(RunConfig cfg) {
  const Mesh m = make_mesh(cfg, cfg.n);
  const Discretization d(m, cfg.variant, params_for(cfg, cfg.n));
  const auto sc = make_scenario(cfg.scenario, cfg.variant);
  const DiscreteState s0 = initial_state(d, sc.rho, sc.u, sc.B);

  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  {
    std::ofstream os = open_out(dir / "config.txt");
    write_config(os, cfg);
  }
  std::ofstream energy = open_out(dir / "energy.csv");
  write_energy_header(energy);
  const double E0 = total_energy(d, s0);
  write_energy_initial(energy, s0.t, energy_parts(d, s0), total_mass(m, s0.rho),
                       *std::min_element(s0.rho.v.begin(), s0.rho.v.end()), weak_divfree_residual(m, s0.B));
  write_fields(dir, 0, d, s0);

  const int steps = static_cast<int>(time_steps(d.params().T, d.params().dt).size());
  double worst_identity = 0.0;
  int newton = 0;
  const auto t0 = std::chrono::steady_clock::now();
  run(d, s0, cfg.stride, [&](int k, const DiscreteState& prev, const DiscreteState& next, const StepReport& rep) {
    const auto r = energy_report(d, prev, next);
    worst_identity = std::max(worst_identity, r.residual);
    newton += rep.iterations;
    write_energy_row(energy, r, total_mass(m, next.rho), rep.min_density, weak_divfree_residual(m, next.B));
    if (k % cfg.stride == 0 || k == steps) write_fields(dir, k, d, next);
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "run: " << to_string(cfg.variant) << " n=" << cfg.n << " scenario=" << cfg.scenario
            << " steps=" << steps << " unknowns=" << d.num_unknowns() << " newton_iterations=" << newton << "\n"
            << "run: E0=" << std::setprecision(10) << E0 << " max_identity_residual/E0=" << std::setprecision(3)
            << worst_identity / E0 << " wall=" << std::setprecision(3) << secs << "s\n"
            << "run: wrote " << (dir / "energy.csv").string() << " and fields_<k>.csv\n";
  return 0;
}

int cmd_study(RunConfig cfg, const std::vector<int>& levels) {
  if (levels.size() < 3) throw ConfigError("levels", "levels: an EOC fit needs at least three levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 2) throw ConfigError("levels", "levels: every level must be at least 2");
    if (i > 0 && levels[i] <= levels[i - 1]) throw ConfigError("levels", "levels: must be strictly increasing");
  }
  const auto family = default_test_family(cfg.variant);
  const auto sc = make_scenario(cfg.scenario, cfg.variant);
  std::vector<ConsistencyLevel> out;
  for (int n : levels) {
    const auto t0 = std::chrono::steady_clock::now();
    const Mesh m = make_mesh(cfg, n);
    const Discretization d(m, cfg.variant, params_for(cfg, n));
    const auto tr = run(d, initial_state(d, sc.rho, sc.u, sc.B), 1);
    out.push_back(consistency_residuals(d, tr.states, family));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "study: n=" << n << " h=" << std::setprecision(6) << m.h() << " steps=" << tr.reports.size()
              << std::setprecision(4) << " e1=" << out.back().e[0] << " e2=" << out.back().e[1]
              << " e3=" << out.back().e[2] << " e4=" << out.back().e[3] << " wall=" << std::setprecision(3) << secs
              << "s\n";
  }
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  {
    std::ofstream os = open_out(dir / "config.txt");
    write_config(os, cfg);
  }
  std::ofstream os = open_out(dir / "eoc.csv");
  write_eoc_table(os, out);
  std::vector<double> h;
  for (const auto& l : out) h.push_back(l.h);
  std::cout << "study: fitted order";
  for (int i = 0; i < 4; ++i) {
    std::vector<double> e;
    for (const auto& l : out) e.push_back(l.e[i]);
    const auto r = eoc(e, h);
    std::cout << " eoc" << i + 1 << "=";
    if (r) std::cout << std::setprecision(3) << *r;
    else std::cout << "exact";
  }
  std::cout << "\nstudy: wrote " << (dir / "eoc.csv").string() << "\n";
  return 0;
}

struct Checker {
  std::vector<std::string> failed;
  void report(const std::string& name, double value, double tol, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << " value=" << std::setprecision(3) << std::scientific << value
              << " tol=" << tol << std::defaultfloat << "\n";
    if (!ok) failed.push_back(name);
  }
  void upper(const std::string& name, double value, double tol) { report(name, value, tol, value <= tol); }
  void lower(const std::string& name, double value, double tol) { report(name, value, tol, value >= tol); }
};

// Identities that hold for arbitrary discrete fields, sampled with the seed.
void check_random_identities(Checker& ck, const std::string& tag, const Discretization& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> R(0.5, 2.0), V(-1.0, 1.0);
  const Mesh& m = d.mesh();
  auto draw = [&] {
    Eigen::VectorXd x(d.num_unknowns());
    for (int i = 0; i < x.size(); ++i) x[i] = i < d.num_cells() ? R(rng) : V(rng);
    DiscreteState s = d.zero_state();
    d.unpack(x, s);
    return s;
  };
  double lorentz_defect = 0.0, relative_min = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteState s = draw(), o = draw();
    const auto F = lorentz(m, s.B, o.B);
    double force = 0.0, work = 0.0;
    if (d.variant() == Variant::scheme1) {
      for (int f = 0; f < m.num_faces(); ++f) force += F[f].dot(s.u[f]);
      work = lorentz_work(m, s.B, s.u, o.B);
    } else {
      for (int k = 0; k < m.num_cells(); ++k) force += F[k].dot(s.uhat[k]);
      work = lorentz_work(m, s.B, s.uhat, o.B);
    }
    lorentz_defect = std::max(lorentz_defect, std::abs(force + work));
    const double r0 = R(rng), u0 = V(rng), b0 = V(rng);
    const double e = relative_energy(
        d, s, [=](const Point& x) { return r0 + 0.2 * std::sin(2 * M_PI * x.x()); },
        [=](const Point&) { return Vec2(u0, -u0); }, [=](const Point& x) -> Vec2 { return {b0, b0 * x.y()}; });
    relative_min = std::min(relative_min, e);
  }
  ck.upper(tag + " lorentz_work_identity", lorentz_defect, 1e-12);
  ck.lower(tag + " relative_energy_nonnegative", relative_min, 0.0);
}

void check_case(Checker& ck, const RunConfig& cfg) {
  const std::string tag = std::string(to_string(cfg.variant)) + "/n" + std::to_string(cfg.n) + "/" + cfg.scenario;
  const Mesh m = make_mesh(cfg, cfg.n);
  const Discretization d(m, cfg.variant, params_for(cfg, cfg.n));
  const auto sc = make_scenario(cfg.scenario, cfg.variant);
  const DiscreteState s0 = initial_state(d, sc.rho, sc.u, sc.B);
  const double E0 = total_energy(d, s0), M0 = total_mass(m, s0.rho);
  const auto w0 = weak_divergence(m, s0.B);
  const double divtol = 10.0 * d.options().linear_tolerance;

  const double inf = std::numeric_limits<double>::infinity();
  double identity = 0.0, slack = -inf, mass = 0.0, divdrift = 0.0, renorm = 0.0, dmin = inf;
  double min_rho = *std::min_element(s0.rho.v.begin(), s0.rho.v.end());
  run(d, s0, 1, [&](int, const DiscreteState& prev, const DiscreteState& next, const StepReport& rep) {
    const auto r = energy_report(d, prev, next);
    identity = std::max(identity, r.residual);
    slack = std::max(slack, r.slack);
    for (double D : r.D) dmin = std::min(dmin, D);
    mass = std::max(mass, std::abs(total_mass(m, next.rho) - M0));
    min_rho = std::min(min_rho, rep.min_density);
    const auto w = weak_divergence(m, next.B);
    for (std::size_t i = 0; i < w.size(); ++i) divdrift = std::max(divdrift, std::abs(w[i] - w0[i]));
    const auto rb = renormalized_balance(d, prev, next);
    renorm = std::max(renorm, std::abs(rb.lhs - rb.rhs) / (1.0 + std::abs(rb.rhs)));
  });
  ck.upper(tag + " energy_identity", identity / E0, 1e-8);
  ck.upper(tag + " energy_stability", slack / E0, 1e-10);
  ck.lower(tag + " numerical_dissipation_nonnegative", dmin, -1e-14);
  ck.upper(tag + " mass_conservation", mass / M0, 1e-12);
  ck.report(tag + " positivity", min_rho, 0.0, min_rho > 0.0);
  ck.upper(tag + " initial_weak_divergence", max_abs(w0), divtol);
  ck.upper(tag + " weak_divergence_preserved", divdrift, divtol);
  ck.upper(tag + " renormalized_identity", renorm, 1e-10);
  check_random_identities(ck, tag, d, cfg.seed);
}

int cmd_check(const std::optional<RunConfig>& cfg, std::uint64_t seed) {
  Checker ck;
  std::vector<RunConfig> cases;
  if (cfg) {
    cases.push_back(*cfg);
  } else {
    // default: both schemes, 8x8, smooth data, eight steps of dt = h
    for (Variant v : {Variant::scheme1, Variant::scheme2}) {
      RunConfig c;
      c.variant = v;
      c.params.T = 8 * mesh_size(c, c.n);
      c.seed = seed;
      cases.push_back(c);
    }
  }
  for (const auto& c : cases) check_case(ck, c);
  std::cout << "check: status=" << (ck.failed.empty() ? "pass" : "fail") << " failed=";
  for (std::size_t i = 0; i < ck.failed.size(); ++i) std::cout << (i ? "," : "") << ck.failed[i];
  std::cout << "\n";
  return ck.failed.empty() ? 0 : 1;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '\n') c = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mhdlab: mixed finite-volume / finite-element schemes for compressible MHD"};
  app.require_subcommand(1);

  std::string config_path, out;
  int stride = 0;
  std::uint64_t seed = 0;
  std::vector<int> levels;

  auto* run_cmd = app.add_subcommand("run", "time-step one configuration and write energy.csv and fields_<k>.csv");
  run_cmd->add_option("config", config_path, "configuration file")->required();
  run_cmd->add_option("--out", out, "output directory (overrides the config)");
  run_cmd->add_option("--stride", stride, "field output stride (overrides the config)")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", seed, "random seed (overrides the config)");

  auto* study_cmd = app.add_subcommand("study", "refinement study of the consistency residuals, writes eoc.csv");
  study_cmd->add_option("config", config_path, "configuration file")->required();
  study_cmd->add_option("--levels", levels, "comma separated cells per direction, e.g. 4,8,16")
      ->required()
      ->delimiter(',');
  study_cmd->add_option("--out", out, "output directory (overrides the config)");
  study_cmd->add_option("--seed", seed, "random seed (overrides the config)");

  auto* check_cmd = app.add_subcommand("check", "invariant suite on a small case, nonzero exit on any violation");
  check_cmd->add_option("config", config_path, "configuration file (default: both schemes, n = 8)");
  check_cmd->add_option("--seed", seed, "random seed for the randomized identities");

  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<RunConfig> cfg;
    if (!config_path.empty()) {
      cfg = parse_config_file(config_path);
      if (!out.empty()) cfg->out = out;
      if (stride > 0) cfg->stride = stride;
      if (run_cmd->count("--seed") + study_cmd->count("--seed") + check_cmd->count("--seed") > 0) cfg->seed = seed;
      validate(*cfg);
    }
    if (app.got_subcommand(run_cmd)) return cmd_run(*cfg);
    if (app.got_subcommand(study_cmd)) return cmd_study(*cfg, levels);
    return cmd_check(cfg, seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: kind=config key=" << (e.key().empty() ? "-" : e.key()) << " message=\"" << sanitize(e.what())
              << "\"\n";
    return 2;
  } catch (const SolverError& e) {
    const char* kind = dynamic_cast<const NewtonDivergence*>(&e)     ? "newton_divergence"
                       : dynamic_cast<const PositivityLoss*>(&e)     ? "positivity_loss"
                       : dynamic_cast<const LinearSolveFailure*>(&e) ? "linear_solve_failure"
                                                                     : "solver";
    std::cerr << "error: kind=" << kind << " message=\"" << sanitize(e.what()) << "\"\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: kind=usage message=\"" << sanitize(e.what()) << "\"\n";
    return 2;
  }
}
