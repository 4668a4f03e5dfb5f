#pragma once

// Staggered multiphysics time loop: optional soak / pre-charge phase, then
// cycle-by-cycle loading with per-increment equilibrium -> phase field ->
// transport solves and per-cycle fatigue accumulation. Cycle jumping scales
// the per-cycle history increment and integrates transport over the jumped
// interval with the frozen end-of-cycle stress field.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "hafcg/mechanics.hpp"
#include "hafcg/mesh.hpp"
#include "hafcg/params.hpp"
#include "hafcg/phasefield.hpp"
#include "hafcg/transport.hpp"

namespace hafcg {

enum class Waveform { sinusoidal, triangular };
enum class LoadControl { constant_dP, constant_dK };

struct LoadProgram {
  double P_max = 0.0; // peak pin load per unit thickness [N/mm]
  double R = 0.1;     // load ratio P_min/P_max
  double f = 1.0;     // loading frequency [Hz]
  Waveform waveform = Waveform::sinusoidal;
  int increments_per_cycle = 8;
  long max_cycles = 100000;
  double soak_s = 86400.0; // unloaded exposure before cycling [s]
  bool precharged = false;
  double p_H2 = 0.0; // gas pressure [MPa]
  int cycle_jump = 1;
  LoadControl control = LoadControl::constant_dP;
  double deltaK_target = 0.0; // [MPa sqrt(m)], constant_dK mode

  void validate() const {
    if (R < 0.0 || R >= 1.0) throw ConfigError("LoadProgram: R must be in [0,1)");
    if (f <= 0.0) throw ConfigError("LoadProgram: f must be > 0");
    if (increments_per_cycle < 4)
      throw ConfigError("LoadProgram: increments_per_cycle must be >= 4");
    if (cycle_jump < 1) throw ConfigError("LoadProgram: cycle_jump must be >= 1");
    if (max_cycles < 1) throw ConfigError("LoadProgram: max_cycles must be >= 1");
    if (soak_s < 0) throw ConfigError("LoadProgram: soak_s must be >= 0");
    if (p_H2 < 0) throw ConfigError("LoadProgram: p_H2 must be >= 0");
    if (P_max < 0) throw ConfigError("LoadProgram: P_max must be >= 0");
    if (control == LoadControl::constant_dK && deltaK_target <= 0)
      throw ConfigError("LoadProgram: constant_dK requires deltaK_target > 0");
  }

  /// Load at cycle phase s in [0,1]; starts and ends at P_min so the peak
  /// lands on a sampled increment for any even increment count.
  double load_at(double P_peak, double s) const {
    const double P_min = R * P_peak;
    const double dP = P_peak - P_min;
    if (waveform == Waveform::sinusoidal)
      return P_min + 0.5 * dP * (1.0 - std::cos(2.0 * M_PI * s));
    return P_min + dP * (s < 0.5 ? 2.0 * s : 2.0 * (1.0 - s));
  }
};

struct SolverControls {
  double stagger_tol = 0.0; // 0: single-pass staggering
  int stagger_max_iter = 10;
  double k_res = 1e-7;
  bool alpha_from_degraded_energy = true;
  bool damaged_sigma_h = true;
  TransportOptions transport;
  int jump_transport_substeps = 2;
  bool check_invariants = false;
  std::string abort_dump_path; // checkpoint written on a hard solver abort
};

/// Mesh-level description of one cyclic experiment, independent of loads.
struct ProblemSetup {
  const Mesh* mesh = nullptr;
  MaterialParams material;
  FatigueParams fatigue;
  HydrogenParams hydrogen;
  PlaneMode mode = PlaneMode::strain;
  std::vector<std::array<int, 2>> fixed_dofs; // (node, comp), value 0
  std::vector<PointLoad> unit_load;           // loads for P = 1
  std::vector<int> gas_nodes;                 // C = C_env boundary
  std::vector<int> crack_path_nodes;          // penalty-exposure candidates
};

struct SimState {
  MechState mech;
  Eigen::VectorXd phi;
  HydrogenState hyd;
  FatigueHistory fat;
  IrreversibilityHistory irr;
  double t = 0.0;
  long cycle = 0;
};

/// Worst-case values observed over a run; filled when
/// SolverControls::check_invariants is on.
struct InvariantReport {
  double max_phi_drop = 0.0;      // largest nodewise decrease between cycles
  double min_phi = 0.0, max_phi = 0.0;
  double min_alpha_increment = 0.0; // most negative alpha_bar change
  double min_C = 0.0, max_C = 0.0;
  long cycles_checked = 0;
};

/// Distribute a unit pin load over nodes within `radius` of the pin with a
/// cosine taper; radius <= 0 loads the single PIN node.
inline std::vector<PointLoad> pin_unit_load(const Mesh& mesh, double radius) {
  const int pin = mesh.node_set("PIN").at(0);
  if (radius <= 0) return {{pin, 0.0, 1.0}};
  const auto& P = mesh.nodes[pin];
  std::vector<PointLoad> loads;
  double wsum = 0.0;
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    const double d = std::hypot(mesh.nodes[n][0] - P[0], mesh.nodes[n][1] - P[1]);
    if (d <= radius) {
      const double w = 0.5 * (1.0 + std::cos(M_PI * d / radius));
      loads.push_back({n, 0.0, w});
      wsum += w;
    }
  }
  for (auto& L : loads) L.fy /= wsum;
  return loads;
}

class Simulator {
 public:
  Simulator(const ProblemSetup& setup, const LoadProgram& program,
            const SolverControls& controls = {})
      : setup_(setup),
        program_(program),
        ctrl_(controls),
        cache_(*setup.mesh),
        u_dofs_(make_u_dofs(setup)),
        mech_(cache_, u_dofs_, ElasticityLaw{setup.material.E, setup.material.nu, setup.mode},
              controls.k_res, controls.damaged_sigma_h),
        pf_(cache_, setup.material, &setup_.fatigue,
            hydrogen_active() ? &setup_.hydrogen : nullptr) {
    program_.validate();
    setup_.material.validate();
    setup_.fatigue.validate();
    setup_.hydrogen.validate();
    C_env_ = sieverts_concentration(program_.p_H2, setup_.hydrogen.S);
    if (hydrogen_active())
      transport_.emplace(cache_, setup_.hydrogen, setup_.material.ell, C_env_,
                         setup_.gas_nodes, setup_.crack_path_nodes,
                         controls.transport);
    state_.phi = Eigen::VectorXd::Zero(setup.mesh->n_nodes());
    state_.mech.u = Eigen::VectorXd::Zero(2 * setup.mesh->n_nodes());
    state_.mech.psi0.assign(cache_.n_qp(), 0.0);
    state_.mech.sigma_h.assign(cache_.n_qp(), 0.0);
    state_.fat.init(cache_.n_qp());
    state_.irr.init(cache_.n_qp());
    state_.hyd = transport_ ? transport_->make_state(0.0) : HydrogenState{};
    if (!transport_) {
      state_.hyd.C = Eigen::VectorXd::Zero(setup.mesh->n_nodes());
      state_.hyd.C_env = 0.0;
      state_.hyd.crack_exposed.assign(setup.mesh->n_nodes(), 0);
    }
    P_peak_ = program_.P_max;
  }

  bool hydrogen_active() const { return program_.p_H2 > 0.0; }

  double C_env() const { return C_env_; }
  const SimState& state() const { return state_; }
  SimState& state() { return state_; }
  const ElementCache& cache() const { return cache_; }
  const InvariantReport& invariants() const { return report_; }
  double fatigue_exponent() const {
    return setup_.fatigue.effective_n(program_.p_H2 > 0.0);
  }

  double peak_load() const { return P_peak_; }
  void set_peak_load(double P) { P_peak_ = P; }

  /// Soak / pre-charge phase; call once before cycling.
  void initialize() {
    if (!transport_) return;
    if (program_.precharged)
      transport_->precharge(state_.hyd);
    else if (program_.soak_s > 0)
      transport_->soak(state_.hyd, program_.soak_s);
    track_concentration();
  }

  /// Run one simulated cycle (advancing cycle_jump real cycles). Returns
  /// the domain sum of the fatigue increment.
  double advance_cycle() {
    const Eigen::VectorXd phi_start = state_.phi;
    const Eigen::VectorXd alpha_start =
        ctrl_.check_invariants ? state_.fat.alpha_bar : Eigen::VectorXd();
    state_.fat.begin_cycle();
    const int ipc = program_.increments_per_cycle;
    const double dt = 1.0 / (program_.f * ipc);
    for (int i = 1; i <= ipc; ++i) {
      const double s_prev = double(i - 1) / ipc;
      const double s = double(i) / ipc;
      increment_with_retry(s_prev, s, dt);
    }
    const double dsum =
        accumulate_fatigue(state_.fat, program_.R, setup_.fatigue,
                           fatigue_exponent(), program_.cycle_jump);
    state_.t += 1.0 / program_.f;
    if (program_.cycle_jump > 1) {
      const double t_jump = (program_.cycle_jump - 1) / program_.f;
      if (transport_) {
        const int nsub = std::max(1, ctrl_.jump_transport_substeps);
        for (int k = 0; k < nsub; ++k) {
          transport_->step(state_.hyd, t_jump / nsub, &state_.mech.sigma_h,
                           &state_.phi);
          track_concentration();
        }
      }
      state_.t += t_jump;
    }
    state_.cycle += program_.cycle_jump;
    if (ctrl_.check_invariants) check_invariants(phi_start, alpha_start);
    return dsum;
  }

  bool finished() const { return state_.cycle >= program_.max_cycles; }

  void save_checkpoint(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("checkpoint: cannot open '" + path + "'");
    const char magic[8] = {'H', 'A', 'F', 'C', 'G', 'S', 'T', '1'};
    os.write(magic, 8);
    const std::uint32_t version = 1;
    write_pod(os, version);
    write_pod(os, static_cast<std::int64_t>(setup_.mesh->n_nodes()));
    write_pod(os, static_cast<std::int64_t>(cache_.n_qp()));
    write_pod(os, state_.t);
    write_pod(os, static_cast<std::int64_t>(state_.cycle));
    write_pod(os, P_peak_);
    write_pod(os, C_env_);
    write_vec(os, state_.mech.u);
    write_vec(os, state_.phi);
    write_vec(os, state_.hyd.C);
    write_vec(os, state_.fat.alpha_bar);
    write_vec(os, state_.fat.alpha_max_cycle);
    write_vec(os, state_.fat.gate_metric_max);
    os.write(reinterpret_cast<const char*>(state_.fat.gate_open.data()),
             state_.fat.gate_open.size());
    write_vec(os, state_.irr.H);
    os.write(reinterpret_cast<const char*>(state_.hyd.crack_exposed.data()),
             state_.hyd.crack_exposed.size());
    if (!os) throw ConfigError("checkpoint: write failed on '" + path + "'");
  }

  void load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("checkpoint: cannot open '" + path + "'");
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, "HAFCGST1", 8) != 0)
      throw ConfigError("checkpoint: bad magic in '" + path + "'");
    std::uint32_t version = 0;
    read_pod(is, version);
    if (version != 1) throw ConfigError("checkpoint: unsupported version");
    std::int64_t n_nodes = 0, n_qp = 0, cycle = 0;
    read_pod(is, n_nodes);
    read_pod(is, n_qp);
    if (n_nodes != setup_.mesh->n_nodes() || n_qp != cache_.n_qp())
      throw ConfigError("checkpoint: size mismatch with current mesh");
    read_pod(is, state_.t);
    read_pod(is, cycle);
    state_.cycle = cycle;
    read_pod(is, P_peak_);
    read_pod(is, C_env_);
    read_vec(is, state_.mech.u, 2 * n_nodes);
    read_vec(is, state_.phi, n_nodes);
    read_vec(is, state_.hyd.C, n_nodes);
    read_vec(is, state_.fat.alpha_bar, n_qp);
    read_vec(is, state_.fat.alpha_max_cycle, n_qp);
    read_vec(is, state_.fat.gate_metric_max, n_qp);
    state_.fat.gate_open.resize(n_qp);
    is.read(reinterpret_cast<char*>(state_.fat.gate_open.data()), n_qp);
    read_vec(is, state_.irr.H, n_qp);
    state_.hyd.crack_exposed.resize(n_nodes);
    is.read(reinterpret_cast<char*>(state_.hyd.crack_exposed.data()), n_nodes);
    if (!is) throw ConfigError("checkpoint: truncated file '" + path + "'");
  }

  /// Single staggered pass (or fixed-point iteration when stagger_tol > 0)
  /// at load P, followed by one transport step of length dt.
  void staggered_increment(double P, double dt) {
    std::vector<PointLoad> loads = setup_.unit_load;
    for (auto& L : loads) {
      L.fx *= P;
      L.fy *= P;
    }
    if (ctrl_.stagger_tol <= 0.0) {
      state_.mech = mech_.solve(state_.phi, loads);
      state_.irr.update(state_.mech.psi0);
      update_alpha_running_max(cache_, state_.phi, state_.mech.psi0,
                               ctrl_.alpha_from_degraded_energy, state_.fat);
      state_.phi = pf_.solve(state_.irr, &state_.fat,
                             transport_ ? &state_.hyd.C : nullptr, state_.phi);
    } else {
      for (int it = 0; it < ctrl_.stagger_max_iter; ++it) {
        state_.mech = mech_.solve(state_.phi, loads);
        state_.irr.update(state_.mech.psi0);
        const Eigen::VectorXd phi_next =
            pf_.solve(state_.irr, &state_.fat,
                      transport_ ? &state_.hyd.C : nullptr, state_.phi);
        const double delta = (phi_next - state_.phi).lpNorm<Eigen::Infinity>();
        state_.phi = phi_next;
        if (delta < ctrl_.stagger_tol) break;
      }
      update_alpha_running_max(cache_, state_.phi, state_.mech.psi0,
                               ctrl_.alpha_from_degraded_energy, state_.fat);
    }
    if (transport_) {
      transport_->step(state_.hyd, dt, &state_.mech.sigma_h, &state_.phi);
      track_concentration();
    }
  }

 private:
  static DofMap make_u_dofs(const ProblemSetup& setup) {
    DofMap d(setup.mesh->n_nodes(), 2);
    for (const auto& fd : setup.fixed_dofs) d.constrain(fd[0], fd[1], 0.0);
    d.finalize();
    return d;
  }

  void increment_with_retry(double s_prev, double s, double dt) {
    try {
      staggered_increment(program_.load_at(P_peak_, s), dt);
    } catch (const SolverError&) {
      // one halving retry through the load-path midpoint
      try {
        const double s_mid = 0.5 * (s_prev + s);
        staggered_increment(program_.load_at(P_peak_, s_mid), 0.5 * dt);
        staggered_increment(program_.load_at(P_peak_, s), 0.5 * dt);
      } catch (const SolverError&) {
        if (!ctrl_.abort_dump_path.empty()) save_checkpoint(ctrl_.abort_dump_path);
        throw;
      }
    }
  }

  void track_concentration() {
    if (!ctrl_.check_invariants || state_.hyd.C.size() == 0) return;
    report_.min_C = std::min(report_.min_C, state_.hyd.C.minCoeff());
    report_.max_C = std::max(report_.max_C, state_.hyd.C.maxCoeff());
  }

  void check_invariants(const Eigen::VectorXd& phi_start,
                        const Eigen::VectorXd& alpha_start) {
    const double drop = (phi_start - state_.phi).maxCoeff();
    report_.max_phi_drop = std::max(report_.max_phi_drop, drop);
    report_.min_phi = std::min(report_.min_phi, state_.phi.minCoeff());
    report_.max_phi = std::max(report_.max_phi, state_.phi.maxCoeff());
    if (alpha_start.size() > 0) {
      const double da = (alpha_start - state_.fat.alpha_bar).maxCoeff();
      report_.min_alpha_increment = std::min(report_.min_alpha_increment, -da);
    }
    ++report_.cycles_checked;
  }

  template <class T>
  static void write_pod(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  template <class T>
  static void read_pod(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
  }
  static void write_vec(std::ofstream& os, const Eigen::VectorXd& v) {
    write_pod(os, static_cast<std::int64_t>(v.size()));
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  static void read_vec(std::ifstream& is, Eigen::VectorXd& v, std::int64_t expect) {
    std::int64_t n = 0;
    read_pod(is, n);
    if (n != expect) throw ConfigError("checkpoint: vector size mismatch");
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
  }

  ProblemSetup setup_;
  LoadProgram program_;
  SolverControls ctrl_;
  ElementCache cache_;
  DofMap u_dofs_;
  MechanicsSolver mech_;
  PhaseFieldSolver pf_;
  std::optional<TransportSolver> transport_;
  SimState state_;
  InvariantReport report_;
  double C_env_ = 0.0;
  double P_peak_ = 0.0;
};

} // namespace hafcg
