#pragma once

// Transient stress-assisted hydrogen diffusion: backward-Euler steps of
//   dC/dt = div(D grad C) - div(D C V_H/(Rg T) grad sigma_h)
// with C = C_env on gas-exposed boundaries and a penalty enforcement of
// C = C_env on crack faces once the local damage passes the exposure
// threshold. The hydrostatic stress arrives at quadrature points and is
// recovered to nodes by consistent L2 projection before its gradient is
// taken.

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "hafcg/dofmap.hpp"
#include "hafcg/fem.hpp"
#include "hafcg/params.hpp"
#include "hafcg/sparse.hpp"

namespace hafcg {

struct HydrogenState {
  Eigen::VectorXd C;               // nodal concentration [wppm]
  double C_env = 0.0;              // environmental concentration [wppm]
  std::vector<char> crack_exposed; // latched crack-face exposure per node
};

struct TransportOptions {
  double phi_exposure = 0.9;  // damage level at which a face counts as open
  double penalty_scale = 1e6; // k_pen = scale * D / ell^2 per nodal volume
  bool stabilization = false; // add upwind diffusion when cell Peclet > 2
  double boundary_ramp_s = 0; // ramp C_env over this time from a clean start
  bool clip_negative = true;  // floor transient undershoots at C = 0
};

class TransportSolver {
 public:
  /// dirichlet_nodes: gas-exposed boundary nodes (C = C_env).
  /// crack_path_nodes: candidates for penalty exposure (typically SYMMETRY).
  TransportSolver(const ElementCache& cache, const HydrogenParams& hyd,
                  double ell, double C_env,
                  const std::vector<int>& dirichlet_nodes,
                  const std::vector<int>& crack_path_nodes,
                  TransportOptions opts = {})
      : cache_(&cache),
        hyd_(hyd),
        opts_(opts),
        C_env_(C_env),
        crack_path_(crack_path_nodes),
        dofs_(make_dofs(cache.mesh(), dirichlet_nodes, C_env)),
        structure_(cache.mesh(), dofs_),
        solver_("concentration", false),
        projector_(cache) {
    const Mesh& mesh = cache.mesh();
    // per-element mass and diffusion blocks are constant; cache them
    Me_.resize(static_cast<std::size_t>(mesh.n_elements()) * 64);
    Kd_.resize(static_cast<std::size_t>(mesh.n_elements()) * 64);
    mass_diag_ = Eigen::VectorXd::Zero(mesh.n_nodes());
    for (int e = 0; e < mesh.n_elements(); ++e) {
      double* Me = &Me_[static_cast<std::size_t>(e) * 64];
      double* Kd = &Kd_[static_cast<std::size_t>(e) * 64];
      std::fill(Me, Me + 64, 0.0);
      std::fill(Kd, Kd + 64, 0.0);
      const auto& conn = mesh.elements[e];
      for (int q = 0; q < kQpPerElem; ++q) {
        const QPData& d = cache.at(e, q);
        for (int a = 0; a < 8; ++a)
          for (int b = 0; b < 8; ++b) {
            Me[a * 8 + b] += d.N[a] * d.N[b] * d.wdet;
            Kd[a * 8 + b] += hyd.D * (d.dNdx[a] * d.dNdx[b] + d.dNdy[a] * d.dNdy[b]) * d.wdet;
          }
      }
      for (int a = 0; a < 8; ++a) mass_diag_[conn[a]] += Me[a * 8 + a];
    }
    k_pen_unit_ = opts_.penalty_scale * hyd.D / (ell * ell);
  }

  double C_env() const { return C_env_; }

  HydrogenState make_state(double C0 = 0.0) const {
    HydrogenState st;
    st.C = Eigen::VectorXd::Constant(cache_->mesh().n_nodes(), C0);
    st.C_env = C_env_;
    st.crack_exposed.assign(cache_->mesh().n_nodes(), 0);
    return st;
  }

  /// Uniform pre-charge C = C_env everywhere.
  void precharge(HydrogenState& st) const {
    st.C.setConstant(C_env_);
    st.C_env = C_env_;
  }

  /// One backward-Euler step. Pass sigma_h_qp = nullptr for the unloaded
  /// (pure diffusion) problem; phi_nodal = nullptr disables crack exposure.
  void step(HydrogenState& st, double dt,
            const std::vector<double>* sigma_h_qp = nullptr,
            const Eigen::VectorXd* phi_nodal = nullptr,
            double boundary_value = -1.0) {
    if (dt <= 0) throw ConfigError("transport step: dt must be > 0");
    const Mesh& mesh = cache_->mesh();
    const double bval = boundary_value >= 0 ? boundary_value : C_env_;
    set_dirichlet_values(bval);

    Eigen::VectorXd sh_nodal;
    const bool drift = sigma_h_qp != nullptr;
    if (drift) sh_nodal = projector_.project(*sigma_h_qp);

    if (phi_nodal)
      for (int n : crack_path_)
        if ((*phi_nodal)[n] >= opts_.phi_exposure) st.crack_exposed[n] = 1;

    structure_.begin_assembly();
    const double drift_coef = hyd_.D * hyd_.V_H / (hyd_.Rg * hyd_.T);
    double Ke[64], fe[8];
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const double* Me = &Me_[static_cast<std::size_t>(e) * 64];
      const double* Kd = &Kd_[static_cast<std::size_t>(e) * 64];
      const auto& conn = mesh.elements[e];
      for (int i = 0; i < 64; ++i) Ke[i] = Me[i] / dt + Kd[i];
      if (drift) {
        for (int q = 0; q < kQpPerElem; ++q) {
          const QPData& d = cache_->at(e, q);
          const auto g = cache_->grad_at(e, q, sh_nodal);
          // advective term: -(D V_H/(Rg T)) C grad(sigma_h) . grad(w)
          for (int a = 0; a < 8; ++a) {
            const double adv = drift_coef * (g[0] * d.dNdx[a] + g[1] * d.dNdy[a]) * d.wdet;
            for (int b = 0; b < 8; ++b) Ke[a * 8 + b] -= adv * d.N[b];
          }
          if (opts_.stabilization) {
            const double vmag = drift_coef * std::hypot(g[0], g[1]);
            const double h = mesh.elem_size[e];
            const double peclet = vmag * h / (2.0 * hyd_.D);
            if (peclet > 2.0) {
              const double D_art = 0.5 * vmag * h * (1.0 - 1.0 / peclet);
              for (int a = 0; a < 8; ++a)
                for (int b = 0; b < 8; ++b)
                  Ke[a * 8 + b] += D_art *
                                   (d.dNdx[a] * d.dNdx[b] + d.dNdy[a] * d.dNdy[b]) *
                                   d.wdet;
            }
          }
        }
      }
      // rhs: (M/dt) C_old including contributions from constrained columns
      for (int a = 0; a < 8; ++a) {
        double s = 0.0;
        for (int b = 0; b < 8; ++b) s += Me[a * 8 + b] * st.C[conn[b]];
        fe[a] = s / dt;
      }
      structure_.add_element(e, Ke);
      structure_.add_element_rhs(e, fe);
    }
    for (int n : crack_path_)
      if (st.crack_exposed[n])
        structure_.add_penalty(n, 0, k_pen_unit_ * mass_diag_[n], C_env_);

    st.C = dofs_.expand(solver_.factor_solve(structure_.system()));
    if (opts_.clip_negative) st.C = st.C.cwiseMax(0.0);
  }

  /// Unloaded exposure phase from the current state: pure diffusion with
  /// geometrically growing substeps (and optional boundary ramp-in).
  void soak(HydrogenState& st, double duration) {
    if (duration < 0) throw ConfigError("soak: duration must be >= 0");
    if (duration == 0) return;
    const double h = min_band_size();
    double dt = std::min(duration, 0.5 * h * h / hyd_.D);
    double t = 0.0;
    while (t < duration) {
      dt = std::min(dt, duration - t);
      t += dt;
      double bval = C_env_;
      if (opts_.boundary_ramp_s > 0)
        bval *= std::min(1.0, t / opts_.boundary_ramp_s);
      step(st, dt, nullptr, nullptr, bval);
      dt *= 1.3;
    }
  }

  const DofMap& dofs() const { return dofs_; }
  const Eigen::VectorXd& mass_diag() const { return mass_diag_; }

 private:
  static DofMap make_dofs(const Mesh& mesh, const std::vector<int>& dirichlet,
                          double C_env) {
    DofMap d(mesh.n_nodes(), 1);
    for (int n : dirichlet) d.constrain(n, 0, C_env);
    d.finalize();
    return d;
  }

  void set_dirichlet_values(double v) {
    for (int d = 0; d < dofs_.n_dofs(); ++d)
      if (dofs_.is_constrained(d)) dofs_.set_prescribed(d, 0, v);
  }

  double min_band_size() const {
    const Mesh& mesh = cache_->mesh();
    double h = mesh.elem_size.empty() ? 1.0 : mesh.elem_size[0];
    for (double s : mesh.elem_size) h = std::min(h, s);
    return h;
  }

  const ElementCache* cache_;
  HydrogenParams hyd_;
  TransportOptions opts_;
  double C_env_;
  double k_pen_unit_ = 0.0;
  std::vector<int> crack_path_;
  DofMap dofs_;
  FieldStructure structure_;
  DirectSolver solver_;
  L2Projector projector_;
  std::vector<double> Me_, Kd_;
  Eigen::VectorXd mass_diag_;
};

} // namespace hafcg
