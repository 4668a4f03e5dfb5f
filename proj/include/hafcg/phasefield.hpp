#pragma once

// Phase-field damage evolution with fatigue and hydrogen toughness
// degradation. The crack driving force is the irreversibility history field
// (running maximum of the undamaged energy density); the fatigue history
// variable accumulates per cycle from the within-cycle peak of the degraded
// energy density.

#include <vector>

#include <Eigen/Core>

#include "hafcg/dofmap.hpp"
#include "hafcg/fem.hpp"
#include "hafcg/params.hpp"
#include "hafcg/sparse.hpp"

namespace hafcg {

/// Per-quadrature-point cyclic damage bookkeeping.
struct FatigueHistory {
  Eigen::VectorXd alpha_bar;       // accumulated history [N/mm^2]
  Eigen::VectorXd alpha_max_cycle; // running max within the current cycle
  Eigen::VectorXd gate_metric_max; // all-time max of alpha_max*((1-R)/2)^(2k)
  std::vector<char> gate_open;     // latched threshold flag

  void init(int n_qp) {
    alpha_bar = Eigen::VectorXd::Zero(n_qp);
    alpha_max_cycle = Eigen::VectorXd::Zero(n_qp);
    gate_metric_max = Eigen::VectorXd::Zero(n_qp);
    gate_open.assign(n_qp, 0);
  }

  void begin_cycle() { alpha_max_cycle.setZero(); }
};

/// Running maximum of the undamaged energy density, per quadrature point.
struct IrreversibilityHistory {
  Eigen::VectorXd H;
  void init(int n_qp) { H = Eigen::VectorXd::Zero(n_qp); }
  void update(const std::vector<double>& psi0) {
    for (int k = 0; k < H.size(); ++k)
      if (psi0[k] > H[k]) H[k] = psi0[k];
  }
};

/// Record alpha = (1-phi)^2 * psi0 into the within-cycle running maximum.
/// With use_degraded=false the raw psi0 is used instead.
inline void update_alpha_running_max(const ElementCache& cache,
                                     const Eigen::VectorXd& phi_nodal,
                                     const std::vector<double>& psi0,
                                     bool use_degraded, FatigueHistory& fh) {
  const Mesh& mesh = cache.mesh();
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (int q = 0; q < kQpPerElem; ++q) {
      const int k = ElementCache::index(e, q);
      double alpha = psi0[k];
      if (use_degraded) {
        const double o = 1.0 - cache.value_at(e, q, phi_nodal);
        alpha *= o * o;
      }
      if (alpha > fh.alpha_max_cycle[k]) fh.alpha_max_cycle[k] = alpha;
    }
}

/// Close out a load cycle: latch the threshold flags, then accumulate
///   d_alpha_bar = (alpha_max/alpha_n)^n * ((1-R)/2)^(2*kappa*n) * gate
/// scaled by cycle_jump. Returns the domain sum of the increments.
inline double accumulate_fatigue(FatigueHistory& fh, double R,
                                 const FatigueParams& p, double n_exp,
                                 int cycle_jump = 1) {
  const double mean_factor = std::pow(0.5 * (1.0 - R), 2.0 * p.kappa);
  const double rate_factor = std::pow(0.5 * (1.0 - R), 2.0 * p.kappa * n_exp);
  double total = 0.0;
  for (int k = 0; k < fh.alpha_bar.size(); ++k) {
    const double metric = fh.alpha_max_cycle[k] * mean_factor;
    if (metric > fh.gate_metric_max[k]) fh.gate_metric_max[k] = metric;
    if (!fh.gate_open[k] && fh.gate_metric_max[k] >= p.alpha_e)
      fh.gate_open[k] = 1;
    if (!fh.gate_open[k]) continue;
    const double d = std::pow(fh.alpha_max_cycle[k] / p.alpha_n, n_exp) *
                     rate_factor * cycle_jump;
    fh.alpha_bar[k] += d;
    total += d;
  }
  return total;
}

/// Closed-form damage of the homogeneous (gradient-free) problem.
inline double homogeneous_phi(double psi0, double ell, double Gc, double fF = 1.0,
                              double fH = 1.0) {
  return 2.0 * psi0 * ell / (fF * fH * Gc + 2.0 * psi0 * ell);
}

class PhaseFieldSolver {
 public:
  PhaseFieldSolver(const ElementCache& cache, const MaterialParams& mat,
                   const FatigueParams* fat = nullptr,
                   const HydrogenParams* hyd = nullptr)
      : cache_(&cache),
        mat_(mat),
        fat_(fat),
        hyd_(hyd),
        dofs_(make_free_dofs(cache.mesh().n_nodes())),
        structure_(cache.mesh(), dofs_),
        solver_("phase-field", true) {}

  /// One linear solve of the evolution equation; the returned field is
  /// clipped to [0,1] and clamped to be nodewise >= phi_prev.
  Eigen::VectorXd solve(const IrreversibilityHistory& irr,
                        const FatigueHistory* fh,
                        const Eigen::VectorXd* C_nodal,
                        const Eigen::VectorXd& phi_prev) {
    const Mesh& mesh = cache_->mesh();
    const double gc_over_ell = mat_.Gc0 / mat_.ell;
    const double ell2 = mat_.ell * mat_.ell;
    structure_.begin_assembly();
    double Ke[64], fe[8];
    for (int e = 0; e < mesh.n_elements(); ++e) {
      std::fill(Ke, Ke + 64, 0.0);
      std::fill(fe, fe + 8, 0.0);
      for (int q = 0; q < kQpPerElem; ++q) {
        const int k = ElementCache::index(e, q);
        double fdeg = 1.0;
        if (fat_) fdeg *= fatigue_degradation(fh->alpha_bar[k], *fat_);
        if (hyd_ && C_nodal) {
          const double C = std::max(0.0, cache_->value_at(e, q, *C_nodal));
          fdeg *= hydrogen_degradation(C, *hyd_);
        }
        const QPData& d = cache_->at(e, q);
        const double gamma = fdeg * gc_over_ell;
        const double H = irr.H[k];
        const double cm = (gamma + 2.0 * H) * d.wdet;
        const double cg = gamma * ell2 * d.wdet;
        const double cf = 2.0 * H * d.wdet;
        for (int a = 0; a < 8; ++a) {
          fe[a] += cf * d.N[a];
          for (int b = 0; b < 8; ++b)
            Ke[a * 8 + b] += cm * d.N[a] * d.N[b] +
                             cg * (d.dNdx[a] * d.dNdx[b] + d.dNdy[a] * d.dNdy[b]);
        }
      }
      structure_.add_element(e, Ke);
      structure_.add_element_rhs(e, fe);
    }
    Eigen::VectorXd phi = dofs_.expand(solver_.factor_solve(structure_.system()));
    for (int n = 0; n < phi.size(); ++n) {
      double v = std::min(1.0, std::max(0.0, phi[n]));
      phi[n] = std::max(v, phi_prev[n]); // monotone clamp
    }
    return phi;
  }

 private:
  static DofMap make_free_dofs(int n_nodes) {
    DofMap d(n_nodes, 1);
    d.finalize();
    return d;
  }

  const ElementCache* cache_;
  MaterialParams mat_;
  const FatigueParams* fat_;
  const HydrogenParams* hyd_;
  DofMap dofs_;
  FieldStructure structure_;
  DirectSolver solver_;
};

} // namespace hafcg
