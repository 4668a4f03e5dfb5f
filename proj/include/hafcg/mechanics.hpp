#pragma once

// Plane-strain (optionally plane-stress) linear elasticity with phase-field
// degraded stiffness. Supplies the undamaged energy density psi0 and the
// hydrostatic stress sigma_h to the damage and transport problems.

#include <array>
#include <vector>

#include <Eigen/Core>

#include "hafcg/dofmap.hpp"
#include "hafcg/fem.hpp"
#include "hafcg/params.hpp"
#include "hafcg/sparse.hpp"

namespace hafcg {

/// Stiffness factor with the residual floor that keeps fully broken
/// elements invertible; used only inside stiffness assembly.
inline double residual_stiffness(double phi, double k_res = 1e-7) {
  const double o = 1.0 - phi;
  return o * o + k_res;
}

enum class PlaneMode { strain, stress };

struct ElasticityLaw {
  double E = 210000.0;
  double nu = 0.3;
  PlaneMode mode = PlaneMode::strain;

  Eigen::Matrix3d D() const { // Voigt [e_xx, e_yy, gamma_xy]
    Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
    if (mode == PlaneMode::strain) {
      const double c = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
      d(0, 0) = d(1, 1) = c * (1.0 - nu);
      d(0, 1) = d(1, 0) = c * nu;
      d(2, 2) = 0.5 * c * (1.0 - 2.0 * nu);
    } else {
      const double c = E / (1.0 - nu * nu);
      d(0, 0) = d(1, 1) = c;
      d(0, 1) = d(1, 0) = c * nu;
      d(2, 2) = 0.5 * c * (1.0 - nu);
    }
    return d;
  }
};

struct PointLoad {
  int node;
  double fx;
  double fy;
};

struct MechState {
  Eigen::VectorXd u;                          // nodal displacements [mm]
  std::vector<std::array<double, 3>> strain;  // per qp
  std::vector<std::array<double, 3>> stress0; // per qp, undamaged [MPa]
  std::vector<double> psi0;                   // per qp [N/mm^2]
  std::vector<double> sigma_h;                // per qp [MPa]
};

class MechanicsSolver {
 public:
  MechanicsSolver(const ElementCache& cache, const DofMap& dofs,
                  ElasticityLaw law, double k_res = 1e-7,
                  bool damaged_sigma_h = true)
      : cache_(&cache),
        dofs_(&dofs),
        law_(law),
        D_(law.D()),
        k_res_(k_res),
        damaged_sigma_h_(damaged_sigma_h),
        structure_(cache.mesh(), dofs),
        solver_("displacement", true) {
    const int ne = cache.mesh().n_elements();
    precompute_ = ne <= 4000;
    if (precompute_) {
      btdb_.resize(static_cast<std::size_t>(ne) * kQpPerElem * 256);
      for (int e = 0; e < ne; ++e)
        for (int q = 0; q < kQpPerElem; ++q)
          build_btdb(e, q, &btdb_[(static_cast<std::size_t>(e) * kQpPerElem + q) * 256]);
    }
  }

  const ElasticityLaw& law() const { return law_; }

  /// Solve equilibrium for the given damage field and point loads.
  /// Throws SolverError when the remaining ligament cannot carry the load.
  MechState solve(const Eigen::VectorXd& phi_nodal,
                  const std::vector<PointLoad>& loads) {
    assemble(phi_nodal, loads);
    const Eigen::VectorXd x = solver_.factor_solve(structure_.system());
    MechState st;
    st.u = dofs_->expand(x);
    post_process(st, phi_nodal);
    return st;
  }

  /// Full nodal residual K*u - f; entries at constrained dofs are the
  /// support reactions.
  Eigen::VectorXd reactions(const MechState& st,
                            const Eigen::VectorXd& phi_nodal,
                            const std::vector<PointLoad>& loads) const {
    const Mesh& mesh = cache_->mesh();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(dofs_->n_dofs());
    Eigen::Matrix<double, 16, 16> Ke;
    Eigen::Matrix<double, 16, 1> ue;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      element_matrix(e, phi_nodal, Ke.data());
      const auto& conn = mesh.elements[e];
      for (int a = 0; a < 8; ++a) {
        ue[2 * a] = st.u[2 * conn[a]];
        ue[2 * a + 1] = st.u[2 * conn[a] + 1];
      }
      const Eigen::Matrix<double, 16, 1> re = Ke * ue;
      for (int a = 0; a < 8; ++a) {
        r[2 * conn[a]] += re[2 * a];
        r[2 * conn[a] + 1] += re[2 * a + 1];
      }
    }
    for (const auto& L : loads) {
      r[dofs_->dof(L.node, 0)] -= L.fx;
      r[dofs_->dof(L.node, 1)] -= L.fy;
    }
    return r;
  }

  /// Total stored energy sum g_eff * psi0 over the domain [N*mm per mm].
  double strain_energy(const MechState& st, const Eigen::VectorXd& phi_nodal) const {
    double W = 0.0;
    const Mesh& mesh = cache_->mesh();
    for (int e = 0; e < mesh.n_elements(); ++e)
      for (int q = 0; q < kQpPerElem; ++q) {
        const double phi = cache_->value_at(e, q, phi_nodal);
        const int k = ElementCache::index(e, q);
        W += residual_stiffness(phi, k_res_) * st.psi0[k] * cache_->at(e, q).wdet;
      }
    return W;
  }

  void element_matrix(int e, const Eigen::VectorXd& phi_nodal, double* Ke) const {
    std::fill(Ke, Ke + 256, 0.0);
    for (int q = 0; q < kQpPerElem; ++q) {
      const double g = residual_stiffness(cache_->value_at(e, q, phi_nodal), k_res_);
      if (precompute_) {
        const double* W = &btdb_[(static_cast<std::size_t>(e) * kQpPerElem + q) * 256];
        for (int i = 0; i < 256; ++i) Ke[i] += g * W[i];
      } else {
        double W[256];
        build_btdb(e, q, W);
        for (int i = 0; i < 256; ++i) Ke[i] += g * W[i];
      }
    }
  }

 private:
  void build_btdb(int e, int q, double* W) const {
    const QPData& d = cache_->at(e, q);
    const double d00 = D_(0, 0), d01 = D_(0, 1), d11 = D_(1, 1), d22 = D_(2, 2);
    for (int a = 0; a < 8; ++a) {
      const double dxa = d.dNdx[a], dya = d.dNdy[a];
      for (int b = 0; b < 8; ++b) {
        const double dxb = d.dNdx[b], dyb = d.dNdy[b];
        const double s = d.wdet;
        W[(2 * a) * 16 + 2 * b] = s * (dxa * d00 * dxb + dya * d22 * dyb);
        W[(2 * a) * 16 + 2 * b + 1] = s * (dxa * d01 * dyb + dya * d22 * dxb);
        W[(2 * a + 1) * 16 + 2 * b] = s * (dya * d01 * dxb + dxa * d22 * dyb);
        W[(2 * a + 1) * 16 + 2 * b + 1] = s * (dya * d11 * dyb + dxa * d22 * dxb);
      }
    }
  }

  void assemble(const Eigen::VectorXd& phi_nodal,
                const std::vector<PointLoad>& loads) {
    structure_.begin_assembly();
    const Mesh& mesh = cache_->mesh();
    Eigen::Matrix<double, 16, 16> Ke;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      element_matrix(e, phi_nodal, Ke.data());
      structure_.add_element(e, Ke.data());
    }
    for (const auto& L : loads) {
      structure_.add_force(L.node, 0, L.fx);
      structure_.add_force(L.node, 1, L.fy);
    }
  }

  void post_process(MechState& st, const Eigen::VectorXd& phi_nodal) const {
    const Mesh& mesh = cache_->mesh();
    const int nq = cache_->n_qp();
    st.strain.resize(nq);
    st.stress0.resize(nq);
    st.psi0.resize(nq);
    st.sigma_h.resize(nq);
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto& conn = mesh.elements[e];
      for (int q = 0; q < kQpPerElem; ++q) {
        const QPData& d = cache_->at(e, q);
        double exx = 0, eyy = 0, gxy = 0;
        for (int a = 0; a < 8; ++a) {
          const double ux = st.u[2 * conn[a]], uy = st.u[2 * conn[a] + 1];
          exx += d.dNdx[a] * ux;
          eyy += d.dNdy[a] * uy;
          gxy += d.dNdy[a] * ux + d.dNdx[a] * uy;
        }
        const int k = ElementCache::index(e, q);
        st.strain[k] = {exx, eyy, gxy};
        const double sxx = D_(0, 0) * exx + D_(0, 1) * eyy;
        const double syy = D_(0, 1) * exx + D_(1, 1) * eyy;
        const double txy = D_(2, 2) * gxy;
        st.stress0[k] = {sxx, syy, txy};
        st.psi0[k] = 0.5 * (exx * sxx + eyy * syy + gxy * txy);
        const double szz =
            law_.mode == PlaneMode::strain ? law_.nu * (sxx + syy) : 0.0;
        double trace = sxx + syy + szz;
        if (damaged_sigma_h_) {
          const double phi = cache_->value_at(e, q, phi_nodal);
          trace *= residual_stiffness(phi, k_res_);
        }
        st.sigma_h[k] = trace / 3.0;
      }
    }
  }

  const ElementCache* cache_;
  const DofMap* dofs_;
  ElasticityLaw law_;
  Eigen::Matrix3d D_;
  double k_res_;
  bool damaged_sigma_h_;
  bool precompute_ = false;
  std::vector<double> btdb_;
  FieldStructure structure_;
  DirectSolver solver_;
};

} // namespace hafcg
