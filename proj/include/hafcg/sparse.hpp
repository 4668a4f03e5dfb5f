#pragma once

// Sparse operator assembly and direct solves. The sparsity pattern and the
// element scatter tables are built once per (mesh, dof map) pair; repeated
// assemblies only rewrite the value array, which keeps the per-increment
// cost of the cyclic driver low. Dirichlet conditions are eliminated by
// lifting prescribed values onto the right-hand side.

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "hafcg/dofmap.hpp"
#include "hafcg/errors.hpp"
#include "hafcg/mesh.hpp"

namespace hafcg {

/// Assembled linear system over the free dofs of one field.
struct SparseSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  bool symmetric = false;
};

/// Measured symmetry defect max|A - A^T| relative to the largest entry.
inline double symmetry_defect(const Eigen::SparseMatrix<double>& A) {
  Eigen::SparseMatrix<double> D = Eigen::SparseMatrix<double>(A.transpose()) - A;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
      num = std::max(num, std::abs(it.value()));
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      den = std::max(den, std::abs(it.value()));
  return den > 0 ? num / den : 0.0;
}

/// Pattern-cached assembler for one field on one mesh.
class FieldStructure {
 public:
  FieldStructure(const Mesh& mesh, const DofMap& dofs)
      : mesh_(&mesh), dofs_(&dofs) {
    const int nc = dofs.n_comp();
    nd_ = 8 * nc;
    elem_dofs_.resize(static_cast<std::size_t>(mesh.n_elements()) * nd_);
    for (int e = 0; e < mesh.n_elements(); ++e)
      for (int a = 0; a < 8; ++a)
        for (int c = 0; c < nc; ++c)
          elem_dofs_[e * nd_ + a * nc + c] = dofs.dof(mesh.elements[e][a], c);

    // pattern from free-free couplings
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(mesh.n_elements()) * nd_ * nd_ / 2);
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const int* ed = &elem_dofs_[e * nd_];
      for (int i = 0; i < nd_; ++i) {
        const int ri = dofs.eq(ed[i]);
        if (ri < 0) continue;
        for (int j = 0; j < nd_; ++j) {
          const int cj = dofs.eq(ed[j]);
          if (cj >= 0) trips.emplace_back(ri, cj, 0.0);
        }
      }
    }
    sys_.A.resize(dofs.n_free(), dofs.n_free());
    sys_.A.setFromTriplets(trips.begin(), trips.end());
    sys_.A.makeCompressed();
    sys_.b.resize(dofs.n_free());

    // scatter table: CSC value index for free-free, -1 skip, -2 rhs lift
    scatter_.assign(static_cast<std::size_t>(mesh.n_elements()) * nd_ * nd_, -1);
    const int* outer = sys_.A.outerIndexPtr();
    const int* inner = sys_.A.innerIndexPtr();
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const int* ed = &elem_dofs_[e * nd_];
      for (int i = 0; i < nd_; ++i) {
        const int ri = dofs.eq(ed[i]);
        if (ri < 0) continue;
        for (int j = 0; j < nd_; ++j) {
          const int cj = dofs.eq(ed[j]);
          int& slot = scatter_[(static_cast<std::size_t>(e) * nd_ + i) * nd_ + j];
          if (cj < 0) {
            slot = -2;
            continue;
          }
          const int lo = outer[cj], hi = outer[cj + 1];
          const int* pos = std::lower_bound(inner + lo, inner + hi, ri);
          slot = static_cast<int>(pos - inner);
        }
      }
    }
  }

  const Mesh& mesh() const { return *mesh_; }
  const DofMap& dofs() const { return *dofs_; }
  int nd() const { return nd_; }

  void begin_assembly() {
    double* v = sys_.A.valuePtr();
    std::fill(v, v + sys_.A.nonZeros(), 0.0);
    sys_.b.setZero();
  }

  /// Scatter a full (constrained dofs included) local matrix.
  void add_element(int e, const double* Ke) {
    double* v = sys_.A.valuePtr();
    const int* ed = &elem_dofs_[e * nd_];
    const int* sc = &scatter_[static_cast<std::size_t>(e) * nd_ * nd_];
    for (int i = 0; i < nd_; ++i) {
      const int ri = dofs_->eq(ed[i]);
      if (ri < 0) continue;
      const double* krow = Ke + i * nd_;
      const int* srow = sc + i * nd_;
      for (int j = 0; j < nd_; ++j) {
        const int s = srow[j];
        if (s >= 0)
          v[s] += krow[j];
        else if (s == -2)
          sys_.b[ri] -= krow[j] * dofs_->prescribed(ed[j]);
      }
    }
  }

  void add_element_rhs(int e, const double* fe) {
    const int* ed = &elem_dofs_[e * nd_];
    for (int i = 0; i < nd_; ++i) {
      const int ri = dofs_->eq(ed[i]);
      if (ri >= 0) sys_.b[ri] += fe[i];
    }
  }

  /// Diagonal (penalty) contribution k*x_i = k*target at a nodal dof.
  void add_penalty(int node, int comp, double k, double target) {
    const int d = dofs_->dof(node, comp);
    const int r = dofs_->eq(d);
    if (r < 0) return; // already a hard constraint
    sys_.A.coeffRef(r, r) += k;
    sys_.b[r] += k * target;
  }

  void add_force(int node, int comp, double f) {
    const int r = dofs_->eq(dofs_->dof(node, comp));
    if (r >= 0) sys_.b[r] += f;
  }

  SparseSystem& system() { return sys_; }
  const SparseSystem& system() const { return sys_; }

 private:
  const Mesh* mesh_;
  const DofMap* dofs_;
  int nd_ = 0;
  std::vector<int> elem_dofs_;
  std::vector<int> scatter_;
  SparseSystem sys_;
};

/// Direct sparse solve with pattern reuse, one step of iterative refinement
/// and a hard residual guard. Symmetric systems use LDLT, the rest LU.
class DirectSolver {
 public:
  explicit DirectSolver(std::string field_name, bool symmetric)
      : field_(std::move(field_name)), symmetric_(symmetric) {}

  void factorize(const Eigen::SparseMatrix<double>& A) {
    if (symmetric_) {
      if (!analyzed_) { ldlt_.analyzePattern(A); analyzed_ = true; }
      ldlt_.factorize(A);
      if (ldlt_.info() != Eigen::Success)
        throw SolverError(field_, "LDLT factorization failed");
    } else {
      if (!analyzed_) { lu_.analyzePattern(A); analyzed_ = true; }
      lu_.factorize(A);
      if (lu_.info() != Eigen::Success)
        throw SolverError(field_, "LU factorization failed");
    }
    A_ = &A;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = backsolve(b);
    const double bn = b.norm();
    if (bn == 0.0) return Eigen::VectorXd::Zero(b.size());
    double rn = (b - (*A_) * x).norm();
    if (rn > 1e-12 * bn) { // one refinement pass
      x += backsolve(b - (*A_) * x);
      rn = (b - (*A_) * x).norm();
    }
    if (!(rn <= 1e-8 * bn))
      throw SolverError(field_, "residual " + std::to_string(rn / bn) +
                                    " exceeds tolerance (singular system?)");
    return x;
  }

  Eigen::VectorXd factor_solve(const SparseSystem& sys) {
    factorize(sys.A);
    return solve(sys.b);
  }

 private:
  Eigen::VectorXd backsolve(const Eigen::VectorXd& r) const {
    return symmetric_ ? Eigen::VectorXd(ldlt_.solve(r))
                      : Eigen::VectorXd(lu_.solve(r));
  }

  std::string field_;
  bool symmetric_;
  bool analyzed_ = false;
  const Eigen::SparseMatrix<double>* A_ = nullptr;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

} // namespace hafcg
