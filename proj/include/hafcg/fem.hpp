#pragma once

// Shared finite-element machinery: precomputed shape data at quadrature
// points, nodal interpolation, and L2 recovery of quadrature-point fields.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "hafcg/errors.hpp"
#include "hafcg/mesh.hpp"
#include "hafcg/quadrature.hpp"

namespace hafcg {

inline constexpr int kQpPerElem = 9;

struct QPData {
  std::array<double, 8> N;
  std::array<double, 8> dNdx;
  std::array<double, 8> dNdy;
  double wdet; // quadrature weight times Jacobian determinant
};

/// Isoparametric shape data for every element/quadrature point, computed
/// once per mesh. Throws AssemblyError if any Jacobian is non-positive.
class ElementCache {
 public:
  explicit ElementCache(const Mesh& mesh) : mesh_(&mesh) {
    qp_.resize(static_cast<std::size_t>(mesh.n_elements()) * kQpPerElem);
    const auto& rule = gauss9();
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto& conn = mesh.elements[e];
      for (int q = 0; q < kQpPerElem; ++q) {
        const ShapeQ8 s = shape_q8(rule[q].xi, rule[q].eta);
        double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
        for (int a = 0; a < 8; ++a) {
          const auto& X = mesh.nodes[conn[a]];
          j00 += s.dNdxi[a] * X[0];
          j01 += s.dNdxi[a] * X[1];
          j10 += s.dNdeta[a] * X[0];
          j11 += s.dNdeta[a] * X[1];
        }
        const double det = j00 * j11 - j01 * j10;
        if (det <= 0.0)
          throw AssemblyError("singular element Jacobian in element " +
                              std::to_string(e));
        const double inv00 = j11 / det, inv01 = -j01 / det;
        const double inv10 = -j10 / det, inv11 = j00 / det;
        QPData& d = qp_[index(e, q)];
        d.N = s.N;
        for (int a = 0; a < 8; ++a) {
          d.dNdx[a] = inv00 * s.dNdxi[a] + inv10 * s.dNdeta[a];
          d.dNdy[a] = inv01 * s.dNdxi[a] + inv11 * s.dNdeta[a];
        }
        d.wdet = det * rule[q].w;
      }
    }
  }

  const Mesh& mesh() const { return *mesh_; }
  int n_qp() const { return static_cast<int>(qp_.size()); }
  static int index(int e, int q) { return e * kQpPerElem + q; }
  const QPData& at(int e, int q) const { return qp_[index(e, q)]; }

  /// Interpolate a nodal scalar field at a quadrature point.
  double value_at(int e, int q, const Eigen::VectorXd& nodal) const {
    const QPData& d = at(e, q);
    const auto& conn = mesh_->elements[e];
    double v = 0.0;
    for (int a = 0; a < 8; ++a) v += d.N[a] * nodal[conn[a]];
    return v;
  }

  /// Gradient of a nodal scalar field at a quadrature point.
  std::array<double, 2> grad_at(int e, int q, const Eigen::VectorXd& nodal) const {
    const QPData& d = at(e, q);
    const auto& conn = mesh_->elements[e];
    std::array<double, 2> g{0.0, 0.0};
    for (int a = 0; a < 8; ++a) {
      g[0] += d.dNdx[a] * nodal[conn[a]];
      g[1] += d.dNdy[a] * nodal[conn[a]];
    }
    return g;
  }

  double integrate(const std::vector<double>& qp_values) const {
    double s = 0.0;
    for (std::size_t i = 0; i < qp_.size(); ++i) s += qp_values[i] * qp_[i].wdet;
    return s;
  }

 private:
  const Mesh* mesh_;
  std::vector<QPData> qp_;
};

/// Consistent-mass L2 projection of quadrature-point scalars onto nodes,
/// used for hydrostatic stress recovery ahead of the transport drift term.
class L2Projector {
 public:
  explicit L2Projector(const ElementCache& cache) : cache_(&cache) {
    const Mesh& mesh = cache.mesh();
    const int n = mesh.n_nodes();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(mesh.n_elements()) * 64);
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto& conn = mesh.elements[e];
      for (int q = 0; q < kQpPerElem; ++q) {
        const QPData& d = cache.at(e, q);
        for (int a = 0; a < 8; ++a)
          for (int b = 0; b < 8; ++b)
            trips.emplace_back(conn[a], conn[b], d.N[a] * d.N[b] * d.wdet);
      }
    }
    mass_.resize(n, n);
    mass_.setFromTriplets(trips.begin(), trips.end());
    chol_.compute(mass_);
    if (chol_.info() != Eigen::Success)
      throw SolverError("l2-projection", "mass matrix factorization failed");
  }

  Eigen::VectorXd project(const std::vector<double>& qp_values) const {
    const Mesh& mesh = cache_->mesh();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.n_nodes());
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto& conn = mesh.elements[e];
      for (int q = 0; q < kQpPerElem; ++q) {
        const QPData& d = cache_->at(e, q);
        const double v = qp_values[ElementCache::index(e, q)] * d.wdet;
        for (int a = 0; a < 8; ++a) b[conn[a]] += d.N[a] * v;
      }
    }
    return chol_.solve(b);
  }

 private:
  const ElementCache* cache_;
  Eigen::SparseMatrix<double> mass_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol_;
};

} // namespace hafcg
