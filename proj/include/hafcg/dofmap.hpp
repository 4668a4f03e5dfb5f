#pragma once

// Node-to-equation maps with Dirichlet bookkeeping. One DofMap instance per
// field; the displacement field uses two components per node.

#include <vector>

#include <Eigen/Core>

#include "hafcg/errors.hpp"

namespace hafcg {

class DofMap {
 public:
  DofMap() = default;
  DofMap(int n_nodes, int n_comp) : n_nodes_(n_nodes), n_comp_(n_comp) {
    constrained_.assign(n_nodes * n_comp, 0);
    value_.assign(n_nodes * n_comp, 0.0);
  }

  int n_comp() const { return n_comp_; }
  int n_nodes() const { return n_nodes_; }
  int n_dofs() const { return n_nodes_ * n_comp_; }
  int n_free() const { return n_free_; }

  int dof(int node, int comp = 0) const { return node * n_comp_ + comp; }

  void constrain(int node, int comp, double value) {
    if (finalized_) throw ConfigError("DofMap: constrain after finalize");
    constrained_[dof(node, comp)] = 1;
    value_[dof(node, comp)] = value;
  }

  /// Re-set the prescribed value of an already-constrained dof.
  void set_prescribed(int node, int comp, double value) {
    const int d = dof(node, comp);
    if (!constrained_[d])
      throw ConfigError("DofMap: set_prescribed on an unconstrained dof");
    value_[d] = value;
  }

  void finalize() {
    eq_.assign(n_dofs(), -1);
    n_free_ = 0;
    for (int d = 0; d < n_dofs(); ++d)
      if (!constrained_[d]) eq_[d] = n_free_++;
    finalized_ = true;
  }

  bool is_constrained(int d) const { return constrained_[d] != 0; }
  double prescribed(int d) const { return value_[d]; }
  int eq(int d) const { return eq_[d]; } // -1 for constrained dofs

  /// Scatter a reduced (free-dof) solution into a full nodal vector.
  Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const {
    Eigen::VectorXd full(n_dofs());
    for (int d = 0; d < n_dofs(); ++d)
      full[d] = constrained_[d] ? value_[d] : reduced[eq_[d]];
    return full;
  }

 private:
  int n_nodes_ = 0;
  int n_comp_ = 1;
  int n_free_ = 0;
  bool finalized_ = false;
  std::vector<char> constrained_;
  std::vector<double> value_;
  std::vector<int> eq_;
};

} // namespace hafcg
