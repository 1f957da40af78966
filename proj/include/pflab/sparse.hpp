#pragma once

// Small free-function helpers over Eigen sparse matrices.

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCore>

namespace pflab {

template <typename Scalar>
double max_abs_entry(const Eigen::SparseMatrix<Scalar>& a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(a, k); it; ++it)
      m = std::max(m, static_cast<double>(std::abs(it.value())));
  return m;
}

/// max |A - A^dagger| over all entries.
template <typename Scalar>
double hermiticity_defect(const Eigen::SparseMatrix<Scalar>& a) {
  if (a.rows() != a.cols()) return INFINITY;
  Eigen::SparseMatrix<Scalar> adj = a.adjoint();
  return max_abs_entry(Eigen::SparseMatrix<Scalar>(a - adj));
}

/// (A + A^dagger) / 2, pruned of exact zeros.
template <typename Scalar>
Eigen::SparseMatrix<Scalar> hermitian_part(const Eigen::SparseMatrix<Scalar>& a) {
  Eigen::SparseMatrix<Scalar> adj = a.adjoint();
  Eigen::SparseMatrix<Scalar> h = (a + adj) * Scalar(0.5);
  h.prune(Scalar(0));
  h.makeCompressed();
  return h;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar> commutator(const Eigen::SparseMatrix<Scalar>& a,
                                       const Eigen::SparseMatrix<Scalar>& b) {
  Eigen::SparseMatrix<Scalar> ab = a * b;
  Eigen::SparseMatrix<Scalar> ba = b * a;
  return ab - ba;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar> sparse_identity(Eigen::Index n) {
  Eigen::SparseMatrix<Scalar> id(n, n);
  id.setIdentity();
  return id;
}

}  // namespace pflab
