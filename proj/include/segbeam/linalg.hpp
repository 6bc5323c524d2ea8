#pragma once

#include <Eigen/Dense>
#include <complex>

#include "segbeam/errors.hpp"

namespace segbeam {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// Recursively maintained inverse of (loading*I + sum_t x_t x_t^H).
//
// With loading > 0 the underlying matrix is Hermitian positive definite
// for any finite update sequence, so the inverse exists at every step.
// Window shrinking is not supported: sliding schemes keep parallel
// growing states or re-solve in batch instead of downdating.
struct HermitianState {
  CMatrix inv;     // p x p maintained inverse
  double loading;  // the diagonal load, in power units

  int dim() const { return static_cast<int>(inv.rows()); }
};

// Fresh state with no data folded in yet: inv = I/loading.
HermitianState make_hermitian_state(int dim, double loading);

// Byproducts of one Sherman-Morrison step, reused by callers that track
// dependent quantities (weight numerators, RLS gains).
struct Rank1Update {
  CVector k;     // inv * x, evaluated before the update
  double gamma;  // 1 + Re(x^H k), always >= 1 while inv stays positive definite
};

// Fold one snapshot into the maintained inverse:
//   inv <- inv - (k k^H)/gamma.
// gamma's imaginary part is dropped (it is rounding noise) and the result
// is re-symmetrized in place so Hermitian drift cannot accumulate over
// long streams.
Rank1Update rank1_update(HermitianState& state, const CVector& x);

// In-place (A + A^H)/2 without temporaries.
void symmetrize_hermitian(CMatrix& a);

// Solve (X X^H + loading*I) y = b through a Hermitian LDLT factorization.
// Zero columns (or an all-zero X) reduce to y = b/loading.
CVector regularized_gram_solve(const CMatrix& x, const CVector& b,
                               double loading);

// Solve A y = b for Hermitian positive definite A. No explicit inverse.
CVector hermitian_solve(const CMatrix& a, const CVector& b);

}  // namespace segbeam
