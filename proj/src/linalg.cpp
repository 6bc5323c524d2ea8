#include "segbeam/linalg.hpp"

namespace segbeam {

HermitianState make_hermitian_state(int dim, double loading) {
  if (dim < 1) throw ContractViolation("state dimension must be positive");
  if (!(loading > 0.0)) throw ContractViolation("loading must be positive");
  HermitianState s;
  s.inv = CMatrix::Identity(dim, dim) / loading;
  s.loading = loading;
  return s;
}

void symmetrize_hermitian(CMatrix& a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    a(j, j) = Complex(a(j, j).real(), 0.0);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const Complex m = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = m;
      a(j, i) = std::conj(m);
    }
  }
}

Rank1Update rank1_update(HermitianState& state, const CVector& x) {
  if (x.size() != state.inv.rows())
    throw ContractViolation("snapshot dimension does not match state");
  if (!x.allFinite()) throw NumericError("non-finite snapshot");

  Rank1Update r;
  r.k.noalias() = state.inv * x;
  // x^H k = x^H inv x >= 0 for Hermitian positive definite inv; any
  // imaginary residue is rounding noise and is discarded.
  r.gamma = 1.0 + x.dot(r.k).real();
  if (!(r.gamma > 0.0) || !std::isfinite(r.gamma))
    throw NumericError("update gain collapsed; state no longer positive definite");

  state.inv.noalias() -= (r.k * r.k.adjoint()) / r.gamma;
  symmetrize_hermitian(state.inv);
  return r;
}

CVector regularized_gram_solve(const CMatrix& x, const CVector& b,
                               double loading) {
  if (!(loading > 0.0)) throw ContractViolation("loading must be positive");
  if (x.cols() > 0 && x.rows() != b.size())
    throw ContractViolation("snapshot dimension does not match right-hand side");
  if (!x.allFinite() || !b.allFinite())
    throw NumericError("non-finite input to gram solve");

  if (x.cols() == 0) return b / loading;

  const Eigen::Index p = b.size();
  CMatrix g = CMatrix::Identity(p, p) * loading;
  g.noalias() += x * x.adjoint();
  return hermitian_solve(g, b);
}

CVector hermitian_solve(const CMatrix& a, const CVector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw ContractViolation("solve dimensions do not match");
  Eigen::LDLT<CMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    throw SingularityError("Hermitian factorization failed");
  CVector y = ldlt.solve(b);
  if (!y.allFinite())
    throw SingularityError("solve produced non-finite values");
  // Rank-deficient systems come back finite (tiny pivots are skipped), so a
  // residual test is the reliable flag. Exact solves sit near machine epsilon
  // relative to this scale.
  const double scale = a.norm() * y.norm() + b.norm();
  if ((a * y - b).norm() > 1e-8 * scale)
    throw SingularityError("system is singular or severely ill-conditioned");
  return y;
}

}  // namespace segbeam
