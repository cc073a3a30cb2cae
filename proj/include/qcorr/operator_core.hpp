#pragma once

// Dense complex linear algebra for small Hermitian operators.
//
// Operators are plain Eigen matrices; the free functions below accept any
// Eigen expression and return evaluated results. Hermiticity is checked at the
// entry points that depend on it (eig_hermitian, support_projector).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qcorr/errors.hpp"

namespace qcorr {

using Index = Eigen::Index;

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using Operator = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using StateVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using OperatorXd = Operator<double>;

enum class Side { a, b };

constexpr Side other(Side s) { return s == Side::a ? Side::b : Side::a; }
constexpr const char* to_string(Side s) { return s == Side::a ? "a" : "b"; }

// Subsystem dimensions of a bipartite Hilbert space H_a (x) H_b.
struct Dims {
  Index a = 0;
  Index b = 0;

  constexpr Index total() const { return a * b; }
  constexpr Index of(Side s) const { return s == Side::a ? a : b; }
  friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

inline std::string to_string(const Dims& d) {
  return std::to_string(d.a) + "x" + std::to_string(d.b);
}

// Entrywise tolerance for the Hermitian invariant.
inline constexpr double kHermitianTolerance = 1e-12;
// Eigenvalue threshold for rank decisions.
inline constexpr double kRankTolerance = 1e-10;

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m,
                  typename Derived::RealScalar tol = kHermitianTolerance) {
  if (m.rows() != m.cols()) return false;
  if (!m.allFinite()) return false;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i <= j; ++i) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    }
  }
  return true;
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& m,
                       typename Derived::RealScalar tol = kHermitianTolerance) {
  if (!is_hermitian(m, tol)) throw NotHermitian("operator is not Hermitian");
}

// (M + M^dagger) / 2
template <typename Derived>
Operator<typename Derived::RealScalar> hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::RealScalar;
  Operator<S> out = m;
  return (out + out.adjoint().eval()) * S(0.5);
}

template <typename Scalar>
struct Spectrum {
  RealVector<Scalar> eigenvalues;  // ascending
  Operator<Scalar> eigenvectors;   // orthonormal columns

  Operator<Scalar> reconstruct() const {
    return eigenvectors * eigenvalues.template cast<Complex<Scalar>>().asDiagonal() *
           eigenvectors.adjoint();
  }
};

namespace detail {

// Eigendecomposition of a matrix assumed Hermitian; only the lower triangle is read.
template <typename Derived>
Spectrum<typename Derived::RealScalar> eigh(const Eigen::MatrixBase<Derived>& h) {
  using S = typename Derived::RealScalar;
  Eigen::SelfAdjointEigenSolver<Operator<S>> solver(h.derived().eval());
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace detail

template <typename Derived>
Spectrum<typename Derived::RealScalar> eig_hermitian(const Eigen::MatrixBase<Derived>& h) {
  require_hermitian(h);
  return detail::eigh(h);
}

// Kronecker product a (x) b.
template <typename DerivedA, typename DerivedB>
Operator<typename DerivedA::RealScalar> tensor(const Eigen::MatrixBase<DerivedA>& a,
                                               const Eigen::MatrixBase<DerivedB>& b) {
  using S = typename DerivedA::RealScalar;
  const Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  Operator<S> out(ra * rb, ca * cb);
  for (Index i = 0; i < ra; ++i)
    for (Index j = 0; j < ca; ++j) out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

// Traces out subsystem `traced` of an operator on H_a (x) H_b.
template <typename Derived>
Operator<typename Derived::RealScalar> partial_trace(const Eigen::MatrixBase<Derived>& x,
                                                     Dims dims, Side traced) {
  using S = typename Derived::RealScalar;
  if (x.rows() != dims.total() || x.cols() != dims.total())
    throw DimensionMismatch("partial_trace: operator of size " + std::to_string(x.rows()) +
                            " does not match dims " + to_string(dims));
  if (traced == Side::b) {
    Operator<S> out = Operator<S>::Zero(dims.a, dims.a);
    for (Index i = 0; i < dims.a; ++i)
      for (Index j = 0; j < dims.a; ++j)
        out(i, j) = x.block(i * dims.b, j * dims.b, dims.b, dims.b).trace();
    return out;
  }
  Operator<S> out = Operator<S>::Zero(dims.b, dims.b);
  for (Index i = 0; i < dims.a; ++i) out += x.block(i * dims.b, i * dims.b, dims.b, dims.b);
  return out;
}

// Hilbert-Schmidt inner product tr(A^dagger B), real part. The imaginary part
// vanishes for Hermitian arguments.
template <typename DerivedA, typename DerivedB>
typename DerivedA::RealScalar hs_inner(const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("hs_inner: operand sizes differ");
  return a.conjugate().cwiseProduct(b).sum().real();
}

// Orthogonal Hermitian basis of the d x d Hermitian operators: sqrt(2/d) I
// followed by the generalized Gell-Mann matrices (symmetric, antisymmetric,
// diagonal). Every element has <B, B> = 2.
template <typename Scalar = double>
std::vector<Operator<Scalar>> hermitian_basis(Index d) {
  using C = Complex<Scalar>;
  if (d < 1) throw InvalidParameter("hermitian_basis: dimension must be positive");
  std::vector<Operator<Scalar>> basis;
  basis.reserve(static_cast<std::size_t>(d * d));
  basis.push_back(Operator<Scalar>::Identity(d, d) * C(std::sqrt(Scalar(2) / Scalar(d))));
  for (Index j = 0; j < d; ++j) {
    for (Index k = j + 1; k < d; ++k) {
      Operator<Scalar> sym = Operator<Scalar>::Zero(d, d);
      sym(j, k) = sym(k, j) = C(1);
      basis.push_back(std::move(sym));
      Operator<Scalar> anti = Operator<Scalar>::Zero(d, d);
      anti(j, k) = C(0, -1);
      anti(k, j) = C(0, 1);
      basis.push_back(std::move(anti));
    }
  }
  for (Index l = 1; l < d; ++l) {
    Operator<Scalar> diag = Operator<Scalar>::Zero(d, d);
    const Scalar scale = std::sqrt(Scalar(2) / Scalar(l * (l + 1)));
    for (Index j = 0; j < l; ++j) diag(j, j) = C(scale);
    diag(l, l) = C(-Scalar(l) * scale);
    basis.push_back(std::move(diag));
  }
  return basis;
}

// Projector onto the span of eigenvectors with eigenvalue > tol.
template <typename Derived>
Operator<typename Derived::RealScalar> support_projector(
    const Eigen::MatrixBase<Derived>& p, typename Derived::RealScalar tol = kRankTolerance) {
  using S = typename Derived::RealScalar;
  const auto spec = eig_hermitian(p);
  if (spec.eigenvalues.size() > 0 && spec.eigenvalues(0) < -tol)
    throw InvalidState("support_projector: operator has a negative eigenvalue");
  Operator<S> out = Operator<S>::Zero(p.rows(), p.cols());
  for (Index k = 0; k < spec.eigenvalues.size(); ++k) {
    if (spec.eigenvalues(k) > tol) {
      out.noalias() += spec.eigenvectors.col(k) * spec.eigenvectors.col(k).adjoint();
    }
  }
  return out;
}

// Orthonormal basis (columns) of the support, eigenvalue > tol.
template <typename Derived>
Operator<typename Derived::RealScalar> support_basis(
    const Eigen::MatrixBase<Derived>& p, typename Derived::RealScalar tol = kRankTolerance) {
  using S = typename Derived::RealScalar;
  const auto spec = detail::eigh(p);
  Index rank = 0;
  for (Index k = 0; k < spec.eigenvalues.size(); ++k)
    if (spec.eigenvalues(k) > tol) ++rank;
  Operator<S> out(p.rows(), rank);
  Index col = 0;
  for (Index k = 0; k < spec.eigenvalues.size(); ++k)
    if (spec.eigenvalues(k) > tol) out.col(col++) = spec.eigenvectors.col(k);
  return out;
}

// Largest singular value.
template <typename Derived>
typename Derived::RealScalar operator_norm(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::RealScalar;
  if (m.size() == 0) return S(0);
  Eigen::JacobiSVD<Operator<S>> svd(m.derived().eval());
  return svd.singularValues()(0);
}

// Half the trace norm of (a - b); both arguments Hermitian.
template <typename DerivedA, typename DerivedB>
typename DerivedA::RealScalar trace_distance(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("trace_distance: operand sizes differ");
  const auto spec = detail::eigh(hermitian_part(a - b));
  return spec.eigenvalues.cwiseAbs().sum() / 2;
}

template <typename DerivedA, typename DerivedB>
Operator<typename DerivedA::RealScalar> commutator(const Eigen::MatrixBase<DerivedA>& a,
                                                   const Eigen::MatrixBase<DerivedB>& b) {
  return a * b - b * a;
}

}  // namespace qcorr
