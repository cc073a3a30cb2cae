#pragma once

// Validated state and measurement types, named test-family constructors,
// seeded random instances and the partial-transpose separability test.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qcorr/errors.hpp"
#include "qcorr/operator_core.hpp"
#include "qcorr/random.hpp"

namespace qcorr {

// PSD and unit-trace tolerance on construction.
inline constexpr double kStateTolerance = 1e-10;
// Probability weights: negativity floor and normalization tolerance.
inline constexpr double kWeightTolerance = 1e-10;

struct Validity {
  bool square = false;
  bool hermitian = false;
  bool unit_trace = false;
  bool psd = false;
  double trace = 0.0;
  double min_eigenvalue = 0.0;

  bool ok() const { return square && hermitian && unit_trace && psd; }
};

template <typename Derived>
Validity check_density(const Eigen::MatrixBase<Derived>& m,
                       typename Derived::RealScalar tol = kStateTolerance) {
  Validity v;
  v.square = m.rows() == m.cols() && m.rows() > 0;
  if (!v.square) return v;
  v.hermitian = is_hermitian(m, tol);
  if (!v.hermitian) return v;
  const auto h = hermitian_part(m);
  v.trace = static_cast<double>(h.trace().real());
  v.unit_trace = std::abs(v.trace - 1.0) <= tol;
  v.min_eigenvalue = static_cast<double>(detail::eigh(h).eigenvalues(0));
  v.psd = v.min_eigenvalue >= -tol;
  return v;
}

// Positive semidefinite, unit-trace Hermitian operator. The stored matrix is
// exactly Hermitian and exactly normalized.
template <typename Scalar>
class DensityMatrix {
 public:
  explicit DensityMatrix(const Operator<Scalar>& rho, Scalar tol = kStateTolerance) {
    const Validity v = check_density(rho, tol);
    if (!v.square) throw InvalidState("density matrix must be square and non-empty");
    if (!v.hermitian) throw InvalidState("density matrix is not Hermitian");
    if (!v.unit_trace)
      throw InvalidState("density matrix trace " + std::to_string(v.trace) + " is not 1");
    if (!v.psd)
      throw InvalidState("density matrix has negative eigenvalue " +
                         std::to_string(v.min_eigenvalue));
    rho_ = hermitian_part(rho);
    rho_ /= rho_.trace().real();
  }

  static DensityMatrix pure(const StateVector<Scalar>& psi) {
    const Scalar n = psi.norm();
    if (n == Scalar(0)) throw InvalidState("pure state from zero vector");
    const StateVector<Scalar> u = psi / n;
    return DensityMatrix(Operator<Scalar>(u * u.adjoint()));
  }

  static DensityMatrix maximally_mixed(Index d) {
    return DensityMatrix(Operator<Scalar>(Operator<Scalar>::Identity(d, d) / Complex<Scalar>(d)));
  }

  const Operator<Scalar>& matrix() const { return rho_; }
  Index dim() const { return rho_.rows(); }
  Scalar purity() const { return hs_inner(rho_, rho_); }

 private:
  Operator<Scalar> rho_;
};

// Hermitian operator with spectrum in [0, 1].
template <typename Scalar>
class Effect {
 public:
  explicit Effect(const Operator<Scalar>& m, Scalar tol = kStateTolerance) {
    if (m.rows() != m.cols() || m.rows() == 0) throw InvalidState("effect must be square");
    if (!is_hermitian(m, tol)) throw InvalidState("effect is not Hermitian");
    op_ = hermitian_part(m);
    const auto ev = detail::eigh(op_).eigenvalues;
    if (ev(0) < -tol || ev(ev.size() - 1) > Scalar(1) + tol)
      throw InvalidState("effect spectrum leaves [0, 1]");
  }

  static Effect identity(Index d) { return Effect(Operator<Scalar>::Identity(d, d)); }
  static Effect zero(Index d) { return Effect(Operator<Scalar>::Zero(d, d)); }

  const Operator<Scalar>& matrix() const { return op_; }
  Index dim() const { return op_.rows(); }

 private:
  Operator<Scalar> op_;
};

// Complete set of rank-1 orthogonal projectors, stored as the columns of a
// unitary: projector(i) = |v_i><v_i|.
template <typename Scalar>
class ProjectiveBasis {
 public:
  explicit ProjectiveBasis(const Operator<Scalar>& unitary, Scalar tol = kStateTolerance)
      : vectors_(unitary) {
    const Index d = unitary.rows();
    if (d == 0 || unitary.cols() != d) throw InvalidState("basis matrix must be square");
    if (!(unitary.adjoint() * unitary - Operator<Scalar>::Identity(d, d)).isZero(tol))
      throw InvalidState("basis vectors are not orthonormal");
  }

  static ProjectiveBasis computational(Index d) {
    return ProjectiveBasis(Operator<Scalar>::Identity(d, d));
  }

  // Qubit basis {|n+>, |n->} for Bloch direction (theta, phi).
  static ProjectiveBasis bloch(Scalar theta, Scalar phi) {
    using C = Complex<Scalar>;
    const Scalar c = std::cos(theta / 2), s = std::sin(theta / 2);
    const C phase = std::polar(Scalar(1), phi);
    Operator<Scalar> u(2, 2);
    u << C(c), C(-s), phase * s, phase * c;
    return ProjectiveBasis(u);
  }

  // Accepts any list of operators forming a complete orthogonal rank-1
  // resolution of the identity.
  static ProjectiveBasis from_projectors(const std::vector<Operator<Scalar>>& projectors,
                                         Scalar tol = kStateTolerance) {
    if (projectors.empty()) throw InvalidState("empty projector list");
    const Index d = projectors.front().rows();
    if (static_cast<Index>(projectors.size()) != d)
      throw InvalidState("need " + std::to_string(d) + " projectors, got " +
                         std::to_string(projectors.size()));
    Operator<Scalar> u(d, d);
    Operator<Scalar> sum = Operator<Scalar>::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
      const auto& p = projectors[static_cast<std::size_t>(i)];
      if (p.rows() != d || p.cols() != d) throw InvalidState("projector dimension mismatch");
      if (!is_hermitian(p, tol)) throw InvalidState("projector is not Hermitian");
      if (!(p * p - p).isZero(tol * 10)) throw InvalidState("operator is not a projector");
      const auto spec = detail::eigh(hermitian_part(p));
      if (std::abs(spec.eigenvalues(d - 1) - Scalar(1)) > tol * 10 ||
          (d > 1 && std::abs(spec.eigenvalues(d - 2)) > tol * 10))
        throw InvalidState("projector is not rank 1");
      u.col(i) = spec.eigenvectors.col(d - 1);
      sum += p;
    }
    if (!(sum - Operator<Scalar>::Identity(d, d)).isZero(tol * 10))
      throw InvalidState("projectors do not sum to the identity");
    return ProjectiveBasis(u, tol * 10);
  }

  Index size() const { return vectors_.cols(); }
  Index dim() const { return vectors_.rows(); }
  const Operator<Scalar>& vectors() const { return vectors_; }
  StateVector<Scalar> vector(Index i) const { return vectors_.col(i); }
  Operator<Scalar> projector(Index i) const {
    return vectors_.col(i) * vectors_.col(i).adjoint();
  }
  std::vector<Operator<Scalar>> projectors() const {
    std::vector<Operator<Scalar>> out;
    for (Index i = 0; i < size(); ++i) out.push_back(projector(i));
    return out;
  }

 private:
  Operator<Scalar> vectors_;
};

template <typename Scalar>
class Povm {
 public:
  explicit Povm(std::vector<Effect<Scalar>> effects, Scalar tol = kStateTolerance)
      : effects_(std::move(effects)) {
    if (effects_.empty()) throw InvalidState("POVM has no effects");
    const Index d = effects_.front().dim();
    Operator<Scalar> sum = Operator<Scalar>::Zero(d, d);
    for (const auto& e : effects_) {
      if (e.dim() != d) throw DimensionMismatch("POVM effects differ in dimension");
      sum += e.matrix();
    }
    if (!(sum - Operator<Scalar>::Identity(d, d)).isZero(tol))
      throw InvalidState("POVM effects do not sum to the identity");
  }

  static Povm from_basis(const ProjectiveBasis<Scalar>& basis) {
    std::vector<Effect<Scalar>> effects;
    for (Index i = 0; i < basis.size(); ++i) effects.emplace_back(basis.projector(i));
    return Povm(std::move(effects));
  }

  const std::vector<Effect<Scalar>>& effects() const { return effects_; }
  std::size_t size() const { return effects_.size(); }
  Index dim() const { return effects_.front().dim(); }

 private:
  std::vector<Effect<Scalar>> effects_;
};

template <typename Scalar>
class BipartiteState {
 public:
  BipartiteState(DensityMatrix<Scalar> rho, Dims dims) : rho_(std::move(rho)), dims_(dims) {
    if (dims.a < 1 || dims.b < 1) throw InvalidState("subsystem dimensions must be positive");
    if (rho_.dim() != dims.total())
      throw DimensionMismatch("density matrix of size " + std::to_string(rho_.dim()) +
                              " does not match dims " + to_string(dims));
  }

  const DensityMatrix<Scalar>& rho() const { return rho_; }
  const Operator<Scalar>& matrix() const { return rho_.matrix(); }
  Dims dims() const { return dims_; }

  // Reduced state of subsystem `kept`.
  DensityMatrix<Scalar> marginal(Side kept) const {
    return DensityMatrix<Scalar>(partial_trace(rho_.matrix(), dims_, other(kept)));
  }

 private:
  DensityMatrix<Scalar> rho_;
  Dims dims_;
};

namespace detail {

template <typename Scalar, typename Container>
void check_probabilities(const Container& w, const char* what) {
  Scalar total = 0;
  for (const Scalar x : w) {
    if (!(x >= -Scalar(kWeightTolerance)))
      throw InvalidState(std::string(what) + ": negative weight");
    total += x;
  }
  if (std::abs(total - Scalar(1)) > Scalar(kWeightTolerance))
    throw InvalidState(std::string(what) + ": weights do not sum to 1");
}

}  // namespace detail

// rho = sum_i p_i rho^a_i (x) rho^b_i
template <typename Scalar>
class SeparableDecomposition {
 public:
  using Pair = std::pair<DensityMatrix<Scalar>, DensityMatrix<Scalar>>;

  SeparableDecomposition(std::vector<Scalar> weights, std::vector<Pair> pairs)
      : weights_(std::move(weights)), pairs_(std::move(pairs)) {
    if (pairs_.empty()) throw InvalidState("separable decomposition has no terms");
    if (weights_.size() != pairs_.size())
      throw InvalidState("separable decomposition: weight and pair counts differ");
    detail::check_probabilities<Scalar>(weights_, "separable decomposition");
    dims_ = {pairs_.front().first.dim(), pairs_.front().second.dim()};
    for (const auto& [ra, rb] : pairs_)
      if (ra.dim() != dims_.a || rb.dim() != dims_.b)
        throw DimensionMismatch("separable decomposition: inconsistent term dimensions");
  }

  const std::vector<Scalar>& weights() const { return weights_; }
  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  Dims dims() const { return dims_; }

 private:
  std::vector<Scalar> weights_;
  std::vector<Pair> pairs_;
  Dims dims_;
};

// rho = sum_i p_i Pi_i (x) rho_i with {Pi_i} a projective basis on the
// classical side and rho_i conditional states on the other side.
template <typename Scalar>
class CQDecomposition {
 public:
  CQDecomposition(Side classical_side, std::vector<Scalar> weights,
                  ProjectiveBasis<Scalar> basis, std::vector<DensityMatrix<Scalar>> conditionals)
      : side_(classical_side),
        weights_(std::move(weights)),
        basis_(std::move(basis)),
        conditionals_(std::move(conditionals)) {
    if (static_cast<Index>(weights_.size()) != basis_.size() ||
        conditionals_.size() != weights_.size())
      throw InvalidState("classical-quantum decomposition: size mismatch");
    detail::check_probabilities<Scalar>(weights_, "classical-quantum decomposition");
    for (const auto& c : conditionals_)
      if (c.dim() != conditionals_.front().dim())
        throw DimensionMismatch("classical-quantum decomposition: conditional dimensions differ");
  }

  Side classical_side() const { return side_; }
  const std::vector<Scalar>& weights() const { return weights_; }
  const ProjectiveBasis<Scalar>& basis() const { return basis_; }
  const std::vector<DensityMatrix<Scalar>>& conditionals() const { return conditionals_; }
  Dims dims() const {
    const Index q = conditionals_.front().dim();
    return side_ == Side::a ? Dims{basis_.dim(), q} : Dims{q, basis_.dim()};
  }

 private:
  Side side_;
  std::vector<Scalar> weights_;
  ProjectiveBasis<Scalar> basis_;
  std::vector<DensityMatrix<Scalar>> conditionals_;
};

// rho = sum_ij p_ij Pi^a_i (x) Pi^b_j
template <typename Scalar>
class CCDecomposition {
 public:
  CCDecomposition(RealMatrix<Scalar> weights, ProjectiveBasis<Scalar> basis_a,
                  ProjectiveBasis<Scalar> basis_b)
      : weights_(std::move(weights)), basis_a_(std::move(basis_a)), basis_b_(std::move(basis_b)) {
    if (weights_.rows() != basis_a_.size() || weights_.cols() != basis_b_.size())
      throw InvalidState("classical-classical decomposition: weight table shape mismatch");
    detail::check_probabilities<Scalar>(weights_.reshaped(), "classical-classical decomposition");
  }

  const RealMatrix<Scalar>& weights() const { return weights_; }
  const ProjectiveBasis<Scalar>& basis_a() const { return basis_a_; }
  const ProjectiveBasis<Scalar>& basis_b() const { return basis_b_; }
  Dims dims() const { return {basis_a_.dim(), basis_b_.dim()}; }

 private:
  RealMatrix<Scalar> weights_;
  ProjectiveBasis<Scalar> basis_a_;
  ProjectiveBasis<Scalar> basis_b_;
};

// ---------------------------------------------------------------------------
// Named states

// k = 0: Phi+, 1: Phi-, 2: Psi+, 3: Psi-.
template <typename Scalar = double>
BipartiteState<Scalar> bell_state(int k) {
  using C = Complex<Scalar>;
  if (k < 0 || k > 3) throw InvalidParameter("bell_state index must be in 0..3");
  StateVector<Scalar> psi = StateVector<Scalar>::Zero(4);
  const Scalar sign = (k % 2 == 0) ? Scalar(1) : Scalar(-1);
  if (k < 2) {
    psi(0) = C(1);
    psi(3) = C(sign);
  } else {
    psi(1) = C(1);
    psi(2) = C(sign);
  }
  return {DensityMatrix<Scalar>::pure(psi), Dims{2, 2}};
}

// p |psi-><psi-| + (1 - p) I/4
template <typename Scalar = double>
BipartiteState<Scalar> werner(Scalar p) {
  if (!(p >= 0 && p <= 1)) throw InvalidParameter("werner: p must lie in [0, 1]");
  const Operator<Scalar> singlet = bell_state<Scalar>(3).matrix();
  Operator<Scalar> rho = Complex<Scalar>(p) * singlet +
                         Complex<Scalar>((1 - p) / 4) * Operator<Scalar>::Identity(4, 4);
  return {DensityMatrix<Scalar>(rho), Dims{2, 2}};
}

// (|0><0| (x) |0><0| + |+><+| (x) |1><1|) / 2: classical on b, not on a.
template <typename Scalar = double>
SeparableDecomposition<Scalar> asymmetric_decomposition() {
  using C = Complex<Scalar>;
  StateVector<Scalar> zero(2), one(2), plus(2);
  zero << C(1), C(0);
  one << C(0), C(1);
  plus << C(1), C(1);
  using DM = DensityMatrix<Scalar>;
  std::vector<typename SeparableDecomposition<Scalar>::Pair> pairs;
  pairs.emplace_back(DM::pure(zero), DM::pure(zero));
  pairs.emplace_back(DM::pure(plus), DM::pure(one));
  return {{Scalar(0.5), Scalar(0.5)}, std::move(pairs)};
}

template <typename Scalar>
BipartiteState<Scalar> from_separable_decomposition(const SeparableDecomposition<Scalar>& d) {
  const Dims dims = d.dims();
  Operator<Scalar> rho = Operator<Scalar>::Zero(dims.total(), dims.total());
  for (std::size_t i = 0; i < d.size(); ++i)
    rho += Complex<Scalar>(d.weights()[i]) *
           tensor(d.pairs()[i].first.matrix(), d.pairs()[i].second.matrix());
  return {DensityMatrix<Scalar>(rho), dims};
}

template <typename Scalar = double>
BipartiteState<Scalar> asymmetric_state() {
  return from_separable_decomposition(asymmetric_decomposition<Scalar>());
}

template <typename Scalar>
BipartiteState<Scalar> from_cc_decomposition(const CCDecomposition<Scalar>& d) {
  const Dims dims = d.dims();
  Operator<Scalar> rho = Operator<Scalar>::Zero(dims.total(), dims.total());
  for (Index i = 0; i < dims.a; ++i) {
    const Operator<Scalar> pa = d.basis_a().projector(i);
    for (Index j = 0; j < dims.b; ++j)
      rho += Complex<Scalar>(d.weights()(i, j)) * tensor(pa, d.basis_b().projector(j));
  }
  return {DensityMatrix<Scalar>(rho), dims};
}

template <typename Scalar>
BipartiteState<Scalar> from_cq_decomposition(const CQDecomposition<Scalar>& d) {
  const Dims dims = d.dims();
  Operator<Scalar> rho = Operator<Scalar>::Zero(dims.total(), dims.total());
  for (Index i = 0; i < d.basis().size(); ++i) {
    const Complex<Scalar> w(d.weights()[static_cast<std::size_t>(i)]);
    const auto& cond = d.conditionals()[static_cast<std::size_t>(i)].matrix();
    rho += d.classical_side() == Side::a ? Operator<Scalar>(w * tensor(d.basis().projector(i), cond))
                                         : Operator<Scalar>(w * tensor(cond, d.basis().projector(i)));
  }
  return {DensityMatrix<Scalar>(rho), dims};
}

// ---------------------------------------------------------------------------
// Partial transpose and PPT test

template <typename Derived>
Operator<typename Derived::RealScalar> partial_transpose(const Eigen::MatrixBase<Derived>& x,
                                                         Dims dims, Side side) {
  using S = typename Derived::RealScalar;
  if (x.rows() != dims.total() || x.cols() != dims.total())
    throw DimensionMismatch("partial_transpose: operator does not match dims");
  Operator<S> out(x.rows(), x.cols());
  for (Index i = 0; i < dims.a; ++i) {
    for (Index j = 0; j < dims.a; ++j) {
      if (side == Side::a)
        out.block(i * dims.b, j * dims.b, dims.b, dims.b) =
            x.block(j * dims.b, i * dims.b, dims.b, dims.b);
      else
        out.block(i * dims.b, j * dims.b, dims.b, dims.b) =
            x.block(i * dims.b, j * dims.b, dims.b, dims.b).transpose();
    }
  }
  return out;
}

template <typename Scalar>
Operator<Scalar> partial_transpose(const BipartiteState<Scalar>& s, Side side) {
  return partial_transpose(s.matrix(), s.dims(), side);
}

enum class Entanglement { entangled, separable, inconclusive };

inline const char* to_string(Entanglement e) {
  switch (e) {
    case Entanglement::entangled: return "true";
    case Entanglement::separable: return "false";
    case Entanglement::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct PptResult {
  double min_eigenvalue = 0.0;
  bool npt = false;         // partial transpose has an eigenvalue below -tol
  bool conclusive = false;  // PPT is necessary and sufficient at these dims

  // NPT always certifies entanglement; PPT certifies separability only for
  // d_a * d_b <= 6.
  Entanglement verdict() const {
    if (npt) return Entanglement::entangled;
    return conclusive ? Entanglement::separable : Entanglement::inconclusive;
  }
};

template <typename Scalar>
PptResult ppt_test(const BipartiteState<Scalar>& s, Scalar tol = kStateTolerance) {
  PptResult r;
  r.min_eigenvalue =
      static_cast<double>(detail::eigh(partial_transpose(s, Side::b)).eigenvalues(0));
  r.npt = r.min_eigenvalue < -static_cast<double>(tol);
  const Dims d = s.dims();
  r.conclusive = d.a == 1 || d.b == 1 || d.total() <= 6;
  return r;
}

// True iff the partial transpose has an eigenvalue < -tol. A false answer
// certifies separability only when ppt_test(...).conclusive holds.
template <typename Scalar>
bool is_entangled_ppt(const BipartiteState<Scalar>& s, Scalar tol = kStateTolerance) {
  return ppt_test(s, tol).npt;
}

// ---------------------------------------------------------------------------
// Seeded random instances

template <typename Scalar = double>
Operator<Scalar> ginibre(Index rows, Index cols, Rng& rng) {
  Operator<Scalar> g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const Scalar re = static_cast<Scalar>(rng.normal());
      const Scalar im = static_cast<Scalar>(rng.normal());
      g(i, j) = Complex<Scalar>(re, im);
    }
  return g;
}

// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
// diagonal absorbed into Q.
template <typename Scalar = double>
Operator<Scalar> random_unitary(Index d, Rng& rng) {
  const Operator<Scalar> g = ginibre<Scalar>(d, d, rng);
  Eigen::HouseholderQR<Operator<Scalar>> qr(g);
  Operator<Scalar> q = qr.householderQ();
  const Operator<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    const Scalar mag = std::abs(r(k, k));
    if (mag > 0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

template <typename Scalar = double>
DensityMatrix<Scalar> random_density(Index d, Rng& rng) {
  if (d < 1) throw InvalidParameter("random_density: dimension must be positive");
  const Operator<Scalar> g = ginibre<Scalar>(d, d, rng);
  Operator<Scalar> rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix<Scalar>(rho);
}

template <typename Scalar = double>
DensityMatrix<Scalar> random_density(Index d, std::uint64_t seed) {
  Rng rng(seed);
  return random_density<Scalar>(d, rng);
}

template <typename Scalar = double>
DensityMatrix<Scalar> random_pure(Index d, Rng& rng) {
  return DensityMatrix<Scalar>::pure(ginibre<Scalar>(d, 1, rng));
}

template <typename Scalar = double>
Effect<Scalar> random_effect(Index d, Rng& rng) {
  if (d < 1) throw InvalidParameter("random_effect: dimension must be positive");
  const Operator<Scalar> u = random_unitary<Scalar>(d, rng);
  RealVector<Scalar> lambda(d);
  for (Index k = 0; k < d; ++k) lambda(k) = static_cast<Scalar>(rng.uniform());
  return Effect<Scalar>(u * lambda.template cast<Complex<Scalar>>().asDiagonal() * u.adjoint());
}

template <typename Scalar = double>
Effect<Scalar> random_effect(Index d, std::uint64_t seed) {
  Rng rng(seed);
  return random_effect<Scalar>(d, rng);
}

template <typename Scalar = double>
ProjectiveBasis<Scalar> random_projective_basis(Index d, Rng& rng) {
  if (d < 1) throw InvalidParameter("random_projective_basis: dimension must be positive");
  return ProjectiveBasis<Scalar>(random_unitary<Scalar>(d, rng));
}

template <typename Scalar = double>
ProjectiveBasis<Scalar> random_projective_basis(Index d, std::uint64_t seed) {
  Rng rng(seed);
  return random_projective_basis<Scalar>(d, rng);
}

template <typename Scalar = double>
std::vector<Scalar> random_probabilities(std::size_t n, Rng& rng) {
  std::vector<Scalar> w(n);
  Scalar total = 0;
  for (auto& x : w) {
    x = static_cast<Scalar>(0.05 + rng.uniform());
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

template <typename Scalar = double>
CCDecomposition<Scalar> random_cc_decomposition(Dims dims, Rng& rng) {
  const auto flat = random_probabilities<Scalar>(static_cast<std::size_t>(dims.total()), rng);
  RealMatrix<Scalar> w(dims.a, dims.b);
  for (Index i = 0; i < dims.a; ++i)
    for (Index j = 0; j < dims.b; ++j) w(i, j) = flat[static_cast<std::size_t>(i * dims.b + j)];
  auto basis_a = random_projective_basis<Scalar>(dims.a, rng);
  auto basis_b = random_projective_basis<Scalar>(dims.b, rng);
  return {std::move(w), std::move(basis_a), std::move(basis_b)};
}

template <typename Scalar = double>
SeparableDecomposition<Scalar> random_separable_decomposition(Dims dims, std::size_t terms,
                                                              Rng& rng) {
  if (terms == 0) throw InvalidParameter("separable decomposition needs at least one term");
  auto w = random_probabilities<Scalar>(terms, rng);
  std::vector<typename SeparableDecomposition<Scalar>::Pair> pairs;
  for (std::size_t i = 0; i < terms; ++i) {
    auto ra = random_density<Scalar>(dims.a, rng);
    auto rb = random_density<Scalar>(dims.b, rng);
    pairs.emplace_back(std::move(ra), std::move(rb));
  }
  return {std::move(w), std::move(pairs)};
}

}  // namespace qcorr
