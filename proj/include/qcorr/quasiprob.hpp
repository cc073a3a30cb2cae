#pragma once

// Product-frame quasiprobability representations of bipartite states.
//
// A frame {F_k} is d^2 linearly independent density matrices on one
// subsystem. Its dual {G_k} satisfies A = sum_k <G_k, A> F_k, so every
// bipartite state expands as rho = sum_ij w_ij F_i (x) F_j with real weights
// w_ij = <G_i (x) G_j, rho> that sum to 1 but may be negative. Effect
// responses <F_k, M> are always in [0, 1], so any negativity is carried by the
// state.
//
// Separability does not imply non-negative weights in a fixed frame: a
// separable state admits some positive product representation (its own
// decomposition), not necessarily this one.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qcorr/errors.hpp"
#include "qcorr/operator_core.hpp"
#include "qcorr/random.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

// Frames whose Gram matrix condition number exceeds this are rejected.
inline constexpr double kMaxFrameCondition = 1e12;

template <typename Scalar>
class OperatorFrame {
 public:
  explicit OperatorFrame(std::vector<DensityMatrix<Scalar>> elements)
      : elements_(std::move(elements)) {
    if (elements_.empty()) throw InvalidState("frame has no elements");
    const Index d = elements_.front().dim();
    if (static_cast<Index>(elements_.size()) != d * d)
      throw InvalidState("frame on dimension " + std::to_string(d) + " needs " +
                         std::to_string(d * d) + " elements, got " +
                         std::to_string(elements_.size()));
    for (const auto& e : elements_)
      if (e.dim() != d) throw DimensionMismatch("frame elements differ in dimension");
    Eigen::SelfAdjointEigenSolver<RealMatrix<Scalar>> solver(gram());
    const auto& ev = solver.eigenvalues();
    if (!(ev(0) > 0) || ev(ev.size() - 1) / ev(0) > Scalar(kMaxFrameCondition))
      throw SingularFrame("frame elements are not linearly independent");
  }

  Index dim() const { return elements_.front().dim(); }
  std::size_t size() const { return elements_.size(); }
  const DensityMatrix<Scalar>& operator[](std::size_t k) const { return elements_.at(k); }
  const std::vector<DensityMatrix<Scalar>>& elements() const { return elements_; }

  // Gamma_lk = <F_l, F_k>
  RealMatrix<Scalar> gram() const {
    const Index n = static_cast<Index>(elements_.size());
    RealMatrix<Scalar> g(n, n);
    for (Index l = 0; l < n; ++l)
      for (Index k = 0; k < n; ++k)
        g(l, k) = hs_inner(elements_[static_cast<std::size_t>(l)].matrix(),
                           elements_[static_cast<std::size_t>(k)].matrix());
    return g;
  }

 private:
  std::vector<DensityMatrix<Scalar>> elements_;
};

template <typename Scalar>
struct DualFrame {
  std::vector<Operator<Scalar>> elements;
};

template <typename Scalar>
struct QuasiMeasure {
  RealMatrix<Scalar> weights;  // rows index frame_a, columns frame_b

  Scalar total() const { return weights.sum(); }
  Scalar min_weight() const { return weights.minCoeff(); }
};

// Projectors onto the four tetrahedral Bloch directions.
template <typename Scalar = double>
OperatorFrame<Scalar> qubit_sic_frame() {
  const auto sigma = [] {
    using C = Complex<Scalar>;
    Operator<Scalar> x(2, 2), y(2, 2), z(2, 2);
    x << C(0), C(1), C(1), C(0);
    y << C(0), C(0, -1), C(0, 1), C(0);
    z << C(1), C(0), C(0), C(-1);
    return std::vector<Operator<Scalar>>{x, y, z};
  }();
  const Scalar r = Scalar(1) / std::sqrt(Scalar(3));
  const Scalar dirs[4][3] = {{r, r, r}, {r, -r, -r}, {-r, r, -r}, {-r, -r, r}};
  std::vector<DensityMatrix<Scalar>> elements;
  for (const auto& n : dirs) {
    Operator<Scalar> p = Operator<Scalar>::Identity(2, 2);
    for (int u = 0; u < 3; ++u) p += Complex<Scalar>(n[u]) * sigma[static_cast<std::size_t>(u)];
    elements.emplace_back(Operator<Scalar>(p / Complex<Scalar>(2)));
  }
  return OperatorFrame<Scalar>(std::move(elements));
}

// G_k = sum_l (Gamma^-1)_kl F_l
template <typename Scalar>
DualFrame<Scalar> dual_frame(const OperatorFrame<Scalar>& f) {
  const RealMatrix<Scalar> g = f.gram();
  Eigen::FullPivLU<RealMatrix<Scalar>> lu(g);
  if (!lu.isInvertible()) throw SingularFrame("frame Gram matrix is singular");
  const RealMatrix<Scalar> inv = lu.inverse();
  DualFrame<Scalar> dual;
  const Index n = static_cast<Index>(f.size());
  for (Index k = 0; k < n; ++k) {
    Operator<Scalar> gk = Operator<Scalar>::Zero(f.dim(), f.dim());
    for (Index l = 0; l < n; ++l)
      gk += Complex<Scalar>(inv(k, l)) * f[static_cast<std::size_t>(l)].matrix();
    dual.elements.push_back(hermitian_part(gk));
  }
  return dual;
}

// w_ij = <G_i (x) G_j, rho>
template <typename Scalar>
QuasiMeasure<Scalar> represent_state(const BipartiteState<Scalar>& s,
                                     const OperatorFrame<Scalar>& fa,
                                     const OperatorFrame<Scalar>& fb) {
  if (fa.dim() != s.dims().a || fb.dim() != s.dims().b)
    throw DimensionMismatch("frame dimensions do not match state dims " + to_string(s.dims()));
  const auto ga = dual_frame(fa), gb = dual_frame(fb);
  QuasiMeasure<Scalar> q{RealMatrix<Scalar>(static_cast<Index>(fa.size()),
                                            static_cast<Index>(fb.size()))};
  for (std::size_t i = 0; i < fa.size(); ++i)
    for (std::size_t j = 0; j < fb.size(); ++j)
      q.weights(static_cast<Index>(i), static_cast<Index>(j)) =
          hs_inner(tensor(ga.elements[i], gb.elements[j]), s.matrix());
  return q;
}

// sum_ij w_ij F_i (x) F_j
template <typename Scalar>
Operator<Scalar> reconstruct_from_quasi(const QuasiMeasure<Scalar>& q,
                                        const OperatorFrame<Scalar>& fa,
                                        const OperatorFrame<Scalar>& fb) {
  const Index n = fa.dim() * fb.dim();
  Operator<Scalar> rho = Operator<Scalar>::Zero(n, n);
  for (std::size_t i = 0; i < fa.size(); ++i)
    for (std::size_t j = 0; j < fb.size(); ++j)
      rho += Complex<Scalar>(q.weights(static_cast<Index>(i), static_cast<Index>(j))) *
             tensor(fa[i].matrix(), fb[j].matrix());
  return rho;
}

// f_k = <F_k, M>
template <typename Scalar>
RealVector<Scalar> represent_effect(const Effect<Scalar>& m, const OperatorFrame<Scalar>& f) {
  if (m.dim() != f.dim()) throw DimensionMismatch("effect dimension does not match frame");
  RealVector<Scalar> out(static_cast<Index>(f.size()));
  for (std::size_t k = 0; k < f.size(); ++k)
    out(static_cast<Index>(k)) = hs_inner(f[k].matrix(), m.matrix());
  return out;
}

// Max over seeded random product effects of
// |sum_ij w_ij f_i(Ma) f_j(Mb) - tr(rho Ma (x) Mb)|.
template <typename Scalar>
Scalar born_check(const BipartiteState<Scalar>& s, const OperatorFrame<Scalar>& fa,
                  const OperatorFrame<Scalar>& fb, std::size_t n_samples, std::uint64_t seed) {
  const auto q = represent_state(s, fa, fb);
  Rng rng(seed);
  Scalar worst = 0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const auto ma = random_effect<Scalar>(s.dims().a, rng);
    const auto mb = random_effect<Scalar>(s.dims().b, rng);
    const Scalar quasi = represent_effect(ma, fa).dot(q.weights * represent_effect(mb, fb));
    const Scalar born = hs_inner(tensor(ma.matrix(), mb.matrix()), s.matrix());
    worst = std::max(worst, std::abs(quasi - born));
  }
  return worst;
}

// Total-variation excess sum |w| - 1; zero iff every weight is non-negative.
// With sum w = 1 this equals twice the total negative mass, which is how it is
// evaluated so that non-negative tables give exactly 0.
template <typename Scalar>
Scalar negativity(const QuasiMeasure<Scalar>& q) {
  return -2 * q.weights.cwiseMin(Scalar(0)).sum();
}

}  // namespace qcorr
