#pragma once

// Finite linear local-hidden-variable models.
//
// A model carries two finite event spaces, a joint probability table over
// their product and, per side, one kernel operator F_xi per event. Responses
// are Hilbert-Schmidt pairings f_xi(M) = <F_xi, M>, so the effect-to-response
// map is linear by construction. Measurable subsets are bitmasks over the
// events of one side (the sigma-algebra is always the power set).

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qcorr/errors.hpp"
#include "qcorr/operator_core.hpp"
#include "qcorr/random.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

// Largest singular value of the cross-Gram below which two supports count as orthogonal.
inline constexpr double kOrthogonalityTolerance = 1e-8;
// Trace distance below which two kernels count as equal.
inline constexpr double kKernelEqualityTolerance = 1e-8;
// Allowed deviation of a realizing effect's responses from 0/1.
inline constexpr double kIndicatorTolerance = 1e-10;
inline constexpr std::size_t kMaxTightnessEvents = 20;

using EventSubset = std::uint64_t;

class EventSpace {
 public:
  explicit EventSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw InvalidState("event space must be non-empty");
    if (labels_.size() > 64) throw InvalidParameter("event space limited to 64 events");
    const std::set<std::string> unique(labels_.begin(), labels_.end());
    if (unique.size() != labels_.size()) throw InvalidState("event labels must be distinct");
  }

  // Events labelled "0", "1", ...
  static EventSpace numbered(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return EventSpace(std::move(labels));
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  EventSubset full() const {
    return size() == 64 ? ~EventSubset{0} : (EventSubset{1} << size()) - 1;
  }

 private:
  std::vector<std::string> labels_;
};

inline std::vector<std::size_t> members(EventSubset subset) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; subset != 0; ++i, subset >>= 1)
    if (subset & 1) out.push_back(i);
  return out;
}

template <typename Scalar>
class JointMeasure {
 public:
  explicit JointMeasure(RealMatrix<Scalar> weights) : weights_(std::move(weights)) {
    if (weights_.size() == 0) throw InvalidState("joint measure is empty");
    if ((weights_.array() < Scalar(0)).any()) throw InvalidState("joint measure has negative weight");
    if (std::abs(weights_.sum() - Scalar(1)) > Scalar(1e-12))
      throw InvalidState("joint measure does not sum to 1");
  }

  const RealMatrix<Scalar>& weights() const { return weights_; }
  Scalar operator()(Index xi, Index eta) const { return weights_(xi, eta); }

 private:
  RealMatrix<Scalar> weights_;
};

template <typename Scalar>
class OperatorKernel {
 public:
  explicit OperatorKernel(std::vector<DensityMatrix<Scalar>> operators)
      : operators_(std::move(operators)) {
    if (operators_.empty()) throw InvalidState("kernel has no operators");
    for (const auto& f : operators_)
      if (f.dim() != operators_.front().dim())
        throw DimensionMismatch("kernel operators differ in dimension");
  }

  std::size_t size() const { return operators_.size(); }
  Index dim() const { return operators_.front().dim(); }
  const DensityMatrix<Scalar>& operator[](std::size_t xi) const { return operators_.at(xi); }
  const std::vector<DensityMatrix<Scalar>>& operators() const { return operators_; }

 private:
  std::vector<DensityMatrix<Scalar>> operators_;
};

template <typename Scalar>
class LinearLhvModel {
 public:
  LinearLhvModel(EventSpace omega_a, EventSpace omega_b, JointMeasure<Scalar> measure,
                 OperatorKernel<Scalar> kernel_a, OperatorKernel<Scalar> kernel_b)
      : omega_a_(std::move(omega_a)),
        omega_b_(std::move(omega_b)),
        measure_(std::move(measure)),
        kernel_a_(std::move(kernel_a)),
        kernel_b_(std::move(kernel_b)) {
    if (kernel_a_.size() != omega_a_.size() || kernel_b_.size() != omega_b_.size())
      throw DimensionMismatch("kernel lengths must match event-space sizes");
    if (static_cast<std::size_t>(measure_.weights().rows()) != omega_a_.size() ||
        static_cast<std::size_t>(measure_.weights().cols()) != omega_b_.size())
      throw DimensionMismatch("joint measure shape must match event spaces");
  }

  const EventSpace& events(Side s) const { return s == Side::a ? omega_a_ : omega_b_; }
  const OperatorKernel<Scalar>& kernel(Side s) const { return s == Side::a ? kernel_a_ : kernel_b_; }
  const JointMeasure<Scalar>& measure() const { return measure_; }
  Dims dims() const { return {kernel_a_.dim(), kernel_b_.dim()}; }

 private:
  EventSpace omega_a_;
  EventSpace omega_b_;
  JointMeasure<Scalar> measure_;
  OperatorKernel<Scalar> kernel_a_;
  OperatorKernel<Scalar> kernel_b_;
};

// f_xi(M) = <F_xi, M>
template <typename Scalar>
Scalar response(const OperatorKernel<Scalar>& kernel, std::size_t xi, const Effect<Scalar>& m) {
  if (m.dim() != kernel.dim()) throw DimensionMismatch("response: effect dimension mismatch");
  if (xi >= kernel.size()) throw InvalidParameter("response: event index out of range");
  return hs_inner(kernel[xi].matrix(), m.matrix());
}

// Recovers the unique operator F with <F, B_m> = values_m from its pairings
// with a complete orthogonal Hermitian basis.
template <typename Scalar>
Operator<Scalar> riesz_operator(const RealVector<Scalar>& values,
                                const std::vector<Operator<Scalar>>& basis) {
  if (basis.empty()) throw InvalidParameter("riesz_operator: empty basis");
  const Index d = basis.front().rows();
  if (static_cast<Index>(basis.size()) != d * d || values.size() != d * d)
    throw InvalidParameter("riesz_operator: basis is incomplete (need d^2 = " +
                           std::to_string(d * d) + " elements and values)");
  for (std::size_t m = 0; m < basis.size(); ++m)
    for (std::size_t n = m + 1; n < basis.size(); ++n)
      if (std::abs(hs_inner(basis[m], basis[n])) > Scalar(1e-12))
        throw InvalidParameter("riesz_operator: basis is not orthogonal");
  Operator<Scalar> f = Operator<Scalar>::Zero(d, d);
  for (std::size_t m = 0; m < basis.size(); ++m)
    f += Complex<Scalar>(values(static_cast<Index>(m)) / hs_inner(basis[m], basis[m])) * basis[m];
  return f;
}

// Omega_a = Omega_b = {0..n-1}, diagonal measure p_i, kernels rho^a_i and rho^b_i.
template <typename Scalar>
LinearLhvModel<Scalar> build_from_separable(const SeparableDecomposition<Scalar>& d) {
  const std::size_t n = d.size();
  RealMatrix<Scalar> w = RealMatrix<Scalar>::Zero(static_cast<Index>(n), static_cast<Index>(n));
  std::vector<DensityMatrix<Scalar>> ka, kb;
  for (std::size_t i = 0; i < n; ++i) {
    w(static_cast<Index>(i), static_cast<Index>(i)) = std::max(Scalar(0), d.weights()[i]);
    ka.push_back(d.pairs()[i].first);
    kb.push_back(d.pairs()[i].second);
  }
  w /= w.sum();
  return {EventSpace::numbered(n), EventSpace::numbered(n), JointMeasure<Scalar>(std::move(w)),
          OperatorKernel<Scalar>(std::move(ka)), OperatorKernel<Scalar>(std::move(kb))};
}

// Omega_a = {0..d_a-1}, Omega_b = {0..d_b-1}, measure p_ij, rank-1 projector kernels.
template <typename Scalar>
LinearLhvModel<Scalar> build_tight_from_cc(const CCDecomposition<Scalar>& d) {
  std::vector<DensityMatrix<Scalar>> ka, kb;
  for (Index i = 0; i < d.basis_a().size(); ++i)
    ka.push_back(DensityMatrix<Scalar>::pure(d.basis_a().vector(i)));
  for (Index j = 0; j < d.basis_b().size(); ++j)
    kb.push_back(DensityMatrix<Scalar>::pure(d.basis_b().vector(j)));
  RealMatrix<Scalar> w = d.weights().cwiseMax(Scalar(0));
  w /= w.sum();
  return {EventSpace::numbered(ka.size()), EventSpace::numbered(kb.size()),
          JointMeasure<Scalar>(std::move(w)), OperatorKernel<Scalar>(std::move(ka)),
          OperatorKernel<Scalar>(std::move(kb))};
}

// sum_{xi, eta} mu(xi, eta) f_xi(Ma) f_eta(Mb)
template <typename Scalar>
Scalar evaluate_joint(const LinearLhvModel<Scalar>& m, const Effect<Scalar>& ma,
                      const Effect<Scalar>& mb) {
  const Dims dims = m.dims();
  if (ma.dim() != dims.a || mb.dim() != dims.b)
    throw DimensionMismatch("evaluate_joint: effect dimensions do not match model");
  RealVector<Scalar> fa(static_cast<Index>(m.events(Side::a).size()));
  RealVector<Scalar> fb(static_cast<Index>(m.events(Side::b).size()));
  for (Index i = 0; i < fa.size(); ++i) fa(i) = response(m.kernel(Side::a), static_cast<std::size_t>(i), ma);
  for (Index j = 0; j < fb.size(); ++j) fb(j) = response(m.kernel(Side::b), static_cast<std::size_t>(j), mb);
  return fa.dot(m.measure().weights() * fb);
}

struct VerificationReport {
  double max_abs_deviation = 0.0;
  std::size_t samples = 0;
  bool vacuous = false;  // no samples were drawn
};

// Max over seeded random product effects of |evaluate_joint - tr(rho Ma (x) Mb)|.
template <typename Scalar>
VerificationReport verify_against_state(const LinearLhvModel<Scalar>& m,
                                        const BipartiteState<Scalar>& s, std::size_t n_samples,
                                        std::uint64_t seed) {
  const Dims dims = s.dims();
  if (m.dims() != dims)
    throw DimensionMismatch("model dims " + to_string(m.dims()) + " differ from state dims " +
                            to_string(dims));
  VerificationReport report;
  report.samples = n_samples;
  report.vacuous = n_samples == 0;
  Rng rng(seed);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const auto ma = random_effect<Scalar>(dims.a, rng);
    const auto mb = random_effect<Scalar>(dims.b, rng);
    const Scalar born = hs_inner(tensor(ma.matrix(), mb.matrix()), s.matrix());
    const Scalar dev = std::abs(evaluate_joint(m, ma, mb) - born);
    report.max_abs_deviation = std::max(report.max_abs_deviation, static_cast<double>(dev));
  }
  return report;
}

// rho = sum mu(xi, eta) F_xi (x) F_eta
template <typename Scalar>
BipartiteState<Scalar> reconstruct_state(const LinearLhvModel<Scalar>& m) {
  const Dims dims = m.dims();
  const auto& w = m.measure().weights();
  Operator<Scalar> rho = Operator<Scalar>::Zero(dims.total(), dims.total());
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j)
      if (w(i, j) != Scalar(0))
        rho += Complex<Scalar>(w(i, j)) *
               tensor(m.kernel(Side::a)[static_cast<std::size_t>(i)].matrix(),
                      m.kernel(Side::b)[static_cast<std::size_t>(j)].matrix());
  return {DensityMatrix<Scalar>(rho), dims};
}

// ---------------------------------------------------------------------------
// Tightness

namespace detail {

template <typename Scalar>
Operator<Scalar> kernel_sum(const OperatorKernel<Scalar>& k, EventSubset subset) {
  Operator<Scalar> sum = Operator<Scalar>::Zero(k.dim(), k.dim());
  for (const std::size_t xi : members(subset)) sum += k[xi].matrix();
  return sum;
}

template <typename Scalar>
bool supports_orthogonal(const Operator<Scalar>& x, const Operator<Scalar>& y) {
  const Operator<Scalar> vx = support_basis(x), vy = support_basis(y);
  if (vx.cols() == 0 || vy.cols() == 0) return true;
  return operator_norm(Operator<Scalar>(vx.adjoint() * vy)) < Scalar(kOrthogonalityTolerance);
}

}  // namespace detail

// Returns an effect M with <F_xi, M> = 1 on the subset and 0 off it, or
// nullopt when the subset's indicator has no quantum counterpart. The inside
// and outside joint supports must be orthogonal; the realizing effect is the
// projector onto the inside support (identity for the full set).
template <typename Scalar>
std::optional<Effect<Scalar>> indicator_realizable(const LinearLhvModel<Scalar>& m, Side side,
                                                   EventSubset subset) {
  const auto& kernel = m.kernel(side);
  const EventSubset full = m.events(side).full();
  if ((subset & ~full) != 0) throw InvalidParameter("subset contains unknown events");
  const Index d = kernel.dim();
  if (subset == full) return Effect<Scalar>::identity(d);
  if (subset == 0) return Effect<Scalar>::zero(d);

  const Operator<Scalar> inside = detail::kernel_sum(kernel, subset);
  const Operator<Scalar> outside = detail::kernel_sum(kernel, full & ~subset);
  if (!detail::supports_orthogonal(inside, outside)) return std::nullopt;

  Effect<Scalar> effect(support_projector(hermitian_part(inside)));
  for (std::size_t xi = 0; xi < kernel.size(); ++xi) {
    const Scalar target = (subset >> xi) & 1 ? Scalar(1) : Scalar(0);
    if (std::abs(response(kernel, xi, effect) - target) > Scalar(kIndicatorTolerance))
      return std::nullopt;
  }
  return effect;
}

// Pairwise criterion: every two kernels are equal or have orthogonal supports.
// Two distinct events carrying the same kernel pass here, yet neither singleton
// is realizable, so is_tight relies on the enumeration and reports both.
template <typename Scalar>
bool equal_or_orthogonal(const LinearLhvModel<Scalar>& m, Side side) {
  const auto& kernel = m.kernel(side);
  for (std::size_t i = 0; i < kernel.size(); ++i)
    for (std::size_t j = i + 1; j < kernel.size(); ++j) {
      const auto& fi = kernel[i].matrix();
      const auto& fj = kernel[j].matrix();
      if (trace_distance(fi, fj) < Scalar(kKernelEqualityTolerance)) continue;
      if (!detail::supports_orthogonal(fi, fj)) return false;
    }
  return true;
}

struct TightnessReport {
  Side side = Side::a;
  bool tight = false;
  std::vector<EventSubset> failing_subsets;  // ascending bitmask order
  bool pairwise_criterion = false;          // equal-or-orthogonal verdict

  bool consistent() const { return tight == pairwise_criterion; }
};

// Enumerates the full power set of one side's events and records every
// subset whose indicator is not realized by an effect.
template <typename Scalar>
TightnessReport is_tight(const LinearLhvModel<Scalar>& m, Side side) {
  const std::size_t n = m.events(side).size();
  if (n > kMaxTightnessEvents)
    throw InvalidParameter("tightness enumeration limited to " +
                           std::to_string(kMaxTightnessEvents) + " events, got " +
                           std::to_string(n));
  TightnessReport report;
  report.side = side;
  const EventSubset count = EventSubset{1} << n;
  for (EventSubset subset = 0; subset < count; ++subset)
    if (!indicator_realizable(m, side, subset)) report.failing_subsets.push_back(subset);
  report.tight = report.failing_subsets.empty();
  report.pairwise_criterion = equal_or_orthogonal(m, side);
  return report;
}

}  // namespace qcorr
