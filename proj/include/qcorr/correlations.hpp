#pragma once

// Entropic correlation measures, the qubit discord optimizer and the
// algebraic zero-discord certificate with decomposition extraction.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "qcorr/errors.hpp"
#include "qcorr/operator_core.hpp"
#include "qcorr/random.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

// Eigenvalues at or below this are treated as exact zeros in entropies.
inline constexpr double kEntropyCutoff = 1e-14;
// Branches of a post-measurement ensemble below this probability are dropped.
inline constexpr double kBranchCutoff = 1e-12;
// Operator-norm bound on [A_m, A_n] for the classical-quantum certificate.
inline constexpr double kCommutatorTolerance = 1e-9;
// Trace-distance bound when verifying an extracted decomposition.
inline constexpr double kReconstructionTolerance = 1e-10;

template <typename Scalar>
Scalar entropy_bits(const RealVector<Scalar>& eigenvalues) {
  Scalar h = 0;
  for (Index k = 0; k < eigenvalues.size(); ++k) {
    const Scalar l = eigenvalues(k);
    if (l > Scalar(kEntropyCutoff)) h -= l * std::log2(l);
  }
  return h;
}

template <typename Derived>
typename Derived::RealScalar von_neumann_entropy(const Eigen::MatrixBase<Derived>& rho) {
  return entropy_bits(detail::eigh(rho).eigenvalues);
}

template <typename Scalar>
Scalar von_neumann_entropy(const DensityMatrix<Scalar>& rho) {
  return von_neumann_entropy(rho.matrix());
}

// I(a:b) = S(rho_a) + S(rho_b) - S(rho_ab), in bits.
template <typename Scalar>
Scalar mutual_information(const BipartiteState<Scalar>& s) {
  const Scalar sa = von_neumann_entropy(partial_trace(s.matrix(), s.dims(), Side::b));
  const Scalar sb = von_neumann_entropy(partial_trace(s.matrix(), s.dims(), Side::a));
  const Scalar sab = von_neumann_entropy(s.matrix());
  return std::max(Scalar(0), sa + sb - sab);
}

template <typename Scalar>
struct Branch {
  std::size_t outcome;
  Scalar probability;
  DensityMatrix<Scalar> conditional;
};

template <typename Scalar>
struct Ensemble {
  std::vector<Branch<Scalar>> branches;
  std::vector<std::size_t> omitted;  // outcomes with probability < kBranchCutoff
};

namespace detail {

// Embeds an operator on the measured side into the full space.
template <typename Scalar>
Operator<Scalar> lift(const Operator<Scalar>& m, Dims dims, Side side) {
  return side == Side::a ? tensor(m, Operator<Scalar>::Identity(dims.b, dims.b))
                         : tensor(Operator<Scalar>::Identity(dims.a, dims.a), m);
}

// Unnormalized conditional operator on the unmeasured side: tr_side((M (x) I) rho).
template <typename Scalar>
Operator<Scalar> unnormalized_conditional(const Operator<Scalar>& rho, Dims dims,
                                          const Operator<Scalar>& m, Side measured) {
  return hermitian_part(partial_trace(lift(m, dims, measured) * rho, dims, measured));
}

// J for a measurement given as plain operators, without state validation.
template <typename Scalar>
Scalar measured_information(const Operator<Scalar>& rho, Dims dims,
                            const std::vector<Operator<Scalar>>& effects, Side measured,
                            Scalar unmeasured_entropy) {
  Scalar conditional_entropy = 0;
  for (const auto& m : effects) {
    const Operator<Scalar> c = unnormalized_conditional(rho, dims, m, measured);
    const Scalar p = c.trace().real();
    if (p < Scalar(kBranchCutoff)) continue;
    conditional_entropy += p * von_neumann_entropy(Operator<Scalar>(c / Complex<Scalar>(p)));
  }
  return unmeasured_entropy - conditional_entropy;
}

}  // namespace detail

// Conditional states of the unmeasured side after measuring `povm` on
// `measured`: p_i = tr((M_i (x) I) rho), rho_i = tr_measured((M_i (x) I) rho) / p_i.
template <typename Scalar>
Ensemble<Scalar> post_measurement_ensemble(const BipartiteState<Scalar>& s,
                                           const Povm<Scalar>& povm, Side measured = Side::a) {
  const Dims dims = s.dims();
  if (povm.dim() != dims.of(measured))
    throw DimensionMismatch("POVM dimension " + std::to_string(povm.dim()) +
                            " does not match measured subsystem " +
                            std::to_string(dims.of(measured)));
  Ensemble<Scalar> out;
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const Operator<Scalar> c =
        detail::unnormalized_conditional(s.matrix(), dims, povm.effects()[i].matrix(), measured);
    const Scalar p = c.trace().real();
    if (p < Scalar(kBranchCutoff)) {
      out.omitted.push_back(i);
      continue;
    }
    out.branches.push_back({i, p, DensityMatrix<Scalar>(Operator<Scalar>(c / Complex<Scalar>(p)))});
  }
  return out;
}

// J = S(rho_unmeasured) - sum_i p_i S(rho_i), in bits.
template <typename Scalar>
Scalar measured_mutual_information(const BipartiteState<Scalar>& s, const Povm<Scalar>& povm,
                                   Side measured = Side::a) {
  const auto ensemble = post_measurement_ensemble(s, povm, measured);
  Scalar j = von_neumann_entropy(partial_trace(s.matrix(), s.dims(), measured));
  for (const auto& br : ensemble.branches) j -= br.probability * von_neumann_entropy(br.conditional);
  return j;
}

// ---------------------------------------------------------------------------
// Discord

// b_given_a is D(b|a): measurements on a. a_given_b is D(a|b).
enum class DiscordDirection { b_given_a, a_given_b };

constexpr Side measured_side(DiscordDirection d) {
  return d == DiscordDirection::b_given_a ? Side::a : Side::b;
}

struct DiscordConfig {
  int grid_resolution = 64;  // theta samples; phi uses twice as many
  int refine_iterations = 40;
  double tolerance = 1e-8;

  void validate() const {
    if (grid_resolution < 8) throw InvalidParameter("discord grid resolution must be >= 8");
    if (refine_iterations < 0) throw InvalidParameter("refine iterations must be >= 0");
    if (!(tolerance > 0)) throw InvalidParameter("discord tolerance must be positive");
  }
};

template <typename Scalar>
struct DiscordResult {
  Scalar value;  // bits, clamped to 0 when |value| < tolerance
  ProjectiveBasis<Scalar> optimal_measurement;
  Scalar j_value;
  Scalar mutual_information;
  Scalar theta;
  Scalar phi;
};

// I - max J over rank-1 projective qubit measurements on the measured side.
// The maximum is located by a (theta, phi) grid over the Bloch sphere followed
// by coordinate descent with a halving step. Ties keep the lexicographically
// smallest (theta, phi).
template <typename Scalar>
DiscordResult<Scalar> discord(const BipartiteState<Scalar>& s, DiscordDirection direction,
                              const DiscordConfig& cfg = {}) {
  cfg.validate();
  const Side measured = measured_side(direction);
  const Dims dims = s.dims();
  if (dims.of(measured) != 2)
    throw UnsupportedDimension("discord optimizer requires a qubit on the measured side, got d=" +
                               std::to_string(dims.of(measured)));
  const Scalar info = mutual_information(s);
  const Scalar unmeasured_entropy =
      von_neumann_entropy(partial_trace(s.matrix(), dims, measured));

  auto j_at = [&](Scalar theta, Scalar phi) {
    const auto basis = ProjectiveBasis<Scalar>::bloch(theta, phi);
    return detail::measured_information(s.matrix(), dims, basis.projectors(), measured,
                                        unmeasured_entropy);
  };

  const Scalar pi = std::numbers::pi_v<Scalar>;
  const int n_theta = cfg.grid_resolution;
  const int n_phi = 2 * cfg.grid_resolution;
  const Scalar d_theta = pi / Scalar(n_theta - 1);
  const Scalar d_phi = 2 * pi / Scalar(n_phi);

  Scalar best_theta = 0, best_phi = 0;
  Scalar best = j_at(0, 0);
  for (int i = 0; i < n_theta; ++i) {
    for (int k = 0; k < n_phi; ++k) {
      const Scalar theta = d_theta * Scalar(i), phi = d_phi * Scalar(k);
      const Scalar j = j_at(theta, phi);
      if (j > best) {
        best = j;
        best_theta = theta;
        best_phi = phi;
      }
    }
  }

  Scalar step_theta = d_theta, step_phi = d_phi;
  for (int it = 0; it < cfg.refine_iterations; ++it) {
    for (int coord = 0; coord < 2; ++coord) {
      const Scalar step = coord == 0 ? step_theta : step_phi;
      for (int moves = 0; moves < 64; ++moves) {
        bool improved = false;
        for (const Scalar dir : {Scalar(-1), Scalar(1)}) {
          const Scalar theta = coord == 0 ? best_theta + dir * step : best_theta;
          const Scalar phi = coord == 1 ? best_phi + dir * step : best_phi;
          const Scalar j = j_at(theta, phi);
          if (j > best) {
            best = j;
            best_theta = theta;
            best_phi = phi;
            improved = true;
            break;
          }
        }
        if (!improved) break;
      }
    }
    step_theta /= 2;
    step_phi /= 2;
  }

  Scalar value = info - best;
  if (std::abs(value) < Scalar(cfg.tolerance)) value = 0;
  return {value, ProjectiveBasis<Scalar>::bloch(best_theta, best_phi), best, info, best_theta,
          best_phi};
}

// ---------------------------------------------------------------------------
// Zero-discord certificate

// Expands rho = sum_m A_m (x) B_m over the orthogonal Hermitian basis {B_m} of
// the opposite side and returns the family {A_m} on `side`:
// A_m = tr_other(rho (I (x) B_m)) / <B_m, B_m>.
template <typename Scalar>
std::vector<Operator<Scalar>> conditional_operator_family(const BipartiteState<Scalar>& s,
                                                          Side side) {
  const Dims dims = s.dims();
  const Side opposite = other(side);
  const auto basis = hermitian_basis<Scalar>(dims.of(opposite));
  std::vector<Operator<Scalar>> family;
  family.reserve(basis.size());
  for (const auto& b : basis) {
    const Operator<Scalar> lifted = detail::lift(b, dims, opposite);
    Operator<Scalar> a = partial_trace(s.matrix() * lifted, dims, opposite);
    family.push_back(hermitian_part(a) / Complex<Scalar>(hs_inner(b, b)));
  }
  return family;
}

// Largest operator norm of a pairwise commutator in the conditional family.
template <typename Scalar>
Scalar commutator_defect(const BipartiteState<Scalar>& s, Side side) {
  const auto family = conditional_operator_family(s, side);
  Scalar worst = 0;
  for (std::size_t m = 0; m < family.size(); ++m)
    for (std::size_t n = m + 1; n < family.size(); ++n)
      worst = std::max(worst, operator_norm(commutator(family[m], family[n])));
  return worst;
}

// True iff rho = sum_i p_i Pi_i (x) rho_i with {Pi_i} a rank-1 projective
// basis on `side`, i.e. the measurement-on-`side` discord vanishes.
template <typename Scalar>
bool is_classical_quantum(const BipartiteState<Scalar>& s, Side side,
                          Scalar tol = kCommutatorTolerance) {
  return commutator_defect(s, side) < tol;
}

namespace detail {

// Common eigenbasis of a commuting Hermitian family: diagonalize a random
// combination, then confirm every member is diagonal in it.
template <typename Scalar>
std::optional<Operator<Scalar>> common_eigenbasis(const std::vector<Operator<Scalar>>& family,
                                                  Scalar tol, Rng& rng) {
  const Index d = family.front().rows();
  Operator<Scalar> mix = Operator<Scalar>::Zero(d, d);
  for (const auto& a : family) mix += Complex<Scalar>(static_cast<Scalar>(rng.normal())) * a;
  const Operator<Scalar> u = eigh(mix).eigenvectors;
  for (const auto& a : family) {
    Operator<Scalar> rotated = u.adjoint() * a * u;
    rotated.diagonal().setZero();
    if (rotated.cwiseAbs().maxCoeff() > tol) return std::nullopt;
  }
  return u;
}

// Isometry |i> (x) I (side a) or I (x) |i> (side b) into the full space.
template <typename Scalar>
Operator<Scalar> slot(const StateVector<Scalar>& v, Dims dims, Side side) {
  return side == Side::a ? tensor(v, Operator<Scalar>::Identity(dims.b, dims.b))
                         : tensor(Operator<Scalar>::Identity(dims.a, dims.a), v);
}

}  // namespace detail

inline constexpr int kDefaultExtractionRetries = 8;

template <typename Scalar>
CQDecomposition<Scalar> extract_cq_decomposition(const BipartiteState<Scalar>& s, Side side,
                                                 Scalar tol = kCommutatorTolerance,
                                                 std::uint64_t seed = 1,
                                                 int max_retries = kDefaultExtractionRetries) {
  const Dims dims = s.dims();
  const auto family = conditional_operator_family(s, side);
  Scalar defect = 0;
  for (std::size_t m = 0; m < family.size(); ++m)
    for (std::size_t n = m + 1; n < family.size(); ++n)
      defect = std::max(defect, operator_norm(commutator(family[m], family[n])));
  if (!(defect < tol))
    throw NotClassical(std::string("state is not classical on side ") + to_string(side) +
                       " (commutator norm " + std::to_string(static_cast<double>(defect)) + ")");

  const Index d = dims.of(side);
  const Index q = dims.of(other(side));
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt));
    const auto u = detail::common_eigenbasis(family, std::max(tol, Scalar(1e-12)), rng);
    if (!u) continue;
    std::vector<Scalar> weights;
    std::vector<DensityMatrix<Scalar>> conditionals;
    for (Index i = 0; i < d; ++i) {
      const Operator<Scalar> v = detail::slot<Scalar>(u->col(i), dims, side);
      const Operator<Scalar> block = hermitian_part(v.adjoint() * s.matrix() * v);
      const Scalar p = std::max(Scalar(0), block.trace().real());
      weights.push_back(p);
      if (p < Scalar(kBranchCutoff))
        conditionals.push_back(DensityMatrix<Scalar>::maximally_mixed(q));
      else
        conditionals.push_back(DensityMatrix<Scalar>(Operator<Scalar>(block / Complex<Scalar>(p)),
                                                     Scalar(1e-8)));
    }
    Scalar total = 0;
    for (const Scalar p : weights) total += p;
    for (Scalar& p : weights) p /= total;
    CQDecomposition<Scalar> out(side, std::move(weights), ProjectiveBasis<Scalar>(*u),
                                std::move(conditionals));
    if (trace_distance(from_cq_decomposition(out).matrix(), s.matrix()) <
        Scalar(kReconstructionTolerance))
      return out;
  }
  throw DegeneracyUnresolved("no common eigenbasis found after " + std::to_string(max_retries) +
                             " randomized attempts");
}

template <typename Scalar>
CCDecomposition<Scalar> extract_cc_decomposition(const BipartiteState<Scalar>& s,
                                                 Scalar tol = kCommutatorTolerance,
                                                 std::uint64_t seed = 1) {
  const auto cq_a = extract_cq_decomposition(s, Side::a, tol, seed);
  const auto cq_b = extract_cq_decomposition(s, Side::b, tol, seed);
  const Dims dims = s.dims();
  RealMatrix<Scalar> w(dims.a, dims.b);
  for (Index i = 0; i < dims.a; ++i) {
    const Operator<Scalar> pa = cq_a.basis().projector(i);
    for (Index j = 0; j < dims.b; ++j)
      w(i, j) = std::max(Scalar(0), hs_inner(tensor(pa, cq_b.basis().projector(j)), s.matrix()));
  }
  w /= w.sum();
  CCDecomposition<Scalar> out(std::move(w), cq_a.basis(), cq_b.basis());
  if (!(trace_distance(from_cc_decomposition(out).matrix(), s.matrix()) <
        Scalar(kReconstructionTolerance)))
    throw NotClassical("per-side bases do not diagonalize the state jointly");
  return out;
}

// ---------------------------------------------------------------------------
// CHSH

template <typename Scalar = double>
std::vector<Operator<Scalar>> pauli_matrices() {
  using C = Complex<Scalar>;
  Operator<Scalar> x(2, 2), y(2, 2), z(2, 2);
  x << C(0), C(1), C(1), C(0);
  y << C(0), C(0, -1), C(0, 1), C(0);
  z << C(1), C(0), C(0), C(-1);
  return {x, y, z};
}

// T_uv = tr(rho sigma_u (x) sigma_v)
template <typename Scalar>
RealMatrix<Scalar> correlation_matrix(const BipartiteState<Scalar>& s) {
  if (s.dims() != Dims{2, 2}) throw DimensionMismatch("correlation matrix requires two qubits");
  const auto sigma = pauli_matrices<Scalar>();
  RealMatrix<Scalar> t(3, 3);
  for (int u = 0; u < 3; ++u)
    for (int v = 0; v < 3; ++v) t(u, v) = hs_inner(tensor(sigma[u], sigma[v]), s.matrix());
  return t;
}

// Maximal CHSH value 2 sqrt(m1 + m2), m1 >= m2 the top eigenvalues of T^T T.
template <typename Scalar>
Scalar chsh_max(const BipartiteState<Scalar>& s) {
  const RealMatrix<Scalar> t = correlation_matrix(s);
  Eigen::SelfAdjointEigenSolver<RealMatrix<Scalar>> solver(t.transpose() * t);
  const auto& ev = solver.eigenvalues();
  return 2 * std::sqrt(std::max(Scalar(0), ev(2) + ev(1)));
}

}  // namespace qcorr
