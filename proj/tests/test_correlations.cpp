#include <doctest.h>

#include "oracles.hpp"
#include "qcorr/correlations.hpp"

using namespace qcorr;
using C = std::complex<double>;

namespace {

BipartiteState<double> product(const DensityMatrix<double>& a, const DensityMatrix<double>& b) {
  return from_separable_decomposition(SeparableDecomposition<double>({1.0}, {{a, b}}));
}

BipartiteState<double> perfectly_correlated() {
  RealMatrix<double> w = RealMatrix<double>::Zero(2, 2);
  w(0, 0) = w(1, 1) = 0.5;
  return from_cc_decomposition(CCDecomposition<double>(
      w, ProjectiveBasis<double>::computational(2), ProjectiveBasis<double>::computational(2)));
}

}  // namespace

TEST_SUITE("correlations") {
  TEST_CASE("von Neumann entropy") {
    Rng rng(1);
    CHECK(von_neumann_entropy(random_pure(3, rng)) == doctest::Approx(0.0).epsilon(1e-12));
    for (Index d : {2, 3, 4, 8})
      CHECK(von_neumann_entropy(DensityMatrix<double>::maximally_mixed(d)) ==
            doctest::Approx(std::log2(double(d))));
    const double expect = -(0.5) * std::log2(0.5) - 3 * (1.0 / 6) * std::log2(1.0 / 6);
    CHECK(std::abs(von_neumann_entropy(werner(1.0 / 3).rho()) - expect) < 1e-12);
    CHECK(expect == doctest::Approx(1.79248).epsilon(1e-5));
  }

  TEST_CASE("entropy is unitarily invariant") {
    Rng rng(12);
    for (int rep = 0; rep < 20; ++rep) {
      const auto rho = random_density(4, rng);
      const OperatorXd u = random_unitary(4, rng);
      const OperatorXd rotated = u * rho.matrix() * u.adjoint();
      CHECK(std::abs(von_neumann_entropy(rotated) - von_neumann_entropy(rho)) < 1e-10);
    }
  }

  TEST_CASE("mutual information") {
    Rng rng(3);
    CHECK(mutual_information(product(random_density(2, rng), random_density(3, rng))) <
          1e-12);
    CHECK(mutual_information(bell_state(1)) == doctest::Approx(2.0));
    CHECK(mutual_information(perfectly_correlated()) == doctest::Approx(1.0));
  }

  TEST_CASE("post-measurement ensemble") {
    Rng rng(4);
    const auto rb = random_density(2, rng);
    const auto prod = product(random_density(2, rng), rb);
    const auto povm = Povm<double>::from_basis(random_projective_basis(2, rng));
    for (const auto& br : post_measurement_ensemble(prod, povm).branches)
      CHECK((br.conditional.matrix() - rb.matrix()).cwiseAbs().maxCoeff() < 1e-12);

    const auto z = Povm<double>::from_basis(ProjectiveBasis<double>::computational(2));
    const auto ens = post_measurement_ensemble(bell_state(0), z);
    REQUIRE(ens.branches.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(ens.branches[i].probability == doctest::Approx(0.5));
      OperatorXd expect = OperatorXd::Zero(2, 2);
      expect(static_cast<Index>(i), static_cast<Index>(i)) = 1;
      CHECK((ens.branches[i].conditional.matrix() - expect).cwiseAbs().maxCoeff() < 1e-12);
    }

    for (int rep = 0; rep < 20; ++rep) {
      const BipartiteState<double> s(random_density(6, rng), {2, 3});
      // Three-outcome unsharp POVM: {E, (I - E)/2, (I - E)/2}.
      const auto e = random_effect(2, rng);
      const OperatorXd rest = (OperatorXd::Identity(2, 2) - e.matrix()) / 2.0;
      const Povm<double> unsharp({e, Effect<double>(rest), Effect<double>(rest)});
      double total = 0;
      for (const auto& br : post_measurement_ensemble(s, unsharp).branches) total += br.probability;
      CHECK(std::abs(total - 1.0) < 1e-12);
    }

    const auto bad = Povm<double>::from_basis(ProjectiveBasis<double>::computational(3));
    CHECK_THROWS_AS(post_measurement_ensemble(bell_state(0), bad), DimensionMismatch);
  }

  TEST_CASE("zero-probability outcomes are omitted") {
    const auto z = Povm<double>::from_basis(ProjectiveBasis<double>::computational(2));
    StateVector<double> psi = StateVector<double>::Zero(4);
    psi(0) = 1;
    const BipartiteState<double> zero_zero(DensityMatrix<double>::pure(psi), {2, 2});
    const auto ens = post_measurement_ensemble(zero_zero, z);
    CHECK(ens.branches.size() == 1);
    REQUIRE(ens.omitted.size() == 1);
    CHECK(ens.omitted[0] == 1);
  }

  TEST_CASE("measured mutual information") {
    const auto z = Povm<double>::from_basis(ProjectiveBasis<double>::computational(2));
    CHECK(measured_mutual_information(bell_state(0), z) == doctest::Approx(1.0));
    Rng rng(5);
    const auto prod = product(random_density(2, rng), random_density(2, rng));
    CHECK(std::abs(measured_mutual_information(
              prod, Povm<double>::from_basis(random_projective_basis(2, rng)))) < 1e-12);

    for (int rep = 0; rep < 5; ++rep) {
      const auto cc = random_cc_decomposition({2, 3}, rng);
      const auto s = from_cc_decomposition(cc);
      const double j = measured_mutual_information(s, Povm<double>::from_basis(cc.basis_a()));
      CHECK(std::abs(j - oracle::classical_mi(cc.weights())) < 1e-10);
    }
  }

  TEST_CASE("measured information never exceeds mutual information") {
    Rng rng(6);
    for (int rep = 0; rep < 100; ++rep) {
      const Dims dims = rep % 2 == 0 ? Dims{2, 2} : Dims{3, 2};
      const BipartiteState<double> s(random_density(dims.total(), rng), dims);
      const auto e = random_effect(dims.a, rng);
      const Povm<double> povm({e, Effect<double>(OperatorXd(OperatorXd::Identity(dims.a, dims.a) -
                                                            e.matrix()))});
      const double j = measured_mutual_information(s, povm);
      CHECK(j >= -1e-12);
      CHECK(j <= mutual_information(s) + 1e-9);
    }
  }

  TEST_CASE("discord of named states") {
    const auto bell = discord(bell_state(0), DiscordDirection::b_given_a);
    CHECK(std::abs(bell.value - 1.0) < 1e-3);
    CHECK(std::abs(bell.value - (bell.mutual_information - bell.j_value)) < 1e-8);

    const auto asym = asymmetric_state();
    const double ab = discord(asym, DiscordDirection::a_given_b).value;
    const double ba = discord(asym, DiscordDirection::b_given_a).value;
    CHECK(std::abs(ab) < 1e-6);
    CHECK(ba > 0.05);
    CHECK(std::abs(ba - oracle::dense_grid_discord(asym.matrix(), true, 400, 800)) < 1e-3);
  }

  TEST_CASE("discord vanishes on classical-classical states") {
    Rng rng(8);
    for (int rep = 0; rep < 10; ++rep) {
      const auto s = from_cc_decomposition(random_cc_decomposition({2, 2}, rng));
      CHECK(std::abs(discord(s, DiscordDirection::b_given_a).value) < 1e-6);
      CHECK(std::abs(discord(s, DiscordDirection::a_given_b).value) < 1e-6);
    }
  }

  TEST_CASE("discord on qubit x qutrit measures the qubit only") {
    Rng rng(10);
    const BipartiteState<double> s(random_density(6, rng), {2, 3});
    CHECK(discord(s, DiscordDirection::b_given_a).value >= 0.0);
    CHECK_THROWS_AS(discord(s, DiscordDirection::a_given_b), UnsupportedDimension);
  }

  TEST_CASE("discord config validation") {
    DiscordConfig cfg;
    cfg.grid_resolution = 4;
    CHECK_THROWS_AS(discord(bell_state(0), DiscordDirection::b_given_a, cfg), InvalidParameter);
    cfg = {};
    cfg.tolerance = 0;
    CHECK_THROWS_AS(discord(bell_state(0), DiscordDirection::b_given_a, cfg), InvalidParameter);
  }

  TEST_CASE("classical-quantum certificate") {
    Rng rng(13);
    for (int rep = 0; rep < 5; ++rep) {
      const auto s = from_cc_decomposition(random_cc_decomposition({2, 3}, rng));
      CHECK(is_classical_quantum(s, Side::a));
      CHECK(is_classical_quantum(s, Side::b));
    }
    CHECK_FALSE(is_classical_quantum(bell_state(0), Side::a));
    CHECK_FALSE(is_classical_quantum(bell_state(0), Side::b));
    CHECK_FALSE(is_classical_quantum(asymmetric_state(), Side::a));
    CHECK(is_classical_quantum(asymmetric_state(), Side::b));
  }

  TEST_CASE("Bell commutator oracle on Pauli components") {
    // Phi+ = (I I + X X - Y Y + Z Z)/4, so the side-a family is
    // {I/2 (scaled), X/4, -Y/4, Z/4} up to normalization; [X, Y] != 0.
    const auto family = conditional_operator_family(bell_state(0), Side::a);
    REQUIRE(family.size() == 4);
    double worst = 0;
    for (std::size_t m = 0; m < 4; ++m)
      for (std::size_t n = m + 1; n < 4; ++n)
        worst = std::max(worst, operator_norm(commutator(family[m], family[n])));
    // ||[X/4, Y/4]|| = ||2iZ/16|| = 1/8.
    CHECK(worst == doctest::Approx(0.125));
  }

  TEST_CASE("extract classical-quantum decomposition") {
    Rng rng(14);
    for (int rep = 0; rep < 10; ++rep) {
      const auto basis = random_projective_basis(2, rng);
      const auto w = random_probabilities(2, rng);
      const CQDecomposition<double> built(Side::a, w, basis,
                                          {random_density(3, rng), random_density(3, rng)});
      const auto s = from_cq_decomposition(built);
      const auto back = extract_cq_decomposition(s, Side::a);
      CHECK(trace_distance(from_cq_decomposition(back).matrix(), s.matrix()) < 1e-10);
    }
    CHECK_THROWS_AS(extract_cq_decomposition(bell_state(0), Side::a), NotClassical);
  }

  TEST_CASE("extraction resolves degenerate families") {
    // Maximally mixed: every basis is a common eigenbasis.
    const BipartiteState<double> mixed(DensityMatrix<double>::maximally_mixed(4), {2, 2});
    const auto cc = extract_cc_decomposition(mixed);
    CHECK(trace_distance(from_cc_decomposition(cc).matrix(), mixed.matrix()) < 1e-10);
    // Product of a degenerate and a generic state on a qutrit.
    Rng rng(15);
    const auto rb = from_cc_decomposition(random_cc_decomposition({1, 3}, rng)).rho();
    const auto s = product(DensityMatrix<double>::maximally_mixed(2), rb);
    CHECK(trace_distance(from_cc_decomposition(extract_cc_decomposition(s)).matrix(), s.matrix()) <
          1e-10);
  }

  TEST_CASE("extract classical-classical decomposition") {
    RealMatrix<double> w(2, 2);
    w << 0.4, 0.1, 0.2, 0.3;
    const auto s = from_cc_decomposition(CCDecomposition<double>(
        w, ProjectiveBasis<double>::computational(2), ProjectiveBasis<double>::computational(2)));
    const auto cc = extract_cc_decomposition(s);
    // Bases are recovered up to permutation and phase; compare weights through the state.
    std::vector<double> got(cc.weights().data(), cc.weights().data() + 4);
    std::vector<double> want{0.4, 0.1, 0.2, 0.3};
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (std::size_t i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]));

    Rng rng(16);
    for (int rep = 0; rep < 10; ++rep) {
      const auto st = from_cc_decomposition(random_cc_decomposition({2, 3}, rng));
      CHECK(trace_distance(from_cc_decomposition(extract_cc_decomposition(st)).matrix(),
                           st.matrix()) < 1e-10);
    }
    CHECK_THROWS_AS(extract_cc_decomposition(asymmetric_state()), NotClassical);
  }

  TEST_CASE("CHSH maximum") {
    for (int k = 0; k < 4; ++k)
      CHECK(std::abs(chsh_max(bell_state(k)) - 2 * std::sqrt(2.0)) < 1e-9);
    for (const double p : {0.0, 0.3, 0.7, 1.0})
      CHECK(std::abs(chsh_max(werner(p)) - 2 * std::sqrt(2.0) * p) < 1e-9);
    Rng rng(18);
    for (int rep = 0; rep < 10; ++rep)
      CHECK(chsh_max(product(random_density(2, rng), random_density(2, rng))) <= 2 + 1e-12);
    const BipartiteState<double> qutrit(DensityMatrix<double>::maximally_mixed(6), {2, 3});
    CHECK_THROWS_AS(chsh_max(qutrit), DimensionMismatch);
  }
}
