// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "../oracles.hpp"
#include "qcorr/cli.hpp"
#include "qcorr/io.hpp"
#include "qcorr/qcorr.hpp"

using namespace qcorr;
namespace fs = std::filesystem;

namespace {

// Accumulates failures for one criterion; the detail string shows the worst numbers seen.
struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Criterion = std::function<void(Check&)>;

double born_deviation(const LinearLhvModel<double>& m, const BipartiteState<double>& s,
                      std::size_t samples, Rng& rng) {
  double worst = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto ma = random_effect(s.dims().a, rng);
    const auto mb = random_effect(s.dims().b, rng);
    worst = std::max(worst, std::abs(evaluate_joint(m, ma, mb) -
                                     oracle::born(s.matrix(), ma.matrix(), mb.matrix())));
  }
  return worst;
}

void born_fidelity(Check& c) {
  Rng rng(101);
  double worst = 0;
  for (int k = 0; k < 10; ++k) {
    const auto cc = random_cc_decomposition({2, 3}, rng);
    worst = std::max(worst, born_deviation(build_tight_from_cc(cc), from_cc_decomposition(cc), 1000, rng));
  }
  for (int k = 0; k < 10; ++k) {
    const auto d = random_separable_decomposition({2, 3}, 1 + static_cast<std::size_t>(k % 4), rng);
    worst = std::max(worst, born_deviation(build_from_separable(d), from_separable_decomposition(d), 1000, rng));
  }
  c.detail << "max deviation " << worst;
  c.expect(worst < 1e-9, "deviation < 1e-9");
}

void cc_tightness(Check& c) {
  Rng rng(202);
  int tight = 0, agree = 0, total = 0;
  const Dims shapes[] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}};
  for (int k = 0; k < 20; ++k) {
    const auto m = build_tight_from_cc(random_cc_decomposition(shapes[k % 4], rng));
    for (const Side s : {Side::a, Side::b}) {
      const auto r = is_tight(m, s);
      ++total;
      tight += r.tight;
      agree += r.consistent();
    }
  }
  c.detail << tight << "/" << total << " sides tight, " << agree << "/" << total
           << " agree with pairwise criterion";
  c.expect(tight == total, "all CC sides tight");
  c.expect(agree == total, "enumeration agrees with pairwise criterion");
}

void asymmetric_criterion(Check& c) {
  const auto model = build_from_separable(asymmetric_decomposition());
  const auto ra = is_tight(model, Side::a);
  const auto rb = is_tight(model, Side::b);
  bool singleton_listed = false;
  for (const EventSubset s : ra.failing_subsets) singleton_listed |= (s == 0b01 || s == 0b10);
  const auto s = qcorr::asymmetric_state();
  const double dab = discord(s, DiscordDirection::a_given_b).value;
  const double dba = discord(s, DiscordDirection::b_given_a).value;
  const double grid = oracle::dense_grid_discord(s.matrix(), true, 400, 800);
  c.detail << "tight_a=" << ra.tight << " tight_b=" << rb.tight << " D(a|b)=" << dab
           << " D(b|a)=" << dba << " grid=" << grid;
  c.expect(rb.tight, "side b tight");
  c.expect(!ra.tight && singleton_listed, "side a not tight with a failing singleton");
  c.expect(std::abs(dab) < 1e-6, "D(a|b) = 0");
  c.expect(dba > 0.05, "D(b|a) > 0.05");
  c.expect(std::abs(dba - grid) < 1e-3, "optimizer matches dense grid");
}

void discord_calibration(Check& c) {
  const double bell = discord(bell_state(0), DiscordDirection::b_given_a).value;
  c.expect(std::abs(bell - 1) < 1e-3, "Bell discord 1");
  Rng rng(404);
  double worst_zero = 0, min_generic = 1e9;
  int equivalences = 0, cases = 0;
  for (int k = 0; k < 10; ++k) {
    const auto prod = from_separable_decomposition(
        SeparableDecomposition<double>({1.0}, {{random_density(2, rng), random_density(2, rng)}}));
    worst_zero = std::max(worst_zero, std::abs(discord(prod, DiscordDirection::b_given_a).value));
    worst_zero = std::max(worst_zero, std::abs(discord(prod, DiscordDirection::a_given_b).value));
  }
  for (int k = 0; k < 20; ++k) {
    const auto s = from_cc_decomposition(random_cc_decomposition({2, 2}, rng));
    const double d = discord(s, DiscordDirection::b_given_a).value;
    worst_zero = std::max(worst_zero, std::abs(d));
    ++cases;
    equivalences += ((d == 0) == is_classical_quantum(s, Side::a));
  }
  for (int k = 0; k < 20; ++k) {
    const BipartiteState<double> s(random_density(4, rng), {2, 2});
    const double d = discord(s, DiscordDirection::b_given_a).value;
    min_generic = std::min(min_generic, d);
    ++cases;
    equivalences += ((d == 0) == is_classical_quantum(s, Side::a));
  }
  c.detail << "Bell " << bell << ", max zero-case " << worst_zero << ", min generic " << min_generic
           << ", certificate agrees " << equivalences << "/" << cases;
  c.expect(worst_zero < 1e-6, "product and CC discord 0");
  c.expect(min_generic > 1e-3, "generic discord > 1e-3");
  c.expect(equivalences == cases, "discord 0 iff certificate");
}

void round_trips(Check& c) {
  Rng rng(505);
  double worst_model = 0, worst_extract = 0;
  for (int k = 0; k < 10; ++k) {
    const auto d = random_separable_decomposition({2, 3}, 1 + static_cast<std::size_t>(k % 4), rng);
    worst_model = std::max(worst_model, trace_distance(reconstruct_state(build_from_separable(d)).matrix(),
                                                       from_separable_decomposition(d).matrix()));
    const auto cc = random_cc_decomposition({2, 3}, rng);
    const auto s = from_cc_decomposition(cc);
    worst_model = std::max(worst_model,
                           trace_distance(reconstruct_state(build_tight_from_cc(cc)).matrix(), s.matrix()));
    worst_extract = std::max(
        worst_extract, trace_distance(from_cc_decomposition(extract_cc_decomposition(s)).matrix(), s.matrix()));
  }
  c.detail << "model " << worst_model << ", extraction " << worst_extract;
  c.expect(worst_model < 1e-10, "reconstruct_state round trip");
  c.expect(worst_extract < 1e-10, "extract_cc_decomposition round trip");
}

void werner_witness(Check& c) {
  double worst = 0;
  for (const double p : {0.0, 1.0 / 3, 0.5, 1.0})
    worst = std::max(worst, std::abs(ppt_test(werner(p)).min_eigenvalue - oracle::werner_pt_min_eigenvalue(p)));
  double lo = 0, hi = 1;
  while (hi - lo > 1e-12) {
    const double mid = (lo + hi) / 2;
    (ppt_test(werner(mid)).min_eigenvalue < 0 ? hi : lo) = mid;
  }
  const double threshold = (lo + hi) / 2;
  c.detail << "max eigenvalue error " << worst << ", threshold " << threshold;
  c.expect(worst < 1e-12, "PT minimum eigenvalue");
  c.expect(std::abs(threshold - 1.0 / 3) < 1e-9, "bisection threshold");
}

void quasiprobability(Check& c) {
  const auto f = qubit_sic_frame();
  const auto qb = represent_state(bell_state(0), f, f);
  const auto qm = represent_state(BipartiteState<double>(DensityMatrix<double>::maximally_mixed(4), {2, 2}), f, f);
  const double flat = (qm.weights.array() - 1.0 / 16).abs().maxCoeff();
  Rng rng(707);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const BipartiteState<double> s(random_density(4, rng), {2, 2});
    worst = std::max(worst, born_check(s, f, f, 1000, static_cast<std::uint64_t>(k + 1)));
  }
  c.detail << "Bell min weight " << qb.min_weight() << ", negativity " << negativity(qb)
           << ", flat error " << flat << ", born " << worst;
  c.expect(qb.min_weight() < 0 && negativity(qb) > 0, "Bell negative");
  c.expect(flat < 1e-12, "maximally mixed weights 1/16");
  c.expect(worst < 1e-9, "born_check");
}

void chsh(Check& c) {
  const double tsirelson = 2 * std::sqrt(2.0);
  double worst = std::abs(chsh_max(bell_state(0)) - tsirelson);
  for (const double p : {0.0, 0.25, 0.5, 1 / std::sqrt(2.0), 0.9, 1.0})
    worst = std::max(worst, std::abs(chsh_max(werner(p)) - tsirelson * p));
  c.detail << "max error " << worst;
  c.expect(worst < 1e-9, "CHSH values");
}

struct Captured {
  int code;
  std::string out, err;
};

Captured run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void cli_contract(Check& c) {
  const fs::path dir = fs::temp_directory_path() / ("qcorr_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string bell = (dir / "bell.json").string(), cc = (dir / "cc.json").string(),
                    bad = (dir / "bad.json").string();
  run_cli({"gen", "bell", "0", "--out", bell});
  run_cli({"gen", "cc", "--dims", "2x2", "--seed", "9", "--out", cc});
  std::ofstream(bad) << R"({"dims": [2, 2], "matrix": [[[0.5, 0], [0.0)";

  const auto b1 = run_cli({"classify", bell}), b2 = run_cli({"classify", bell});
  const auto c1 = run_cli({"classify", cc}), c2 = run_cli({"classify", cc});
  const auto m1 = run_cli({"classify", bad}), m2 = run_cli({"classify", bad});
  fs::remove_all(dir);

  c.expect(b1.code == 0 && c1.code == 0, "valid files exit 0");
  c.expect(m1.code == 2 && m1.err.find("field 'matrix'") != std::string::npos,
           "malformed file exits 2 naming the field");
  c.expect(b1.out == b2.out && c1.out == c2.out && m1.err == m2.err, "byte-identical repeats");
  if (b1.code != 0 || c1.code != 0) return;
  const auto jb = io::json::parse(b1.out), jc = io::json::parse(c1.out);
  c.expect(jb["entangled"] == "true" && std::abs(jb["discord_ba"].get<double>() - 1) < 1e-3 &&
               jb["lhv"]["built"] == false && jb["quasi"]["negativity_sic"].get<double>() > 0 &&
               std::abs(jb["chsh_max"].get<double>() - 2 * std::sqrt(2.0)) < 1e-3,
           "Bell flags");
  c.expect(jc["zero_discord"] == true && jc["lhv"]["tight_a"] == true && jc["lhv"]["tight_b"] == true &&
               jc["lhv"]["max_deviation"].get<double>() < 1e-10,
           "CC flags");
  c.detail << "exit codes " << b1.code << "/" << c1.code << "/" << m1.code;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Criterion>> criteria = {
      {"1 born-rule fidelity of built models", born_fidelity},
      {"2 CC models tight on both sides", cc_tightness},
      {"3 asymmetric state: one-sided tightness and discord", asymmetric_criterion},
      {"4 discord calibration and certificate", discord_calibration},
      {"5 reconstruction round trips", round_trips},
      {"6 Werner partial-transpose witness", werner_witness},
      {"7 SIC quasiprobability", quasiprobability},
      {"8 CHSH values", chsh},
      {"9 CLI contract", cli_contract},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Check c;
    try {
      run(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << " [exception: " << e.what() << "]";
    }
    std::printf("%s  %s: %s\n", c.ok ? "PASS" : "FAIL", name.c_str(), c.detail.str().c_str());
    failures += !c.ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
