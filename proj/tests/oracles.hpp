#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's partial traces, tensor products or optimizer; everything is
// explicit index arithmetic or closed-form two-qubit formulas.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// tr(rho (Ma (x) Mb)) = sum rho[(i,k),(j,l)] Ma[j,i] Mb[l,k]
inline double born(const Mat& rho, const Mat& ma, const Mat& mb) {
  const long da = ma.rows(), db = mb.rows();
  C acc = 0;
  for (long i = 0; i < da; ++i)
    for (long k = 0; k < db; ++k)
      for (long j = 0; j < da; ++j)
        for (long l = 0; l < db; ++l) acc += rho(i * db + k, j * db + l) * ma(j, i) * mb(l, k);
  return acc.real();
}

// Reduced operator on b: sum_i X[(i,k),(i,l)].
inline Mat trace_out_a(const Mat& x, long da, long db) {
  Mat out = Mat::Zero(db, db);
  for (long i = 0; i < da; ++i)
    for (long k = 0; k < db; ++k)
      for (long l = 0; l < db; ++l) out(k, l) += x(i * db + k, i * db + l);
  return out;
}

inline Mat trace_out_b(const Mat& x, long da, long db) {
  Mat out = Mat::Zero(da, da);
  for (long i = 0; i < da; ++i)
    for (long j = 0; j < da; ++j)
      for (long k = 0; k < db; ++k) out(i, j) += x(i * db + k, j * db + k);
  return out;
}

inline double h2(double p) {
  double h = 0;
  for (const double x : {p, 1 - p})
    if (x > 1e-15) h -= x * std::log2(x);
  return h;
}

// Entropy of a qubit state from its Bloch vector length.
inline double qubit_entropy(const Mat& rho) {
  const double x = 2 * rho(0, 1).real(), y = -2 * rho(0, 1).imag();
  const double z = (rho(0, 0) - rho(1, 1)).real();
  const double r = std::min(1.0, std::sqrt(x * x + y * y + z * z));
  return h2((1 + r) / 2);
}

inline double shannon(const std::vector<double>& p) {
  double h = 0;
  for (const double x : p)
    if (x > 1e-15) h -= x * std::log2(x);
  return h;
}

// Mutual information of a classical joint table.
inline double classical_mi(const Eigen::MatrixXd& p) {
  std::vector<double> pa, pb, pab;
  for (long i = 0; i < p.rows(); ++i) pa.push_back(p.row(i).sum());
  for (long j = 0; j < p.cols(); ++j) pb.push_back(p.col(j).sum());
  for (long i = 0; i < p.size(); ++i) pab.push_back(p.data()[i]);
  return shannon(pa) + shannon(pb) - shannon(pab);
}

// (I + n.sigma)/2
inline Mat bloch_projector(double nx, double ny, double nz) {
  Mat p(2, 2);
  p << C(1 + nz, 0), C(nx, -ny), C(nx, ny), C(1 - nz, 0);
  return p / 2.0;
}

// Two-qubit discord by brute force over a dense (theta, phi) grid of
// projective measurements on the measured qubit. Uses only closed-form
// qubit entropies, so it shares no code path with the optimizer.
inline double dense_grid_discord(const Mat& rho, bool measure_a, int n_theta, int n_phi) {
  const Mat ra = trace_out_b(rho, 2, 2), rb = trace_out_a(rho, 2, 2);
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  const double mi = qubit_entropy(ra) + qubit_entropy(rb) - shannon(ev);
  const double s_unmeasured = qubit_entropy(measure_a ? rb : ra);
  double best = -1e300;
  for (int i = 0; i <= n_theta; ++i) {
    const double theta = std::numbers::pi * i / n_theta;
    for (int k = 0; k < n_phi; ++k) {
      const double phi = 2 * std::numbers::pi * k / n_phi;
      const double nx = std::sin(theta) * std::cos(phi), ny = std::sin(theta) * std::sin(phi),
                   nz = std::cos(theta);
      double cond = 0;
      for (const double sgn : {1.0, -1.0}) {
        const Mat p = bloch_projector(sgn * nx, sgn * ny, sgn * nz);
        // Conditional on the unmeasured qubit: tr_measured((P (x) I) rho) or (I (x) P).
        Mat c = Mat::Zero(2, 2);
        for (long u = 0; u < 2; ++u)
          for (long v = 0; v < 2; ++v)
            for (long x = 0; x < 2; ++x)
              for (long y = 0; y < 2; ++y)
                c(u, v) += measure_a ? p(y, x) * rho(x * 2 + u, y * 2 + v)
                                     : p(y, x) * rho(u * 2 + x, v * 2 + y);
        const double prob = c.trace().real();
        if (prob > 1e-14) cond += prob * qubit_entropy(c / prob);
      }
      best = std::max(best, s_unmeasured - cond);
    }
  }
  return mi - best;
}

// Eigenvalues of the partial transpose of werner(p): {(1+p)/4 x3, (1-3p)/4}.
inline double werner_pt_min_eigenvalue(double p) { return (1 - 3 * p) / 4; }

// Spectrum of werner(p): {(1+3p)/4, (1-p)/4 x3}.
inline std::array<double, 4> werner_spectrum(double p) {
  const double lo = (1 - p) / 4;
  return {lo, lo, lo, (1 + 3 * p) / 4};
}

}  // namespace oracle
