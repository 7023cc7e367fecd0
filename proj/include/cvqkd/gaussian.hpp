#pragma once

// Covariance-matrix algebra for Gaussian bosonic modes in shot-noise units
// (vacuum quadrature variance 1, [q,p] = 2i). A state of N modes is a real
// symmetric 2N x 2N matrix over the quadrature ordering (q1, p1, ..., qN, pN).
// Provides the symplectic form, passive linear-optics transforms, symplectic
// spectra, von Neumann entropy, and conditional states after measuring one
// mode by homodyne or heterodyne detection. All functions are pure and
// thread-safe; matrices are plain Eigen types so results compose with Eigen
// expressions.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cvqkd {

using Eigen::Index;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matd = Mat<double>;
using Vecd = Vec<double>;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct dimension_error : error {
  using error::error;
};
struct physicality_error : error {
  using error::error;
};
struct numerical_error : error {
  using error::error;
};

enum class Quadrature { q = 0, p = 1 };

// Default numeric tolerances. Callers may pass their own values to the
// validation helpers; the defaults are used throughout the library.
namespace tol {
inline constexpr double symmetry_rel = 1e-12;
inline constexpr double physicality = 1e-9;
inline constexpr double symplectic = 1e-10;
inline constexpr double eigen_pairing = 1e-8;
inline constexpr double degenerate_variance = 1e-12;
}  // namespace tol

// ---------------------------------------------------------------------------
// Construction

// Symplectic form: block-diagonal with N copies of [[0,1],[-1,0]].
template <class Scalar = double>
Mat<Scalar> omega(Index n_modes) {
  if (n_modes < 1) throw dimension_error("omega: n_modes must be >= 1");
  Mat<Scalar> w = Mat<Scalar>::Zero(2 * n_modes, 2 * n_modes);
  for (Index k = 0; k < n_modes; ++k) {
    w(2 * k, 2 * k + 1) = Scalar(1);
    w(2 * k + 1, 2 * k) = Scalar(-1);
  }
  return w;
}

// Block-diagonal composition of two states (uncorrelated subsystems).
template <class DerivedA, class DerivedB>
Mat<typename DerivedA::Scalar> direct_sum(const Eigen::MatrixBase<DerivedA>& a,
                                          const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Mat<Scalar> out = Mat<Scalar>::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

// Beamsplitter of power transmittance t acting on modes (i, j) of an
// n_modes system: [[sqrt(t), sqrt(1-t)], [-sqrt(1-t), sqrt(t)]] on the two
// quadrature blocks, identity elsewhere.
template <class Scalar = double>
Mat<Scalar> beamsplitter(Scalar t, Index mode_i, Index mode_j, Index n_modes) {
  if (!(t >= Scalar(0) && t <= Scalar(1)))
    throw error("beamsplitter: transmittance must lie in [0,1]");
  if (mode_i == mode_j || mode_i < 0 || mode_j < 0 || mode_i >= n_modes ||
      mode_j >= n_modes)
    throw dimension_error("beamsplitter: invalid mode indices");
  Mat<Scalar> s = Mat<Scalar>::Identity(2 * n_modes, 2 * n_modes);
  const Scalar a = std::sqrt(t), b = std::sqrt(Scalar(1) - t);
  for (int k = 0; k < 2; ++k) {
    s(2 * mode_i + k, 2 * mode_i + k) = a;
    s(2 * mode_i + k, 2 * mode_j + k) = b;
    s(2 * mode_j + k, 2 * mode_i + k) = -b;
    s(2 * mode_j + k, 2 * mode_j + k) = a;
  }
  return s;
}

// Phase-space rotation of a single mode by angle theta (passive optics).
template <class Scalar = double>
Mat<Scalar> mode_rotation(Scalar theta, Index mode, Index n_modes) {
  if (mode < 0 || mode >= n_modes)
    throw dimension_error("mode_rotation: invalid mode index");
  Mat<Scalar> s = Mat<Scalar>::Identity(2 * n_modes, 2 * n_modes);
  const Scalar c = std::cos(theta), sn = std::sin(theta);
  s(2 * mode, 2 * mode) = c;
  s(2 * mode, 2 * mode + 1) = sn;
  s(2 * mode + 1, 2 * mode) = -sn;
  s(2 * mode + 1, 2 * mode + 1) = c;
  return s;
}

// ---------------------------------------------------------------------------
// Validation

template <class Derived>
void require_covariance(const Eigen::MatrixBase<Derived>& sigma,
                        double symmetry_rel = tol::symmetry_rel) {
  if (sigma.rows() != sigma.cols() || sigma.rows() % 2 != 0 || sigma.rows() == 0)
    throw dimension_error("covariance matrix must be square with even dimension");
  const double scale = std::max(1.0, sigma.template lpNorm<Eigen::Infinity>());
  const double asym = (sigma - sigma.transpose()).template lpNorm<Eigen::Infinity>();
  if (asym > symmetry_rel * scale)
    throw error("covariance matrix is not symmetric (asymmetry " +
                std::to_string(asym) + ")");
}

template <class Derived>
bool is_symplectic(const Eigen::MatrixBase<Derived>& s,
                   double tolerance = tol::symplectic) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) return false;
  const Matd w = omega<typename Derived::Scalar>(s.rows() / 2);
  return ((s * w * s.transpose()) - w).template lpNorm<Eigen::Infinity>() <=
         tolerance;
}

// Congruence transform sigma -> S sigma S^T with a symplectic check.
template <class DerivedS, class DerivedSig>
Matd apply_symplectic(const Eigen::MatrixBase<DerivedS>& s,
                      const Eigen::MatrixBase<DerivedSig>& sigma) {
  if (s.rows() != sigma.rows())
    throw dimension_error("apply_symplectic: dimension mismatch");
  require_covariance(sigma);
  if (!is_symplectic(s))
    throw error("apply_symplectic: transform is not symplectic");
  Matd out = s * sigma * s.transpose();
  out = ((out + out.transpose()) / 2.0).eval();  // remove round-off asymmetry
  return out;
}

// ---------------------------------------------------------------------------
// Symplectic spectrum and entropy

// Symplectic eigenvalues of a covariance matrix: the moduli of the ordinary
// eigenvalues of Omega * Sigma, which occur in pairs (+i nu, -i nu). Returns
// the N values sorted in descending order. Throws if the pairing is broken
// beyond `pairing_tol` (signals a matrix far from symmetric/physical).
inline std::vector<double> symplectic_eigenvalues(
    const Matd& sigma, double pairing_tol = tol::eigen_pairing) {
  require_covariance(sigma);
  const Index n = sigma.rows() / 2;
  Eigen::EigenSolver<Matd> solver(omega<double>(n) * sigma, false);
  if (solver.info() != Eigen::Success)
    throw numerical_error("symplectic_eigenvalues: eigensolver failed");
  std::vector<double> mods(2 * n);
  for (Index k = 0; k < 2 * n; ++k) mods[k] = std::abs(solver.eigenvalues()[k]);
  std::sort(mods.begin(), mods.end(), std::greater<>());
  std::vector<double> out(n);
  for (Index k = 0; k < n; ++k) {
    const double hi = mods[2 * k], lo = mods[2 * k + 1];
    if (hi - lo > pairing_tol * std::max(1.0, hi))
      throw numerical_error("symplectic_eigenvalues: eigenvalue moduli do not pair");
    out[k] = (hi + lo) / 2.0;
  }
  return out;
}

// Symplectic eigenvalues of the standard two-mode form
// [[a I, c sigma_z], [c sigma_z, b I]] in closed form:
// nu_{1,2} = (z +- (b - a)) / 2 with z = sqrt((a+b)^2 - 4 c^2).
// Returned as (nu1, nu2) = (larger-with-b, counterpart); both >= 0.
inline std::pair<double, double> two_mode_symplectic_eigenvalues(double a,
                                                                 double b,
                                                                 double c) {
  const double disc = (a + b) * (a + b) - 4.0 * c * c;
  if (disc < 0.0)
    throw physicality_error("two_mode_symplectic_eigenvalues: (a+b)^2 < 4c^2");
  const double z = std::sqrt(disc);
  return {(z + (b - a)) / 2.0, (z - (b - a)) / 2.0};
}

// Entropy contribution of one symplectic eigenvalue, in bits:
// g(nu) = ((nu+1)/2) log2((nu+1)/2) - ((nu-1)/2) log2((nu-1)/2), g(1) = 0.
inline double g_entropy(double nu, double physicality = tol::physicality) {
  if (nu < 1.0 - physicality)
    throw physicality_error("g_entropy: symplectic eigenvalue < 1");
  if (nu - 1.0 < 1e-12) return 0.0;  // continuity limit, avoids 0*log 0
  const double up = (nu + 1.0) / 2.0, dn = (nu - 1.0) / 2.0;
  return up * std::log2(up) - dn * std::log2(dn);
}

// Von Neumann entropy S = sum_i g(nu_i) in bits.
inline double von_neumann_entropy(const Matd& sigma) {
  double s = 0.0;
  for (double nu : symplectic_eigenvalues(sigma)) s += g_entropy(nu);
  return s;
}

// True when every symplectic eigenvalue is >= 1 - tolerance.
inline bool is_physical(const Matd& sigma,
                        double tolerance = tol::physicality) {
  auto nus = symplectic_eigenvalues(sigma);
  return std::all_of(nus.begin(), nus.end(),
                     [&](double nu) { return nu >= 1.0 - tolerance; });
}

// ---------------------------------------------------------------------------
// Partial (conditional) measurements

namespace detail {
inline std::vector<Index> rows_without_mode(Index n_modes, Index mode) {
  std::vector<Index> keep;
  keep.reserve(2 * (n_modes - 1));
  for (Index m = 0; m < n_modes; ++m) {
    if (m == mode) continue;
    keep.push_back(2 * m);
    keep.push_back(2 * m + 1);
  }
  return keep;
}
}  // namespace detail

// Marginal state with one mode traced out (rows/columns removed).
inline Matd drop_mode(const Matd& sigma, Index mode) {
  require_covariance(sigma);
  const Index n = sigma.rows() / 2;
  if (mode < 0 || mode >= n)
    throw dimension_error("drop_mode: invalid mode index");
  const auto keep = detail::rows_without_mode(n, mode);
  Matd out(keep.size(), keep.size());
  for (size_t r = 0; r < keep.size(); ++r)
    for (size_t c = 0; c < keep.size(); ++c)
      out(static_cast<Index>(r), static_cast<Index>(c)) =
          sigma(keep[r], keep[c]);
  return out;
}

// Conditional state of the remaining modes after an ideal homodyne
// measurement of one quadrature of `measured_mode`:
//   Sigma' = Sigma_A - (1/V_B) * c c^T,
// where V_B is the measured-quadrature variance and c the corresponding
// cross-covariance column (the rank-one form of the pseudoinverse rule).
inline Matd partial_homodyne(const Matd& sigma, Index measured_mode,
                             Quadrature quadrature) {
  require_covariance(sigma);
  const Index n = sigma.rows() / 2;
  if (measured_mode < 0 || measured_mode >= n)
    throw dimension_error("partial_homodyne: invalid mode index");
  const Index col = 2 * measured_mode + static_cast<Index>(quadrature);
  const double v_b = sigma(col, col);
  if (v_b <= tol::degenerate_variance)
    throw error("partial_homodyne: measured variance is degenerate");
  const auto keep = detail::rows_without_mode(n, measured_mode);
  Matd a(keep.size(), keep.size());
  Vecd c(keep.size());
  for (size_t r = 0; r < keep.size(); ++r) {
    c(static_cast<Index>(r)) = sigma(keep[r], col);
    for (size_t cidx = 0; cidx < keep.size(); ++cidx)
      a(static_cast<Index>(r), static_cast<Index>(cidx)) =
          sigma(keep[r], keep[cidx]);
  }
  Matd out = a - (c * c.transpose()) / v_b;
  return ((out + out.transpose()) / 2.0).eval();
}

// Conditional state of the remaining modes after an ideal heterodyne
// measurement (both quadratures) of `measured_mode`:
//   Sigma' = Sigma_A - Sigma_C (Sigma_B + I)^{-1} Sigma_C^T.
inline Matd partial_heterodyne(const Matd& sigma, Index measured_mode) {
  require_covariance(sigma);
  const Index n = sigma.rows() / 2;
  if (measured_mode < 0 || measured_mode >= n)
    throw dimension_error("partial_heterodyne: invalid mode index");
  const auto keep = detail::rows_without_mode(n, measured_mode);
  const Index b0 = 2 * measured_mode;
  Eigen::Matrix2d b = sigma.block<2, 2>(b0, b0) + Eigen::Matrix2d::Identity();
  Matd a(keep.size(), keep.size());
  Matd c(keep.size(), 2);
  for (size_t r = 0; r < keep.size(); ++r) {
    c(static_cast<Index>(r), 0) = sigma(keep[r], b0);
    c(static_cast<Index>(r), 1) = sigma(keep[r], b0 + 1);
    for (size_t cidx = 0; cidx < keep.size(); ++cidx)
      a(static_cast<Index>(r), static_cast<Index>(cidx)) =
          sigma(keep[r], keep[cidx]);
  }
  Matd out = a - c * b.inverse() * c.transpose();
  return ((out + out.transpose()) / 2.0).eval();
}

}  // namespace cvqkd
