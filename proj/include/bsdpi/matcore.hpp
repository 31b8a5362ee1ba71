#ifndef BSDPI_MATCORE_HPP
#define BSDPI_MATCORE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bsdpi/error.hpp"
#include "bsdpi/rng.hpp"

namespace bsdpi {

using cplx = std::complex<double>;
/// Dense complex matrix; the carrier for every operator in the library.
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
/// Hermiticity check: ‖A − A*‖₂ ≤ hermitian · max(1, ‖A‖₂).
inline constexpr double hermitian = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius mass drops below jacobi_off · ‖A‖₂.
inline constexpr double jacobi_off = 1e-14;
inline constexpr int jacobi_max_sweeps = 100;
/// Eigenvalues in (−clip · λ_max, 0) are treated as 0 by PSD-only functions.
inline constexpr double clip = 1e-12;
/// Numerical rank and support threshold, relative to λ_max.
inline constexpr double rank = 1e-10;
} // namespace tol

namespace testing_hooks {
/// Multiplies the Jacobi stopping threshold. Only the self-test fault
/// injection sets this away from 1.
inline std::atomic<double> jacobi_threshold_scale{1.0};
} // namespace testing_hooks

inline Matrix dagger(const Matrix& a) { return a.adjoint(); }

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

inline double frobenius(const Matrix& a) { return a.norm(); }

/// (A + A*)/2
inline Matrix hermitian_part(const Matrix& a)
{
  Matrix h = 0.5 * (a + a.adjoint());
  return h;
}

inline void require_square(const Matrix& a, const char* what)
{
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::DimMismatch, std::string(what) + " must be square");
  }
}

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* what)
{
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimMismatch, std::string(what) + ": operand shapes differ");
  }
}

inline bool is_hermitian(const Matrix& a, double rel_tol = tol::hermitian)
{
  if (a.rows() != a.cols()) {
    return false;
  }
  return (a - a.adjoint()).norm() <= rel_tol * std::max(1.0, a.norm());
}

/// Kronecker product A ⊗ B; index (i, a) of the product maps to i·dim(B) + a.
inline Matrix kron(const Matrix& a, const Matrix& b)
{
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Partial trace over the second tensor factor of a (d_keep·s)-dimensional operator.
inline Matrix partial_trace_second(const Matrix& x, Eigen::Index d_keep, Eigen::Index s)
{
  if (x.rows() != d_keep * s || x.cols() != d_keep * s) {
    throw Error(ErrorKind::DimMismatch, "partial trace: operator is not (d_keep*s) square");
  }
  Matrix out = Matrix::Zero(d_keep, d_keep);
  for (Eigen::Index i = 0; i < d_keep; ++i) {
    for (Eigen::Index j = 0; j < d_keep; ++j) {
      cplx acc = 0.0;
      for (Eigen::Index a = 0; a < s; ++a) {
        acc += x(i * s + a, j * s + a);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

/// Matrix of i.i.d. standard complex Gaussians, filled column by column.
inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, CounterRng& rng)
{
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      g(i, j) = rng.complex_gaussian();
    }
  }
  return g;
}

inline Matrix random_hermitian(Eigen::Index n, CounterRng& rng)
{
  return hermitian_part(gaussian_matrix(n, n, rng));
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition

struct HermitianEigenSystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns are orthonormal eigenvectors

  Matrix reconstruct() const
  {
    return vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint();
  }

  double max_value() const { return values.size() ? values(values.size() - 1) : 0.0; }
  double min_value() const { return values.size() ? values(0) : 0.0; }

  double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

namespace detail {

inline double off_diagonal_mass(const Matrix& a)
{
  double acc = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) {
        acc += std::norm(a(i, j));
      }
    }
  }
  return std::sqrt(acc);
}

// One complex Jacobi rotation G acting on the (p, q) plane, chosen so that
// (G* A G)_pq = 0. With a_pq = |a_pq| e^{iφ}:
//   G_pp = c, G_pq = s e^{iφ}, G_qp = −s e^{−iφ}, G_qq = c.
inline void jacobi_rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q)
{
  const cplx apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) {
    return;
  }
  const cplx phase = apq / mag;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const cplx gpq = s * phase;
  const cplx gqp = -s * std::conj(phase);

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = akp * c + akq * gqp;
    a(k, q) = akp * gpq + akq * c;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = c * apk + std::conj(gqp) * aqk;
    a(q, k) = std::conj(gpq) * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx vkp = v(k, p);
    const cplx vkq = v(k, q);
    v(k, p) = vkp * c + vkq * gqp;
    v(k, q) = vkp * gpq + vkq * c;
  }
}

} // namespace detail

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
inline HermitianEigenSystem herm_eig(const Matrix& input)
{
  require_square(input, "herm_eig input");
  if (!is_hermitian(input)) {
    throw Error(ErrorKind::NotHermitian, "herm_eig: input deviates from its adjoint");
  }
  const Eigen::Index n = input.rows();
  Matrix a = hermitian_part(input);
  Matrix v = Matrix::Identity(n, n);

  const double scale = a.norm();
  const double threshold = tol::jacobi_off * scale * testing_hooks::jacobi_threshold_scale.load();
  bool converged = scale == 0.0 || detail::off_diagonal_mass(a) <= threshold;
  for (int sweep = 0; sweep < tol::jacobi_max_sweeps && !converged; ++sweep) {
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        detail::jacobi_rotate(a, v, p, q);
      }
    }
    converged = detail::off_diagonal_mass(a) <= threshold;
  }
  if (!converged) {
    throw Error(ErrorKind::NoConvergence, "herm_eig: Jacobi sweep cap reached");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });

  HermitianEigenSystem sys;
  sys.values.resize(n);
  sys.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sys.values(k) = a(order[k], order[k]).real();
    sys.vectors.col(k) = v.col(order[k]);
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Spectral calculus

/// Real function with its (open, optionally left-closed) domain.
struct ScalarFunction {
  std::function<double(double)> eval;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  // The function has a finite value at lo itself (e.g. x log x at 0).
  bool lo_closed = false;
  std::string name;

  bool contains(double x) const
  {
    if (x > lo && x < hi) {
      return true;
    }
    return lo_closed && x == lo;
  }

  /// PSD-only functions get eigenvalue clipping before evaluation.
  bool psd_only() const { return lo >= 0.0; }

  double operator()(double x) const { return eval(x); }
};

namespace functions {

inline ScalarFunction identity()
{
  return {[](double x) { return x; }, -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), false, "identity"};
}

inline ScalarFunction sqrt()
{
  return {[](double x) { return std::sqrt(x); }, 0.0, std::numeric_limits<double>::infinity(), true,
          "sqrt"};
}

inline ScalarFunction log()
{
  return {[](double x) { return std::log(x); }, 0.0, std::numeric_limits<double>::infinity(), false,
          "log"};
}

inline ScalarFunction exp()
{
  return {[](double x) { return std::exp(x); }, -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), false, "exp"};
}

inline ScalarFunction square()
{
  return {[](double x) { return x * x; }, -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), false, "square"};
}

inline ScalarFunction inverse()
{
  return {[](double x) { return 1.0 / x; }, 0.0, std::numeric_limits<double>::infinity(), false,
          "inverse"};
}

} // namespace functions

/// Eigenvalues in (−clip·max|λ|, 0) set to 0.
inline RealVector clipped(const RealVector& values)
{
  const double scale = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  RealVector out = values;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) < 0.0 && out(i) > -tol::clip * scale) {
      out(i) = 0.0;
    }
  }
  return out;
}

inline Matrix assemble(const Matrix& vectors, const RealVector& diag)
{
  return hermitian_part(vectors * diag.cast<cplx>().asDiagonal() * vectors.adjoint());
}

/// U f(Λ) U* for Hermitian A = U Λ U*.
inline Matrix matrix_fn(const HermitianEigenSystem& sys, const ScalarFunction& f)
{
  RealVector values = f.psd_only() ? clipped(sys.values) : sys.values;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!f.contains(values(i))) {
      throw Error(ErrorKind::DomainViolation,
                  "matrix_fn: eigenvalue " + std::to_string(values(i)) + " outside domain of " + f.name);
    }
    values(i) = f(values(i));
  }
  return assemble(sys.vectors, values);
}

inline Matrix matrix_fn(const Matrix& a, const ScalarFunction& f)
{
  return matrix_fn(herm_eig(a), f);
}

/// Applies g to the eigenvalues that count as support (λ ≥ rank·λ_max > 0);
/// everything else maps to 0.
template <class G>
Matrix support_spectral(const HermitianEigenSystem& sys, G&& g)
{
  const double top = sys.max_value();
  RealVector values = RealVector::Zero(sys.values.size());
  if (top > 0.0) {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (sys.values(i) >= tol::rank * top) {
        values(i) = g(sys.values(i));
      }
    }
  }
  return assemble(sys.vectors, values);
}

/// Moore-Penrose inverse of a Hermitian PSD matrix.
inline Matrix pinv(const HermitianEigenSystem& sys)
{
  return support_spectral(sys, [](double x) { return 1.0 / x; });
}

inline Matrix pinv(const Matrix& a) { return pinv(herm_eig(a)); }

/// A^{1/2} with clipping.
inline Matrix sqrt_psd(const HermitianEigenSystem& sys) { return matrix_fn(sys, functions::sqrt()); }

inline Matrix sqrt_psd(const Matrix& a) { return sqrt_psd(herm_eig(a)); }

/// Moore-Penrose A^{-1/2}.
inline Matrix inv_sqrt_psd(const HermitianEigenSystem& sys)
{
  return support_spectral(sys, [](double x) { return 1.0 / std::sqrt(x); });
}

inline Matrix inv_sqrt_psd(const Matrix& a) { return inv_sqrt_psd(herm_eig(a)); }

/// Orthogonal projector onto the eigenspaces with λ ≥ rank·λ_max.
inline Matrix support_projector(const HermitianEigenSystem& sys)
{
  return support_spectral(sys, [](double) { return 1.0; });
}

inline Matrix support_projector(const Matrix& a) { return support_projector(herm_eig(a)); }

inline int numerical_rank(const HermitianEigenSystem& sys)
{
  const double top = sys.max_value();
  if (top <= 0.0) {
    return 0;
  }
  int r = 0;
  for (Eigen::Index i = 0; i < sys.values.size(); ++i) {
    r += sys.values(i) >= tol::rank * top ? 1 : 0;
  }
  return r;
}

inline int numerical_rank(const Matrix& a) { return numerical_rank(herm_eig(a)); }

/// Smallest eigenvalue on the support; its inverse is ‖A⁺‖∞.
inline double min_support_eigenvalue(const HermitianEigenSystem& sys)
{
  const double top = sys.max_value();
  for (Eigen::Index i = 0; i < sys.values.size(); ++i) {
    if (top > 0.0 && sys.values(i) >= tol::rank * top) {
      return sys.values(i);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Norms and inner product

enum class Schatten { One, Two, Inf };

/// Singular values: |λ| for Hermitian input, else sqrt of the spectrum of A*A.
inline RealVector singular_values(const Matrix& a)
{
  if (a.rows() == a.cols() && (a - a.adjoint()).norm() <= 1e-14 * a.norm()) {
    return herm_eig(a).values.cwiseAbs();
  }
  RealVector v = clipped(herm_eig(hermitian_part(a.adjoint() * a)).values);
  return v.cwiseMax(0.0).cwiseSqrt();
}

inline double schatten_norm(const Matrix& a, Schatten p)
{
  if (a.size() == 0) {
    return 0.0;
  }
  switch (p) {
    case Schatten::Two: return a.norm();
    case Schatten::One: return singular_values(a).sum();
    case Schatten::Inf: return singular_values(a).maxCoeff();
  }
  return 0.0;
}

/// ⟨A, B⟩ = tr[A* B]
inline cplx hs_inner(const Matrix& a, const Matrix& b)
{
  require_same_shape(a, b, "hs_inner");
  return (a.conjugate().cwiseProduct(b)).sum();
}

inline double trace_real(const Matrix& a) { return a.trace().real(); }

} // namespace bsdpi

#endif // BSDPI_MATCORE_HPP
