#ifndef BSDPI_STATES_HPP
#define BSDPI_STATES_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "bsdpi/matcore.hpp"
#include "bsdpi/rng.hpp"

namespace bsdpi {

namespace tol {
/// Unit-trace check for DensityMatrix.
inline constexpr double trace = 1e-12;
/// ρ⁰ ≤ σ⁰ is accepted when ‖(I − σ⁰) ρ (I − σ⁰)‖∞ ≤ support_inclusion.
inline constexpr double support_inclusion = 1e-8;
} // namespace tol

/// Hermitian PSD unit-trace matrix with its numerical rank.
class DensityMatrix {
 public:
  /// Validates and stores the Hermitian part of `m`.
  static DensityMatrix from_matrix(const Matrix& m)
  {
    require_square(m, "density matrix");
    if (m.rows() == 0) {
      throw Error(ErrorKind::DimMismatch, "density matrix: empty");
    }
    if (!is_hermitian(m)) {
      throw Error(ErrorKind::NotHermitian, "density matrix is not Hermitian");
    }
    Matrix h = hermitian_part(m);
    const double tr = trace_real(h);
    if (std::abs(tr - 1.0) > tol::trace) {
      throw Error(ErrorKind::BadTrace, "density matrix trace " + std::to_string(tr) + " != 1");
    }
    const HermitianEigenSystem sys = herm_eig(h);
    if (clipped(sys.values).minCoeff() < 0.0) {
      throw Error(ErrorKind::NotPsd, "density matrix has a negative eigenvalue");
    }
    return DensityMatrix(std::move(h), numerical_rank(sys));
  }

  const Matrix& mat() const noexcept { return mat_; }
  int dim() const noexcept { return static_cast<int>(mat_.rows()); }
  int rank() const noexcept { return rank_; }
  bool full_rank() const noexcept { return rank_ == dim(); }

 private:
  DensityMatrix(Matrix m, int rank) : mat_(std::move(m)), rank_(rank) {}

  Matrix mat_;
  int rank_;
};

/// Γ = σ^{-1/2} ρ σ^{-1/2} (Moore-Penrose on singular σ) with ‖Γ‖∞.
struct GammaOperator {
  Matrix mat;
  double sup_norm;
};

/// Ginibre-induced state G G*/tr[G G*] with G a dim×rank complex Gaussian
/// matrix drawn from CounterRng(seed), column by column.
inline DensityMatrix random_density(int dim, int rank, std::uint64_t seed)
{
  if (dim < 1 || rank < 1 || rank > dim) {
    throw Error(ErrorKind::BadRank, "random_density: need 1 <= rank <= dim");
  }
  CounterRng rng(seed);
  const Matrix g = gaussian_matrix(dim, rank, rng);
  Matrix m = g * g.adjoint();
  m /= trace_real(m);
  return DensityMatrix::from_matrix(hermitian_part(m));
}

/// Random unitary: Q factor of a Gaussian matrix with the phases of diag(R) removed.
inline Matrix random_isometry(int rows, int cols, CounterRng& rng)
{
  const Matrix g = gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (int j = 0; j < cols; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) {
      q.col(j) *= r(j, j) / mag;
    }
  }
  return q;
}

inline Matrix random_unitary(int dim, CounterRng& rng) { return random_isometry(dim, dim, rng); }

/// Two states with the same rank-`rank` support: W σ₀ W*, W ρ₀ W* with W a random
/// dim×rank isometry and σ₀, ρ₀ full-rank Ginibre states.
inline std::pair<DensityMatrix, DensityMatrix> random_pair_common_support(int dim, int rank,
                                                                         std::uint64_t seed)
{
  if (dim < 1 || rank < 1 || rank > dim) {
    throw Error(ErrorKind::BadRank, "random_pair_common_support: need 1 <= rank <= dim");
  }
  CounterRng rng(seed);
  const Matrix w = random_isometry(dim, rank, rng);
  const DensityMatrix s0 = random_density(rank, rank, derive_seed(seed, 1));
  const DensityMatrix r0 = random_density(rank, rank, derive_seed(seed, 2));
  auto lift = [&](const Matrix& x) {
    Matrix m = hermitian_part(w * x * w.adjoint());
    m /= trace_real(m);
    return DensityMatrix::from_matrix(m);
  };
  return {lift(s0.mat()), lift(r0.mat())};
}

/// (A + εI)/(1 + ε·dim); the trace stays 1 for unit-trace A.
inline Matrix regularize(const Matrix& a, double eps)
{
  if (!(eps > 0.0)) {
    throw Error(ErrorKind::DomainViolation, "regularize: epsilon must be positive");
  }
  const auto d = static_cast<double>(a.rows());
  Matrix out = (a + eps * identity(a.rows())) / (1.0 + eps * d);
  return out;
}

inline DensityMatrix regularize(const DensityMatrix& rho, double eps)
{
  return DensityMatrix::from_matrix(regularize(rho.mat(), eps));
}

inline Matrix support_projector(const DensityMatrix& rho) { return support_projector(rho.mat()); }

/// ρ⁰ ≤ σ⁰ at the support-inclusion tolerance.
inline bool support_included(const Matrix& rho, const Matrix& sigma)
{
  require_same_shape(rho, sigma, "support_included");
  const Matrix off = identity(sigma.rows()) - support_projector(sigma);
  return schatten_norm(hermitian_part(off * rho * off), Schatten::Inf) <= tol::support_inclusion;
}

inline bool same_support(const Matrix& a, const Matrix& b)
{
  return support_included(a, b) && support_included(b, a);
}

/// Γ = σ^{-1/2} ρ σ^{-1/2}; requires ρ⁰ ≤ σ⁰.
inline GammaOperator gamma(const Matrix& sigma, const Matrix& rho)
{
  require_same_shape(sigma, rho, "gamma");
  if (!support_included(rho, sigma)) {
    throw Error(ErrorKind::SupportMismatch, "gamma: rho has weight outside the support of sigma");
  }
  const Matrix s = inv_sqrt_psd(sigma);
  Matrix g = hermitian_part(s * rho * s);
  const double sup = std::max(0.0, herm_eig(g).max_value());
  return {std::move(g), sup};
}

inline GammaOperator gamma(const DensityMatrix& sigma, const DensityMatrix& rho)
{
  return gamma(sigma.mat(), rho.mat());
}

} // namespace bsdpi

#endif // BSDPI_STATES_HPP
