#ifndef BSDPI_RECOVERY_HPP
#define BSDPI_RECOVERY_HPP

#include <cstdint>
#include <cstring>
#include <utility>
#include <vector>

#include "bsdpi/channels.hpp"
#include "bsdpi/divergences.hpp"
#include "bsdpi/matcore.hpp"
#include "bsdpi/states.hpp"

namespace bsdpi {

namespace detail {

/// Throws SingularState unless X lives on the support of σ_T (both sides).
inline void require_on_support(const Matrix& sigma_t, const Matrix& x, const char* what)
{
  const HermitianEigenSystem sys = herm_eig(sigma_t);
  if (numerical_rank(sys) == 0) {
    throw Error(ErrorKind::SingularState, std::string(what) + ": T(sigma) vanishes");
  }
  const Matrix off = identity(sigma_t.rows()) - support_projector(sys);
  const double scale = std::max(1.0, x.norm());
  if ((off * x).norm() > tol::support_inclusion * scale || (x * off).norm() > tol::support_inclusion * scale) {
    throw Error(ErrorKind::SingularState, std::string(what) + ": argument leaves the support of T(sigma)");
  }
}

} // namespace detail

/// R(X) = σ^{1/2} T*(σ_T^{-1/2} X σ_T^{-1/2}) σ^{1/2}
inline Matrix petz_recovery(const KrausChannel& t, const Matrix& sigma, const Matrix& x)
{
  const Matrix sigma_t = hermitian_part(bsdpi::apply(t, sigma));
  detail::require_on_support(sigma_t, x, "petz_recovery");
  const Matrix s_t = inv_sqrt_psd(sigma_t);
  const Matrix s_half = sqrt_psd(sigma);
  return s_half * adjoint_apply(t, s_t * x * s_t) * s_half;
}

inline Matrix petz_recovery(const KrausChannel& t, const DensityMatrix& sigma, const Matrix& x)
{
  return petz_recovery(t, sigma.mat(), x);
}

/// B(X) = σ T*(σ_T⁻¹ X); trace preserving, not completely positive.
inline Matrix bs_recovery(const KrausChannel& t, const Matrix& sigma, const Matrix& x)
{
  const Matrix sigma_t = hermitian_part(bsdpi::apply(t, sigma));
  detail::require_on_support(sigma_t, x, "bs_recovery");
  return sigma * adjoint_apply(t, pinv(sigma_t) * x);
}

inline Matrix bs_recovery(const KrausChannel& t, const DensityMatrix& sigma, const Matrix& x)
{
  return bs_recovery(t, sigma.mat(), x);
}

struct RecoveryReport {
  double gap_bs = 0.0;
  double residual_eq2 = 0.0;
  double residual_eq3 = 0.0;
  double residual_bs_recovery = 0.0;
  double residual_petz = 0.0;
  double renyi2_gap = 0.0;
  double gamma_sup = 0.0;
  std::uint64_t sigma_hash = 0;
  std::uint64_t rho_hash = 0;
  std::uint64_t channel_hash = 0;

  /// Threshold 1e-8·(1 + ‖Γ‖∞) applied to the BS-level quantities.
  double equality_threshold() const { return 1e-8 * (1.0 + gamma_sup); }

  bool bs_equality() const
  {
    const double thr = equality_threshold();
    return std::abs(gap_bs) <= thr && residual_eq2 <= thr && residual_eq3 <= thr && residual_bs_recovery <= thr &&
           std::abs(renyi2_gap) <= thr;
  }

  bool petz_recoverable() const { return residual_petz <= equality_threshold(); }
};

/// 64-bit FNV-1a over the raw bytes of the entries (column-major).
inline std::uint64_t fnv1a(const Matrix& m, std::uint64_t h = 0xcbf29ce484222325ULL)
{
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    double parts[2] = {m.data()[k].real(), m.data()[k].imag()};
    unsigned char bytes[sizeof(parts)];
    std::memcpy(bytes, parts, sizeof(parts));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

inline std::uint64_t fnv1a(const KrausChannel& t)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& k : t.kraus()) {
    h = fnv1a(k, h);
  }
  return h;
}

/// V σ^{1/2} V* (σ_T^{-1/2} Γ_T^{1/2} σ_T^{1/2} ⊗ I) − V Γ^{1/2} σ^{1/2} V*, Moore-Penrose throughout.
inline double stinespring_residual(const Matrix& sigma, const Matrix& rho, const KrausChannel& t)
{
  const StinespringIsometry v = stinespring(t);
  const Matrix sigma_t = hermitian_part(bsdpi::apply(t, sigma));
  const Matrix rho_t = hermitian_part(bsdpi::apply(t, rho));
  const Matrix g = gamma(sigma, rho).mat;
  const Matrix g_t = gamma(sigma_t, rho_t).mat;
  const Matrix inner = inv_sqrt_psd(sigma_t) * sqrt_psd(g_t) * sqrt_psd(sigma_t);
  const Matrix lhs = v.v * sqrt_psd(sigma) * v.v.adjoint() * v.lift(inner);
  const Matrix rhs = v.v * sqrt_psd(g) * sqrt_psd(sigma) * v.v.adjoint();
  return (lhs - rhs).norm();
}

/// ‖ρ − σ T*(σ_T⁻¹ ρ_T)‖₂
inline double bs_recovery_residual(const Matrix& sigma, const Matrix& rho, const KrausChannel& t)
{
  const Matrix sigma_t = hermitian_part(bsdpi::apply(t, sigma));
  const Matrix rho_t = hermitian_part(bsdpi::apply(t, rho));
  return (rho - sigma * adjoint_apply(t, pinv(sigma_t) * rho_t)).norm();
}

/// tr[σ² ρ⁻¹] with ρ⁻¹ the Moore-Penrose inverse.
inline double renyi2_trace(const Matrix& sigma, const Matrix& rho)
{
  return hs_inner(sigma, pinv(rho) * sigma).real();
}

/// Every equality witness for (σ, ρ) under T. Inputs need equal supports.
///
/// residual_eq2 is evaluated as ‖σ⁰ (T*(σ_T⁻¹ρ_T) − σ⁻¹ρ) σ⁰‖₂, which is the
/// plain norm for full-rank σ.
inline RecoveryReport equality_residuals(const Matrix& sigma, const Matrix& rho, const KrausChannel& t)
{
  if (sigma.rows() != t.d_in() || rho.rows() != t.d_in()) {
    throw Error(ErrorKind::DimMismatch, "equality_residuals: state and channel dimensions differ");
  }
  if (!same_support(sigma, rho)) {
    throw Error(ErrorKind::SupportMismatch, "equality_residuals: sigma and rho have different supports");
  }
  const Matrix sigma_t = hermitian_part(bsdpi::apply(t, sigma));
  const Matrix rho_t = hermitian_part(bsdpi::apply(t, rho));
  if (numerical_rank(sigma_t) == 0) {
    throw Error(ErrorKind::SingularState, "equality_residuals: T(sigma) vanishes");
  }
  const HermitianEigenSystem s_sys = herm_eig(sigma);
  const Matrix p = support_projector(s_sys);

  RecoveryReport rep;
  rep.gap_bs = bs_entropy(sigma, rho) - bs_entropy(sigma_t, rho_t);
  const Matrix lifted = adjoint_apply(t, pinv(sigma_t) * rho_t);
  rep.residual_eq2 = (p * (lifted - pinv(s_sys) * rho) * p).norm();
  rep.residual_eq3 = stinespring_residual(sigma, rho, t);
  rep.residual_bs_recovery = (rho - sigma * lifted).norm();
  rep.residual_petz = schatten_norm(sigma - petz_recovery(t, rho, sigma_t), Schatten::One);
  rep.renyi2_gap = renyi2_trace(sigma, rho) - renyi2_trace(sigma_t, rho_t);
  rep.gamma_sup = gamma(sigma, rho).sup_norm;
  rep.sigma_hash = fnv1a(sigma);
  rep.rho_hash = fnv1a(rho);
  rep.channel_hash = fnv1a(t);
  return rep;
}

inline RecoveryReport equality_residuals(const DensityMatrix& sigma, const DensityMatrix& rho, const KrausChannel& t)
{
  return equality_residuals(sigma.mat(), rho.mat(), t);
}

struct CondExpResiduals {
  double r_recovery = 0.0;  // ‖ρ − σ σ_N⁻¹ ρ_N‖₂
  double r_strange = 0.0;   // ‖σ^{1/2} σ_N^{-1/2} Γ_N^{1/2} σ_N^{1/2} − Γ^{1/2} σ^{1/2}‖₂
};

inline CondExpResiduals condexp_equality_residuals(const Matrix& sigma, const Matrix& rho,
                                                   const ConditionalExpectation& e)
{
  const HermitianEigenSystem s_sys = herm_eig(sigma);
  require_full_rank(s_sys, "sigma");
  require_full_rank(herm_eig(rho), "rho");
  const Matrix sigma_n = hermitian_part(cond_exp_apply(e, sigma));
  const Matrix rho_n = hermitian_part(cond_exp_apply(e, rho));
  const HermitianEigenSystem sn_sys = herm_eig(sigma_n);
  const Matrix g = gamma(sigma, rho).mat;
  const Matrix g_n = gamma(sigma_n, rho_n).mat;
  const Matrix s_half = sqrt_psd(s_sys);

  CondExpResiduals out;
  out.r_recovery = (rho - sigma * pinv(sn_sys) * rho_n).norm();
  out.r_strange = (s_half * inv_sqrt_psd(sn_sys) * sqrt_psd(g_n) * sqrt_psd(sn_sys) - sqrt_psd(g) * s_half).norm();
  return out;
}

inline CondExpResiduals condexp_equality_residuals(const DensityMatrix& sigma, const DensityMatrix& rho,
                                                   const ConditionalExpectation& e)
{
  return condexp_equality_residuals(sigma.mat(), rho.mat(), e);
}

// ---------------------------------------------------------------------------
// Constructed pairs with equality

struct FixedPair {
  DensityMatrix sigma;
  DensityMatrix rho;
  ConditionalExpectation e;
};

namespace detail {

inline RealVector random_probabilities(int d, CounterRng& rng)
{
  RealVector p(d);
  for (int i = 0; i < d; ++i) {
    p(i) = 0.05 + rng.uniform();
  }
  return p / p.sum();
}

} // namespace detail

/// σ, ρ diagonal in a random basis U, with E the pinching onto random blocks
/// of U; both states are E-fixed, so every equality condition holds.
inline FixedPair constructed_fixed_pair(int d, std::uint64_t seed)
{
  CounterRng rng(seed);
  const Matrix u = random_unitary(d, rng);
  const std::vector<int> blocks = random_block_sizes(d, rng);
  const RealVector p = detail::random_probabilities(d, rng);
  const RealVector q = detail::random_probabilities(d, rng);
  return {DensityMatrix::from_matrix(assemble(u, p)), DensityMatrix::from_matrix(assemble(u, q)),
          block_pinching(u, blocks)};
}

/// σ₁ ⊗ I/s and ρ₁ ⊗ I/s, fixed by the partial-trace conditional expectation.
inline FixedPair constructed_product_pair(int d_keep, int s, std::uint64_t seed)
{
  const DensityMatrix s1 = random_density(d_keep, d_keep, derive_seed(seed, 1));
  const DensityMatrix r1 = random_density(d_keep, d_keep, derive_seed(seed, 2));
  const Matrix mixed = identity(s) / static_cast<double>(s);
  return {DensityMatrix::from_matrix(kron(s1.mat(), mixed)), DensityMatrix::from_matrix(kron(r1.mat(), mixed)),
          ConditionalExpectation::partial_trace(d_keep, s)};
}

} // namespace bsdpi

#endif // BSDPI_RECOVERY_HPP
