#ifndef BSDPI_DIVERGENCES_HPP
#define BSDPI_DIVERGENCES_HPP

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "bsdpi/matcore.hpp"
#include "bsdpi/quadrature.hpp"
#include "bsdpi/states.hpp"

namespace bsdpi {

enum class FamilyTag { XLogX, NegPower, Square, NegLogTranspose };

/// Operator convex f together with f̃(x) = x f(1/x) and, where known, the
/// constants (C, α) of the lower bound on the density of the measure of −f̃.
struct FDivFamily {
  FamilyTag tag = FamilyTag::XLogX;
  double beta = 0.0;  // NegPower only
  ScalarFunction f;
  ScalarFunction f_transpose;
  std::optional<double> measure_C;
  std::optional<double> measure_alpha;
  std::string name;
};

namespace families {

inline FDivFamily xlogx()
{
  FDivFamily fam;
  fam.tag = FamilyTag::XLogX;
  fam.f = {[](double x) { return x > 0.0 ? x * std::log(x) : 0.0; }, 0.0,
           std::numeric_limits<double>::infinity(), true, "x log x"};
  fam.f_transpose = {[](double x) { return -std::log(x); }, 0.0, std::numeric_limits<double>::infinity(), false,
                     "-log x"};
  fam.measure_C = 1.0;
  fam.measure_alpha = 0.0;
  fam.name = "xlogx";
  return fam;
}

/// f(x) = −log x, whose transpose is x log x.
inline FDivFamily neg_log_transpose()
{
  FDivFamily fam = xlogx();
  std::swap(fam.f, fam.f_transpose);
  fam.tag = FamilyTag::NegLogTranspose;
  fam.measure_C.reset();
  fam.measure_alpha.reset();
  fam.name = "neglog";
  return fam;
}

inline double power_measure_c(double beta)
{
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorKind::BadBeta, "power family needs 0 < beta < 1");
  }
  return std::numbers::pi / std::sin(std::numbers::pi * beta);
}

/// f(x) = −x^{1−β}, f̃(x) = −x^β.
inline FDivFamily neg_power(double beta)
{
  FDivFamily fam;
  fam.tag = FamilyTag::NegPower;
  fam.beta = beta;
  fam.measure_C = power_measure_c(beta);
  fam.measure_alpha = beta / 2.0;
  fam.f = {[beta](double x) { return -std::pow(x, 1.0 - beta); }, 0.0, std::numeric_limits<double>::infinity(),
           true, "-x^(1-beta)"};
  fam.f_transpose = {[beta](double x) { return -std::pow(x, beta); }, 0.0,
                     std::numeric_limits<double>::infinity(), true, "-x^beta"};
  fam.name = "negpower:" + std::to_string(beta);
  return fam;
}

/// f(x) = x², f̃(x) = 1/x.
inline FDivFamily square()
{
  FDivFamily fam;
  fam.tag = FamilyTag::Square;
  fam.f = {[](double x) { return x * x; }, 0.0, std::numeric_limits<double>::infinity(), true, "x^2"};
  fam.f_transpose = {[](double x) { return 1.0 / x; }, 0.0, std::numeric_limits<double>::infinity(), false,
                     "1/x"};
  fam.name = "square";
  return fam;
}

/// The family with f and f̃ exchanged; measure constants do not carry over.
inline FDivFamily transpose(const FDivFamily& fam)
{
  if (fam.tag == FamilyTag::XLogX) {
    return neg_log_transpose();
  }
  if (fam.tag == FamilyTag::NegLogTranspose) {
    return xlogx();
  }
  if (fam.tag == FamilyTag::NegPower) {
    return neg_power(1.0 - fam.beta);
  }
  FDivFamily out = fam;
  std::swap(out.f, out.f_transpose);
  out.measure_C.reset();
  out.measure_alpha.reset();
  out.name = "transpose(" + fam.name + ")";
  return out;
}

} // namespace families

// ---------------------------------------------------------------------------
// Input checks. Divergence entry points take PSD matrices of any trace.

inline void require_psd(const Matrix& a, const char* what)
{
  require_square(a, what);
  if (!is_hermitian(a)) {
    throw Error(ErrorKind::NotHermitian, std::string(what) + " is not Hermitian");
  }
  if (clipped(herm_eig(a).values).minCoeff() < 0.0) {
    throw Error(ErrorKind::NotPsd, std::string(what) + " has a negative eigenvalue");
  }
}

inline void require_full_rank(const HermitianEigenSystem& sys, const char* what)
{
  if (numerical_rank(sys) != sys.values.size()) {
    throw Error(ErrorKind::SingularState, std::string(what) + " is not full rank");
  }
}

// ---------------------------------------------------------------------------
// Standard f-divergence

/// S_f(σ‖ρ) = Σ_ij μ_j f(λ_i/μ_j) |⟨u_i, v_j⟩|² with σ = Σ λ_i u_i u_i*, ρ = Σ μ_j v_j v_j*.
inline double standard_f(const Matrix& sigma, const Matrix& rho, const FDivFamily& fam)
{
  require_same_shape(sigma, rho, "standard_f");
  require_psd(sigma, "sigma");
  require_psd(rho, "rho");
  const HermitianEigenSystem s = herm_eig(sigma);
  const HermitianEigenSystem r = herm_eig(rho);
  require_full_rank(s, "sigma");
  require_full_rank(r, "rho");
  const RealVector lam = clipped(s.values);
  const RealVector mu = r.values;
  const Matrix overlap = s.vectors.adjoint() * r.vectors;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    for (Eigen::Index j = 0; j < mu.size(); ++j) {
      acc += mu(j) * fam.f(lam(i) / mu(j)) * std::norm(overlap(i, j));
    }
  }
  return acc;
}

inline double standard_f(const DensityMatrix& sigma, const DensityMatrix& rho, const FDivFamily& fam)
{
  return standard_f(sigma.mat(), rho.mat(), fam);
}

/// D(σ‖ρ) = tr[σ(log σ − log ρ)] on the supports; +∞ when σ⁰ ⊄ ρ⁰.
inline double relative_entropy(const Matrix& sigma, const Matrix& rho)
{
  require_same_shape(sigma, rho, "relative_entropy");
  require_psd(sigma, "sigma");
  require_psd(rho, "rho");
  if (!support_included(sigma, rho)) {
    return std::numeric_limits<double>::infinity();
  }
  const HermitianEigenSystem s = herm_eig(sigma);
  double entropy_part = 0.0;
  const double top = s.max_value();
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    const double l = s.values(i);
    if (top > 0.0 && l >= tol::rank * top) {
      entropy_part += l * std::log(l);
    }
  }
  const Matrix log_rho = support_spectral(herm_eig(rho), [](double x) { return std::log(x); });
  return entropy_part - hs_inner(sigma, log_rho).real();
}

inline double relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho)
{
  return relative_entropy(sigma.mat(), rho.mat());
}

// ---------------------------------------------------------------------------
// Maximal f-divergence

/// Ŝ_f(σ‖ρ) = tr[ρ^{1/2} f(ρ^{-1/2} σ ρ^{-1/2}) ρ^{1/2}]
inline double maximal_f(const Matrix& sigma, const Matrix& rho, const FDivFamily& fam)
{
  require_same_shape(sigma, rho, "maximal_f");
  require_psd(sigma, "sigma");
  require_psd(rho, "rho");
  const HermitianEigenSystem r = herm_eig(rho);
  require_full_rank(r, "rho");
  require_full_rank(herm_eig(sigma), "sigma");
  // work in the eigenbasis of ρ, where ρ^{±1/2} are diagonal scalings
  const RealVector mu = r.values;
  const RealVector scale = mu.cwiseSqrt().cwiseInverse();
  const Matrix inner =
      hermitian_part(scale.asDiagonal() * (r.vectors.adjoint() * sigma * r.vectors) * scale.asDiagonal());
  const Matrix fx = matrix_fn(inner, fam.f);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    acc += mu(j) * fx(j, j).real();
  }
  return acc;
}

inline double maximal_f(const DensityMatrix& sigma, const DensityMatrix& rho, const FDivFamily& fam)
{
  return maximal_f(sigma.mat(), rho.mat(), fam);
}

/// Ŝ_BS(σ‖ρ) = −tr[σ log Γ], Γ = σ^{-1/2} ρ σ^{-1/2}, evaluated on the common
/// support. Accepts PSD inputs of any trace.
inline double bs_entropy(const Matrix& sigma, const Matrix& rho)
{
  require_same_shape(sigma, rho, "bs_entropy");
  require_psd(sigma, "sigma");
  require_psd(rho, "rho");
  if (!same_support(sigma, rho)) {
    throw Error(ErrorKind::SupportMismatch, "bs_entropy: sigma and rho have different supports");
  }
  const HermitianEigenSystem s = herm_eig(sigma);
  const int r = numerical_rank(s);
  if (r == 0) {
    return 0.0;
  }
  Matrix sigma_r;
  Matrix rho_r;
  if (r == sigma.rows()) {
    sigma_r = sigma;
    rho_r = rho;
  } else {
    const Matrix w = s.vectors.rightCols(r);
    sigma_r = hermitian_part(w.adjoint() * sigma * w);
    rho_r = hermitian_part(w.adjoint() * rho * w);
  }
  const HermitianEigenSystem sr = herm_eig(sigma_r);
  const Matrix s_inv_half = inv_sqrt_psd(sr);
  const Matrix g = hermitian_part(s_inv_half * rho_r * s_inv_half);
  const Matrix log_g = matrix_fn(g, functions::log());
  return -hs_inner(sigma_r, log_g).real();
}

inline double bs_entropy(const DensityMatrix& sigma, const DensityMatrix& rho)
{
  return bs_entropy(sigma.mat(), rho.mat());
}

// ---------------------------------------------------------------------------
// ε-regularisation with Richardson extrapolation

enum class DivergenceKind { Standard, Maximal };

inline constexpr std::array<double, 4> regularization_eps = {1e-4, 1e-5, 1e-6, 1e-7};

struct RegularizedValue {
  double value = 0.0;           // extrapolated from the three smallest ε
  double last_increment = 0.0;  // |R(1e-7) − R(1e-6)|
  double prev_increment = 0.0;  // |R(1e-6) − R(1e-5)|
  std::array<double, 4> raw{};  // values at regularization_eps
};

/// First-order Richardson on the ε-ladder: R_k = (10 v(ε_k) − v(ε_{k−1}))/9.
/// Throws Diverging when the extrapolants fail to contract (last increment
/// above half the previous one and above 1e-9).
inline RegularizedValue richardson(const std::array<double, 4>& raw)
{
  std::array<double, 3> r{};
  for (std::size_t k = 1; k < 4; ++k) {
    r[k - 1] = (10.0 * raw[k] - raw[k - 1]) / 9.0;
  }
  RegularizedValue out;
  out.raw = raw;
  out.value = r[2];
  out.prev_increment = std::abs(r[1] - r[0]);
  out.last_increment = std::abs(r[2] - r[1]);
  for (double v : raw) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::Diverging, "regularized divergence: non-finite value on the epsilon ladder");
    }
  }
  if (out.last_increment > 1e-9 && out.last_increment > 0.5 * out.prev_increment) {
    throw Error(ErrorKind::Diverging, "regularized divergence: extrapolants do not converge");
  }
  return out;
}

inline RegularizedValue regularized_divergence(const Matrix& sigma, const Matrix& rho, const FDivFamily& fam,
                                               DivergenceKind kind)
{
  require_same_shape(sigma, rho, "regularized_divergence");
  std::array<double, 4> raw{};
  for (std::size_t k = 0; k < regularization_eps.size(); ++k) {
    const Matrix s = regularize(sigma, regularization_eps[k]);
    const Matrix r = regularize(rho, regularization_eps[k]);
    raw[k] = kind == DivergenceKind::Standard ? standard_f(s, r, fam) : maximal_f(s, r, fam);
  }
  return richardson(raw);
}

inline RegularizedValue regularized_divergence(const DensityMatrix& sigma, const DensityMatrix& rho,
                                               const FDivFamily& fam, DivergenceKind kind)
{
  return regularized_divergence(sigma.mat(), rho.mat(), fam, kind);
}

// ---------------------------------------------------------------------------
// Quadrature route to Ŝ_BS
//
// −log x = ∫₀^∞ (1/(x+t) − 1/(1+t)) dt gives
//   Ŝ_BS(σ‖ρ) = ∫₀^∞ tr[σ (ρ + tσ)^{-1} σ] − tr[σ]/(1+t) dt,
// since ⟨σ^{1/2}, (Γ+t)^{-1} σ^{1/2}⟩ = tr[σ (ρ + tσ)^{-1} σ]. The integrand
// only needs linear solves, so this route shares no spectral code with
// bs_entropy. The spectrum of Γ comes from the generalized problem ρx = γσx.

struct QuadratureResult {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the neglected ∫_{t_max}^∞
  double t_max = 0.0;
};

namespace detail {

struct GammaRange {
  double lo;
  double hi;
};

inline GammaRange generalized_spectrum(const Matrix& sigma, const Matrix& rho)
{
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(rho, sigma, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularState, "bs_entropy_quadrature: sigma is not positive definite");
  }
  return {ges.eigenvalues().minCoeff(), ges.eigenvalues().maxCoeff()};
}

} // namespace detail

/// t_max ≤ 0 selects the smallest power of ten whose tail bound is ≤ tol/10.
inline QuadratureResult bs_entropy_quadrature(const Matrix& sigma, const Matrix& rho, double t_max, double tol)
{
  require_same_shape(sigma, rho, "bs_entropy_quadrature");
  require_psd(sigma, "sigma");
  require_psd(rho, "rho");
  require_full_rank(herm_eig(sigma), "sigma");
  require_full_rank(herm_eig(rho), "rho");

  const double tr_sigma = trace_real(sigma);
  const double tr_rho = trace_real(rho);
  const auto range = detail::generalized_spectrum(sigma, rho);
  const double dev = std::max(std::abs(range.hi - 1.0), std::abs(range.lo - 1.0));
  // Equal traces: the integrand is Σ w(1−γ)²/((γ+t)(1+t)²) up to an exact
  // 1/(1+t)² term of zero weight, giving a 1/T² tail; otherwise 1/T.
  const bool balanced = std::abs(tr_sigma - tr_rho) <= 1e-12 * std::max(1.0, tr_sigma);
  auto tail = [&](double t) {
    return balanced ? tr_sigma * dev * dev / (2.0 * t * t) : tr_sigma * dev / t;
  };
  if (!(t_max > 0.0)) {
    t_max = 10.0;
    while (tail(t_max) > tol / 10.0 && t_max < 1e15) {
      t_max *= 10.0;
    }
  }

  auto integrand = [&](double t) {
    const Eigen::LLT<Matrix> llt(rho + t * sigma);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::SingularState, "bs_entropy_quadrature: rho + t sigma is not positive definite");
    }
    const double resolvent = trace_real(sigma * llt.solve(sigma));
    return resolvent - tr_sigma / (1.0 + t);
  };
  std::vector<double> cuts;
  for (double b = 1e-3; b < t_max; b *= 10.0) {
    cuts.push_back(b);
  }
  QuadratureResult out;
  out.t_max = t_max;
  out.tail_bound = tail(t_max);
  out.value = integrate_adaptive(integrand, 0.0, t_max, tol / 2.0, cuts);
  return out;
}

inline QuadratureResult bs_entropy_quadrature(const DensityMatrix& sigma, const DensityMatrix& rho, double t_max,
                                              double tol)
{
  return bs_entropy_quadrature(sigma.mat(), rho.mat(), t_max, tol);
}

} // namespace bsdpi

#endif // BSDPI_DIVERGENCES_HPP
