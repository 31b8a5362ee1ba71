#ifndef BSDPI_BOUNDS_HPP
#define BSDPI_BOUNDS_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <variant>

#include "bsdpi/channels.hpp"
#include "bsdpi/divergences.hpp"
#include "bsdpi/matcore.hpp"
#include "bsdpi/recovery.hpp"
#include "bsdpi/states.hpp"

namespace bsdpi {

// ---------------------------------------------------------------------------
// Constants

/// K_α = ((2α+1)/(2α+2))^{4(α+1)} (2α+1)^{-2} 4^{-(4α+2)} π^{4(α+1)}
inline double k_alpha(double alpha)
{
  if (!(alpha >= 0.0)) {
    throw Error(ErrorKind::DomainViolation, "k_alpha: alpha must be nonnegative");
  }
  const double a = 2.0 * alpha + 1.0;
  const double e = 4.0 * (alpha + 1.0);
  return std::pow(a / (a + 1.0), e) / (a * a) * std::pow(4.0, -(4.0 * alpha + 2.0)) * std::pow(std::numbers::pi, e);
}

/// L_α for the recovery-form bounds: K_α · 2^{-4(α+1)}.
inline double l_general(double alpha) { return k_alpha(alpha) * std::pow(2.0, -4.0 * (alpha + 1.0)); }

/// L_{β/2} = (1/4) ((β+1)/(β+2))^{2β+4} (β+1)^{-2} 8^{-2(β+1)} π^{2β+4}
inline double l_alpha(double beta)
{
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorKind::BadBeta, "l_alpha: need 0 < beta < 1");
  }
  const double b = beta + 1.0;
  const double e = 2.0 * beta + 4.0;
  return 0.25 * std::pow(b / (beta + 2.0), e) / (b * b) * std::pow(8.0, -2.0 * b) * std::pow(std::numbers::pi, e);
}

using families::power_measure_c;

// ---------------------------------------------------------------------------
// Reports

struct BoundConstants {
  double gamma_sup = 0.0;
  double sigma_inv_sup = 0.0;  // ‖σ⁻¹‖∞ (conditional expectations) or ‖σ_T⁻¹‖∞ (channels)
  double C = 1.0;
  double alpha = 0.0;
  double K = 0.0;
  double L = 0.0;
};

struct BoundReport {
  double gap = 0.0;
  double rhs_k = 0.0;       // Γ^{1/2}-residual form
  double rhs_l = 0.0;       // recovery-residual form
  double residual_k = 0.0;  // norm inside rhs_k
  double residual_l = 0.0;  // norm inside rhs_l
  double rhs = 0.0;         // max(rhs_k, rhs_l)
  double slack = 0.0;       // gap − rhs
  bool precondition_ok = true;
  bool regularized = false;
  double gap_increment = 0.0;  // last Richardson increment on the regularized route
  BoundConstants constants;

  /// slack ≥ −tol·(1 + gap); never asserted when the precondition fails.
  bool violates(double tol = 1e-8) const { return precondition_ok && slack < -tol * (1.0 + std::abs(gap)); }
};

namespace detail {

inline void finish(BoundReport& rep)
{
  rep.rhs = std::max(rep.rhs_k, rep.rhs_l);
  rep.slack = rep.gap - rep.rhs;
}

inline bool full_rank(const Matrix& a) { return numerical_rank(a) == a.rows(); }

struct GapValue {
  double value = 0.0;
  double increment = 0.0;
  bool regularized = false;
};

/// Ŝ_f(σ‖ρ) − Ŝ_f(σ_Q‖ρ_Q). Singular inputs or outputs go through the
/// ε-ladder with the same ε at both levels, extrapolating the differences.
inline GapValue divergence_gap(const Matrix& sigma, const Matrix& rho, const Matrix& sigma_q, const Matrix& rho_q,
                               const FDivFamily& fam)
{
  auto value = [&](const Matrix& s, const Matrix& r) {
    return fam.tag == FamilyTag::XLogX ? bs_entropy(s, r) : maximal_f(s, r, fam);
  };
  if (full_rank(sigma) && full_rank(rho) && full_rank(sigma_q) && full_rank(rho_q)) {
    return {value(sigma, rho) - value(sigma_q, rho_q), 0.0, false};
  }
  std::array<double, 4> raw{};
  for (std::size_t k = 0; k < regularization_eps.size(); ++k) {
    const double eps = regularization_eps[k];
    raw[k] = maximal_f(regularize(sigma, eps), regularize(rho, eps), fam) -
             maximal_f(regularize(sigma_q, eps), regularize(rho_q, eps), fam);
  }
  const RegularizedValue r = richardson(raw);
  return {r.value, r.last_increment, true};
}

inline double inverse_sup(const Matrix& a)
{
  const double m = min_support_eigenvalue(herm_eig(a));
  if (!(m > 0.0)) {
    throw Error(ErrorKind::SingularState, "inverse norm of a vanishing operator");
  }
  return 1.0 / m;
}

inline bool not_too_far(double gap, double gamma_sup, double c, double alpha)
{
  const double g = std::max(gap, 0.0);
  if (g == 0.0) {
    return true;
  }
  const double base = (2.0 * alpha + 1.0) * std::sqrt(c) / 4.0 * std::sqrt(g) / (1.0 + gamma_sup);
  return std::pow(base, 1.0 / (1.0 + alpha)) <= 1.0;
}

} // namespace detail

// ---------------------------------------------------------------------------
// BS-entropy bounds

/// Full-rank σ, ρ and a conditional expectation E onto N:
///   gap ≥ (π/4)⁴ ‖Γ‖∞⁻² r_strange⁴
///   gap ≥ (π/8)⁴ ‖Γ‖∞⁻⁴ ‖σ⁻¹‖∞⁻² ‖ρ − σσ_N⁻¹ρ_N‖₂⁴
inline BoundReport bs_bound_condexp(const Matrix& sigma, const Matrix& rho, const ConditionalExpectation& e)
{
  const CondExpResiduals res = condexp_equality_residuals(sigma, rho, e);
  const Matrix sigma_n = hermitian_part(cond_exp_apply(e, sigma));
  const Matrix rho_n = hermitian_part(cond_exp_apply(e, rho));

  BoundReport rep;
  rep.gap = bs_entropy(sigma, rho) - bs_entropy(sigma_n, rho_n);
  rep.constants.gamma_sup = gamma(sigma, rho).sup_norm;
  rep.constants.sigma_inv_sup = detail::inverse_sup(sigma);
  rep.constants.K = k_alpha(0.0);
  rep.constants.L = l_general(0.0);
  rep.residual_k = res.r_strange;
  rep.residual_l = res.r_recovery;
  const double g = rep.constants.gamma_sup;
  rep.rhs_k = rep.constants.K * std::pow(g, -2.0) * std::pow(res.r_strange, 4.0);
  rep.rhs_l = rep.constants.L * std::pow(g, -4.0) * std::pow(rep.constants.sigma_inv_sup, -2.0) *
              std::pow(res.r_recovery, 4.0);
  detail::finish(rep);
  return rep;
}

inline BoundReport bs_bound_condexp(const DensityMatrix& sigma, const DensityMatrix& rho,
                                    const ConditionalExpectation& e)
{
  return bs_bound_condexp(sigma.mat(), rho.mat(), e);
}

/// Channel version, ρ⁰ = σ⁰ required, Moore-Penrose inverses on singular states:
///   gap ≥ (π/4)⁴ ‖Γ‖∞⁻² ‖Vσ^{1/2}V*(σ_T^{-1/2}Γ_T^{1/2}σ_T^{1/2} ⊗ I) − VΓ^{1/2}σ^{1/2}V*‖₂⁴
///   gap ≥ (π/8)⁴ ‖Γ‖∞⁻⁴ ‖σ_T⁻¹‖∞⁻² ‖σT*(σ_T⁻¹ρ_T) − ρ‖₂⁴
inline BoundReport bs_bound_channel(const Matrix& sigma, const Matrix& rho, const KrausChannel& t)
{
  if (!same_support(sigma, rho)) {
    throw Error(ErrorKind::SupportMismatch, "bs_bound_channel: sigma and rho have different supports");
  }
  const Matrix sigma_t = hermitian_part(bsdpi::apply(t, sigma));
  const Matrix rho_t = hermitian_part(bsdpi::apply(t, rho));

  BoundReport rep;
  const detail::GapValue gap = detail::divergence_gap(sigma, rho, sigma_t, rho_t, families::xlogx());
  rep.gap = gap.value;
  rep.gap_increment = gap.increment;
  rep.regularized = gap.regularized;
  rep.constants.gamma_sup = gamma(sigma, rho).sup_norm;
  rep.constants.sigma_inv_sup = detail::inverse_sup(sigma_t);
  rep.constants.K = k_alpha(0.0);
  rep.constants.L = l_general(0.0);
  rep.residual_k = stinespring_residual(sigma, rho, t);
  rep.residual_l = bs_recovery_residual(sigma, rho, t);
  const double g = rep.constants.gamma_sup;
  rep.rhs_k = rep.constants.K * std::pow(g, -2.0) * std::pow(rep.residual_k, 4.0);
  rep.rhs_l = rep.constants.L * std::pow(g, -4.0) * std::pow(rep.constants.sigma_inv_sup, -2.0) *
              std::pow(rep.residual_l, 4.0);
  detail::finish(rep);
  return rep;
}

inline BoundReport bs_bound_channel(const DensityMatrix& sigma, const DensityMatrix& rho, const KrausChannel& t)
{
  return bs_bound_channel(sigma.mat(), rho.mat(), t);
}

// ---------------------------------------------------------------------------
// Maximal f-divergence bounds

using Reduction = std::variant<ConditionalExpectation, KrausChannel>;

/// (K_α/C)(1+‖Γ‖∞)^{-(4α+2)} res^{4(α+1)} and
/// (L_α/C)(1+‖Γ‖∞)^{-(4α+2)} ‖Γ‖∞^{-(2α+2)} ‖σ⁻¹‖∞^{-(2α+2)} r_rec^{4(α+1)},
/// with σ_T in place of σ in the second form for channels. The report is
/// flagged precondition_ok = false outside the not-too-far region.
inline BoundReport maxf_bound(const Matrix& sigma, const Matrix& rho, const Reduction& q, const FDivFamily& fam)
{
  if (!fam.measure_C || !fam.measure_alpha) {
    throw Error(ErrorKind::MissingMeasureParams, "maxf_bound: family " + fam.name + " has no measure constants");
  }
  const double c = *fam.measure_C;
  const double alpha = *fam.measure_alpha;

  BoundReport rep;
  rep.constants.C = c;
  rep.constants.alpha = alpha;
  rep.constants.K = k_alpha(alpha);
  rep.constants.L = fam.tag == FamilyTag::NegPower ? l_alpha(fam.beta) : l_general(alpha);

  Matrix sigma_q;
  Matrix rho_q;
  if (const auto* e = std::get_if<ConditionalExpectation>(&q)) {
    const CondExpResiduals res = condexp_equality_residuals(sigma, rho, *e);
    sigma_q = hermitian_part(cond_exp_apply(*e, sigma));
    rho_q = hermitian_part(cond_exp_apply(*e, rho));
    rep.residual_k = res.r_strange;
    rep.residual_l = res.r_recovery;
    rep.constants.sigma_inv_sup = detail::inverse_sup(sigma);
  } else {
    const auto& t = std::get<KrausChannel>(q);
    if (!same_support(sigma, rho)) {
      throw Error(ErrorKind::SupportMismatch, "maxf_bound: sigma and rho have different supports");
    }
    sigma_q = hermitian_part(bsdpi::apply(t, sigma));
    rho_q = hermitian_part(bsdpi::apply(t, rho));
    rep.residual_k = stinespring_residual(sigma, rho, t);
    rep.residual_l = bs_recovery_residual(sigma, rho, t);
    rep.constants.sigma_inv_sup = detail::inverse_sup(sigma_q);
  }
  const detail::GapValue gap = detail::divergence_gap(sigma, rho, sigma_q, rho_q, fam);
  rep.gap = gap.value;
  rep.gap_increment = gap.increment;
  rep.regularized = gap.regularized;
  rep.constants.gamma_sup = gamma(sigma, rho).sup_norm;

  const double g = rep.constants.gamma_sup;
  const double lead = std::pow(1.0 + g, -(4.0 * alpha + 2.0)) / c;
  const double power = 4.0 * (alpha + 1.0);
  rep.rhs_k = rep.constants.K * lead * std::pow(rep.residual_k, power);
  rep.rhs_l = rep.constants.L * lead * std::pow(g, -(2.0 * alpha + 2.0)) *
              std::pow(rep.constants.sigma_inv_sup, -(2.0 * alpha + 2.0)) * std::pow(rep.residual_l, power);
  rep.precondition_ok = detail::not_too_far(rep.gap, g, c, alpha);
  detail::finish(rep);
  return rep;
}

inline BoundReport maxf_bound(const DensityMatrix& sigma, const DensityMatrix& rho, const Reduction& q,
                              const FDivFamily& fam)
{
  return maxf_bound(sigma.mat(), rho.mat(), q, fam);
}

// ---------------------------------------------------------------------------
// Integrand-level inequality

struct LemmaSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// With U(X) = σ^{1/2} σ_N^{-1/2} E(X):
///   lhs = ⟨σ_N^{1/2}, (U*(Γ+t)⁻¹U − (Γ_N+t)⁻¹) σ_N^{1/2}⟩
///   rhs = t ‖(U(Γ_N+t)⁻¹ − (Γ+t)⁻¹U) σ_N^{1/2}‖₂²
inline LemmaSides lemma_integrand_check(const Matrix& sigma, const Matrix& rho, const ConditionalExpectation& e,
                                        double t)
{
  if (!(t > 0.0)) {
    throw Error(ErrorKind::DomainViolation, "lemma_integrand_check: t must be positive");
  }
  require_full_rank(herm_eig(sigma), "sigma");
  require_full_rank(herm_eig(rho), "rho");
  const Matrix sigma_n = hermitian_part(cond_exp_apply(e, sigma));
  const Matrix rho_n = hermitian_part(cond_exp_apply(e, rho));
  const ContractionPair u = build_contraction_U(sigma, as_kraus(e));
  const ScalarFunction resolvent{[t](double x) { return 1.0 / (x + t); }, -t, std::numeric_limits<double>::infinity(),
                                 false, "resolvent"};
  const Matrix r = matrix_fn(gamma(sigma, rho).mat, resolvent);
  const Matrix r_n = matrix_fn(gamma(sigma_n, rho_n).mat, resolvent);
  const Matrix sn_half = sqrt_psd(sigma_n);
  const Matrix u_sn = u.forward(sn_half);

  LemmaSides out;
  out.lhs = hs_inner(sn_half, u.adjoint(r * u_sn)).real() - hs_inner(sn_half, r_n * sn_half).real();
  const Matrix diff = u.forward(r_n * sn_half) - r * u_sn;
  out.rhs = t * diff.squaredNorm();
  return out;
}

inline LemmaSides lemma_integrand_check(const DensityMatrix& sigma, const DensityMatrix& rho,
                                        const ConditionalExpectation& e, double t)
{
  return lemma_integrand_check(sigma.mat(), rho.mat(), e, t);
}

} // namespace bsdpi

#endif // BSDPI_BOUNDS_HPP
