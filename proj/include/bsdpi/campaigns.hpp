#ifndef BSDPI_CAMPAIGNS_HPP
#define BSDPI_CAMPAIGNS_HPP

// Randomised property campaigns shared by the self-test command and the
// acceptance suite. Every trial draws its inputs from derive_seed(seed, k), so
// a failing trial can be replayed in isolation.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bsdpi/bounds.hpp"
#include "bsdpi/channels.hpp"
#include "bsdpi/divergences.hpp"
#include "bsdpi/matcore.hpp"
#include "bsdpi/recovery.hpp"
#include "bsdpi/states.hpp"

namespace bsdpi::campaigns {

struct Counts {
  int dpi = 500;
  int condexp_pinching = 500;
  int condexp_partial = 200;
  int channel = 500;
  int channel_singular = 100;
  int maxf = 500;
  int fixed_pairs = 50;
  int random_pairs = 500;
  int ordering = 200;
  int quadrature = 50;
  int structural = 200;
  int lemma = 100;
  int invariants = 100;

  static Counts full() { return {}; }

  static Counts reduced()
  {
    Counts c;
    c.dpi = 100;
    c.condexp_pinching = 100;
    c.condexp_partial = 40;
    c.channel = 100;
    c.channel_singular = 20;
    c.maxf = 100;
    c.fixed_pairs = 10;
    c.random_pairs = 100;
    c.ordering = 40;
    c.quadrature = 10;
    c.structural = 40;
    c.lemma = 20;
    c.invariants = 20;
    return c;
  }
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

inline std::string line(const CriterionResult& r)
{
  std::ostringstream os;
  os.precision(3);
  os << "criterion " << r.id << " [" << (r.pass ? "PASS" : "FAIL") << "] " << r.title << ": " << r.detail << " ("
     << std::fixed << r.seconds << " s)";
  return os.str();
}

// ---------------------------------------------------------------------------
// Samplers

inline int dim_for(int i, const std::vector<int>& dims) { return dims[static_cast<std::size_t>(i) % dims.size()]; }

inline const std::vector<int>& default_dims()
{
  static const std::vector<int> dims{2, 3, 4};
  return dims;
}

/// Random CPTP map on C^d: d_out ∈ [2, d], environment size s ∈ {2, 3}.
inline KrausChannel sample_channel(int d, std::uint64_t seed)
{
  const int d_out = 2 + static_cast<int>(mix64(seed) % static_cast<std::uint64_t>(d - 1));
  const int s = 2 + static_cast<int>(mix64(seed + 1) % 2);
  return random_channel(d, d_out, s, derive_seed(seed, 17));
}

struct Pair {
  DensityMatrix sigma;
  DensityMatrix rho;
};

inline Pair sample_pair(int d, std::uint64_t seed)
{
  return {random_density(d, d, derive_seed(seed, 1)), random_density(d, d, derive_seed(seed, 2))};
}

/// Equal-support pair of rank in [2, d−1] (d ≥ 3).
inline Pair sample_singular_pair(int d, std::uint64_t seed)
{
  const int rank = 2 + static_cast<int>(mix64(seed + 3) % static_cast<std::uint64_t>(d - 2));
  auto [s, r] = random_pair_common_support(d, rank, derive_seed(seed, 4));
  return {s, r};
}

/// Conditional expectation on C^d (pinching) or on C^d ⊗ C² (partial trace).
inline ConditionalExpectation sample_condexp(int d, std::uint64_t seed, bool partial_trace)
{
  return partial_trace ? ConditionalExpectation::partial_trace(d, 2) : random_pinching(d, derive_seed(seed, 5));
}

inline Pair commuting_pair(int d, std::uint64_t seed)
{
  CounterRng rng(derive_seed(seed, 6));
  const Matrix u = random_unitary(d, rng);
  RealVector p(d);
  RealVector q(d);
  for (int i = 0; i < d; ++i) {
    p(i) = 0.05 + rng.uniform();
    q(i) = 0.05 + rng.uniform();
  }
  p /= p.sum();
  q /= q.sum();
  return {DensityMatrix::from_matrix(assemble(u, p)), DensityMatrix::from_matrix(assemble(u, q))};
}

// ---------------------------------------------------------------------------
// Bookkeeping

class Tally {
 public:
  void fail(const std::string& what)
  {
    if (failures_++ < 3) {
      first_ += (first_.empty() ? "" : "; ") + what;
    }
  }

  template <class F>
  void guard(std::uint64_t seed, F&& body)
  {
    try {
      body();
    } catch (const std::exception& err) {
      fail("seed " + std::to_string(seed) + " threw: " + err.what());
    }
  }

  bool ok() const { return failures_ == 0; }
  int failures() const { return failures_; }
  std::string summary() const
  {
    return failures_ == 0 ? std::string() : " | " + std::to_string(failures_) + " failures, e.g. " + first_;
  }

 private:
  int failures_ = 0;
  std::string first_;
};

inline std::string sci(double x)
{
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

class Stopwatch {
 public:
  double seconds() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::uint64_t trial_seed(std::uint64_t seed, int criterion, int i)
{
  return derive_seed(seed, static_cast<std::uint64_t>(criterion) * 1000003ULL + static_cast<std::uint64_t>(i));
}

// ---------------------------------------------------------------------------
// Criteria

/// 1. Ŝ_BS(σ‖ρ) − Ŝ_BS(σ_T‖ρ_T) ≥ −1e-9 for random CPTP T.
inline CriterionResult dpi_campaign(const Counts& n, std::uint64_t seed, double time_limit = 30.0)
{
  Stopwatch clock;
  Tally tally;
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n.dpi; ++i) {
    const std::uint64_t ts = trial_seed(seed, 1, i);
    tally.guard(ts, [&] {
      const int d = dim_for(i, default_dims());
      const Pair p = sample_pair(d, ts);
      const KrausChannel t = sample_channel(d, ts);
      const double gap = bs_entropy(p.sigma.mat(), p.rho.mat()) -
                         bs_entropy(hermitian_part(apply(t, p.sigma.mat())), hermitian_part(apply(t, p.rho.mat())));
      min_gap = std::min(min_gap, gap);
      if (gap < -1e-9) {
        tally.fail("seed " + std::to_string(ts) + " gap " + sci(gap));
      }
    });
  }
  CriterionResult r{1, "BS-entropy DPI under random channels", tally.ok(), "", clock.seconds()};
  r.pass = r.pass && r.seconds < time_limit;
  r.detail = std::to_string(n.dpi) + " triples, min gap " + sci(min_gap) + tally.summary();
  return r;
}

/// 2. Both conditional-expectation bounds (π/4 and π/8 forms).
inline CriterionResult condexp_bound_campaign(const Counts& n, std::uint64_t seed, double time_limit = 60.0)
{
  Stopwatch clock;
  Tally tally;
  double min_slack_k = std::numeric_limits<double>::infinity();
  double min_slack_l = std::numeric_limits<double>::infinity();
  auto run = [&](int count, bool partial, int tag) {
    for (int i = 0; i < count; ++i) {
      const std::uint64_t ts = trial_seed(seed, tag, i);
      tally.guard(ts, [&] {
        const int d = dim_for(i, default_dims());
        const int full_d = partial ? 2 * d : d;
        const Pair p = sample_pair(full_d, ts);
        const ConditionalExpectation e = sample_condexp(d, ts, partial);
        const BoundReport rep = bs_bound_condexp(p.sigma, p.rho, e);
        const double sk = rep.gap - rep.rhs_k;
        const double sl = rep.gap - rep.rhs_l;
        min_slack_k = std::min(min_slack_k, sk);
        min_slack_l = std::min(min_slack_l, sl);
        const double floor = -1e-8 * (1.0 + std::abs(rep.gap));
        if (sk < floor || sl < floor) {
          tally.fail("seed " + std::to_string(ts) + " slack " + sci(std::min(sk, sl)));
        }
      });
    }
  };
  run(n.condexp_pinching, false, 2);
  run(n.condexp_partial, true, 20);
  CriterionResult r{2, "BS bound for conditional expectations", tally.ok(), "", clock.seconds()};
  r.pass = r.pass && r.seconds < time_limit;
  r.detail = std::to_string(n.condexp_pinching) + " pinching + " + std::to_string(n.condexp_partial) +
             " partial-trace, min slack (pi/4 form) " + sci(min_slack_k) + ", (pi/8 form) " + sci(min_slack_l) +
             tally.summary();
  return r;
}

/// 3. Channel bounds through the Stinespring isometry, including equal-support
///    rank-deficient pairs on the ε-regularisation route.
inline CriterionResult channel_bound_campaign(const Counts& n, std::uint64_t seed)
{
  Stopwatch clock;
  Tally tally;
  double min_slack = std::numeric_limits<double>::infinity();
  double max_increment = 0.0;
  int singular_done = 0;
  for (int i = 0; i < n.channel; ++i) {
    const std::uint64_t ts = trial_seed(seed, 3, i);
    tally.guard(ts, [&] {
      const bool singular = i < n.channel_singular;
      const int d = singular ? 3 + i % 2 : dim_for(i, default_dims());
      const Pair p = singular ? sample_singular_pair(d, ts) : sample_pair(d, ts);
      const KrausChannel t = sample_channel(d, ts);
      const BoundReport rep = bs_bound_channel(p.sigma, p.rho, t);
      const double s = std::min(rep.gap - rep.rhs_k, rep.gap - rep.rhs_l);
      min_slack = std::min(min_slack, s);
      if (s < -1e-8 * (1.0 + std::abs(rep.gap))) {
        tally.fail("seed " + std::to_string(ts) + " slack " + sci(s));
      }
      if (singular) {
        if (!rep.regularized) {
          tally.fail("seed " + std::to_string(ts) + " rank-deficient pair not regularized");
        }
        max_increment = std::max(max_increment, rep.gap_increment);
        if (!(rep.gap_increment < 1e-6)) {
          tally.fail("seed " + std::to_string(ts) + " increment " + sci(rep.gap_increment));
        }
        ++singular_done;
      }
    });
  }
  CriterionResult r{3, "BS bound for channels via Stinespring", tally.ok(), "", clock.seconds()};
  r.detail = std::to_string(n.channel) + " triples (" + std::to_string(singular_done) +
             " rank-deficient), min slack " + sci(min_slack) + ", max increment at eps=1e-7 " + sci(max_increment) +
             tally.summary();
  return r;
}

/// 4. Maximal-f bounds for x log x and −x^{1−β}, plus the closed-form constants.
inline CriterionResult maxf_bound_campaign(const Counts& n, std::uint64_t seed)
{
  Stopwatch clock;
  Tally tally;
  std::ostringstream rates;
  const std::vector<FDivFamily> fams{families::xlogx(), families::neg_power(0.25), families::neg_power(0.5),
                                     families::neg_power(0.75)};
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < fams.size(); ++f) {
    int passing = 0;
    for (int i = 0; i < n.maxf; ++i) {
      const std::uint64_t ts = trial_seed(seed, 40 + static_cast<int>(f), i);
      tally.guard(ts, [&] {
        const int d = dim_for(i, default_dims());
        const Pair p = sample_pair(d, ts);
        const Reduction q = i % 2 == 0 ? Reduction{random_pinching(d, derive_seed(ts, 5))}
                                       : Reduction{sample_channel(d, ts)};
        const BoundReport rep = maxf_bound(p.sigma, p.rho, q, fams[f]);
        if (!rep.precondition_ok) {
          return;
        }
        ++passing;
        const double s = std::min(rep.gap - rep.rhs_k, rep.gap - rep.rhs_l);
        min_slack = std::min(min_slack, s);
        if (s < -1e-8) {
          tally.fail(fams[f].name + " seed " + std::to_string(ts) + " slack " + sci(s));
        }
      });
    }
    rates << (f ? ", " : "") << fams[f].name << " " << passing << "/" << n.maxf;
  }
  const double k0 = k_alpha(0.0);
  const double k0_ref = std::pow(std::numbers::pi / 4.0, 4);
  if (std::abs(k0 - k0_ref) > 1e-12) {
    tally.fail("K_0 = " + sci(k0));
  }
  const double c_half = power_measure_c(0.5);
  if (std::abs(c_half - std::numbers::pi) > 1e-12) {
    tally.fail("C(1/2) = " + sci(c_half));
  }
  CriterionResult r{4, "maximal f-divergence bounds", tally.ok(), "", clock.seconds()};
  r.detail = "precondition pass " + rates.str() + ", min slack " + sci(min_slack) + ", |K_0-(pi/4)^4| " +
             sci(std::abs(k0 - k0_ref)) + ", |C(1/2)-pi| " + sci(std::abs(c_half - std::numbers::pi)) +
             tally.summary();
  return r;
}

/// 5. Equality certification on constructed and random pairs.
inline CriterionResult equality_campaign(const Counts& n, std::uint64_t seed)
{
  Stopwatch clock;
  Tally tally;
  double worst_fixed = 0.0;
  for (int i = 0; i < n.fixed_pairs; ++i) {
    const std::uint64_t ts = trial_seed(seed, 5, i);
    tally.guard(ts, [&] {
      const int d = dim_for(i, default_dims());
      const FixedPair fp = i % 2 == 0 ? constructed_fixed_pair(d + 1, ts) : constructed_product_pair(d, 2, ts);
      const RecoveryReport rep = equality_residuals(fp.sigma, fp.rho, as_kraus(fp.e));
      const double worst = std::max({rep.residual_eq2, rep.residual_eq3, rep.residual_bs_recovery,
                                     rep.residual_petz, std::abs(rep.renyi2_gap)});
      worst_fixed = std::max(worst_fixed, worst);
      if (rep.gap_bs > 1e-9 || worst > 1e-7) {
        tally.fail("fixed seed " + std::to_string(ts) + " gap " + sci(rep.gap_bs) + " residual " + sci(worst));
      }
    });
  }
  int eq2_small = 0;
  int gap_small = 0;
  int co_positive = 0;
  for (int i = 0; i < n.random_pairs; ++i) {
    const std::uint64_t ts = trial_seed(seed, 50, i);
    tally.guard(ts, [&] {
      const int d = dim_for(i, default_dims());
      const Pair p = sample_pair(d, ts);
      const RecoveryReport rep = equality_residuals(p.sigma, p.rho, as_kraus(random_pinching(d, derive_seed(ts, 5))));
      if (rep.residual_eq2 <= 1e-12) {
        ++eq2_small;
        if (rep.gap_bs > 1e-8) {
          tally.fail("seed " + std::to_string(ts) + " small eq2 but gap " + sci(rep.gap_bs));
        }
      }
      if (rep.gap_bs <= 1e-12) {
        ++gap_small;
        if (rep.residual_eq2 > 1e-6) {
          tally.fail("seed " + std::to_string(ts) + " small gap but eq2 " + sci(rep.residual_eq2));
        }
      }
      if (rep.gap_bs > 0.0 && rep.residual_bs_recovery > 0.0) {
        ++co_positive;
      }
    });
  }
  CriterionResult r{5, "equality certification", tally.ok(), "", clock.seconds()};
  r.detail = std::to_string(n.fixed_pairs) + " constructed pairs, max residual " + sci(worst_fixed) + "; " +
             std::to_string(n.random_pairs) + " random pairs, eq2<=1e-12: " + std::to_string(eq2_small) +
             ", gap<=1e-12: " + std::to_string(gap_small) + ", gap>0 and residual>0: " +
             std::to_string(co_positive) + tally.summary();
  return r;
}

/// 6. S_f ≤ Ŝ_f, commuting reduction, and standard = maximal for x².
inline CriterionResult ordering_campaign(const Counts& n, std::uint64_t seed)
{
  Stopwatch clock;
  Tally tally;
  const std::vector<FDivFamily> ordered{families::xlogx(), families::neg_power(0.5)};
  const FDivFamily sq = families::square();
  double worst_order = -std::numeric_limits<double>::infinity();
  double worst_comm = 0.0;
  double worst_square = 0.0;
  for (int i = 0; i < n.ordering; ++i) {
    const std::uint64_t ts = trial_seed(seed, 6, i);
    tally.guard(ts, [&] {
      const int d = dim_for(i, default_dims());
      const Pair p = sample_pair(d, ts);
      for (const auto& fam : ordered) {
        const double excess = standard_f(p.sigma, p.rho, fam) - maximal_f(p.sigma, p.rho, fam);
        worst_order = std::max(worst_order, excess);
        if (excess > 1e-9) {
          tally.fail(fam.name + " seed " + std::to_string(ts) + " S_f - maxS_f " + sci(excess));
        }
      }
      const double dsq = std::abs(standard_f(p.sigma, p.rho, sq) - maximal_f(p.sigma, p.rho, sq));
      worst_square = std::max(worst_square, dsq);
      if (dsq > 1e-10) {
        tally.fail("square seed " + std::to_string(ts) + " diff " + sci(dsq));
      }

      const Pair c = commuting_pair(d, ts);
      const HermitianEigenSystem cs = herm_eig(c.sigma.mat());
      for (const auto& fam : {families::xlogx(), families::neg_power(0.5), sq}) {
        // classical value in the common eigenbasis of the pair
        const Matrix rho_diag = cs.vectors.adjoint() * c.rho.mat() * cs.vectors;
        double classical = 0.0;
        for (int k = 0; k < d; ++k) {
          const double pk = cs.values(k);
          const double qk = rho_diag(k, k).real();
          classical += qk * fam.f(pk / qk);
        }
        const double st = standard_f(c.sigma, c.rho, fam);
        const double mx = maximal_f(c.sigma, c.rho, fam);
        const double dev = std::max(std::abs(st - classical), std::abs(mx - classical));
        worst_comm = std::max(worst_comm, dev);
        if (dev > 1e-10) {
          tally.fail("commuting " + fam.name + " seed " + std::to_string(ts) + " dev " + sci(dev));
        }
      }
      const double dsq_c = std::abs(standard_f(c.sigma, c.rho, sq) - maximal_f(c.sigma, c.rho, sq));
      worst_square = std::max(worst_square, dsq_c);
      if (dsq_c > 1e-10) {
        tally.fail("square commuting seed " + std::to_string(ts) + " diff " + sci(dsq_c));
      }
    });
  }
  CriterionResult r{6, "ordering and reductions", tally.ok(), "", clock.seconds()};
  r.detail = std::to_string(n.ordering) + " pairs, max(S_f - maxS_f) " + sci(worst_order) +
             ", commuting deviation " + sci(worst_comm) + ", |S_sq - maxS_sq| " + sci(worst_square) +
             tally.summary();
  return r;
}

/// 7. Quadrature oracle agreement and the scaling identity.
inline CriterionResult oracle_campaign(const Counts& n, std::uint64_t seed)
{
  Stopwatch clock;
  Tally tally;
  double worst_quad = 0.0;
  double worst_scale = 0.0;
  for (int i = 0; i < n.quadrature; ++i) {
    const std::uint64_t ts = trial_seed(seed, 7, i);
    tally.guard(ts, [&] {
      const int d = 2 + i % 2;
      const Pair p = sample_pair(d, ts);
      const double spectral = bs_entropy(p.sigma, p.rho);
      const QuadratureResult q = bs_entropy_quadrature(p.sigma, p.rho, 0.0, 1e-8);
      const double diff = std::abs(q.value - spectral);
      worst_quad = std::max(worst_quad, diff);
      if (diff > 1e-6) {
        tally.fail("quadrature seed " + std::to_string(ts) + " diff " + sci(diff));
      }
      for (double a : {0.5, 2.0}) {
        for (double b : {0.5, 2.0}) {
          const double lhs = bs_entropy(Matrix(a * p.sigma.mat()), Matrix(b * p.rho.mat()));
          const double rhs = a * spectral + a * std::log(a / b);
          worst_scale = std::max(worst_scale, std::abs(lhs - rhs));
          if (std::abs(lhs - rhs) > 1e-9) {
            tally.fail("scaling seed " + std::to_string(ts) + " diff " + sci(lhs - rhs));
          }
        }
      }
    });
  }
  CriterionResult r{7, "oracle agreement", tally.ok(), "", clock.seconds()};
  r.detail = std::to_string(n.quadrature) + " pairs, |quadrature - spectral| " + sci(worst_quad) +
             ", scaling identity deviation " + sci(worst_scale) + tally.summary();
  return r;
}

/// 8. Stinespring, U*U = E, norm monotonicity of Γ, integrand inequality.
inline CriterionResult structural_campaign(const Counts& n, std::uint64_t seed)
{
  Stopwatch clock;
  Tally tally;
  double worst_recon = 0.0;
  double worst_iso = 0.0;
  double worst_uu = 0.0;
  double worst_norm = -std::numeric_limits<double>::infinity();
  double worst_lemma = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n.structural; ++i) {
    const std::uint64_t ts = trial_seed(seed, 8, i);
    tally.guard(ts, [&] {
      const int d = dim_for(i, default_dims());
      const KrausChannel t = sample_channel(d, ts);
      const StinespringIsometry v = stinespring(t);
      const DensityMatrix omega = random_density(d, d, derive_seed(ts, 9));
      const double recon = (v.channel_output(omega.mat()) - apply(t, omega.mat())).norm();
      const double iso = (v.v.adjoint() * v.v - identity(d)).norm();
      worst_recon = std::max(worst_recon, recon);
      worst_iso = std::max(worst_iso, iso);
      if (recon > 1e-12 || iso > 1e-10) {
        tally.fail("stinespring seed " + std::to_string(ts) + " recon " + sci(recon) + " iso " + sci(iso));
      }

      const bool partial = i % 2 == 1;
      const int full_d = partial ? 2 * d : d;
      const Pair p = sample_pair(full_d, ts);
      const ConditionalExpectation e = sample_condexp(d, ts, partial);
      if (full_d <= 8) {
        const ContractionPair u = build_contraction_U(p.sigma, as_kraus(e));
        const Matrix uu = superoperator_matrix([&](const Matrix& x) { return u.adjoint(u.forward(x)); }, full_d,
                                               full_d);
        const Matrix ee = superoperator_matrix([&](const Matrix& x) { return cond_exp_apply(e, x); }, full_d, full_d);
        const double dev = (uu - ee).norm();
        worst_uu = std::max(worst_uu, dev);
        if (dev > 1e-9) {
          tally.fail("U*U seed " + std::to_string(ts) + " dev " + sci(dev));
        }
      }
      const double g = gamma(p.sigma, p.rho).sup_norm;
      const double g_n = gamma(cond_exp_apply(e, p.sigma.mat()), cond_exp_apply(e, p.rho.mat())).sup_norm;
      worst_norm = std::max(worst_norm, g_n - g);
      if (g_n > g + 1e-10) {
        tally.fail("norm seed " + std::to_string(ts) + " Gamma_N " + sci(g_n) + " > Gamma " + sci(g));
      }
    });
  }
  for (int i = 0; i < n.lemma; ++i) {
    const std::uint64_t ts = trial_seed(seed, 80, i);
    tally.guard(ts, [&] {
      const int d = dim_for(i, default_dims());
      const bool partial = i % 2 == 1;
      const Pair p = sample_pair(partial ? 2 * d : d, ts);
      const ConditionalExpectation e = sample_condexp(d, ts, partial);
      for (double t : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const LemmaSides s = lemma_integrand_check(p.sigma, p.rho, e, t);
        worst_lemma = std::min(worst_lemma, s.lhs - s.rhs);
        if (s.lhs - s.rhs < -1e-9) {
          tally.fail("lemma seed " + std::to_string(ts) + " t " + sci(t) + " lhs-rhs " + sci(s.lhs - s.rhs));
        }
      }
    });
  }
  CriterionResult r{8, "structural identities", tally.ok(), "", clock.seconds()};
  r.detail = "Stinespring recon " + sci(worst_recon) + ", V*V-I " + sci(worst_iso) + ", U*U-E " + sci(worst_uu) +
             ", max(|Gamma_N|-|Gamma|) " + sci(worst_norm) + " over " + std::to_string(n.structural) +
             ", min(lhs-rhs) " + sci(worst_lemma) + " over " + std::to_string(n.lemma) + "x5" + tally.summary();
  return r;
}

/// Module-level invariants that the numbered criteria do not cover.
inline CriterionResult module_invariants(const Counts& n, std::uint64_t seed)
{
  Stopwatch clock;
  Tally tally;
  for (int i = 0; i < n.invariants; ++i) {
    const std::uint64_t ts = trial_seed(seed, 0, i);
    tally.guard(ts, [&] {
      const int d = 2 + i % 7;
      CounterRng rng(ts);
      const Matrix a = random_hermitian(d, rng);
      const HermitianEigenSystem sys = herm_eig(a);
      const double recon = (sys.reconstruct() - a).norm();
      const double unit = (sys.vectors.adjoint() * sys.vectors - identity(d)).norm();
      if (recon > 1e-10 * std::max(1.0, a.norm()) || unit > 1e-10) {
        tally.fail("herm_eig seed " + std::to_string(ts) + " recon " + sci(recon) + " unitarity " + sci(unit));
      }
      const Matrix psd = a * a.adjoint();
      const double homo = (matrix_fn(matrix_fn(psd, functions::square()), functions::sqrt()) - psd).norm();
      if (homo > 1e-9 * std::max(1.0, psd.norm())) {
        tally.fail("spectral calculus seed " + std::to_string(ts) + " " + sci(homo));
      }
      const DensityMatrix low = random_density(d, 1 + i % d, derive_seed(ts, 1));
      const Matrix pp = pinv(pinv(low.mat()));
      if ((pp - low.mat()).norm() > 1e-9) {
        tally.fail("pinv seed " + std::to_string(ts));
      }
      if (std::abs(a.squaredNorm() - hs_inner(a, a).real()) > 1e-12 * std::max(1.0, a.squaredNorm())) {
        tally.fail("hs_inner seed " + std::to_string(ts));
      }

      const int dc = 2 + i % 3;
      const ConditionalExpectation e = random_pinching(dc, derive_seed(ts, 2));
      const Matrix x = gaussian_matrix(dc, dc, rng);
      const Matrix y = gaussian_matrix(dc, dc, rng);
      if ((cond_exp_apply(e, cond_exp_apply(e, x)) - cond_exp_apply(e, x)).norm() > 1e-10 ||
          (cond_exp_apply(e, x * cond_exp_apply(e, y)) - cond_exp_apply(e, x) * cond_exp_apply(e, y)).norm() >
              1e-9) {
        tally.fail("conditional expectation seed " + std::to_string(ts));
      }
      // Jensen: E(f(X)) − f(E(X)) ⪰ 0 for operator convex f.
      const Matrix xp = hermitian_part(x * x.adjoint()) + 0.1 * identity(dc);
      const ScalarFunction neg_sqrt{[](double v) { return -std::sqrt(v); }, 0.0,
                                    std::numeric_limits<double>::infinity(), true, "-sqrt"};
      for (const ScalarFunction& f : {functions::inverse(), functions::square(), neg_sqrt}) {
        const Matrix jensen = hermitian_part(cond_exp_apply(e, matrix_fn(xp, f)) - matrix_fn(cond_exp_apply(e, xp), f));
        if (herm_eig(jensen).min_value() < -1e-9) {
          tally.fail("Jensen " + f.name + " seed " + std::to_string(ts));
        }
      }
      // U*U ≤ Id and U*ΓU ≤ Γ_T on random inputs.
      const KrausChannel t = sample_channel(dc, ts);
      const Pair p = sample_pair(dc, ts);
      const ContractionPair u = build_contraction_U(p.sigma, t);
      const Matrix z = gaussian_matrix(t.d_out(), t.d_out(), rng);
      if (hs_inner(z, u.adjoint(u.forward(z))).real() > hs_inner(z, z).real() + 1e-9) {
        tally.fail("contraction seed " + std::to_string(ts));
      }
      const Matrix sig_t = apply(t, p.sigma.mat());
      const Matrix g = gamma(p.sigma, p.rho).mat;
      const Matrix g_t = gamma(sig_t, apply(t, p.rho.mat())).mat;
      const double lhs = hs_inner(z, u.adjoint(g * u.forward(z))).real();
      const double rhs = hs_inner(z, g_t * z).real();
      if (lhs > rhs + 1e-9 * std::max(1.0, std::abs(rhs))) {
        tally.fail("Gamma compression seed " + std::to_string(ts) + " " + sci(lhs - rhs));
      }
    });
  }
  CriterionResult r{0, "module invariants", tally.ok(), "", clock.seconds()};
  r.detail = std::to_string(n.invariants) + " rounds" + tally.summary();
  return r;
}

inline std::vector<CriterionResult> run_all(const Counts& n, std::uint64_t seed,
                                            const std::function<void(const CriterionResult&)>& on_result = {})
{
  std::vector<CriterionResult> out;
  auto push = [&](CriterionResult r) {
    if (on_result) {
      on_result(r);
    }
    out.push_back(std::move(r));
  };
  push(dpi_campaign(n, seed));
  push(condexp_bound_campaign(n, seed));
  push(channel_bound_campaign(n, seed));
  push(maxf_bound_campaign(n, seed));
  push(equality_campaign(n, seed));
  push(ordering_campaign(n, seed));
  push(oracle_campaign(n, seed));
  push(structural_campaign(n, seed));
  return out;
}

} // namespace bsdpi::campaigns

#endif // BSDPI_CAMPAIGNS_HPP
