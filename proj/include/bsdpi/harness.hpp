#ifndef BSDPI_HARNESS_HPP
#define BSDPI_HARNESS_HPP

#include <algorithm>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bsdpi/bounds.hpp"
#include "bsdpi/campaigns.hpp"
#include "bsdpi/channels.hpp"
#include "bsdpi/divergences.hpp"
#include "bsdpi/io.hpp"
#include "bsdpi/recovery.hpp"
#include "bsdpi/states.hpp"

namespace bsdpi::harness {

using nlohmann::json;

enum class ChannelKind { Pinching, PartialTrace, RandomCptp };
enum class Fixture { Random, Equal };

/// A family as named on the command line. "bs" selects the BS-entropy bound
/// forms; anything else goes through maxf_bound.
struct FamilySpec {
  std::string tag;
  FDivFamily family;
  bool bs_forms = false;
};

inline FamilySpec parse_family(const std::string& text)
{
  if (text == "bs") {
    return {"bs", families::xlogx(), true};
  }
  if (text == "xlogx") {
    return {"xlogx", families::xlogx(), false};
  }
  if (text == "square") {
    return {"square", families::square(), false};
  }
  if (text == "neglog") {
    return {"neglog", families::neg_log_transpose(), false};
  }
  const std::string prefix = "negpower:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string num = text.substr(prefix.size());
    double beta = 0.0;
    std::size_t used = 0;
    try {
      beta = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) {
      throw Error(ErrorKind::ConfigError, "bad exponent in family '" + text + "'");
    }
    if (!(beta > 0.0 && beta < 1.0)) {
      throw Error(ErrorKind::ConfigError, "family '" + text + "': exponent must lie in (0, 1)");
    }
    return {text, families::neg_power(beta), false};
  }
  throw Error(ErrorKind::ConfigError, "unknown family '" + text + "' (expected bs, xlogx, negpower:<beta>, square, neglog)");
}

inline ChannelKind parse_channel_kind(const std::string& text)
{
  if (text == "pinching") {
    return ChannelKind::Pinching;
  }
  if (text == "partial_trace") {
    return ChannelKind::PartialTrace;
  }
  if (text == "random_cptp") {
    return ChannelKind::RandomCptp;
  }
  throw Error(ErrorKind::ConfigError, "unknown channel kind '" + text + "' (expected pinching, partial_trace, random_cptp)");
}

inline std::string to_string(ChannelKind k)
{
  switch (k) {
    case ChannelKind::Pinching: return "pinching";
    case ChannelKind::PartialTrace: return "partial_trace";
    case ChannelKind::RandomCptp: return "random_cptp";
  }
  return "?";
}

inline Fixture parse_fixture(const std::string& text)
{
  if (text == "random") {
    return Fixture::Random;
  }
  if (text == "equal") {
    return Fixture::Equal;
  }
  throw Error(ErrorKind::ConfigError, "unknown fixture '" + text + "' (expected random, equal)");
}

struct Tolerances {
  double slack = 1e-8;  // slack ≥ −slack·(1 + gap)
  double dpi = 1e-9;    // gap ≥ −dpi
};

struct CampaignConfig {
  std::uint64_t seed = 1;
  int trials = 500;
  std::vector<int> dims{2, 3, 4};
  ChannelKind channel_kind = ChannelKind::Pinching;
  std::vector<std::string> families{"bs"};
  Tolerances tolerances;
  std::string output_path;
  Fixture fixture = Fixture::Random;
  int jobs = 1;

  void validate() const
  {
    if (trials < 1) {
      throw Error(ErrorKind::ConfigError, "trials must be at least 1");
    }
    if (dims.empty()) {
      throw Error(ErrorKind::ConfigError, "dims must not be empty");
    }
    for (int d : dims) {
      if (d < 2) {
        throw Error(ErrorKind::ConfigError, "every dimension must be at least 2");
      }
    }
    if (families.empty()) {
      throw Error(ErrorKind::ConfigError, "families must not be empty");
    }
    for (const auto& f : families) {
      const FamilySpec spec = parse_family(f);
      if (!spec.bs_forms && !(spec.family.measure_C && spec.family.measure_alpha)) {
        throw Error(ErrorKind::ConfigError, "family '" + f + "' has no bound (no integral-measure parameters)");
      }
    }
    if (!(tolerances.slack >= 0.0) || !(tolerances.dpi >= 0.0)) {
      throw Error(ErrorKind::ConfigError, "tolerances must be nonnegative");
    }
    if (jobs < 1) {
      throw Error(ErrorKind::ConfigError, "jobs must be at least 1");
    }
  }
};

namespace detail {

template <class T>
T get_field(const json& j, const char* key, const std::string& type)
{
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::ConfigError, std::string("field '") + key + "' must be " + type);
  }
}

} // namespace detail

/// Reads the keys that are present and leaves the others at `base`.
inline CampaignConfig config_from_json(const json& j, CampaignConfig base = {})
{
  if (!j.is_object()) {
    throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  }
  static const std::vector<std::string> known{"seed",       "trials",      "dims",    "channel_kind", "channel", "families",
                                              "tolerances", "output_path", "fixture", "jobs"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw Error(ErrorKind::ConfigError, "unknown config key '" + item.key() + "'");
    }
  }
  if (j.contains("seed")) {
    base.seed = detail::get_field<std::uint64_t>(j, "seed", "a nonnegative integer");
  }
  if (j.contains("trials")) {
    base.trials = detail::get_field<int>(j, "trials", "an integer");
  }
  if (j.contains("dims")) {
    base.dims = detail::get_field<std::vector<int>>(j, "dims", "a list of integers");
  }
  for (const char* key : {"channel_kind", "channel"}) {
    if (j.contains(key)) {
      base.channel_kind = parse_channel_kind(detail::get_field<std::string>(j, key, "a string"));
    }
  }
  if (j.contains("families")) {
    base.families = detail::get_field<std::vector<std::string>>(j, "families", "a list of strings");
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) {
      throw Error(ErrorKind::ConfigError, "field 'tolerances' must be an object");
    }
    if (t.contains("slack")) {
      base.tolerances.slack = detail::get_field<double>(t, "slack", "a number");
    }
    if (t.contains("dpi")) {
      base.tolerances.dpi = detail::get_field<double>(t, "dpi", "a number");
    }
  }
  if (j.contains("output_path")) {
    base.output_path = detail::get_field<std::string>(j, "output_path", "a string");
  }
  if (j.contains("fixture")) {
    base.fixture = parse_fixture(detail::get_field<std::string>(j, "fixture", "a string"));
  }
  if (j.contains("jobs")) {
    base.jobs = detail::get_field<int>(j, "jobs", "an integer");
  }
  return base;
}

inline CampaignConfig load_config(const std::string& path)
{
  json j;
  try {
    j = io::read_json_file(path);
  } catch (const Error& err) {
    throw Error(ErrorKind::ConfigError, err.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// bounds

struct Violation {
  std::uint64_t seed = 0;
  std::string description;
};

struct CampaignSummary {
  int total = 0;
  std::vector<Violation> violations;
  double min_slack = std::numeric_limits<double>::infinity();
  int equality_hits = 0;
  std::vector<io::CsvRow> rows;

  bool ok() const { return violations.empty(); }
};

/// One trial: a state pair on the dimension of the reduction and the reduction
/// itself. Partial traces act on C^d ⊗ C², so the states there live in 2d.
struct Trial {
  std::uint64_t seed = 0;
  int d = 0;
  DensityMatrix sigma;
  DensityMatrix rho;
  Reduction reduction;
};

inline Trial make_trial(const CampaignConfig& cfg, int i)
{
  const std::uint64_t ts = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
  const int d = cfg.dims[static_cast<std::size_t>(i) % cfg.dims.size()];
  const int state_dim = cfg.channel_kind == ChannelKind::PartialTrace ? 2 * d : d;
  Reduction q = cfg.channel_kind == ChannelKind::Pinching       ? Reduction(random_pinching(d, derive_seed(ts, 5)))
                : cfg.channel_kind == ChannelKind::PartialTrace ? Reduction(ConditionalExpectation::partial_trace(d, 2))
                                                                : Reduction(campaigns::sample_channel(d, ts));
  DensityMatrix sigma = random_density(state_dim, state_dim, derive_seed(ts, 1));
  DensityMatrix rho = cfg.fixture == Fixture::Equal ? sigma : random_density(state_dim, state_dim, derive_seed(ts, 2));
  return {ts, d, std::move(sigma), std::move(rho), std::move(q)};
}

inline BoundReport evaluate(const Trial& t, const FamilySpec& fam)
{
  if (!fam.bs_forms) {
    return maxf_bound(t.sigma, t.rho, t.reduction, fam.family);
  }
  if (const auto* e = std::get_if<ConditionalExpectation>(&t.reduction)) {
    return bs_bound_condexp(t.sigma, t.rho, *e);
  }
  return bs_bound_channel(t.sigma, t.rho, std::get<KrausChannel>(t.reduction));
}

namespace detail {

struct TrialOutcome {
  std::vector<io::CsvRow> rows;
  std::vector<Violation> violations;
  std::vector<double> slacks;  // asserted rows only
  int equality_hits = 0;
};

inline TrialOutcome run_trial(const CampaignConfig& cfg, const std::vector<FamilySpec>& fams, int i)
{
  TrialOutcome out;
  const std::uint64_t ts = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
  std::optional<Trial> sampled;
  try {
    sampled.emplace(make_trial(cfg, i));
  } catch (const std::exception& err) {
    out.violations.push_back({ts, std::string("sampling failed: ") + err.what()});
    return out;
  }
  const Trial& t = *sampled;
  for (const auto& fam : fams) {
    try {
      const BoundReport rep = evaluate(t, fam);
      out.rows.push_back({t.seed, t.d, fam.tag, rep.gap, rep.rhs_k, rep.rhs_l, rep.precondition_ok, rep.slack});
      if (rep.precondition_ok) {
        out.slacks.push_back(rep.slack);
      }
      if (rep.violates(cfg.tolerances.slack)) {
        out.violations.push_back({t.seed, fam.tag + ": slack " + io::format_double(rep.slack)});
      }
      if (rep.gap < -cfg.tolerances.dpi) {
        out.violations.push_back({t.seed, fam.tag + ": negative gap " + io::format_double(rep.gap)});
      }
      if (std::abs(rep.gap) <= cfg.tolerances.dpi && rep.rhs <= cfg.tolerances.dpi) {
        ++out.equality_hits;
      }
    } catch (const std::exception& err) {
      out.violations.push_back({t.seed, fam.tag + ": " + err.what()});
    }
  }
  return out;
}

} // namespace detail

/// Runs the campaign; trials are sharded over cfg.jobs workers and merged
/// back in trial order, so the rows do not depend on the job count.
inline CampaignSummary run_bounds(const CampaignConfig& cfg)
{
  cfg.validate();
  std::vector<FamilySpec> fams;
  for (const auto& f : cfg.families) {
    fams.push_back(parse_family(f));
  }

  std::vector<detail::TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
  const int jobs = std::min(cfg.jobs, cfg.trials);
  auto work = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      outcomes[static_cast<std::size_t>(i)] = detail::run_trial(cfg, fams, i);
    }
  };
  if (jobs == 1) {
    work(0, cfg.trials);
  } else {
    std::vector<std::future<void>> pending;
    for (int k = 0; k < jobs; ++k) {
      const int lo = static_cast<int>(static_cast<long long>(cfg.trials) * k / jobs);
      const int hi = static_cast<int>(static_cast<long long>(cfg.trials) * (k + 1) / jobs);
      pending.push_back(std::async(std::launch::async, work, lo, hi));
    }
    for (auto& p : pending) {
      p.get();
    }
  }

  CampaignSummary s;
  s.total = cfg.trials;
  for (auto& o : outcomes) {
    for (auto& r : o.rows) {
      s.rows.push_back(std::move(r));
    }
    for (auto& v : o.violations) {
      s.violations.push_back(std::move(v));
    }
    for (double x : o.slacks) {
      s.min_slack = std::min(s.min_slack, x);
    }
    s.equality_hits += o.equality_hits;
  }
  return s;
}

inline void print_summary(std::ostream& os, const CampaignConfig& cfg, const CampaignSummary& s)
{
  os << "trials: " << s.total << "\n";
  os << "channel: " << to_string(cfg.channel_kind) << "\n";
  os << "rows: " << s.rows.size() << "\n";
  os << "min_slack: " << io::format_double(s.min_slack) << "\n";
  os << "equality_hits: " << s.equality_hits << "\n";
  os << "violations: " << s.violations.size() << "\n";
  for (const auto& v : s.violations) {
    os << "  seed " << v.seed << ": " << v.description << "\n";
  }
}

// ---------------------------------------------------------------------------
// divergence

inline double full_rank_or_reg(const Matrix& s, const Matrix& r, const FDivFamily& fam, DivergenceKind kind,
                               std::string& note)
{
  if (numerical_rank(s) == s.rows() && numerical_rank(r) == r.rows()) {
    return kind == DivergenceKind::Standard ? standard_f(s, r, fam) : maximal_f(s, r, fam);
  }
  const RegularizedValue v = regularized_divergence(s, r, fam, kind);
  note = " (regularized, last increment " + io::format_double(v.last_increment) + ")";
  return v.value;
}

/// Prints D, Ŝ_BS, S_f, Ŝ_f and the quadrature value of Ŝ_BS for the pair.
inline void cmd_divergence(std::ostream& os, const std::string& sigma_file, const std::string& rho_file,
                           const std::string& family)
{
  const FamilySpec fam = parse_family(family);
  const DensityMatrix sigma = io::state_from_json(io::read_json_file(sigma_file), sigma_file);
  const DensityMatrix rho = io::state_from_json(io::read_json_file(rho_file), rho_file);
  if (sigma.dim() != rho.dim()) {
    throw Error(ErrorKind::DimMismatch, "states have different dimensions");
  }
  const Matrix& s = sigma.mat();
  const Matrix& r = rho.mat();

  const double bs = bs_entropy(s, r);
  os << "dim: " << sigma.dim() << "\n";
  os << "family: " << fam.tag << "\n";
  os << "relative_entropy: " << io::format_double(relative_entropy(s, r)) << "\n";
  os << "bs_entropy: " << io::format_double(bs) << "\n";
  std::string note_std;
  std::string note_max;
  const double sf = full_rank_or_reg(s, r, fam.family, DivergenceKind::Standard, note_std);
  const double mf = full_rank_or_reg(s, r, fam.family, DivergenceKind::Maximal, note_max);
  os << "standard_f: " << io::format_double(sf) << note_std << "\n";
  os << "maximal_f: " << io::format_double(mf) << note_max << "\n";
  if (numerical_rank(s) == s.rows() && numerical_rank(r) == r.rows()) {
    const QuadratureResult q = bs_entropy_quadrature(s, r, 0.0, 1e-9);
    os << "bs_entropy_quadrature: " << io::format_double(q.value) << " (t_max " << io::format_double(q.t_max)
       << ", |diff| " << io::format_double(std::abs(q.value - bs)) << ")\n";
  } else {
    os << "bs_entropy_quadrature: skipped (singular input)\n";
  }
}

// ---------------------------------------------------------------------------
// certify

struct CertifyResult {
  RecoveryReport report;
  json document;
};

inline CertifyResult certify(const std::string& sigma_file, const std::string& rho_file,
                             const std::string& channel_file)
{
  const DensityMatrix sigma = io::state_from_json(io::read_json_file(sigma_file), sigma_file);
  const DensityMatrix rho = io::state_from_json(io::read_json_file(rho_file), rho_file);
  const KrausChannel t = io::channel_from_json(io::read_json_file(channel_file), channel_file);
  if (sigma.dim() != rho.dim() || sigma.dim() != t.d_in()) {
    throw Error(ErrorKind::DimMismatch, "sigma, rho and channel input dimensions must agree");
  }
  CertifyResult out;
  out.report = equality_residuals(sigma, rho, t);
  out.document = io::report_to_json(out.report);
  out.document["verdict"] = out.report.bs_equality() ? "EQUALITY" : "NO-EQUALITY";
  out.document["petz_recoverable"] = out.report.petz_recoverable();
  return out;
}

inline void cmd_certify(std::ostream& os, const CertifyResult& c)
{
  os << c.document.dump(2) << "\n";
  os << "verdict: " << (c.report.bs_equality() ? "EQUALITY" : "NO-EQUALITY") << "\n";
  os << "petz: " << (c.report.petz_recoverable() ? "RECOVERABLE" : "NOT-RECOVERABLE") << "\n";
}

// ---------------------------------------------------------------------------
// selftest

/// Module invariants plus every campaign at reduced counts. True on pass.
inline bool cmd_selftest(std::ostream& os, std::uint64_t seed = 1)
{
  campaigns::Stopwatch clock;
  const campaigns::Counts n = campaigns::Counts::reduced();
  bool ok = true;
  auto report = [&](const campaigns::CriterionResult& r) {
    ok = ok && r.pass;
    os << campaigns::line(r) << "\n" << std::flush;
  };
  report(campaigns::module_invariants(n, seed));
  campaigns::run_all(n, seed, report);
  os << "selftest: " << (ok ? "PASS" : "FAIL") << " (" << clock.seconds() << " s)\n";
  return ok;
}

} // namespace bsdpi::harness

#endif // BSDPI_HARNESS_HPP
