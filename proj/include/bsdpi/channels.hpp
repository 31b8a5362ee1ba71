#ifndef BSDPI_CHANNELS_HPP
#define BSDPI_CHANNELS_HPP

#include <cmath>
#include <concepts>
#include <type_traits>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bsdpi/matcore.hpp"
#include "bsdpi/rng.hpp"
#include "bsdpi/states.hpp"

namespace bsdpi {

namespace tol {
/// ‖Σ K*K − I‖₂ bound for trace preservation.
inline constexpr double trace_preservation = 1e-10;
/// Smallest admissible Choi eigenvalue.
inline constexpr double choi_psd = -1e-10;
} // namespace tol

/// Completely positive trace-preserving map given by Kraus operators (d_out × d_in each).
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> kraus) : kraus_(std::move(kraus))
  {
    if (kraus_.empty()) {
      throw Error(ErrorKind::InvalidChannel, "channel needs at least one Kraus operator");
    }
    d_out_ = static_cast<int>(kraus_.front().rows());
    d_in_ = static_cast<int>(kraus_.front().cols());
    if (d_in_ < 1 || d_out_ < 1) {
      throw Error(ErrorKind::InvalidChannel, "empty Kraus operator");
    }
    for (const auto& k : kraus_) {
      if (k.rows() != d_out_ || k.cols() != d_in_) {
        throw Error(ErrorKind::InvalidChannel, "Kraus operators have inconsistent shapes");
      }
    }
    Matrix sum = Matrix::Zero(d_in_, d_in_);
    for (const auto& k : kraus_) {
      sum += k.adjoint() * k;
    }
    if ((sum - identity(d_in_)).norm() > tol::trace_preservation) {
      throw Error(ErrorKind::InvalidChannel, "Kraus family is not trace preserving");
    }
    if (herm_eig(hermitian_part(choi())).min_value() < tol::choi_psd) {
      throw Error(ErrorKind::InvalidChannel, "Choi matrix is not positive semidefinite");
    }
  }

  int d_in() const noexcept { return d_in_; }
  int d_out() const noexcept { return d_out_; }
  const std::vector<Matrix>& kraus() const noexcept { return kraus_; }

  /// (I ⊗ T)(|Ω⟩⟨Ω|) = Σ_ij |i⟩⟨j| ⊗ T(|i⟩⟨j|), unnormalised.
  Matrix choi() const
  {
    Matrix c = Matrix::Zero(d_in_ * d_out_, d_in_ * d_out_);
    for (const auto& k : kraus_) {
      for (int i = 0; i < d_in_; ++i) {
        for (int j = 0; j < d_in_; ++j) {
          c.block(i * d_out_, j * d_out_, d_out_, d_out_) += k.col(i) * k.col(j).adjoint();
        }
      }
    }
    return c;
  }

 private:
  std::vector<Matrix> kraus_;
  int d_in_ = 0;
  int d_out_ = 0;
};

/// T(X) = Σ K X K*
inline Matrix apply(const KrausChannel& t, const Matrix& x)
{
  if (x.rows() != t.d_in() || x.cols() != t.d_in()) {
    throw Error(ErrorKind::DimMismatch, "apply: input is not d_in x d_in");
  }
  Matrix out = Matrix::Zero(t.d_out(), t.d_out());
  for (const auto& k : t.kraus()) {
    out.noalias() += k * x * k.adjoint();
  }
  return out;
}

/// T*(Y) = Σ K* Y K, the Hilbert-Schmidt adjoint.
inline Matrix adjoint_apply(const KrausChannel& t, const Matrix& y)
{
  if (y.rows() != t.d_out() || y.cols() != t.d_out()) {
    throw Error(ErrorKind::DimMismatch, "adjoint_apply: input is not d_out x d_out");
  }
  Matrix out = Matrix::Zero(t.d_in(), t.d_in());
  for (const auto& k : t.kraus()) {
    out.noalias() += k.adjoint() * y * k;
  }
  return out;
}

inline DensityMatrix apply(const KrausChannel& t, const DensityMatrix& rho)
{
  Matrix out = hermitian_part(bsdpi::apply(t, rho.mat()));
  out /= trace_real(out);
  return DensityMatrix::from_matrix(out);
}

/// Argument types are std-associated (std::complex entries), so an unqualified
/// apply(t, x) also finds std::apply. This overload wins that tie for every
/// channel and conditional expectation argument.
template <class Map, class Arg>
  requires(std::same_as<std::remove_cvref_t<Map>, KrausChannel> ||
           std::same_as<std::remove_cvref_t<Map>, class ConditionalExpectation>)
auto apply(Map&& map, Arg&& arg)
{
  using Plain = std::remove_cvref_t<Arg>;
  const auto& m = static_cast<const std::remove_cvref_t<Map>&>(map);
  if constexpr (std::is_same_v<Plain, DensityMatrix>) {
    return apply(m, static_cast<const DensityMatrix&>(arg));
  } else {
    return apply(m, static_cast<const Matrix&>(Matrix(arg)));
  }
}

// ---------------------------------------------------------------------------
// Stinespring

/// Isometry V: C^{d_in} → C^{d_out} ⊗ C^{s}. Row index i·s + a pairs output
/// basis vector i with environment vector a.
struct StinespringIsometry {
  Matrix v;
  int d_in = 0;
  int d_out = 0;
  int s = 0;

  /// tr_env[V ω V*]
  Matrix channel_output(const Matrix& omega) const
  {
    return partial_trace_second(v * omega * v.adjoint(), d_out, s);
  }

  /// X ⊗ I_s
  Matrix lift(const Matrix& x) const { return kron(x, identity(s)); }
};

/// V = Σ_a K_a ⊗ e_a, environment basis ordered as the Kraus list.
inline StinespringIsometry stinespring(const KrausChannel& t)
{
  const int s = static_cast<int>(t.kraus().size());
  StinespringIsometry out;
  out.d_in = t.d_in();
  out.d_out = t.d_out();
  out.s = s;
  out.v = Matrix::Zero(static_cast<Eigen::Index>(t.d_out()) * s, t.d_in());
  for (int a = 0; a < s; ++a) {
    const Matrix& k = t.kraus()[static_cast<std::size_t>(a)];
    for (int i = 0; i < t.d_out(); ++i) {
      out.v.row(i * s + a) = k.row(i);
    }
  }
  if ((out.v.adjoint() * out.v - identity(t.d_in())).norm() > tol::trace_preservation) {
    throw Error(ErrorKind::InvalidChannel, "stinespring: V is not an isometry");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conditional expectations

/// X ↦ Σ P_k X P_k for orthogonal projectors summing to the identity.
struct Pinching {
  std::vector<Matrix> projectors;
};

/// X ↦ tr_env[X] ⊗ I/s on C^{d_keep} ⊗ C^{s}.
struct PartialTraceFactor {
  int d_keep = 1;
  int s = 1;
};

class ConditionalExpectation {
 public:
  using Kind = std::variant<Pinching, PartialTraceFactor>;

  static ConditionalExpectation pinching(std::vector<Matrix> projectors)
  {
    if (projectors.empty()) {
      throw Error(ErrorKind::InvalidChannel, "pinching needs at least one projector");
    }
    const auto d = projectors.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t j = 0; j < projectors.size(); ++j) {
      const Matrix& p = projectors[j];
      if (p.rows() != d || p.cols() != d) {
        throw Error(ErrorKind::DimMismatch, "pinching projectors differ in size");
      }
      for (std::size_t k = 0; k < projectors.size(); ++k) {
        const Matrix expected = j == k ? p : Matrix::Zero(d, d);
        if ((p * projectors[k] - expected).norm() > 1e-10) {
          throw Error(ErrorKind::InvalidChannel, "pinching projectors are not orthogonal projectors");
        }
      }
      sum += p;
    }
    if ((sum - identity(d)).norm() > 1e-10) {
      throw Error(ErrorKind::InvalidChannel, "pinching projectors do not sum to the identity");
    }
    return ConditionalExpectation(Pinching{std::move(projectors)}, static_cast<int>(d));
  }

  static ConditionalExpectation partial_trace(int d_keep, int s)
  {
    if (d_keep < 1 || s < 1) {
      throw Error(ErrorKind::DimMismatch, "partial trace factor needs positive dimensions");
    }
    return ConditionalExpectation(PartialTraceFactor{d_keep, s}, d_keep * s);
  }

  int dim() const noexcept { return dim_; }
  const Kind& kind() const noexcept { return kind_; }
  bool is_pinching() const noexcept { return std::holds_alternative<Pinching>(kind_); }

 private:
  ConditionalExpectation(Kind kind, int dim) : kind_(std::move(kind)), dim_(dim) {}

  Kind kind_;
  int dim_;
};

inline Matrix cond_exp_apply(const ConditionalExpectation& e, const Matrix& x)
{
  if (x.rows() != e.dim() || x.cols() != e.dim()) {
    throw Error(ErrorKind::DimMismatch, "cond_exp_apply: operand dimension mismatch");
  }
  return std::visit(
      [&](const auto& kind) -> Matrix {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, Pinching>) {
          Matrix out = Matrix::Zero(x.rows(), x.cols());
          for (const auto& p : kind.projectors) {
            out.noalias() += p * x * p;
          }
          return out;
        } else {
          const Matrix reduced = partial_trace_second(x, kind.d_keep, kind.s);
          return kron(reduced, identity(kind.s) / static_cast<double>(kind.s));
        }
      },
      e.kind());
}

inline Matrix apply(const ConditionalExpectation& e, const Matrix& x) { return cond_exp_apply(e, x); }

inline DensityMatrix apply(const ConditionalExpectation& e, const DensityMatrix& rho)
{
  return DensityMatrix::from_matrix(hermitian_part(cond_exp_apply(e, rho.mat())));
}

/// Kraus form: {P_k} for a pinching, {(I ⊗ |b⟩⟨a|)/√s} (a-major order) for the
/// partial-trace factor.
inline KrausChannel as_kraus(const ConditionalExpectation& e)
{
  return std::visit(
      [&](const auto& kind) -> KrausChannel {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, Pinching>) {
          return KrausChannel(kind.projectors);
        } else {
          std::vector<Matrix> ops;
          const double norm = 1.0 / std::sqrt(static_cast<double>(kind.s));
          for (int a = 0; a < kind.s; ++a) {
            for (int b = 0; b < kind.s; ++b) {
              Matrix flip = Matrix::Zero(kind.s, kind.s);
              flip(b, a) = norm;
              ops.push_back(kron(identity(kind.d_keep), flip));
            }
          }
          return KrausChannel(std::move(ops));
        }
      },
      e.kind());
}

// ---------------------------------------------------------------------------
// Standard channels and random ensembles

inline KrausChannel identity_channel(int d) { return KrausChannel({identity(d)}); }

/// X ↦ tr[X] I/d, Kraus {|i⟩⟨j|/√d}.
inline KrausChannel completely_depolarizing(int d)
{
  std::vector<Matrix> ops;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Matrix k = Matrix::Zero(d, d);
      k(i, j) = 1.0 / std::sqrt(static_cast<double>(d));
      ops.push_back(std::move(k));
    }
  }
  return KrausChannel(std::move(ops));
}

inline ConditionalExpectation diagonal_pinching(int d)
{
  std::vector<Matrix> projectors;
  for (int i = 0; i < d; ++i) {
    Matrix p = Matrix::Zero(d, d);
    p(i, i) = 1.0;
    projectors.push_back(std::move(p));
  }
  return ConditionalExpectation::pinching(std::move(projectors));
}

/// Pinching onto consecutive blocks of a fixed basis (columns of `basis`).
inline ConditionalExpectation block_pinching(const Matrix& basis, const std::vector<int>& block_sizes)
{
  std::vector<Matrix> projectors;
  int offset = 0;
  for (int size : block_sizes) {
    const Matrix cols = basis.middleCols(offset, size);
    projectors.push_back(hermitian_part(cols * cols.adjoint()));
    offset += size;
  }
  if (offset != basis.cols()) {
    throw Error(ErrorKind::DimMismatch, "block sizes do not cover the basis");
  }
  return ConditionalExpectation::pinching(std::move(projectors));
}

/// Random block sizes (at least two blocks when d ≥ 2) summing to d.
inline std::vector<int> random_block_sizes(int d, CounterRng& rng)
{
  if (d < 2) {
    return {d};
  }
  const int blocks = rng.uniform_int(2, d);
  std::vector<int> sizes(static_cast<std::size_t>(blocks), 1);
  for (int extra = d - blocks; extra > 0; --extra) {
    sizes[static_cast<std::size_t>(rng.uniform_int(0, blocks - 1))] += 1;
  }
  return sizes;
}

/// Pinching onto random blocks of a Haar-random basis.
inline ConditionalExpectation random_pinching(int d, std::uint64_t seed)
{
  CounterRng rng(seed);
  const Matrix u = random_unitary(d, rng);
  return block_pinching(u, random_block_sizes(d, rng));
}

/// Isometry from the QR factor of a Gaussian (d_out·s)×d_in matrix, Kraus
/// operators read off its environment slices: K_a(i, j) = V(i·s + a, j).
inline KrausChannel random_channel(int d_in, int d_out, int s, std::uint64_t seed)
{
  if (d_in < 1 || d_out < 1 || s < 1 || d_out * s < d_in) {
    throw Error(ErrorKind::InvalidChannel, "random_channel: need d_out*s >= d_in");
  }
  CounterRng rng(seed);
  const Matrix v = random_isometry(d_out * s, d_in, rng);
  std::vector<Matrix> ops(static_cast<std::size_t>(s), Matrix::Zero(d_out, d_in));
  for (int a = 0; a < s; ++a) {
    for (int i = 0; i < d_out; ++i) {
      ops[static_cast<std::size_t>(a)].row(i) = v.row(i * s + a);
    }
  }
  return KrausChannel(std::move(ops));
}

// ---------------------------------------------------------------------------
// The contraction U(X) = σ^{1/2} T*(σ_T^{-1/2} X) and its adjoint

using LinearMap = std::function<Matrix(const Matrix&)>;

struct ContractionPair {
  LinearMap forward;  // U : operators on C^{d_out} → operators on C^{d_in}
  LinearMap adjoint;  // U*(Y) = σ_T^{-1/2} T(σ^{1/2} Y)
  int d_in = 0;
  int d_out = 0;
};

inline ContractionPair build_contraction_U(const Matrix& sigma, const KrausChannel& t)
{
  const Matrix sigma_t = hermitian_part(bsdpi::apply(t, sigma));
  if (numerical_rank(sigma_t) == 0) {
    throw Error(ErrorKind::SingularState, "build_contraction_U: T(sigma) vanishes");
  }
  const Matrix sigma_half = sqrt_psd(sigma);
  const Matrix sigma_t_inv_half = inv_sqrt_psd(sigma_t);
  ContractionPair u;
  u.d_in = t.d_in();
  u.d_out = t.d_out();
  u.forward = [=](const Matrix& x) -> Matrix { return sigma_half * adjoint_apply(t, sigma_t_inv_half * x); };
  u.adjoint = [=](const Matrix& y) -> Matrix { return sigma_t_inv_half * bsdpi::apply(t, sigma_half * y); };
  return u;
}

inline ContractionPair build_contraction_U(const DensityMatrix& sigma, const KrausChannel& t)
{
  return build_contraction_U(sigma.mat(), t);
}

/// Matrix of a linear map between operator spaces in the column-stacking
/// basis: column (i + j·d_in) holds vec(map(|i⟩⟨j|)). Meant for d ≤ 8.
inline Matrix superoperator_matrix(const LinearMap& map, int d_in, int d_out)
{
  Matrix out(static_cast<Eigen::Index>(d_out) * d_out, static_cast<Eigen::Index>(d_in) * d_in);
  for (int j = 0; j < d_in; ++j) {
    for (int i = 0; i < d_in; ++i) {
      Matrix unit = Matrix::Zero(d_in, d_in);
      unit(i, j) = 1.0;
      const Matrix image = map(unit);
      out.col(i + j * d_in) = Eigen::Map<const Eigen::VectorXcd>(image.data(), image.size());
    }
  }
  return out;
}

} // namespace bsdpi

#endif // BSDPI_CHANNELS_HPP
