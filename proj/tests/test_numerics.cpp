#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "bsdpi.hpp"

using namespace bsdpi;
using Catch::Matchers::WithinAbs;

namespace {

Matrix diag(std::initializer_list<double> v)
{
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

// independent spectral routine for oracles
Matrix eigen_fn(const Matrix& a, double (*f)(double))
{
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  Eigen::VectorXd v = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * v.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

double classical_kl(const Eigen::VectorXd& p, const Eigen::VectorXd& q)
{
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0) {
      s += p(i) * std::log(p(i) / q(i));
    }
  }
  return s;
}

// −tr[σ log(σ^{-1/2}ρσ^{-1/2})] straight from Eigen
double eigen_bs(const Matrix& sigma, const Matrix& rho)
{
  const Matrix si = eigen_fn(sigma, [](double x) { return 1.0 / std::sqrt(x); });
  const Matrix g = si * rho * si;
  return -(sigma * eigen_fn(0.5 * (g + g.adjoint()), [](double x) { return std::log(x); })).trace().real();
}

const Matrix pauli_x = (Matrix(2, 2) << 0, 1, 1, 0).finished();
const Matrix pauli_z = (Matrix(2, 2) << 1, 0, 0, -1).finished();

} // namespace

// ---------------------------------------------------------------------------
// matcore

TEST_CASE("herm_eig on small exact inputs", "[matcore]")
{
  const auto a = herm_eig(diag({1, 2}));
  CHECK_THAT(a.values(0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(a.values(1), WithinAbs(2.0, 1e-15));
  CHECK(((a.vectors.cwiseAbs() - Eigen::MatrixXd::Identity(2, 2)).norm()) < 1e-15);

  const auto x = herm_eig(pauli_x);
  CHECK_THAT(x.values(0), WithinAbs(-1.0, 1e-14));
  CHECK_THAT(x.values(1), WithinAbs(1.0, 1e-14));
}

TEST_CASE("herm_eig agrees with an independent eigensolver", "[matcore]")
{
  for (int trial = 0; trial < 100; ++trial) {
    CounterRng rng(derive_seed(11, trial));
    const int d = 1 + trial % 8;
    const Matrix a = random_hermitian(d, rng);
    const auto sys = herm_eig(a);
    const double scale = std::max(1.0, a.norm());
    CHECK((sys.reconstruct() - a).norm() <= 1e-10 * scale);
    CHECK((sys.vectors.adjoint() * sys.vectors - identity(d)).norm() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    CHECK((sys.values - es.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-10 * scale);
  }
}

TEST_CASE("herm_eig rejects non-Hermitian input", "[matcore]")
{
  Matrix a = pauli_x;
  a(0, 1) = 2.0;
  CHECK_THROWS_AS(herm_eig(a), Error);
  try {
    herm_eig(a);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHermitian);
  }
}

TEST_CASE("matrix_fn examples", "[matcore]")
{
  CounterRng rng(3);
  const Matrix a = random_hermitian(4, rng);
  CHECK((matrix_fn(a, functions::identity()) - a).norm() < 1e-12);
  CHECK((matrix_fn(diag({4, 9}), functions::sqrt()) - diag({2, 3})).norm() < 1e-14);

  for (int trial = 0; trial < 20; ++trial) {
    CounterRng r(derive_seed(5, trial));
    const Matrix b = random_hermitian(1 + trial % 5, r);
    const Matrix eb = eigen_fn(b, [](double x) { return std::exp(x); });
    CHECK((matrix_fn(0.5 * (eb + eb.adjoint()), functions::log()) - b).norm() < 1e-9);
  }
}

TEST_CASE("spectral calculus composes", "[matcore][property]")
{
  for (int trial = 0; trial < 30; ++trial) {
    const DensityMatrix rho = random_density(4, 4, derive_seed(17, trial));
    const Matrix sq = matrix_fn(rho.mat(), functions::square());
    CHECK((matrix_fn(sq, functions::sqrt()) - rho.mat()).norm() < 1e-9);
  }
}

TEST_CASE("pinv examples and Moore-Penrose oracle", "[matcore]")
{
  CHECK((pinv(diag({2, 0})) - diag({0.5, 0})).norm() < 1e-15);

  const Matrix psi = (Matrix(2, 1) << cplx(0.6, 0), cplx(0, 0.8)).finished();
  const Matrix p = psi * psi.adjoint();
  CHECK((pinv(p) - p).norm() < 1e-12);

  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 4;
    const DensityMatrix full = random_density(d, d, derive_seed(23, trial));
    CHECK((full.mat() * pinv(full.mat()) - identity(d)).norm() < 1e-9);

    const DensityMatrix low = random_density(d, d - 1, derive_seed(29, trial));
    const Matrix ref = low.mat().completeOrthogonalDecomposition().pseudoInverse();
    CHECK((pinv(low.mat()) - ref).norm() < 1e-6 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("schatten norms and the HS inner product", "[matcore]")
{
  const Matrix a = diag({3, -4});
  CHECK_THAT(schatten_norm(a, Schatten::One), WithinAbs(7.0, 1e-14));
  CHECK_THAT(schatten_norm(a, Schatten::Inf), WithinAbs(4.0, 1e-14));
  CHECK_THAT(schatten_norm(a, Schatten::Two), WithinAbs(5.0, 1e-14));

  CHECK_THAT(hs_inner(identity(2), identity(2)).real(), WithinAbs(2.0, 1e-15));
  CHECK_THAT(std::abs(hs_inner(pauli_x, pauli_z)), WithinAbs(0.0, 1e-15));

  CounterRng rng(41);
  const Matrix g = gaussian_matrix(3, 3, rng);
  CHECK_THAT(hs_inner(g, g).real(), WithinAbs(g.squaredNorm(), 1e-12));
  // trace norm of a general matrix against an SVD oracle
  Eigen::JacobiSVD<Matrix> svd(g);
  CHECK_THAT(schatten_norm(g, Schatten::One), WithinAbs(svd.singularValues().sum(), 1e-10));
}

TEST_CASE("adaptive quadrature", "[matcore]")
{
  CHECK_THAT(integrate_adaptive([](double) { return 1.0; }, 0.0, 1.0, 1e-12), WithinAbs(1.0, 1e-12));
  CHECK_THAT(integrate_adaptive([](double t) { return t; }, 0.0, 2.0, 1e-12), WithinAbs(2.0, 1e-12));

  const double e = std::numbers::e;
  const double hi = 1e6;
  const auto g = [e](double t) { return 1.0 / (1.0 + t) - 1.0 / (t + e); };
  // antiderivative log((1+t)/(t+e))
  const double exact = std::log((1.0 + hi) / (hi + e)) - std::log(1.0 / e);
  CHECK_THAT(integrate_adaptive(g, 0.0, hi, 1e-10), WithinAbs(exact, 1e-8));
  CHECK_THAT(exact, WithinAbs(1.0, 2e-6));
}

// ---------------------------------------------------------------------------
// states

TEST_CASE("random_density shapes and determinism", "[states]")
{
  const DensityMatrix one = random_density(1, 1, 99);
  CHECK(std::abs(one.mat()(0, 0) - cplx(1.0, 0.0)) < 1e-15);

  const DensityMatrix a = random_density(4, 4, 5);
  const DensityMatrix b = random_density(4, 4, 5);
  CHECK((a.mat() - b.mat()).norm() == 0.0);

  const DensityMatrix low = random_density(4, 2, 7);
  CHECK(numerical_rank(low.mat()) == 2);
  Eigen::SelfAdjointEigenSolver<Matrix> es(low.mat());
  CHECK(es.eigenvalues()(1) < 1e-12);
  CHECK(es.eigenvalues()(2) > 1e-6);
}

TEST_CASE("DensityMatrix validation", "[states]")
{
  CHECK_THROWS_AS(DensityMatrix::from_matrix(diag({0.5, 0.6})), Error);
  CHECK_THROWS_AS(DensityMatrix::from_matrix(diag({1.5, -0.5})), Error);
  Matrix nh = diag({0.5, 0.5});
  nh(0, 1) = 0.1;
  try {
    DensityMatrix::from_matrix(nh);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHermitian);
  }
}

TEST_CASE("regularize arithmetic", "[states]")
{
  CHECK((regularize(diag({1, 0}), 1.0) - diag({2.0 / 3.0, 1.0 / 3.0})).norm() < 1e-15);
  CHECK((regularize(diag({1, 0}), 0.01) - diag({1.01 / 1.02, 0.01 / 1.02})).norm() < 1e-15);

  const DensityMatrix rho = random_density(3, 3, 13);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const Matrix r = regularize(rho.mat(), eps);
    CHECK(std::abs(trace_real(r) - 1.0) <= 1e-14);
    CHECK(herm_eig(r).min_value() > herm_eig(rho.mat()).min_value());
    const double dist = (r - rho.mat()).norm();
    CHECK(dist < prev);
    prev = dist;
  }
  CHECK(prev < 1e-7);
}

TEST_CASE("support projector and Gamma", "[states]")
{
  CHECK((support_projector(diag({0.7, 0.3, 0})) - diag({1, 1, 0})).norm() < 1e-14);
  const DensityMatrix full = random_density(3, 3, 4);
  CHECK((support_projector(full.mat()) - identity(3)).norm() < 1e-10);

  const Matrix psi = (Matrix(2, 1) << cplx(0.6, 0), cplx(0, 0.8)).finished();
  const Matrix pure = psi * psi.adjoint();
  CHECK((support_projector(pure) - pure).norm() < 1e-12);

  const GammaOperator g = gamma(diag({0.5, 0.5}), diag({0.25, 0.75}));
  CHECK((g.mat - diag({0.5, 1.5})).norm() < 1e-14);
  CHECK_THAT(g.sup_norm, WithinAbs(1.5, 1e-14));

  const GammaOperator same = gamma(full.mat(), full.mat());
  CHECK((same.mat - identity(3)).norm() < 1e-10);
  CHECK_THAT(same.sup_norm, WithinAbs(1.0, 1e-10));

  for (int trial = 0; trial < 30; ++trial) {
    const DensityMatrix s = random_density(3, 3, derive_seed(61, trial));
    const DensityMatrix r = random_density(3, 3, derive_seed(67, trial));
    const Matrix gm = gamma(s, r).mat;
    const Matrix sh = sqrt_psd(s.mat());
    CHECK(std::abs(hs_inner(sh, gm * sh).real() - 1.0) < 1e-10);
    CHECK(herm_eig(gm).min_value() > -1e-12);
  }
}

// ---------------------------------------------------------------------------
// channels

TEST_CASE("channel validation", "[channels]")
{
  CHECK_THROWS_AS(KrausChannel({0.5 * identity(2)}), Error);
  CHECK_NOTHROW(KrausChannel({identity(2)}));
  CHECK_THROWS_AS(ConditionalExpectation::pinching({diag({1, 0}), diag({1, 0})}), Error);
}

TEST_CASE("channel application examples", "[channels]")
{
  CounterRng rng(2);
  const Matrix x = gaussian_matrix(3, 3, rng);
  CHECK((bsdpi::apply(identity_channel(3), x) - x).norm() < 1e-15);

  const KrausChannel diag_pinch = as_kraus(diagonal_pinching(3));
  CHECK((bsdpi::apply(diag_pinch, x) - Matrix(x.diagonal().asDiagonal())).norm() < 1e-15);

  const DensityMatrix rho = random_density(2, 2, 8);
  CHECK((bsdpi::apply(completely_depolarizing(2), rho.mat()) - identity(2) / 2.0).norm() < 1e-14);
}

TEST_CASE("adjoint is the Hilbert-Schmidt dual", "[channels][property]")
{
  for (int trial = 0; trial < 30; ++trial) {
    const KrausChannel t = random_channel(3, 2, 3, derive_seed(71, trial));
    CounterRng rng(derive_seed(73, trial));
    const Matrix x = gaussian_matrix(3, 3, rng);
    const Matrix y = gaussian_matrix(2, 2, rng);
    CHECK(std::abs(hs_inner(y, bsdpi::apply(t, x)) - hs_inner(adjoint_apply(t, y), x)) < 1e-10);
    CHECK((adjoint_apply(t, identity(2)) - identity(3)).norm() < 1e-10);
  }
  const ConditionalExpectation e = random_pinching(4, 3);
  CounterRng rng(79);
  const Matrix y = gaussian_matrix(4, 4, rng);
  CHECK((adjoint_apply(as_kraus(e), y) - cond_exp_apply(e, y)).norm() < 1e-12);
}

TEST_CASE("Stinespring dilation", "[channels]")
{
  const StinespringIsometry id = stinespring(identity_channel(2));
  CHECK(id.s == 1);
  CHECK((id.v - identity(2)).norm() < 1e-15);

  const Matrix p0 = diag({1, 0});
  const Matrix p1 = diag({0, 1});
  const StinespringIsometry pv = stinespring(as_kraus(ConditionalExpectation::pinching({p0, p1})));
  const Matrix e0 = (Matrix(2, 1) << 1, 0).finished();
  const Matrix e1 = (Matrix(2, 1) << 0, 1).finished();
  CHECK((pv.v - (kron(p0, e0) + kron(p1, e1))).norm() < 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    const KrausChannel t = random_channel(2, 2, 3, derive_seed(83, trial));
    const StinespringIsometry v = stinespring(t);
    CHECK((v.v.adjoint() * v.v - identity(2)).norm() < 1e-10);
    const DensityMatrix w = random_density(2, 2, derive_seed(89, trial));
    CHECK((v.channel_output(w.mat()) - bsdpi::apply(t, w.mat())).norm() < 1e-12);
  }
}

TEST_CASE("conditional expectations", "[channels]")
{
  CounterRng rng(97);
  const Matrix x = gaussian_matrix(3, 3, rng);
  CHECK((cond_exp_apply(ConditionalExpectation::pinching({identity(3)}), x) - x).norm() < 1e-15);

  const Matrix dx = Matrix(x.diagonal().asDiagonal());
  CHECK((cond_exp_apply(diagonal_pinching(3), dx) - dx).norm() < 1e-15);

  const DensityMatrix w1 = random_density(2, 2, 5);
  const Matrix fixed = kron(w1.mat(), identity(3) / 3.0);
  CHECK((cond_exp_apply(ConditionalExpectation::partial_trace(2, 3), fixed) - fixed).norm() < 1e-14);

  const ConditionalExpectation pinch = random_pinching(4, 1);
  const ConditionalExpectation ptr = ConditionalExpectation::partial_trace(2, 2);
  CHECK(as_kraus(ConditionalExpectation::pinching({diag({1, 0}), diag({0, 1})})).kraus().size() == 2);
  for (int trial = 0; trial < 50; ++trial) {
    CounterRng r(derive_seed(101, trial));
    const Matrix y = gaussian_matrix(4, 4, r);
    for (const auto* e : {&pinch, &ptr}) {
      const Matrix ey = cond_exp_apply(*e, y);
      CHECK((bsdpi::apply(as_kraus(*e), y) - ey).norm() < 1e-12);
      CHECK((cond_exp_apply(*e, ey) - ey).norm() < 1e-10);
      CHECK(std::abs(ey.trace() - y.trace()) < 1e-12);
    }
  }
}

TEST_CASE("the contraction U", "[channels]")
{
  const DensityMatrix sigma = random_density(3, 3, 19);
  CounterRng rng(103);
  const Matrix x = gaussian_matrix(3, 3, rng);
  const ContractionPair u_id = build_contraction_U(sigma, identity_channel(3));
  CHECK((u_id.forward(x) - x).norm() < 1e-9);

  const KrausChannel t = random_channel(3, 2, 2, 107);
  const ContractionPair u = build_contraction_U(sigma, t);
  const Matrix sigma_t = bsdpi::apply(t, sigma.mat());
  CHECK((u.forward(sqrt_psd(sigma_t)) - sqrt_psd(sigma.mat())).norm() < 1e-10);
  // forward and adjoint are HS duals
  const Matrix y = gaussian_matrix(2, 2, rng);
  CHECK(std::abs(hs_inner(u.forward(y), x) - hs_inner(y, u.adjoint(x))) < 1e-10);
}

TEST_CASE("Jensen's operator inequality for a pinching", "[channels][property]")
{
  // E(A)^2 <= E(A^2) for the operator convex x^2
  for (int trial = 0; trial < 30; ++trial) {
    CounterRng rng(derive_seed(109, trial));
    const Matrix a = random_hermitian(4, rng);
    const ConditionalExpectation e = random_pinching(4, derive_seed(113, trial));
    const Matrix ea = cond_exp_apply(e, a);
    const Matrix diff = cond_exp_apply(e, a * a) - ea * ea;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (diff + diff.adjoint()));
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
  }
}

// ---------------------------------------------------------------------------
// divergences

TEST_CASE("classical examples", "[divergences]")
{
  const Matrix s = diag({0.5, 0.5});
  const Matrix r = diag({0.25, 0.75});
  const double kl = 0.5 * std::log(4.0 / 3.0);
  const auto fam = families::xlogx();
  CHECK_THAT(standard_f(s, r, fam), WithinAbs(kl, 1e-12));
  CHECK_THAT(relative_entropy(s, r), WithinAbs(kl, 1e-12));
  CHECK_THAT(maximal_f(s, r, fam), WithinAbs(kl, 1e-12));
  CHECK_THAT(bs_entropy(s, r), WithinAbs(kl, 1e-12));
  CHECK_THAT(bs_entropy_quadrature(s, r, 0.0, 1e-9).value, WithinAbs(kl, 1e-6));

  for (const auto& f : {families::xlogx(), families::neg_power(0.5), families::square()}) {
    const double shift = f.f(1.0);
    CHECK_THAT(standard_f(s, s, f), WithinAbs(shift, 1e-12));
    CHECK_THAT(maximal_f(s, s, f), WithinAbs(shift, 1e-12));
  }
  CHECK_THAT(bs_entropy(r, r), WithinAbs(0.0, 1e-14));
  CHECK_THAT(bs_entropy_quadrature(r, r, 0.0, 1e-9).value, WithinAbs(0.0, 1e-8));
}

TEST_CASE("standard and relative entropy agree off the diagonal", "[divergences]")
{
  const Matrix plus = (Matrix(2, 2) << 0.5, 0.5, 0.5, 0.5).finished();
  const Matrix s = 0.5 * plus + 0.25 * identity(2);
  const Matrix r = diag({0.25, 0.75});
  CHECK_THAT(standard_f(s, r, families::xlogx()), WithinAbs(relative_entropy(s, r), 1e-9));
  // independent: tr[σ log σ] − tr[σ log ρ] from Eigen
  const double ref = (s * (eigen_fn(s, [](double x) { return std::log(x); }) -
                           eigen_fn(r, [](double x) { return std::log(x); })))
                         .trace()
                         .real();
  CHECK_THAT(relative_entropy(s, r), WithinAbs(ref, 1e-12));
}

TEST_CASE("relative entropy is infinite off the support", "[divergences]")
{
  CHECK(std::isinf(relative_entropy(diag({0.5, 0.5}), diag({1, 0}))));
  CHECK(std::isfinite(relative_entropy(diag({1, 0}), diag({0.5, 0.5}))));
}

TEST_CASE("square family is the Renyi-2 trace", "[divergences][property]")
{
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 3;
    const Matrix s = random_density(d, d, derive_seed(127, trial)).mat();
    const Matrix r = random_density(d, d, derive_seed(131, trial)).mat();
    const double ref = (s * s * r.inverse()).trace().real();
    CHECK(std::abs(standard_f(s, r, families::square()) - ref) <= 1e-10 * std::max(1.0, ref));
    CHECK(std::abs(maximal_f(s, r, families::square()) - ref) <= 1e-10 * std::max(1.0, ref));
  }
}

TEST_CASE("BS entropy against independent oracles", "[divergences][property]")
{
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 2;
    const Matrix s = random_density(d, d, derive_seed(137, trial)).mat();
    const Matrix r = random_density(d, d, derive_seed(139, trial)).mat();
    const double bs = bs_entropy(s, r);
    CHECK_THAT(bs, WithinAbs(eigen_bs(s, r), 1e-9));
    CHECK_THAT(maximal_f(s, r, families::xlogx()), WithinAbs(bs, 1e-9));
    CHECK_THAT(bs_entropy_quadrature(s, r, 0.0, 1e-9).value, WithinAbs(bs, 1e-6));
    // ordering against Umegaki
    CHECK(relative_entropy(s, r) <= bs + 1e-9);
  }
}

TEST_CASE("transpose swaps the arguments", "[divergences][property]")
{
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix s = random_density(3, 3, derive_seed(149, trial)).mat();
    const Matrix r = random_density(3, 3, derive_seed(151, trial)).mat();
    for (const auto& f : {families::xlogx(), families::neg_power(0.3)}) {
      const auto ft = families::transpose(f);
      CHECK_THAT(standard_f(s, r, f), WithinAbs(standard_f(r, s, ft), 1e-9));
      CHECK_THAT(maximal_f(s, r, f), WithinAbs(maximal_f(r, s, ft), 1e-9));
    }
    // BS is the maximal divergence of −log evaluated with swapped arguments
    CHECK_THAT(bs_entropy(s, r), WithinAbs(maximal_f(r, s, families::neg_log_transpose()), 1e-9));
  }
}

TEST_CASE("BS scaling identity", "[divergences]")
{
  const Matrix s = random_density(3, 3, 157).mat();
  const Matrix r = random_density(3, 3, 163).mat();
  const double base = bs_entropy(s, r);
  for (double a : {0.5, 2.0}) {
    for (double b : {0.5, 2.0}) {
      CHECK_THAT(bs_entropy(a * s, b * r), WithinAbs(a * base + a * std::log(a / b), 1e-9));
    }
  }
}

TEST_CASE("family parameters", "[divergences]")
{
  const auto np = families::neg_power(0.5);
  REQUIRE(np.measure_C.has_value());
  CHECK_THAT(*np.measure_C, WithinAbs(std::numbers::pi, 1e-12));
  CHECK_THAT(*np.measure_alpha, WithinAbs(0.25, 1e-15));
  CHECK_THAT(*families::xlogx().measure_C, WithinAbs(1.0, 0.0));
  CHECK_THROWS_AS(families::neg_power(1.0), Error);
  CHECK_THROWS_AS(families::neg_power(0.0), Error);
  CHECK_FALSE(families::square().measure_C.has_value());
}

TEST_CASE("regularized divergences", "[divergences]")
{
  const auto fam = families::xlogx();
  const Matrix s = random_density(3, 3, 167).mat();
  const Matrix r = random_density(3, 3, 173).mat();
  for (auto kind : {DivergenceKind::Standard, DivergenceKind::Maximal}) {
    const double direct = kind == DivergenceKind::Standard ? standard_f(s, r, fam) : maximal_f(s, r, fam);
    CHECK_THAT(regularized_divergence(s, r, fam, kind).value, WithinAbs(direct, 1e-6));
  }

  const Matrix sing = diag({0.6, 0.4, 0.0});
  CHECK_THAT(regularized_divergence(sing, sing, fam, DivergenceKind::Maximal).value, WithinAbs(0.0, 1e-8));

  // commuting pair with matching supports: classical KL on the support
  const Matrix p = diag({0.6, 0.4, 0.0});
  const Matrix q = diag({0.3, 0.7, 0.0});
  const double kl = 0.6 * std::log(0.6 / 0.3) + 0.4 * std::log(0.4 / 0.7);
  for (auto kind : {DivergenceKind::Standard, DivergenceKind::Maximal}) {
    const RegularizedValue v = regularized_divergence(p, q, fam, kind);
    CHECK_THAT(v.value, WithinAbs(kl, 1e-6));
    CHECK(v.last_increment < v.prev_increment);
  }
  CHECK_THAT(bs_entropy(p, q), WithinAbs(kl, 1e-12));
}

TEST_CASE("richardson flags divergence", "[divergences]")
{
  CHECK_THROWS_AS(richardson({1.0, 2.0, 4.0, 100.0}), Error);
  CHECK_THROWS_AS(richardson({1.0, 1.0, std::nan(""), 1.0}), Error);
  const auto v = richardson({1.0 + 1e-4, 1.0 + 1e-5, 1.0 + 1e-6, 1.0 + 1e-7});
  CHECK_THAT(v.value, WithinAbs(1.0, 1e-14));
}

TEST_CASE("divergences reject bad input", "[divergences]")
{
  CHECK_THROWS_AS(maximal_f(diag({0.5, 0.5}), diag({1.0, 0.0}), families::xlogx()), Error);
  CHECK_THROWS_AS(bs_entropy(diag({0.5, 0.5, 0.0}), diag({0.5, 0.0, 0.5})), Error);
  CHECK_THROWS_AS(standard_f(diag({0.5, 0.5}), diag({0.5, 0.25, 0.25}), families::xlogx()), Error);
  try {
    bs_entropy(diag({0.5, 0.5, 0.0}), diag({0.5, 0.0, 0.5}));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SupportMismatch);
  }
}
