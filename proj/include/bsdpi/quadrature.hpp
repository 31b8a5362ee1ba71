#ifndef BSDPI_QUADRATURE_HPP
#define BSDPI_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "bsdpi/error.hpp"

namespace bsdpi {

namespace detail {

// 15-point Kronrod nodes (positive half, descending) and weights, with the
// embedded 7-point Gauss weights on the odd-indexed nodes.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
};

inline Panel gauss_kronrod_15(const std::function<double(double)>& g, double lo, double hi)
{
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = g(center);
  double kronrod = fc * kronrod_weights[7];
  double gauss = fc * gauss_weights[3];
  for (std::size_t k = 0; k < 7; ++k) {
    const double dx = half * kronrod_nodes[k];
    const double pair = g(center - dx) + g(center + dx);
    kronrod += kronrod_weights[k] * pair;
    if (k % 2 == 1) {
      gauss += gauss_weights[k / 2] * pair;
    }
  }
  return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

} // namespace detail

inline constexpr std::size_t max_quadrature_panels = 20000;

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of g over [lo, hi].
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate is at most `tol`. Optional interior breakpoints seed the initial
/// partition. Throws NoConvergence past max_quadrature_panels.
inline double integrate_adaptive(const std::function<double(double)>& g, double lo, double hi, double tol,
                                 std::span<const double> breakpoints = {})
{
  if (!(hi > lo)) {
    return 0.0;
  }
  std::vector<double> cuts{lo};
  for (double b : breakpoints) {
    if (b > lo && b < hi) {
      cuts.push_back(b);
    }
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto by_error = [](const detail::Panel& a, const detail::Panel& b) { return a.error < b.error; };
  std::vector<detail::Panel> heap;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    heap.push_back(detail::gauss_kronrod_15(g, cuts[i], cuts[i + 1]));
  }
  std::make_heap(heap.begin(), heap.end(), by_error);

  auto total_error = [&] {
    double e = 0.0;
    for (const auto& p : heap) {
      e += p.error;
    }
    return e;
  };

  double error = total_error();
  std::size_t steps = 0;
  while (error > tol) {
    if (heap.size() >= max_quadrature_panels) {
      throw Error(ErrorKind::NoConvergence, "integrate_adaptive: panel cap exceeded");
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      throw Error(ErrorKind::NoConvergence, "integrate_adaptive: panel width underflow");
    }
    const detail::Panel left = detail::gauss_kronrod_15(g, worst.lo, mid);
    const detail::Panel right = detail::gauss_kronrod_15(g, mid, worst.hi);
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    // running sum, resynchronised now and then against cancellation drift
    error += left.error + right.error - worst.error;
    if (++steps % 64 == 0) {
      error = total_error();
    }
  }

  double sum = 0.0;
  for (const auto& p : heap) {
    sum += p.value;
  }
  return sum;
}

} // namespace bsdpi

#endif // BSDPI_QUADRATURE_HPP
