#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace deconv {

/// Result of integrating N integrands that share one set of evaluations.
template <std::size_t N>
struct QuadratureResult {
  std::array<double, N> value{};
  /// Summed per-panel error estimates.
  std::array<double, N> error{};
  /// Integral of |f| per component; tolerances are relative to this.
  std::array<double, N> l1{};
  std::size_t panels = 0;
  bool converged = true;

  /// Largest error relative to the component's L1 norm.
  double relative_error() const {
    double worst = 0.0;
    for (std::size_t c = 0; c < N; ++c) {
      if (l1[c] > 0.0) worst = std::max(worst, error[c] / l1[c]);
    }
    return worst;
  }
};

/// Sorted, de-duplicated breakpoints restricted to (lo, hi), with lo and hi
/// themselves as the first and last entries.
inline std::vector<double> panel_edges(double lo, double hi,
                                       std::vector<double> interior) {
  std::vector<double> edges;
  edges.reserve(interior.size() + 2);
  edges.push_back(lo);
  std::sort(interior.begin(), interior.end());
  for (double x : interior) {
    if (x > edges.back() && x < hi) edges.push_back(x);
  }
  edges.push_back(hi);
  return edges;
}

namespace detail {

template <std::size_t N>
struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::array<double, N> value{};
  std::array<double, N> error{};
  std::array<double, N> l1{};
};

// 10-point Gauss / 21-point Kronrod pair on [a, b] with the QUADPACK error
// heuristic applied per component.
template <std::size_t N, class F>
Panel<N> gauss_kronrod_21(F& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& xk = Kronrod::abscissa();  // xk[0] = 0, odd indices are Gauss nodes
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();

  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<std::array<double, N>, 21> fx;
  fx[0] = f(centre);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    fx[2 * i - 1] = f(centre - half * xk[i]);
    fx[2 * i] = f(centre + half * xk[i]);
  }

  Panel<N> out;
  out.a = a;
  out.b = b;
  for (std::size_t c = 0; c < N; ++c) {
    double kronrod = wk[0] * fx[0][c];
    double gauss = 0.0;
    double abs_sum = wk[0] * std::abs(fx[0][c]);
    for (std::size_t i = 1; i < xk.size(); ++i) {
      const double pair = fx[2 * i - 1][c] + fx[2 * i][c];
      kronrod += wk[i] * pair;
      abs_sum += wk[i] * (std::abs(fx[2 * i - 1][c]) + std::abs(fx[2 * i][c]));
      if (i % 2 == 1) gauss += wg[i / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = wk[0] * std::abs(fx[0][c] - mean);
    for (std::size_t i = 1; i < xk.size(); ++i) {
      asc += wk[i] * (std::abs(fx[2 * i - 1][c] - mean) + std::abs(fx[2 * i][c] - mean));
    }

    double err = std::abs((kronrod - gauss) * half);
    const double resasc = asc * std::abs(half);
    const double resabs = abs_sum * std::abs(half);
    if (resasc != 0.0 && err != 0.0) {
      err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
      err = std::max(50.0 * eps * resabs, err);
    }
    out.value[c] = kronrod * half;
    out.error[c] = err;
    out.l1[c] = resabs;
  }
  return out;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of a vector-valued integrand
/// f(x) -> std::array<double, N> over consecutive panels [edges[i],
/// edges[i+1]]. The panel with the worst error relative to its component
/// tolerance (rel_tol times the component's L1 norm) is bisected until every
/// component meets its tolerance or max_panels is reached.
template <std::size_t N, class F>
QuadratureResult<N> integrate_adaptive(F&& f, std::span<const double> edges,
                                       double rel_tol,
                                       std::size_t max_panels = 4000) {
  std::vector<detail::Panel<N>> panels;
  panels.reserve(edges.size() + 64);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] > edges[i]) {
      panels.push_back(detail::gauss_kronrod_21<N>(f, edges[i], edges[i + 1]));
    }
  }

  QuadratureResult<N> out;
  auto totals = [&] {
    out.value.fill(0.0);
    out.error.fill(0.0);
    out.l1.fill(0.0);
    for (const auto& p : panels) {
      for (std::size_t c = 0; c < N; ++c) {
        out.value[c] += p.value[c];
        out.error[c] += p.error[c];
        out.l1[c] += p.l1[c];
      }
    }
  };

  constexpr double tiny = std::numeric_limits<double>::min();
  for (;;) {
    totals();
    std::array<double, N> tol;
    bool done = true;
    for (std::size_t c = 0; c < N; ++c) {
      tol[c] = std::max(rel_tol * out.l1[c], tiny);
      if (out.error[c] > tol[c]) done = false;
    }
    if (done) break;
    if (panels.size() >= max_panels) {
      out.converged = false;
      break;
    }

    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      double score = 0.0;
      for (std::size_t c = 0; c < N; ++c) {
        score = std::max(score, panels[i].error[c] / tol[c]);
      }
      if (score > worst_score) {
        worst_score = score;
        worst = i;
      }
    }
    const double a = panels[worst].a;
    const double b = panels[worst].b;
    const double mid = 0.5 * (a + b);
    if (!(mid > a && mid < b)) {
      // Panel cannot be split further in double precision.
      out.converged = false;
      break;
    }
    panels[worst] = detail::gauss_kronrod_21<N>(f, a, mid);
    panels.push_back(detail::gauss_kronrod_21<N>(f, mid, b));
  }
  out.panels = panels.size();
  return out;
}

/// Scalar convenience wrapper around integrate_adaptive.
template <class F>
QuadratureResult<1> integrate_scalar(F&& f, std::span<const double> edges,
                                     double rel_tol,
                                     std::size_t max_panels = 4000) {
  auto wrapped = [&](double x) { return std::array<double, 1>{f(x)}; };
  return integrate_adaptive<1>(wrapped, edges, rel_tol, max_panels);
}

}  // namespace deconv
