#pragma once

// Globally adaptive Simpson quadrature. The panel with the largest error
// estimate is bisected until the summed estimate meets
// rel_tol * |value| + abs_floor. Panels are seeded from caller breakpoints so
// narrow features are never skipped by the initial sampling.

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <span>
#include <vector>

#include "zcp/error.hpp"

namespace zcp {

struct QuadratureConfig {
  double half_width_in_sigma1 = 20.0;
  double rel_tol = 1e-8;
  int max_subdivisions = 60;  // bisection depth limit per panel

  void validate() const {
    detail::require(half_width_in_sigma1 >= 8.0, "quadrature: half_width_in_sigma1 must be >= 8");
    detail::require(rel_tol > 0.0 && rel_tol <= 1e-3, "quadrature: rel_tol must lie in (0, 1e-3]");
    detail::require(max_subdivisions >= 1, "quadrature: max_subdivisions must be >= 1");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
};

namespace detail {

struct SimpsonPanel {
  double a, b;
  double fa, flm, fm, frm, fb;
  int depth;

  double coarse() const { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }
  double fine() const { return (b - a) / 12.0 * (fa + 4.0 * flm + 2.0 * fm + 4.0 * frm + fb); }
  double error() const { return std::abs(fine() - coarse()) / 15.0; }
  double estimate() const { return fine() + (fine() - coarse()) / 15.0; }
};

struct ByError {
  bool operator()(const SimpsonPanel& x, const SimpsonPanel& y) const { return x.error() < y.error(); }
};

}  // namespace detail

template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints, double rel_tol,
                                    int max_depth, double abs_floor = 1e-13) {
  detail::require(breakpoints.size() >= 2, "quadrature: need at least two breakpoints");
  constexpr std::size_t kMaxPanels = 4'000'000;

  auto make_panel = [&](double a, double b, double fa, double fm, double fb, int depth) {
    const double h = b - a;
    return detail::SimpsonPanel{a, b, fa, f(a + 0.25 * h), fm, f(a + 0.75 * h), fb, depth};
  };

  std::priority_queue<detail::SimpsonPanel, std::vector<detail::SimpsonPanel>, detail::ByError> open;
  std::vector<detail::SimpsonPanel> frozen;  // panels at the depth limit
  double prev_f = f(breakpoints[0]);
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    const double a = breakpoints[i - 1], b = breakpoints[i];
    const double fb = f(b);
    open.push(make_panel(a, b, prev_f, f(0.5 * (a + b)), fb, 0));
    prev_f = fb;
  }

  auto totals = [&] {
    // Full resummation keeps the running totals free of cancellation drift.
    QuadratureResult r;
    auto add = [&](const detail::SimpsonPanel& p) {
      r.value += p.estimate();
      r.abs_error += p.error();
    };
    auto copy = open;
    while (!copy.empty()) {
      add(copy.top());
      copy.pop();
    }
    for (const auto& p : frozen) add(p);
    return r;
  };

  QuadratureResult result = totals();
  double value = result.value;
  double err = result.abs_error;
  std::size_t since_resum = 0;
  for (;;) {
    if (err <= rel_tol * std::abs(value) + abs_floor) {
      result = totals();
      if (result.abs_error <= rel_tol * std::abs(result.value) + abs_floor) break;
      value = result.value;
      err = result.abs_error;
    }
    if (open.empty() || open.size() + frozen.size() > kMaxPanels) {
      std::ostringstream msg;
      msg << "quadrature did not converge: achieved error " << err << " for value " << value;
      throw NumericalError(msg.str(), err);
    }
    const detail::SimpsonPanel p = open.top();
    open.pop();
    if (p.depth >= max_depth) {
      frozen.push_back(p);
      continue;
    }
    const double mid = 0.5 * (p.a + p.b);
    const auto left = make_panel(p.a, mid, p.fa, p.flm, p.fm, p.depth + 1);
    const auto right = make_panel(mid, p.b, p.fm, p.frm, p.fb, p.depth + 1);
    value += left.estimate() + right.estimate() - p.estimate();
    err += left.error() + right.error() - p.error();
    open.push(left);
    open.push(right);
    if (++since_resum == 4096) {
      result = totals();
      value = result.value;
      err = result.abs_error;
      since_resum = 0;
    }
  }
  return result;
}

}  // namespace zcp
