#include "ghost/phase_curves.hpp"

#include <cmath>
#include <functional>
#include <utility>

#include "ghost/errors.hpp"

namespace ghost {

double branch_p_H(const ModelSpec& model, double x) {
  const auto s = model.split_rates(x);
  return std::log(s.death / s.birth);
}

double branch_p_2(const ModelSpec& model, double x) {
  const auto s = model.split_rates(x);
  return std::log(s.death_dx / s.birth_dx);
}

namespace {

struct Minimum {
  double x;
  double value;
};

// Golden-section search for the minimum of a unimodal f on [lo, hi].
Minimum golden_minimum(const std::function<double(double)>& f, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-12 * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

// Grid scan over log-spaced x followed by golden-section refinement.
Minimum scan_minimum(const std::function<double(double)>& f, double x_lo, double x_hi) {
  const int n = 400;
  const double ratio = std::pow(x_hi / x_lo, 1.0 / (n - 1));
  int best = 0;
  double best_value = f(x_lo);
  double x = x_lo;
  for (int i = 1; i < n; ++i) {
    x *= ratio;
    const double v = f(x);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double lo = x_lo * std::pow(ratio, std::max(best - 1, 0));
  const double hi = x_lo * std::pow(ratio, std::min(best + 1, n - 1));
  return golden_minimum(f, lo, hi);
}

// Sign-change bisection of f on [lo, hi] to machine resolution.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double f_lo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if ((f_mid <= 0.0) == (f_lo <= 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PhaseCurves phase_curves(const ModelSpec& base, double epsilon, std::span<const double> x_grid) {
  if (!(epsilon > 0.0)) throw DomainError("phase_curves: epsilon must be > 0");
  for (double x : x_grid) {
    if (!(x > 0.0)) throw DomainError("phase_curves: x grid must be strictly positive");
  }
  const ModelSpec model = base.with_epsilon(epsilon);
  const ModelParams& q = model.params();

  PhaseCurves out;
  out.epsilon = epsilon;
  out.x.assign(x_grid.begin(), x_grid.end());
  out.p_H.reserve(x_grid.size());
  out.p_1.reserve(x_grid.size());
  out.p_2.reserve(x_grid.size());
  for (double x : x_grid) {
    const double pH = branch_p_H(model, x);
    out.p_H.push_back(pH);
    out.p_1.push_back(pH / 2.0);
    out.p_2.push_back(branch_p_2(model, x));
  }

  auto p_H = [&](double x) { return branch_p_H(model, x); };
  auto p_2 = [&](double x) { return branch_p_2(model, x); };

  switch (model.kind()) {
    case ModelKind::Hill:
      out.x_min_H = q.A;
      out.p_min_H = std::log(2.0 * q.A * epsilon / q.k);
      out.x_min_p = q.A / std::sqrt(3.0);
      out.p_min_p = std::log(8.0 * std::sqrt(3.0) * q.A * epsilon / (9.0 * q.k));
      break;
    case ModelKind::Autocatalytic:
      out.x_min_H = std::sqrt(q.C * epsilon / q.k);
      out.p_min_H = std::log(2.0 * std::sqrt(epsilon / (q.k * q.C)));
      out.x_min_p = std::sqrt(q.C * epsilon / (3.0 * q.k));
      out.p_min_p = std::log(std::sqrt(3.0 * epsilon / (q.k * q.C)));
      break;
    case ModelKind::Custom: {
      const auto mh = scan_minimum(p_H, 1e-4, 10.0);
      const auto mp = scan_minimum(p_2, 1e-4, 10.0);
      out.x_min_H = mh.x;
      out.p_min_H = mh.value;
      out.x_min_p = mp.x;
      out.p_min_p = mp.value;
      break;
    }
  }

  if (out.p_min_p <= 0.0) {
    if (out.p_min_p == 0.0) {
      out.x_F = out.x_min_p;
      out.x_0 = out.x_min_p;
    } else {
      double lo = out.x_min_p;
      double hi = out.x_min_p;
      for (int i = 0; i < 200 && p_2(lo) <= 0.0; ++i) lo *= 0.5;
      for (int i = 0; i < 200 && p_2(hi) <= 0.0; ++i) hi *= 2.0;
      if (p_2(lo) > 0.0) out.x_F = bisect(p_2, lo, out.x_min_p);
      if (p_2(hi) > 0.0) out.x_0 = bisect(p_2, out.x_min_p, hi);
    }
  }
  return out;
}

}  // namespace ghost
