#include "ghost/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "ghost/errors.hpp"

namespace ghost {

namespace {

// Extensive propensities W_i(X) of the bundled models. Autocatalytic terms use
// the factorial (mass-action) forms, so W vanishes whenever the reaction needs
// more molecules than are present.
inline double autocat_birth(std::int64_t n, double omega, const ModelParams& p) {
  const double x = static_cast<double>(n);
  return p.k * x * (x - 1.0) / omega;
}
inline double autocat_competition(std::int64_t n, double omega, const ModelParams& p) {
  const double x = static_cast<double>(n);
  return p.k / (p.C * omega * omega) * x * (x - 1.0) * (x - 2.0);
}
inline double linear_death(std::int64_t n, double, const ModelParams& p) {
  return p.epsilon * static_cast<double>(n);
}
inline double hill_birth(std::int64_t n, double omega, const ModelParams& p) {
  const double x = static_cast<double>(n);
  return omega * p.k * x * x / (omega * omega * p.A * p.A + x * x);
}

// d/dx of f at x, Richardson-extrapolated central difference.
double richardson_derivative(const std::function<double(double)>& f, double x) {
  const double h = 1e-3 * std::max(1.0, std::abs(x));
  auto central = [&](double step) {
    if (x - step < 0.0) {
      // one-sided near the boundary of the density domain
      return (-3.0 * f(x) + 4.0 * f(x + step) - f(x + 2.0 * step)) / (2.0 * step);
    }
    return (f(x + step) - f(x - step)) / (2.0 * step);
  };
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

void require_positive_params(const ModelParams& p) {
  if (!(p.k > 0.0) || !(p.C > 0.0) || !(p.A > 0.0) || !(p.epsilon > 0.0)) {
    throw ConfigError("model parameters k, C, A, epsilon must all be > 0");
  }
}

std::vector<ReactionSpec> autocat_reactions() {
  return {
      {"birth", +1, autocat_birth, [](double x, const ModelParams& p) { return p.k * x * x; },
       [](double x, const ModelParams& p) { return 2.0 * p.k * x; }},
      {"competition", -1, autocat_competition,
       [](double x, const ModelParams& p) { return p.k / p.C * x * x * x; },
       [](double x, const ModelParams& p) { return 3.0 * p.k / p.C * x * x; }},
      {"death", -1, linear_death, [](double x, const ModelParams& p) { return p.epsilon * x; },
       [](double, const ModelParams& p) { return p.epsilon; }},
  };
}

std::vector<ReactionSpec> hill_reactions() {
  return {
      {"birth", +1, hill_birth,
       [](double x, const ModelParams& p) { return p.k * x * x / (p.A * p.A + x * x); },
       [](double x, const ModelParams& p) {
         const double d = p.A * p.A + x * x;
         return 2.0 * p.k * p.A * p.A * x / (d * d);
       }},
      {"death", -1, linear_death, [](double x, const ModelParams& p) { return p.epsilon * x; },
       [](double, const ModelParams& p) { return p.epsilon; }},
  };
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Autocatalytic:
      return "autocatalytic";
    case ModelKind::Hill:
      return "hill";
    case ModelKind::Custom:
      return "custom";
  }
  return "custom";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "hill" || name == "Hill") return ModelKind::Hill;
  if (name == "autocatalytic" || name == "autocat" || name == "Autocatalytic") {
    return ModelKind::Autocatalytic;
  }
  throw ConfigError("unknown model '" + std::string(name) +
                    "' (expected 'hill' or 'autocatalytic')");
}

ModelSpec::ModelSpec(ModelKind kind, std::string name, std::vector<ReactionSpec> reactions,
                     ModelParams params)
    : kind_(kind), name_(std::move(name)), reactions_(std::move(reactions)), params_(params) {}

ModelSpec ModelSpec::autocatalytic(ModelParams params) {
  require_positive_params(params);
  return ModelSpec(ModelKind::Autocatalytic, "autocatalytic", autocat_reactions(), params);
}

ModelSpec ModelSpec::hill(ModelParams params) {
  require_positive_params(params);
  return ModelSpec(ModelKind::Hill, "hill", hill_reactions(), params);
}

ModelSpec ModelSpec::custom(std::string name, std::vector<ReactionSpec> reactions,
                            ModelParams params) {
  if (reactions.empty()) throw ConfigError("custom model needs at least one reaction");
  for (const auto& r : reactions) {
    if (r.step != 1 && r.step != -1) {
      throw ConfigError("reaction '" + r.label + "': only steps of +1 or -1 are supported");
    }
    if (!r.extensive_rate || !r.intensive_rate) {
      throw ConfigError("reaction '" + r.label + "' is missing a rate function");
    }
  }
  return ModelSpec(ModelKind::Custom, std::move(name), std::move(reactions), params);
}

ModelSpec ModelSpec::pure_death(double epsilon) {
  ModelParams p;
  p.epsilon = epsilon;
  require_positive_params(p);
  return custom("pure_death",
                {{"death", -1, linear_death,
                  [](double x, const ModelParams& q) { return q.epsilon * x; },
                  [](double, const ModelParams& q) { return q.epsilon; }}},
                p);
}

ModelSpec ModelSpec::by_name(std::string_view name, ModelParams params) {
  switch (model_kind_from_string(name)) {
    case ModelKind::Autocatalytic:
      return autocatalytic(params);
    case ModelKind::Hill:
      return hill(params);
    case ModelKind::Custom:
      break;
  }
  throw ConfigError("custom models cannot be built by name");
}

ModelSpec ModelSpec::with_epsilon(double epsilon) const {
  ModelParams p = params_;
  p.epsilon = epsilon;
  return with_params(p);
}

ModelSpec ModelSpec::with_params(ModelParams params) const {
  require_positive_params(params);
  ModelSpec copy = *this;
  copy.params_ = params;
  return copy;
}

std::vector<RateEntry> ModelSpec::intensive_rates(double x) const {
  if (!(x >= 0.0)) throw DomainError("intensive_rates: density must be >= 0");
  std::vector<RateEntry> out;
  out.reserve(reactions_.size());
  for (const auto& r : reactions_) out.push_back({r.intensive_rate(x, params_), r.step});
  return out;
}

std::vector<RateEntry> ModelSpec::extensive_propensities(std::int64_t count, double omega) const {
  if (count < 0) throw DomainError("extensive_propensities: count must be >= 0");
  if (!(omega > 0.0)) throw DomainError("extensive_propensities: omega must be > 0");
  std::vector<RateEntry> out;
  out.reserve(reactions_.size());
  for (const auto& r : reactions_) out.push_back({r.extensive_rate(count, omega, params_), r.step});
  return out;
}

double ModelSpec::mean_field_rhs(double x) const {
  if (!(x >= 0.0)) throw DomainError("mean_field_rhs: density must be >= 0");
  double sum = 0.0;
  for (const auto& r : reactions_) sum += r.step * r.intensive_rate(x, params_);
  return sum;
}

void ModelSpec::fill_propensities(std::int64_t count, double omega, std::span<double> out) const {
  switch (kind_) {
    case ModelKind::Autocatalytic:
      out[0] = autocat_birth(count, omega, params_);
      out[1] = autocat_competition(count, omega, params_);
      out[2] = linear_death(count, omega, params_);
      return;
    case ModelKind::Hill:
      out[0] = hill_birth(count, omega, params_);
      out[1] = linear_death(count, omega, params_);
      return;
    case ModelKind::Custom:
      for (std::size_t i = 0; i < reactions_.size(); ++i) {
        out[i] = reactions_[i].extensive_rate(count, omega, params_);
      }
      return;
  }
}

double ModelSpec::intensive_derivative(std::size_t reaction, double x) const {
  const auto& r = reactions_.at(reaction);
  if (r.intensive_derivative) return r.intensive_derivative(x, params_);
  return richardson_derivative([&](double y) { return r.intensive_rate(y, params_); }, x);
}

ModelSpec::Split ModelSpec::split_rates(double x) const {
  Split s{0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < reactions_.size(); ++i) {
    const double w = reactions_[i].intensive_rate(x, params_);
    const double dw = intensive_derivative(i, x);
    if (reactions_[i].step > 0) {
      s.birth += w;
      s.birth_dx += dw;
    } else {
      s.death += w;
      s.death_dx += dw;
    }
  }
  return s;
}

namespace {

struct Root2 {
  double x;
  double eps;
};

// Newton iteration on G(x, eps) = (g0, g1) = 0 with a finite-difference
// Jacobian. Returns nullopt when it fails to converge or leaves x > 0.
template <class Residual>
std::optional<Root2> newton2(Residual&& residual, double x, double eps) try {
  // Finite-difference residuals stall at their noise floor; keep the best
  // iterate and accept it if it is small enough.
  std::optional<Root2> best;
  double best_norm = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 100; ++iter) {
    const auto [g0, g1] = residual(x, eps);
    if (!std::isfinite(g0) || !std::isfinite(g1)) break;
    if (std::abs(g0) < 1e-15 && std::abs(g1) < 1e-15) return Root2{x, eps};
    if (const double norm = std::max(std::abs(g0), std::abs(g1)); norm < best_norm) {
      best_norm = norm;
      best = Root2{x, eps};
    }
    const double hx = std::min(1e-7 * std::max(1.0, x), 0.25 * x);
    const double he = std::min(1e-7 * std::max(1.0, eps), 0.25 * eps);
    const auto [a0, a1] = residual(x + hx, eps);
    const auto [b0, b1] = residual(x - hx, eps);
    const auto [c0, c1] = residual(x, eps + he);
    const auto [d0, d1] = residual(x, eps - he);
    const double j00 = (a0 - b0) / (2 * hx), j01 = (c0 - d0) / (2 * he);
    const double j10 = (a1 - b1) / (2 * hx), j11 = (c1 - d1) / (2 * he);
    const double det = j00 * j11 - j01 * j10;
    if (det == 0.0 || !std::isfinite(det)) break;
    const double dx = (g0 * j11 - g1 * j01) / det;
    const double de = (j00 * g1 - j10 * g0) / det;
    x -= dx;
    eps -= de;
    if (!(x > 0.0) || !(eps > 0.0)) return std::nullopt;
    if (std::abs(dx) < 1e-15 * std::max(1.0, x) && std::abs(de) < 1e-15 * std::max(1.0, eps)) {
      return Root2{x, eps};
    }
  }
  if (best_norm < 1e-8) return best;
  return std::nullopt;
} catch (const ConfigError&) {
  // an iterate strayed outside the model's domain
  return std::nullopt;
}

template <class Residual>
std::optional<Root2> multistart(Residual&& residual, double eps0, double x_max) {
  for (double eps_scale : {1.0, 0.5, 2.0, 0.25, 4.0}) {
    for (int i = 1; i <= 40; ++i) {
      const double x = x_max * i / 40.0;
      // Iterates sliding into the degenerate fold at the origin have tiny
      // residuals too; those are not saddle-nodes.
      auto r = newton2(residual, x, eps0 * eps_scale);
      if (r && r->x > 1e-6 * x_max && r->eps > 1e-6 * eps0) return r;
    }
  }
  return std::nullopt;
}

}  // namespace

CriticalParams critical_params(const ModelSpec& model, double x_search_max) {
  const ModelParams& p = model.params();
  switch (model.kind()) {
    case ModelKind::Hill:
      return {p.k / (2.0 * p.A), p.A, 3.0 * std::sqrt(3.0) * p.k / (8.0 * p.A)};
    case ModelKind::Autocatalytic:
      return {p.k * p.C / 4.0, p.C / 2.0, p.k * p.C / 3.0};
    case ModelKind::Custom:
      break;
  }

  auto rhs_dx = [&](const ModelSpec& m, double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.reactions().size(); ++i) {
      s += m.reactions()[i].step * m.intensive_derivative(i, x);
    }
    return s;
  };
  auto rhs_dxx = [&](const ModelSpec& m, double x) {
    return richardson_derivative([&](double y) { return rhs_dx(m, y); }, x);
  };

  auto fold = [&](double x, double eps) {
    const ModelSpec m = model.with_epsilon(eps);
    return std::pair{m.mean_field_rhs(x), rhs_dx(m, x)};
  };
  auto inflection = [&](double x, double eps) {
    const ModelSpec m = model.with_epsilon(eps);
    return std::pair{rhs_dx(m, x), rhs_dxx(m, x)};
  };

  const auto c = multistart(fold, p.epsilon, x_search_max);
  if (!c) throw NumericalError("critical_params: no saddle-node found in the search window");
  const auto e = multistart(inflection, c->eps, x_search_max);
  if (!e) throw NumericalError("critical_params: no end of the slowing-down interval found");
  return {c->eps, c->x, e->eps};
}

}  // namespace ghost
