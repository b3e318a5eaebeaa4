#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ghost {

enum class ModelKind { Autocatalytic, Hill, Custom };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

// Named model parameters. k: growth rate, C: carrying-capacity scale
// (autocatalytic), A: half-saturation (Hill), epsilon: linear decay rate and
// bifurcation parameter.
struct ModelParams {
  double k = 1.0;
  double C = 1.0;
  double A = 1.0;
  double epsilon = 0.5;
};

// One single-step transition X -> X + step.
struct ReactionSpec {
  using ExtensiveRate =
      std::function<double(std::int64_t count, double omega, const ModelParams&)>;
  using IntensiveRate = std::function<double(double x, const ModelParams&)>;

  std::string label;
  int step = 0;  // +1 or -1
  ExtensiveRate extensive_rate;
  IntensiveRate intensive_rate;
  // d w_i / dx. Optional for custom models; a Richardson-extrapolated central
  // difference of intensive_rate is used when empty.
  IntensiveRate intensive_derivative;
};

struct RateEntry {
  double rate;
  int step;
};

struct CriticalParams {
  double eps_c;
  double x_c;
  double eps_end;
};

// Immutable birth-death model. Safe to share between threads.
class ModelSpec {
 public:
  static ModelSpec autocatalytic(ModelParams params = {.epsilon = 0.25});
  static ModelSpec hill(ModelParams params = {.epsilon = 0.5});
  static ModelSpec custom(std::string name, std::vector<ReactionSpec> reactions,
                          ModelParams params);
  // Linear death chain X -> X-1 at rate epsilon*X (no births).
  static ModelSpec pure_death(double epsilon);
  // Bundled model by name ("hill", "autocatalytic"/"autocat").
  static ModelSpec by_name(std::string_view name, ModelParams params);

  ModelKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const ModelParams& params() const { return params_; }
  double epsilon() const { return params_.epsilon; }
  std::span<const ReactionSpec> reactions() const { return reactions_; }

  // Same model with a different bifurcation parameter.
  ModelSpec with_epsilon(double epsilon) const;
  ModelSpec with_params(ModelParams params) const;

  // Throws DomainError for x < 0.
  std::vector<RateEntry> intensive_rates(double x) const;
  // Throws DomainError for count < 0 or omega <= 0.
  std::vector<RateEntry> extensive_propensities(std::int64_t count, double omega) const;
  // Sum of r_i w_i(x).
  double mean_field_rhs(double x) const;

  // Hot-path propensity evaluation for the stochastic simulator; out must hold
  // reactions().size() entries. No argument checks.
  void fill_propensities(std::int64_t count, double omega, std::span<double> out) const;

  // Intensive rates split by direction: births B(x) = sum_{r=+1} w_i and
  // deaths D(x) = sum_{r=-1} w_i, with their x-derivatives.
  struct Split {
    double birth;
    double death;
    double birth_dx;
    double death_dx;
  };
  Split split_rates(double x) const;

  double intensive_derivative(std::size_t reaction, double x) const;

 private:
  ModelSpec(ModelKind kind, std::string name, std::vector<ReactionSpec> reactions,
            ModelParams params);

  ModelKind kind_;
  std::string name_;
  std::vector<ReactionSpec> reactions_;
  ModelParams params_;
};

// Critical point of the saddle-node and the end of the slowing-down interval.
// Closed forms for the bundled models; custom models are solved by Newton
// iteration on (F, dF/dx) and (dF/dx, d2F/dx2) in (x, epsilon), searching
// x in (0, x_search_max]. Throws NumericalError when no saddle-node is found.
CriticalParams critical_params(const ModelSpec& model, double x_search_max = 10.0);

}  // namespace ghost
