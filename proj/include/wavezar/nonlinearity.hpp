#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wavezar {

using RealFunction = std::function<double(double)>;

/// A source term f together with the data needed to check the structural
/// hypotheses on it: f(0) = 0, f(s) s >= 0, and the growth bounds
/// |f^(j)(s)| <= k0 (1 + |s|)^(p - j) for j = 1, 2.
struct NonlinearitySpec {
  std::string name;
  RealFunction f;
  RealFunction df;
  RealFunction d2f;
  /// Closed-form F(s) = int_0^s f, when known.
  std::optional<RealFunction> primitive;
  double p = 1.0;
  double k0 = 1.0;
};

/// f(s) = s |s|^(p-1).
NonlinearitySpec power_law(double p);
NonlinearitySpec cubic();
NonlinearitySpec linear();
NonlinearitySpec zero_nonlinearity();

/// Catalog lookup by name: "power" (uses p), "cubic", "linear", "zero".
NonlinearitySpec nonlinearity_by_name(const std::string& name, double p);

struct ProbeGrid {
  double lo = -10.0;
  double hi = 10.0;
  int points = 401;

  std::vector<double> samples() const;
};

enum class AdmissibilityMode { Existence, Uniqueness };

struct AdmissibilityReport {
  int dimension = 1;
  AdmissibilityMode mode = AdmissibilityMode::Existence;
  bool vanishes_at_zero = true;
  bool sign_condition = true;
  std::optional<double> sign_witness;
  bool growth_first = true;
  std::optional<double> growth_first_witness;
  bool growth_second = true;
  std::optional<double> growth_second_witness;
  /// p within 1 <= p <= (n+2)/(n-2) (n >= 3); any p >= 1 for n = 1, 2.
  bool existence_range = true;
  /// p within 1 <= p < n/(n-2) (n >= 3); any p >= 1 for n = 1, 2.
  bool uniqueness_range = true;

  bool admissible() const;
  /// Human-readable list of failures, empty when admissible.
  std::vector<std::string> failures() const;
};

AdmissibilityReport validate(const NonlinearitySpec& spec, int dimension, AdmissibilityMode mode,
                             const ProbeGrid& grid = {});

/// f_k: equal to f on [-k, k] and frozen at f(+-k) outside.  A TruncatedNonlinearity
/// without a level evaluates f itself (no truncation).
class TruncatedNonlinearity {
 public:
  TruncatedNonlinearity(NonlinearitySpec base, std::optional<int> level);

  const NonlinearitySpec& base() const { return base_; }
  std::optional<int> level() const { return level_; }
  bool truncated() const { return level_.has_value(); }
  bool is_zero() const { return base_.name == "zero"; }

  double value(double s) const;
  /// g_k: f' on the closed interval [-k, k], 0 outside.
  double derivative(double s) const;
  /// F_k(s) = int_0^s f_k.
  double primitive(double s) const;
  /// Lipschitz bound C_k (infinite when untruncated and p > 1).
  double lipschitz() const { return lipschitz_; }

 private:
  double base_primitive(double s) const;

  NonlinearitySpec base_;
  std::optional<int> level_;
  double k_ = 0.0;
  double f_plus_ = 0.0;
  double f_minus_ = 0.0;
  double F_plus_ = 0.0;
  double F_minus_ = 0.0;
  double lipschitz_ = 0.0;
};

/// Throws std::invalid_argument for k < 1.
TruncatedNonlinearity truncate(const NonlinearitySpec& spec, int k);
TruncatedNonlinearity untruncated(const NonlinearitySpec& spec);

/// max |f'| over 1000 k + 1 equispaced points of [-k, k], inflated by 1.001.
double lipschitz_constant(const NonlinearitySpec& spec, int k);
double lipschitz_constant(const TruncatedNonlinearity& tn);

struct GrowthBoundReport {
  std::vector<int> levels;
  /// Smallest c with |F_k(s)| <= c (s^2 + |s|^(p+1)) on the grid, per level.
  std::vector<double> constants;
  double c = 0.0;
  bool finite = true;
  /// First level from which all constants agree within 5% of their max.
  std::optional<int> settled_from;
  /// Finite, and at least two levels share the settled value.
  bool uniform_in_k = true;
};

GrowthBoundReport check_Fk_growth(const NonlinearitySpec& spec, const std::vector<int>& levels,
                                  const ProbeGrid& grid = {-5.0, 5.0, 401});

/// Adaptive Simpson quadrature of g on [a, b] to absolute tolerance `tol`.
double adaptive_simpson(const RealFunction& g, double a, double b, double tol = 1e-12);

}  // namespace wavezar
