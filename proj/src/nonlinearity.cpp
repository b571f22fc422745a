#include "wavezar/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wavezar {

NonlinearitySpec power_law(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("nonlinearity: growth exponent p must be >= 1");
  NonlinearitySpec spec;
  spec.name = "power";
  spec.p = p;
  spec.f = [p](double s) { return s * std::pow(std::abs(s), p - 1.0); };
  spec.df = [p](double s) { return p * std::pow(std::abs(s), p - 1.0); };
  spec.d2f = [p](double s) {
    if (p == 1.0) return 0.0;
    if (s == 0.0) return p < 2.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return p * (p - 1.0) * std::pow(std::abs(s), p - 2.0) * (s > 0.0 ? 1.0 : -1.0);
  };
  spec.primitive = [p](double s) { return std::pow(std::abs(s), p + 1.0) / (p + 1.0); };
  spec.k0 = std::max(p, p * (p - 1.0));
  return spec;
}

NonlinearitySpec cubic() {
  NonlinearitySpec spec;
  spec.name = "cubic";
  spec.p = 3.0;
  spec.k0 = 6.0;
  spec.f = [](double s) { return s * s * s; };
  spec.df = [](double s) { return 3.0 * s * s; };
  spec.d2f = [](double s) { return 6.0 * s; };
  spec.primitive = [](double s) { return 0.25 * s * s * s * s; };
  return spec;
}

NonlinearitySpec linear() {
  NonlinearitySpec spec;
  spec.name = "linear";
  spec.p = 1.0;
  spec.k0 = 1.0;
  spec.f = [](double s) { return s; };
  spec.df = [](double) { return 1.0; };
  spec.d2f = [](double) { return 0.0; };
  spec.primitive = [](double s) { return 0.5 * s * s; };
  return spec;
}

NonlinearitySpec zero_nonlinearity() {
  NonlinearitySpec spec;
  spec.name = "zero";
  spec.p = 1.0;
  spec.k0 = 1.0;
  spec.f = [](double) { return 0.0; };
  spec.df = [](double) { return 0.0; };
  spec.d2f = [](double) { return 0.0; };
  spec.primitive = [](double) { return 0.0; };
  return spec;
}

NonlinearitySpec nonlinearity_by_name(const std::string& name, double p) {
  if (name == "power") return power_law(p);
  if (name == "cubic") return cubic();
  if (name == "linear") return linear();
  if (name == "zero") return zero_nonlinearity();
  throw std::invalid_argument("nonlinearity: unknown name '" + name + "' (expected power, cubic, linear or zero)");
}

std::vector<double> ProbeGrid::samples() const {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
  return out;
}

bool AdmissibilityReport::admissible() const {
  const bool range = mode == AdmissibilityMode::Existence ? existence_range : (existence_range && uniqueness_range);
  return vanishes_at_zero && sign_condition && growth_first && growth_second && range;
}

std::vector<std::string> AdmissibilityReport::failures() const {
  std::vector<std::string> out;
  auto witness = [](const std::optional<double>& s) {
    std::ostringstream os;
    if (s) os << " (witness s = " << *s << ")";
    return os.str();
  };
  if (!vanishes_at_zero) out.push_back("f(0) != 0");
  if (!sign_condition) out.push_back("sign condition f(s) s >= 0 violated" + witness(sign_witness));
  if (!growth_first) out.push_back("growth bound on f' violated" + witness(growth_first_witness));
  if (!growth_second) out.push_back("growth bound on f'' violated" + witness(growth_second_witness));
  const double n = dimension;
  if (!existence_range) {
    std::ostringstream os;
    os << "p outside the existence range 1 <= p <= (n+2)/(n-2) = " << (n + 2) / (n - 2) << " for n = " << dimension;
    out.push_back(os.str());
  }
  if (mode == AdmissibilityMode::Uniqueness && !uniqueness_range) {
    std::ostringstream os;
    os << "p outside the uniqueness/decay range 1 <= p < n/(n-2) = " << n / (n - 2) << " for n = " << dimension;
    out.push_back(os.str());
  }
  return out;
}

AdmissibilityReport validate(const NonlinearitySpec& spec, int dimension, AdmissibilityMode mode,
                             const ProbeGrid& grid) {
  AdmissibilityReport r;
  r.dimension = dimension;
  r.mode = mode;
  r.vanishes_at_zero = spec.f(0.0) == 0.0;
  const double p = spec.p;
  for (double s : grid.samples()) {
    const double fs = spec.f(s);
    if (r.sign_condition && !(fs * s >= 0.0)) {
      r.sign_condition = false;
      r.sign_witness = s;
    }
    const double base = 1.0 + std::abs(s);
    const double slack = 1e-12;
    if (r.growth_first && !(std::abs(spec.df(s)) <= spec.k0 * std::pow(base, p - 1.0) * (1.0 + slack))) {
      r.growth_first = false;
      r.growth_first_witness = s;
    }
    if (r.growth_second && !(std::abs(spec.d2f(s)) <= spec.k0 * std::pow(base, p - 2.0) * (1.0 + slack))) {
      r.growth_second = false;
      r.growth_second_witness = s;
    }
  }
  if (p < 1.0) {
    r.existence_range = false;
    r.uniqueness_range = false;
  } else if (dimension >= 3) {
    const double n = dimension;
    r.existence_range = p <= (n + 2.0) / (n - 2.0);
    r.uniqueness_range = p < n / (n - 2.0);
  }
  return r;
}

double adaptive_simpson(const RealFunction& g, double a, double b, double tol) {
  struct Rec {
    const RealFunction& g;
    double step(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m);
      const double rm = 0.5 * (m + b);
      const double flm = g(lm);
      const double frm = g(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
      return step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  if (a == b) return 0.0;
  const double fa = g(a);
  const double fb = g(b);
  const double fm = g(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Rec{g}.step(a, b, fa, fm, fb, whole, tol, 50);
}

TruncatedNonlinearity::TruncatedNonlinearity(NonlinearitySpec base, std::optional<int> level)
    : base_(std::move(base)), level_(level) {
  if (level_) {
    if (*level_ < 1) throw std::invalid_argument("truncate: level k must be >= 1, got " + std::to_string(*level_));
    k_ = *level_;
    f_plus_ = base_.f(k_);
    f_minus_ = base_.f(-k_);
    F_plus_ = base_primitive(k_);
    F_minus_ = base_primitive(-k_);
    lipschitz_ = lipschitz_constant(base_, *level_);
  } else {
    lipschitz_ = (base_.p == 1.0) ? std::abs(base_.df(0.0)) * 1.001 : std::numeric_limits<double>::infinity();
  }
}

double TruncatedNonlinearity::base_primitive(double s) const {
  if (base_.primitive) return (*base_.primitive)(s);
  return adaptive_simpson(base_.f, 0.0, s, 1e-12);
}

double TruncatedNonlinearity::value(double s) const {
  if (!level_ || std::abs(s) <= k_) return base_.f(s);
  return s > k_ ? f_plus_ : f_minus_;
}

double TruncatedNonlinearity::derivative(double s) const {
  if (!level_ || std::abs(s) <= k_) return base_.df(s);
  return 0.0;
}

double TruncatedNonlinearity::primitive(double s) const {
  if (!level_ || std::abs(s) <= k_) return base_primitive(s);
  if (s > k_) return F_plus_ + f_plus_ * (s - k_);
  return f_minus_ * (s + k_) + F_minus_;
}

TruncatedNonlinearity truncate(const NonlinearitySpec& spec, int k) { return TruncatedNonlinearity(spec, k); }

TruncatedNonlinearity untruncated(const NonlinearitySpec& spec) { return TruncatedNonlinearity(spec, std::nullopt); }

double lipschitz_constant(const NonlinearitySpec& spec, int k) {
  if (k < 1) throw std::invalid_argument("lipschitz_constant: level k must be >= 1");
  if (!spec.df) throw std::invalid_argument("lipschitz_constant: f' is not available");
  const long points = 10L * k * 100L + 1L;
  double best = 0.0;
  for (long i = 0; i < points; ++i) {
    const double s = -k + 2.0 * k * static_cast<double>(i) / static_cast<double>(points - 1);
    const double d = std::abs(spec.df(s));
    if (!std::isfinite(d)) throw std::invalid_argument("lipschitz_constant: f' is not finite on [-k, k]");
    best = std::max(best, d);
  }
  return 1.001 * best;
}

double lipschitz_constant(const TruncatedNonlinearity& tn) { return tn.lipschitz(); }

GrowthBoundReport check_Fk_growth(const NonlinearitySpec& spec, const std::vector<int>& levels,
                                  const ProbeGrid& grid) {
  GrowthBoundReport report;
  report.levels = levels;
  const auto samples = grid.samples();
  for (int k : levels) {
    const auto tn = truncate(spec, k);
    double c = 0.0;
    for (double s : samples) {
      const double denom = s * s + std::pow(std::abs(s), spec.p + 1.0);
      if (denom == 0.0) continue;
      c = std::max(c, std::abs(tn.primitive(s)) / denom);
    }
    report.constants.push_back(c);
  }
  report.c = report.constants.empty() ? 0.0 : *std::max_element(report.constants.begin(), report.constants.end());
  report.finite = std::isfinite(report.c);
  // Smallest tail of levels whose constants agree within 5% of the tail max.
  std::size_t first = report.constants.size();
  double tail_max = 0.0;
  for (std::size_t i = report.constants.size(); i-- > 0;) {
    const double top = std::max(tail_max, report.constants[i]);
    bool agree = true;
    for (std::size_t j = i; j < report.constants.size(); ++j)
      if (report.constants[j] < 0.95 * top) agree = false;
    if (!agree) break;
    tail_max = top;
    first = i;
  }
  if (first < report.levels.size()) report.settled_from = report.levels[first];
  const std::size_t tail = report.constants.size() - first;
  report.uniform_in_k = report.finite && (tail >= 2 || report.constants.size() <= 1);
  return report;
}

}  // namespace wavezar
