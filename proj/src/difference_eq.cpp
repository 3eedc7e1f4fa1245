#include "pcap/difference_eq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pcap {
namespace {

void window_stats(const Sequence& s, IndexRange w, double& inf, double& sup) {
  inf = std::numeric_limits<double>::infinity();
  sup = 0.0;
  for (std::int64_t n = w.lo; n <= w.hi; ++n) {
    const double v = std::abs(s(n));
    inf = std::min(inf, v);
    sup = std::max(sup, v);
  }
}

// Running product mantissa * 2^exponent.
class ScaledProduct {
 public:
  void mul(double x) {
    mant_ *= x;
    renormalize();
  }
  void div(double x) {
    mant_ /= x;
    renormalize();
  }
  double value() const { return std::ldexp(mant_, static_cast<int>(exp_)); }

 private:
  void renormalize() {
    const double m = std::abs(mant_);
    if (m > 0x1p+500 || (m < 0x1p-500 && m != 0.0)) {
      int e = 0;
      mant_ = std::frexp(mant_, &e);
      exp_ += e;
    }
  }

  double mant_ = 1.0;
  long exp_ = 0;
};

int sgn(double x) { return x < 0.0 ? -1 : 1; }

}  // namespace

// ---------------------------------------------------------------------------
// CoeffSeq

CoeffSeq::CoeffSeq(Sequence source, IndexRange stats_window)
    : source_(std::move(source)), window_(stats_window) {
  if (window_.size() == 0) throw InvalidInput("empty coefficient window");
  window_stats(source_, window_, theta_, norm_);
}

CoeffSeq::CoeffSeq(Table<double> table)
    : CoeffSeq(Sequence(table), table.window()) {}

double CoeffSeq::operator()(std::int64_t n) const {
  const double v = source_(n);
  if (!(std::abs(v) > zero_tolerance())) {
    throw ZeroCoefficient("zero coefficient a(" + std::to_string(n) + ")", n);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Solutions

double SolutionWindow::conditioning() const {
  if (inf_abs == 0.0) return std::numeric_limits<double>::infinity();
  return sup_abs / inf_abs;
}

double cauchy_v(const CoeffSeq& a, std::int64_t n, std::int64_t m) {
  ScaledProduct p;
  if (n > m) {
    for (std::int64_t k = m + 1; k <= n; ++k) p.mul(a(k));
  } else if (n < m) {
    for (std::int64_t k = n + 1; k <= m; ++k) p.div(a(k));
  }
  return p.value();
}

SolutionWindow make_solution_window(std::int64_t n0, double x0,
                                    Table<double> values) {
  SolutionWindow s{n0, x0, std::move(values), 0.0, 0.0};
  s.inf_abs = std::numeric_limits<double>::infinity();
  for (double v : s.values.values) {
    s.sup_abs = std::max(s.sup_abs, std::abs(v));
    s.inf_abs = std::min(s.inf_abs, std::abs(v));
  }
  if (s.values.values.empty()) s.inf_abs = 0.0;
  return s;
}

SolutionWindow solve_ivp(const CoeffSeq& a, std::int64_t n0, double x0,
                         IndexRange window) {
  if (!window.contains(n0)) {
    throw InvalidInput("solution window must contain n0");
  }
  Table<double> t{window.lo, std::vector<double>(
                                 static_cast<std::size_t>(window.size()))};
  auto at = [&](std::int64_t n) -> double& {
    return t.values[static_cast<std::size_t>(n - window.lo)];
  };
  at(n0) = x0;
  for (std::int64_t n = n0 + 1; n <= window.hi; ++n) at(n) = a(n) * at(n - 1);
  for (std::int64_t n = n0 - 1; n >= window.lo; --n) at(n) = at(n + 1) / a(n + 1);
  return make_solution_window(n0, x0, std::move(t));
}

double recurrence_residual(const CoeffSeq& a, const SolutionWindow& v) {
  const IndexRange w = v.window();
  double worst = 0.0;
  for (std::int64_t n = w.lo + 1; n <= w.hi; ++n) {
    const double lhs = v(n);
    const double rhs = a(n) * v(n - 1);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Criteria

NecessaryConditionReport necessary_condition_check(const CoeffSeq& a,
                                                   IndexRange window) {
  if (window.size() == 0) throw InvalidInput("empty window");
  NecessaryConditionReport r;
  window_stats(a.source(), window, r.theta, r.norm);
  if (!(r.theta > 0.0)) {
    throw ZeroCoefficient("inf |a| vanishes on the window", window.lo);
  }
  if (r.norm - r.theta <= kZeroRelTolerance * r.norm) {
    r.verdict = NecessaryCondition::kHypothesisNotMet;
  } else if (r.theta < 1.0 && 1.0 < r.norm) {
    r.verdict = NecessaryCondition::kPasses;
  } else {
    r.verdict = NecessaryCondition::kFails;
  }
  return r;
}

Table<int> sign_solution(const CoeffSeq& a, IndexRange window) {
  if (window.size() == 0) throw InvalidInput("empty window");
  const std::int64_t lo = std::min<std::int64_t>(window.lo, 0);
  const std::int64_t hi = std::max<std::int64_t>(window.hi, 0);
  std::vector<int> s(static_cast<std::size_t>(hi - lo + 1));
  auto at = [&](std::int64_t n) -> int& {
    return s[static_cast<std::size_t>(n - lo)];
  };
  at(0) = 1;
  for (std::int64_t n = 1; n <= hi; ++n) at(n) = sgn(a(n)) * at(n - 1);
  for (std::int64_t n = -1; n >= lo; --n) at(n) = sgn(a(n + 1)) * at(n + 1);

  Table<int> out{window.lo, {}};
  out.values.reserve(static_cast<std::size_t>(window.size()));
  for (std::int64_t n = window.lo; n <= window.hi; ++n) out.values.push_back(at(n));
  return out;
}

SignPeriodicity sign_periodicity_check(const CoeffSeq& a, double eps,
                                       IndexRange window,
                                       std::int64_t max_translation) {
  if (window.size() == 0) throw InvalidInput("empty window");
  if (max_translation < 1) throw InvalidInput("max_translation must be >= 1");
  double theta = 0.0;
  double norm = 0.0;
  window_stats(a.source(), window, theta, norm);
  if (!(eps > 0.0 && eps < 2.0 * theta)) {
    throw InvalidInput("sign periodicity needs 0 < eps < 2 inf|a|");
  }

  SignPeriodicity r;
  r.scan = scan_almost_periods(a.source(), eps, {0, max_translation}, window);
  const auto it = std::find_if(r.scan.periods.begin(), r.scan.periods.end(),
                               [](double p) { return p > 0.0; });
  if (it == r.scan.periods.end()) {
    throw NoAlmostPeriod("no nonzero almost period of a in [1, " +
                         std::to_string(max_translation) + "]");
  }
  r.p = static_cast<std::int64_t>(*it);
  r.period = 2 * r.p;

  const Table<int> signs = sign_solution(a, {window.lo, window.hi + r.period});
  r.verified = true;
  for (std::int64_t n = window.lo; n <= window.hi && r.verified; ++n) {
    r.verified = signs.at(n + r.period) == signs.at(n);
  }
  return r;
}

double log_transform_residual(const CoeffSeq& a, const SolutionWindow& v) {
  const IndexRange w = v.window();
  for (std::int64_t n = w.lo; n <= w.hi; ++n) {
    if (v(n) == 0.0) {
      throw DomainError("log transform of a zero value at n = " +
                        std::to_string(n));
    }
  }
  double worst = 0.0;
  for (std::int64_t n = w.lo + 1; n <= w.hi; ++n) {
    const double r = std::log(std::abs(v(n))) - std::log(std::abs(v(n - 1))) -
                     std::log(std::abs(a(n)));
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

ApCriterionReport ap_solution_criterion(const CoeffSeq& a,
                                        const SolutionWindow& v, double eps,
                                        std::optional<IndexRange> translations) {
  if (!(a.theta_inf() > 0.0)) {
    throw ZeroCoefficient("inf |a| vanishes on the stats window",
                          a.stats_window().lo);
  }
  if (v.trivial() || recurrence_residual(a, v) > 1e-9) {
    throw InvalidInput("v is not a nontrivial solution of x(n) = a(n) x(n-1)");
  }
  const auto size = static_cast<std::int64_t>(v.values.values.size());
  const IndexRange tw = translations.value_or(IndexRange{-size / 2, size / 2});
  ApCriterionReport r;
  r.bounded_sup = v.sup_abs;
  r.inf_abs = v.inf_abs;
  r.scan = scan_table_almost_periods(v.values, eps, tw);
  r.almost_period_gap = r.scan.max_gap;
  return r;
}

CoeffSeq telescoping_coefficients(const TrigSeq& potential,
                                  IndexRange stats_window,
                                  std::optional<TrigSeq> sign_driver) {
  Sequence::Function fn = [c = potential, s = std::move(sign_driver)](
                              std::int64_t n) {
    const double m = std::exp(c(n) - c(n - 1));
    return (s && (*s)(n) < 0.0) ? -m : m;
  };
  return CoeffSeq(Sequence(std::move(fn)), stats_window);
}

GaugeRatio constant_ratio(std::span<const double> num,
                          std::span<const double> den) {
  if (num.size() != den.size() || num.empty()) {
    throw InvalidInput("ratio inputs must be nonempty and equally sized");
  }
  std::vector<double> r(num.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    if (den[i] == 0.0) throw DomainError("ratio with zero denominator");
    r[i] = num[i] / den[i];
    sum += r[i];
  }
  GaugeRatio g;
  g.c = sum / static_cast<double>(r.size());
  for (double x : r) g.spread = std::max(g.spread, std::abs(x - g.c));
  g.spread = g.c == 0.0 ? std::numeric_limits<double>::infinity()
                        : g.spread / std::abs(g.c);
  return g;
}

}  // namespace pcap
