#pragma once

// The scalar homogeneous difference equation x(n) = a(n) x(n-1) on Z:
// Cauchy map, initial value problems, and the auxiliary modulus, sign and
// logarithmic equations. Statements about all of Z are checked on explicit
// integer windows.

#include <cstdint>
#include <optional>
#include <span>

#include "pcap/ap_core.hpp"

namespace pcap {

/// |a(n)| <= kZeroRelTolerance * sup_window |a| counts as a zero coefficient.
inline constexpr double kZeroRelTolerance = 1e-12;

/// Coefficient sequence a(n) with cached window statistics.
class CoeffSeq {
 public:
  /// Statistics are taken over `stats_window`; tables default to their own.
  CoeffSeq(Sequence source, IndexRange stats_window);
  explicit CoeffSeq(Table<double> table);

  /// Throws ZeroCoefficient when |a(n)| is below the zero tolerance.
  double operator()(std::int64_t n) const;

  const Sequence& source() const { return source_; }
  IndexRange stats_window() const { return window_; }
  /// inf over the stats window of |a(n)|.
  double theta_inf() const { return theta_; }
  /// sup over the stats window of |a(n)|.
  double norm_sup() const { return norm_; }
  double zero_tolerance() const { return kZeroRelTolerance * norm_; }

 private:
  Sequence source_;
  IndexRange window_;
  double theta_ = 0.0;
  double norm_ = 0.0;
};

/// Solution of x(n) = a(n) x(n-1), x(n0) = x0, tabulated on a window.
struct SolutionWindow {
  std::int64_t n0 = 0;
  double x0 = 0.0;
  Table<double> values;
  double sup_abs = 0.0;
  double inf_abs = 0.0;

  IndexRange window() const { return values.window(); }
  double operator()(std::int64_t n) const { return values.at(n); }
  /// sup |x| / inf |x| over the window (infinite for the trivial solution).
  double conditioning() const;
  bool trivial() const { return sup_abs == 0.0; }
};

/// V(n, m): prod_{k=m+1}^{n} a(k) for n > m, 1 for n = m, and
/// prod_{k=n+1}^{m} 1/a(k) for n < m.
///
/// Products are accumulated with a separately tracked binary exponent, so
/// intermediate partial products never overflow or underflow; only a final
/// value outside the double range does.
double cauchy_v(const CoeffSeq& a, std::int64_t n, std::int64_t m);

/// phi(n) = V(n, n0) x0 on `window` (which must contain n0).
SolutionWindow solve_ivp(const CoeffSeq& a, std::int64_t n0, double x0,
                         IndexRange window);

/// Builds a SolutionWindow around given values, filling the profile.
SolutionWindow make_solution_window(std::int64_t n0, double x0,
                                    Table<double> values);

/// max over adjacent pairs of |x(n) - a(n) x(n-1)| / max(|x(n)|, |a(n) x(n-1)|).
double recurrence_residual(const CoeffSeq& a, const SolutionWindow& v);

enum class NecessaryCondition {
  kPasses,            // theta < 1 < |a|
  kFails,             // an almost periodic solution is impossible
  kHypothesisNotMet,  // |a| is constant on the window: theta == |a|
};

struct NecessaryConditionReport {
  NecessaryCondition verdict = NecessaryCondition::kFails;
  double theta = 0.0;
  double norm = 0.0;

  bool passes() const { return verdict == NecessaryCondition::kPasses; }
};

/// Windowed check of theta < 1 < |a| for an equation admitting an almost
/// periodic solution, given 0 < theta < |a|.
NecessaryConditionReport necessary_condition_check(const CoeffSeq& a,
                                                   IndexRange window);

/// n -> sgn V(n, 0), the solution of x(n) = sgn(a(n)) x(n-1) with x(0) = 1.
Table<int> sign_solution(const CoeffSeq& a, IndexRange window);

struct SignPeriodicity {
  std::int64_t p = 0;       // smallest positive almost period of a found
  std::int64_t period = 0;  // 2 |p|
  bool verified = false;    // sign solution is 2|p|-periodic on the window
  AlmostPeriodReport scan;
};

/// Finds the smallest positive p in T(a, eps) (samples on `window`,
/// translations in [0, max_translation]) and checks that the sign solution
/// repeats with period 2p on `window`. Requires 0 < eps < 2 theta where
/// theta is inf |a| on `window`.
SignPeriodicity sign_periodicity_check(const CoeffSeq& a, double eps,
                                       IndexRange window,
                                       std::int64_t max_translation = 2000);

/// max over the window of |ln|v(n)| - ln|v(n-1)| - ln|a(n)||.
double log_transform_residual(const CoeffSeq& a, const SolutionWindow& v);

struct ApCriterionReport {
  double bounded_sup = 0.0;
  double inf_abs = 0.0;
  double almost_period_gap = 0.0;
  AlmostPeriodReport scan;
};

/// Windowed shadow of "a nontrivial solution is almost periodic iff it is
/// bounded with inf |u| > 0": reports sup |v|, inf |v| and the max gap of a
/// table scan of v. Translations default to [-size/2, size/2].
ApCriterionReport ap_solution_criterion(
    const CoeffSeq& a, const SolutionWindow& v, double eps,
    std::optional<IndexRange> translations = std::nullopt);

/// a(n) = s(n) exp(c(n) - c(n-1)), with s(n) = sgn(sign_driver(n)) (or 1).
/// The solution with v(0) = 1 is s-signed exp(c(n) - c(0)), bounded with
/// inf |v| >= exp(-2 |c|).
CoeffSeq telescoping_coefficients(const TrigSeq& potential,
                                  IndexRange stats_window,
                                  std::optional<TrigSeq> sign_driver = std::nullopt);

/// Constant ratio c with num = c * den pointwise; `spread` is
/// max_i |num_i / den_i - c| / |c|.
struct GaugeRatio {
  double c = 0.0;
  double spread = 0.0;
};
GaugeRatio constant_ratio(std::span<const double> num,
                          std::span<const double> den);

}  // namespace pcap
