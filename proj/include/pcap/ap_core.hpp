#pragma once

// Bohr almost periodic functions and sequences represented as finite
// trigonometric polynomials, Wexler jump-time sequences, and windowed scans
// for epsilon-almost periods.
//
// Every "for all t" statement is checked on an explicit finite grid, so each
// report carries the grids it was computed on.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pcap/errors.hpp"

namespace pcap {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Closed real interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Closed integer range [lo, hi].
struct IndexRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  std::int64_t size() const { return hi >= lo ? hi - lo + 1 : 0; }
  bool contains(std::int64_t n) const { return lo <= n && n <= hi; }
  bool operator==(const IndexRange&) const = default;
};

/// Values on a contiguous integer window, first index `first`.
template <class T>
struct Table {
  std::int64_t first = 0;
  std::vector<T> values;

  IndexRange window() const {
    return {first, first + static_cast<std::int64_t>(values.size()) - 1};
  }
  bool contains(std::int64_t n) const {
    return n >= first && n < first + static_cast<std::int64_t>(values.size());
  }
  const T& at(std::int64_t n) const {
    if (!contains(n)) {
      throw OutOfWindow("table index " + std::to_string(n) + " outside [" +
                        std::to_string(window().lo) + ", " +
                        std::to_string(window().hi) + "]");
    }
    return values[static_cast<std::size_t>(n - first)];
  }
};

/// One term amp * cos(freq * t + phase).
struct TrigTerm {
  double amp = 0.0;
  double freq = 0.0;
  double phase = 0.0;

  bool operator==(const TrigTerm&) const = default;
};

/// Real trigonometric polynomial on the reals:
///   f(t) = mean + sum_k amp_k cos(freq_k t + phase_k).
///
/// Canonical form after construction: frequencies strictly positive, distinct
/// and increasing; phases in [0, 2*pi); amplitudes positive. Zero frequencies
/// fold into the mean, duplicate frequencies merge by phasor addition.
class TrigPoly {
 public:
  TrigPoly() = default;
  explicit TrigPoly(double mean, std::vector<TrigTerm> terms = {});

  double operator()(double t) const;

  double mean() const { return mean_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  /// |mean| + sum |amp_k|, an upper bound of the sup norm.
  double norm_bound() const;

  bool operator==(const TrigPoly&) const = default;

 private:
  double mean_ = 0.0;
  std::vector<TrigTerm> terms_;
};

/// Trigonometric polynomial restricted to the integers. Frequencies are
/// reduced modulo 2*pi into [0, 2*pi) since only those affect values on Z.
class TrigSeq {
 public:
  TrigSeq() = default;
  explicit TrigSeq(double mean, std::vector<TrigTerm> terms = {});

  double operator()(std::int64_t n) const;

  double mean() const { return mean_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  double norm_bound() const;

  bool operator==(const TrigSeq&) const = default;

 private:
  double mean_ = 0.0;
  std::vector<TrigTerm> terms_;
};

/// A real sequence on Z: a trigonometric polynomial, a finite table, or an
/// arbitrary callable. Tables throw OutOfWindow outside their window.
class Sequence {
 public:
  using Function = std::function<double(std::int64_t)>;

  Sequence(TrigSeq s);          // NOLINT(google-explicit-constructor)
  Sequence(Table<double> t);    // NOLINT(google-explicit-constructor)
  Sequence(Function fn);        // NOLINT(google-explicit-constructor)

  double operator()(std::int64_t n) const;

  /// Non-null when the sequence is a trigonometric polynomial.
  const TrigSeq* trig() const { return std::get_if<TrigSeq>(&source_); }
  const Table<double>* table() const {
    return std::get_if<Table<double>>(&source_);
  }
  /// Finite domain for tables, nullopt when defined on all of Z.
  std::optional<IndexRange> domain() const;

 private:
  std::variant<TrigSeq, Table<double>, Function> source_;
};

/// Jump times tau_j = j * theta + c(j), with 2 * |c|_bound < theta so that
/// consecutive gaps stay at least theta - 2 |c| > 0.
class WexlerSeq {
 public:
  WexlerSeq(double theta, TrigSeq perturbation = TrigSeq{});

  double theta() const { return theta_; }
  const TrigSeq& perturbation() const { return c_; }

  double tau(std::int64_t j) const;
  /// tau_{j+k} - tau_j = k theta + c(j+k) - c(j).
  double diff(std::int64_t j, std::int64_t k) const;
  /// Guaranteed lower bound on tau_{j+1} - tau_j.
  double min_gap() const;
  /// Piece index n with tau_n < t <= tau_{n+1}.
  std::int64_t piece_index(double t) const;
  /// Smallest distance from t to any jump time.
  double distance_to_jump(double t) const;

 private:
  double theta_;
  TrigSeq c_;
};

/// Windowed approximation of the epsilon-almost periodic set T(f, eps).
struct AlmostPeriodReport {
  double epsilon = 0.0;
  std::vector<double> periods;  // sorted ascending
  Interval scan_window;
  double translation_step = 0.0;
  Interval sample_window;
  double sample_step = 0.0;
  /// Largest gap between consecutive periods, window edges included.
  double max_gap = 0.0;

  bool contains(double r, double tol = 1e-9) const;
  std::size_t count() const { return periods.size(); }
};

/// Largest gap between consecutive sorted points of `points` in `window`,
/// counting the distances to both window edges. Empty input gives the
/// window length.
double max_gap(std::span<const double> points, Interval window);

/// Translation grid {k * step} inside `window` (anchored at zero so that 0
/// is on the grid whenever the window contains it).
std::vector<double> translation_grid(Interval window, double step);
/// Sample grid {lo + i * step} inside `window`.
std::vector<double> sample_grid(Interval window, double step);

/// sup over the sample grid of |f(t + r) - f(t)|.
double translation_defect(const TrigPoly& f, double r, Interval samples,
                          double sample_step);
double translation_defect(const TrigSeq& f, std::int64_t p, IndexRange samples,
                          std::int64_t sample_step = 1);

/// All grid translations r with sup_t |f(t + r) - f(t)| < eps over the
/// sampled t.
AlmostPeriodReport scan_almost_periods(const TrigPoly& f, double eps,
                                       Interval translations,
                                       double translation_step,
                                       Interval samples, double sample_step);

/// Integer variant; translations are multiples of `translation_step`.
AlmostPeriodReport scan_almost_periods(const Sequence& f, double eps,
                                       IndexRange translations,
                                       IndexRange samples,
                                       std::int64_t translation_step = 1,
                                       std::int64_t sample_step = 1);

/// Table-backed scan: translation p is tested on every n with n and n + p
/// both in the table. The translation window is clipped to
/// |p| < table size so that every tested p has at least one comparison.
AlmostPeriodReport scan_table_almost_periods(const Table<double>& table,
                                             double eps,
                                             IndexRange translations);

/// Common almost periods p of the difference family tau_j^k:
/// |tau_{j+p}^k - tau_j^k| < eps for all j, k in `jk_window`.
AlmostPeriodReport verify_equipotential(const WexlerSeq& w, double eps,
                                        IndexRange p_window,
                                        IndexRange jk_window);

/// Default real grid step 0.01 * min(1, theta).
double default_grid_step(const WexlerSeq& w);

}  // namespace pcap
