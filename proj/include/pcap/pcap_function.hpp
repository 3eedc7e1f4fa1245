#pragma once

// Piecewise continuous almost periodic functions: left-continuous functions
// with jumps on a Wexler sequence. Synthesis h(t) = f(t) u(n) on
// (tau_n, tau_{n+1}], recovery of (f, u) from jump ratios, and windowed
// verification of the three defining conditions.

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "pcap/ap_core.hpp"
#include "pcap/difference_eq.hpp"

namespace pcap {

/// h(t) = f(t) u(n) on (tau_n, tau_{n+1}].
struct Factored {
  TrigPoly f;
  Sequence u;
};

/// h(t) = piece(n, t) on (tau_n, tau_{n+1}] for n in `pieces`. The piece
/// callable must also accept t = tau_n, where it gives the right limit.
struct Sampled {
  using Piece = std::function<double(std::int64_t n, double t)>;
  Piece piece;
  IndexRange pieces;
};

/// Dense samples of one piece: strictly increasing times spanning
/// [tau_n, tau_{n+1}] and the piece values there.
struct PieceSamples {
  std::vector<double> t;
  std::vector<double> h;
};

/// Sampled body interpolating piece tables linearly (exact at the samples).
Sampled sampled_from_tables(std::int64_t first_piece,
                            std::vector<PieceSamples> pieces);

class PcapFunction {
 public:
  using Body = std::variant<Factored, Sampled>;

  PcapFunction(WexlerSeq tau, Body body);

  /// h(t) using the piece n with tau_n < t <= tau_{n+1}.
  double operator()(double t) const;
  /// Piece n evaluated at t (no piece lookup).
  double piece_value(std::int64_t n, double t) const;
  /// lim_{t -> tau_n+} h(t).
  double right_limit(std::int64_t n) const;
  /// h(tau_n), i.e. piece n-1 at tau_n.
  double left_value(std::int64_t n) const;

  const WexlerSeq& tau() const { return tau_; }
  const Body& body() const { return body_; }
  /// Piece indices with a defined body (nullopt: all of Z).
  std::optional<IndexRange> piece_window() const;

 private:
  WexlerSeq tau_;
  Body body_;
};

/// Factored p.c.a.p. function from a Bohr pair and a Wexler sequence.
PcapFunction synthesize(TrigPoly f, Sequence u, WexlerSeq tau);

/// a(n) = h(tau_n^+) / h(tau_n) on `window`. Both boundary values must
/// exceed 1e-9 * (window sup of the boundary values); otherwise throws
/// HypothesisViolation naming n.
CoeffSeq jump_ratios(const PcapFunction& h, IndexRange window);

struct FactorizeOptions {
  /// sup|v| / inf|v| above this flags the result as ill-conditioned.
  double conditioning_bound = 1e8;
  /// Verification points per piece (plus both piece endpoints).
  int samples_per_piece = 8;
};

/// Recovered pair: f continuous on the covered span, u = v on the window.
struct FactorizationResult {
  PcapFunction h;
  SolutionWindow v;
  std::int64_t n_ref = 0;
  double v_value = 1.0;
  double conditioning = 0.0;
  bool well_conditioned = true;
  /// max_n |f(tau_n^+) - f(tau_n)| / max |f| over interior jump times.
  double continuity_defect = 0.0;
  /// max |f(t) u(n) - h(t)| / max |h| on the verification grid.
  double reconstruction_error = 0.0;

  IndexRange window() const { return v.window(); }
  /// (tau_lo, tau_{hi+1}]
  Interval domain() const;
  /// f(t) = h(t) / v(n) on (tau_n, tau_{n+1}]; OutOfWindow outside domain().
  double f(double t) const;
  /// Right limit of f at tau_n (piece n at tau_n).
  double f_right(std::int64_t n) const;
  double u(std::int64_t n) const { return v(n); }
};

/// Recovers (f, u) with u = v, v solving x(n) = a(n) x(n-1) for the jump
/// ratios a, normalized v(n_ref) = 1.
FactorizationResult factorize(const PcapFunction& h, IndexRange window,
                              std::int64_t n_ref = 0,
                              const FactorizeOptions& options = {});

struct GaugeVerdict {
  bool matched = false;
  /// r2.f = c r1.f and r2.u = r1.u / c when matched.
  double c = 0.0;
  double spread_u = 0.0;
  double spread_f = 0.0;
};

/// Checks that two factorizations differ by a constant pair (c, 1/c).
GaugeVerdict uniqueness_gauge(const FactorizationResult& r1,
                              const FactorizationResult& r2,
                              double tolerance = 1e-9);

/// Windows and grids for verify_pcap.
struct VerifyWindows {
  IndexRange p_window{-100, 100};
  IndexRange jk_window{-10, 10};
  /// Pieces sampled for the uniform continuity modulus.
  IndexRange pieces{-10, 10};
  double piece_step = 0.01;
  Interval translations{0.0, 50.0};
  double translation_step = 0.01;
  Interval samples{-10.0, 10.0};
  /// Capped at eps / 10 for each tested eps.
  double sample_step = 0.01;
};

struct EpsilonVerdict {
  double epsilon = 0.0;
  AlmostPeriodReport equipotential;
  /// Largest delta with within-piece oscillation < eps at distance < delta
  /// (on the piece grid); +infinity when no pair ever reaches eps.
  double delta = 0.0;
  AlmostPeriodReport almost_periods;
};

struct PcapVerdict {
  VerifyWindows windows;
  std::vector<EpsilonVerdict> entries;
};

/// Sample points t of the grid with |t - tau_j| > eps for every j.
std::vector<double> admissible_samples(const WexlerSeq& tau, double eps,
                                       Interval samples, double sample_step);

/// Translations r with |h(t + r) - h(t)| < eps on every admissible sample.
AlmostPeriodReport scan_pcap_almost_periods(const PcapFunction& h, double eps,
                                            Interval translations,
                                            double translation_step,
                                            Interval samples,
                                            double sample_step);

/// Uniform continuity modulus delta(eps) measured on a piece grid.
double continuity_modulus(const PcapFunction& h, double eps,
                          IndexRange pieces, double step);

/// Windowed empirical check of the p.c.a.p. conditions for each eps.
PcapVerdict verify_pcap(const PcapFunction& h, const std::vector<double>& epsilons,
                        const VerifyWindows& windows = {});

struct BoundarySequence {
  Table<double> values;  // n -> h(tau_n)
  AlmostPeriodReport scan;
};

/// Left values at the jump times and an integer-translation scan of them.
/// Translations default to [-size/2, size/2].
BoundarySequence boundary_sequence(
    const PcapFunction& h, IndexRange window, double eps,
    std::optional<IndexRange> translations = std::nullopt);

}  // namespace pcap
