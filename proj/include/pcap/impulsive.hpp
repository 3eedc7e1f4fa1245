#pragma once

// Impulsive systems
//   y_i' = g_i(y, t),                     t != tau_n
//   y_i(tau_n^+) = (1 + b_i(n)) y_i(tau_n),
// the piecewise constant psi_i that absorbs the jumps, and the jump-free
// system z_i' = g_i(psi_1 z_1, ..., psi_d z_d, t) / psi_i(t).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pcap/ap_core.hpp"
#include "pcap/difference_eq.hpp"
#include "pcap/pcap_function.hpp"

namespace pcap {

using VectorField = std::function<double(std::span<const double> y, double t)>;

/// |1 + b_i(n)| <= kJumpTolerance * (1 + sup |b_i|) is a degenerate jump.
inline constexpr double kJumpTolerance = 1e-12;

class ImpulsiveSystem {
 public:
  ImpulsiveSystem(std::vector<VectorField> g, std::vector<Sequence> b,
                  WexlerSeq tau);

  int dimension() const { return static_cast<int>(g_.size()); }
  const std::vector<VectorField>& g() const { return g_; }
  const std::vector<Sequence>& b() const { return b_; }
  const WexlerSeq& tau() const { return tau_; }

 private:
  std::vector<VectorField> g_;
  std::vector<Sequence> b_;
  WexlerSeq tau_;
};

/// u(n) = prod_{k=1}^{n} (1 + b(k)) for n > 0, u(0) = 1,
/// prod_{k=n+1}^{0} 1 / (1 + b(k)) for n < 0. The table covers `window`
/// extended to contain 0. Throws DegenerateJump.
SolutionWindow build_u(const Sequence& b, IndexRange window);

/// psi(t) = u(n) on (tau_n, tau_{n+1}] as a factored function with f = 1.
PcapFunction build_psi(const Sequence& b, const WexlerSeq& tau, IndexRange window);

struct A2Options {
  double conditioning_bound = 1e12;
  /// Epsilon of the almost-period scan of each u_i table.
  double scan_epsilon = 0.1;
};

struct A2Component {
  double inf_abs_1_plus_b = 0.0;
  SolutionWindow u;
  double conditioning = 0.0;
  bool pass = false;
  AlmostPeriodReport scan;
  std::string failure;  // empty when pass
};

struct A2Report {
  IndexRange window;
  std::vector<A2Component> components;

  bool pass() const;
};

/// Windowed check of the jump assumption for every component.
A2Report check_a2(const ImpulsiveSystem& sys, IndexRange window,
                  const A2Options& options = {});

enum class Side { kLeft, kRight };

struct TrajectorySample {
  double t = 0.0;
  /// kRight only for right limits recorded at jump times.
  Side side = Side::kLeft;
  /// Piece whose closure holds the sample: n for (tau_n, tau_{n+1}], and
  /// n for the right limit at tau_n.
  std::int64_t piece = 0;
  std::vector<double> y;
};

struct JumpRecord {
  std::int64_t n = 0;
  double tau = 0.0;
  /// Sample index of the left value; the right limit follows it.
  std::size_t left_index = 0;
};

struct Trajectory {
  int d = 0;
  std::vector<TrajectorySample> samples;
  std::vector<JumpRecord> jumps;

  const std::vector<double>& final_state() const { return samples.back().y; }
};

/// Classical fourth-order Runge-Kutta on each interval between jump times,
/// with uniform sub-steps no longer than `step` that land exactly on every
/// tau_n. The state at tau_n is the pre-jump value; the jump is applied
/// algebraically for tau_n < t_end. A t0 that is a jump time is treated as
/// the right limit there.
Trajectory integrate_impulsive(const ImpulsiveSystem& sys,
                               std::span<const double> y0, double t0,
                               double t_end, double step);

/// Jump-free system in the psi-scaled variables.
class TransformedSystem {
 public:
  TransformedSystem(ImpulsiveSystem sys, std::vector<SolutionWindow> u);

  int dimension() const { return sys_.dimension(); }
  const ImpulsiveSystem& original() const { return sys_; }
  IndexRange window() const;
  /// psi_i on piece n.
  double psi(int i, std::int64_t piece) const;
  /// psi_i(t), left-continuous.
  double psi_at(int i, double t) const;
  /// dz/dt on piece n.
  void rhs(std::int64_t piece, double t, std::span<const double> z,
           std::span<double> dz) const;

  /// The field depends on t through psi and jumps at tau_n, while its
  /// solutions stay continuous there.
  bool field_piecewise_in_time() const { return true; }
  bool continuous_solution() const { return true; }

 private:
  ImpulsiveSystem sys_;
  std::vector<SolutionWindow> u_;
};

/// Builds the transformed system after check_a2 passes on `window`
/// (throws A2Failure otherwise).
TransformedSystem transform_system(const ImpulsiveSystem& sys, IndexRange window,
                                   const A2Options& options = {});

/// Integrates the transformed system on the same jump-aligned grid as
/// integrate_impulsive, without state jumps.
Trajectory integrate_transformed(const TransformedSystem& sys,
                                 std::span<const double> z0, double t0,
                                 double t_end, double step);

struct RoundtripOptions {
  A2Options a2;
  /// Uniform resampling step and epsilon of the almost-period scan of z.
  double z_sample_dt = 0.1;
  double z_epsilon = 0.05;
};

struct RoundtripReport {
  IndexRange window;
  /// max over samples and components of |phi_i - psi_i z_i|.
  double max_deviation = 0.0;
  std::vector<double> per_component;
  /// max over jumps of |q_i(tau_n^+) - q_i(tau_n)| with q_i = phi_i / psi_i.
  double quotient_jump = 0.0;
  /// phi_i(tau_n) != 0 at every recorded jump.
  bool phi_nonzero_at_jumps = true;
  std::vector<AlmostPeriodReport> z_scans;
  Trajectory phi;
  Trajectory z;
};

/// Integrates phi directly and z through the transformed system from
/// z0_i = y0_i / psi_i(t0), then compares phi with psi z.
RoundtripReport roundtrip_check(const ImpulsiveSystem& sys,
                                std::span<const double> y0, double t0,
                                double t_end, double step,
                                const RoundtripOptions& options = {});

}  // namespace pcap
