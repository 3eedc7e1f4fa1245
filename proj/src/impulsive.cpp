#include "pcap/impulsive.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace pcap {
namespace {

using PieceField = std::function<void(std::int64_t n, double t,
                                      std::span<const double> y,
                                      std::span<double> dy)>;
using JumpMap = std::function<void(std::int64_t n, std::span<double> y)>;

IndexRange hull_with_zero(IndexRange w) {
  return {std::min<std::int64_t>(w.lo, 0), std::max<std::int64_t>(w.hi, 0)};
}

std::string at_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

class Rk4 {
 public:
  explicit Rk4(std::size_t d)
      : k1_(d), k2_(d), k3_(d), k4_(d), tmp_(d) {}

  void step(const PieceField& f, std::int64_t n, double t, double h,
            std::vector<double>& y) {
    const std::size_t d = y.size();
    f(n, t, y, k1_);
    for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
    f(n, t + 0.5 * h, tmp_, k2_);
    for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
    f(n, t + 0.5 * h, tmp_, k3_);
    for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + h * k3_[i];
    f(n, t + h, tmp_, k4_);
    for (std::size_t i = 0; i < d; ++i) {
      y[i] += h / 6.0 * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
    }
  }

 private:
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

// Integrates piece by piece; `jump` may be empty (continuous states).
Trajectory integrate_piecewise(int d, const WexlerSeq& tau, const PieceField& f,
                               const JumpMap& jump, std::span<const double> y0,
                               double t0, double t_end, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidInput("integration step must be positive");
  }
  if (!(t0 < t_end)) throw InvalidInput("need t0 < t_end");
  if (static_cast<int>(y0.size()) != d) {
    throw InvalidInput("initial state has dimension " + std::to_string(y0.size()) +
                       ", expected " + std::to_string(d));
  }

  Trajectory traj;
  traj.d = d;
  std::int64_t n = tau.piece_index(t0);
  bool start_at_jump = false;
  if (tau.tau(n + 1) == t0) {
    ++n;
    start_at_jump = true;
  }
  std::vector<double> y(y0.begin(), y0.end());
  traj.samples.push_back({t0, start_at_jump ? Side::kRight : Side::kLeft, n, y});

  Rk4 rk(static_cast<std::size_t>(d));
  auto guarded = [&](std::int64_t piece, double t, std::span<const double> yy,
                     std::span<double> dy) {
    try {
      f(piece, t, yy, dy);
    } catch (const std::exception& e) {
      throw EvaluationError("right-hand side failed at t = " + at_time(t) + ": " +
                            e.what());
    }
  };
  const PieceField field = guarded;

  double t = t0;
  for (;;) {
    const double next_jump = tau.tau(n + 1);
    const double stop = std::min(next_jump, t_end);
    const double span = stop - t;
    const auto count = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(span / step - 1e-9)));
    const double h = span / static_cast<double>(count);
    for (std::int64_t k = 1; k <= count; ++k) {
      const double ts = t + static_cast<double>(k - 1) * h;
      rk.step(field, n, ts, k == count ? stop - ts : h, y);
      const double tk = k == count ? stop : t + static_cast<double>(k) * h;
      for (double v : y) {
        if (!std::isfinite(v)) {
          throw EvaluationError("non-finite state at t = " + at_time(tk));
        }
      }
      traj.samples.push_back({tk, Side::kLeft, n, y});
    }
    t = stop;
    if (stop >= t_end) break;

    // Left value at tau_{n+1} is recorded; apply the jump for the right limit.
    ++n;
    traj.jumps.push_back({n, next_jump, traj.samples.size() - 1});
    if (jump) jump(n, y);
    traj.samples.push_back({next_jump, Side::kRight, n, y});
  }
  return traj;
}

}  // namespace

// ---------------------------------------------------------------------------
// System and psi

ImpulsiveSystem::ImpulsiveSystem(std::vector<VectorField> g, std::vector<Sequence> b,
                                 WexlerSeq tau)
    : g_(std::move(g)), b_(std::move(b)), tau_(std::move(tau)) {
  if (g_.empty()) throw InvalidInput("impulsive system needs d >= 1");
  if (g_.size() != b_.size()) {
    throw InvalidInput("need one jump coefficient per component");
  }
  for (const auto& gi : g_) {
    if (!gi) throw InvalidInput("empty right-hand side");
  }
}

SolutionWindow build_u(const Sequence& b, IndexRange window) {
  const IndexRange hull = hull_with_zero(window);
  Table<double> one_plus_b{hull.lo, {}};
  double sup_b = 0.0;
  for (std::int64_t n = hull.lo; n <= hull.hi; ++n) {
    const double bn = b(n);
    sup_b = std::max(sup_b, std::abs(bn));
    one_plus_b.values.push_back(1.0 + bn);
  }
  const double tol = kJumpTolerance * (1.0 + sup_b);
  // Only 1 + b(k) for k in (hull.lo, hull.hi] enter the products.
  for (std::int64_t n = hull.lo + 1; n <= hull.hi; ++n) {
    if (!(std::abs(one_plus_b.at(n)) > tol)) {
      throw DegenerateJump("degenerate jump |1 + b(" + std::to_string(n) + ")| = 0", n);
    }
  }
  const CoeffSeq a(std::move(one_plus_b));
  return solve_ivp(a, 0, 1.0, hull);
}

PcapFunction build_psi(const Sequence& b, const WexlerSeq& tau, IndexRange window) {
  return synthesize(TrigPoly(1.0), Sequence(build_u(b, window).values), tau);
}

bool A2Report::pass() const {
  return !components.empty() &&
         std::all_of(components.begin(), components.end(),
                     [](const A2Component& c) { return c.pass; });
}

A2Report check_a2(const ImpulsiveSystem& sys, IndexRange window,
                  const A2Options& options) {
  A2Report report;
  report.window = hull_with_zero(window);
  for (int i = 0; i < sys.dimension(); ++i) {
    const Sequence& b = sys.b()[static_cast<std::size_t>(i)];
    A2Component c;
    c.inf_abs_1_plus_b = std::numeric_limits<double>::infinity();
    double sup_b = 0.0;
    for (std::int64_t n = report.window.lo + 1; n <= report.window.hi; ++n) {
      c.inf_abs_1_plus_b = std::min(c.inf_abs_1_plus_b, std::abs(1.0 + b(n)));
      sup_b = std::max(sup_b, std::abs(b(n)));
    }
    const double tol = kJumpTolerance * (1.0 + sup_b);
    try {
      c.u = build_u(b, report.window);
      c.conditioning = c.u.conditioning();
      const auto size = c.u.values.values.size();
      const auto half = static_cast<std::int64_t>(size / 2);
      c.scan = scan_table_almost_periods(c.u.values, options.scan_epsilon, {-half, half});
      if (!std::isfinite(c.conditioning) || !(c.u.inf_abs > tol)) {
        c.failure = "u_" + std::to_string(i + 1) + " is not bounded away from zero";
      } else if (c.conditioning > options.conditioning_bound) {
        c.failure = "u_" + std::to_string(i + 1) + " conditioning exceeds bound";
      }
    } catch (const DegenerateJump& e) {
      c.conditioning = std::numeric_limits<double>::infinity();
      c.failure = e.what();
    }
    c.pass = c.failure.empty() && c.inf_abs_1_plus_b > tol;
    report.components.push_back(std::move(c));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Integration

Trajectory integrate_impulsive(const ImpulsiveSystem& sys,
                               std::span<const double> y0, double t0,
                               double t_end, double step) {
  const PieceField field = [&sys](std::int64_t, double t, std::span<const double> y,
                                  std::span<double> dy) {
    for (std::size_t i = 0; i < dy.size(); ++i) dy[i] = sys.g()[i](y, t);
  };
  const JumpMap jump = [&sys](std::int64_t n, std::span<double> y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= 1.0 + sys.b()[i](n);
  };
  return integrate_piecewise(sys.dimension(), sys.tau(), field, jump, y0, t0,
                             t_end, step);
}

TransformedSystem::TransformedSystem(ImpulsiveSystem sys, std::vector<SolutionWindow> u)
    : sys_(std::move(sys)), u_(std::move(u)) {
  if (static_cast<int>(u_.size()) != sys_.dimension()) {
    throw InvalidInput("need one psi table per component");
  }
}

IndexRange TransformedSystem::window() const {
  IndexRange w = u_.front().window();
  for (const auto& ui : u_) {
    w.lo = std::max(w.lo, ui.window().lo);
    w.hi = std::min(w.hi, ui.window().hi);
  }
  return w;
}

double TransformedSystem::psi(int i, std::int64_t piece) const {
  return u_[static_cast<std::size_t>(i)](piece);
}

double TransformedSystem::psi_at(int i, double t) const {
  return psi(i, sys_.tau().piece_index(t));
}

void TransformedSystem::rhs(std::int64_t piece, double t, std::span<const double> z,
                            std::span<double> dz) const {
  const std::size_t d = z.size();
  std::vector<double> y(d);
  for (std::size_t i = 0; i < d; ++i) y[i] = psi(static_cast<int>(i), piece) * z[i];
  for (std::size_t i = 0; i < d; ++i) {
    dz[i] = sys_.g()[i](y, t) / psi(static_cast<int>(i), piece);
  }
}

TransformedSystem transform_system(const ImpulsiveSystem& sys, IndexRange window,
                                   const A2Options& options) {
  A2Report a2 = check_a2(sys, window, options);
  if (!a2.pass()) {
    std::string why;
    for (const auto& c : a2.components) {
      if (!c.pass) why += (why.empty() ? "" : "; ") + c.failure;
    }
    throw A2Failure("assumption (A2) fails: " + why);
  }
  std::vector<SolutionWindow> u;
  for (auto& c : a2.components) u.push_back(std::move(c.u));
  return TransformedSystem(sys, std::move(u));
}

Trajectory integrate_transformed(const TransformedSystem& sys,
                                 std::span<const double> z0, double t0,
                                 double t_end, double step) {
  const PieceField field = [&sys](std::int64_t n, double t, std::span<const double> z,
                                  std::span<double> dz) { sys.rhs(n, t, z, dz); };
  return integrate_piecewise(sys.dimension(), sys.original().tau(), field, {}, z0,
                             t0, t_end, step);
}

// ---------------------------------------------------------------------------
// Round trip

namespace {

// Uniform resampling of component i by linear interpolation; jump samples
// carry equal values on both sides for a continuous trajectory.
Table<double> resample(const Trajectory& z, std::size_t i, double dt) {
  Table<double> out{0, {}};
  const double t0 = z.samples.front().t;
  const double t1 = z.samples.back().t;
  std::size_t j = 0;
  for (std::int64_t k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    if (t > t1) break;
    while (j + 1 < z.samples.size() && z.samples[j + 1].t < t) ++j;
    const auto& a = z.samples[j];
    const auto& b = z.samples[std::min(j + 1, z.samples.size() - 1)];
    const double w = b.t > a.t ? (t - a.t) / (b.t - a.t) : 0.0;
    out.values.push_back(a.y[i] + std::clamp(w, 0.0, 1.0) * (b.y[i] - a.y[i]));
  }
  return out;
}

}  // namespace

RoundtripReport roundtrip_check(const ImpulsiveSystem& sys,
                                std::span<const double> y0, double t0,
                                double t_end, double step,
                                const RoundtripOptions& options) {
  RoundtripReport r;
  const WexlerSeq& tau = sys.tau();
  r.window = hull_with_zero({tau.piece_index(t0) - 1, tau.piece_index(t_end) + 1});
  const TransformedSystem ts = transform_system(sys, r.window, options.a2);

  r.phi = integrate_impulsive(sys, y0, t0, t_end, step);
  const std::int64_t first_piece = r.phi.samples.front().piece;
  const int d = sys.dimension();
  std::vector<double> z0(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    z0[static_cast<std::size_t>(i)] = y0[static_cast<std::size_t>(i)] / ts.psi(i, first_piece);
  }
  r.z = integrate_transformed(ts, z0, t0, t_end, step);
  if (r.z.samples.size() != r.phi.samples.size()) {
    throw Error("transformed and impulsive grids differ");
  }

  r.per_component.assign(static_cast<std::size_t>(d), 0.0);
  for (std::size_t k = 0; k < r.phi.samples.size(); ++k) {
    const auto& p = r.phi.samples[k];
    const auto& z = r.z.samples[k];
    for (int i = 0; i < d; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const double dev = std::abs(p.y[ii] - ts.psi(i, p.piece) * z.y[ii]);
      r.per_component[ii] = std::max(r.per_component[ii], dev);
    }
  }
  r.max_deviation = *std::max_element(r.per_component.begin(), r.per_component.end());

  for (const auto& jump : r.phi.jumps) {
    const auto& left = r.phi.samples[jump.left_index];
    const auto& right = r.phi.samples[jump.left_index + 1];
    for (int i = 0; i < d; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      if (left.y[ii] == 0.0) r.phi_nonzero_at_jumps = false;
      const double ql = left.y[ii] / ts.psi(i, left.piece);
      const double qr = right.y[ii] / ts.psi(i, right.piece);
      r.quotient_jump = std::max(r.quotient_jump, std::abs(qr - ql));
    }
  }

  for (int i = 0; i < d; ++i) {
    const Table<double> zt = resample(r.z, static_cast<std::size_t>(i), options.z_sample_dt);
    const auto half = static_cast<std::int64_t>(zt.values.size() / 2);
    AlmostPeriodReport s = scan_table_almost_periods(zt, options.z_epsilon, {0, half});
    const double dt = options.z_sample_dt;
    for (double& p : s.periods) p *= dt;
    s.scan_window = {s.scan_window.lo * dt, s.scan_window.hi * dt};
    s.translation_step = dt;
    s.sample_window = {t0, t0 + static_cast<double>(zt.values.size() - 1) * dt};
    s.sample_step = dt;
    s.max_gap *= dt;
    r.z_scans.push_back(std::move(s));
  }
  return r;
}

}  // namespace pcap
