#include "pcap/pcap_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

namespace pcap {

// ---------------------------------------------------------------------------
// Representation

Sampled sampled_from_tables(std::int64_t first_piece,
                            std::vector<PieceSamples> pieces) {
  if (pieces.empty()) throw InvalidInput("no pieces");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    if (p.t.size() != p.h.size() || p.t.size() < 2) {
      throw InvalidInput("piece " + std::to_string(first_piece + static_cast<std::int64_t>(i)) +
                         " needs at least two (t, h) samples");
    }
    if (!std::is_sorted(p.t.begin(), p.t.end(),
                        [](double a, double b) { return a <= b; })) {
      throw InvalidInput("piece " + std::to_string(first_piece + static_cast<std::int64_t>(i)) +
                         " sample times must be strictly increasing");
    }
  }
  auto shared = std::make_shared<const std::vector<PieceSamples>>(std::move(pieces));
  const IndexRange window{first_piece,
                          first_piece + static_cast<std::int64_t>(shared->size()) - 1};
  Sampled::Piece piece = [shared, first_piece](std::int64_t n, double t) {
    const auto idx = n - first_piece;
    if (idx < 0 || idx >= static_cast<std::int64_t>(shared->size())) {
      throw OutOfWindow("piece " + std::to_string(n) + " not sampled");
    }
    const auto& p = (*shared)[static_cast<std::size_t>(idx)];
    const double slack = 1e-12 * std::max(1.0, std::abs(t));
    if (t < p.t.front() - slack || t > p.t.back() + slack) {
      throw OutOfWindow("time outside the samples of piece " + std::to_string(n));
    }
    auto it = std::lower_bound(p.t.begin(), p.t.end(), t);
    if (it == p.t.end()) return p.h.back();
    const auto j = static_cast<std::size_t>(it - p.t.begin());
    if (*it == t || j == 0) return p.h[j];
    const double w = (t - p.t[j - 1]) / (p.t[j] - p.t[j - 1]);
    return p.h[j - 1] + w * (p.h[j] - p.h[j - 1]);
  };
  return Sampled{std::move(piece), window};
}

PcapFunction::PcapFunction(WexlerSeq tau, Body body)
    : tau_(std::move(tau)), body_(std::move(body)) {
  if (const auto* s = std::get_if<Sampled>(&body_)) {
    if (!s->piece) throw InvalidInput("sampled body without piece callable");
    if (s->pieces.size() == 0) throw InvalidInput("sampled body without pieces");
  }
}

double PcapFunction::piece_value(std::int64_t n, double t) const {
  if (const auto* f = std::get_if<Factored>(&body_)) {
    return f->f(t) * f->u(n);
  }
  const auto& s = std::get<Sampled>(body_);
  if (!s.pieces.contains(n)) {
    throw OutOfWindow("piece " + std::to_string(n) + " outside the sampled window");
  }
  return s.piece(n, t);
}

double PcapFunction::operator()(double t) const {
  return piece_value(tau_.piece_index(t), t);
}

double PcapFunction::right_limit(std::int64_t n) const {
  return piece_value(n, tau_.tau(n));
}

double PcapFunction::left_value(std::int64_t n) const {
  return piece_value(n - 1, tau_.tau(n));
}

std::optional<IndexRange> PcapFunction::piece_window() const {
  if (const auto* s = std::get_if<Sampled>(&body_)) return s->pieces;
  return std::get<Factored>(body_).u.domain();
}

PcapFunction synthesize(TrigPoly f, Sequence u, WexlerSeq tau) {
  return PcapFunction(std::move(tau), Factored{std::move(f), std::move(u)});
}

// ---------------------------------------------------------------------------
// Factorization

CoeffSeq jump_ratios(const PcapFunction& h, IndexRange window) {
  if (window.size() == 0) throw InvalidInput("empty jump window");
  std::vector<double> left(static_cast<std::size_t>(window.size()));
  std::vector<double> right(left.size());
  double sup = 0.0;
  for (std::int64_t n = window.lo; n <= window.hi; ++n) {
    const auto i = static_cast<std::size_t>(n - window.lo);
    left[i] = h.left_value(n);
    right[i] = h.right_limit(n);
    sup = std::max({sup, std::abs(left[i]), std::abs(right[i])});
  }
  const double floor = 1e-9 * sup;
  Table<double> a{window.lo, std::vector<double>(left.size())};
  for (std::size_t i = 0; i < left.size(); ++i) {
    const auto n = window.lo + static_cast<std::int64_t>(i);
    if (!(std::abs(left[i]) > floor)) {
      throw HypothesisViolation("|h(tau_n)| below floor at n = " + std::to_string(n), n);
    }
    if (!(std::abs(right[i]) > floor)) {
      throw HypothesisViolation("|h(tau_n+)| below floor at n = " + std::to_string(n), n);
    }
    a.values[i] = right[i] / left[i];
  }
  return CoeffSeq(std::move(a));
}

Interval FactorizationResult::domain() const {
  const IndexRange w = window();
  return {h.tau().tau(w.lo), h.tau().tau(w.hi + 1)};
}

double FactorizationResult::f(double t) const {
  const std::int64_t n = h.tau().piece_index(t);
  if (!window().contains(n)) {
    throw OutOfWindow("f is only defined on the factorization window");
  }
  return h.piece_value(n, t) / v(n);
}

double FactorizationResult::f_right(std::int64_t n) const {
  return h.right_limit(n) / v(n);
}

FactorizationResult factorize(const PcapFunction& h, IndexRange window,
                              std::int64_t n_ref, const FactorizeOptions& options) {
  if (!window.contains(n_ref)) {
    throw InvalidInput("n_ref must lie in the factorization window");
  }
  const CoeffSeq a = jump_ratios(h, window);
  FactorizationResult r{h, solve_ivp(a, n_ref, 1.0, window), n_ref, 1.0};
  r.conditioning = r.v.conditioning();
  r.well_conditioned = r.conditioning <= options.conditioning_bound;

  // f(tau_n^+) = h(tau_n^+)/v(n) must equal f(tau_n) = h(tau_n)/v(n-1).
  double defect = 0.0;
  double fscale = 0.0;
  for (std::int64_t n = window.lo + 1; n <= window.hi; ++n) {
    const double fr = h.right_limit(n) / r.v(n);
    const double fl = h.left_value(n) / r.v(n - 1);
    defect = std::max(defect, std::abs(fr - fl));
    fscale = std::max({fscale, std::abs(fr), std::abs(fl)});
  }
  r.continuity_defect = fscale > 0.0 ? defect / fscale : 0.0;

  double err = 0.0;
  double hscale = 0.0;
  const int m = std::max(1, options.samples_per_piece);
  const WexlerSeq& tau = h.tau();
  for (std::int64_t n = window.lo; n <= window.hi; ++n) {
    const double t0 = tau.tau(n);
    const double t1 = tau.tau(n + 1);
    for (int k = 0; k <= m; ++k) {
      const double t = k == m ? t1 : t0 + (t1 - t0) * k / m;
      const double hv = h.piece_value(n, t);
      const double fv = hv / r.v(n);
      err = std::max(err, std::abs(fv * r.v(n) - hv));
      hscale = std::max(hscale, std::abs(hv));
    }
  }
  r.reconstruction_error = hscale > 0.0 ? err / hscale : 0.0;
  return r;
}

GaugeVerdict uniqueness_gauge(const FactorizationResult& r1,
                              const FactorizationResult& r2, double tolerance) {
  GaugeVerdict g;
  const IndexRange w{std::max(r1.window().lo, r2.window().lo),
                     std::min(r1.window().hi, r2.window().hi)};
  if (w.size() == 0) return g;

  std::vector<double> u1, u2;
  for (std::int64_t n = w.lo; n <= w.hi; ++n) {
    u1.push_back(r1.u(n));
    u2.push_back(r2.u(n));
  }
  const GaugeRatio cu = constant_ratio(u1, u2);

  std::vector<double> f1, f2;
  double fmax = 0.0;
  const WexlerSeq& tau = r1.h.tau();
  for (std::int64_t n = w.lo; n <= w.hi; ++n) {
    const double t0 = tau.tau(n);
    const double t1 = tau.tau(n + 1);
    for (int k = 1; k <= 4; ++k) {
      const double t = k == 4 ? t1 : t0 + (t1 - t0) * k / 4.0;
      f1.push_back(r1.f(t));
      f2.push_back(r2.f(t));
      fmax = std::max(fmax, std::abs(f1.back()));
    }
  }
  std::vector<double> num, den;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    if (std::abs(f1[i]) > 1e-9 * fmax) {
      num.push_back(f2[i]);
      den.push_back(f1[i]);
    }
  }
  if (num.empty()) return g;
  const GaugeRatio cf = constant_ratio(num, den);

  g.c = cu.c;
  g.spread_u = cu.spread;
  g.spread_f = cf.spread;
  g.matched = cu.spread <= tolerance && cf.spread <= tolerance &&
              std::abs(cu.c - cf.c) <= tolerance * std::abs(cu.c);
  return g;
}

// ---------------------------------------------------------------------------
// Verification

std::vector<double> admissible_samples(const WexlerSeq& tau, double eps,
                                       Interval samples, double sample_step) {
  std::vector<double> out;
  for (double t : sample_grid(samples, sample_step)) {
    if (tau.distance_to_jump(t) > eps) out.push_back(t);
  }
  return out;
}

AlmostPeriodReport scan_pcap_almost_periods(const PcapFunction& h, double eps,
                                            Interval translations,
                                            double translation_step,
                                            Interval samples,
                                            double sample_step) {
  if (!(eps > 0.0)) throw InvalidInput("epsilon must be positive");
  const auto shifts = translation_grid(translations, translation_step);
  const auto ts = admissible_samples(h.tau(), eps, samples, sample_step);
  std::vector<double> base(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) base[i] = h(ts[i]);

  AlmostPeriodReport report{eps, {}, translations, translation_step,
                            samples, sample_step, 0.0};
  for (double r : shifts) {
    bool ok = true;
    for (std::size_t i = 0; i < ts.size() && ok; ++i) {
      ok = std::abs(h(ts[i] + r) - base[i]) < eps;
    }
    if (ok) report.periods.push_back(r);
  }
  report.max_gap = max_gap(report.periods, translations);
  return report;
}

double continuity_modulus(const PcapFunction& h, double eps, IndexRange pieces,
                          double step) {
  if (!(eps > 0.0) || !(step > 0.0)) {
    throw InvalidInput("epsilon and step must be positive");
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> ts, hs;
  for (std::int64_t n = pieces.lo; n <= pieces.hi; ++n) {
    const double t0 = h.tau().tau(n);
    const double t1 = h.tau().tau(n + 1);
    ts.clear();
    hs.clear();
    for (int k = 1; t0 + k * step < t1; ++k) ts.push_back(t0 + k * step);
    ts.push_back(t1);
    for (double t : ts) hs.push_back(h.piece_value(n, t));
    for (std::size_t i = 0; i < ts.size(); ++i) {
      for (std::size_t j = i + 1; j < ts.size() && ts[j] - ts[i] < best; ++j) {
        if (std::abs(hs[j] - hs[i]) >= eps) best = ts[j] - ts[i];
      }
    }
  }
  return best;
}

PcapVerdict verify_pcap(const PcapFunction& h, const std::vector<double>& epsilons,
                        const VerifyWindows& windows) {
  PcapVerdict verdict{windows, {}};
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw InvalidInput("epsilons must be positive");
    EpsilonVerdict e;
    e.epsilon = eps;
    e.equipotential =
        verify_equipotential(h.tau(), eps, windows.p_window, windows.jk_window);
    e.delta = continuity_modulus(h, eps, windows.pieces, windows.piece_step);
    e.almost_periods = scan_pcap_almost_periods(
        h, eps, windows.translations, windows.translation_step, windows.samples,
        std::min(windows.sample_step, eps / 10.0));
    verdict.entries.push_back(std::move(e));
  }
  return verdict;
}

BoundarySequence boundary_sequence(const PcapFunction& h, IndexRange window,
                                   double eps,
                                   std::optional<IndexRange> translations) {
  if (window.size() == 0) throw InvalidInput("empty boundary window");
  BoundarySequence b;
  b.values.first = window.lo;
  for (std::int64_t n = window.lo; n <= window.hi; ++n) {
    b.values.values.push_back(h.left_value(n));
  }
  const auto size = window.size();
  b.scan = scan_table_almost_periods(
      b.values, eps, translations.value_or(IndexRange{-size / 2, size / 2}));
  return b;
}

}  // namespace pcap
