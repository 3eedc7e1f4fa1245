#include "pcap/ap_core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>

namespace pcap {
namespace {

double wrap_phase(double phase) {
  double p = std::fmod(phase, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  if (p >= kTwoPi) p = 0.0;
  return p;
}

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw InvalidInput(std::string("non-finite ") + what);
  }
}

// Groups terms by frequency. Single well-formed terms keep their phase bit
// for bit (canonicalization is idempotent); merged or negative-amplitude
// terms go through phasor arithmetic.
void canonicalize(double& mean, std::vector<TrigTerm>& terms) {
  check_finite(mean, "mean");
  std::map<double, std::vector<TrigTerm>> by_freq;
  for (const auto& term : terms) {
    check_finite(term.amp, "amplitude");
    check_finite(term.freq, "frequency");
    check_finite(term.phase, "phase");
    if (term.freq < 0.0) {
      throw InvalidInput("negative frequency");
    }
    if (term.amp == 0.0) continue;
    if (term.freq == 0.0) {
      mean += term.amp * std::cos(term.phase);
      continue;
    }
    by_freq[term.freq].push_back(term);
  }

  std::vector<TrigTerm> out;
  out.reserve(by_freq.size());
  for (auto& [freq, group] : by_freq) {
    if (group.size() == 1 && group.front().amp > 0.0) {
      out.push_back({group.front().amp, freq, wrap_phase(group.front().phase)});
      continue;
    }
    std::complex<double> phasor{0.0, 0.0};
    double scale = 0.0;
    for (const auto& term : group) {
      phasor += std::polar(term.amp, term.phase);
      scale += std::abs(term.amp);
    }
    const double amp = std::abs(phasor);
    // cancellation down to rounding counts as an exact zero
    if (amp <= 4.0 * std::numeric_limits<double>::epsilon() * scale) continue;
    out.push_back({amp, freq, wrap_phase(std::arg(phasor))});
  }
  terms = std::move(out);
}

double norm_of(double mean, const std::vector<TrigTerm>& terms) {
  double s = std::abs(mean);
  for (const auto& term : terms) s += std::abs(term.amp);
  return s;
}

void require_window(Interval w, const char* what) {
  if (!(w.lo <= w.hi) || !std::isfinite(w.lo) || !std::isfinite(w.hi)) {
    throw InvalidInput(std::string("empty or invalid ") + what + " window");
  }
}

void require_window(IndexRange w, const char* what) {
  if (w.size() == 0) {
    throw InvalidInput(std::string("empty ") + what + " window");
  }
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InvalidInput(std::string(what) + " must be positive");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// TrigPoly / TrigSeq

TrigPoly::TrigPoly(double mean, std::vector<TrigTerm> terms)
    : mean_(mean), terms_(std::move(terms)) {
  for (auto& term : terms_) {
    if (term.freq < 0.0) {
      // cos(-w t + p) = cos(w t - p)
      term.freq = -term.freq;
      term.phase = -term.phase;
    }
  }
  canonicalize(mean_, terms_);
}

double TrigPoly::operator()(double t) const {
  double s = mean_;
  for (const auto& term : terms_) {
    s += term.amp * std::cos(term.freq * t + term.phase);
  }
  return s;
}

double TrigPoly::norm_bound() const { return norm_of(mean_, terms_); }

TrigSeq::TrigSeq(double mean, std::vector<TrigTerm> terms)
    : mean_(mean), terms_(std::move(terms)) {
  for (auto& term : terms_) {
    check_finite(term.freq, "frequency");
    double f = std::fmod(term.freq, kTwoPi);
    if (f < 0.0) f += kTwoPi;
    if (f >= kTwoPi) f = 0.0;
    term.freq = f;
  }
  canonicalize(mean_, terms_);
}

double TrigSeq::operator()(std::int64_t n) const {
  const double x = static_cast<double>(n);
  double s = mean_;
  for (const auto& term : terms_) {
    s += term.amp * std::cos(term.freq * x + term.phase);
  }
  return s;
}

double TrigSeq::norm_bound() const { return norm_of(mean_, terms_); }

// ---------------------------------------------------------------------------
// Sequence

Sequence::Sequence(TrigSeq s) : source_(std::move(s)) {}
Sequence::Sequence(Table<double> t) : source_(std::move(t)) {}
Sequence::Sequence(Function fn) : source_(std::move(fn)) {
  if (!std::get<Function>(source_)) {
    throw InvalidInput("empty sequence callable");
  }
}

double Sequence::operator()(std::int64_t n) const {
  return std::visit(
      [n](const auto& src) -> double {
        using S = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<S, Table<double>>) {
          return src.at(n);
        } else {
          return src(n);
        }
      },
      source_);
}

std::optional<IndexRange> Sequence::domain() const {
  if (const auto* t = table()) return t->window();
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// WexlerSeq

WexlerSeq::WexlerSeq(double theta, TrigSeq perturbation)
    : theta_(theta), c_(std::move(perturbation)) {
  require_positive(theta_, "theta");
  if (!(2.0 * c_.norm_bound() < theta_)) {
    throw InvalidInput("Wexler perturbation too large: need 2*|c| < theta");
  }
}

double WexlerSeq::tau(std::int64_t j) const {
  return static_cast<double>(j) * theta_ + c_(j);
}

double WexlerSeq::diff(std::int64_t j, std::int64_t k) const {
  if (k == 0) return 0.0;
  return static_cast<double>(k) * theta_ + (c_(j + k) - c_(j));
}

double WexlerSeq::min_gap() const { return theta_ - 2.0 * c_.norm_bound(); }

std::int64_t WexlerSeq::piece_index(double t) const {
  if (!std::isfinite(t)) throw InvalidInput("non-finite time");
  auto n = static_cast<std::int64_t>(std::floor(t / theta_));
  while (tau(n + 1) < t) ++n;
  while (tau(n) >= t) --n;
  return n;
}

double WexlerSeq::distance_to_jump(double t) const {
  const std::int64_t n = piece_index(t);
  return std::min(t - tau(n), tau(n + 1) - t);
}

// ---------------------------------------------------------------------------
// Almost-period scans

bool AlmostPeriodReport::contains(double r, double tol) const {
  auto it = std::lower_bound(periods.begin(), periods.end(), r - tol);
  return it != periods.end() && *it <= r + tol;
}

double max_gap(std::span<const double> points, Interval window) {
  if (points.empty()) return window.length();
  double gap = std::max(0.0, points.front() - window.lo);
  for (std::size_t i = 1; i < points.size(); ++i) {
    gap = std::max(gap, points[i] - points[i - 1]);
  }
  return std::max(gap, window.hi - points.back());
}

std::vector<double> translation_grid(Interval window, double step) {
  require_window(window, "translation");
  require_positive(step, "translation step");
  const auto kmin = static_cast<std::int64_t>(std::ceil(window.lo / step - 1e-9));
  const auto kmax = static_cast<std::int64_t>(std::floor(window.hi / step + 1e-9));
  std::vector<double> grid;
  if (kmax >= kmin) grid.reserve(static_cast<std::size_t>(kmax - kmin + 1));
  for (std::int64_t k = kmin; k <= kmax; ++k) {
    grid.push_back(static_cast<double>(k) * step);
  }
  return grid;
}

std::vector<double> sample_grid(Interval window, double step) {
  require_window(window, "sample");
  require_positive(step, "sample step");
  const auto count =
      static_cast<std::int64_t>(std::floor(window.length() / step + 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count + 1));
  for (std::int64_t i = 0; i <= count; ++i) {
    grid.push_back(window.lo + static_cast<double>(i) * step);
  }
  return grid;
}

double translation_defect(const TrigPoly& f, double r, Interval samples,
                          double sample_step) {
  double sup = 0.0;
  for (double t : sample_grid(samples, sample_step)) {
    sup = std::max(sup, std::abs(f(t + r) - f(t)));
  }
  return sup;
}

double translation_defect(const TrigSeq& f, std::int64_t p, IndexRange samples,
                          std::int64_t sample_step) {
  require_window(samples, "sample");
  double sup = 0.0;
  for (std::int64_t n = samples.lo; n <= samples.hi; n += sample_step) {
    sup = std::max(sup, std::abs(f(n + p) - f(n)));
  }
  return sup;
}

AlmostPeriodReport scan_almost_periods(const TrigPoly& f, double eps,
                                       Interval translations,
                                       double translation_step,
                                       Interval samples, double sample_step) {
  require_positive(eps, "epsilon");
  const auto shifts = translation_grid(translations, translation_step);
  const auto ts = sample_grid(samples, sample_step);
  std::vector<double> base(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) base[i] = f(ts[i]);

  AlmostPeriodReport report{eps, {}, translations, translation_step,
                            samples, sample_step, 0.0};
  for (double r : shifts) {
    bool ok = true;
    for (std::size_t i = 0; i < ts.size() && ok; ++i) {
      ok = std::abs(f(ts[i] + r) - base[i]) < eps;
    }
    if (ok) report.periods.push_back(r);
  }
  report.max_gap = max_gap(report.periods, translations);
  return report;
}

AlmostPeriodReport scan_almost_periods(const Sequence& f, double eps,
                                       IndexRange translations,
                                       IndexRange samples,
                                       std::int64_t translation_step,
                                       std::int64_t sample_step) {
  require_positive(eps, "epsilon");
  require_window(translations, "translation");
  require_window(samples, "sample");
  if (translation_step <= 0 || sample_step <= 0) {
    throw InvalidInput("integer steps must be positive");
  }
  std::vector<std::int64_t> ns;
  std::vector<double> base;
  for (std::int64_t n = samples.lo; n <= samples.hi; n += sample_step) {
    ns.push_back(n);
    base.push_back(f(n));
  }

  const Interval window{static_cast<double>(translations.lo),
                        static_cast<double>(translations.hi)};
  AlmostPeriodReport report{eps,
                            {},
                            window,
                            static_cast<double>(translation_step),
                            {static_cast<double>(samples.lo),
                             static_cast<double>(samples.hi)},
                            static_cast<double>(sample_step),
                            0.0};
  // Anchor at zero, as for real grids.
  std::int64_t p = translations.lo;
  const std::int64_t rem = ((p % translation_step) + translation_step) % translation_step;
  if (rem != 0) p += translation_step - rem;
  for (; p <= translations.hi; p += translation_step) {
    bool ok = true;
    for (std::size_t i = 0; i < ns.size() && ok; ++i) {
      ok = std::abs(f(ns[i] + p) - base[i]) < eps;
    }
    if (ok) report.periods.push_back(static_cast<double>(p));
  }
  report.max_gap = max_gap(report.periods, window);
  return report;
}

AlmostPeriodReport scan_table_almost_periods(const Table<double>& table,
                                             double eps,
                                             IndexRange translations) {
  require_positive(eps, "epsilon");
  require_window(translations, "translation");
  const auto size = static_cast<std::int64_t>(table.values.size());
  if (size == 0) throw InvalidInput("empty table");
  const IndexRange clipped{std::max(translations.lo, -(size - 1)),
                           std::min(translations.hi, size - 1)};
  require_window(clipped, "clipped translation");

  const Interval window{static_cast<double>(clipped.lo),
                        static_cast<double>(clipped.hi)};
  const IndexRange tw = table.window();
  AlmostPeriodReport report{eps, {}, window, 1.0,
                            {static_cast<double>(tw.lo), static_cast<double>(tw.hi)},
                            1.0, 0.0};
  const auto& v = table.values;
  for (std::int64_t p = clipped.lo; p <= clipped.hi; ++p) {
    const std::int64_t i0 = std::max<std::int64_t>(0, -p);
    const std::int64_t i1 = std::min<std::int64_t>(size, size - p);
    bool ok = true;
    for (std::int64_t i = i0; i < i1 && ok; ++i) {
      ok = std::abs(v[static_cast<std::size_t>(i + p)] -
                    v[static_cast<std::size_t>(i)]) < eps;
    }
    if (ok) report.periods.push_back(static_cast<double>(p));
  }
  report.max_gap = max_gap(report.periods, window);
  return report;
}

AlmostPeriodReport verify_equipotential(const WexlerSeq& w, double eps,
                                        IndexRange p_window,
                                        IndexRange jk_window) {
  require_positive(eps, "epsilon");
  require_window(p_window, "p");
  require_window(jk_window, "jk");

  // tau_{j+p}^k - tau_j^k = (c(j+k+p) - c(j+p)) - (c(j+k) - c(j)).
  const std::int64_t lo = std::min(jk_window.lo, 2 * jk_window.lo) +
                          std::min<std::int64_t>(0, p_window.lo);
  const std::int64_t hi = std::max(jk_window.hi, 2 * jk_window.hi) +
                          std::max<std::int64_t>(0, p_window.hi);
  const TrigSeq& c = w.perturbation();
  std::vector<double> ct(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t m = lo; m <= hi; ++m) {
    ct[static_cast<std::size_t>(m - lo)] = c(m);
  }
  auto cv = [&](std::int64_t m) { return ct[static_cast<std::size_t>(m - lo)]; };

  const Interval window{static_cast<double>(p_window.lo),
                        static_cast<double>(p_window.hi)};
  AlmostPeriodReport report{eps, {}, window, 1.0,
                            {static_cast<double>(jk_window.lo),
                             static_cast<double>(jk_window.hi)},
                            1.0, 0.0};
  for (std::int64_t p = p_window.lo; p <= p_window.hi; ++p) {
    bool ok = true;
    for (std::int64_t j = jk_window.lo; j <= jk_window.hi && ok; ++j) {
      for (std::int64_t k = jk_window.lo; k <= jk_window.hi && ok; ++k) {
        const double d = (cv(j + k + p) - cv(j + p)) - (cv(j + k) - cv(j));
        ok = std::abs(d) < eps;
      }
    }
    if (ok) report.periods.push_back(static_cast<double>(p));
  }
  report.max_gap = max_gap(report.periods, window);
  return report;
}

double default_grid_step(const WexlerSeq& w) {
  return 0.01 * std::min(1.0, w.theta());
}

}  // namespace pcap
