#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "pcap/impulsive.hpp"

using namespace pcap;

namespace {

VectorField zero_field() {
  return [](std::span<const double>, double) { return 0.0; };
}

VectorField linear_field(double alpha) {
  return [alpha](std::span<const double> y, double) { return alpha * y[0]; };
}

// 1 + b(n) = 2 on even n, 1/2 on odd n
Sequence alternating_b() {
  return Sequence::Function([](std::int64_t n) { return n % 2 == 0 ? 1.0 : -0.5; });
}

// 1 + b(n) = exp(sin n - sin(n - 1))
Sequence telescoping_b() {
  return Sequence::Function([](std::int64_t n) {
    return std::exp(std::sin(static_cast<double>(n)) - std::sin(static_cast<double>(n - 1))) - 1.0;
  });
}

ImpulsiveSystem scalar(VectorField g, Sequence b, WexlerSeq tau = WexlerSeq(1.0)) {
  return ImpulsiveSystem({std::move(g)}, {std::move(b)}, std::move(tau));
}

}  // namespace

TEST_SUITE("build_u") {
  TEST_CASE("b = 0") {
    const auto u = build_u(TrigSeq(0.0), {-10, 10});
    for (double x : u.values.values) CHECK(x == 1.0);
  }

  TEST_CASE("alternating product") {
    const auto u = build_u(alternating_b(), {-5, 5});
    CHECK(u(0) == 1.0);
    CHECK(u(1) == 0.5);
    CHECK(u(2) == 1.0);
    CHECK(u(-1) == 0.5);
  }

  TEST_CASE("telescoping closed form") {
    const auto u = build_u(telescoping_b(), {-50, 50});
    for (std::int64_t n = -50; n <= 50; ++n) {
      CHECK(u(n) == doctest::Approx(std::exp(std::sin(static_cast<double>(n)))).epsilon(1e-12));
    }
  }

  TEST_CASE("window extended to contain zero") {
    const auto u = build_u(TrigSeq(1.0), {5, 8});
    CHECK(u.window() == IndexRange{0, 8});
    CHECK(u(8) == 256.0);
  }

  TEST_CASE("degenerate jump") {
    const Sequence b = Sequence::Function([](std::int64_t n) { return n == 3 ? -1.0 : 0.0; });
    try {
      build_u(b, {-5, 5});
      FAIL("expected DegenerateJump");
    } catch (const DegenerateJump& e) {
      CHECK(e.index() == 3);
    }
    // 1 + b(-5) never enters the products on [-5, 5]
    const Sequence c = Sequence::Function([](std::int64_t n) { return n == -5 ? -1.0 : 0.0; });
    CHECK_NOTHROW(build_u(c, {-5, 5}));
  }
}

TEST_SUITE("psi") {
  TEST_CASE("b = 0") {
    const auto psi = build_psi(TrigSeq(0.0), WexlerSeq(1.0), {-5, 5});
    for (double t : {-4.5, 0.0, 0.5, 1.0, 3.7}) CHECK(psi(t) == 1.0);
  }

  TEST_CASE("alternating") {
    const auto psi = build_psi(alternating_b(), WexlerSeq(1.0), {-5, 5});
    CHECK(psi(0.5) == 1.0);
    CHECK(psi(1.0) == 1.0);
    CHECK(psi(1.5) == 0.5);
    CHECK(psi(2.5) == 1.0);
    CHECK(psi.right_limit(1) == 0.5);
  }

  TEST_CASE("telescoping") {
    const WexlerSeq tau(1.0, TrigSeq(0.0, {{0.2, 0.5, 0.0}}));
    const auto psi = build_psi(telescoping_b(), tau, {-20, 20});
    for (std::int64_t n = -20; n < 20; ++n) {
      const double mid = 0.5 * (tau.tau(n) + tau.tau(n + 1));
      CHECK(psi(mid) == doctest::Approx(std::exp(std::sin(static_cast<double>(n)))).epsilon(1e-12));
    }
  }
}

TEST_SUITE("a2") {
  TEST_CASE("b = 0 passes with conditioning 1") {
    const auto r = check_a2(scalar(zero_field(), TrigSeq(0.0)), {-10, 10});
    CHECK(r.pass());
    CHECK(r.components[0].conditioning == 1.0);
    CHECK(r.components[0].inf_abs_1_plus_b == 1.0);
  }

  TEST_CASE("telescoping passes with conditioning <= e^2") {
    const auto r = check_a2(scalar(zero_field(), telescoping_b()), {-100, 100});
    CHECK(r.pass());
    CHECK(r.components[0].conditioning <= std::exp(2.0));
    CHECK(r.components[0].conditioning > std::exp(1.9));
  }

  TEST_CASE("1 + b = 2 fails once the window reaches n = 60") {
    const auto sys = scalar(zero_field(), TrigSeq(1.0));
    CHECK(check_a2(sys, {0, 30}).pass());
    const auto r = check_a2(sys, {0, 60});
    CHECK_FALSE(r.pass());
    CHECK(r.components[0].conditioning == std::ldexp(1.0, 60));
    CHECK_FALSE(r.components[0].failure.empty());
  }

  TEST_CASE("degenerate jump is reported, not thrown") {
    const Sequence b = Sequence::Function([](std::int64_t n) { return n == 2 ? -1.0 : 0.0; });
    const auto r = check_a2(scalar(zero_field(), b), {-5, 5});
    CHECK_FALSE(r.pass());
    CHECK(r.components[0].inf_abs_1_plus_b == 0.0);
    CHECK(r.components[0].failure.find("degenerate") != std::string::npos);
  }

  TEST_CASE("transform_system throws on failure") {
    CHECK_THROWS_AS(transform_system(scalar(zero_field(), TrigSeq(1.0)), {0, 80}), A2Failure);
  }
}

TEST_SUITE("integrate") {
  TEST_CASE("g = 0, b = 0: constant") {
    const auto tr = integrate_impulsive(scalar(zero_field(), TrigSeq(0.0)),
                                        std::vector<double>{3.0}, -2.3, 4.1, 0.1);
    for (const auto& s : tr.samples) CHECK(s.y[0] == 3.0);
    CHECK(tr.jumps.size() == 7);
  }

  TEST_CASE("pure jumps double the state") {
    const auto tr = integrate_impulsive(scalar(zero_field(), TrigSeq(1.0)),
                                        std::vector<double>{1.0}, 0.5, 3.5, 0.1);
    REQUIRE(tr.jumps.size() == 3);
    CHECK(tr.final_state()[0] == 8.0);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& j = tr.jumps[k];
      CHECK(j.tau == static_cast<double>(k + 1));
      CHECK(tr.samples[j.left_index].side == Side::kLeft);
      CHECK(tr.samples[j.left_index + 1].side == Side::kRight);
      CHECK(tr.samples[j.left_index + 1].y[0] == 2.0 * tr.samples[j.left_index].y[0]);
      CHECK(tr.samples[j.left_index].t == tr.samples[j.left_index + 1].t);
    }
  }

  TEST_CASE("y' = y reaches e") {
    const auto tr = integrate_impulsive(scalar(linear_field(1.0), TrigSeq(0.0), WexlerSeq(0.37)),
                                        std::vector<double>{1.0}, 0.0, 1.0, 1e-3);
    CHECK(std::abs(tr.final_state()[0] - std::numbers::e) <= 1e-10);
    CHECK(tr.samples.back().t == 1.0);
  }

  TEST_CASE("substeps land on every jump") {
    const WexlerSeq tau(0.7, TrigSeq(0.0, {{0.1, 1.3, 0.2}}));
    const auto tr = integrate_impulsive(scalar(zero_field(), TrigSeq(0.0), tau),
                                        std::vector<double>{1.0}, -3.0, 5.0, 0.05);
    for (const auto& j : tr.jumps) CHECK(tr.samples[j.left_index].t == tau.tau(j.n));
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
      CHECK(tr.samples[i].t - tr.samples[i - 1].t <= 0.05 + 1e-12);
      CHECK(tr.samples[i].t >= tr.samples[i - 1].t);
    }
  }

  TEST_CASE("start on a jump time is a right limit, end on one is not jumped") {
    const auto tr = integrate_impulsive(scalar(zero_field(), TrigSeq(1.0)),
                                        std::vector<double>{1.0}, 1.0, 3.0, 0.5);
    CHECK(tr.samples.front().side == Side::kRight);
    CHECK(tr.samples.front().piece == 1);
    CHECK(tr.jumps.size() == 1);
    CHECK(tr.final_state()[0] == 2.0);
  }

  TEST_CASE("errors") {
    const auto sys = scalar(zero_field(), TrigSeq(0.0));
    const std::vector<double> y0{1.0};
    CHECK_THROWS_AS(integrate_impulsive(sys, y0, 0.0, 1.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(integrate_impulsive(sys, y0, 1.0, 0.0, 0.1), InvalidInput);
    CHECK_THROWS_AS(integrate_impulsive(sys, std::vector<double>{1.0, 2.0}, 0.0, 1.0, 0.1),
                    InvalidInput);
    const auto blowup = scalar([](std::span<const double> y, double) { return y[0] * y[0]; },
                               TrigSeq(0.0));
    CHECK_THROWS_AS(integrate_impulsive(blowup, y0, 0.0, 5.0, 0.01), EvaluationError);
    const auto throwing = scalar([](std::span<const double>, double t) -> double {
      if (t > 0.5) throw std::runtime_error("boom");
      return 0.0;
    }, TrigSeq(0.0));
    try {
      integrate_impulsive(throwing, y0, 0.0, 1.0, 0.1);
      FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
      CHECK(std::string(e.what()).find("t = ") != std::string::npos);
    }
    CHECK_THROWS_AS(ImpulsiveSystem({}, {}, WexlerSeq(1.0)), InvalidInput);
    CHECK_THROWS_AS(ImpulsiveSystem({zero_field()}, {}, WexlerSeq(1.0)), InvalidInput);
  }

  TEST_CASE("property: 2-d linear system against the closed form") {
    gen::Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
      const double a1 = gen::uniform(rng, -0.5, 0.5);
      const double a2 = gen::uniform(rng, -0.5, 0.5);
      const double b1 = gen::uniform(rng, -0.5, 0.5);
      const double b2 = gen::uniform(rng, -0.5, 0.5);
      const WexlerSeq tau = gen::wexler(rng);
      const ImpulsiveSystem sys(
          {[a1](std::span<const double> y, double) { return a1 * y[0]; },
           [a2](std::span<const double> y, double) { return a2 * y[1]; }},
          {TrigSeq(b1), TrigSeq(b2)}, tau);
      const double t0 = gen::uniform(rng, -3, 0);
      const double t1 = gen::uniform(rng, 1, 5);
      const auto tr = integrate_impulsive(sys, std::vector<double>{1.0, -2.0}, t0, t1, 1e-3);
      const double jumps = static_cast<double>(tr.jumps.size());
      CHECK(static_cast<std::int64_t>(tr.jumps.size()) ==
            tau.piece_index(t1) - tau.piece_index(t0));
      CHECK(tr.final_state()[0] ==
            doctest::Approx(std::exp(a1 * (t1 - t0)) * std::pow(1 + b1, jumps)).epsilon(1e-10));
      CHECK(tr.final_state()[1] ==
            doctest::Approx(-2.0 * std::exp(a2 * (t1 - t0)) * std::pow(1 + b2, jumps)).epsilon(1e-10));
    }
  }
}

TEST_SUITE("transformed") {
  TEST_CASE("b = 0: identical to the original") {
    const auto sys = scalar(linear_field(0.3), TrigSeq(0.0));
    const auto ts = transform_system(sys, {-5, 5});
    const std::vector<double> y{2.0};
    std::vector<double> dz(1);
    ts.rhs(2, 0.7, y, dz);
    CHECK(dz[0] == sys.g()[0](y, 0.7));
    CHECK(ts.field_piecewise_in_time());
    CHECK(ts.continuous_solution());
  }

  TEST_CASE("g = 0: z constant") {
    const auto ts = transform_system(scalar(zero_field(), alternating_b()), {-5, 5});
    const auto z = integrate_transformed(ts, std::vector<double>{1.5}, 0.2, 4.8, 0.1);
    for (const auto& s : z.samples) CHECK(s.y[0] == 1.5);
  }

  TEST_CASE("linear g: psi cancels") {
    const auto ts = transform_system(scalar(linear_field(-0.7), telescoping_b()), {-10, 10});
    std::vector<double> dz(1);
    for (std::int64_t n = -5; n <= 5; ++n) {
      const std::vector<double> z{1.3};
      ts.rhs(n, 0.0, z, dz);
      CHECK(dz[0] == doctest::Approx(-0.7 * 1.3).epsilon(1e-15));
    }
    CHECK(ts.psi(0, 3) == doctest::Approx(std::exp(std::sin(3.0))).epsilon(1e-12));
    CHECK(ts.psi_at(0, 3.0) == ts.psi(0, 2));
  }
}

TEST_SUITE("roundtrip") {
  TEST_CASE("g = 0, alternating jumps") {
    const auto r = roundtrip_check(scalar(zero_field(), alternating_b()),
                                   std::vector<double>{1.0}, 0.5, 10.5, 0.1);
    CHECK(r.max_deviation <= 1e-15);
    CHECK(r.quotient_jump <= 1e-15);
    CHECK(r.phi_nonzero_at_jumps);
    for (const auto& s : r.z.samples) CHECK(s.y[0] == 1.0);
  }

  TEST_CASE("0.1 cos(t) y with telescoping jumps") {
    const auto sys = scalar([](std::span<const double> y, double t) { return 0.1 * std::cos(t) * y[0]; },
                            telescoping_b());
    const auto r = roundtrip_check(sys, std::vector<double>{1.0}, 0.0, 50.0, 1e-3);
    CHECK(r.max_deviation <= 1e-6);
    CHECK(r.quotient_jump <= 1e-12);
    CHECK(r.phi_nonzero_at_jumps);
  }

  TEST_CASE("b = 0: no deviation at all") {
    const auto r = roundtrip_check(scalar(linear_field(0.2), TrigSeq(0.0)),
                                   std::vector<double>{1.0}, 0.0, 5.0, 0.01);
    CHECK(r.max_deviation == 0.0);
  }

  TEST_CASE("a zero state at a jump is reported") {
    const auto r = roundtrip_check(scalar(zero_field(), alternating_b()),
                                   std::vector<double>{0.0}, 0.5, 3.5, 0.1);
    CHECK_FALSE(r.phi_nonzero_at_jumps);
  }

  TEST_CASE("A2 failure propagates") {
    CHECK_THROWS_AS(roundtrip_check(scalar(zero_field(), TrigSeq(1.0)),
                                    std::vector<double>{1.0}, 0.0, 80.0, 0.1),
                    A2Failure);
  }

  TEST_CASE("z scans are in time units") {
    const auto r = roundtrip_check(scalar(zero_field(), alternating_b()),
                                   std::vector<double>{1.0}, 0.0, 20.0, 0.1);
    REQUIRE(r.z_scans.size() == 1);
    CHECK(r.z_scans[0].translation_step == doctest::Approx(0.1));
    CHECK(r.z_scans[0].max_gap == doctest::Approx(0.1));
  }
}
