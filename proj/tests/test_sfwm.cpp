#include <doctest.h>

#include <sstream>

#include "splitring/error.hpp"
#include "splitring/sfwm.hpp"
#include "test_support.hpp"

using namespace splitring;

TEST_CASE("beta coefficient") {
  SfwmParams s;
  const double r = 15e-6;
  // Hand evaluation with the constants written out.
  const double pi = 3.14159265358979323846;
  const double hand = 3 * pi * pi * 8.8541878128e-12 * 299792458.0 * 2.8e-19 * 15e-6 /
                      (2 * 2.4 * 2.4 * 1.55e-6 * 0.1e-12);
  CHECK(beta_coefficient(s, r) == doctest::Approx(hand).epsilon(1e-14));
  CHECK(beta_coefficient(s, 2 * r) == doctest::Approx(2 * hand).epsilon(1e-14));
  s.chi3 = 0.0;
  CHECK(beta_coefficient(s, r) == 0.0);
  s.a_eff = 0.0;
  CHECK_THROWS_AS(beta_coefficient(s, r), Error);
}

TEST_CASE("pair generation rate") {
  const PairRates zero = pair_generation_rate(0.0, 0.0, 3.0);
  CHECK(zero.fwd == 0.0);
  CHECK(zero.bwd == 0.0);
  const PairRates j = pair_generation_rate(2.0, 0.5, 3.0);
  CHECK(j.fwd == 36.0);
  CHECK(j.bwd == 2.25);
  CHECK(j.total() == 38.25);
  CHECK_THROWS_AS(pair_generation_rate(-1.0, 0.0, 1.0), Error);

  // Input power scaled by k scales the rate by k^2.
  const RingParams p = test::split_ring(Placement::InCoupler, 0.2);
  const double k = 3.0;
  const auto base = heralding_report(p, std::nullopt, 1.55e-6);
  const auto scaled = heralding_report(p, std::nullopt, 1.55e-6, BusInput{std::sqrt(k), 0.0});
  CHECK(scaled.j_4wm_fwd == doctest::Approx(k * k * base.j_4wm_fwd).epsilon(1e-12));
}

TEST_CASE("survival proportions") {
  SUBCASE("t = 1 never reaches the bus") {
    RingParams p = test::split_ring(Placement::InCoupler);
    p.t = 1.0;
    CHECK(survival_proportions(p, 1.55e-6, 0.0).fwd == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("lossless without backscatter every photon leaves through the bus") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> t(0.05, 0.999);
    std::uniform_real_distribution<double> th(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
      RingParams p;
      p.alpha = 1.0;
      p.xi = 1.0;
      p.t = t(rng);
      CHECK(survival_proportions_at_phase(p, th(rng), 0.0).fwd ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("without backscatter the transfer matrices do not mix directions") {
    RingParams p;
    p.xi = 1.0;
    const PhotonTransfer pt = photon_transfer_at_phase(p, 0.4);
    CHECK(pt.ring_ring(0, 1) == 0.0);
    CHECK(pt.ring_ring(1, 0) == 0.0);
    CHECK(pt.bus_ring(0, 1) == 0.0);
    CHECK(pt.bus_ring(1, 0) == 0.0);
  }
  SUBCASE("efficiency stays in [0, 1] for a forward-only source") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> th(-test::kPi, test::kPi);
    int done = 0;
    while (done < 300) {
      const RingParams p = test::random_params(rng);
      Survival s;
      try {
        s = survival_proportions_at_phase(p, th(rng), 0.0);
      } catch (const Error&) {
        continue;
      }
      CHECK(s.fwd >= -1e-15);
      CHECK(s.fwd <= 1.0 + 1e-12);
      ++done;
    }
  }
  SUBCASE("negative power ratio is rejected") {
    CHECK_THROWS_AS(survival_proportions(RingParams{}, 1.55e-6, -0.1), Error);
  }
}

// The closed form H (I - G)^-1 s against the photon-by-photon sum over ring
// passes: population n_{k+1} = G n_k starting at the source, output H n_k.
TEST_CASE("survival closed form equals the summed ring passes") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mag(0.3, 0.995);
  std::uniform_real_distribution<double> ang(-test::kPi, test::kPi);
  std::uniform_real_distribution<double> qd(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    RingParams p;
    p.t = mag(rng);
    p.alpha = mag(rng);
    p.xi = mag(rng);
    p.zeta = ang(rng);
    const double theta = ang(rng);
    const double q = qd(rng);
    const PhotonTransfer pt = photon_transfer_at_phase(p, theta);
    Eigen::Vector2d n(1.0, q * q);
    Eigen::Vector2d out = Eigen::Vector2d::Zero();
    for (int pass = 0; pass < 100000 && n.sum() > 1e-18; ++pass) {
      out += pt.bus_ring * n;
      n = pt.ring_ring * n;
    }
    const Survival s = survival_proportions_at_phase(p, theta, q);
    CHECK(s.fwd == doctest::Approx(out(0)).epsilon(1e-9));
    CHECK(s.bwd == doctest::Approx(out(1)).epsilon(1e-9));
  }
}

TEST_CASE("heralding report") {
  const RingParams p = test::split_ring(Placement::InCoupler, 0.3);
  SUBCASE("identities") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> l(1.549e-6, 1.5495e-6);
    for (int k = 0; k < 100; ++k) {
      const HeraldingReport h = heralding_report(p, std::nullopt, l(rng));
      CHECK(h.beta == 1.0);
      CHECK(h.eta == h.pr_fwd);
      CHECK(h.j_hm == h.j_4wm_fwd * h.eta);
      CHECK(h.j_herald == h.j_4wm_fwd * h.eta * h.eta);
      if (h.j_hm > 0) CHECK(h.j_herald / h.j_hm == doctest::Approx(h.eta).epsilon(1e-15));
      CHECK(h.j_herald <= h.j_hm);
      CHECK(h.j_hm <= h.j_4wm_fwd);
      CHECK(h.q == doctest::Approx(h.p_bwd / h.p_fwd));
    }
  }
  SUBCASE("physical units scale by beta squared") {
    const SfwmParams s;
    const HeraldingReport a = heralding_report(p, std::nullopt, 1.5492e-6);
    const HeraldingReport b = heralding_report(p, s, 1.5492e-6);
    const double beta = beta_coefficient(s, p.r);
    CHECK(b.beta == beta);
    CHECK(b.j_herald == doctest::Approx(beta * beta * a.j_herald).epsilon(1e-13));
    CHECK(b.eta == a.eta);
  }
  SUBCASE("zero pump") {
    const HeraldingReport h = heralding_report(p, std::nullopt, 1.55e-6, BusInput{0.0, 0.0});
    CHECK(h.j_4wm_fwd == 0.0);
    CHECK(h.j_herald == 0.0);
    CHECK(h.j_hm == 0.0);
    CHECK(h.q == 0.0);
    CHECK(h.eta == survival_proportions(p, 1.55e-6, 0.0).fwd);
  }
  SUBCASE("no forward pump makes the ratio undefined") {
    RingParams q = p;
    q.xi = 1.0;
    try {
      heralding_report(q, std::nullopt, 1.55e-6, BusInput{0.0, 1.0});
      FAIL("expected DivisionByZero");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DivisionByZero);
    }
  }
}

TEST_CASE("M parameter") {
  RingParams p;
  p.alpha = 1.0;
  p.xi = 1.0;
  CHECK(vernon_M(p, 1.5491e-6) == doctest::Approx(0.0).scale(1.0));

  p.alpha = 0.98;
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k <= 20; ++k) {
    p.t = 0.9 + 0.099 * k / 20.0;
    const OperatingPoint op = resonance_operating_point(p, std::nullopt);
    lo = std::min(lo, op.report.m_param);
    hi = std::max(hi, op.report.m_param);
  }
  CHECK((hi - lo) / hi > 0.1);
}

TEST_CASE("operating point and curves") {
  RingParams p;
  p.alpha = 0.98;
  p.xi = 0.99;
  SUBCASE("operating point beats its neighbourhood") {
    const OperatingPoint op = resonance_operating_point(p, std::nullopt);
    const double theta = round_trip_phase(op.lambda, p);
    for (double d : {-1e-3, -1e-5, 1e-5, 1e-3}) {
      CHECK(herald_sample_at_phase(p, theta + d).j_herald <= op.report.j_herald * (1 + 1e-12));
    }
    const HeraldSample s = herald_sample_at_phase(p, theta);
    CHECK(objective_value(s, Objective::HeraldRate) == s.j_herald);
    CHECK(objective_value(s, Objective::HeraldMode) == s.j_hm);
    CHECK(objective_value(s, Objective::Efficiency) == s.eta);
  }
  SUBCASE("single-point curve delegates") {
    const auto rows = rate_vs_efficiency_curve(p, {0.95}, std::nullopt);
    RingParams q = p;
    q.t = 0.95;
    const OperatingPoint op = resonance_operating_point(q, std::nullopt);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].eta == op.report.eta);
    CHECK(rows[0].j_herald_reduced == op.report.j_herald);
    CHECK(rows[0].j_hm_reduced == op.report.j_hm);
    CHECK(rows[0].m_param == op.report.m_param);
    CHECK(rows[0].lambda == op.lambda);
  }
  SUBCASE("bad grid values are marked per row") {
    const auto rows = rate_vs_efficiency_curve(p, {0.95, 1.2}, std::nullopt);
    CHECK_FALSE(rows[0].error.has_value());
    CHECK(rows[1].error.has_value());
    std::ostringstream os;
    write_curve_csv(os, rows);
    CHECK(os.str().rfind("t,eta,j_herald_reduced,j_hm_reduced,m_param\n", 0) == 0);
    CHECK(os.str().find("1.2,nan,nan,nan,nan") != std::string::npos);
  }
  SUBCASE("best coupling is below the loss coefficient") {
    std::vector<double> grid;
    for (int k = 0; k <= 150; ++k) grid.push_back(0.85 + 0.149 * k / 150.0);
    const auto rows = rate_vs_efficiency_curve(p, grid, std::nullopt);
    const auto best = std::max_element(rows.begin(), rows.end(), [](auto& a, auto& b) {
      return a.j_herald_reduced < b.j_herald_reduced;
    });
    CHECK(best->t < p.alpha);
  }
}
