#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "polex/extremal.hpp"
#include "polex/io.hpp"

using namespace polex;
using Catch::Matchers::WithinAbs;

namespace {
const std::vector<double> kRhoSweep{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 3.0, 8.0};
}

TEST_CASE("matched_bec closed form") {
  CHECK_THAT(matched_bec(Rho(1.0), 0.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(matched_bec(Rho(1.0), 1.0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(matched_bec(Rho(1.0), 0.4150374992788438), WithinAbs(0.5, 1e-13));
  CHECK_THROWS_AS(matched_bec(Rho(1.0), 1.5), std::invalid_argument);
  CHECK_THROWS_AS(matched_bec(Rho(1.0), -0.1), std::invalid_argument);
  CHECK_THROWS_AS(matched_bec(Rho(0.0), 0.0), std::invalid_argument);
}

TEST_CASE("matched_bsc bisection") {
  CHECK_THAT(matched_bsc(Rho(2.0), 0.0), WithinAbs(0.5, 1e-13));
  CHECK_THAT(matched_bsc(Rho(2.0), 2.0), WithinAbs(0.0, 1e-13));
  // rho = 1, 2^{-E0} = 0.9  =>  z = 0.6, p = 0.2
  CHECK_THAT(matched_bsc(Rho(1.0), -std::log2(0.9)), WithinAbs(0.2, 1e-12));
  CHECK_THROWS_AS(matched_bsc(Rho(1.0), 2.0), std::invalid_argument);
}

TEST_CASE("matched channels reproduce the target E0") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    const double rho = 0.1 + uniform01(rng) * 7.9;
    const double target = uniform01(rng) * rho;
    const MatchedExtremes m = match_extremes(Rho(rho), target);
    CHECK_THAT(e0_direct(Rho(rho), make_bec(m.bec_epsilon)), WithinAbs(target, 1e-10));
    CHECK_THAT(e0_direct(Rho(rho), make_bsc(m.bsc_p)), WithinAbs(target, 1e-10));
  }
}

TEST_CASE("theorem extremality report") {
  SECTION("BEC input collapses the BEC side") {
    for (double rho : {0.5, 1.0, 1.7, 3.0}) {
      const ExtremalityReport rep = theorem1_report(Rho(rho), make_bec(0.4), make_bec(0.4));
      CHECK(rep.all_ok());
      CHECK_THAT(rep.minus_bec, WithinAbs(rep.minus_actual, 1e-12));
      CHECK_THAT(rep.plus_bec, WithinAbs(rep.plus_actual, 1e-12));
    }
  }
  SECTION("BSC input collapses the BSC side") {
    for (double rho : {0.5, 1.0, 1.7, 3.0}) {
      const ExtremalityReport rep =
          theorem1_report(Rho(rho), make_bsc(0.11), make_bsc(0.11));
      CHECK(rep.all_ok());
      CHECK_THAT(rep.minus_bsc, WithinAbs(rep.minus_actual, 1e-10));
      CHECK_THAT(rep.plus_bsc, WithinAbs(rep.plus_actual, 1e-10));
    }
  }
  SECTION("plus side is a three-way tie at rho = 1") {
    const ExtremalityReport rep = theorem1_report(Rho(1.0), make_bsc(0.11), make_bsc(0.11));
    CHECK(rep.regime == PlusRegime::boundary);
    CHECK(rep.boundary_ok);
    CHECK_THAT(rep.plus_bec, WithinAbs(rep.plus_actual, tol::kBoundaryEq));
    CHECK_THAT(rep.plus_bsc, WithinAbs(rep.plus_actual, tol::kBoundaryEq));
  }
  SECTION("random sweep over both regimes") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 40; ++trial) {
      const Bdmc w1 = random_channel(rng, 4), w2 = random_channel(rng, 4);
      for (double rho : kRhoSweep) {
        const ExtremalityReport rep = theorem1_report(Rho(rho), w1, w2);
        INFO("rho = " << rho);
        CHECK(rep.all_ok());
      }
    }
  }
  SECTION("near-extremal structured channels keep the sandwich tight but valid") {
    // erasure-with-crossover channels interpolate between the BEC and BSC
    const auto bec_bsc_mix = [](double eps, double p) {
      const double s = 1.0 - eps;
      return Bdmc({{s * (1 - p), s * p}, {s * p, s * (1 - p)}, {eps, eps}});
    };
    for (double eps : {0.05, 0.3, 0.7})
      for (double p : {0.02, 0.11, 0.4})
        for (double rho : kRhoSweep) {
          const Bdmc w = bec_bsc_mix(eps, p);
          const ExtremalityReport rep = theorem1_report(Rho(rho), w, w);
          INFO("eps = " << eps << " p = " << p << " rho = " << rho);
          CHECK(rep.all_ok());
          if (rho <= 1.0) CHECK(corollary1_check(Rho(rho), w).all_ok());
          CHECK(corollary2_check(Rho(rho), w).all_ok());
        }
  }
}

TEST_CASE("corollary 1: polarization gap sandwich") {
  SECTION("self-matching ends are tight") {
    const Corollary1Report bec = corollary1_check(Rho(0.7), make_bec(0.35));
    CHECK(bec.all_ok());
    CHECK_THAT(bec.gap_bec, WithinAbs(bec.gap_actual, 1e-12));
    CHECK_THAT(bec.igap_bec, WithinAbs(bec.igap_actual, 1e-12));
    const Corollary1Report bsc = corollary1_check(Rho(0.7), make_bsc(0.2));
    CHECK(bsc.all_ok());
    CHECK_THAT(bsc.gap_bsc, WithinAbs(bsc.gap_actual, 1e-10));
    CHECK_THAT(bsc.igap_bsc, WithinAbs(bsc.igap_actual, 1e-10));
  }
  SECTION("strict sandwich for a generic channel") {
    std::mt19937_64 rng(71);
    const Bdmc w = random_channel(rng, 4);
    const Corollary1Report rep = corollary1_check(Rho(0.7), w);
    CHECK(rep.all_ok());
    CHECK(rep.gap_bsc < rep.gap_actual);
    CHECK(rep.gap_actual < rep.gap_bec);
  }
  SECTION("rho = 0 runs the capacity variant only") {
    std::mt19937_64 rng(73);
    const Corollary1Report rep = corollary1_check(Rho(0.0), random_channel(rng, 3));
    CHECK_FALSE(rep.e0_variant_evaluated);
    CHECK(rep.all_ok());
  }
  SECTION("rho beyond 1 is rejected") {
    CHECK_THROWS_AS(corollary1_check(Rho(1.5), make_bec(0.5)), std::invalid_argument);
  }
  SECTION("random sweep") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 30; ++trial) {
      const Bdmc w = random_channel(rng, 2 + static_cast<int>(rng() % 5));
      for (double rho : {0.25, 0.5, 0.75, 1.0}) CHECK(corollary1_check(Rho(rho), w).all_ok());
    }
  }
}

TEST_CASE("corollary 2: Z(rho, .) under the transforms") {
  SECTION("BEC identities are exact") {
    for (double rho : {0.5, 1.0, 1.5, 3.0}) {
      const Corollary2Report rep = corollary2_check(Rho(rho), make_bec(0.4));
      CHECK(rep.all_ok());
      CHECK_THAT(rep.minus_actual, WithinAbs(2.0 * 0.4 - 0.16, 1e-12));
      CHECK_THAT(rep.plus_actual, WithinAbs(0.16, 1e-12));
      CHECK(rep.bec_minus_identity_dev <= 1e-12);
      CHECK(rep.bec_plus_identity_dev <= 1e-12);
    }
  }
  SECTION("noiseless channel degenerates to zero") {
    const Corollary2Report rep = corollary2_check(Rho(2.0), make_bec(0.0));
    CHECK_THAT(rep.z_w, WithinAbs(0.0, 1e-14));
    CHECK_THAT(rep.plus_actual, WithinAbs(0.0, 1e-14));
    CHECK_THAT(rep.minus_actual, WithinAbs(0.0, 1e-13));
  }
  SECTION("random sweep over both regimes") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 30; ++trial) {
      const Bdmc w = random_channel(rng, 2 + static_cast<int>(rng() % 5));
      for (double rho : kRhoSweep) {
        const Corollary2Report rep = corollary2_check(Rho(rho), w);
        INFO("rho = " << rho);
        CHECK(rep.all_ok());
      }
    }
  }
  SECTION("verdicts agree with the E0-side theorem under the monotone map") {
    std::mt19937_64 rng(89);
    for (int trial = 0; trial < 20; ++trial) {
      const Bdmc w = random_channel(rng, 4);
      for (double rho : {0.5, 1.5, 3.0}) {
        const ExtremalityReport t = theorem1_report(Rho(rho), w, w);
        const Corollary2Report c = corollary2_check(Rho(rho), w);
        CHECK(t.all_ok() == c.all_ok());
        // Z(rho, .) is decreasing in E0, so each side swaps
        CHECK(c.minus_lower_ok == t.minus_upper_ok);
        CHECK(c.minus_upper_ok == t.minus_lower_ok);
      }
    }
  }
}
