#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "polex/channel.hpp"
#include "polex/io.hpp"

using namespace polex;
using Catch::Matchers::WithinAbs;

namespace {

double binary_entropy(double p) {
  double s = 0.0;
  if (p > 0.0) s -= p * std::log2(p);
  if (p < 1.0) s -= (1.0 - p) * std::log2(1.0 - p);
  return s;
}

const std::vector<double> kRhoGrid{0.25, 0.5, 1.0, 1.5, 2.0, 4.0, 8.0};

}  // namespace

TEST_CASE("rho validation") {
  CHECK_NOTHROW(Rho(0.0));
  CHECK_NOTHROW(Rho(kRhoMax));
  CHECK_THROWS_AS(Rho(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(Rho(kRhoMax + 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Rho(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(Rho(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("channel construction validates and normalizes rows") {
  CHECK_THROWS_AS(Bdmc({}), std::invalid_argument);
  CHECK_THROWS_AS(Bdmc({{0.5, 0.5}, {0.6, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(Bdmc({{1.2, -0.2}, {0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_bec(1.5), std::invalid_argument);
  CHECK_THROWS_AS(make_bec(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_bsc(2.0), std::invalid_argument);

  // a row off by less than the tolerance is rescaled to sum exactly
  const double eps = 4e-13;
  const Bdmc w({{0.5 + eps, 0.5}, {0.5, 0.5}});
  double s0 = 0.0;
  for (const auto& o : w.outputs()) s0 += o.w0;
  CHECK_THAT(s0, WithinAbs(1.0, 1e-15));
}

TEST_CASE("q_delta coordinates") {
  SECTION("BSC(0.11)") {
    const QDelta qd = q_delta(make_bsc(0.11));
    REQUIRE(qd.entries.size() == 2);
    CHECK_THAT(qd.entries[0].q, WithinAbs(0.5, 1e-15));
    CHECK_THAT(qd.entries[0].delta, WithinAbs(0.78, 1e-12));
    CHECK_THAT(qd.entries[1].delta, WithinAbs(-0.78, 1e-12));
  }
  SECTION("BEC(0.3)") {
    const QDelta qd = q_delta(make_bec(0.3));
    REQUIRE(qd.entries.size() == 3);
    CHECK_THAT(qd.entries[0].q, WithinAbs(0.35, 1e-15));
    CHECK_THAT(qd.entries[0].delta, WithinAbs(1.0, 1e-15));
    CHECK_THAT(qd.entries[1].q, WithinAbs(0.35, 1e-15));
    CHECK_THAT(qd.entries[1].delta, WithinAbs(-1.0, 1e-15));
    CHECK_THAT(qd.entries[2].q, WithinAbs(0.3, 1e-15));
    CHECK_THAT(qd.entries[2].delta, WithinAbs(0.0, 1e-15));
  }
  SECTION("useless channel has all-zero delta") {
    const QDelta qd = q_delta(Bdmc({{0.25, 0.25}, {0.75, 0.75}}));
    for (const auto& e : qd.entries) CHECK(e.delta == 0.0);
  }
  SECTION("zero-mass outputs are dropped") {
    const QDelta qd = q_delta(make_bec(0.0));
    CHECK(qd.entries.size() == 2);
  }
  SECTION("reconstruction") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const Bdmc w = random_channel(rng, 2 + static_cast<int>(rng() % 5));
      const QDelta qd = q_delta(w);
      std::size_t k = 0;
      for (const auto& o : w.outputs()) {
        if (0.5 * (o.w0 + o.w1) <= 0.0) continue;
        const auto& e = qd.entries[k++];
        CHECK_THAT(e.q * (1.0 + e.delta), WithinAbs(o.w0, 1e-14));
        CHECK_THAT(e.q * (1.0 - e.delta), WithinAbs(o.w1, 1e-14));
      }
      CHECK(k == qd.entries.size());
    }
  }
}

TEST_CASE("z_rep canonical form") {
  SECTION("BEC atoms are {0, 1} with the erasure mass at 0") {
    const ZRep r = z_rep(make_bec(0.3));
    REQUIRE(r.size() == 2);
    CHECK(r.atoms()[0].z == 0.0);
    CHECK_THAT(r.atoms()[0].p, WithinAbs(0.3, 1e-15));
    CHECK(r.atoms()[1].z == 1.0);
    CHECK_THAT(r.atoms()[1].p, WithinAbs(0.7, 1e-15));
  }
  SECTION("BSC is a single atom |1 - 2p|") {
    const ZRep flat = z_rep(make_bsc(0.5));
    REQUIRE(flat.size() == 1);
    CHECK(flat.atoms()[0].z == 0.0);
    CHECK_THAT(flat.atoms()[0].p, WithinAbs(1.0, 1e-15));

    const ZRep clean = z_rep(make_bsc(0.0));
    REQUIRE(clean.size() == 1);
    CHECK(clean.atoms()[0].z == 1.0);

    const ZRep r = z_rep(make_bsc(0.11));
    REQUIRE(r.size() == 1);
    CHECK_THAT(r.atoms()[0].z, WithinAbs(0.78, 1e-12));
  }
  SECTION("opposite-sign deltas fold into one atom") {
    // symmetric 2-sided channel, deltas +-d with equal mass
    const ZRep r = z_rep(Bdmc({{0.4, 0.1}, {0.1, 0.4}, {0.5, 0.5}}));
    REQUIRE(r.size() == 2);
    CHECK_THAT(r.atoms()[1].z, WithinAbs(0.6, 1e-15));
    CHECK_THAT(r.atoms()[1].p, WithinAbs(0.5, 1e-15));
  }
  SECTION("atoms sorted, masses sum to one") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
      const ZRep r = z_rep(random_channel(rng, 2 + static_cast<int>(rng() % 5)));
      CHECK_THAT(r.total_mass(), WithinAbs(1.0, 1e-12));
      for (std::size_t i = 1; i < r.size(); ++i)
        CHECK(r.atoms()[i].z > r.atoms()[i - 1].z);
    }
  }
  SECTION("merge window tightens toward z = 1") {
    // 1e-13 apart near the middle: merged under the 1e-12 window
    const ZRep mid(std::vector<ZAtom>{{0.5, 0.5}, {0.5 + 1e-13, 0.5}});
    CHECK(mid.size() == 1);
    // same gap next to z = 1: kept apart, where E0 is this sensitive
    const ZRep edge(std::vector<ZAtom>{{1.0 - 1e-10, 0.5}, {1.0 - 1e-10 + 1e-13, 0.5}});
    CHECK(edge.size() == 2);
  }
}

TEST_CASE("g basics") {
  for (double rho : kRhoGrid) {
    CHECK_THAT(g(rho, 0.0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(g(rho, 1.0), WithinAbs(std::exp2(-rho), 1e-15));
  }
  CHECK_THAT(g(1.0, 0.6), WithinAbs(0.9, 1e-15));  // 1/2 + sqrt(1 - z^2)/2
  CHECK_THROWS_AS(g(1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(g(1.0, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(g(-1.0, 0.5), std::invalid_argument);
}

TEST_CASE("e0_direct basics") {
  SECTION("useless channel") {
    const Bdmc w = make_bsc(0.5);
    for (double rho : kRhoGrid) CHECK_THAT(e0_direct(Rho(rho), w), WithinAbs(0.0, 1e-12));
  }
  SECTION("noiseless channel reaches rho bits") {
    const Bdmc w = make_bec(0.0);
    for (double rho : kRhoGrid) CHECK_THAT(e0_direct(Rho(rho), w), WithinAbs(rho, 1e-12));
  }
  SECTION("BEC closed form") {
    CHECK_THAT(e0_direct(Rho(1.0), make_bec(0.5)),
               WithinAbs(0.4150374992788438, 1e-14));
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      const double eps = uniform01(rng);
      const double rho = 0.1 + uniform01(rng) * 7.9;
      const double tp = std::exp2(-rho);
      CHECK_THAT(e0_direct(Rho(rho), make_bec(eps)),
                 WithinAbs(-std::log2(eps * (1.0 - tp) + tp), 1e-12));
    }
  }
  SECTION("range [0, rho]") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
      const Bdmc w = random_channel(rng, 2 + static_cast<int>(rng() % 5));
      for (double rho : kRhoGrid) {
        const double e0 = e0_direct(Rho(rho), w);
        CHECK(e0 >= 0.0);
        CHECK(e0 <= rho);
      }
    }
  }
}

TEST_CASE("representation equivalence e0_from_zrep vs e0_direct") {
  std::mt19937_64 rng(23);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const Bdmc w = random_channel(rng, 2 + static_cast<int>(rng() % 5));
    const ZRep r = z_rep(w);
    for (double rho : kRhoGrid)
      worst = std::max(worst,
                       std::abs(e0_from_zrep(Rho(rho), r) - e0_direct(Rho(rho), w)));
  }
  CHECK(worst <= tol::kRepEquiv);

  // degenerate rep: single atom
  const ZRep single(std::vector<ZAtom>{{0.37, 1.0}});
  CHECK_THAT(e0_from_zrep(Rho(2.0), single), WithinAbs(-std::log2(g(2.0, 0.37)), 1e-15));
}

TEST_CASE("E0 is increasing and concave in rho") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const Bdmc w = random_channel(rng, 2 + static_cast<int>(rng() % 5));
    std::vector<double> e0;
    for (int i = 0; i <= 40; ++i) e0.push_back(e0_direct(Rho(0.1 + 0.2 * i), w));
    for (std::size_t i = 1; i < e0.size(); ++i) CHECK(e0[i] >= e0[i - 1] - 1e-12);
    for (std::size_t i = 1; i + 1 < e0.size(); ++i)
      CHECK(e0[i - 1] - 2.0 * e0[i] + e0[i + 1] <= 1e-9);
  }
}

TEST_CASE("capacity") {
  CHECK_THAT(capacity(make_bec(0.0)), WithinAbs(1.0, 1e-15));
  CHECK_THAT(capacity(make_bsc(0.5)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(capacity(make_bsc(0.11)), WithinAbs(1.0 - binary_entropy(0.11), 1e-14));
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const double eps = uniform01(rng);
    CHECK_THAT(capacity(make_bec(eps)), WithinAbs(1.0 - eps, 1e-14));
  }
}

TEST_CASE("capacity equals the rho -> 0 slope of E0") {
  std::mt19937_64 rng(37);
  const double rho = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const Bdmc w = random_channel(rng, 2 + static_cast<int>(rng() % 5));
    CHECK_THAT(e0_direct(Rho(rho), w) / rho, WithinAbs(capacity(w), 1e-4));
  }
  CHECK_THAT(e0_direct(Rho(rho), make_bsc(0.11)) / rho,
             WithinAbs(capacity(make_bsc(0.11)), 1e-4));
}

TEST_CASE("bhattacharyya and the cutoff rate") {
  CHECK_THAT(bhattacharyya(make_bec(0.0)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(bhattacharyya(make_bsc(0.11)),
             WithinAbs(2.0 * std::sqrt(0.11 * 0.89), 1e-15));
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Bdmc w = random_channel(rng, 2 + static_cast<int>(rng() % 5));
    const double zw = bhattacharyya(w);
    CHECK((zw >= 0.0 && zw <= 1.0));
    CHECK_THAT(e0_direct(Rho(1.0), w),
               WithinAbs(std::log2(2.0 / (1.0 + zw)), tol::kRepEquiv));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const double eps = uniform01(rng);
    CHECK_THAT(bhattacharyya(make_bec(eps)), WithinAbs(eps, 1e-14));
  }
}

TEST_CASE("z_rho generalization") {
  CHECK_THROWS_AS(z_rho(Rho(0.0), make_bsc(0.11)), std::invalid_argument);
  for (double rho : {0.5, 1.0, 2.0, 5.0})
    CHECK_THAT(z_rho(Rho(rho), make_bec(0.3)), WithinAbs(0.3, 1e-13));
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const Bdmc w = random_channel(rng, 2 + static_cast<int>(rng() % 5));
    CHECK_THAT(z_rho(Rho(1.0), w), WithinAbs(bhattacharyya(w), 1e-12));
    const double zr = z_rho(Rho(4.0), w);
    CHECK((zr >= 0.0 && zr <= 1.0));
  }
  for (double rho : kRhoGrid)
    CHECK_THAT(z_rho(Rho(rho), make_bec(0.0)), WithinAbs(0.0, 1e-15));
}

TEST_CASE("channel_stats bundles the four quantities") {
  const ChannelStats s = channel_stats(Rho(1.0), make_bec(0.5));
  CHECK_THAT(s.e0, WithinAbs(0.4150374992788438, 1e-14));
  CHECK_THAT(s.capacity, WithinAbs(0.5, 1e-14));
  CHECK_THAT(s.bhattacharyya, WithinAbs(0.5, 1e-14));
  CHECK_THAT(s.z_rho, WithinAbs(0.5, 1e-13));
  CHECK_THROWS_AS(channel_stats(Rho(0.0), make_bec(0.5)), std::invalid_argument);
}
