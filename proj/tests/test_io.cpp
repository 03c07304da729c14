#include <catch_amalgamated.hpp>

#include <fstream>
#include <random>

#include "polex/io.hpp"

using namespace polex;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

TEST_CASE("channel document parsing") {
  SECTION("shorthands") {
    const Bdmc bec = parse_channel_json(nlohmann::json{{"bec", 0.3}});
    CHECK(bec.size() == 3);
    CHECK_THAT(bec.outputs()[2].w0, WithinAbs(0.3, 1e-15));
    const Bdmc bsc = parse_channel_json(nlohmann::json{{"bsc", 0.11}});
    CHECK(bsc.size() == 2);
  }
  SECTION("explicit outputs match the shorthand") {
    const Bdmc a = parse_channel_json(nlohmann::json{{"bec", 0.3}});
    const Bdmc b = parse_channel_json(
        nlohmann::json{{"outputs", {{0.7, 0.0}, {0.0, 0.7}, {0.3, 0.3}}}});
    REQUIRE(a.size() == b.size());
    for (std::size_t y = 0; y < a.size(); ++y) {
      CHECK(a.outputs()[y].w0 == b.outputs()[y].w0);
      CHECK(a.outputs()[y].w1 == b.outputs()[y].w1);
    }
  }
  SECTION("diagnostics name the offending row or field") {
    try {
      parse_channel_json(nlohmann::json{{"outputs", {{0.5, 0.5}, {0.5}}}});
      FAIL("expected a parse error");
    } catch (const ChannelFileError& e) {
      CHECK_THAT(e.what(), ContainsSubstring("outputs[1]"));
    }
    CHECK_THROWS_AS(parse_channel_json(nlohmann::json{{"bec", "x"}}), ChannelFileError);
    CHECK_THROWS_AS(parse_channel_json(nlohmann::json{{"bec", 0.1}, {"bsc", 0.1}}),
                    ChannelFileError);
    CHECK_THROWS_AS(parse_channel_json(nlohmann::json::array()), ChannelFileError);
    CHECK_THROWS_AS(parse_channel_json(nlohmann::json{{"bsc", 1.4}}), ChannelFileError);
    CHECK_THROWS_AS(
        parse_channel_json(nlohmann::json{{"outputs", {{0.9, 0.5}, {0.0, 0.5}}}}),
        ChannelFileError);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(load_channel_file("/nonexistent/channel.json"), ChannelFileError);
  }
}

TEST_CASE("random channel generator") {
  std::mt19937_64 a(42), b(42), c(43);
  const Bdmc wa = random_channel(a, 5), wb = random_channel(b, 5), wc = random_channel(c, 5);
  REQUIRE(wa.size() == 5);
  for (std::size_t y = 0; y < 5; ++y) {
    CHECK(wa.outputs()[y].w0 == wb.outputs()[y].w0);  // same seed, same channel
    CHECK(wa.outputs()[y].w1 == wb.outputs()[y].w1);
  }
  bool differs = false;
  for (std::size_t y = 0; y < 5; ++y)
    differs = differs || wa.outputs()[y].w0 != wc.outputs()[y].w0;
  CHECK(differs);
  CHECK_THROWS_AS(random_channel(a, 0), std::invalid_argument);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const double v = (uniform01(rng) - 0.5) * std::pow(10.0, int(rng() % 20) - 10);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("manifest carries command, parameters and tolerances") {
  RunManifest m = make_manifest("e0");
  m.parameters = {{"rho", {1.0}}};
  const nlohmann::json j = m.to_json();
  CHECK(j["command"] == "e0");
  CHECK(j["tool_version"] == kVersion);
  CHECK(j["tolerances"].contains("verdict_slack"));
  CHECK_THAT(j["tolerances"]["verdict_slack"].get<double>(), WithinAbs(1e-9, 1e-24));
}
