#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "polex/channel.hpp"
#include "polex/version.hpp"

namespace polex {

/// Malformed or invalid channel input; the CLI maps this to exit code 2.
struct ChannelFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Accepted channel documents:
///   {"outputs": [[w0, w1], ...]}  explicit likelihood matrix
///   {"bec": epsilon}              binary erasure channel shorthand
///   {"bsc": p}                    binary symmetric channel shorthand
inline Bdmc parse_channel_json(const nlohmann::json& doc) {
  if (!doc.is_object())
    throw ChannelFileError("channel document must be a JSON object");
  const int keys = static_cast<int>(doc.contains("outputs")) +
                   static_cast<int>(doc.contains("bec")) +
                   static_cast<int>(doc.contains("bsc"));
  if (keys != 1)
    throw ChannelFileError(
        "channel document needs exactly one of \"outputs\", \"bec\", \"bsc\"");

  try {
    if (doc.contains("bec")) {
      if (!doc["bec"].is_number())
        throw ChannelFileError("field \"bec\" must be a number");
      return make_bec(doc["bec"].get<double>());
    }
    if (doc.contains("bsc")) {
      if (!doc["bsc"].is_number())
        throw ChannelFileError("field \"bsc\" must be a number");
      return make_bsc(doc["bsc"].get<double>());
    }
    const auto& rows = doc["outputs"];
    if (!rows.is_array() || rows.empty())
      throw ChannelFileError("field \"outputs\" must be a non-empty array");
    std::vector<LikelihoodPair> outputs;
    outputs.reserve(rows.size());
    for (std::size_t y = 0; y < rows.size(); ++y) {
      const auto& row = rows[y];
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
        throw ChannelFileError("outputs[" + std::to_string(y) +
                               "] must be a pair of numbers [w0, w1]");
      outputs.push_back({row[0].get<double>(), row[1].get<double>()});
    }
    return Bdmc(std::move(outputs));
  } catch (const std::invalid_argument& e) {
    throw ChannelFileError(std::string("invalid channel: ") + e.what());
  }
}

inline Bdmc load_channel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ChannelFileError("cannot open channel file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ChannelFileError("cannot parse " + path + ": " + e.what());
  }
  return parse_channel_json(doc);
}

/// Uniform double in [0, 1) from the top 53 bits of the generator.
inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

/// Random channel with both rows drawn from a symmetric Dirichlet(1) over
/// n_outputs cells (normalized exponentials), giving full support on the
/// channel simplex.
inline Bdmc random_channel(std::mt19937_64& rng, int n_outputs) {
  if (n_outputs < 1) throw std::invalid_argument("need at least one output");
  const auto row = [&rng, n_outputs] {
    std::vector<double> e(static_cast<std::size_t>(n_outputs));
    double sum = 0.0;
    for (double& v : e) {
      v = -std::log1p(-uniform01(rng));
      sum += v;
    }
    for (double& v : e) v /= sum;
    return e;
  };
  const std::vector<double> r0 = row(), r1 = row();
  std::vector<LikelihoodPair> outputs(static_cast<std::size_t>(n_outputs));
  for (std::size_t y = 0; y < outputs.size(); ++y) outputs[y] = {r0[y], r1[y]};
  return Bdmc(std::move(outputs));
}

/// 17 significant digits: doubles round-trip exactly through this format.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Command provenance embedded verbatim in every report.
struct RunManifest {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();

  nlohmann::json to_json() const {
    return {{"command", command},
            {"parameters", parameters},
            {"tolerances", tolerances},
            {"tool_version", kVersion}};
  }
};

inline RunManifest make_manifest(std::string command) {
  RunManifest m;
  m.command = std::move(command);
  m.tolerances = {{"verdict_slack", tol::kVerdictSlack},
                  {"boundary_equality", tol::kBoundaryEq},
                  {"rep_equivalence", tol::kRepEquiv},
                  {"cross_path", tol::kCrossPath},
                  {"bisect_z", tol::kBisectZ},
                  {"row_sum", tol::kRowSum}};
  return m;
}

/// CSV writer with the manifest as leading '#' comment lines.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void manifest(const RunManifest& m) { out_ << "# manifest " << m.to_json().dump() << "\n"; }

  void header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i)
      out_ << (i ? "," : "") << names[i];
    out_ << "\n";
  }

  void row(const std::vector<std::string>& cells) { header(cells); }

 private:
  std::ostream& out_;
};

}  // namespace polex
