#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polex/channel.hpp"
#include "polex/extremal.hpp"
#include "polex/transform.hpp"

namespace polex {

inline constexpr int kMaxDepth = 24;

struct SimConfig {
  int depth = 0;
  std::vector<Rho> rho_list;
  std::size_t max_atoms = 4096;      // support cap per node
  std::optional<int> quantize_grid;  // z-grid resolution used when pruning

  void validate() const {
    if (depth < 0 || depth > kMaxDepth)
      throw std::invalid_argument("depth must lie in [0, " + std::to_string(kMaxDepth) + "]");
    if (rho_list.empty()) throw std::invalid_argument("rho_list must be non-empty");
    for (const Rho& r : rho_list)
      if (r.value <= 0.0)
        throw std::invalid_argument("polarization stats need rho > 0");
    if (max_atoms < 2) throw std::invalid_argument("max_atoms must be >= 2");
    if (quantize_grid && (*quantize_grid < 2 ||
                          static_cast<std::size_t>(*quantize_grid) > max_atoms))
      throw std::invalid_argument("quantize_grid must lie in [2, max_atoms]");
  }

  int effective_quantize_grid() const {
    if (quantize_grid) return *quantize_grid;
    return static_cast<int>(std::min<std::size_t>(4096, max_atoms));
  }
};

/// Per-rho numbers attached to a tree node. The envelope is the one-step
/// bound pair obtained from the parent's matched BEC/BSC.
struct RhoStats {
  double rho = 0.0;
  double e0 = 0.0;      // bits
  double z_rho = 0.0;
  double env_lo = 0.0;  // bits
  double env_hi = 0.0;  // bits
  double e0_err = 0.0;  // representation-error bound on e0, bits

  /// Whether the representation resolves e0 finely enough for bracketing
  /// assertions at the standard verdict slack.
  bool resolved() const { return e0_err <= 0.1 * tol::kVerdictSlack; }
};

struct TrajectoryRecord {
  std::string path;  // over {-, +}, root is ""
  int depth = 0;
  double capacity = 0.0;  // bits
  std::vector<RhoStats> per_rho;
  std::size_t atom_count = 0;
  bool pruned = false;  // this node's support was quantized
  bool exact = true;    // no pruning on this node or any ancestor
};

/// One-step E0 bounds for a child of a channel with the given E0 at rho,
/// from the parent's matched BEC/BSC (identical-copy combining). For the
/// minus child the BEC is the lower end and the BSC the upper; for the
/// plus child the orientation depends on the rho regime, so the pair is
/// returned sorted.
struct EnvelopeBounds {
  double lo = 0.0;
  double hi = 0.0;
};

inline EnvelopeBounds envelope(Rho rho, double parent_e0, char child_kind) {
  if (child_kind != '-' && child_kind != '+')
    throw std::invalid_argument("child_kind must be '-' or '+'");
  const MatchedExtremes m = match_extremes(rho, parent_e0);
  const double eps = m.bec_epsilon, z = m.bsc_z;
  if (child_kind == '-') {
    return {detail::bec_e0(rho.value, 2.0 * eps - eps * eps),
            detail::clamp_e0(-std::log2(g(rho.value, z * z)), rho.value)};
  }
  const double bec = detail::bec_e0(rho.value, eps * eps);
  const double bsc = detail::clamp_e0(-std::log2(h(rho.value, z, z)), rho.value);
  return {std::min(bec, bsc), std::max(bec, bsc)};
}

namespace detail {

/// Largest pair-product support the evolution materializes exactly before
/// switching to streamed quantization.
inline constexpr std::size_t kStreamPairBudget = std::size_t{4} << 20;

/// Mass-preserving quantization onto `grid` uniform cells: every atom moves
/// to the center of its cell, masses add up.
inline ZRep quantize_rep(const ZRep& rep, int grid) {
  std::vector<ZAtom> atoms;
  atoms.reserve(rep.size());
  for (const auto& a : rep.atoms()) {
    int cell = static_cast<int>(a.z * grid);
    if (cell >= grid) cell = grid - 1;
    atoms.push_back({(cell + 0.5) / grid, a.p});
  }
  return ZRep(std::move(atoms));
}

/// One identical-copy transform step with the pair products deposited
/// straight onto the quantization grid. Used when materializing the
/// n(2n) pair atoms would blow the memory budget; the result equals
/// quantize_rep applied to the exact evolution up to summation order.
inline ZRep evolve_quantized(const ZRep& r, char kind, int grid) {
  // compensated per-cell accumulation: a cell can receive millions of
  // deposits and plain summation would leak ~1e-9 of mass
  std::vector<KahanSum> mass(static_cast<std::size_t>(grid));
  const auto deposit = [&mass, grid](double z, double p) {
    int cell = static_cast<int>(z * grid);
    if (cell >= grid) cell = grid - 1;
    mass[static_cast<std::size_t>(cell)].add(p);
  };
  for (const auto& a : r.atoms())
    for (const auto& b : r.atoms()) {
      if (kind == '-') {
        deposit(a.z * b.z, a.p * b.p);
        continue;
      }
      const double prod = a.z * b.z;
      const double m = a.p * b.p;
      deposit(std::min(1.0, (a.z + b.z) / (1.0 + prod)), m * 0.5 * (1.0 + prod));
      if (prod < 1.0)
        deposit(std::min(1.0, std::abs(a.z - b.z) / (1.0 - prod)), m * 0.5 * (1.0 - prod));
    }
  std::vector<ZAtom> atoms;
  for (int cell = 0; cell < grid; ++cell)
    if (mass[static_cast<std::size_t>(cell)].value() > 0.0)
      atoms.push_back({(cell + 0.5) / grid, mass[static_cast<std::size_t>(cell)].value()});
  return ZRep(std::move(atoms));
}

}  // namespace detail

/// Full polarization tree of depth config.depth for identical-copy
/// combining, evolved in z-representation space. Nodes are emitted in
/// breadth-first order with the '-' child before the '+' child. When a
/// node's support would exceed config.max_atoms it is quantized (the
/// pruning policy) and the node, with all its descendants, loses the
/// `exact` flag; oracle-grade comparisons should restrict to exact nodes.
inline std::vector<TrajectoryRecord> polarize_tree(const Bdmc& w, const SimConfig& config) {
  config.validate();

  struct Node {
    ZRep rep;
    bool pruned = false;
    bool exact = true;
  };

  std::vector<TrajectoryRecord> records;
  records.reserve((std::size_t{2} << config.depth) - 1);

  std::vector<Node> level;
  level.push_back({z_rep(w), false, true});
  std::vector<std::string> paths{""};

  for (int d = 0; d <= config.depth; ++d) {
    // emit records for this level
    for (std::size_t i = 0; i < level.size(); ++i) {
      const Node& node = level[i];
      TrajectoryRecord rec;
      rec.path = paths[i];
      rec.depth = d;
      rec.capacity = capacity_from_zrep(node.rep);
      rec.atom_count = node.rep.size();
      rec.pruned = node.pruned;
      rec.exact = node.exact;
      for (const Rho& rho : config.rho_list) {
        RhoStats s;
        s.rho = rho.value;
        s.e0 = e0_from_zrep(rho, node.rep);
        s.z_rho = z_rho_from_e0(rho, s.e0);
        s.e0_err = e0_representation_error(rho, node.rep);
        s.env_lo = s.env_hi = s.e0;  // root bracket; children overwritten below
        rec.per_rho.push_back(s);
      }
      records.push_back(std::move(rec));
    }
    if (d == config.depth) break;

    // evolve to the next level
    std::vector<Node> next;
    next.reserve(level.size() * 2);
    std::vector<std::string> next_paths;
    next_paths.reserve(level.size() * 2);
    for (std::size_t i = 0; i < level.size(); ++i) {
      const std::size_t n = level[i].rep.size();
      for (char kind : {'-', '+'}) {
        Node child;
        child.exact = level[i].exact;
        const std::size_t raw = (kind == '-' ? 1 : 2) * n * n;
        if (raw > detail::kStreamPairBudget) {
          child.rep = detail::evolve_quantized(level[i].rep, kind,
                                               config.effective_quantize_grid());
          child.pruned = true;
          child.exact = false;
        } else {
          child.rep = kind == '-' ? zrep_minus(level[i].rep, level[i].rep)
                                  : zrep_plus(level[i].rep, level[i].rep);
          if (child.rep.size() > config.max_atoms) {
            child.rep = detail::quantize_rep(child.rep, config.effective_quantize_grid());
            child.pruned = true;
            child.exact = false;
          }
        }
        next.push_back(std::move(child));
        next_paths.push_back(paths[i] + kind);
      }
    }
    level = std::move(next);
    paths = std::move(next_paths);
  }

  // envelopes: child records pull bounds from their parent's recorded E0
  for (std::size_t i = 1; i < records.size(); ++i) {
    TrajectoryRecord& rec = records[i];
    const std::size_t parent = (i - 1) / 2;
    const char kind = rec.path.back();
    for (std::size_t k = 0; k < config.rho_list.size(); ++k) {
      const EnvelopeBounds b =
          envelope(config.rho_list[k], records[parent].per_rho[k].e0, kind);
      rec.per_rho[k].env_lo = b.lo;
      rec.per_rho[k].env_hi = b.hi;
    }
  }
  return records;
}

/// Closed-form erasure-probability recursion for a BEC tree: the minus
/// child of BEC(e) is BEC(2e - e^2) and the plus child BEC(e^2). Emitted
/// in the same breadth-first order as polarize_tree; exact oracle for BEC
/// inputs.
inline std::vector<std::pair<std::string, double>> bec_recursion(double epsilon, int depth) {
  if (!detail::is_probability(epsilon))
    throw std::invalid_argument("erasure probability must lie in [0, 1]");
  if (depth < 0 || depth > kMaxDepth) throw std::invalid_argument("depth out of range");
  std::vector<std::pair<std::string, double>> out;
  out.push_back({"", epsilon});
  std::size_t level_begin = 0;
  for (int d = 0; d < depth; ++d) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      const auto [path, eps] = out[i];
      out.push_back({path + '-', 2.0 * eps - eps * eps});
      out.push_back({path + '+', eps * eps});
    }
    level_begin = level_end;
  }
  return out;
}

/// Per-internal-node one-step conservation checks at a fixed rho:
/// capacity martingale I(node-) + I(node+) = 2 I(node) and E0 submartingale
/// E0(node-) + E0(node+) >= 2 E0(node). Only nodes whose children evolved
/// without pruning are asserted; the rest are reported unasserted.
struct MartingaleNode {
  std::string path;
  double cap_residual = 0.0;  // I(-) + I(+) - 2 I(node)
  double e0_gap = 0.0;        // E0(-) + E0(+) - 2 E0(node)
  bool asserted = true;
  bool cap_ok = true;
  bool e0_ok = true;
};

struct MartingaleReport {
  double rho = 0.0;
  std::vector<MartingaleNode> nodes;
  bool all_ok = true;
  double worst_cap_residual = 0.0;  // |residual|, asserted nodes only
  double worst_e0_gap = 0.0;        // most negative gap, asserted nodes only
};

inline MartingaleReport martingale_check(const std::vector<TrajectoryRecord>& records,
                                         Rho rho) {
  MartingaleReport report;
  report.rho = rho.value;
  if (records.empty()) return report;

  std::size_t rho_idx = records[0].per_rho.size();
  for (std::size_t k = 0; k < records[0].per_rho.size(); ++k)
    if (records[0].per_rho[k].rho == rho.value) rho_idx = k;
  if (rho_idx == records[0].per_rho.size())
    throw std::invalid_argument("rho not present in the trajectory records");

  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::size_t minus = 2 * i + 1, plus = 2 * i + 2;
    if (plus >= records.size()) break;  // leaves
    MartingaleNode node;
    node.path = records[i].path;
    node.cap_residual =
        records[minus].capacity + records[plus].capacity - 2.0 * records[i].capacity;
    node.e0_gap = records[minus].per_rho[rho_idx].e0 + records[plus].per_rho[rho_idx].e0 -
                  2.0 * records[i].per_rho[rho_idx].e0;
    node.asserted = !records[minus].pruned && !records[plus].pruned;
    if (node.asserted) {
      node.cap_ok = std::abs(node.cap_residual) <= tol::kVerdictSlack;
      node.e0_ok = node.e0_gap >= -tol::kVerdictSlack;
      report.all_ok = report.all_ok && node.cap_ok && node.e0_ok;
      report.worst_cap_residual =
          std::max(report.worst_cap_residual, std::abs(node.cap_residual));
      report.worst_e0_gap = std::min(report.worst_e0_gap, node.e0_gap);
    }
    report.nodes.push_back(std::move(node));
  }
  return report;
}

}  // namespace polex
