#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polex {

/// Largest admissible Gallager tilting parameter. Keeps 2^{-rho} and every
/// derived quantity far away from double underflow.
inline constexpr double kRhoMax = 64.0;

namespace tol {
inline constexpr double kRowSum = 1e-12;        // channel row normalization
inline constexpr double kAtomMerge = 1e-12;     // z-atom clustering window
inline constexpr double kAtomDrop = 1e-15;      // discard atoms below this mass
inline constexpr double kRepEquiv = 1e-12;      // direct vs representation E0
inline constexpr double kCrossPath = 1e-10;     // formula vs explicit synthesis
inline constexpr double kVerdictSlack = 1e-9;   // inequality verdict slack
inline constexpr double kBoundaryEq = 1e-10;    // plus-side equality at rho = 1, 2
inline constexpr double kBisectZ = 1e-13;       // bisection interval on z
inline constexpr double kMatchResidual = 1e-11; // matched-channel E0 residual
}  // namespace tol

/// Gallager tilting parameter, validated to [0, kRhoMax].
struct Rho {
  double value = 0.0;

  Rho() = default;
  explicit Rho(double v) : value(v) {
    if (!(v >= 0.0) || !(v <= kRhoMax))
      throw std::invalid_argument("rho must be finite and in [0, " +
                                  std::to_string(kRhoMax) + "], got " +
                                  std::to_string(v));
  }
};

/// Likelihoods W(y|0), W(y|1) of one output symbol.
struct LikelihoodPair {
  double w0 = 0.0;
  double w1 = 0.0;
};

namespace detail {

inline constexpr double kLn2 = 0.6931471805599453;

inline bool is_probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

/// Compensated (Kahan) accumulator for the longer sums.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace detail

/// Binary-input DMC given by per-output likelihood pairs. Construction
/// validates that each input row sums to one within tol::kRowSum and
/// rescales the rows to sum exactly.
class Bdmc {
 public:
  explicit Bdmc(std::vector<LikelihoodPair> outputs) : outputs_(std::move(outputs)) {
    if (outputs_.empty()) throw std::invalid_argument("channel needs at least one output");
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t y = 0; y < outputs_.size(); ++y) {
      const auto& o = outputs_[y];
      if (!detail::is_probability(o.w0) || !detail::is_probability(o.w1))
        throw std::invalid_argument("output " + std::to_string(y) +
                                    ": likelihoods must lie in [0, 1]");
      s0 += o.w0;
      s1 += o.w1;
    }
    if (std::abs(s0 - 1.0) > tol::kRowSum || std::abs(s1 - 1.0) > tol::kRowSum)
      throw std::invalid_argument("channel rows must each sum to 1 within " +
                                  std::to_string(tol::kRowSum));
    for (auto& o : outputs_) {
      o.w0 /= s0;
      o.w1 /= s1;
    }
  }

  const std::vector<LikelihoodPair>& outputs() const { return outputs_; }
  std::size_t size() const { return outputs_.size(); }

 private:
  std::vector<LikelihoodPair> outputs_;
};

/// Binary erasure channel with outputs (0, 1, erasure).
inline Bdmc make_bec(double epsilon) {
  if (!detail::is_probability(epsilon))
    throw std::invalid_argument("erasure probability must lie in [0, 1]");
  return Bdmc({{1.0 - epsilon, 0.0}, {0.0, 1.0 - epsilon}, {epsilon, epsilon}});
}

/// Binary symmetric channel with crossover probability p.
inline Bdmc make_bsc(double p) {
  if (!detail::is_probability(p))
    throw std::invalid_argument("crossover probability must lie in [0, 1]");
  return Bdmc({{1.0 - p, p}, {p, 1.0 - p}});
}

/// Per-output mass q = (w0 + w1)/2 and bias delta = (w0 - w1)/(w0 + w1).
struct QDeltaEntry {
  double q = 0.0;
  double delta = 0.0;
};

struct QDelta {
  std::vector<QDeltaEntry> entries;
};

/// Channel in (q, delta) coordinates; outputs with zero mass are dropped.
/// Reconstruction: w0 = q(1 + delta), w1 = q(1 - delta).
inline QDelta q_delta(const Bdmc& channel) {
  QDelta out;
  out.entries.reserve(channel.size());
  for (const auto& o : channel.outputs()) {
    const double q = 0.5 * (o.w0 + o.w1);
    if (q <= 0.0) continue;
    const double delta = std::clamp((o.w0 - o.w1) / (o.w0 + o.w1), -1.0, 1.0);
    out.entries.push_back({q, delta});
  }
  return out;
}

/// Atom of the |delta| distribution: value z in [0, 1] with mass p.
struct ZAtom {
  double z = 0.0;
  double p = 0.0;
};

/// Discrete distribution of Z = |delta(Y)|, Y ~ q. Canonical form: atoms
/// sorted ascending in z, values within tol::kAtomMerge merged, masses
/// below tol::kAtomDrop discarded. Determines E0 for every rho.
class ZRep {
 public:
  ZRep() = default;

  explicit ZRep(std::vector<ZAtom> atoms) : atoms_(std::move(atoms)) {
    canonicalize();
    validate();
  }

  const std::vector<ZAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  double total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.p;
    return s;
  }

 private:
  // Merge window shrinks toward z = 1 where the E0 formulas have unbounded
  // sensitivity in z; this keeps the merge-induced E0 error at the
  // 1e-12 * mass level for every rho.
  static double merge_window(double z) {
    return tol::kAtomMerge * std::min(1.0, 1.0 - z);
  }

  void canonicalize() {
    std::sort(atoms_.begin(), atoms_.end(),
              [](const ZAtom& a, const ZAtom& b) { return a.z < b.z; });
    // cluster masses are compensated sums: clusters can collect millions of
    // pair-product terms and plain accumulation drifts past the mass budget
    std::vector<ZAtom> merged;
    merged.reserve(atoms_.size());
    double head = 0.0;
    detail::KahanSum cluster;
    const auto close_cluster = [&]() {
      if (!merged.empty()) merged.back().p = cluster.value();
    };
    for (const auto& a : atoms_) {
      if (!merged.empty() && a.z - head <= merge_window(head)) {
        cluster.add(a.p);
      } else {
        close_cluster();
        cluster = detail::KahanSum{};
        cluster.add(a.p);
        merged.push_back(a);
        head = a.z;
      }
    }
    close_cluster();
    atoms_.clear();
    double dropped = 0.0;
    for (const auto& a : merged) {
      if (a.p > tol::kAtomDrop)
        atoms_.push_back(a);
      else
        dropped += a.p;
    }
    if (dropped > 0.0 && !atoms_.empty()) {
      // fold the discarded mass into the heaviest atom so the total is
      // preserved exactly; thousands of sub-threshold cells would otherwise
      // leak a visible mass deficit
      std::size_t heaviest = 0;
      for (std::size_t i = 1; i < atoms_.size(); ++i)
        if (atoms_[i].p > atoms_[heaviest].p) heaviest = i;
      atoms_[heaviest].p += dropped;
    }
  }

  void validate() const {
    if (atoms_.empty()) throw std::invalid_argument("z-representation has no atoms");
    detail::KahanSum mass;
    for (const auto& a : atoms_) {
      if (!(a.z >= 0.0) || !(a.z <= 1.0))
        throw std::invalid_argument("z-atom outside [0, 1]: " + std::to_string(a.z));
      if (!(a.p >= 0.0) || !std::isfinite(a.p))
        throw std::invalid_argument("z-atom has invalid mass");
      mass.add(a.p);
    }
    if (std::abs(mass.value() - 1.0) > tol::kRowSum)
      throw std::invalid_argument("z-atom masses must sum to 1, got " +
                                  std::to_string(mass.value()));
  }

  std::vector<ZAtom> atoms_;
};

/// Z-representation of a channel: atoms |delta| with masses q.
inline ZRep z_rep(const Bdmc& channel) {
  const QDelta qd = q_delta(channel);
  std::vector<ZAtom> atoms;
  atoms.reserve(qd.entries.size());
  for (const auto& e : qd.entries) atoms.push_back({std::abs(e.delta), e.q});
  return ZRep(std::move(atoms));
}

/// Tilted binary mean g(rho, z) = ((1+z)^{1/(1+rho)}/2 + (1-z)^{1/(1+rho)}/2)^{1+rho}.
/// Defined for rho > -1; non-increasing concave in z for rho >= 0,
/// non-decreasing convex for rho in (-1, 0].
inline double g(double rho, double z) {
  if (!(rho > -1.0) || !std::isfinite(rho))
    throw std::invalid_argument("g: rho must be finite and > -1");
  if (!(z >= 0.0) || !(z <= 1.0))
    throw std::invalid_argument("g: z must lie in [0, 1], got " + std::to_string(z));
  const double a = 1.0 / (1.0 + rho);
  const double inner = 0.5 * std::pow(1.0 + z, a) + 0.5 * std::pow(1.0 - z, a);
  return std::pow(inner, 1.0 + rho);
}

namespace detail {

/// g evaluated from the complement m = 1 - z. Near z = 1 the derivative of
/// g in z is unbounded, so callers that know m more precisely than 1 - z
/// (bisection solvers, h composed through tanh) must enter here.
inline double g_from_complement(double rho, double m) {
  const double a = 1.0 / (1.0 + rho);
  const double inner = 0.5 * std::pow(2.0 - m, a) + 0.5 * std::pow(m, a);
  return std::pow(inner, 1.0 + rho);
}

/// Solves g(rho, z) = t for the complement m = 1 - z, bisecting in
/// s = m^{1/(1+rho)} where g is increasing with bounded slope on the whole
/// of [0, 1]. Plain z-space bisection can neither express the solution
/// near z = 1 (g jumps by ~1e-4 across the last representable z at
/// rho = 8) nor pin it near z = 0 where g is quadratically flat.
inline double solve_g_complement(double rho, double t) {
  const double a = 1.0 / (1.0 + rho);
  const auto g_of_s = [rho, a](double s) {
    const double m = std::pow(s, 1.0 + rho);
    const double inner = 0.5 * std::pow(2.0 - m, a) + 0.5 * s;
    return std::pow(inner, 1.0 + rho);
  };
  if (t >= 1.0) return 1.0;                           // z = 0
  if (t <= g_from_complement(rho, 0.0)) return 0.0;   // z = 1
  double lo = 0.0, hi = 1.0, mid = 0.5;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = g_of_s(mid);
    if ((hi - lo) <= 1e-15 && std::abs(fm - t) <= 1e-13) break;
    if (mid == lo || mid == hi) break;
    if (fm <= t)
      lo = mid;
    else
      hi = mid;
  }
  return std::pow(mid, 1.0 + rho);  // the complement m
}

}  // namespace detail

namespace detail {

/// Round E0 into its exact range [0, rho]; excursions are pure roundoff.
inline double clamp_e0(double e0, double rho) {
  if (e0 < 0.0 && e0 >= -tol::kRepEquiv) return 0.0;
  if (e0 > rho && e0 <= rho + tol::kRepEquiv) return rho;
  return e0;
}

}  // namespace detail

/// Gallager E0 in bits, straight from the transition probabilities.
inline double e0_direct(Rho rho, const Bdmc& channel) {
  const double a = 1.0 / (1.0 + rho.value);
  detail::KahanSum sum;
  for (const auto& o : channel.outputs()) {
    const double inner = 0.5 * std::pow(o.w0, a) + 0.5 * std::pow(o.w1, a);
    sum.add(std::pow(inner, 1.0 + rho.value));
  }
  return detail::clamp_e0(-std::log2(sum.value()), rho.value);
}

/// Gallager E0 in bits from a z-representation: -log2 E[g(rho, Z)].
inline double e0_from_zrep(Rho rho, const ZRep& rep) {
  detail::KahanSum sum;
  for (const auto& a : rep.atoms()) sum.add(a.p * g(rho.value, a.z));
  return detail::clamp_e0(-std::log2(sum.value()), rho.value);
}

namespace detail {

/// Per-output capacity kernel in bits: c(z) of a BSC with |bias| z.
inline double capacity_kernel(double z) {
  double s = 0.0;
  if (1.0 + z > 0.0) s += 0.5 * (1.0 + z) * std::log2(1.0 + z);
  if (1.0 - z > 0.0) s += 0.5 * (1.0 - z) * std::log2(1.0 - z);
  return s;
}

}  // namespace detail

/// Symmetric (uniform-input) capacity in bits, computed as the mutual
/// information sum, not via the rho -> 0 slope of E0.
inline double capacity(const Bdmc& channel) {
  detail::KahanSum sum;
  for (const auto& o : channel.outputs()) {
    const double q = 0.5 * (o.w0 + o.w1);
    if (q <= 0.0) continue;
    if (o.w0 > 0.0) sum.add(0.5 * o.w0 * std::log2(o.w0 / q));
    if (o.w1 > 0.0) sum.add(0.5 * o.w1 * std::log2(o.w1 / q));
  }
  return std::clamp(sum.value(), 0.0, 1.0);
}

/// Bound on the E0 error, in bits, induced by the atoms' z values being
/// doubles: each interior atom carries up to half an ulp of placement
/// error, amplified by |dg/dz|, which is unbounded toward z = 1. Atoms at
/// exactly 0 or 1 are placed exactly and contribute nothing. Deeply
/// polarized representations saturate double resolution; consumers that
/// compare rep-derived E0 against closed forms should treat nodes whose
/// bound exceeds their tolerance as unresolved rather than failed.
inline double e0_representation_error(Rho rho, const ZRep& rep) {
  const double a = 1.0 / (1.0 + rho.value);
  detail::KahanSum sumg;
  double err = 0.0;
  for (const auto& atom : rep.atoms()) {
    sumg.add(atom.p * g(rho.value, atom.z));
    if (atom.z <= 0.0 || atom.z >= 1.0) continue;
    const double m = 1.0 - atom.z;
    const double inner = 0.5 * std::pow(2.0 - m, a) + 0.5 * std::pow(m, a);
    const double slope = (1.0 + rho.value) * std::pow(inner, rho.value) * 0.5 * a *
                         std::abs(std::pow(m, a - 1.0) - std::pow(2.0 - m, a - 1.0));
    err += atom.p * slope * 5.6e-17;
  }
  return err / (sumg.value() * detail::kLn2);
}

/// Capacity of the channel a z-representation stands for.
inline double capacity_from_zrep(const ZRep& rep) {
  detail::KahanSum sum;
  for (const auto& a : rep.atoms()) sum.add(a.p * detail::capacity_kernel(a.z));
  return std::clamp(sum.value(), 0.0, 1.0);
}

/// Bhattacharyya parameter Z(W) = sum_y sqrt(W(y|0) W(y|1)).
inline double bhattacharyya(const Bdmc& channel) {
  detail::KahanSum sum;
  for (const auto& o : channel.outputs()) sum.add(std::sqrt(o.w0 * o.w1));
  return std::clamp(sum.value(), 0.0, 1.0);
}

/// Rho-dependent Bhattacharyya generalization from an E0 value in bits:
/// Z(rho, W) = (2^rho 2^{-E0} - 1)/(2^rho - 1). Needs rho > 0.
inline double z_rho_from_e0(Rho rho, double e0_bits) {
  if (rho.value <= 0.0)
    throw std::invalid_argument("z_rho is undefined at rho = 0");
  const double num = std::expm1((rho.value - e0_bits) * detail::kLn2);
  const double den = std::expm1(rho.value * detail::kLn2);
  return std::clamp(num / den, 0.0, 1.0);
}

inline double z_rho(Rho rho, const Bdmc& channel) {
  return z_rho_from_e0(rho, e0_direct(rho, channel));
}

/// E0, capacity, Bhattacharyya and Z(rho, .) of one channel at one rho.
struct ChannelStats {
  double e0 = 0.0;            // bits
  double capacity = 0.0;      // bits
  double bhattacharyya = 0.0;
  double z_rho = 0.0;
};

/// Needs rho > 0 (the Z(rho, .) component is undefined at rho = 0).
inline ChannelStats channel_stats(Rho rho, const Bdmc& channel) {
  ChannelStats s;
  s.e0 = e0_direct(rho, channel);
  s.capacity = capacity(channel);
  s.bhattacharyya = bhattacharyya(channel);
  s.z_rho = z_rho_from_e0(rho, s.e0);
  return s;
}

}  // namespace polex
