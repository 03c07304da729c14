#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "polex/channel.hpp"

namespace polex {

/// Channel combining: W-(y1 y2 | u1) = sum_{u2} (1/2) W1(y1 | u1^u2) W2(y2 | u2).
/// Output alphabet is the full product Y1 x Y2, row-major in (y1, y2).
inline Bdmc minus_synth(const Bdmc& w1, const Bdmc& w2) {
  std::vector<LikelihoodPair> out;
  out.reserve(w1.size() * w2.size());
  for (const auto& a : w1.outputs())
    for (const auto& b : w2.outputs())
      out.push_back({0.5 * (a.w0 * b.w0 + a.w1 * b.w1),
                     0.5 * (a.w1 * b.w0 + a.w0 * b.w1)});
  return Bdmc(std::move(out));
}

/// Channel splitting: W+(y1 y2 u1 | u2) = (1/2) W1(y1 | u1^u2) W2(y2 | u2).
/// Output alphabet is Y1 x Y2 x {0, 1}, row-major in (y1, y2, u1).
inline Bdmc plus_synth(const Bdmc& w1, const Bdmc& w2) {
  std::vector<LikelihoodPair> out;
  out.reserve(2 * w1.size() * w2.size());
  for (const auto& a : w1.outputs())
    for (const auto& b : w2.outputs()) {
      out.push_back({0.5 * a.w0 * b.w0, 0.5 * a.w1 * b.w1});  // u1 = 0
      out.push_back({0.5 * a.w1 * b.w0, 0.5 * a.w0 * b.w1});  // u1 = 1
    }
  return Bdmc(std::move(out));
}

/// Both one-step transforms of a channel pair.
struct PolarPair {
  Bdmc minus;
  Bdmc plus;
};

inline PolarPair polarize_pair(const Bdmc& w1, const Bdmc& w2) {
  return {minus_synth(w1, w2), plus_synth(w1, w2)};
}

namespace detail {

/// Plus-transform kernel in complement coordinates m_i = 1 - z_i. The two
/// g arguments are formed through the factorizations
///   1 - (z1+z2)/(1+z1z2)  = m1 m2 / (1+z1z2)
///   1 - (z1-z2)/(1-z1z2)  = m1 (2-m2) / (1-z1z2)   (z1 >= z2)
/// which stay accurate where the subtractive forms cancel (z1 z2 -> 1).
inline double h_from_complements(double rho, double m1, double m2) {
  if (m1 > m2) std::swap(m1, m2);  // symmetric; fixes the evaluation order
  const double a = 1.0 / (1.0 + rho);
  const double z1 = 1.0 - m1;
  const double pm = std::max(0.0, m1 + z1 * m2);  // 1 - z1 z2
  const double pp = 2.0 - pm;                     // 1 + z1 z2

  const double inner1 =
      0.5 * std::pow((2.0 - m1) * (2.0 - m2) / pp, a) + 0.5 * std::pow(m1 * m2 / pp, a);
  double value = 0.5 * pp * std::pow(inner1, 1.0 + rho);
  if (pm > 0.0) {
    const double inner2 = 0.5 * std::pow((2.0 - m1) * m2 / pm, a) +
                          0.5 * std::pow(m1 * (2.0 - m2) / pm, a);
    value += 0.5 * pm * std::pow(inner2, 1.0 + rho);
  }
  return value;
}

}  // namespace detail

/// Plus-transform kernel
///   h(rho, z1, z2) = (1+z1z2)/2 g(rho, (z1+z2)/(1+z1z2))
///                  + (1-z1z2)/2 g(rho, |z1-z2|/(1-z1z2)),
/// symmetric in (z1, z2), with the second term defined as 0 when z1z2 = 1
/// (its weight vanishes and g stays bounded). Range [2^{-rho}, 1].
inline double h(double rho, double z1, double z2) {
  if (!(z1 >= 0.0) || !(z1 <= 1.0) || !(z2 >= 0.0) || !(z2 <= 1.0))
    throw std::invalid_argument("h: z1, z2 must lie in [0, 1]");
  if (!(rho > -1.0) || !std::isfinite(rho))
    throw std::invalid_argument("h: rho must be finite and > -1");
  return detail::h_from_complements(rho, 1.0 - z1, 1.0 - z2);
}

/// E0 of the minus transform from the factors' z-representations:
/// -log2 E[g(rho, Z1 Z2)].
inline double e0_minus_formula(Rho rho, const ZRep& r1, const ZRep& r2) {
  detail::KahanSum sum;
  for (const auto& a : r1.atoms())
    for (const auto& b : r2.atoms()) sum.add(a.p * b.p * g(rho.value, a.z * b.z));
  return detail::clamp_e0(-std::log2(sum.value()), rho.value);
}

/// E0 of the plus transform from the factors' z-representations:
/// -log2 E[h(rho, Z1, Z2)].
inline double e0_plus_formula(Rho rho, const ZRep& r1, const ZRep& r2) {
  detail::KahanSum sum;
  for (const auto& a : r1.atoms())
    for (const auto& b : r2.atoms()) sum.add(a.p * b.p * h(rho.value, a.z, b.z));
  return detail::clamp_e0(-std::log2(sum.value()), rho.value);
}

/// Z-representation of the minus transform: atoms z1*z2, masses p1*p2.
inline ZRep zrep_minus(const ZRep& r1, const ZRep& r2) {
  std::vector<ZAtom> atoms;
  atoms.reserve(r1.size() * r2.size());
  for (const auto& a : r1.atoms())
    for (const auto& b : r2.atoms()) atoms.push_back({a.z * b.z, a.p * b.p});
  return ZRep(std::move(atoms));
}

/// Z-representation of the plus transform. Each atom pair contributes
/// (z1+z2)/(1+z1z2) with mass p1p2(1+z1z2)/2 and |z1-z2|/(1-z1z2) with
/// mass p1p2(1-z1z2)/2; the second atom is omitted when z1z2 = 1.
inline ZRep zrep_plus(const ZRep& r1, const ZRep& r2) {
  std::vector<ZAtom> atoms;
  atoms.reserve(2 * r1.size() * r2.size());
  for (const auto& a : r1.atoms())
    for (const auto& b : r2.atoms()) {
      const double prod = a.z * b.z;
      const double m = a.p * b.p;
      atoms.push_back({std::min(1.0, (a.z + b.z) / (1.0 + prod)), m * 0.5 * (1.0 + prod)});
      if (prod < 1.0)
        atoms.push_back(
            {std::min(1.0, std::abs(a.z - b.z) / (1.0 - prod)), m * 0.5 * (1.0 - prod)});
    }
  return ZRep(std::move(atoms));
}

/// E0 ordering across one transform step: E0(W-) <= E0(Wi) <= E0(W+).
struct OrderingReport {
  double rho = 0.0;
  double e0_minus = 0.0;
  double e0_w1 = 0.0;
  double e0_w2 = 0.0;
  double e0_plus = 0.0;
  bool w1_lower_ok = false;
  bool w1_upper_ok = false;
  bool w2_lower_ok = false;
  bool w2_upper_ok = false;

  bool all_ok() const { return w1_lower_ok && w1_upper_ok && w2_lower_ok && w2_upper_ok; }
};

inline OrderingReport check_ordering(Rho rho, const Bdmc& w1, const Bdmc& w2) {
  const ZRep r1 = z_rep(w1), r2 = z_rep(w2);
  OrderingReport rep;
  rep.rho = rho.value;
  rep.e0_minus = e0_minus_formula(rho, r1, r2);
  rep.e0_w1 = e0_from_zrep(rho, r1);
  rep.e0_w2 = e0_from_zrep(rho, r2);
  rep.e0_plus = e0_plus_formula(rho, r1, r2);
  const double s = tol::kVerdictSlack;
  rep.w1_lower_ok = rep.e0_minus <= rep.e0_w1 + s;
  rep.w1_upper_ok = rep.e0_w1 <= rep.e0_plus + s;
  rep.w2_lower_ok = rep.e0_minus <= rep.e0_w2 + s;
  rep.w2_upper_ok = rep.e0_w2 <= rep.e0_plus + s;
  return rep;
}

/// One-step E0 sum inequality: E0(W+) + E0(W-) >= E0(W1) + E0(W2).
struct SubmartingaleReport {
  double rho = 0.0;
  double children_sum = 0.0;  // E0(W+) + E0(W-)
  double parents_sum = 0.0;   // E0(W1) + E0(W2)
  bool ok = false;
};

inline SubmartingaleReport check_submartingale(Rho rho, const Bdmc& w1, const Bdmc& w2) {
  const ZRep r1 = z_rep(w1), r2 = z_rep(w2);
  SubmartingaleReport rep;
  rep.rho = rho.value;
  rep.children_sum = e0_plus_formula(rho, r1, r2) + e0_minus_formula(rho, r1, r2);
  rep.parents_sum = e0_from_zrep(rho, r1) + e0_from_zrep(rho, r2);
  rep.ok = rep.children_sum >= rep.parents_sum - tol::kVerdictSlack;
  return rep;
}

}  // namespace polex
