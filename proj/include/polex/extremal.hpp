#pragma once

#include <cmath>
#include <stdexcept>

#include "polex/bisect.hpp"
#include "polex/channel.hpp"
#include "polex/transform.hpp"

namespace polex {

namespace detail {

/// E0 in bits of a BEC through the closed form 2^{-E0} = eps(1 - 2^{-rho}) + 2^{-rho}.
inline double bec_e0(double rho, double eps) {
  const double tp = std::exp2(-rho);
  return clamp_e0(-std::log2(eps * (1.0 - tp) + tp), rho);
}

}  // namespace detail

/// Erasure probability of the BEC with the given E0 at rho (closed form).
inline double matched_bec(Rho rho, double e0_target) {
  if (rho.value <= 0.0) throw std::invalid_argument("matched_bec needs rho > 0");
  if (!(e0_target >= 0.0) || !(e0_target <= rho.value))
    throw std::invalid_argument("E0 target must lie in [0, rho]");
  const double num = std::expm1((rho.value - e0_target) * detail::kLn2);
  const double den = std::expm1(rho.value * detail::kLn2);
  return std::clamp(num / den, 0.0, 1.0);
}

/// Crossover probability of the BSC with the given E0 at rho. Solves
/// g(rho, z) = 2^{-E0} for z = 1 - 2p by bisection (g is strictly
/// decreasing for rho > 0); p = (1 - z)/2 is carried in complement space
/// so both endpoints and the steep z -> 1 region stay exact.
inline double matched_bsc(Rho rho, double e0_target) {
  if (rho.value <= 0.0) throw std::invalid_argument("matched_bsc needs rho > 0");
  if (!(e0_target >= 0.0) || !(e0_target <= rho.value))
    throw std::invalid_argument("E0 target must lie in [0, rho]");
  if (e0_target == 0.0) return 0.5;
  if (e0_target == rho.value) return 0.0;
  const double m = detail::solve_g_complement(rho.value, std::exp2(-e0_target));
  return std::clamp(0.5 * m, 0.0, 0.5);
}

/// BEC and BSC parameters matched to one E0 value at a fixed rho.
struct MatchedExtremes {
  double rho = 0.0;
  double e0_target = 0.0;  // bits
  double bec_epsilon = 0.0;
  double bsc_p = 0.0;
  double bsc_z = 0.0;  // 1 - 2 bsc_p
};

inline MatchedExtremes match_extremes(Rho rho, double e0_target) {
  MatchedExtremes m;
  m.rho = rho.value;
  m.e0_target = e0_target;
  m.bec_epsilon = matched_bec(rho, e0_target);
  m.bsc_p = matched_bsc(rho, e0_target);
  m.bsc_z = 1.0 - 2.0 * m.bsc_p;
  return m;
}

/// Orientation of the plus-side extremality inequalities. On [0,1] and
/// [2, inf) the BSC minimizes and the BEC maximizes E0(W+); on [1,2] the
/// roles swap; at rho = 1 and rho = 2 all three coincide.
enum class PlusRegime { standard, reversed, boundary };

inline PlusRegime plus_regime(double rho) {
  if (rho == 1.0 || rho == 2.0) return PlusRegime::boundary;
  if (rho > 1.0 && rho < 2.0) return PlusRegime::reversed;
  return PlusRegime::standard;
}

inline const char* to_string(PlusRegime r) {
  switch (r) {
    case PlusRegime::standard: return "standard";
    case PlusRegime::reversed: return "reversed";
    case PlusRegime::boundary: return "boundary";
  }
  return "?";
}

/// Extremality of the matched BEC/BSC pairs around one channel pair.
struct ExtremalityReport {
  double rho = 0.0;
  PlusRegime regime = PlusRegime::standard;
  double e0_w1 = 0.0, e0_w2 = 0.0;
  MatchedExtremes matched1, matched2;
  double minus_bec = 0.0, minus_actual = 0.0, minus_bsc = 0.0;
  double plus_bec = 0.0, plus_actual = 0.0, plus_bsc = 0.0;
  bool minus_lower_ok = false, minus_upper_ok = false;
  bool plus_lower_ok = false, plus_upper_ok = false;
  double boundary_dev = 0.0;  // plus-side spread, meaningful when regime == boundary
  bool boundary_ok = true;

  bool all_ok() const {
    return minus_lower_ok && minus_upper_ok && plus_lower_ok && plus_upper_ok && boundary_ok;
  }
};

inline ExtremalityReport theorem1_report(Rho rho, const Bdmc& w1, const Bdmc& w2) {
  if (rho.value <= 0.0) throw std::invalid_argument("theorem1_report needs rho > 0");
  const ZRep r1 = z_rep(w1), r2 = z_rep(w2);

  ExtremalityReport rep;
  rep.rho = rho.value;
  rep.regime = plus_regime(rho.value);
  rep.e0_w1 = e0_from_zrep(rho, r1);
  rep.e0_w2 = e0_from_zrep(rho, r2);
  rep.matched1 = match_extremes(rho, rep.e0_w1);
  rep.matched2 = match_extremes(rho, rep.e0_w2);

  const double eps1 = rep.matched1.bec_epsilon, eps2 = rep.matched2.bec_epsilon;
  const double z1 = rep.matched1.bsc_z, z2 = rep.matched2.bsc_z;

  rep.minus_actual = e0_minus_formula(rho, r1, r2);
  rep.plus_actual = e0_plus_formula(rho, r1, r2);
  rep.minus_bec = detail::bec_e0(rho.value, eps1 + eps2 - eps1 * eps2);
  rep.plus_bec = detail::bec_e0(rho.value, eps1 * eps2);
  rep.minus_bsc = detail::clamp_e0(-std::log2(g(rho.value, z1 * z2)), rho.value);
  rep.plus_bsc = detail::clamp_e0(-std::log2(h(rho.value, z1, z2)), rho.value);

  const double s = tol::kVerdictSlack;
  rep.minus_lower_ok = rep.minus_bec <= rep.minus_actual + s;
  rep.minus_upper_ok = rep.minus_actual <= rep.minus_bsc + s;
  switch (rep.regime) {
    case PlusRegime::standard:
      rep.plus_lower_ok = rep.plus_bsc <= rep.plus_actual + s;
      rep.plus_upper_ok = rep.plus_actual <= rep.plus_bec + s;
      break;
    case PlusRegime::reversed:
      rep.plus_lower_ok = rep.plus_bec <= rep.plus_actual + s;
      rep.plus_upper_ok = rep.plus_actual <= rep.plus_bsc + s;
      break;
    case PlusRegime::boundary: {
      // Both orientations hold with equality at rho = 1 and rho = 2.
      rep.boundary_dev = std::max(std::abs(rep.plus_actual - rep.plus_bec),
                                  std::abs(rep.plus_actual - rep.plus_bsc));
      rep.boundary_ok = rep.boundary_dev <= tol::kBoundaryEq;
      rep.plus_lower_ok = rep.plus_bsc <= rep.plus_actual + s && rep.plus_bec <= rep.plus_actual + s;
      rep.plus_upper_ok = rep.plus_actual <= rep.plus_bec + s && rep.plus_actual <= rep.plus_bsc + s;
      break;
    }
  }
  return rep;
}

/// Erasure probability of the BEC with the channel's capacity.
inline double capacity_matched_bec(const Bdmc& w) { return 1.0 - capacity(w); }

/// Crossover probability of the BSC with the channel's capacity,
/// solving 1 - h2(p) = I(W) by bisection on z = 1 - 2p.
inline double capacity_matched_bsc(const Bdmc& w) {
  const double target = capacity(w);
  BisectOptions opt;
  opt.x_tol = tol::kBisectZ;
  opt.f_tol = tol::kMatchResidual;
  // the capacity kernel is increasing in z = 1 - 2p, i.e. decreasing in p
  const double p = bisect_decreasing(
      [](double pp) { return detail::capacity_kernel(1.0 - 2.0 * pp); }, 0.0, 0.5, target, opt);
  return std::clamp(p, 0.0, 0.5);
}

/// Corollary on the polarization gap E0(W+) - E0(W-) for W1 = W2 = W,
/// rho in [0, 1]: the BSC gap is smallest, the BEC gap largest. At rho = 0
/// the same sandwich holds for capacities with capacity-matched extremes
/// (that variant is always evaluated).
struct Corollary1Report {
  double rho = 0.0;
  bool e0_variant_evaluated = false;
  double gap_bsc = 0.0, gap_actual = 0.0, gap_bec = 0.0;  // E0 differences, bits
  bool e0_lower_ok = true, e0_upper_ok = true;
  double igap_bsc = 0.0, igap_actual = 0.0, igap_bec = 0.0;  // capacity differences
  bool cap_lower_ok = false, cap_upper_ok = false;

  bool all_ok() const { return e0_lower_ok && e0_upper_ok && cap_lower_ok && cap_upper_ok; }
};

inline Corollary1Report corollary1_check(Rho rho, const Bdmc& w) {
  if (rho.value > 1.0)
    throw std::invalid_argument("corollary1_check needs rho in [0, 1]");
  const double s = tol::kVerdictSlack;
  const ZRep r = z_rep(w);

  Corollary1Report rep;
  rep.rho = rho.value;

  if (rho.value > 0.0) {
    const double e0 = e0_from_zrep(rho, r);
    const MatchedExtremes m = match_extremes(rho, e0);
    const double eps = m.bec_epsilon, z = m.bsc_z;
    rep.gap_actual = e0_plus_formula(rho, r, r) - e0_minus_formula(rho, r, r);
    rep.gap_bec = detail::bec_e0(rho.value, eps * eps) -
                  detail::bec_e0(rho.value, 2.0 * eps - eps * eps);
    rep.gap_bsc = -std::log2(h(rho.value, z, z)) + std::log2(g(rho.value, z * z));
    rep.e0_lower_ok = rep.gap_bsc <= rep.gap_actual + s;
    rep.e0_upper_ok = rep.gap_actual <= rep.gap_bec + s;
    rep.e0_variant_evaluated = true;
  }

  const double eps = capacity_matched_bec(w);
  const double z = 1.0 - 2.0 * capacity_matched_bsc(w);
  rep.igap_actual = capacity_from_zrep(zrep_plus(r, r)) - capacity_from_zrep(zrep_minus(r, r));
  rep.igap_bec = (1.0 - eps * eps) - (1.0 - (2.0 * eps - eps * eps));
  const double c_minus = detail::capacity_kernel(z * z);
  const double zp = std::min(1.0, 2.0 * z / (1.0 + z * z));
  const double c_plus = 0.5 * (1.0 + z * z) * detail::capacity_kernel(zp);
  rep.igap_bsc = c_plus - c_minus;
  rep.cap_lower_ok = rep.igap_bsc <= rep.igap_actual + s;
  rep.cap_upper_ok = rep.igap_actual <= rep.igap_bec + s;
  return rep;
}

/// Corollary on Z(rho, .) under one transform step, with the matched BEC
/// identities Z(rho, BEC-) = 2Z - Z^2 and Z(rho, BEC+) = Z^2. Orientation
/// on the minus side is reversed relative to E0 because Z(rho, .) is
/// decreasing in E0.
struct Corollary2Report {
  double rho = 0.0;
  PlusRegime regime = PlusRegime::standard;
  double z_w = 0.0;  // Z(rho, W), shared by the matched extremes
  double minus_bsc = 0.0, minus_actual = 0.0, minus_bec = 0.0;
  double plus_bec = 0.0, plus_actual = 0.0, plus_bsc = 0.0;
  double bec_minus_identity_dev = 0.0;  // |Z(rho, BEC-) - (2Z - Z^2)|
  double bec_plus_identity_dev = 0.0;   // |Z(rho, BEC+) - Z^2|
  bool minus_lower_ok = false, minus_upper_ok = false;
  bool plus_lower_ok = false, plus_upper_ok = false;
  bool boundary_ok = true;
  double boundary_dev = 0.0;

  bool all_ok() const {
    return minus_lower_ok && minus_upper_ok && plus_lower_ok && plus_upper_ok && boundary_ok;
  }
};

inline Corollary2Report corollary2_check(Rho rho, const Bdmc& w) {
  if (rho.value <= 0.0) throw std::invalid_argument("corollary2_check needs rho > 0");
  const ZRep r = z_rep(w);
  const ExtremalityReport t = theorem1_report(rho, w, w);

  Corollary2Report rep;
  rep.rho = rho.value;
  rep.regime = t.regime;
  rep.z_w = z_rho_from_e0(rho, t.e0_w1);
  rep.minus_actual = z_rho_from_e0(rho, t.minus_actual);
  rep.minus_bec = z_rho_from_e0(rho, t.minus_bec);
  rep.minus_bsc = z_rho_from_e0(rho, t.minus_bsc);
  rep.plus_actual = z_rho_from_e0(rho, t.plus_actual);
  rep.plus_bec = z_rho_from_e0(rho, t.plus_bec);
  rep.plus_bsc = z_rho_from_e0(rho, t.plus_bsc);

  const double zw = rep.z_w;
  rep.bec_minus_identity_dev = std::abs(rep.minus_bec - (2.0 * zw - zw * zw));
  rep.bec_plus_identity_dev = std::abs(rep.plus_bec - zw * zw);

  const double s = tol::kVerdictSlack;
  rep.minus_lower_ok = rep.minus_bsc <= rep.minus_actual + s;
  rep.minus_upper_ok = rep.minus_actual <= rep.minus_bec + s;
  switch (rep.regime) {
    case PlusRegime::standard:
      rep.plus_lower_ok = rep.plus_bec <= rep.plus_actual + s;
      rep.plus_upper_ok = rep.plus_actual <= rep.plus_bsc + s;
      break;
    case PlusRegime::reversed:
      rep.plus_lower_ok = rep.plus_bsc <= rep.plus_actual + s;
      rep.plus_upper_ok = rep.plus_actual <= rep.plus_bec + s;
      break;
    case PlusRegime::boundary:
      rep.boundary_dev = std::max(std::abs(rep.plus_actual - rep.plus_bec),
                                  std::abs(rep.plus_actual - rep.plus_bsc));
      rep.boundary_ok = rep.boundary_dev <= tol::kBoundaryEq;
      rep.plus_lower_ok = rep.plus_bec <= rep.plus_actual + s && rep.plus_bsc <= rep.plus_actual + s;
      rep.plus_upper_ok = rep.plus_actual <= rep.plus_bsc + s && rep.plus_actual <= rep.plus_bec + s;
      break;
  }
  return rep;
}

}  // namespace polex
