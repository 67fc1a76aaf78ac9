#pragma once

// Closed-form scattering off a single square barrier.
//
// Outside the barrier the spinor is (1, i*gamma) e^{ikx}; inside it is
// (1, +alpha) A+ e^{px} + (1, -alpha) B+ e^{-px}. Matching at x = 0 and x = a
// gives, with mu = (i*gamma - alpha) / (i*gamma + alpha),
//
//   R = mu (1 - e^{2pa}) / (1 - e^{2pa} mu^2)
//   T = e^{a(p - ik)} (1 - mu^2) / (1 - e^{2pa} mu^2)
//
// The same expressions hold for both scalar cases (S > -m and S < -m) and on
// both sides of epsilon = V, because the alternative interior basis
// (beta, 1) with beta = 1/alpha is a rescaling of (1, alpha).

#include <cmath>
#include <complex>
#include <string>

#include <fmt/format.h>

#include "core.hpp"
#include "errors.hpp"

namespace dirac1d {

using cplx = std::complex<double>;

struct FreeKinematics {
  double k = 0.0;
  double gamma = 0.0;
};

struct BarrierKinematics {
  cplx p;
  cplx alpha;
  cplx mu;
};

struct ScatteringResult {
  cplx R;
  cplx T;
  cplx A_plus, B_plus;
  cplx A_minus, B_minus;
  double coef_R = 0.0;
  double coef_T = 0.0;
  double mu_sq = 0.0;

  FreeKinematics free;
  BarrierKinematics barrier;
};

struct Coefficients {
  double R2 = 0.0;
  double T2 = 0.0;
  double mu2 = 0.0;
};

namespace detail {

// e^z - 1 without cancellation for small |z|.
inline cplx expm1(cplx z) {
  const double x = z.real(), y = z.imag();
  const double s = std::sin(0.5 * y);
  const double re = std::expm1(x) * std::cos(y) - 2.0 * s * s;
  const double im = std::exp(x) * std::sin(y);
  return {re, im};
}

// The two denominators of the component relations: psi- = psi+' / d1 and
// psi+ = psi-' / d2, with p^2 = d1 * d2.
inline double upper_denominator(const BarrierConfig &cfg, double e) { return cfg.m + e - cfg.v_minus(); }
inline double lower_denominator(const BarrierConfig &cfg, double e) { return cfg.m - e + cfg.v_plus(); }

} // namespace detail

inline FreeKinematics free_kinematics(double energy, double m) {
  require_continuum(energy, m);
  return {std::sqrt((energy - m) * (energy + m)), std::sqrt((energy - m) / (energy + m))};
}

// Principal root of p^2 = (m + S)^2 - (epsilon - V)^2. The product form
// d1 * d2 is used because it does not cancel near the band edges.
inline cplx barrier_momentum(const BarrierConfig &cfg, double energy) {
  const double p2 = detail::upper_denominator(cfg, energy) * detail::lower_denominator(cfg, energy);
  return std::sqrt(cplx(p2, 0.0));
}

inline BarrierKinematics barrier_kinematics(const BarrierConfig &cfg, double energy) {
  const FreeKinematics fk = free_kinematics(energy, cfg.m);
  const double d1 = detail::upper_denominator(cfg, energy);
  const double edge = cfg.v_minus() - cfg.m;
  if (d1 == 0.0 || near_edge(energy, edge))
    throw band_edge(fmt::format("energy {} is at the band edge {} where alpha is 0/0; nudge the energy", energy, edge),
                    edge);
  BarrierKinematics bk;
  bk.p = barrier_momentum(cfg, energy);
  bk.alpha = bk.p / d1;
  // R and T do not depend on the sign of p, but mu does: mu -> 1/mu under
  // p -> -p. Taking Im(alpha) >= 0 gives |mu| <= 1, and mu = 0 exactly where
  // alpha = i*gamma.
  if (bk.alpha.imag() < 0.0) {
    bk.p = -bk.p;
    bk.alpha = -bk.alpha;
  }
  const cplx c(0.0, fk.gamma);
  if (c + bk.alpha == cplx(0.0))
    throw band_edge(fmt::format("mu is 0/0 at energy {}", energy), energy);
  bk.mu = (c - bk.alpha) / (c + bk.alpha);
  return bk;
}

inline void require_scatterable(const BarrierConfig &cfg, double energy) {
  require_continuum(energy, cfg.m);
  if (energy == cfg.m)
    throw threshold(fmt::format("energy {} is the threshold m; T is 0/0 there, probe the limit instead", energy));
  const EnergyInterval band = evanescent_band(cfg);
  for (double edge : {band.lo, band.hi})
    if (near_edge(energy, edge))
      throw band_edge(fmt::format("energy {} is at the band edge {}; nudge the energy", energy, edge), edge);
}

inline ScatteringResult scatter(const BarrierConfig &cfg, double energy) {
  require_scatterable(cfg, energy);

  ScatteringResult out;
  out.free = free_kinematics(energy, cfg.m);
  out.barrier = barrier_kinematics(cfg, energy);

  const cplx c(0.0, out.free.gamma);
  const cplx alpha = out.barrier.alpha;
  const cplx p = out.barrier.p;
  const cplx pa = p * cfg.a;
  const cplx outgoing_phase = std::exp(cplx(0.0, -out.free.k * cfg.a));

  // (1 - mu^2) and (1 - e^{2pa} mu^2) are multiplied through by (c + alpha)^2
  // so neither is formed by cancellation.
  const cplx impedance = 4.0 * c * alpha;
  const cplx mismatch = (c - alpha) * (c - alpha);
  const cplx ratio_num = (c - alpha) * (c + alpha);
  if (pa.real() > 0.0) {
    // Evanescent: scale by e^{-2pa} so nothing exponentiates a large positive argument.
    const cplx decay = std::exp(-pa);
    const cplx em = detail::expm1(-2.0 * pa);
    const cplx den = impedance * decay * decay + em * mismatch;
    out.R = ratio_num * em / den;
    out.T = decay * outgoing_phase * impedance / den;
  } else {
    const cplx em = detail::expm1(2.0 * pa);
    const cplx den = impedance - em * mismatch;
    out.R = -ratio_num * em / den;
    out.T = std::exp(pa) * outgoing_phase * impedance / den;
  }

  // The growing-exponential amplitude is exponentially small; taking it from
  // the x = a match instead of the x = 0 one avoids losing it to cancellation.
  const cplx t_out = out.T * std::exp(cplx(0.0, out.free.k * cfg.a));
  if (pa.real() > 0.0) {
    out.A_plus = t_out * std::exp(-pa) * (c + alpha) / (2.0 * alpha);
    out.B_plus = -((c - alpha) - (c + alpha) * out.R) / (2.0 * alpha);
  } else {
    out.A_plus = ((c + alpha) - (c - alpha) * out.R) / (2.0 * alpha);
    out.B_plus = t_out * std::exp(pa) * (alpha - c) / (2.0 * alpha);
  }
  out.A_minus = alpha * out.A_plus;
  out.B_minus = -alpha * out.B_plus;

  out.coef_R = std::norm(out.R);
  out.coef_T = std::norm(out.T);
  out.mu_sq = std::norm(out.barrier.mu);
  return out;
}

inline Coefficients coefficients(const BarrierConfig &cfg, double energy) {
  const ScatteringResult r = scatter(cfg, energy);
  return {r.coef_R, r.coef_T, r.mu_sq};
}

struct NudgedEnergy {
  double energy = 0.0;
  int nudges = 0;
  std::string reason; // empty when untouched
};

// Moves an energy off the threshold and the band edges in steps of
// 1e-9 (relative, at least 1e-9 absolute) until scatter() accepts it.
inline NudgedEnergy nudge_off_singular(const BarrierConfig &cfg, double energy) {
  NudgedEnergy out{energy, 0, {}};
  for (; out.nudges < 16; ++out.nudges) {
    try {
      require_scatterable(cfg, out.energy);
      return out;
    } catch (const threshold &) {
      out.reason = "threshold";
    } catch (const band_edge &) {
      out.reason = "band edge";
    }
    out.energy += band_edge_tolerance * std::max(1.0, std::abs(out.energy));
  }
  throw band_edge(fmt::format("could not move energy {} off a singular point", energy), energy);
}

} // namespace dirac1d
