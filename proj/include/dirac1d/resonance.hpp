#pragma once

// Transmission resonances, zero-momentum (supercritical) configurations and
// high-transmission bands of a single square barrier.
//
// |R| vanishes where either e^{2pa} = 1, i.e. p = i n pi / a, giving
//   epsilon_n = V +- sqrt((S + m)^2 + (n pi / a)^2),   n = 1, 2, ...
// or where mu = 0, which happens once at epsilon_0 = -(V / S) m for 0 > S >= -V.
// A resonance sitting at epsilon = m is a zero-momentum resonance.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "closedform.hpp"
#include "core.hpp"
#include "errors.hpp"

namespace dirac1d {

// Two resonance energies closer than this are reported once.
inline constexpr double resonance_merge_tolerance = 1e-9;

struct Resonance {
  double energy = 0.0;
  // A merged resonance can carry several tags at once.
  bool oscillation = false;
  int n = 0;        // index of the oscillation condition, 0 if not oscillation
  int branch = 0;   // +1 / -1 for V +- sqrt(...), 0 if not oscillation
  bool mu_zero = false;
  bool zero_momentum = false;

  std::string kind() const {
    std::string out;
    auto add = [&](std::string_view tag) {
      if (!out.empty())
        out += '+';
      out += tag;
    };
    if (oscillation)
      add("oscillation");
    if (mu_zero)
      add("mu_zero");
    if (zero_momentum)
      add("zero_momentum");
    return out;
  }
};

using ResonanceSet = std::vector<Resonance>;

inline double oscillation_energy(const BarrierConfig &cfg, int n, int branch) {
  const double q = n * std::numbers::pi / cfg.a;
  return cfg.V + branch * std::hypot(cfg.S + cfg.m, q);
}

// Interior-phase and impedance-match resonances in [m, e_max], ascending.
inline ResonanceSet analytic_resonances(const BarrierConfig &cfg, double e_max) {
  const double m = cfg.m;
  const double floor_tol = resonance_merge_tolerance * std::max(1.0, m);
  std::vector<Resonance> raw;

  // sqrt((S+m)^2 + q_n^2) grows with n; stop once neither branch can land in range.
  const double reach = std::max(e_max - cfg.V, cfg.V - m);
  for (int n = 1;; ++n) {
    const double radius = std::hypot(cfg.S + m, n * std::numbers::pi / cfg.a);
    if (radius > reach + floor_tol)
      break;
    for (int branch : {+1, -1}) {
      const double e = cfg.V + branch * radius;
      if (e >= m - floor_tol && e <= e_max)
        raw.push_back({e, true, n, branch, false, false});
    }
  }

  if (cfg.S < 0.0 && cfg.S >= -cfg.V) {
    const double e0 = -(cfg.V / cfg.S) * m;
    if (e0 >= m - floor_tol && e0 <= e_max) {
      Resonance r;
      r.energy = e0;
      r.mu_zero = true;
      raw.push_back(r);
    }
  }

  std::sort(raw.begin(), raw.end(), [](const Resonance &l, const Resonance &r) { return l.energy < r.energy; });
  ResonanceSet merged;
  for (const Resonance &r : raw) {
    if (!merged.empty() && std::abs(merged.back().energy - r.energy) <= resonance_merge_tolerance * std::max(1.0, std::abs(r.energy))) {
      Resonance &into = merged.back();
      if (r.oscillation && !into.oscillation) {
        into.oscillation = true;
        into.n = r.n;
        into.branch = r.branch;
      }
      into.mu_zero = into.mu_zero || r.mu_zero;
      continue;
    }
    merged.push_back(r);
  }
  for (Resonance &r : merged) {
    if (std::abs(r.energy - m) <= floor_tol) {
      r.zero_momentum = true;
      r.energy = m;
    }
  }
  return merged;
}

inline constexpr double resonance_R2_tolerance = 1e-10;

// Locates the minimum of |R| inside the bracket by golden-section search and
// accepts it as a resonance if |R|^2 <= 1e-10 there. |R| has the same
// minimiser as |R|^2 but is V-shaped rather than flat at a zero, which lets
// the search resolve the position to ~1e-12.
inline double refine_resonance(const BarrierConfig &cfg, EnergyInterval bracket) {
  if (!(bracket.lo < bracket.hi) || bracket.lo < cfg.m)
    throw invalid_config(fmt::format("bad resonance bracket [{}, {}]", bracket.lo, bracket.hi));
  auto reflect = [&](double e) {
    try {
      return std::abs(scatter(cfg, e).R);
    } catch (const error &) {
      return std::abs(scatter(cfg, nudge_off_singular(cfg, e).energy).R);
    }
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = bracket.lo, hi = bracket.hi;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = reflect(x1), f2 = reflect(x2);
  while (hi - lo > 1e-13 * std::max(1.0, std::abs(hi))) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = reflect(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = reflect(x2);
    }
  }
  const double best = f1 <= f2 ? x1 : x2;
  const double best_r = std::min(f1, f2);
  if (best_r * best_r > resonance_R2_tolerance)
    throw no_resonance(fmt::format("no resonance in [{}, {}]: min |R|^2 = {:.3e} at {}", bracket.lo, bracket.hi,
                                   best_r * best_r, best));
  return best;
}

struct SupercriticalSolution {
  int n = 0;
  std::vector<double> S_values;
  bool double_root = false;
};

// Scalar strengths giving a resonance at epsilon = m: S = -V for n = 0, and
// S = -m +- sqrt((V - m)^2 - (n pi / a)^2) for 1 <= n <= (a / pi)(V - m).
// When (a / pi)(V - m) is an integer the last n has a zero radicand and its
// double root S = -m is reported once.
inline std::vector<SupercriticalSolution> supercritical_scalar_strengths(double V, double a, double m) {
  if (!(a > 0.0) || !(m > 0.0))
    throw invalid_config(fmt::format("need a > 0 and m > 0 (got a = {}, m = {})", a, m));
  if (V < m)
    throw no_supercriticality(fmt::format("no supercritical configuration: V = {} is below m = {}", V, m));

  std::vector<SupercriticalSolution> out;
  out.push_back({0, {-V}, false});
  const double span = (V - m) * a / std::numbers::pi;
  const int n_max = static_cast<int>(std::floor(span + 1e-12));
  for (int n = 1; n <= n_max; ++n) {
    const double q = n * std::numbers::pi / a;
    const double radicand = (V - m) * (V - m) - q * q;
    const double scale = std::max(1.0, (V - m) * (V - m));
    if (radicand <= 1e-12 * scale) {
      out.push_back({n, {-m}, true});
      continue;
    }
    const double root = std::sqrt(radicand);
    out.push_back({n, {-m + root, -m - root}, false});
  }
  return out;
}

struct SupercriticalCheck {
  bool supercritical = false;
  std::vector<double> deltas;
  std::vector<double> T2;
  std::vector<std::string> notes;
};

inline constexpr double supercritical_cutoff = 0.99;

// Probes |T(m + delta)|^2 for delta = 1e-2, 1e-4, 1e-6, 1e-8. Supercritical
// means the sequence rises monotonically and ends at or above 0.99.
inline SupercriticalCheck is_supercritical(const BarrierConfig &cfg) {
  validate_config(cfg);
  SupercriticalCheck out;
  for (double delta : {1e-2, 1e-4, 1e-6, 1e-8}) {
    double d = delta;
    for (int shifts = 0; shifts < 4; ++shifts) {
      try {
        require_scatterable(cfg, cfg.m + d * cfg.m);
        break;
      } catch (const band_edge &) {
        out.notes.push_back(fmt::format("delta {:.0e} hits a band edge; using {:.0e}", d, d / 10.0));
        d /= 10.0;
      }
    }
    out.deltas.push_back(d);
    out.T2.push_back(coefficients(cfg, cfg.m + d * cfg.m).T2);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < out.T2.size(); ++i)
    monotone = monotone && out.T2[i] >= out.T2[i - 1] - 1e-12;
  out.supercritical = monotone && out.T2.back() >= supercritical_cutoff;
  return out;
}

struct TransmissionBand {
  EnergyInterval interval;
  double min_T2 = 0.0;
  bool overlaps_klein_zone = false;
  bool inside_klein_zone = false;
};

inline constexpr int band_edge_bisections = 6;

// Maximal runs of grid points with |T|^2 >= threshold. Each edge is refined
// by bisection against the neighbouring grid point to step / 2^6 and the
// reported edge is the last point known to satisfy the threshold.
// `transmission` maps an energy to |T|^2.
template <class Transmission>
std::vector<TransmissionBand> transmission_bands(const EnergyGrid &grid, double threshold, Transmission &&transmission,
                                                 std::optional<EnergyInterval> klein = std::nullopt) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw invalid_config(fmt::format("band threshold must lie in (0, 1), got {}", threshold));
  if (grid.points < 1 || !(grid.hi > grid.lo))
    throw invalid_config("empty energy grid");

  std::vector<double> t2(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i)
    t2[i] = transmission(grid.at(i));

  auto refine = [&](double inside, double outside) {
    for (int k = 0; k < band_edge_bisections; ++k) {
      const double mid = 0.5 * (inside + outside);
      (transmission(mid) >= threshold ? inside : outside) = mid;
    }
    return inside;
  };

  std::vector<TransmissionBand> bands;
  std::size_t i = 0;
  while (i < grid.points) {
    if (t2[i] < threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double lowest = t2[i];
    while (j + 1 < grid.points && t2[j + 1] >= threshold)
      lowest = std::min(lowest, t2[++j]);
    TransmissionBand band;
    band.interval.lo = i > 0 ? refine(grid.at(i), grid.at(i - 1)) : grid.at(i);
    band.interval.hi = j + 1 < grid.points ? refine(grid.at(j), grid.at(j + 1)) : grid.at(j);
    band.min_T2 = lowest;
    if (klein) {
      band.overlaps_klein_zone = band.interval.lo < klein->hi && band.interval.hi > klein->lo;
      band.inside_klein_zone = klein->contains(band.interval.lo) && klein->contains(band.interval.hi);
    }
    bands.push_back(band);
    i = j + 1;
  }
  return bands;
}

inline std::vector<TransmissionBand> transmission_bands(const BarrierConfig &cfg, const EnergyGrid &grid,
                                                        double threshold) {
  if (grid.lo < cfg.m)
    throw below_continuum(fmt::format("grid starts at {} below m = {}", grid.lo, cfg.m));
  auto t2 = [&](double e) { return coefficients(cfg, nudge_off_singular(cfg, e).energy).T2; };
  return transmission_bands(grid, threshold, t2, klein_zone(cfg));
}

} // namespace dirac1d
