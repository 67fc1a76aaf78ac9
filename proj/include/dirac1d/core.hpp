#pragma once

// Physical configuration of a single square barrier with vector (V) and
// scalar (S) coupling, plus the energy-regime bookkeeping shared by the
// rest of the library. Natural units throughout (hbar = c = 1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "errors.hpp"

namespace dirac1d {

// Relative tolerance used to decide that an energy sits on a band edge.
inline constexpr double band_edge_tolerance = 1e-9;

inline bool near_edge(double energy, double edge) {
  return std::abs(energy - edge) <= band_edge_tolerance * std::max(1.0, std::abs(edge));
}

struct EnergyInterval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double e) const { return lo <= e && e <= hi; }
  bool contains_strictly(double e) const { return lo < e && e < hi; }
};

inline EnergyInterval ordered_interval(double a, double b) {
  return a <= b ? EnergyInterval{a, b} : EnergyInterval{b, a};
}

// Uniform grid over the half-open range (lo, hi]: lo + i (hi - lo) / points
// for i = 1..points. The lower end is usually the threshold m, where the
// amplitudes are 0/0, so it is never sampled.
struct EnergyGrid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 0;

  double step() const { return (hi - lo) / static_cast<double>(points); }
  double at(std::size_t i) const {
    return lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(points);
  }
};

struct BarrierConfig {
  double V = 0.0; // vector height
  double S = 0.0; // scalar height
  double a = 1.0; // width
  double m = 1.0; // rest mass

  double v_plus() const { return V + S; }
  double v_minus() const { return V - S; }

  friend bool operator==(const BarrierConfig &, const BarrierConfig &) = default;
};

struct ConfigDiagnostics {
  // V - 2m >= S >= -V, necessary for sub-barrier full transmission.
  bool subbarrier_bound = false;
  // S == -m: the evanescent band collapses to the single point epsilon = V.
  bool collapsed_band = false;
};

struct ValidatedConfig {
  BarrierConfig config;
  ConfigDiagnostics diagnostics;
};

inline ConfigDiagnostics diagnose(const BarrierConfig &cfg) {
  ConfigDiagnostics d;
  d.subbarrier_bound = (cfg.V - 2.0 * cfg.m >= cfg.S) && (cfg.S >= -cfg.V);
  d.collapsed_band = cfg.S == -cfg.m;
  return d;
}

inline ValidatedConfig validate_config(const BarrierConfig &raw) {
  if (!(raw.a > 0.0) || !std::isfinite(raw.a))
    throw invalid_config(fmt::format("barrier width must be positive, got a = {}", raw.a));
  if (!(raw.m > 0.0) || !std::isfinite(raw.m))
    throw invalid_config(fmt::format("mass must be positive, got m = {}", raw.m));
  if (!std::isfinite(raw.V) || !std::isfinite(raw.S))
    throw invalid_config("potential heights must be finite");
  return {raw, diagnose(raw)};
}

enum class ScalarCase { above_minus_m, below_minus_m };
enum class EnergySide { above_V, below_V };
enum class Mode { oscillatory, evanescent, band_edge };

struct RegimeInfo {
  ScalarCase scalar_case = ScalarCase::above_minus_m;
  EnergySide energy_side = EnergySide::below_V;
  Mode mode = Mode::oscillatory;
  bool in_klein_zone = false;
};

// Energies where the interior momentum p is real: the closed interval with
// endpoints V -/+ (m + S), i.e. {V_minus - m, V_plus + m}.
inline EnergyInterval evanescent_band(const BarrierConfig &cfg) {
  return ordered_interval(cfg.v_minus() - cfg.m, cfg.v_plus() + cfg.m);
}

// Sub-barrier window [m, lower band edge] in which the positive-energy
// continuum outside overlaps the negative-energy continuum inside.
inline std::optional<EnergyInterval> klein_zone(const BarrierConfig &cfg) {
  const double top = std::min(cfg.v_minus() - cfg.m, cfg.v_plus() + cfg.m);
  if (top > cfg.m)
    return EnergyInterval{cfg.m, top};
  return std::nullopt;
}

inline void require_continuum(double energy, double m) {
  if (energy < m)
    throw below_continuum(fmt::format("energy {} lies below the continuum threshold m = {}", energy, m));
}

inline RegimeInfo classify_regime(const BarrierConfig &cfg, double energy) {
  require_continuum(energy, cfg.m);
  RegimeInfo info;
  // S == -m is assigned to the S > -m solution space; the band is a point.
  info.scalar_case = cfg.S + cfg.m >= 0.0 ? ScalarCase::above_minus_m : ScalarCase::below_minus_m;
  info.energy_side = energy > cfg.V ? EnergySide::above_V : EnergySide::below_V;

  const EnergyInterval band = evanescent_band(cfg);
  if (near_edge(energy, band.lo) || near_edge(energy, band.hi))
    info.mode = Mode::band_edge;
  else if (band.contains_strictly(energy))
    info.mode = Mode::evanescent;
  else
    info.mode = Mode::oscillatory;

  if (auto zone = klein_zone(cfg))
    info.in_klein_zone = zone->contains(energy);
  return info;
}

inline std::string to_string(Mode mode) {
  switch (mode) {
  case Mode::oscillatory: return "oscillatory";
  case Mode::evanescent: return "evanescent";
  case Mode::band_edge: return "band_edge";
  }
  return "?";
}

} // namespace dirac1d
