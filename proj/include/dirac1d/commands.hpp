#pragma once

// Implementations behind the command-line subcommands. Each command writes
// its table to `out`, notes and warnings to `log`, and returns the process
// exit code.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "closedform.hpp"
#include "core.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "matcher.hpp"
#include "resonance.hpp"

namespace dirac1d {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_validation = 2, exit_oracle_failure = 3 };

// Malformed request (bad range, bad grid size). Maps to exit code 1.
class usage_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ScanRequest {
  System system = BarrierConfig{};
  EnergyGrid grid;
  Format format = Format::csv;
};

inline void validate_request(const ScanRequest &req) {
  const double m = system_mass(req.system);
  if (std::holds_alternative<BarrierConfig>(req.system))
    validate_config(std::get<BarrierConfig>(req.system));
  if (req.grid.points < 2)
    throw usage_error(fmt::format("need at least 2 grid points, got {}", req.grid.points));
  if (!(req.grid.lo >= m))
    throw usage_error(fmt::format("emin = {} must not lie below m = {}", req.grid.lo, m));
  if (!(req.grid.hi > req.grid.lo) || !std::isfinite(req.grid.hi))
    throw usage_error(fmt::format("emax = {} must exceed emin = {}", req.grid.hi, req.grid.lo));
}

namespace detail {

inline ProfileSolution solve_nudged(const PotentialProfile &profile, double &energy, std::string &note) {
  for (int attempt = 0;; ++attempt) {
    try {
      if (energy == profile.mass())
        throw threshold("threshold");
      return solve_profile(profile, energy);
    } catch (const error &e) {
      if (attempt >= 8)
        throw;
      note = e.what();
      energy += band_edge_tolerance * std::max(1.0, std::abs(energy));
    }
  }
}

} // namespace detail

// Rows (energy, T2, R2, mu2) for a single barrier; (energy, T2, R2) for a
// general profile, where mu is not defined.
inline Table scan_table(const ScanRequest &req, std::ostream &log) {
  validate_request(req);
  Table table;
  if (const auto *cfg = std::get_if<BarrierConfig>(&req.system)) {
    table.columns = {"energy", "T2", "R2", "mu2"};
    for (std::size_t i = 0; i < req.grid.points; ++i) {
      const double raw = req.grid.at(i);
      const NudgedEnergy e = nudge_off_singular(*cfg, raw);
      if (e.nudges > 0)
        log << fmt::format("note: energy {:.9g} is at a {}; evaluated at {:.12g}\n", raw, e.reason, e.energy);
      const Coefficients c = coefficients(*cfg, e.energy);
      table.rows.push_back({e.energy, c.T2, c.R2, c.mu2});
    }
    return table;
  }
  const auto &profile = std::get<PotentialProfile>(req.system);
  table.columns = {"energy", "T2", "R2"};
  for (std::size_t i = 0; i < req.grid.points; ++i) {
    double e = req.grid.at(i);
    std::string note;
    const ProfileSolution sol = detail::solve_nudged(profile, e, note);
    if (!note.empty())
      log << fmt::format("note: energy {:.9g} nudged to {:.12g} ({})\n", req.grid.at(i), e, note);
    table.rows.push_back({e, std::norm(sol.T), std::norm(sol.R)});
  }
  return table;
}

inline int cmd_scan(const ScanRequest &req, std::ostream &out, std::ostream &log) {
  scan_table(req, log).write(out, req.format);
  return exit_ok;
}

struct ConfirmedResonance {
  Resonance resonance;
  double R2 = 0.0;     // |R|^2 at the analytic energy (at m + 1e-8 m for zero-momentum)
  double refined = 0.0;
  bool confirmed = false;
};

// Every analytic resonance checked numerically: zero-momentum ones through the
// threshold limit, the rest by minimising |R| in a small bracket around them.
inline std::vector<ConfirmedResonance> confirmed_resonances(const BarrierConfig &cfg, double e_max) {
  validate_config(cfg);
  const ResonanceSet set = analytic_resonances(cfg, e_max);
  std::vector<ConfirmedResonance> out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Resonance &r = set[i];
    ConfirmedResonance c{r, 0.0, r.energy, false};
    if (r.zero_momentum) {
      const SupercriticalCheck check = is_supercritical(cfg);
      c.R2 = 1.0 - check.T2.back();
      c.confirmed = check.supercritical;
      out.push_back(c);
      continue;
    }
    double h = std::min(1e-3, 0.5 * (r.energy - cfg.m));
    if (i > 0)
      h = std::min(h, 0.5 * (r.energy - set[i - 1].energy));
    if (i + 1 < set.size())
      h = std::min(h, 0.5 * (set[i + 1].energy - r.energy));
    c.R2 = coefficients(cfg, nudge_off_singular(cfg, r.energy).energy).R2;
    try {
      c.refined = refine_resonance(cfg, {r.energy - h, r.energy + h});
      c.confirmed = std::abs(c.refined - r.energy) <= 1e-6 && c.R2 <= resonance_R2_tolerance;
    } catch (const no_resonance &) {
      c.confirmed = false;
    }
    out.push_back(c);
  }
  return out;
}

inline int cmd_resonances(const BarrierConfig &cfg, double e_max, Format format, std::ostream &out,
                          std::ostream &log) {
  if (!(e_max > cfg.m))
    throw usage_error(fmt::format("emax = {} must exceed m = {}", e_max, cfg.m));
  Table table;
  table.columns = {"kind", "n", "energy", "R2", "refined", "confirmed"};
  for (const ConfirmedResonance &c : confirmed_resonances(cfg, e_max)) {
    if (!c.confirmed)
      log << fmt::format("warning: resonance at {:.9g} ({}) not confirmed numerically\n", c.resonance.energy,
                         c.resonance.kind());
    table.rows.push_back({c.resonance.kind(), static_cast<long long>(c.resonance.n), c.resonance.energy, c.R2,
                          c.refined, c.confirmed});
  }
  table.write(out, format);
  return exit_ok;
}

inline int cmd_supercritical(double V, double a, double m, Format format, std::ostream &out, std::ostream &log) {
  std::vector<SupercriticalSolution> solutions;
  try {
    solutions = supercritical_scalar_strengths(V, a, m);
  } catch (const no_supercriticality &) {
    log << "no supercritical configuration (V < m)\n";
    return exit_validation;
  }
  Table table;
  table.columns = {"n", "S", "double_root", "supercritical", "T2_d1e-2", "T2_d1e-4", "T2_d1e-6", "T2_d1e-8"};
  for (const auto &sol : solutions) {
    for (double S : sol.S_values) {
      const SupercriticalCheck check = is_supercritical({V, S, a, m});
      for (const auto &note : check.notes)
        log << "note: " << note << '\n';
      std::vector<Cell> row{static_cast<long long>(sol.n), S, sol.double_root, check.supercritical};
      for (double t : check.T2)
        row.emplace_back(t);
      table.rows.push_back(std::move(row));
    }
  }
  table.write(out, format);
  return exit_ok;
}

struct SweepRequest {
  double V = 0.0, a = 1.0, m = 1.0;
  double S_from = 0.0, S_to = 0.0;
  std::size_t S_steps = 1;
  EnergyGrid grid;
  Format format = Format::csv;
};

// S_i = S_from + (S_to - S_from) i / (steps - 1). Multiplying before dividing
// keeps round values (e.g. -2.5 in -6..4 over 101 steps) exact.
inline std::vector<double> sweep_values(const SweepRequest &req) {
  if (req.S_steps < 1)
    throw usage_error("sweep needs at least one step");
  std::vector<double> out;
  for (std::size_t i = 0; i < req.S_steps; ++i)
    out.push_back(req.S_steps == 1 ? req.S_from
                                   : req.S_from + (req.S_to - req.S_from) * static_cast<double>(i) /
                                                      static_cast<double>(req.S_steps - 1));
  return out;
}

inline std::string frame_name(std::size_t i, Format format) {
  return fmt::format("frame_{:04d}.{}", i, format == Format::csv ? "csv" : "json");
}

// One scan file per S plus index.csv with (frame, S, file).
inline int cmd_sweep(const SweepRequest &req, const std::filesystem::path &dir, std::ostream &log) {
  const std::vector<double> values = sweep_values(req);
  std::filesystem::create_directories(dir);
  Table index;
  index.columns = {"frame", "S", "file"};
  for (std::size_t i = 0; i < values.size(); ++i) {
    ScanRequest scan{BarrierConfig{req.V, values[i], req.a, req.m}, req.grid, req.format};
    const std::string name = frame_name(i, req.format);
    std::ofstream file(dir / name, std::ios::binary);
    if (!file)
      throw usage_error(fmt::format("cannot write {}", (dir / name).string()));
    cmd_scan(scan, file, log);
    index.rows.push_back({static_cast<long long>(i), values[i], name});
  }
  std::ofstream idx(dir / "index.csv", std::ios::binary);
  index.write(idx, Format::csv);
  log << fmt::format("wrote {} frames to {}\n", values.size(), dir.string());
  return exit_ok;
}

inline constexpr double oracle_tolerance = 1e-8;
inline constexpr double profile_unitarity_tolerance = 1e-9;

struct OracleReport {
  bool compared = false; // false for general profiles (matcher only)
  std::size_t points = 0;
  double max_dR = 0.0;
  double max_dT = 0.0;
  double max_sum = 0.0; // max |dR| + |dT| at a single point
  double max_unitarity_closed = 0.0;
  double max_unitarity_matcher = 0.0;
  bool passed = false;
};

inline OracleReport oracle_check(const System &sys, const EnergyGrid &grid) {
  validate_request({sys, grid, Format::csv});
  OracleReport rep;
  rep.points = grid.points;
  if (const auto cfg = as_single_barrier(sys)) {
    rep.compared = true;
    const PotentialProfile profile = PotentialProfile::single_barrier(*cfg);
    for (std::size_t i = 0; i < grid.points; ++i) {
      const double e = nudge_off_singular(*cfg, grid.at(i)).energy;
      const ScatteringResult closed = scatter(*cfg, e);
      const ProfileSolution oracle = solve_profile(profile, e);
      const double dR = std::abs(closed.R - oracle.R), dT = std::abs(closed.T - oracle.T);
      rep.max_dR = std::max(rep.max_dR, dR);
      rep.max_dT = std::max(rep.max_dT, dT);
      rep.max_sum = std::max(rep.max_sum, dR + dT);
      rep.max_unitarity_closed = std::max(rep.max_unitarity_closed, std::abs(1.0 - closed.coef_R - closed.coef_T));
      rep.max_unitarity_matcher =
          std::max(rep.max_unitarity_matcher, std::abs(1.0 - std::norm(oracle.R) - std::norm(oracle.T)));
    }
    rep.passed = rep.max_sum <= oracle_tolerance && rep.max_unitarity_closed <= 1e-10;
    return rep;
  }
  const auto &profile = std::get<PotentialProfile>(sys);
  for (std::size_t i = 0; i < grid.points; ++i) {
    double e = grid.at(i);
    std::string note;
    const ProfileSolution sol = detail::solve_nudged(profile, e, note);
    rep.max_unitarity_matcher =
        std::max(rep.max_unitarity_matcher, std::abs(1.0 - std::norm(sol.R) - std::norm(sol.T)));
  }
  rep.passed = rep.max_unitarity_matcher <= profile_unitarity_tolerance;
  return rep;
}

inline int cmd_oracle_check(const System &sys, const EnergyGrid &grid, Format format, std::ostream &out,
                            std::ostream &log) {
  const OracleReport rep = oracle_check(sys, grid);
  Table table;
  table.columns = {"metric", "value"};
  table.rows.push_back({std::string("points"), static_cast<long long>(rep.points)});
  table.rows.push_back({std::string("compared_closed_form"), rep.compared});
  if (rep.compared) {
    table.rows.push_back({std::string("max_dR"), rep.max_dR});
    table.rows.push_back({std::string("max_dT"), rep.max_dT});
    table.rows.push_back({std::string("max_dR_plus_dT"), rep.max_sum});
    table.rows.push_back({std::string("max_unitarity_closed_form"), rep.max_unitarity_closed});
  } else {
    log << "note: closed form applies to a single barrier at x = 0 only; reporting matcher unitarity\n";
  }
  table.rows.push_back({std::string("max_unitarity_matcher"), rep.max_unitarity_matcher});
  table.rows.push_back({std::string("passed"), rep.passed});
  table.write(out, format);
  return rep.passed ? exit_ok : exit_oracle_failure;
}

inline int cmd_bands(const BarrierConfig &cfg, const EnergyGrid &grid, double threshold, Format format,
                     std::ostream &out) {
  validate_request({cfg, grid, format});
  Table table;
  table.columns = {"lo", "hi", "min_T2", "klein_zone"};
  for (const TransmissionBand &b : transmission_bands(cfg, grid, threshold))
    table.rows.push_back({b.interval.lo, b.interval.hi, b.min_T2, b.overlaps_klein_zone});
  table.write(out, format);
  return exit_ok;
}

} // namespace dirac1d
