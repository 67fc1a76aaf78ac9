#pragma once

#include <stdexcept>
#include <string>

namespace dirac1d {

// Base for every error raised by the library. The CLI maps any of these to
// exit code 2 (validation error).
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Non-positive width or mass, malformed profile.
class invalid_config : public error {
public:
  using error::error;
};

// Incident energy below the free continuum (epsilon < m).
class below_continuum : public error {
public:
  using error::error;
};

// Energy sits on (or within tolerance of) an edge of the evanescent band,
// where alpha is 0/0 and the closed form degenerates. Nudge the energy.
class band_edge : public error {
public:
  double edge;
  band_edge(const std::string &what, double edge_energy)
      : error(what), edge(edge_energy) {}
};

// Energy exactly at threshold epsilon == m, where T is a 0/0 form.
class threshold : public error {
public:
  using error::error;
};

// Singular matching system. `unknown` names the worst-conditioned unknown
// ("R", "T", or "segment j").
class degenerate_energy : public error {
public:
  std::string unknown;
  degenerate_energy(const std::string &what, std::string which)
      : error(what), unknown(std::move(which)) {}
};

class no_resonance : public error {
public:
  using error::error;
};

class no_supercriticality : public error {
public:
  using error::error;
};

} // namespace dirac1d
