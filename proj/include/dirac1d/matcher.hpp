#pragma once

// General piecewise-constant matcher.
//
// Solves the 1+1 Dirac scattering problem for any sequence of constant
// (V_j, S_j) segments by building the two-component solution in every region
// from the first-order component relations
//
//   psi+' = d1 psi-,   psi-' = d2 psi+,   d1 = m + e - (V - S),  d2 = m - e + (V + S)
//
// and imposing continuity of both components at each interface. This is an
// independent route to R and T; nothing here uses the single-barrier closed
// form, so the two can be compared against each other.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "core.hpp"
#include "errors.hpp"

namespace dirac1d {

using cplx = std::complex<double>;

struct Spinor {
  cplx upper;
  cplx lower;

  friend Spinor operator+(Spinor l, Spinor r) { return {l.upper + r.upper, l.lower + r.lower}; }
  friend Spinor operator-(Spinor l, Spinor r) { return {l.upper - r.upper, l.lower - r.lower}; }
  friend Spinor operator*(cplx s, Spinor v) { return {s * v.upper, s * v.lower}; }
  double max_abs() const { return std::max(std::abs(upper), std::abs(lower)); }
};

struct SegmentPotential {
  double V = 0.0;
  double S = 0.0;
};

class PotentialProfile {
public:
  PotentialProfile(std::vector<double> boundaries, std::vector<SegmentPotential> segments, double m)
      : boundaries_(std::move(boundaries)), segments_(std::move(segments)), m_(m) {
    if (segments_.empty())
      throw invalid_config("profile needs at least one segment");
    if (boundaries_.size() != segments_.size() + 1)
      throw invalid_config(fmt::format("profile has {} segments but {} boundaries", segments_.size(), boundaries_.size()));
    for (std::size_t i = 1; i < boundaries_.size(); ++i)
      if (!(boundaries_[i] > boundaries_[i - 1]))
        throw invalid_config(fmt::format("profile boundaries must be strictly increasing (x[{}] = {}, x[{}] = {})", i - 1,
                                         boundaries_[i - 1], i, boundaries_[i]));
    if (!(m_ > 0.0))
      throw invalid_config(fmt::format("mass must be positive, got m = {}", m_));
  }

  static PotentialProfile single_barrier(const BarrierConfig &cfg) {
    return PotentialProfile({0.0, cfg.a}, {{cfg.V, cfg.S}}, cfg.m);
  }

  const std::vector<double> &boundaries() const { return boundaries_; }
  const std::vector<SegmentPotential> &segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  double mass() const { return m_; }
  double left(std::size_t j) const { return boundaries_[j]; }
  double right(std::size_t j) const { return boundaries_[j + 1]; }

private:
  std::vector<double> boundaries_;
  std::vector<SegmentPotential> segments_;
  double m_;
};

enum class BasisForm {
  upper,  // (1, +-alpha) e^{+-px}, alpha = p / d1
  lower,  // (+-beta, 1) e^{+-px}, beta = p / d2
  linear, // p -> 0 limit: (1, d2 (x - x_l)) and (d1 (x - x_l), 1)
};

enum class BasisChoice { automatic, prefer_upper, prefer_lower };

// Degenerate-basis switch: |p| * width at or below this uses the linear basis.
inline constexpr double linear_basis_threshold = 1e-8;

// Two independent solutions inside one constant region. The growing
// exponential is referenced to the right edge and the decaying one to the
// left edge so that neither exceeds unit magnitude inside the region.
struct SegmentBasis {
  cplx p;
  double d1 = 0.0;
  double d2 = 0.0;
  BasisForm form = BasisForm::upper;
  cplx ratio; // alpha for upper, beta for lower
  double x_left = 0.0;
  double x_right = 0.0;

  std::array<Spinor, 2> at(double x) const {
    if (form == BasisForm::linear)
      return {Spinor{1.0, d2 * (x - x_left)}, Spinor{d1 * (x - x_left), 1.0}};
    const cplx grow = std::exp(p * (x - x_right));
    const cplx decay = std::exp(-p * (x - x_left));
    if (form == BasisForm::upper)
      return {grow * Spinor{1.0, ratio}, decay * Spinor{1.0, -ratio}};
    return {grow * Spinor{ratio, 1.0}, decay * Spinor{-ratio, 1.0}};
  }
};

inline SegmentBasis segment_basis(double V, double S, double m, double energy, double x_left, double x_right,
                                  BasisChoice choice = BasisChoice::automatic) {
  SegmentBasis b;
  b.d1 = m + energy - (V - S);
  b.d2 = m - energy + (V + S);
  b.p = std::sqrt(cplx(b.d1 * b.d2, 0.0));
  b.x_left = x_left;
  b.x_right = x_right;

  // Unbounded exterior regions are passed with x_left == x_right.
  const double width = x_right > x_left ? x_right - x_left : 1.0;
  if (std::abs(b.p) * width <= linear_basis_threshold) {
    b.form = BasisForm::linear;
    return b;
  }
  bool upper = std::abs(b.d1) >= std::abs(b.d2);
  if (choice == BasisChoice::prefer_upper && b.d1 != 0.0)
    upper = true;
  else if (choice == BasisChoice::prefer_lower && b.d2 != 0.0)
    upper = false;
  b.form = upper ? BasisForm::upper : BasisForm::lower;
  b.ratio = upper ? b.p / b.d1 : b.p / b.d2;
  return b;
}

struct InteriorAmplitudes {
  cplx A_plus, B_plus, A_minus, B_minus;
};

struct ProfileSolution {
  double energy = 0.0;
  cplx R;
  cplx T;
  // Exterior plane waves: at(x)[0] = (1, i gamma) e^{ikx}, at(x)[1] = (1, -i gamma) e^{-ikx}.
  SegmentBasis exterior;
  std::vector<SegmentBasis> bases;
  // Coefficients of bases[j].at(x)[0] and [1].
  std::vector<std::array<cplx, 2>> amplitudes;
  double residual = 0.0;

  // Amplitudes of (1, +-alpha) e^{+-p (x - x_left)} in segment j, with
  // A- = alpha A+ and B- = -alpha B+. Empty for a linear (p ~ 0) segment.
  std::optional<InteriorAmplitudes> interior_amplitudes(std::size_t j) const {
    const SegmentBasis &b = bases.at(j);
    if (b.form == BasisForm::linear)
      return std::nullopt;
    const cplx shift = std::exp(-b.p * (b.x_right - b.x_left));
    const auto [c1, c2] = amplitudes.at(j);
    InteriorAmplitudes out;
    if (b.form == BasisForm::upper) {
      out.A_plus = c1 * shift;
      out.B_plus = c2;
    } else {
      out.A_plus = c1 * b.ratio * shift;
      out.B_plus = -b.ratio * c2;
    }
    const cplx alpha = b.form == BasisForm::upper ? b.ratio : 1.0 / b.ratio;
    out.A_minus = alpha * out.A_plus;
    out.B_minus = -alpha * out.B_plus;
    return out;
  }
};

inline Spinor evaluate_spinor(const ProfileSolution &sol, const PotentialProfile &profile, double x) {
  const auto &xs = profile.boundaries();
  if (x < xs.front()) {
    const auto w = sol.exterior.at(x);
    return w[0] + sol.R * w[1];
  }
  if (x > xs.back())
    return sol.T * sol.exterior.at(x)[0];
  std::size_t j = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  j = std::clamp<std::size_t>(j, 1, profile.size()) - 1;
  const auto w = sol.bases[j].at(x);
  return sol.amplitudes[j][0] * w[0] + sol.amplitudes[j][1] * w[1];
}

namespace detail {

// Spinor approached from the left / right of boundary b.
inline Spinor spinor_left_of(const ProfileSolution &sol, const PotentialProfile &profile, std::size_t b) {
  const double x = profile.boundaries()[b];
  if (b == 0) {
    const auto w = sol.exterior.at(x);
    return w[0] + sol.R * w[1];
  }
  const auto w = sol.bases[b - 1].at(x);
  return sol.amplitudes[b - 1][0] * w[0] + sol.amplitudes[b - 1][1] * w[1];
}

inline Spinor spinor_right_of(const ProfileSolution &sol, const PotentialProfile &profile, std::size_t b) {
  const double x = profile.boundaries()[b];
  if (b == profile.size())
    return sol.T * sol.exterior.at(x)[0];
  const auto w = sol.bases[b].at(x);
  return sol.amplitudes[b][0] * w[0] + sol.amplitudes[b][1] * w[1];
}

} // namespace detail

// Largest interface mismatch of either component, relative to the largest
// spinor component met at any interface.
inline double continuity_residual(const ProfileSolution &sol, const PotentialProfile &profile) {
  double worst = 0.0, scale = 0.0;
  for (std::size_t b = 0; b <= profile.size(); ++b) {
    const Spinor l = detail::spinor_left_of(sol, profile, b);
    const Spinor r = detail::spinor_right_of(sol, profile, b);
    worst = std::max(worst, (l - r).max_abs());
    scale = std::max({scale, l.max_abs(), r.max_abs()});
  }
  return scale > 0.0 ? worst / scale : worst;
}

inline constexpr double accepted_residual = 1e-9;

inline ProfileSolution solve_profile(const PotentialProfile &profile, double energy,
                                     BasisChoice choice = BasisChoice::automatic) {
  const double m = profile.mass();
  if (!(energy > m))
    throw threshold(fmt::format("matcher needs energy > m (got {} with m = {})", energy, m));

  const std::size_t n = profile.size();
  ProfileSolution sol;
  sol.energy = energy;
  sol.exterior = segment_basis(0.0, 0.0, m, energy, 0.0, 0.0, BasisChoice::prefer_upper);
  sol.bases.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto &seg = profile.segments()[j];
    sol.bases.push_back(segment_basis(seg.V, seg.S, m, energy, profile.left(j), profile.right(j), choice));
  }

  // Unknowns: R, (c1, c2) per segment, T. Two equations per boundary.
  const Eigen::Index size = static_cast<Eigen::Index>(2 * n + 2);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(size, size);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(size);
  const Eigen::Index last = size - 1;

  for (std::size_t b = 0; b <= n; ++b) {
    const double x = profile.boundaries()[b];
    const Eigen::Index row = static_cast<Eigen::Index>(2 * b);
    auto put = [&](Eigen::Index col, const Spinor &s, double sign) {
      A(row, col) += sign * s.upper;
      A(row + 1, col) += sign * s.lower;
    };
    if (b == 0) {
      const auto w = sol.exterior.at(x);
      put(0, w[1], 1.0);
      rhs(row) -= w[0].upper;
      rhs(row + 1) -= w[0].lower;
    } else {
      const auto w = sol.bases[b - 1].at(x);
      const Eigen::Index col = static_cast<Eigen::Index>(2 * b - 1);
      put(col, w[0], 1.0);
      put(col + 1, w[1], 1.0);
    }
    if (b == n) {
      put(last, sol.exterior.at(x)[0], -1.0);
    } else {
      const auto w = sol.bases[b].at(x);
      const Eigen::Index col = static_cast<Eigen::Index>(2 * b + 1);
      put(col, w[0], -1.0);
      put(col + 1, w[1], -1.0);
    }
  }

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  auto unknown_name = [&](Eigen::Index i) -> std::string {
    if (i == 0)
      return "R";
    if (i == last)
      return "T";
    return fmt::format("segment {}", (i - 1) / 2);
  };
  if (!(lu.rcond() > 1e-15)) {
    Eigen::Index worst = 0;
    lu.matrixLU().diagonal().cwiseAbs().minCoeff(&worst);
    throw degenerate_energy(
        fmt::format("matching system is singular at energy {} (worst unknown: {})", energy, unknown_name(worst)),
        unknown_name(worst));
  }
  const Eigen::VectorXcd z = lu.solve(rhs);
  if (!z.allFinite())
    throw degenerate_energy(fmt::format("matching system produced non-finite amplitudes at energy {}", energy), "R");

  sol.R = z(0);
  sol.T = z(last);
  sol.amplitudes.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    sol.amplitudes[j] = {z(static_cast<Eigen::Index>(2 * j + 1)), z(static_cast<Eigen::Index>(2 * j + 2))};

  sol.residual = continuity_residual(sol, profile);
  if (sol.residual > accepted_residual)
    throw degenerate_energy(fmt::format("interface residual {:.3e} exceeds {:.0e} at energy {}", sol.residual,
                                        accepted_residual, energy),
                            "residual");
  return sol;
}

} // namespace dirac1d
