#pragma once

#include "sbam/error.hpp"
#include "sbam/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sbam {

enum class ConstraintKind { Cartesian, Cylindrical, Symbolic };

inline std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::Cartesian: return "cartesian";
    case ConstraintKind::Cylindrical: return "cylindrical";
    case ConstraintKind::Symbolic: return "symbolic";
  }
  return "unknown";
}

inline ConstraintKind parse_constraint_kind(std::string_view s) {
  if (s == "cartesian" || s == "caac") return ConstraintKind::Cartesian;
  if (s == "cylindrical" || s == "cyac") return ConstraintKind::Cylindrical;
  if (s == "symbolic" || s == "ssac") return ConstraintKind::Symbolic;
  throw InputError("unknown constraint kind '" + std::string(s) + "'");
}

/// One symbolic spatial constraint: Gaussian in radius and elevation, von Mises in azimuth.
/// Lengths in mm, variances in mm^2, mu_phi in rad.
struct SymbolicConstraintDef {
  std::string name;
  double mu_rho = 0.0;
  double var_rho = 1.0;
  double mu_phi = 0.0;
  double kappa_phi = 1.0;
  double mu_z = 0.0;
  double var_z = 1.0;

  void validate() const {
    if (!(var_rho > 0.0)) throw InputError("symbolic constraint '" + name + "': var_rho must be > 0");
    if (!(var_z > 0.0)) throw InputError("symbolic constraint '" + name + "': var_z must be > 0");
    if (!(kappa_phi > 0.0)) throw InputError("symbolic constraint '" + name + "': kappa_phi must be > 0");
  }

  bool operator==(const SymbolicConstraintDef&) const = default;
};

/// The eight constraints used for the pouring and rolling evaluations. Azimuth means are
/// stored wrapped into (-pi, pi].
inline std::vector<SymbolicConstraintDef> default_symbolic_defs() {
  return {
      {"above", 0.0, 250.0, 0.0, 1e-5, 250.0, 100.0},
      {"below", 0.0, 250.0, 0.0, 1e-5, -250.0, 100.0},
      {"close", 0.0, 100.0, 0.0, 1e-5, 0.0, 250.0},
      {"far away", 500.0, 100.0, 0.0, 1e-5, 0.0, 250.0},
      {"in front", 0.0, 250.0, wrap_angle(1.5 * M_PI), 5.0, 0.0, 250.0},
      {"behind", 0.0, 250.0, wrap_angle(0.5 * M_PI), 5.0, 0.0, 250.0},
      {"left", 0.0, 250.0, wrap_angle(M_PI), 5.0, 0.0, 250.0},
      {"right", 0.0, 250.0, 0.0, 5.0, 0.0, 250.0},
  };
}

struct ConstraintVector {
  ConstraintKind kind = ConstraintKind::Cartesian;
  std::vector<double> values;
  std::vector<std::string> labels;
};

// ---------------------------------------------------------------------------
// Densities

inline double gaussian_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * M_PI * variance);
}

inline double log_gaussian_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * d * d / variance - 0.5 * std::log(2.0 * M_PI * variance);
}

/// Modified Bessel function of the first kind, order zero, by its power series
/// sum_k ((x/2)^(2k)) / (k!)^2, stopped once a term is below 1e-16 of the sum.
inline double bessel_i0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

inline double vonmises_pdf(double phi, double mu, double kappa) {
  return std::exp(kappa * std::cos(phi - mu)) / (2.0 * M_PI * bessel_i0(kappa));
}

inline double log_vonmises_pdf(double phi, double mu, double kappa) {
  return kappa * std::cos(phi - mu) - std::log(2.0 * M_PI * bessel_i0(kappa));
}

// ---------------------------------------------------------------------------
// Representations of the vector from a1 to a0

inline ConstraintVector cartesian_constraint(const Vec3& a0, const Vec3& a1) {
  const Vec3 d = a0 - a1;
  return {ConstraintKind::Cartesian, {d.x(), d.y(), d.z()}, {"x", "y", "z"}};
}

/// rho >= 0, phi = atan2(dy, dx) in [-pi, pi] (0 when dx = dy = 0), z = dz.
inline ConstraintVector cylindrical_constraint(const Vec3& a0, const Vec3& a1) {
  const Vec3 d = a0 - a1;
  const double rho = std::hypot(d.x(), d.y());
  const double phi = (d.x() == 0.0 && d.y() == 0.0) ? 0.0 : std::atan2(d.y(), d.x());
  return {ConstraintKind::Cylindrical, {rho, phi, d.z()}, {"rho", "phi", "z"}};
}

/// Inverse of cylindrical_constraint: the offset a0 - a1 for (rho, phi, z).
inline Vec3 cylindrical_to_offset(double rho, double phi, double z) {
  return Vec3(rho * std::cos(phi), rho * std::sin(phi), z);
}

inline ConstraintVector symbolic_constraint(const Vec3& a0, const Vec3& a1,
                                            std::span<const SymbolicConstraintDef> defs) {
  if (defs.empty()) throw InputError("symbolic_constraint: empty constraint set");
  const ConstraintVector cyl = cylindrical_constraint(a0, a1);
  const double rho = cyl.values[0], phi = cyl.values[1], z = cyl.values[2];
  ConstraintVector out{ConstraintKind::Symbolic, {}, {}};
  out.values.reserve(defs.size());
  for (const auto& def : defs) {
    out.values.push_back(gaussian_pdf(rho, def.mu_rho, def.var_rho) *
                         vonmises_pdf(phi, def.mu_phi, def.kappa_phi) *
                         gaussian_pdf(z, def.mu_z, def.var_z));
    out.labels.push_back(def.name);
  }
  return out;
}

/// log v_sc per definition, evaluated in log space so far-away configurations keep a
/// finite, informative value instead of underflowing to zero.
inline std::vector<double> symbolic_log_constraint(const Vec3& a0, const Vec3& a1,
                                                   std::span<const SymbolicConstraintDef> defs) {
  if (defs.empty()) throw InputError("symbolic_log_constraint: empty constraint set");
  const ConstraintVector cyl = cylindrical_constraint(a0, a1);
  const double rho = cyl.values[0], phi = cyl.values[1], z = cyl.values[2];
  std::vector<double> out;
  out.reserve(defs.size());
  for (const auto& def : defs) {
    out.push_back(log_gaussian_pdf(rho, def.mu_rho, def.var_rho) +
                  log_vonmises_pdf(phi, def.mu_phi, def.kappa_phi) +
                  log_gaussian_pdf(z, def.mu_z, def.var_z));
  }
  return out;
}

/// Dimension labels of a representation, in value order.
inline std::vector<std::string> dimension_labels(ConstraintKind kind,
                                                 std::span<const SymbolicConstraintDef> defs) {
  switch (kind) {
    case ConstraintKind::Cartesian: return {"x", "y", "z"};
    case ConstraintKind::Cylindrical: return {"rho", "phi", "z"};
    case ConstraintKind::Symbolic: {
      std::vector<std::string> out;
      for (const auto& d : defs) out.push_back(d.name);
      return out;
    }
  }
  return {};
}

/// True for dimensions that live on the circle (the cylindrical azimuth).
inline bool is_angular_dimension(ConstraintKind kind, std::size_t dim) {
  return kind == ConstraintKind::Cylindrical && dim == 1;
}

/// Values that are tracked, segmented and generalized during learning. For symbolic
/// constraints these are log densities.
inline std::vector<double> tracked_values(ConstraintKind kind, const Vec3& a0, const Vec3& a1,
                                          std::span<const SymbolicConstraintDef> defs) {
  switch (kind) {
    case ConstraintKind::Cartesian: return cartesian_constraint(a0, a1).values;
    case ConstraintKind::Cylindrical: return cylindrical_constraint(a0, a1).values;
    case ConstraintKind::Symbolic: return symbolic_log_constraint(a0, a1, defs);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Weights and weighted similarities

struct ConstraintWeights {
  std::vector<double> w;
};

/// w = 1 / (1 + std); low spread across demonstrations means high importance.
inline ConstraintWeights weights_from_std(std::span<const double> stds) {
  ConstraintWeights out;
  out.w.reserve(stds.size());
  for (double s : stds) {
    if (!(s >= 0.0)) throw InputError("weights_from_std: standard deviation must be >= 0");
    out.w.push_back(1.0 / (1.0 + s));
  }
  return out;
}

namespace detail {

inline void check_operands(const ConstraintVector& current, const ConstraintVector& target,
                           const ConstraintWeights& w, ConstraintKind expected, std::size_t dims) {
  if (current.kind != expected || target.kind != expected)
    throw std::invalid_argument("similarity: constraint kind mismatch, expected " + to_string(expected));
  if (current.values.size() != dims || target.values.size() != dims || w.w.size() != dims)
    throw std::invalid_argument("similarity: dimension mismatch");
}

}  // namespace detail

inline double similarity_cartesian(const ConstraintVector& current, const ConstraintVector& target,
                                   const ConstraintWeights& w) {
  detail::check_operands(current, target, w, ConstraintKind::Cartesian, 3);
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double d = w.w[i] * current.values[i] - w.w[i] * target.values[i];
    s += d * d;
  }
  return s;
}

/// The azimuth weight scales the angle before mapping back to the plane.
inline double similarity_cylindrical(const ConstraintVector& current, const ConstraintVector& target,
                                     const ConstraintWeights& w) {
  detail::check_operands(current, target, w, ConstraintKind::Cylindrical, 3);
  const double wr = w.w[0], wp = w.w[1], wz = w.w[2];
  const double r1 = current.values[0], p1 = current.values[1], z1 = current.values[2];
  const double r2 = target.values[0], p2 = target.values[1], z2 = target.values[2];
  const double dx = std::cos(wp * p1) * wr * r1 - std::cos(wp * p2) * wr * r2;
  const double dy = std::sin(wp * p1) * wr * r1 - std::sin(wp * p2) * wr * r2;
  const double dz = wz * z1 - wz * z2;
  return dx * dx + dy * dy + dz * dz;
}

/// Sum over weighted squared log-density differences in log space; shared by both
/// symbolic entry points.
inline double similarity_symbolic_log(std::span<const double> log_current,
                                      std::span<const double> log_target,
                                      std::span<const double> w) {
  if (log_current.size() != log_target.size() || w.size() != log_current.size())
    throw std::invalid_argument("similarity: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = w[i] * (log_current[i] - log_target[i]);
    s += d * d;
  }
  return s;
}

inline double similarity_symbolic(const ConstraintVector& current, const ConstraintVector& target,
                                  const ConstraintWeights& w) {
  detail::check_operands(current, target, w, ConstraintKind::Symbolic, current.values.size());
  if (!current.labels.empty() && !target.labels.empty() && current.labels != target.labels)
    throw std::invalid_argument("similarity: symbolic constraint sets differ");
  std::vector<double> lc, lt;
  lc.reserve(w.w.size());
  lt.reserve(w.w.size());
  for (std::size_t i = 0; i < w.w.size(); ++i) {
    if (!(current.values[i] > 0.0) || !(target.values[i] > 0.0))
      throw std::domain_error("similarity_symbolic: densities must be positive");
    lc.push_back(std::log(current.values[i]));
    lt.push_back(std::log(target.values[i]));
  }
  return similarity_symbolic_log(lc, lt, w.w);
}

inline double similarity(const ConstraintVector& current, const ConstraintVector& target,
                         const ConstraintWeights& w) {
  switch (current.kind) {
    case ConstraintKind::Cartesian: return similarity_cartesian(current, target, w);
    case ConstraintKind::Cylindrical: return similarity_cylindrical(current, target, w);
    case ConstraintKind::Symbolic: return similarity_symbolic(current, target, w);
  }
  return 0.0;
}

}  // namespace sbam
