#pragma once

// Closed-form potentials admitting the symmetry of a SymmetryParams, one
// family per SymmetryCase, and the fields derived from them by forward-mode
// differentiation (B = curl A, E = -grad Phi).
//
// Every family is built from the characteristic coordinates
//
//   xbar = P^T (x - k),  xt = |(xbar, ybar)|,  yt = atan2(ybar, xbar),  zt = zbar
//
// and two invariants (u, v) of the flow, on which F1, F2, F3 and G depend.
// yt uses the principal value; each family is smooth away from its axis
// (xt = 0) and the cut yt = pi.

#include <stdexcept>
#include <string>
#include <utility>

#include "symlorentz/expr.hpp"
#include "symlorentz/sym_algebra.hpp"
#include "symlorentz/vec.hpp"

namespace symlorentz {

/// Invalid parameter / function combination.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Point outside the region where a family is defined. reason() is one of
/// "axis", "log branch", "expression".
class FieldDomainError : public std::domain_error {
 public:
  FieldDomainError(std::string reason, const std::string& what)
      : std::domain_error(what), reason_(std::move(reason)) {}
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

struct FieldFunctions {
  Expr F1, F2, F3, G;
};

class FieldSpec {
 public:
  /// Throws SpecError for TimeTranslationOnly parameters, for k != 0 outside
  /// the degenerate scalar-potential branch, or for a singular generator.
  FieldSpec(const SymmetryParams& params, FieldFunctions functions, double k = 0.0);

  const SymmetryParams& params() const { return params_; }
  SymmetryCase symmetry_case() const { return case_; }
  const FieldFunctions& functions() const { return functions_; }
  double k() const { return k_; }
  /// c = h11 for Cases 1 and 3, c = 0 otherwise: Phi carries the k term.
  bool special_branch() const { return special_; }
  const Mat3d& frame() const { return frame_; }
  const Vec3d& center() const { return center_; }
  double rotation_rate() const { return rate_; }
  double axial_translation() const { return axial_; }
  /// Case5 only: coordinates are cycled by this many places so that the
  /// leading nonzero translation plays the role of h1.
  int axis_shift() const { return shift_; }

  /// Adds delta * (x, 0, 0) to A. Breaks the symmetry; used to exercise the
  /// residual checks.
  FieldSpec with_corruption(double delta) const;
  double corruption() const { return corruption_; }

 private:
  SymmetryParams params_;
  SymmetryCase case_;
  FieldFunctions functions_;
  double k_;
  bool special_;
  Mat3d frame_;
  Vec3d center_;
  double rate_ = 0.0;
  double axial_ = 0.0;
  int shift_ = 0;
  double corruption_ = 0.0;
};

template <class T>
struct TransformedPoint {
  T xt, yt, zt;
  Vec3<T> xbar;
};

template <class T>
TransformedPoint<T> transform_coords(const FieldSpec& spec, const Vec3<T>& x);

/// The two invariants of the flow that F and G take as (u, v).
template <class T>
std::pair<T, T> characteristics(const FieldSpec& spec, const Vec3<T>& x);

template <class T>
Vec3<T> vector_potential(const FieldSpec& spec, const Vec3<T>& x);

template <class T>
T scalar_potential(const FieldSpec& spec, const Vec3<T>& x);

/// Potentials with first derivatives. dA(i, j) = dA_i/dx_j.
struct PotentialJet {
  Vec3d A;
  Mat3d dA;
  double Phi;
  Vec3d dPhi;
};

PotentialJet potential_jet(const FieldSpec& spec, const Vec3d& x);

struct FieldValue {
  Vec3d B, E;
};

FieldValue field_value(const FieldSpec& spec, const Vec3d& x);
Vec3d magnetic_field(const FieldSpec& spec, const Vec3d& x);
Vec3d electric_field(const FieldSpec& spec, const Vec3d& x);

/// Fields with their Jacobians, dB(i, j) = dB_i/dx_j.
struct FieldJet {
  Vec3d B;
  Mat3d dB;
  Vec3d E;
  Mat3d dE;
};

FieldJet field_jet(const FieldSpec& spec, const Vec3d& x);

/// True when the characteristic v carries the angle yt with a nonzero
/// coefficient, so that functions of v jump across the cut yt = pi.
bool angle_dependent(const FieldSpec& spec);

struct DomainStatus {
  bool ok = true;
  std::string reason;
};

DomainStatus domain_check(const FieldSpec& spec, const Vec3d& x);

}  // namespace symlorentz
