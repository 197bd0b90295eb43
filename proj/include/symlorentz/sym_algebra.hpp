#pragma once

// The second symmetry generator of the Lorentz system,
//
//   xi  = (2 h11 - c) t + h0
//   phi = H x + h,   H = [[ h11,  h12, -h31],
//                         [-h12,  h11,  h23],
//                         [ h31, -h23,  h11]],
//
// its case classification, eigenframe, translation center and finite flow.

#include <stdexcept>
#include <string_view>

#include "symlorentz/vec.hpp"

namespace symlorentz {

struct SymmetryParams {
  double h11 = 0.0, h12 = 0.0, h23 = 0.0, h31 = 0.0;
  double h1 = 0.0, h2 = 0.0, h3 = 0.0;
  double c = 0.0;
  double h0 = 0.0;

  /// Angular rate sqrt(h12^2 + h31^2 + h23^2).
  double rotation_rate() const;
  /// Translation along the rotation axis, (h23 h1 + h31 h2 + h12 h3) / h.
  /// Throws std::domain_error when the rotation rate is zero.
  double axial_translation() const;
  /// Rate of the time dilation, 2 h11 - c.
  double time_rate() const { return 2.0 * h11 - c; }
  Vec3d translation() const { return {h1, h2, h3}; }
  /// Same parameters with every constant multiplied by s.
  SymmetryParams scaled(double s) const;

  friend bool operator==(const SymmetryParams&, const SymmetryParams&) = default;
};

enum class SymmetryCase { Case1, Case2, Case3, Case4, Case5, TimeTranslationOnly };

std::string_view to_string(SymmetryCase kase);

/// Exact zero tests on the user's constants; no tolerance.
SymmetryCase classify(const SymmetryParams& params);

struct GeneratorMatrix {
  Mat3d H;
  Vec3d h;
};

GeneratorMatrix generator_matrix(const SymmetryParams& params);

struct GeneratorValue {
  double xi;
  Vec3d phi;
};

GeneratorValue generator_components(const SymmetryParams& params, double t, const Vec3d& x);

class DegenerateAxisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SingularMatrixError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Orthogonal frame (u, v, e) whose third column is the rotation axis
/// (h23, h31, h12) / h. Throws DegenerateAxisError if h23 = h31 = 0.
Mat3d axis_frame(const SymmetryParams& params);

/// axis_frame for Cases 1 and 2, the identity otherwise.
Mat3d eigenframe(const SymmetryParams& params);

/// Rotation about the third axis.
Mat3d rotation3(double theta);

/// exp(eps H), the linear part of the finite flow.
Mat3d flow_matrix(const SymmetryParams& params, double eps);

struct FlowPoint {
  double t;
  Vec3d x;
};

/// Finite transformation: x' solves dx/deps = H x + h from x, through the
/// exponential of the 4x4 affine augmentation; t' = exp(eps (2 h11 - c)) t + eps h0
/// (dilation first, then the time translation).
FlowPoint symmetry_flow(const SymmetryParams& params, double eps, double t, const Vec3d& x);

/// Center k of the characteristic coordinates:
///   Case1, Case3: -H^-1 h     Case2: H h / h^2
///   Case4: (h2/h12, -h1/h12, 0)     Case5 and time translation: 0.
/// Throws SingularMatrixError when H must be inverted and is singular.
Vec3d translation_center(const SymmetryParams& params);

/// Translation that makes k the fixed point of the flow, h = -H k.
Vec3d translation_for_center(const SymmetryParams& params, const Vec3d& k);

/// Index of the first nonzero translation, used to relabel Case5 axes.
int leading_translation_axis(const SymmetryParams& params);

}  // namespace symlorentz
