#include "symlorentz/sym_algebra.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace symlorentz {

double SymmetryParams::rotation_rate() const {
  return std::sqrt(h12 * h12 + h31 * h31 + h23 * h23);
}

double SymmetryParams::axial_translation() const {
  const double h = rotation_rate();
  if (h == 0.0) throw std::domain_error("axial translation undefined without rotation");
  return (h23 * h1 + h31 * h2 + h12 * h3) / h;
}

SymmetryParams SymmetryParams::scaled(double s) const {
  return {s * h11, s * h12, s * h23, s * h31, s * h1, s * h2, s * h3, s * c, s * h0};
}

std::string_view to_string(SymmetryCase kase) {
  switch (kase) {
    case SymmetryCase::Case1: return "Case1";
    case SymmetryCase::Case2: return "Case2";
    case SymmetryCase::Case3: return "Case3";
    case SymmetryCase::Case4: return "Case4";
    case SymmetryCase::Case5: return "Case5";
    case SymmetryCase::TimeTranslationOnly: return "TimeTranslationOnly";
  }
  return "?";
}

SymmetryCase classify(const SymmetryParams& p) {
  const bool tilted = p.h23 != 0.0 || p.h31 != 0.0;
  if (p.h11 != 0.0) return tilted ? SymmetryCase::Case1 : SymmetryCase::Case3;
  if (tilted) return SymmetryCase::Case2;
  if (p.h12 != 0.0) return SymmetryCase::Case4;
  if (p.h1 != 0.0 || p.h2 != 0.0 || p.h3 != 0.0) return SymmetryCase::Case5;
  return SymmetryCase::TimeTranslationOnly;
}

GeneratorMatrix generator_matrix(const SymmetryParams& p) {
  GeneratorMatrix g;
  // 0.0 - a rather than -a keeps zero entries positive in printed output.
  g.H.m = {{{p.h11, p.h12, 0.0 - p.h31}, {0.0 - p.h12, p.h11, p.h23}, {p.h31, 0.0 - p.h23, p.h11}}};
  g.h = p.translation();
  return g;
}

GeneratorValue generator_components(const SymmetryParams& p, double t, const Vec3d& x) {
  const GeneratorMatrix g = generator_matrix(p);
  return {p.time_rate() * t + p.h0, g.H * x + g.h};
}

Mat3d axis_frame(const SymmetryParams& p) {
  const double s2 = p.h31 * p.h31 + p.h23 * p.h23;
  if (s2 == 0.0) throw DegenerateAxisError("rotation axis parallel to z: h23 = h31 = 0");
  const double s = std::sqrt(s2);
  const double h = p.rotation_rate();
  const double n = 1.0 / (h * s);
  Mat3d P;
  P.m = {{{n * p.h12 * p.h23, -n * h * p.h31, p.h23 / h},
          {n * p.h12 * p.h31, n * h * p.h23, p.h31 / h},
          {-n * s2, 0.0, p.h12 / h}}};
  return P;
}

Mat3d eigenframe(const SymmetryParams& p) {
  switch (classify(p)) {
    case SymmetryCase::Case1:
    case SymmetryCase::Case2:
      return axis_frame(p);
    default:
      return Mat3d::identity();
  }
}

Mat3d rotation3(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3d R;
  R.m = {{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
  return R;
}

namespace {

Eigen::Matrix4d affine_exponential(const SymmetryParams& p, double eps) {
  const GeneratorMatrix g = generator_matrix(p);
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) M(i, j) = eps * g.H(i, j);
    M(i, 3) = eps * g.h[i];
  }
  return M.exp();
}

}  // namespace

Mat3d flow_matrix(const SymmetryParams& p, double eps) {
  const Eigen::Matrix4d E = affine_exponential(p, eps);
  Mat3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = E(i, j);
  return r;
}

FlowPoint symmetry_flow(const SymmetryParams& p, double eps, double t, const Vec3d& x) {
  const Eigen::Matrix4d E = affine_exponential(p, eps);
  FlowPoint r;
  for (int i = 0; i < 3; ++i) r.x[i] = E(i, 0) * x[0] + E(i, 1) * x[1] + E(i, 2) * x[2] + E(i, 3);
  r.t = std::exp(p.time_rate() * eps) * t + eps * p.h0;
  return r;
}

namespace {

Vec3d solve_center(const SymmetryParams& p) {
  const GeneratorMatrix g = generator_matrix(p);
  const double det = determinant(g.H);
  const double scale = max_abs(g.H);
  if (std::fabs(det) < 1e-14 * scale * scale * scale || det == 0.0)
    throw SingularMatrixError("generator matrix is singular; no finite center");
  const Mat3d& H = g.H;
  Mat3d inv;  // adjugate / det
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv(i, j) = (H(r0, c0) * H(r1, c1) - H(r0, c1) * H(r1, c0)) / det;
    }
  }
  return -(inv * g.h);
}

}  // namespace

Vec3d translation_center(const SymmetryParams& p) {
  switch (classify(p)) {
    case SymmetryCase::Case1:
    case SymmetryCase::Case3:
      return solve_center(p);
    case SymmetryCase::Case2: {
      const GeneratorMatrix g = generator_matrix(p);
      const double h = p.rotation_rate();
      return (1.0 / (h * h)) * (g.H * g.h);
    }
    case SymmetryCase::Case4:
      return {p.h2 / p.h12, (0.0 - p.h1) / p.h12, 0.0};
    default:
      return {0.0, 0.0, 0.0};
  }
}

Vec3d translation_for_center(const SymmetryParams& p, const Vec3d& k) {
  return -(generator_matrix(p).H * k);
}

int leading_translation_axis(const SymmetryParams& p) {
  if (p.h1 != 0.0) return 0;
  if (p.h2 != 0.0) return 1;
  if (p.h3 != 0.0) return 2;
  return 0;
}

}  // namespace symlorentz
