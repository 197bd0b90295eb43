#include "symlorentz/field_builder.hpp"

#include <cmath>

#include <fmt/format.h>

#include "symlorentz/dual.hpp"

namespace symlorentz {

FieldSpec::FieldSpec(const SymmetryParams& params, FieldFunctions functions, double k)
    : params_(params), case_(classify(params)), functions_(std::move(functions)), k_(k) {
  const SymmetryParams& p = params_;
  switch (case_) {
    case SymmetryCase::TimeTranslationOnly:
      throw SpecError("parameters generate only time translation; no field family");
    case SymmetryCase::Case1:
    case SymmetryCase::Case3:
      special_ = p.c == p.h11;
      break;
    default:
      special_ = p.c == 0.0;
  }
  if (k_ != 0.0 && !special_)
    throw SpecError(fmt::format("k = {} needs the degenerate branch (c = {} for {})", k_,
                                case_ == SymmetryCase::Case1 || case_ == SymmetryCase::Case3 ? "h11" : "0",
                                to_string(case_)));
  frame_ = eigenframe(p);
  try {
    center_ = translation_center(p);
  } catch (const SingularMatrixError& e) {
    throw SpecError(e.what());
  }
  rate_ = p.rotation_rate();
  if (rate_ > 0.0) axial_ = p.axial_translation();
  if (case_ == SymmetryCase::Case5) shift_ = leading_translation_axis(p);
}

FieldSpec FieldSpec::with_corruption(double delta) const {
  FieldSpec r = *this;
  r.corruption_ = delta;
  return r;
}

namespace {

template <class T>
Vec3<T> shifted(const Vec3<T>& a, int s) {
  return {a[s % 3], a[(s + 1) % 3], a[(s + 2) % 3]};
}

template <class T>
Vec3<T> unshifted(const Vec3<T>& a, int s) {
  Vec3<T> r;
  for (int i = 0; i < 3; ++i) r[(i + s) % 3] = a[i];
  return r;
}

template <class T>
struct Chart {
  TransformedPoint<T> tp;
  Vec3<T> d;  // x - k, or the cycled coordinates in Case5
  T u, v;
};

template <class T>
TransformedPoint<T> transform_impl(const FieldSpec& spec, const Vec3<T>& x) {
  if (spec.symmetry_case() == SymmetryCase::Case5) return {x[0], x[1], x[2], x};
  using std::atan2, std::sqrt;
  Vec3<T> d;
  for (int i = 0; i < 3; ++i) d[i] = x[i] - spec.center()[i];
  const Vec3<T> xbar = transpose(spec.frame()) * d;
  const double r2 = value_of(xbar[0]) * value_of(xbar[0]) + value_of(xbar[1]) * value_of(xbar[1]);
  double scale2 = 1.0;
  for (int i = 0; i < 3; ++i) scale2 += value_of(d[i]) * value_of(d[i]);
  const double tol_axis = 1e-9 * std::sqrt(scale2);
  if (r2 < tol_axis * tol_axis)
    throw FieldDomainError("axis", "point on the symmetry axis; angle undefined");
  TransformedPoint<T> tp;
  tp.xt = sqrt(xbar[0] * xbar[0] + xbar[1] * xbar[1]);
  tp.yt = atan2(xbar[1], xbar[0]);
  tp.zt = xbar[2];
  tp.xbar = xbar;
  return tp;
}

template <class T>
Chart<T> chart(const FieldSpec& spec, const Vec3<T>& x) {
  using std::log;
  const SymmetryParams& p = spec.params();
  Chart<T> ch;
  ch.tp = transform_impl(spec, x);
  const TransformedPoint<T>& tp = ch.tp;
  auto need_positive_zt = [&] {
    if (value_of(tp.zt) <= 0.0)
      throw FieldDomainError("log branch", "zt <= 0: logarithm and fractional powers undefined");
  };
  switch (spec.symmetry_case()) {
    case SymmetryCase::Case1:
      need_positive_zt();
      for (int i = 0; i < 3; ++i) ch.d[i] = x[i] - spec.center()[i];
      ch.u = tp.zt / tp.xt;
      ch.v = p.h11 * tp.yt + spec.rotation_rate() * log(tp.zt);
      break;
    case SymmetryCase::Case2:
      for (int i = 0; i < 3; ++i) ch.d[i] = x[i] - spec.center()[i];
      ch.u = tp.xt;
      ch.v = spec.axial_translation() * tp.yt + spec.rotation_rate() * tp.zt;
      break;
    case SymmetryCase::Case3:
      need_positive_zt();
      for (int i = 0; i < 3; ++i) ch.d[i] = x[i] - spec.center()[i];
      ch.u = tp.zt / tp.xt;
      ch.v = p.h11 * tp.yt + p.h12 * log(tp.zt);
      break;
    case SymmetryCase::Case4:
      for (int i = 0; i < 3; ++i) ch.d[i] = x[i] - spec.center()[i];
      ch.u = tp.xt;
      ch.v = p.h3 * tp.yt + p.h12 * x[2];
      break;
    case SymmetryCase::Case5: {
      const int s = spec.axis_shift();
      ch.d = shifted(x, s);
      const Vec3d h = shifted(p.translation(), s);
      ch.u = h[1] * ch.d[0] - h[0] * ch.d[1];
      ch.v = h[2] * ch.d[0] - h[0] * ch.d[2];
      break;
    }
    case SymmetryCase::TimeTranslationOnly:
      break;
  }
  return ch;
}

template <class T>
Vec3<T> potential_from_chart(const FieldSpec& spec, const Vec3<T>& x, const Chart<T>& ch) {
  using std::exp, std::pow;
  const SymmetryParams& p = spec.params();
  const FieldFunctions& fn = spec.functions();
  const T F1 = eval(fn.F1, ch.u, ch.v);
  const T F2 = eval(fn.F2, ch.u, ch.v);
  const T F3 = eval(fn.F3, ch.u, ch.v);
  const Vec3<T>& d = ch.d;
  const T& zt = ch.tp.zt;
  const double h = spec.rotation_rate();
  Vec3<T> A;
  switch (spec.symmetry_case()) {
    case SymmetryCase::Case1: {
      const T s = pow(zt, p.c / p.h11 - 2.0);
      A[0] = s * ((h * d[0] - p.h23 * zt) * F1 + (p.h31 * d[2] - p.h12 * d[1]) * F2 + p.h23 * zt * F3);
      A[1] = s * ((h * d[1] - p.h31 * zt) * F1 + (p.h12 * d[0] - p.h23 * d[2]) * F2 + p.h31 * zt * F3);
      A[2] = s * ((h * d[2] - p.h12 * zt) * F1 + (p.h23 * d[1] - p.h31 * d[0]) * F2 + p.h12 * zt * F3);
      break;
    }
    case SymmetryCase::Case2: {
      const T s = exp((-p.c / h) * ch.tp.yt);
      A[0] = s * ((h * d[0] - p.h23 * zt) * F1 + (p.h31 * d[2] - p.h12 * d[1]) * F2 + p.h23 * F3);
      A[1] = s * ((h * d[1] - p.h31 * zt) * F1 + (p.h12 * d[0] - p.h23 * d[2]) * F2 + p.h31 * F3);
      A[2] = s * ((h * d[2] - p.h12 * zt) * F1 + (p.h23 * d[1] - p.h31 * d[0]) * F2 + p.h12 * F3);
      break;
    }
    case SymmetryCase::Case3: {
      const T s = pow(zt, p.c / p.h11 - 2.0);
      A[0] = s * (d[0] * F1 - d[1] * F2);
      A[1] = s * (d[1] * F1 + d[0] * F2);
      A[2] = pow(zt, p.c / p.h11 - 1.0) * F3;
      break;
    }
    case SymmetryCase::Case4: {
      const T s = exp((-p.c / p.h12) * ch.tp.yt);
      A[0] = s * (d[0] * F1 - d[1] * F2);
      A[1] = s * (d[1] * F1 + d[0] * F2);
      A[2] = s * F3;
      break;
    }
    case SymmetryCase::Case5: {
      const int sh = spec.axis_shift();
      const double lead = shifted(p.translation(), sh)[0];
      const T s = exp((p.c / lead) * d[0]);
      A = unshifted(Vec3<T>{s * F1, s * F2, s * F3}, sh);
      break;
    }
    case SymmetryCase::TimeTranslationOnly:
      break;
  }
  if (spec.corruption() != 0.0) A[0] = A[0] + spec.corruption() * x[0];
  return A;
}

template <class T>
T scalar_from_chart(const FieldSpec& spec, const Chart<T>& ch) {
  using std::exp, std::log, std::pow;
  const SymmetryParams& p = spec.params();
  const T G = eval(spec.functions().G, ch.u, ch.v);
  const double k = spec.k();
  const bool special = spec.special_branch();
  const T& yt = ch.tp.yt;
  const T& zt = ch.tp.zt;
  switch (spec.symmetry_case()) {
    case SymmetryCase::Case1:
      if (special) return (k / spec.rotation_rate()) * yt + G;
      return pow(zt, 2.0 * (p.c / p.h11 - 1.0)) * G;
    case SymmetryCase::Case2:
      if (special) return (k / spec.rotation_rate()) * yt + G;
      return exp((-2.0 * p.c / spec.rotation_rate()) * yt) * G;
    case SymmetryCase::Case3:
      if (special) return (-k / p.h11) * log(zt) + G;
      return pow(zt, 2.0 * (p.c / p.h11 - 1.0)) * G;
    case SymmetryCase::Case4:
      if (special) return (k / p.h12) * yt + G;
      return exp((-2.0 * p.c / p.h12) * yt) * G;
    case SymmetryCase::Case5: {
      const double lead = shifted(p.translation(), spec.axis_shift())[0];
      if (special) return (-k / lead) * ch.d[0] + G;
      return exp((2.0 * p.c / lead) * ch.d[0]) * G;
    }
    case SymmetryCase::TimeTranslationOnly:
      break;
  }
  return G;
}

}  // namespace

template <class T>
TransformedPoint<T> transform_coords(const FieldSpec& spec, const Vec3<T>& x) {
  return transform_impl(spec, x);
}

template <class T>
std::pair<T, T> characteristics(const FieldSpec& spec, const Vec3<T>& x) {
  const Chart<T> ch = chart(spec, x);
  return {ch.u, ch.v};
}

template <class T>
Vec3<T> vector_potential(const FieldSpec& spec, const Vec3<T>& x) {
  return potential_from_chart(spec, x, chart(spec, x));
}

template <class T>
T scalar_potential(const FieldSpec& spec, const Vec3<T>& x) {
  return scalar_from_chart(spec, chart(spec, x));
}

#define SYMLORENTZ_INSTANTIATE(T)                                                         \
  template TransformedPoint<T> transform_coords<T>(const FieldSpec&, const Vec3<T>&);     \
  template std::pair<T, T> characteristics<T>(const FieldSpec&, const Vec3<T>&);          \
  template Vec3<T> vector_potential<T>(const FieldSpec&, const Vec3<T>&);                 \
  template T scalar_potential<T>(const FieldSpec&, const Vec3<T>&);

SYMLORENTZ_INSTANTIATE(double)
SYMLORENTZ_INSTANTIATE(Dual3)
SYMLORENTZ_INSTANTIATE(Dual3x2)
#undef SYMLORENTZ_INSTANTIATE

PotentialJet potential_jet(const FieldSpec& spec, const Vec3d& x) {
  const Vec3<Dual3> xs = seed_first_order(x);
  const Chart<Dual3> ch = chart(spec, xs);
  const Vec3<Dual3> A = potential_from_chart(spec, xs, ch);
  const Dual3 Phi = scalar_from_chart(spec, ch);
  PotentialJet jet;
  for (int i = 0; i < 3; ++i) {
    jet.A[i] = A[i].val;
    for (int j = 0; j < 3; ++j) jet.dA(i, j) = A[i].grad[j];
    jet.dPhi[i] = Phi.grad[i];
  }
  jet.Phi = Phi.val;
  return jet;
}

namespace {

// B_i = eps_ijk dA_k/dx_j from dA(k, j).
Vec3d curl(const Mat3d& dA) {
  return {dA(2, 1) - dA(1, 2), dA(0, 2) - dA(2, 0), dA(1, 0) - dA(0, 1)};
}

}  // namespace

FieldValue field_value(const FieldSpec& spec, const Vec3d& x) {
  const PotentialJet jet = potential_jet(spec, x);
  return {curl(jet.dA), -jet.dPhi};
}

Vec3d magnetic_field(const FieldSpec& spec, const Vec3d& x) { return field_value(spec, x).B; }

Vec3d electric_field(const FieldSpec& spec, const Vec3d& x) { return field_value(spec, x).E; }

FieldJet field_jet(const FieldSpec& spec, const Vec3d& x) {
  const Vec3<Dual3x2> xs = seed_second_order(x);
  const Chart<Dual3x2> ch = chart(spec, xs);
  const Vec3<Dual3x2> A = potential_from_chart(spec, xs, ch);
  const Dual3x2 Phi = scalar_from_chart(spec, ch);
  // Second partial d2A_k/dx_j dx_l sits in A[k].grad[j].grad[l].
  auto dd = [&](int k, int j, int l) { return A[k].grad[j].grad[l]; };
  FieldJet jet;
  for (int l = 0; l < 3; ++l) {
    jet.dB(0, l) = dd(2, 1, l) - dd(1, 2, l);
    jet.dB(1, l) = dd(0, 2, l) - dd(2, 0, l);
    jet.dB(2, l) = dd(1, 0, l) - dd(0, 1, l);
  }
  Mat3d dA;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) dA(k, j) = A[k].grad[j].val;
  jet.B = curl(dA);
  for (int i = 0; i < 3; ++i) {
    jet.E[i] = -Phi.grad[i].val;
    for (int l = 0; l < 3; ++l) jet.dE(i, l) = -Phi.grad[i].grad[l];
  }
  return jet;
}

DomainStatus domain_check(const FieldSpec& spec, const Vec3d& x) {
  try {
    const Chart<double> ch = chart(spec, x);
    const Vec3d A = potential_from_chart(spec, x, ch);
    const double Phi = scalar_from_chart(spec, ch);
    if (!std::isfinite(A[0]) || !std::isfinite(A[1]) || !std::isfinite(A[2]) || !std::isfinite(Phi))
      return {false, "expression"};
  } catch (const FieldDomainError& e) {
    return {false, e.reason()};
  } catch (const EvalError&) {
    return {false, "expression"};
  }
  return {};
}

bool angle_dependent(const FieldSpec& spec) {
  const SymmetryParams& p = spec.params();
  switch (spec.symmetry_case()) {
    case SymmetryCase::Case1:
    case SymmetryCase::Case3: return p.h11 != 0.0;
    case SymmetryCase::Case2: return spec.axial_translation() != 0.0;
    case SymmetryCase::Case4: return p.h3 != 0.0;
    default: return false;
  }
}

}  // namespace symlorentz
