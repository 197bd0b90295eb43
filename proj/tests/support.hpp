#pragma once

// Shared fixtures: one parameter set per symmetry class, random expression
// trees, and finite-difference oracles.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "symlorentz/field_builder.hpp"
#include "symlorentz/rng.hpp"
#include "symlorentz/sym_algebra.hpp"
#include "symlorentz/verify.hpp"

namespace support {

using namespace symlorentz;

struct Setup {
  std::string name;
  SymmetryParams params;
  double k = 0.0;  // scalar-potential constant
  SampleBox box;
};

inline SymmetryParams with_center(SymmetryParams p, const Vec3d& center) {
  const Vec3d h = translation_for_center(p, center);
  p.h1 = h[0];
  p.h2 = h[1];
  p.h3 = h[2];
  return p;
}

inline SampleBox make_box(Vec3d lo, Vec3d hi, double axis_margin = 0.0) {
  SampleBox b;
  b.lo = lo;
  b.hi = hi;
  b.axis_margin = axis_margin;
  return b;
}

/// Two parameter sets per class: a generic one (c away from the special
/// value) and the degenerate scalar branch with k != 0.
inline std::vector<Setup> class_setups() {
  std::vector<Setup> s;
  {
    SymmetryParams p;
    p.h11 = 0.5, p.h23 = 0.6, p.h12 = 0.8, p.c = 1.3;
    p = with_center(p, {0.1, -0.2, 0.3});
    const SampleBox box = make_box({0.5, 0.5, 0.5}, {2.0, 1.5, 2.0}, 0.05);
    s.push_back({"Case1", p, 0.0, box});
    p.c = 0.5;
    s.push_back({"Case1/special", p, 0.7, box});
  }
  {
    SymmetryParams p;
    p.h23 = 0.6, p.h12 = 0.8, p.h1 = 0.3, p.h2 = -0.2, p.h3 = 0.5, p.c = 0.4;
    const SampleBox box = make_box({-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}, 0.05);
    s.push_back({"Case2", p, 0.0, box});
    p.c = 0.0;
    s.push_back({"Case2/special", p, 0.3, box});
  }
  {
    SymmetryParams p;
    p.h11 = 0.5, p.h12 = 0.7, p.c = 0.9;
    p = with_center(p, {0.1, 0.2, -0.5});
    const SampleBox box = make_box({0.5, 0.5, 0.2}, {1.5, 1.5, 1.5}, 0.05);
    s.push_back({"Case3", p, 0.0, box});
    p.c = 0.5;
    s.push_back({"Case3/special", p, -0.4, box});
  }
  {
    SymmetryParams p;
    p.h12 = 1.2, p.h1 = 0.3, p.h2 = -0.4, p.h3 = 0.5, p.c = 0.3;
    const SampleBox box = make_box({-1.5, -1.5, -1.0}, {1.5, 1.5, 1.0}, 0.05);
    s.push_back({"Case4", p, 0.0, box});
    p.c = 0.0;
    s.push_back({"Case4/special", p, 0.6, box});
  }
  {
    SymmetryParams p;
    p.h1 = 0.8, p.h2 = -0.3, p.h3 = 0.5, p.c = 0.4;
    const SampleBox box = make_box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    s.push_back({"Case5", p, 0.0, box});
    p.c = 0.0;
    s.push_back({"Case5/special", p, 1.0, box});
    SymmetryParams q;
    q.h2 = 0.7, q.h3 = -0.2, q.c = 0.2;
    s.push_back({"Case5/cycled", q, 0.0, box});
  }
  return s;
}

/// Same classes with c = 0 and k = 0 (the Noether-admissible choice).
inline std::vector<Setup> noether_setups() {
  std::vector<Setup> out;
  for (Setup s : class_setups()) {
    if (s.name.find('/') != std::string::npos) continue;
    s.params.c = 0.0;
    s.k = 0.0;
    s.name += "/c=0";
    out.push_back(s);
  }
  return out;
}

/// Random tree of depth <= depth over u, v and constants in [-1, 1], using
/// operations that are defined everywhere.
inline Expr random_expr(SplitMix64& rng, int depth) {
  if (depth == 0 || rng.uniform() < 0.25) {
    const double r = rng.uniform();
    if (r < 0.4) return Expr::var(Var::U);
    if (r < 0.8) return Expr::var(Var::V);
    return Expr::number(std::round(rng.uniform(-1.0, 1.0) * 100.0) / 100.0);
  }
  const auto pick = static_cast<int>(rng.uniform() * 7.0);
  const Expr a = random_expr(rng, depth - 1);
  switch (pick) {
    case 0: return a + random_expr(rng, depth - 1);
    case 1: return a - random_expr(rng, depth - 1);
    case 2: return a * random_expr(rng, depth - 1);
    case 3: return Expr::call(Func::Sin, a);
    case 4: return Expr::call(Func::Cos, a);
    case 5: return Expr::call(Func::Atan, a);
    default: return Expr::pow(a, 2.0);
  }
}

inline FieldFunctions random_functions(SplitMix64& rng, int depth = 3) {
  return {random_expr(rng, depth), random_expr(rng, depth), random_expr(rng, depth),
          random_expr(rng, depth)};
}

inline std::string describe(const FieldFunctions& f) {
  return "F1=" + to_string(f.F1) + " F2=" + to_string(f.F2) + " F3=" + to_string(f.F3) +
         " G=" + to_string(f.G);
}

/// Central difference of a vector map, d(i, j) = df_i/dx_j.
inline Mat3d fd_jacobian(const std::function<Vec3d(const Vec3d&)>& f, const Vec3d& x, double h) {
  Mat3d J;
  for (int j = 0; j < 3; ++j) {
    Vec3d xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vec3d d = (1.0 / (2.0 * h)) * (f(xp) - f(xm));
    for (int i = 0; i < 3; ++i) J(i, j) = d[i];
  }
  return J;
}

inline Vec3d fd_gradient(const std::function<double(const Vec3d&)>& f, const Vec3d& x, double h) {
  Vec3d g;
  for (int j = 0; j < 3; ++j) {
    Vec3d xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// Fourth-order central difference of a vector map.
inline Mat3d fd4_jacobian(const std::function<Vec3d(const Vec3d&)>& f, const Vec3d& x, double h) {
  Mat3d J;
  for (int j = 0; j < 3; ++j) {
    auto at = [&](double s) {
      Vec3d y = x;
      y[j] += s * h;
      return f(y);
    };
    const Vec3d d = (1.0 / (12.0 * h)) * (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0));
    for (int i = 0; i < 3; ++i) J(i, j) = d[i];
  }
  return J;
}

}  // namespace support
