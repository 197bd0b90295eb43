#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "symlorentz/verify.hpp"

using namespace symlorentz;
using support::Setup;

namespace {

FieldFunctions fns(const char* f1, const char* f2, const char* f3, const char* g) {
  return {parse(f1), parse(f2), parse(f3), parse(g)};
}

Mat3d random_matrix(SplitMix64& rng) {
  Mat3d m;
  for (auto& row : m.m)
    for (double& v : row) v = rng.uniform(-2, 2);
  return m;
}

Vec3d random_vec(SplitMix64& rng, double r = 2.0) {
  return {rng.uniform(-r, r), rng.uniform(-r, r), rng.uniform(-r, r)};
}

bool same_report(const ResidualReport& a, const ResidualReport& b) {
  return a.tag == b.tag && a.n == b.n && a.max_abs == b.max_abs && a.mean_abs == b.mean_abs &&
         a.max_rel == b.max_rel && a.worst_point == b.worst_point && a.failure == b.failure;
}

}  // namespace

TEST_CASE("field constraint examples") {
  SymmetryParams p;
  p.h12 = 1;
  Mat3d dB;
  CHECK(residual_B(p, Vec3d{0, 0, 1}, dB, Vec3d{1, 2, 3}) == Vec3d{0, 0, 0});
  dB(2, 0) = 1.0;  // B = (0, 0, x)
  const Vec3d r = residual_B(p, Vec3d{0, 0, 1}, dB, Vec3d{1, 2, 3});
  CHECK(r == Vec3d{0, 0, 2});
  CHECK(residual_fieldline_symmetry(p, Vec3d{0, 0, 1}, Mat3d{}, Vec3d{4, 5, 6}) == Vec3d{0, 0, 0});
}

TEST_CASE("prolongation residual by hand") {
  // B = (0, 0, x), E = 0 under the rotation h12 = 1. With xdot = (1, 0, 0):
  // xddot = xdot x B = (0, -1, 0), phi = (y, -x, 0), grad-phi terms give (0, 2, 0).
  SymmetryParams p;
  p.h12 = 1;
  FieldJet f{};
  f.B = {0, 0, 1};
  f.dB(2, 0) = 1.0;
  const JetSample jet{0.0, {1, 2, 3}, {1, 0, 0}};
  const Vec3d r = residual_lie(p, f, jet);
  CHECK(r[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(r[1] == doctest::Approx(2.0));
  CHECK(r[2] == doctest::Approx(0.0).scale(1.0));
  // With xdot = 0 the magnetic violation is invisible to the prolongation.
  CHECK(max_abs(residual_lie(p, f, JetSample{0.0, {1, 2, 3}, {0, 0, 0}})) == 0.0);
}

TEST_CASE("time translation is a symmetry of every static field") {
  SymmetryParams p;
  p.h0 = 1.0;
  SplitMix64 rng(1);
  for (int i = 0; i < 500; ++i) {
    FieldJet f{random_vec(rng), random_matrix(rng), random_vec(rng), random_matrix(rng)};
    const JetSample jet{rng.uniform(-5, 5), random_vec(rng), random_vec(rng)};
    CHECK(residual_lie(p, f, jet) == Vec3d{0, 0, 0});
  }
}

TEST_CASE("potential constraint examples") {
  SymmetryParams p5;
  p5.h1 = 1;
  const FieldSpec c5(p5, fns("sin(u)*v", "u^2 - v", "atan(u+v)", "0"));
  SplitMix64 rng(2);
  for (int i = 0; i < 50; ++i) CHECK(max_abs(residual_A(c5, random_vec(rng))) <= 1e-10);

  SymmetryParams p4;
  p4.h12 = 1;
  const FieldSpec c4(p4, fns("0", "0", "0", "u^2"));
  for (int i = 0; i < 50; ++i) {
    const Vec3d x{rng.uniform(0.1, 2), rng.uniform(0.1, 2), rng.uniform(-2, 2)};
    CHECK(std::fabs(residual_Phi(c4, x)) <= 1e-12);
  }

  const FieldSpec c5k(p5, fns("0", "0", "0", "0"), 1.0);
  CHECK(residual_Phi(c5k, Vec3d{0.3, 0.2, 0.1}) == 0.0);
}

TEST_CASE("every constructed field satisfies its constraints") {
  SplitMix64 rng(3);
  const ResidualKind kinds[] = {ResidualKind::Lie, ResidualKind::B, ResidualKind::E, ResidualKind::A,
                                ResidualKind::Phi};
  for (const Setup& s : support::class_setups()) {
    for (int trial = 0; trial < 3; ++trial) {
      const FieldSpec spec(s.params, support::random_functions(rng), s.k);
      for (ResidualKind kind : kinds) {
        const ResidualReport r = sample_report(kind, spec, s.box, 1000, 100 + trial);
        CHECK(r.n == 1000);
        CHECK(r.max_abs >= r.mean_abs);
        CHECK_MESSAGE(r.max_abs <= 1e-8, s.name, " ", r.tag, " max_abs=", r.max_abs, " ",
                      support::describe(spec.functions()));
      }
    }
  }
}

TEST_CASE("a field built for one symmetry generally violates another") {
  const Setup s = support::class_setups()[6];  // Case4
  const FieldSpec spec(s.params, fns("0.3*u", "1 + 0.2*v", "u*v", "u^2"), 0.0);
  SymmetryParams other;
  other.h23 = 1.0;
  ReportOptions opts;
  opts.generator = other;
  CHECK(sample_report(ResidualKind::Lie, spec, s.box, 200, 1, opts).max_abs > 1e-3);
  CHECK(sample_report(ResidualKind::B, spec, s.box, 200, 1, opts).max_abs > 1e-3);
}

TEST_CASE("Noether gate") {
  const Setup s = support::class_setups()[6];  // Case4
  SymmetryParams p = s.params;
  p.c = 1.0;
  const FieldSpec dilated(p, fns("0", "0.5", "0", "0"));
  const ResidualReport gate = residual_noether(dilated, s.box, 100, 1);
  CHECK(gate.failure == "not Noether: c≠0");
  CHECK_FALSE(gate.passed(1.0));

  SplitMix64 rng(4);
  for (const Setup& n : support::noether_setups()) {
    const FieldSpec spec(n.params, support::random_functions(rng), 0.0);
    const ResidualReport r = residual_noether(spec, n.box, 1000, 2);
    CHECK_MESSAGE(r.passed(1e-8), n.name, " ", r.max_abs);
  }

  p.c = 0.0;
  const FieldSpec corrupted = FieldSpec(p, fns("0", "0.5", "0", "0")).with_corruption(1.0);
  const ResidualReport bad = residual_noether(corrupted, s.box, 100, 1);
  CHECK(bad.failure.empty());
  CHECK(bad.max_abs > 0.1);
  CHECK_FALSE(bad.passed(1e-8));
}

TEST_CASE("corruption produces a residual linear in its size") {
  for (const Setup& s : support::noether_setups()) {
    const FieldSpec base(s.params, fns("0.1*u", "0.5 + 0.1*v", "0.2*u*v", "0"), 0.0);
    std::vector<double> logd, logr;
    for (double d = 1e-6; d <= 1.0001e-2; d *= 10.0) {
      const ResidualReport r = sample_report(ResidualKind::A, base.with_corruption(d), s.box, 200, 9);
      logd.push_back(std::log(d));
      logr.push_back(std::log(r.max_abs));
    }
    // least-squares slope of log residual against log size
    const double n = static_cast<double>(logd.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logd.size(); ++i) {
      sx += logd[i], sy += logr[i], sxx += logd[i] * logd[i], sxy += logd[i] * logr[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK_MESSAGE(std::fabs(slope - 1.0) <= 0.1, s.name, " slope=", slope);
  }
}

TEST_CASE("field-line and magnetic constraints coincide without dilation") {
  SplitMix64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    SymmetryParams p;
    p.h12 = rng.uniform(-1, 1), p.h23 = rng.uniform(-1, 1), p.h31 = rng.uniform(-1, 1);
    p.h1 = rng.uniform(-1, 1), p.h2 = rng.uniform(-1, 1), p.h3 = rng.uniform(-1, 1);
    const Vec3d B = random_vec(rng), x = random_vec(rng);
    const Mat3d dB = random_matrix(rng);
    CHECK(residual_B(p, B, dB, x) == residual_fieldline_symmetry(p, B, dB, x));
  }

  for (const Setup& s : support::noether_setups()) {
    if (s.params.h11 != 0.0) continue;
    const FieldSpec spec(s.params, support::random_functions(rng), 0.0);
    CHECK(sample_report(ResidualKind::FieldLine, spec, s.box, 1000, 3).max_abs <= 1e-8);
  }

  // h11 != 0 breaks the agreement: a Case1 field need not have symmetric field lines.
  const Setup c1 = support::class_setups()[0];
  const FieldSpec spec(c1.params, fns("1 + 0.2*u", "0.5*v", "0.3", "0"), 0.0);
  CHECK(sample_report(ResidualKind::B, spec, c1.box, 200, 1).max_abs <= 1e-8);
  CHECK(sample_report(ResidualKind::FieldLine, spec, c1.box, 200, 1).max_abs > 1e-3);
}

TEST_CASE("parallel and serial sampling are bitwise identical") {
  SplitMix64 rng(6);
  for (const Setup& s : support::class_setups()) {
    const FieldSpec spec(s.params, support::random_functions(rng), s.k);
    for (std::uint64_t seed : {1u, 2u, 77u}) {
      const auto a = sample_jets(spec, s.box, 500, seed);
      const auto b = sample_jets_serial(spec, s.box, 500, seed);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].xdot == b[i].xdot);
        CHECK(a[i].t == b[i].t);
      }
      for (ResidualKind kind : {ResidualKind::Lie, ResidualKind::A, ResidualKind::Phi}) {
        CHECK(same_report(sample_report(kind, spec, s.box, 500, seed),
                          sample_report_serial(kind, spec, s.box, 500, seed)));
      }
    }
  }
}

TEST_CASE("sampling is seeded and confined to the box") {
  const Setup s = support::class_setups()[2];  // Case2
  const FieldSpec spec(s.params, fns("u", "v", "0", "u*v"), s.k);
  const auto a = sample_jets(spec, s.box, 300, 5);
  const auto b = sample_jets(spec, s.box, 300, 5);
  const auto c = sample_jets(spec, s.box, 300, 6);
  CHECK(a.size() == 300);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    differs = differs || a[i].x != c[i].x;
    for (int j = 0; j < 3; ++j) {
      CHECK(a[i].x[j] >= s.box.lo[j]);
      CHECK(a[i].x[j] <= s.box.hi[j]);
      CHECK(std::fabs(a[i].xdot[j]) <= s.box.speed);
    }
    CHECK(domain_check(spec, a[i].x).ok);
  }
  CHECK(differs);
}

TEST_CASE("a single sample reproduces the pointwise residual") {
  const Setup s = support::class_setups()[6];
  const FieldSpec spec(s.params, fns("0.1*u", "0.5", "v", "u^2"), s.k);
  const JetSample j = sample_jets(spec, s.box, 1, 42).front();
  for (ResidualKind kind : {ResidualKind::Lie, ResidualKind::B, ResidualKind::E, ResidualKind::A,
                            ResidualKind::Phi, ResidualKind::FieldLine}) {
    const ResidualReport r = sample_report(kind, spec, s.box, 1, 42);
    const PointResidual pr = point_residual(kind, spec, j, spec.params());
    CHECK(r.n == 1);
    CHECK(r.max_abs == pr.abs);
    CHECK(r.mean_abs == pr.abs);
    CHECK(r.worst_point == j.x);
  }
  const FieldJet fj = field_jet(spec, j.x);
  CHECK(point_residual(ResidualKind::B, spec, j, spec.params()).abs ==
        norm(residual_B(spec.params(), fj.B, fj.dB, j.x)));
  CHECK(point_residual(ResidualKind::Lie, spec, j, spec.params()).abs ==
        norm(residual_lie(spec.params(), fj, j)));
}

TEST_CASE("a box outside the domain exhausts sampling") {
  SymmetryParams p;
  p.h11 = 1, p.h23 = 1;  // axis along x, center at the origin: zt = x
  const FieldSpec spec(p, fns("0", "0", "0", "0"));
  SampleBox box;
  box.lo = {-2, -1, -1};
  box.hi = {-1, 1, 1};
  CHECK_THROWS_AS(sample_jets(spec, box, 10, 1), SamplingExhausted);
  CHECK_THROWS_AS(sample_report(ResidualKind::B, spec, box, 10, 1), SamplingExhausted);
  CHECK_THROWS_AS(sample_jets(spec, box, 0, 1), std::invalid_argument);
}
