#include "symlorentz/verify.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <exception>
#include <numbers>

#include <fmt/format.h>

#include "symlorentz/rng.hpp"

namespace symlorentz {

namespace {

// (phi . grad) applied to each component: sum_j phi_j d(i, j).
Vec3d directional(const Mat3d& d, const Vec3d& phi) { return d * phi; }

Vec3d generator_at(const SymmetryParams& p, const Vec3d& x) {
  const GeneratorMatrix g = generator_matrix(p);
  return g.H * x + g.h;
}

double norm3(const Vec3d& a) { return norm(a); }

struct Terms {
  Vec3d residual;
  double scale;
};

Terms lie_terms(const SymmetryParams& p, const FieldJet& f, const JetSample& jet) {
  const GeneratorMatrix g = generator_matrix(p);
  const Vec3d phi = g.H * jet.x + g.h;
  const double dxi = p.time_rate();
  const Vec3d xddot = cross(jet.xdot, f.B) + f.E;
  const Vec3d phi1 = g.H * jet.xdot - dxi * jet.xdot;
  const Vec3d phi2 = g.H * xddot - (2.0 * dxi) * xddot;
  const Vec3d t_B = cross(jet.xdot, directional(f.dB, phi));
  const Vec3d t_E = directional(f.dE, phi);
  const Vec3d t_v = cross(phi1, f.B);
  const Vec3d r = phi2 - t_B - t_E - t_v;
  return {r, std::max({norm3(phi2), norm3(t_B), norm3(t_E), norm3(t_v)})};
}

Terms linear_terms(const SymmetryParams& p, const Vec3d& F, const Mat3d& dF, const Vec3d& x,
                   double weight) {
  const GeneratorMatrix g = generator_matrix(p);
  const Vec3d transport = directional(dF, g.H * x + g.h);
  const Vec3d scaled = weight * F;
  const Vec3d rotated = g.H * F;
  return {transport - scaled - rotated,
          std::max({norm3(transport), norm3(scaled), norm3(rotated)})};
}

Terms potential_A_terms(const SymmetryParams& p, const PotentialJet& jet, const Vec3d& x) {
  return linear_terms(p, jet.A, jet.dA, x, p.c - 2.0 * p.h11);
}

struct ScalarTerms {
  double residual;
  double scale;
};

ScalarTerms potential_Phi_terms(const SymmetryParams& p, double k, const PotentialJet& jet,
                                const Vec3d& x) {
  const double transport = dot(jet.dPhi, generator_at(p, x));
  const double scaled = 2.0 * (p.c - p.h11) * jet.Phi;
  return {transport - scaled + k, std::max({std::fabs(transport), std::fabs(scaled), std::fabs(k)})};
}

double relative(double abs, double scale) { return abs / std::max(scale, DBL_MIN); }

}  // namespace

Vec3d residual_lie(const SymmetryParams& params, const FieldJet& field, const JetSample& jet) {
  return lie_terms(params, field, jet).residual;
}

Vec3d residual_B(const SymmetryParams& params, const Vec3d& B, const Mat3d& dB, const Vec3d& x) {
  return linear_terms(params, B, dB, x, params.c - 3.0 * params.h11).residual;
}

Vec3d residual_E(const SymmetryParams& params, const Vec3d& E, const Mat3d& dE, const Vec3d& x) {
  return linear_terms(params, E, dE, x, 2.0 * params.c - 4.0 * params.h11).residual;
}

Vec3d residual_A(const FieldSpec& spec, const Vec3d& x) {
  return potential_A_terms(spec.params(), potential_jet(spec, x), x).residual;
}

double residual_Phi(const FieldSpec& spec, const Vec3d& x) {
  return potential_Phi_terms(spec.params(), spec.k(), potential_jet(spec, x), x).residual;
}

Vec3d residual_fieldline_symmetry(const SymmetryParams& params, const Vec3d& B, const Mat3d& dB,
                                  const Vec3d& x) {
  const GeneratorMatrix g = generator_matrix(params);
  return directional(dB, g.H * x + g.h) - g.H * B;
}

std::string_view to_string(ResidualKind kind) {
  switch (kind) {
    case ResidualKind::Lie: return "lie_prolongation";
    case ResidualKind::B: return "field_B";
    case ResidualKind::E: return "field_E";
    case ResidualKind::A: return "potential_A";
    case ResidualKind::Phi: return "potential_Phi";
    case ResidualKind::FieldLine: return "fieldline_symmetry";
    case ResidualKind::Noether: return "noether";
  }
  return "?";
}

PointResidual point_residual(ResidualKind kind, const FieldSpec& spec, const JetSample& jet,
                             const SymmetryParams& generator) {
  const SymmetryParams& p = generator;
  switch (kind) {
    case ResidualKind::Lie: {
      const Terms t = lie_terms(p, field_jet(spec, jet.x), jet);
      return {norm3(t.residual), t.scale};
    }
    case ResidualKind::B: {
      const FieldJet f = field_jet(spec, jet.x);
      const Terms t = linear_terms(p, f.B, f.dB, jet.x, p.c - 3.0 * p.h11);
      return {norm3(t.residual), t.scale};
    }
    case ResidualKind::E: {
      const FieldJet f = field_jet(spec, jet.x);
      const Terms t = linear_terms(p, f.E, f.dE, jet.x, 2.0 * p.c - 4.0 * p.h11);
      return {norm3(t.residual), t.scale};
    }
    case ResidualKind::FieldLine: {
      const FieldJet f = field_jet(spec, jet.x);
      const Terms t = linear_terms(p, f.B, f.dB, jet.x, 0.0);
      return {norm3(t.residual), t.scale};
    }
    case ResidualKind::A: {
      const Terms t = potential_A_terms(p, potential_jet(spec, jet.x), jet.x);
      return {norm3(t.residual), t.scale};
    }
    case ResidualKind::Phi: {
      const ScalarTerms t = potential_Phi_terms(p, spec.k(), potential_jet(spec, jet.x), jet.x);
      return {std::fabs(t.residual), t.scale};
    }
    case ResidualKind::Noether: {
      const PotentialJet pj = potential_jet(spec, jet.x);
      const Terms a = potential_A_terms(p, pj, jet.x);
      const ScalarTerms s = potential_Phi_terms(p, spec.k(), pj, jet.x);
      const double ra = norm3(a.residual), rs = std::fabs(s.residual);
      return ra >= rs ? PointResidual{ra, a.scale} : PointResidual{rs, s.scale};
    }
  }
  return {0.0, 0.0};
}

namespace {

JetSample draw_candidate(SplitMix64& rng, const SampleBox& box) {
  JetSample j;
  for (int i = 0; i < 3; ++i) j.x[i] = rng.uniform(box.lo[i], box.hi[i]);
  for (int i = 0; i < 3; ++i) j.xdot[i] = rng.uniform(-box.speed, box.speed);
  j.t = rng.uniform();
  return j;
}

bool accept(const FieldSpec& spec, const SampleBox& box, const Vec3d& x) {
  if (!domain_check(spec, x).ok) return false;
  if (spec.symmetry_case() == SymmetryCase::Case5) return true;
  const TransformedPoint<double> tp = transform_coords(spec, x);
  return tp.xt >= box.axis_margin && std::fabs(tp.yt) <= std::numbers::pi - box.cut_margin;
}

[[noreturn]] void exhausted(std::size_t got, std::size_t n) {
  throw SamplingExhausted(fmt::format(
      "sampling exhausted: {} of {} requested points in domain after {} candidates", got, n, 10 * n));
}

ResidualReport reduce(ResidualKind kind, const std::vector<JetSample>& jets,
                      const std::vector<PointResidual>& res) {
  ResidualReport r;
  r.tag = std::string(to_string(kind));
  r.n = jets.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < jets.size(); ++i) {
    sum += res[i].abs;
    if (i == 0 || res[i].abs > r.max_abs) {
      r.max_abs = res[i].abs;
      r.worst_point = jets[i].x;
    }
    r.max_rel = std::max(r.max_rel, relative(res[i].abs, res[i].scale));
  }
  r.mean_abs = sum / static_cast<double>(jets.size());
  return r;
}

SymmetryParams generator_of(const FieldSpec& spec, const ReportOptions& opts) {
  return opts.generator ? *opts.generator : spec.params();
}

}  // namespace

std::vector<JetSample> sample_jets_serial(const FieldSpec& spec, const SampleBox& box, std::size_t n,
                                          std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample count must be at least 1");
  SplitMix64 rng(seed);
  std::vector<JetSample> out;
  for (std::size_t i = 0; i < 10 * n && out.size() < n; ++i) {
    const JetSample j = draw_candidate(rng, box);
    if (accept(spec, box, j.x)) out.push_back(j);
  }
  if (out.size() < n) exhausted(out.size(), n);
  return out;
}

std::vector<JetSample> sample_jets(const FieldSpec& spec, const SampleBox& box, std::size_t n,
                                   std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample count must be at least 1");
  SplitMix64 rng(seed);
  std::vector<JetSample> out;
  out.reserve(n);
  std::size_t drawn = 0;
  while (out.size() < n && drawn < 10 * n) {
    const std::size_t chunk = std::min(10 * n - drawn, std::max<std::size_t>(n - out.size(), 64));
    std::vector<JetSample> cand(chunk);
    for (auto& c : cand) c = draw_candidate(rng, box);
    drawn += chunk;
    std::vector<char> ok(chunk, 0);
    const auto m = static_cast<std::ptrdiff_t>(chunk);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < m; ++i) ok[i] = accept(spec, box, cand[i].x) ? 1 : 0;
    for (std::size_t i = 0; i < chunk && out.size() < n; ++i)
      if (ok[i]) out.push_back(cand[i]);
  }
  if (out.size() < n) exhausted(out.size(), n);
  return out;
}

ResidualReport sample_report(ResidualKind kind, const FieldSpec& spec, const SampleBox& box,
                             std::size_t n, std::uint64_t seed, const ReportOptions& opts) {
  const std::vector<JetSample> jets = sample_jets(spec, box, n, seed);
  const SymmetryParams gen = generator_of(spec, opts);
  std::vector<PointResidual> res(jets.size());
  std::exception_ptr error;
  const auto m = static_cast<std::ptrdiff_t>(jets.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    try {
      res[i] = point_residual(kind, spec, jets[i], gen);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return reduce(kind, jets, res);
}

ResidualReport sample_report_serial(ResidualKind kind, const FieldSpec& spec, const SampleBox& box,
                                    std::size_t n, std::uint64_t seed, const ReportOptions& opts) {
  const std::vector<JetSample> jets = sample_jets_serial(spec, box, n, seed);
  const SymmetryParams gen = generator_of(spec, opts);
  std::vector<PointResidual> res;
  res.reserve(jets.size());
  for (const JetSample& j : jets) res.push_back(point_residual(kind, spec, j, gen));
  return reduce(kind, jets, res);
}

ResidualReport residual_noether(const FieldSpec& spec, const SampleBox& box, std::size_t n,
                                std::uint64_t seed) {
  if (spec.params().c != 0.0) {
    ResidualReport r;
    r.tag = std::string(to_string(ResidualKind::Noether));
    r.failure = "not Noether: c≠0";
    return r;
  }
  return sample_report(ResidualKind::Noether, spec, box, n, seed);
}

}  // namespace symlorentz
