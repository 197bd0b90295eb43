// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance [work_dir]

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "support.hpp"
#include "symlorentz/commands.hpp"
#include "symlorentz/dynamics.hpp"
#include "symlorentz/verify.hpp"

using namespace symlorentz;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kSamples = 1000;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double frobenius(const Mat3d& m) {
  double s = 0.0;
  for (const auto& row : m.m)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

struct ClassSpec {
  std::string name;
  FieldSpec spec;
  SampleBox box;
};

// Five random expression sets for the generic member of each class.
std::vector<ClassSpec> class_specs() {
  SplitMix64 rng(2024);
  std::vector<ClassSpec> out;
  for (const support::Setup& s : support::class_setups()) {
    if (s.name.find('/') != std::string::npos) continue;
    for (int i = 0; i < 5; ++i)
      out.push_back({s.name, FieldSpec(s.params, support::random_functions(rng), s.k), s.box});
  }
  return out;
}

Expr perturbed(const char* base, SplitMix64& rng) {
  return parse(base) + Expr::number(0.05) * support::random_expr(rng, 3);
}

struct ConservedRun {
  std::string name;
  FieldSpec spec;
  State s0;
  Vec3d seed;  // field-line start
  SampleBox box;
};

// Conforming Case2/4/5 fields (c = k = h11 = 0): a confining base plus a random
// depth-3 perturbation in every function.
std::vector<ConservedRun> conserved_runs() {
  SplitMix64 rng(77);
  std::vector<ConservedRun> out;
  auto fns = [&](const char* f1, const char* f2, const char* f3, const char* g) {
    return FieldFunctions{perturbed(f1, rng), perturbed(f2, rng), perturbed(f3, rng),
                          perturbed(g, rng)};
  };
  const SampleBox wide = support::make_box({-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}, 0.05);
  {
    SymmetryParams p;
    p.h23 = 0.6, p.h12 = 0.8;
    out.push_back({"Case2", FieldSpec(p, fns("0", "0.5", "0", "0.5 + 0.5*v^2")),
                   State{0, {0, 1, 0}, {0.3, 0, 0.2}}, {0, 1, 0}, wide});
  }
  {
    SymmetryParams p;
    p.h12 = 1;
    out.push_back({"Case4", FieldSpec(p, fns("0", "0.5", "0", "0.5 + 0.5*v^2")),
                   State{0, {1, 0, 0}, {0, 0.3, 0.2}}, {1, 0, 0}, wide});
  }
  {
    SymmetryParams p;
    p.h1 = 1;
    out.push_back({"Case5", FieldSpec(p, fns("0", "0", "-u", "0.5*(u^2 + v^2)")),
                   State{0, {0, 0.5, 0.5}, {0.2, 0.3, 0}}, {0, 0.5, 0.5},
                   support::make_box({-1, -1, -1}, {1, 1, 1})});
  }
  return out;
}

Outcome construction() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const ClassSpec& c : class_specs())
    for (ResidualKind k : {ResidualKind::A, ResidualKind::Phi})
      worst = std::max(worst, sample_report(k, c.spec, c.box, kSamples, 1).max_abs);
  const double t = seconds_since(t0);
  return {worst <= 1e-8 && t < 10.0,
          fmt::format("max |residual_A|, |residual_Phi| = {:.3g} over 25 specs, {:.2f} s", worst, t)};
}

Outcome field_constraints() {
  double worst = 0.0, worst_div = 0.0, worst_curl = 0.0;
  for (const ClassSpec& c : class_specs()) {
    for (ResidualKind k : {ResidualKind::B, ResidualKind::E})
      worst = std::max(worst, sample_report(k, c.spec, c.box, kSamples, 1).max_abs);
    for (const JetSample& j : sample_jets(c.spec, c.box, kSamples, 1)) {
      const FieldJet fj = field_jet(c.spec, j.x);
      const double h = 1e-4 * std::max(1.0, max_abs(j.x));
      const Mat3d dB = support::fd4_jacobian([&](const Vec3d& y) { return magnetic_field(c.spec, y); },
                                             j.x, h);
      const Mat3d dE = support::fd4_jacobian([&](const Vec3d& y) { return electric_field(c.spec, y); },
                                             j.x, h);
      const double div = std::fabs(dB(0, 0) + dB(1, 1) + dB(2, 2));
      const Vec3d curl{dE(2, 1) - dE(1, 2), dE(0, 2) - dE(2, 0), dE(1, 0) - dE(0, 1)};
      worst_div = std::max(worst_div, div / std::max(1.0, frobenius(fj.dB)));
      worst_curl = std::max(worst_curl, norm(curl) / std::max(1.0, frobenius(fj.dE)));
    }
  }
  return {worst <= 1e-8 && worst_div <= 1e-8 && worst_curl <= 1e-8,
          fmt::format("max residual_B/E = {:.3g}, |div B| = {:.3g}, |curl E| = {:.3g}", worst,
                      worst_div, worst_curl)};
}

Outcome lie_symmetry() {
  double worst = 0.0;
  for (const ClassSpec& c : class_specs())
    worst = std::max(worst, sample_report(ResidualKind::Lie, c.spec, c.box, kSamples, 1).max_abs);
  for (const support::Setup& s : support::class_setups()) {
    if (s.name.find('/') == std::string::npos) continue;  // special branches with k != 0
    SplitMix64 rng(5);
    const FieldSpec spec(s.params, support::random_functions(rng), s.k);
    worst = std::max(worst, sample_report(ResidualKind::Lie, spec, s.box, kSamples, 1).max_abs);
  }
  SymmetryParams time;
  time.h0 = 1.0;
  SplitMix64 rng(6);
  double time_worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    FieldJet f{};
    for (int a = 0; a < 3; ++a) {
      f.B[a] = rng.uniform(-3, 3), f.E[a] = rng.uniform(-3, 3);
      for (int b = 0; b < 3; ++b) f.dB(a, b) = rng.uniform(-3, 3), f.dE(a, b) = rng.uniform(-3, 3);
    }
    const JetSample j{rng.uniform(-5, 5),
                      {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)},
                      {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)}};
    time_worst = std::max(time_worst, max_abs(residual_lie(time, f, j)));
  }
  return {worst <= 1e-8 && time_worst == 0.0,
          fmt::format("max |residual_lie| = {:.3g}; time translation on random fields = {}", worst,
                      time_worst)};
}

Outcome noether_gate() {
  int rejected = 0, dilations = 0;
  for (const ClassSpec& c : class_specs()) {
    if (c.spec.params().c == 0.0) continue;
    ++dilations;
    if (residual_noether(c.spec, c.box, kSamples, 1).failure == "not Noether: c≠0") ++rejected;
  }
  SplitMix64 rng(8);
  double worst = 0.0;
  int passed = 0, total = 0;
  for (const support::Setup& s : support::noether_setups()) {
    for (int i = 0; i < 5; ++i) {
      const FieldSpec spec(s.params, support::random_functions(rng), 0.0);
      const ResidualReport r = residual_noether(spec, s.box, kSamples, 1);
      worst = std::max(worst, r.max_abs);
      passed += r.passed(1e-8) ? 1 : 0;
      ++total;
    }
  }
  return {rejected == dilations && dilations > 0 && passed == total,
          fmt::format("{}/{} c≠0 specs rejected; {}/{} c=0 specs pass, max residual {:.3g}", rejected,
                      dilations, passed, total, worst)};
}

Outcome conservation() {
  const auto t0 = std::chrono::steady_clock::now();
  double h_drift = 0.0, i_drift = 0.0, closed = 0.0;
  std::string halted;
  for (const ConservedRun& r : conserved_runs()) {
    try {
      const Trajectory tr = integrate_rk4(r.spec, r.s0, 1e-3, 100000);
      h_drift = std::max(h_drift, drift_stats(tr.H).max_rel);
      i_drift = std::max(i_drift, drift_stats(tr.I).max_rel);
      for (std::size_t k = 0; k < tr.states.size(); k += 97) {
        const double a = integral_I(r.spec, tr.states[k]);
        const double b = integral_I_closed_form(r.spec, tr.states[k]);
        closed = std::max(closed, std::fabs(a - b) / std::max(1.0, std::fabs(a)));
      }
    } catch (const TrajectoryHalted& e) {
      halted += r.name + " (" + e.reason() + ") ";
    }
  }
  const double t = seconds_since(t0);
  return {halted.empty() && h_drift <= 1e-7 && i_drift <= 1e-7 && closed <= 1e-10 && t < 30.0,
          fmt::format("T = 100: H drift {:.3g}, I drift {:.3g}, closed-form gap {:.3g}, {:.2f} s{}",
                      h_drift, i_drift, closed, t, halted.empty() ? "" : "; halted: " + halted)};
}

Outcome field_line_invariant() {
  double drift = 0.0, b2 = 0.0;
  std::string halted;
  for (const ConservedRun& r : conserved_runs()) {
    try {
      const FieldLine line = trace_field_line(r.spec, r.seed, 2e-4, 10000, false);
      drift = std::max(drift, drift_stats(line.Im).max_rel);
    } catch (const FieldLineHalted& e) {
      halted += r.name + " (" + e.reason() + ") ";
    }
    b2 = std::max(b2, sample_report(ResidualKind::FieldLine, r.spec, r.box, kSamples, 1).max_abs);
  }
  return {halted.empty() && drift <= 1e-8 && b2 <= 1e-8,
          fmt::format("I_m drift over 1e4 steps {:.3g}, field-line residual {:.3g}{}", drift, b2,
                      halted.empty() ? "" : "; halted: " + halted)};
}

Outcome integrators() {
  SymmetryParams p;
  p.h12 = 1;
  const FieldSpec spec(p, FieldFunctions{parse("0"), parse("0.5"), parse("0"), parse("0")});
  const State s0{0.0, {1, 0, 0}, {0, 1, 0}};
  auto period_error = [&](int n) {
    const Trajectory tr = integrate_rk4(spec, s0, 2.0 * std::numbers::pi / n, static_cast<std::size_t>(n));
    return norm(tr.states.back().x - s0.x);
  };
  const double ret = period_error(6283);
  // dt = 1e-3 exactly does not land on 2π; compare with the closed-form orbit instead
  const Trajectory fixed = integrate_rk4(spec, s0, 1e-3, 6283);
  const State& end = fixed.states.back();
  const double exact = norm(end.x - Vec3d{2.0 - std::cos(end.t), std::sin(end.t), 0.0});
  const double order = std::log2(period_error(50) / period_error(100));
  const double boris = drift_stats(integrate_boris(spec, s0, 1e-3, 1000000).H).max_rel;
  return {ret <= 1e-9 && exact <= 1e-9 && order >= 3.8 && boris <= 1e-6,
          fmt::format("period return {:.3g} (dt = 2π/6283), closed-form gap {:.3g} (dt = 1e-3), RK4 "
                      "order {:.3f}, Boris H drift over 1e6 steps {:.3g}",
                      ret, exact, order, boris)};
}

Outcome solution_mapping() {
  double worst = 0.0;
  std::string halted;
  auto check = [&](const std::string& name, const FieldSpec& spec, const State& s0) {
    try {
      const Trajectory tr = integrate_rk4(spec, s0, 1e-3, 2000);
      const double base = trajectory_ode_residual(spec, tr);
      for (double eps : {-0.1, -0.05, 0.05, 0.1}) {
        const double r = trajectory_ode_residual(spec, transport_trajectory(spec.params(), eps, tr));
        worst = std::max(worst, r / base);
      }
    } catch (const TrajectoryHalted& e) {
      halted += name + " (" + e.reason() + ") ";
    }
  };
  for (const ConservedRun& r : conserved_runs()) check(r.name, r.spec, r.s0);
  // dilating classes: the time rescale enters the mapping
  SplitMix64 rng(9);
  for (const support::Setup& s : support::class_setups()) {
    if (s.name != "Case1" && s.name != "Case3") continue;
    const FieldFunctions f{perturbed("0.2", rng), perturbed("0.4", rng), perturbed("0.1", rng),
                           perturbed("0", rng)};
    const Vec3d mid = 0.5 * (s.box.lo + s.box.hi);
    check(s.name, FieldSpec(s.params, f, s.k), State{0, mid, {0.05, -0.05, 0.02}});
  }
  return {halted.empty() && worst <= 3.0,
          fmt::format("worst transported/baseline ODE residual ratio {:.3f} for |eps| <= 0.1{}", worst,
                      halted.empty() ? "" : "; halted: " + halted)};
}

Outcome ad_correctness() {
  double worst = 0.0;
  for (const ClassSpec& c : class_specs()) {
    for (const JetSample& j : sample_jets(c.spec, c.box, kSamples / 5, 3)) {
      const PotentialJet pj = potential_jet(c.spec, j.x);
      const double h = 1e-6 * std::max(1.0, max_abs(j.x));
      const Mat3d fd = support::fd_jacobian([&](const Vec3d& y) { return vector_potential(c.spec, y); },
                                            j.x, h);
      const Vec3d g = support::fd_gradient([&](const Vec3d& y) { return scalar_potential(c.spec, y); },
                                           j.x, h);
      for (int a = 0; a < 3; ++a) {
        worst = std::max(worst, std::fabs(g[a] - pj.dPhi[a]) / std::max(1.0, std::fabs(pj.dPhi[a])));
        for (int b = 0; b < 3; ++b)
          worst = std::max(worst, std::fabs(fd(a, b) - pj.dA(a, b)) / std::max(1.0, std::fabs(pj.dA(a, b))));
      }
    }
  }
  return {worst <= 1e-5,
          fmt::format("max relative AD-FD gap {:.3g} at 1000 points per class", worst)};
}

constexpr const char* kScenario = R"(# determinism check
[params]
h23 = 0.6
h12 = 0.8
h1 = 0.15
h3 = 0.2

[functions]
F1 = 0.1*sin(u)
F2 = 0.5 + 0.05*cos(v)
F3 = 0.2*u
G = 0.5 + 0.1*u^2

[run]
x0 = 0, 1, 0 ; 0.5, 0.5, 0
v0 = 0.3, 0, 0.2
steps = 2000
box_lo = -1.5, -1.5, -1.5
box_hi = 1.5, 1.5, 1.5
axis_margin = 0.05
samples = 500
seeds = 0, 1, 0
ds = 1e-3
)";

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

Outcome determinism(const fs::path& work) {
  fs::create_directories(work);
  const fs::path scenario = work / "determinism.ini";
  std::ofstream(scenario) << kScenario;
  std::size_t files = 0;
  std::string differs;
  for (const char* command : {"classify", "verify", "simulate", "trace", "flow"}) {
    for (const char* run : {"a", "b"}) {
      CommandOptions opts;
      opts.scenario = scenario;
      opts.out = work / run / command;
      opts.seed = 12345;
      fs::remove_all(opts.out);
      std::ostringstream out, err;
      run_command(command, opts, out, err);
    }
    for (const auto& entry : fs::directory_iterator(work / "a" / command)) {
      ++files;
      const fs::path other = work / "b" / command / entry.path().filename();
      if (!fs::exists(other) || !same_bytes(entry.path(), other))
        differs += entry.path().filename().string() + " ";
    }
  }
  return {differs.empty() && files > 0,
          fmt::format("{} files from 5 commands compared byte for byte{}", files,
                      differs.empty() ? "" : "; differ: " + differs)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "symlorentz_acceptance";
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"construction consistency", construction},
      {"field constraints and Maxwell identities", field_constraints},
      {"Lie symmetry", lie_symmetry},
      {"Noether gate", noether_gate},
      {"conservation of H and I", conservation},
      {"field-line invariant", field_line_invariant},
      {"integrator oracles", integrators},
      {"solution mapping", solution_mapping},
      {"AD correctness", ad_correctness},
      {"determinism", [&] { return determinism(work); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << fmt::format("{} {:2d} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                             o.detail)
              << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
