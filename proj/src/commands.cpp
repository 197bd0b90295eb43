#include "symlorentz/commands.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "symlorentz/dynamics.hpp"
#include "symlorentz/scenario.hpp"
#include "symlorentz/verify.hpp"

namespace symlorentz {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

json vec_json(const Vec3d& v) { return {v[0], v[1], v[2]}; }

json mat_json(const Mat3d& m) {
  return {{m(0, 0), m(0, 1), m(0, 2)}, {m(1, 0), m(1, 1), m(1, 2)}, {m(2, 0), m(2, 1), m(2, 2)}};
}

json drift_json(const DriftStats& d) { return {{"max_rel", d.max_rel}, {"final_rel", d.final_rel}}; }

std::string_view status_name(int code) {
  switch (code) {
    case kExitPass: return "pass";
    case kExitToleranceBreach: return "tolerance breach";
    case kExitConfigError: return "config error";
    default: return "domain error";
  }
}

struct Context {
  const Scenario& sc;
  const fs::path& out_dir;
  std::ostream& out;
  std::ostream& err;
  json& report;
};

std::ofstream open_output(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError(fmt::format("cannot write '{}'", p.string()));
  return f;
}

template <class T>
void write_pair(const Context& ctx, const std::string& stem, const T& data) {
  auto csv = open_output(ctx.out_dir / (stem + ".csv"));
  write_csv(csv, data);
  auto js = open_output(ctx.out_dir / (stem + ".json"));
  write_json(js, data);
}

// ---------------------------------------------------------------- classify

int cmd_classify(Context& ctx) {
  const SymmetryParams& p = ctx.sc.params;
  parse_functions(ctx.sc);
  const SymmetryCase kase = classify(p);
  const GeneratorMatrix g = generator_matrix(p);
  json& r = ctx.report;
  r["case"] = std::string(to_string(kase));
  r["generator_matrix"] = mat_json(g.H);
  r["translation"] = vec_json(g.h);
  r["time_rate"] = p.time_rate();
  r["eigenframe"] = mat_json(eigenframe(p));
  r["translation_center"] = vec_json(translation_center(p));
  r["rotation_rate"] = p.rotation_rate();
  if (p.rotation_rate() > 0.0) r["axial_translation"] = p.axial_translation();
  r["warnings"] = json::array();
  fmt::print(ctx.out, "case: {}\n", to_string(kase));
  if (kase == SymmetryCase::TimeTranslationOnly) {
    const std::string w = "parameters generate only time translation; no field family applies";
    r["warnings"].push_back(w);
    fmt::print(ctx.err, "warning: {}\n", w);
  } else {
    const FieldSpec spec = build_spec(ctx.sc);
    r["special_branch"] = spec.special_branch();
    if (kase == SymmetryCase::Case5) r["axis_shift"] = spec.axis_shift();
  }
  fmt::print(ctx.out, "generator matrix H:\n");
  for (int i = 0; i < 3; ++i) fmt::print(ctx.out, "  {:>12.6g} {:>12.6g} {:>12.6g}\n", g.H(i, 0), g.H(i, 1), g.H(i, 2));
  const Mat3d P = eigenframe(p);
  fmt::print(ctx.out, "eigenframe:\n");
  for (int i = 0; i < 3; ++i) fmt::print(ctx.out, "  {:>12.6g} {:>12.6g} {:>12.6g}\n", P(i, 0), P(i, 1), P(i, 2));
  const Vec3d k = translation_center(p);
  fmt::print(ctx.out, "translation center: ({:.6g}, {:.6g}, {:.6g})\n", k[0], k[1], k[2]);
  return kExitPass;
}

// ------------------------------------------------------------------ verify

int cmd_verify(Context& ctx) {
  const RunSettings& run = ctx.sc.run;
  const FieldSpec spec = build_spec(ctx.sc);
  const SymmetryParams& p = spec.params();
  SampleBox box;
  box.lo = run.box_lo;
  box.hi = run.box_hi;
  box.speed = run.speed;
  box.axis_margin = run.axis_margin;
  box.cut_margin = run.cut_margin;

  json& r = ctx.report;
  r["case"] = std::string(to_string(spec.symmetry_case()));
  r["tolerance"] = run.tol;
  r["suites"] = json::array();
  bool all_pass = true;
  auto add = [&](const ResidualReport& rep) {
    const bool ok = rep.passed(run.tol);
    all_pass = all_pass && ok;
    r["suites"].push_back({{"tag", rep.tag},
                           {"status", ok ? "pass" : "fail"},
                           {"n", rep.n},
                           {"max_abs", rep.max_abs},
                           {"mean_abs", rep.mean_abs},
                           {"max_rel", rep.max_rel},
                           {"worst_point", vec_json(rep.worst_point)}});
    fmt::print(ctx.out, "{:<20} n={:<6} max_abs={:<12.4e} max_rel={:<12.4e} {}\n", rep.tag, rep.n,
               rep.max_abs, rep.max_rel, ok ? "PASS" : "FAIL");
  };
  auto skip = [&](ResidualKind kind, const std::string& why) {
    r["suites"].push_back({{"tag", std::string(to_string(kind))}, {"status", "skipped"}, {"notice", why}});
    fmt::print(ctx.out, "{:<20} skipped: {}\n", to_string(kind), why);
  };

  for (ResidualKind kind : {ResidualKind::Lie, ResidualKind::B, ResidualKind::E, ResidualKind::A,
                            ResidualKind::Phi})
    add(sample_report(kind, spec, box, run.samples, run.seed));

  if (p.c != 0.0) skip(ResidualKind::Noether, "not Noether: c≠0");
  else add(residual_noether(spec, box, run.samples, run.seed));

  if (p.c != 0.0 || p.h11 != 0.0)
    skip(ResidualKind::FieldLine, p.c != 0.0 ? "field-line check needs c = 0" : "field-line check needs h11 = 0");
  else
    add(sample_report(ResidualKind::FieldLine, spec, box, run.samples, run.seed));

  return all_pass ? kExitPass : kExitToleranceBreach;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(Context& ctx) {
  const RunSettings& run = ctx.sc.run;
  const FieldSpec spec = build_spec(ctx.sc);
  std::vector<State> starts;
  for (std::size_t i = 0; i < run.x0.size(); ++i)
    starts.push_back({run.t0, run.x0[i], run.v0.size() == 1 ? run.v0[0] : run.v0[i]});
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const DomainStatus st = domain_check(spec, starts[i].x);
    if (!st.ok)
      throw ConfigError(fmt::format("[run] x0 #{} is outside the field domain ({})", i, st.reason), 0, "x0");
  }

  const BatchResult batch = integrate_batch(spec, starts, run.dt, run.steps, run.integrator);
  const auto pre = integral_precondition(spec);
  json& r = ctx.report;
  r["case"] = std::string(to_string(spec.symmetry_case()));
  r["integrator"] = std::string(to_string(run.integrator));
  r["drift_tol"] = run.drift_tol;
  if (pre) r["integral_I"] = fmt::format("unavailable: {}", *pre);
  r["trajectories"] = json::array();
  bool halted = false, breach = false;
  for (std::size_t i = 0; i < batch.trajectories.size(); ++i) {
    const Trajectory& tr = batch.trajectories[i];
    const std::string stem = fmt::format("trajectory_{}", i);
    write_pair(ctx, stem, tr);
    json t;
    t["file"] = stem + ".csv";
    t["states"] = tr.states.size();
    t["complete"] = batch.halted[i].empty();
    if (!batch.halted[i].empty()) {
      halted = true;
      t["halted"] = batch.halted[i];
      fmt::print(ctx.err, "trajectory {}: {}\n", i, batch.halted[i]);
    }
    const std::size_t crossings = cut_crossings(spec, tr);
    t["cut_crossings"] = crossings;
    if (crossings > 0 && angle_dependent(spec))
      fmt::print(ctx.err,
                 "warning: trajectory {} crosses the angle cut {} times; functions of v jump there\n",
                 i, crossings);
    const DriftStats dH = drift_stats(tr.H);
    t["H"] = drift_json(dH);
    breach = breach || dH.max_rel > run.drift_tol;
    fmt::print(ctx.out, "trajectory {}: {} states, H drift max {:.4e} final {:.4e}", i, tr.states.size(),
               dH.max_rel, dH.final_rel);
    if (!tr.I.empty()) {
      const DriftStats dI = drift_stats(tr.I);
      double closed = 0.0;
      for (std::size_t j = 0; j < tr.states.size(); ++j)
        closed = std::max(closed, std::fabs(tr.I[j] - integral_I_closed_form(spec, tr.states[j])));
      t["I"] = drift_json(dI);
      t["I_closed_form_max_diff"] = closed;
      breach = breach || dI.max_rel > run.drift_tol || closed > 1e-10;
      fmt::print(ctx.out, ", I drift max {:.4e}, closed form diff {:.4e}", dI.max_rel, closed);
    }
    fmt::print(ctx.out, "\n");
    r["trajectories"].push_back(t);
  }
  if (halted) return kExitDomainError;
  return breach ? kExitToleranceBreach : kExitPass;
}

// ------------------------------------------------------------------- trace

int cmd_trace(Context& ctx) {
  const RunSettings& run = ctx.sc.run;
  const FieldSpec spec = build_spec(ctx.sc);
  const std::vector<Vec3d>& seeds = run.seeds.empty() ? run.x0 : run.seeds;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const DomainStatus st = domain_check(spec, seeds[i]);
    if (!st.ok)
      throw ConfigError(fmt::format("[run] seed point #{} is outside the field domain ({})", i, st.reason),
                        0, run.seeds.empty() ? "x0" : "seeds");
  }

  std::vector<FieldLine> lines(seeds.size());
  std::vector<std::string> halted(seeds.size());
  std::exception_ptr error;
  const auto m = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    try {
      lines[i] = trace_field_line(spec, seeds[i], run.ds, run.steps, run.normalized);
    } catch (const FieldLineHalted& e) {
      lines[i] = e.partial();
      halted[i] = e.what();
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  const SymmetryParams& p = spec.params();
  const bool fieldline_symmetry = p.c == 0.0 && p.h11 == 0.0;
  const auto pre = integral_precondition(spec);
  json& r = ctx.report;
  r["case"] = std::string(to_string(spec.symmetry_case()));
  r["drift_tol"] = run.drift_tol;
  r["tolerance"] = run.tol;
  if (pre) r["integral_Im"] = fmt::format("unavailable: {}", *pre);
  r["lines"] = json::array();
  bool any_halted = false, breach = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const FieldLine& line = lines[i];
    const std::string stem = fmt::format("fieldline_{}", i);
    write_pair(ctx, stem, line);
    json l;
    l["file"] = stem + ".csv";
    l["points"] = line.x.size();
    l["complete"] = halted[i].empty();
    fmt::print(ctx.out, "line {}: {} points", i, line.x.size());
    if (!halted[i].empty()) {
      any_halted = true;
      l["halted"] = halted[i];
      fmt::print(ctx.err, "line {}: {}\n", i, halted[i]);
    }
    if (!line.Im.empty()) {
      const DriftStats d = drift_stats(line.Im);
      l["I_m"] = drift_json(d);
      breach = breach || d.max_rel > run.drift_tol;
      fmt::print(ctx.out, ", I_m drift max {:.4e}", d.max_rel);
    }
    if (fieldline_symmetry) {
      double worst = 0.0;
      for (const Vec3d& x : line.x) {
        const FieldJet f = field_jet(spec, x);
        worst = std::max(worst, norm(residual_fieldline_symmetry(p, f.B, f.dB, x)));
      }
      l["fieldline_symmetry_max_abs"] = worst;
      breach = breach || worst > run.tol;
      fmt::print(ctx.out, ", symmetry residual {:.4e}", worst);
    }
    fmt::print(ctx.out, "\n");
    r["lines"].push_back(l);
  }
  if (any_halted) return kExitDomainError;
  return breach ? kExitToleranceBreach : kExitPass;
}

// -------------------------------------------------------------------- flow

int cmd_flow(Context& ctx) {
  const RunSettings& run = ctx.sc.run;
  const FieldSpec spec = build_spec(ctx.sc);
  json& r = ctx.report;
  r["case"] = std::string(to_string(spec.symmetry_case()));

  Trajectory base;
  if (!run.trajectory.empty()) {
    const fs::path path = ctx.sc.base_dir / run.trajectory;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("[run] trajectory: cannot read '{}'", path.string()), 0, "trajectory");
    try {
      base = read_csv(in);
    } catch (const std::runtime_error& e) {
      throw ConfigError(fmt::format("[run] trajectory: {}", e.what()), 0, "trajectory");
    }
    r["source"] = "file";
  } else {
    const State s0{run.t0, run.x0[0], run.v0[0]};
    const DomainStatus st = domain_check(spec, s0.x);
    if (!st.ok) throw ConfigError(fmt::format("[run] x0 is outside the field domain ({})", st.reason), 0, "x0");
    try {
      base = integrate(spec, s0, run.dt, run.steps, run.integrator);
    } catch (const TrajectoryHalted& e) {
      r["error"] = e.what();
      fmt::print(ctx.err, "{}\n", e.what());
      write_pair(ctx, "flow_base", e.partial());
      return kExitDomainError;
    }
    r["source"] = "simulated";
  }

  const bool control = ctx.sc.flow.has_value();
  const SymmetryParams gen = control ? *ctx.sc.flow : ctx.sc.params;
  r["generator"] = control ? "flow section" : "scenario params";
  const double baseline = trajectory_ode_residual(spec, base);
  r["baseline_residual"] = baseline;
  r["ratio_limit"] = run.flow_ratio;
  r["checked"] = !control;
  fmt::print(ctx.out, "baseline ODE residual {:.6e}{}\n", baseline,
             control ? " (control generator: residuals reported only)" : "");
  r["transports"] = json::array();
  bool breach = false;
  for (std::size_t i = 0; i < run.eps.size(); ++i) {
    const double eps = run.eps[i];
    const Trajectory moved = transport_trajectory(gen, eps, base);
    const double res = trajectory_ode_residual(spec, moved);
    const double ratio = baseline > 0.0 ? res / baseline : (res == 0.0 ? 1.0 : INFINITY);
    const bool checked = !control && std::fabs(eps) <= 0.1;
    const bool ok = !checked || ratio <= run.flow_ratio;
    breach = breach || !ok;
    const std::string stem = fmt::format("flow_{}", i);
    write_pair(ctx, stem, moved);
    json t{{"eps", eps}, {"residual", res}, {"file", stem + ".csv"}};
    t["ratio"] = std::isfinite(ratio) ? json(ratio) : json(nullptr);
    t["status"] = checked ? (ok ? "pass" : "fail") : "reported";
    r["transports"].push_back(t);
    fmt::print(ctx.out, "eps {:<8g} residual {:.6e} ratio {:.4f} {}\n", eps, res, ratio,
               checked ? (ok ? "PASS" : "FAIL") : "");
  }
  return breach ? kExitToleranceBreach : kExitPass;
}

}  // namespace

int run_command(std::string_view command, const CommandOptions& opts, std::ostream& out,
                std::ostream& err) {
  int (*fn)(Context&) = nullptr;
  if (command == "classify") fn = cmd_classify;
  else if (command == "verify") fn = cmd_verify;
  else if (command == "simulate") fn = cmd_simulate;
  else if (command == "trace") fn = cmd_trace;
  else if (command == "flow") fn = cmd_flow;
  else {
    fmt::print(err, "error: unknown command '{}'\n", command);
    return kExitConfigError;
  }

  json report;
  Scenario sc;
  try {
    sc = load_scenario(opts.scenario);
    if (opts.tol) {
      if (!(*opts.tol > 0.0)) throw ConfigError("--tol must be positive");
      sc.run.tol = *opts.tol;
    }
    if (opts.seed) sc.run.seed = *opts.seed;
    std::error_code ec;
    fs::create_directories(opts.out, ec);
    if (ec || !fs::is_directory(opts.out))
      throw ConfigError(fmt::format("cannot create output directory '{}'", opts.out.string()));
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  }

  report["version"] = 1;
  report["command"] = std::string(command);
  report["scenario"] = scenario_echo(sc);
  int code = kExitPass;
  Context ctx{sc, opts.out, out, err, report};
  try {
    code = fn(ctx);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const SpecError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const SamplingExhausted& e) {
    report["error"] = e.what();
    fmt::print(err, "error: {}\n", e.what());
    code = kExitDomainError;
  } catch (const std::domain_error& e) {
    report["error"] = e.what();
    fmt::print(err, "domain error: {}\n", e.what());
    code = kExitDomainError;
  }
  report["exit_code"] = code;
  report["status"] = std::string(status_name(code));
  try {
    auto f = open_output(opts.out / fmt::format("{}_report.json", command));
    f << report.dump(2) << '\n';
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  }
  fmt::print(out, "{}: {}\n", command, status_name(code));
  return code;
}

}  // namespace symlorentz
