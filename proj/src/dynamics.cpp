#include "symlorentz/dynamics.hpp"

#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace symlorentz {

std::string_view to_string(Integrator integrator) {
  return integrator == Integrator::RK4 ? "rk4" : "boris";
}

namespace {

bool finite(const Vec3d& a) {
  return std::isfinite(a[0]) && std::isfinite(a[1]) && std::isfinite(a[2]);
}

// Field evaluation that reports leaving the domain as an empty optional.
std::optional<FieldValue> try_field(const FieldSpec& spec, const Vec3d& x) {
  if (!finite(x)) return std::nullopt;
  try {
    FieldValue f = field_value(spec, x);
    if (!finite(f.B) || !finite(f.E)) return std::nullopt;
    return f;
  } catch (const FieldDomainError&) {
    return std::nullopt;
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

struct Deriv {
  Vec3d dx, dv;
};

void check_step(double dt, std::size_t n) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument(fmt::format("dt must be positive, got {}", dt));
  if (n < 1) throw std::invalid_argument("step count must be at least 1");
}

// Appends a state with its invariants, or reports failure when they cannot
// be evaluated there.
bool record(const FieldSpec& spec, bool with_I, Trajectory& tr, const State& s) {
  try {
    const double H = hamiltonian(spec, s);
    const double I = with_I ? integral_I(spec, s) : 0.0;
    if (!std::isfinite(H) || !std::isfinite(I)) return false;
    tr.states.push_back(s);
    tr.H.push_back(H);
    if (with_I) tr.I.push_back(I);
    return true;
  } catch (const FieldDomainError&) {
    return false;
  } catch (const EvalError&) {
    return false;
  }
}

[[noreturn]] void halt(Trajectory&& tr, std::size_t step, const State& s) {
  throw TrajectoryHalted(
      "domain exit",
      fmt::format("trajectory left the field domain at step {} near x = ({}, {}, {})", step, s.x[0],
                  s.x[1], s.x[2]),
      std::move(tr));
}

Trajectory start(const FieldSpec& spec, const State& s0, double dt, Integrator integ, bool with_I) {
  Trajectory tr;
  tr.dt = dt;
  tr.integrator = integ;
  if (!try_field(spec, s0.x) || !record(spec, with_I, tr, s0)) halt(std::move(tr), 0, s0);
  return tr;
}

// Rotation of v about b by the angle -|b| dt, the exact solution of
// v' = v x b over dt.
Vec3d rotate(const Vec3d& v, const Vec3d& b, double dt) {
  const double bn = norm(b);
  if (bn == 0.0) return v;
  const Vec3d k = (1.0 / bn) * b;
  const double th = -bn * dt;
  const double c = std::cos(th), s = std::sin(th);
  return c * v + s * cross(k, v) + ((1.0 - c) * dot(k, v)) * k;
}

Vec3d boris_push(const Vec3d& v, const FieldValue& f, double dt) {
  const Vec3d minus = v + (0.5 * dt) * f.E;
  return rotate(minus, f.B, dt) + (0.5 * dt) * f.E;
}

}  // namespace

std::optional<std::string> integral_precondition(const FieldSpec& spec) {
  const SymmetryParams& p = spec.params();
  if (p.c != 0.0) return "c≠0";
  if (p.h11 != 0.0) return "h11≠0";
  if (spec.k() != 0.0) return "k≠0";
  const SymmetryCase k = spec.symmetry_case();
  if (k != SymmetryCase::Case2 && k != SymmetryCase::Case4 && k != SymmetryCase::Case5)
    return fmt::format("wrong case ({})", to_string(k));
  return std::nullopt;
}

Vec3d lorentz_rhs(const FieldSpec& spec, const State& s) {
  const FieldValue f = field_value(spec, s.x);
  return cross(s.v, f.B) + f.E;
}

Trajectory integrate_rk4(const FieldSpec& spec, const State& s0, double dt, std::size_t n) {
  check_step(dt, n);
  const bool with_I = !integral_precondition(spec);
  Trajectory tr = start(spec, s0, dt, Integrator::RK4, with_I);
  tr.states.reserve(n + 1);
  tr.H.reserve(n + 1);
  State s = s0;
  auto f = [&](const Vec3d& x, const Vec3d& v) -> std::optional<Deriv> {
    const auto fv = try_field(spec, x);
    if (!fv) return std::nullopt;
    return Deriv{v, cross(v, fv->B) + fv->E};
  };
  for (std::size_t i = 1; i <= n; ++i) {
    const auto k1 = f(s.x, s.v);
    const auto k2 = k1 ? f(s.x + (0.5 * dt) * k1->dx, s.v + (0.5 * dt) * k1->dv) : std::nullopt;
    const auto k3 = k2 ? f(s.x + (0.5 * dt) * k2->dx, s.v + (0.5 * dt) * k2->dv) : std::nullopt;
    const auto k4 = k3 ? f(s.x + dt * k3->dx, s.v + dt * k3->dv) : std::nullopt;
    if (!k4) halt(std::move(tr), i, s);
    State next;
    next.x = s.x + (dt / 6.0) * (k1->dx + 2.0 * k2->dx + 2.0 * k3->dx + k4->dx);
    next.v = s.v + (dt / 6.0) * (k1->dv + 2.0 * k2->dv + 2.0 * k3->dv + k4->dv);
    next.t = s0.t + static_cast<double>(i) * dt;
    if (!try_field(spec, next.x) || !record(spec, with_I, tr, next)) halt(std::move(tr), i, next);
    s = next;
  }
  return tr;
}

Trajectory integrate_boris(const FieldSpec& spec, const State& s0, double dt, std::size_t n) {
  check_step(dt, n);
  const bool with_I = !integral_precondition(spec);
  Trajectory tr = start(spec, s0, dt, Integrator::Boris, with_I);
  tr.states.reserve(n + 1);
  tr.H.reserve(n + 1);
  Vec3d x = s0.x;
  FieldValue fx = *try_field(spec, x);
  Vec3d v_half = boris_push(s0.v, fx, -0.5 * dt);
  for (std::size_t i = 1; i <= n; ++i) {
    v_half = boris_push(v_half, fx, dt);
    x = x + dt * v_half;
    const auto f = try_field(spec, x);
    State s{s0.t + static_cast<double>(i) * dt, x, v_half};
    if (!f) halt(std::move(tr), i, s);
    fx = *f;
    s.v = boris_push(v_half, fx, 0.5 * dt);
    if (!record(spec, with_I, tr, s)) halt(std::move(tr), i, s);
  }
  return tr;
}

Trajectory integrate(const FieldSpec& spec, const State& s0, double dt, std::size_t n,
                     Integrator integrator) {
  return integrator == Integrator::RK4 ? integrate_rk4(spec, s0, dt, n)
                                       : integrate_boris(spec, s0, dt, n);
}

BatchResult integrate_batch(const FieldSpec& spec, const std::vector<State>& starts, double dt,
                            std::size_t n, Integrator integrator) {
  check_step(dt, n);
  BatchResult r;
  r.trajectories.resize(starts.size());
  r.halted.resize(starts.size());
  std::exception_ptr error;
  const auto m = static_cast<std::ptrdiff_t>(starts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    try {
      r.trajectories[i] = integrate(spec, starts[i], dt, n, integrator);
    } catch (const TrajectoryHalted& e) {
      r.trajectories[i] = e.partial();
      r.halted[i] = e.what();
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return r;
}

FieldLine trace_field_line(const FieldSpec& spec, const Vec3d& x0, double ds, std::size_t n,
                           bool normalized) {
  check_step(ds, n);
  const bool with_Im = !integral_precondition(spec);
  FieldLine line;
  line.ds = ds;
  line.normalized = normalized;
  std::string why;
  auto dir = [&](const Vec3d& x) -> std::optional<Vec3d> {
    const auto f = try_field(spec, x);
    if (!f) {
      why = "domain exit";
      return std::nullopt;
    }
    const double b = norm(f->B);
    if (b < 1e-12) {
      why = "zero field";
      return std::nullopt;
    }
    return normalized ? (1.0 / b) * f->B : f->B;
  };
  auto stop = [&](std::size_t step, const Vec3d& x) {
    throw FieldLineHalted(why,
                          fmt::format("field line stopped ({}) at step {} near x = ({}, {}, {})",
                                      why, step, x[0], x[1], x[2]),
                          std::move(line));
  };
  auto push = [&](double tau, const Vec3d& x, std::size_t step) {
    double Im = 0.0;
    if (with_Im) {
      try {
        Im = integral_Im(spec, x);
      } catch (const std::domain_error&) {
        why = "domain exit";
        stop(step, x);
      }
    }
    line.tau.push_back(tau);
    line.x.push_back(x);
    if (with_Im) line.Im.push_back(Im);
  };
  if (!dir(x0)) stop(0, x0);
  push(0.0, x0, 0);
  Vec3d x = x0;
  for (std::size_t i = 1; i <= n; ++i) {
    const auto k1 = dir(x);
    const auto k2 = k1 ? dir(x + (0.5 * ds) * *k1) : std::nullopt;
    const auto k3 = k2 ? dir(x + (0.5 * ds) * *k2) : std::nullopt;
    const auto k4 = k3 ? dir(x + ds * *k3) : std::nullopt;
    if (!k4) stop(i, x);
    x = x + (ds / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
    if (!dir(x)) stop(i, x);
    push(static_cast<double>(i) * ds, x, i);
  }
  return line;
}

double hamiltonian(const FieldSpec& spec, const State& s) {
  return 0.5 * dot(s.v, s.v) + scalar_potential(spec, s.x);
}

namespace {

void require_integral(const FieldSpec& spec) {
  if (auto why = integral_precondition(spec))
    throw InvariantPrecondition(fmt::format("linear integral unavailable: {}", *why));
}

Vec3d generator_vector(const FieldSpec& spec, const Vec3d& x) {
  const GeneratorMatrix g = generator_matrix(spec.params());
  return g.H * x + g.h;
}

}  // namespace

double integral_I(const FieldSpec& spec, const State& s) {
  require_integral(spec);
  return dot(generator_vector(spec, s.x), s.v + vector_potential(spec, s.x));
}

double integral_I_closed_form(const FieldSpec& spec, const State& s) {
  require_integral(spec);
  const SymmetryParams& p = spec.params();
  const FieldFunctions& fn = spec.functions();
  const auto [u, v] = characteristics(spec, s.x);
  const double flow = dot(generator_vector(spec, s.x), s.v);
  switch (spec.symmetry_case()) {
    case SymmetryCase::Case2: {
      const double h = spec.rotation_rate();
      const double r = transform_coords(spec, s.x).xt;
      return flow - h * h * r * r * eval(fn.F2, u, v) +
             h * spec.axial_translation() * eval(fn.F3, u, v);
    }
    case SymmetryCase::Case4: {
      const double r = transform_coords(spec, s.x).xt;
      return flow - p.h12 * r * r * eval(fn.F2, u, v) + p.h3 * eval(fn.F3, u, v);
    }
    default: {
      // Case5: the functions sit on the cycled axes.
      const Vec3d h = p.translation();
      const int sh = spec.axis_shift();
      return flow + h[sh % 3] * eval(fn.F1, u, v) + h[(sh + 1) % 3] * eval(fn.F2, u, v) +
             h[(sh + 2) % 3] * eval(fn.F3, u, v);
    }
  }
}

double integral_Im(const FieldSpec& spec, const Vec3d& x) {
  require_integral(spec);
  return dot(generator_vector(spec, x), vector_potential(spec, x));
}

Trajectory transport_trajectory(const SymmetryParams& params, double eps, const Trajectory& traj) {
  const Mat3d R = flow_matrix(params, eps);
  const double rate = params.time_rate();
  const double vscale = std::exp(-rate * eps);
  Trajectory out;
  out.dt = traj.dt * std::exp(rate * eps);
  out.integrator = traj.integrator;
  out.states.reserve(traj.states.size());
  for (const State& s : traj.states) {
    const FlowPoint fp = symmetry_flow(params, eps, s.t, s.x);
    out.states.push_back({fp.t, fp.x, vscale * (R * s.v)});
  }
  return out;
}

double trajectory_ode_residual(const FieldSpec& spec, const Trajectory& traj) {
  const auto& st = traj.states;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < st.size(); ++i) {
    const double span = st[i + 1].t - st[i - 1].t;
    const Vec3d dx = (1.0 / span) * (st[i + 1].x - st[i - 1].x);
    const Vec3d dv = (1.0 / span) * (st[i + 1].v - st[i - 1].v);
    const double rx = norm(dx - st[i].v);
    const double rv = norm(dv - lorentz_rhs(spec, st[i]));
    worst = std::max({worst, rx, rv});
  }
  return worst;
}

std::size_t cut_crossings(const FieldSpec& spec, const Trajectory& traj) {
  if (spec.symmetry_case() == SymmetryCase::Case5) return 0;
  std::size_t n = 0;
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    const double a = transform_coords(spec, traj.states[i - 1].x).yt;
    const double b = transform_coords(spec, traj.states[i].x).yt;
    if (std::fabs(b - a) > std::numbers::pi) ++n;
  }
  return n;
}

DriftStats drift_stats(const std::vector<double>& series) {
  if (series.empty()) throw std::invalid_argument("drift of an empty series");
  const double first = series.front();
  const double ref = std::max(std::fabs(first), 1e-30);
  DriftStats d;
  for (double x : series) d.max_rel = std::max(d.max_rel, std::fabs(x - first) / ref);
  d.final_rel = std::fabs(series.back() - first) / ref;
  return d;
}

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

void write_csv(std::ostream& os, const Trajectory& traj) {
  const bool with_I = !traj.I.empty();
  const bool with_H = !traj.H.empty();
  os << "t,x,y,z,vx,vy,vz" << (with_H ? ",H" : "") << (with_I ? ",I" : "") << '\n';
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const State& s = traj.states[i];
    os << num(s.t);
    for (int j = 0; j < 3; ++j) os << ',' << num(s.x[j]);
    for (int j = 0; j < 3; ++j) os << ',' << num(s.v[j]);
    if (with_H) os << ',' << num(traj.H[i]);
    if (with_I) os << ',' << num(traj.I[i]);
    os << '\n';
  }
}

void write_csv(std::ostream& os, const FieldLine& line) {
  const bool with_Im = !line.Im.empty();
  os << "tau,x,y,z" << (with_Im ? ",I_m" : "") << '\n';
  for (std::size_t i = 0; i < line.tau.size(); ++i) {
    os << num(line.tau[i]);
    for (int j = 0; j < 3; ++j) os << ',' << num(line.x[i][j]);
    if (with_Im) os << ',' << num(line.Im[i]);
    os << '\n';
  }
}

namespace {

void json_array(std::ostream& os, const std::vector<double>& a) {
  os << '[';
  for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << num(a[i]);
  os << ']';
}

void json_vec(std::ostream& os, const Vec3d& a) {
  os << '[' << num(a[0]) << ',' << num(a[1]) << ',' << num(a[2]) << ']';
}

}  // namespace

void write_json(std::ostream& os, const Trajectory& traj) {
  os << "{\"version\":1,\"integrator\":\"" << to_string(traj.integrator) << "\",\"dt\":"
     << num(traj.dt) << ",\"states\":[";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const State& s = traj.states[i];
    os << (i ? "," : "") << "{\"t\":" << num(s.t) << ",\"x\":";
    json_vec(os, s.x);
    os << ",\"v\":";
    json_vec(os, s.v);
    os << '}';
  }
  os << "],\"H\":";
  json_array(os, traj.H);
  os << ",\"I\":";
  json_array(os, traj.I);
  os << "}\n";
}

void write_json(std::ostream& os, const FieldLine& line) {
  os << "{\"version\":1,\"ds\":" << num(line.ds)
     << ",\"normalized\":" << (line.normalized ? "true" : "false") << ",\"tau\":";
  json_array(os, line.tau);
  os << ",\"x\":[";
  for (std::size_t i = 0; i < line.x.size(); ++i) {
    os << (i ? "," : "");
    json_vec(os, line.x[i]);
  }
  os << "],\"I_m\":";
  json_array(os, line.Im);
  os << "}\n";
}

Trajectory read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,x,y,z,vx,vy,vz", 0) != 0)
    throw std::runtime_error("trajectory CSV must start with the header t,x,y,z,vx,vy,vz");
  Trajectory tr;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    double f[7];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 7; ++i) {
      auto [q, ec] = std::from_chars(p, end, f[i]);
      if (ec != std::errc() || (q != end && *q != ',') || (i < 6 && q == end))
        throw std::runtime_error(fmt::format("trajectory CSV row {}: malformed number", row));
      p = q == end ? q : q + 1;
    }
    tr.states.push_back({f[0], {f[1], f[2], f[3]}, {f[4], f[5], f[6]}});
  }
  if (tr.states.size() < 3) throw std::runtime_error("trajectory CSV needs at least three states");
  for (std::size_t i = 1; i < tr.states.size(); ++i)
    if (!(tr.states[i].t > tr.states[i - 1].t))
      throw std::runtime_error(fmt::format("trajectory CSV row {}: times must increase", i + 2));
  tr.dt = tr.states[1].t - tr.states[0].t;
  return tr;
}

}  // namespace symlorentz
