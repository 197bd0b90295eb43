#pragma once

// Charged-particle trajectories x'' = x' x B + E (q = m = 1), magnetic field
// lines dx/dtau = B, the conserved quantities along them, and transport of
// trajectories by the finite symmetry flow.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symlorentz/field_builder.hpp"
#include "symlorentz/sym_algebra.hpp"

namespace symlorentz {

struct State {
  double t = 0.0;
  Vec3d x{};
  Vec3d v{};
};

enum class Integrator { RK4, Boris };

std::string_view to_string(Integrator integrator);

struct Trajectory {
  std::vector<State> states;
  double dt = 0.0;
  Integrator integrator = Integrator::RK4;
  std::vector<double> H;  // one per state
  std::vector<double> I;  // empty unless the linear integral exists
};

struct FieldLine {
  std::vector<double> tau;
  std::vector<Vec3d> x;
  std::vector<double> Im;  // empty unless the field-line integral exists
  double ds = 0.0;
  bool normalized = false;
};

/// Integration stopped early. partial() holds everything up to the last
/// valid point; reason() is "domain exit" or "zero field".
template <class Path>
class Halted : public std::runtime_error {
 public:
  Halted(std::string reason, const std::string& what, Path partial)
      : std::runtime_error(what), reason_(std::move(reason)), partial_(std::move(partial)) {}
  const std::string& reason() const noexcept { return reason_; }
  const Path& partial() const noexcept { return partial_; }

 private:
  std::string reason_;
  Path partial_;
};

using TrajectoryHalted = Halted<Trajectory>;
using FieldLineHalted = Halted<FieldLine>;

/// The linear integral needs c = 0, h11 = 0, k = 0 and Case2, 4 or 5.
class InvariantPrecondition : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Empty when integral_I applies, else the first failing condition.
std::optional<std::string> integral_precondition(const FieldSpec& spec);

Vec3d lorentz_rhs(const FieldSpec& spec, const State& s);

/// n steps of size dt; n + 1 states. Throws TrajectoryHalted on leaving the
/// domain and std::invalid_argument for dt <= 0 or n < 1.
Trajectory integrate_rk4(const FieldSpec& spec, const State& s0, double dt, std::size_t n);

/// Staggered leapfrog: v at half steps, exact rotation about B. Recorded
/// velocities are synchronized to the positions by a half push.
Trajectory integrate_boris(const FieldSpec& spec, const State& s0, double dt, std::size_t n);

Trajectory integrate(const FieldSpec& spec, const State& s0, double dt, std::size_t n,
                     Integrator integrator);

/// Independent trajectories, computed concurrently. Result i is either a
/// complete trajectory or the partial one of a halted run (halted[i] set).
struct BatchResult {
  std::vector<Trajectory> trajectories;
  std::vector<std::string> halted;  // empty string when complete
};

BatchResult integrate_batch(const FieldSpec& spec, const std::vector<State>& starts, double dt,
                            std::size_t n, Integrator integrator);

/// RK4 on dx/dtau = B, or B/|B| (arclength) when normalized. Throws
/// FieldLineHalted when |B| < 1e-12 at a stage point or the line leaves the
/// domain.
FieldLine trace_field_line(const FieldSpec& spec, const Vec3d& x0, double ds, std::size_t n,
                           bool normalized);

/// 0.5 |v|^2 + Phi(x)
double hamiltonian(const FieldSpec& spec, const State& s);

/// phi . (v + A). Throws InvariantPrecondition.
double integral_I(const FieldSpec& spec, const State& s);

/// The same integral written directly in the functions F2, F3 (Case2, 4)
/// or F (Case5) at the characteristics of x.
double integral_I_closed_form(const FieldSpec& spec, const State& s);

/// phi . A, constant along field lines. Throws InvariantPrecondition.
double integral_Im(const FieldSpec& spec, const Vec3d& x);

/// Maps every state by the finite flow: (t, x) by symmetry_flow, and
/// v' = exp(eps H) v exp(-(2 h11 - c) eps). The step becomes
/// dt exp((2 h11 - c) eps). Invariant columns are dropped.
Trajectory transport_trajectory(const SymmetryParams& params, double eps, const Trajectory& traj);

/// Largest defect of the equations of motion when the samples are
/// re-differentiated by central differences: max over interior states of
/// |dx/dt - v| and |dv/dt - (v x B + E)|.
double trajectory_ode_residual(const FieldSpec& spec, const Trajectory& traj);

/// Steps across which the principal angle yt jumps by more than pi, i.e.
/// crossings of the cut (always 0 for Case5).
std::size_t cut_crossings(const FieldSpec& spec, const Trajectory& traj);

struct DriftStats {
  double max_rel = 0.0;
  double final_rel = 0.0;
};

/// Deviation from the first value relative to max(|first|, 1e-30).
DriftStats drift_stats(const std::vector<double>& series);

/// Columns t, x, y, z, vx, vy, vz, H[, I]; 17 significant digits.
void write_csv(std::ostream& os, const Trajectory& traj);
/// Columns tau, x, y, z[, I_m].
void write_csv(std::ostream& os, const FieldLine& line);
void write_json(std::ostream& os, const Trajectory& traj);
void write_json(std::ostream& os, const FieldLine& line);

/// Reads the columns t, x, y, z, vx, vy, vz written by write_csv; the step
/// is taken from the first two times. Throws std::runtime_error.
Trajectory read_csv(std::istream& is);

}  // namespace symlorentz
