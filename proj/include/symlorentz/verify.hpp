#pragma once

// Pointwise residuals of the symmetry and constraint equations, and seeded
// sampling that aggregates them into reports.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symlorentz/field_builder.hpp"
#include "symlorentz/sym_algebra.hpp"

namespace symlorentz {

/// First-order jet (t, x, xdot) at which the prolongation is evaluated.
struct JetSample {
  double t = 0.0;
  Vec3d x;
  Vec3d xdot;
};

/// Second prolongation of the generator applied to
/// xddot_i - eps_ijk xdot_j B_k - E_i, with xddot replaced by the Lorentz
/// right-hand side.
Vec3d residual_lie(const SymmetryParams& params, const FieldJet& field, const JetSample& jet);

/// (H x + h).grad B_i - (c - 3 h11) B_i - (H B)_i
Vec3d residual_B(const SymmetryParams& params, const Vec3d& B, const Mat3d& dB, const Vec3d& x);
/// (H x + h).grad E_i - (2c - 4 h11) E_i - (H E)_i
Vec3d residual_E(const SymmetryParams& params, const Vec3d& E, const Mat3d& dE, const Vec3d& x);
/// (H x + h).grad A_i - (c - 2 h11) A_i - (H A)_i
Vec3d residual_A(const FieldSpec& spec, const Vec3d& x);
/// (H x + h).grad Phi - 2 (c - h11) Phi + k
double residual_Phi(const FieldSpec& spec, const Vec3d& x);
/// (H x + h).grad B_i - (H B)_i: symmetry of the field-line flow dx/dtau = B.
Vec3d residual_fieldline_symmetry(const SymmetryParams& params, const Vec3d& B, const Mat3d& dB,
                                  const Vec3d& x);

enum class ResidualKind { Lie, B, E, A, Phi, FieldLine, Noether };

std::string_view to_string(ResidualKind kind);

struct ResidualReport {
  std::string tag;
  std::size_t n = 0;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  double max_rel = 0.0;
  Vec3d worst_point{};
  /// Set when the suite rejects the spec outright (e.g. the Noether gate).
  std::string failure;

  bool passed(double tol) const { return failure.empty() && max_abs <= tol; }
};

/// Axis-aligned sampling region. Velocities for Lie jets are drawn from
/// [-speed, speed]^3. Points closer than axis_margin to the axis or within
/// cut_margin radians of the angle cut are rejected (Cases 1-4).
struct SampleBox {
  Vec3d lo{-1.0, -1.0, -1.0};
  Vec3d hi{1.0, 1.0, 1.0};
  double speed = 1.0;
  double axis_margin = 0.0;
  double cut_margin = 1e-3;
};

class SamplingExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Draws n in-domain jets. Candidate i consumes seven uniforms in order
/// (x, y, z, xdot_x, xdot_y, xdot_z, t). Gives up after 10 n candidates.
std::vector<JetSample> sample_jets(const FieldSpec& spec, const SampleBox& box, std::size_t n,
                                   std::uint64_t seed);

/// Single-threaded reference for sample_jets; returns the same list.
std::vector<JetSample> sample_jets_serial(const FieldSpec& spec, const SampleBox& box, std::size_t n,
                                          std::uint64_t seed);

struct PointResidual {
  double abs;    // norm of the residual
  double scale;  // magnitude of the dominant term
};

/// One residual at one jet. `generator` defaults to spec.params(); pass other
/// parameters to test a symmetry the field was not built for.
PointResidual point_residual(ResidualKind kind, const FieldSpec& spec, const JetSample& jet,
                             const SymmetryParams& generator);

struct ReportOptions {
  std::optional<SymmetryParams> generator;
};

/// Seeded report. Residuals are computed in parallel and reduced in sample
/// order, so the result is bitwise identical to sample_report_serial.
ResidualReport sample_report(ResidualKind kind, const FieldSpec& spec, const SampleBox& box,
                             std::size_t n, std::uint64_t seed, const ReportOptions& opts = {});

/// Single-threaded reference for sample_report.
ResidualReport sample_report_serial(ResidualKind kind, const FieldSpec& spec, const SampleBox& box,
                                    std::size_t n, std::uint64_t seed,
                                    const ReportOptions& opts = {});

/// Noether gate: fails with "not Noether: c≠0" when c != 0; otherwise the
/// combined residuals of the potential constraints over the samples.
ResidualReport residual_noether(const FieldSpec& spec, const SampleBox& box, std::size_t n,
                                std::uint64_t seed);

}  // namespace symlorentz
