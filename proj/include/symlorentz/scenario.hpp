#pragma once

// Scenario files: a sectioned key = value format.
//
//   [params]     h11 h12 h23 h31 h1 h2 h3 c k h0   (or k1 k2 k3 for Case1)
//   [functions]  F1 F2 F3 G                         (expressions in u, v)
//   [run]        command settings, see RunSettings
//   [flow]       optional generator for `flow`, same keys as [params]
//
// '#' starts a comment anywhere, ';' only at the start of a line. Vectors are
// comma-separated; lists of vectors are separated by ';'.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "symlorentz/dynamics.hpp"
#include "symlorentz/field_builder.hpp"
#include "symlorentz/sym_algebra.hpp"

namespace symlorentz {

/// Bad scenario text. line() is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0, std::string key = {})
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

struct RunSettings {
  std::vector<Vec3d> x0{{1.0, 0.0, 0.0}};
  std::vector<Vec3d> v0{{0.0, 1.0, 0.0}};
  double t0 = 0.0;
  double dt = 1e-3;
  std::size_t steps = 1000;
  Integrator integrator = Integrator::RK4;

  Vec3d box_lo{-1.0, -1.0, -1.0};
  Vec3d box_hi{1.0, 1.0, 1.0};
  double speed = 1.0;
  double axis_margin = 0.0;
  double cut_margin = 1e-3;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;

  double tol = 1e-8;
  double drift_tol = 1e-7;

  std::vector<Vec3d> seeds;  // field-line start points; x0 when empty
  double ds = 1e-3;
  bool normalized = false;

  std::vector<double> eps{0.0, 0.05, 0.1};
  double flow_ratio = 3.0;
  std::string trajectory;  // CSV to transport instead of simulating

  double corrupt_a = 0.0;
};

struct Scenario {
  SymmetryParams params;
  bool center_given = false;  // Case1 k1, k2, k3
  Vec3d center{};
  double k = 0.0;
  std::string F1 = "0", F2 = "0", F3 = "0", G = "0";
  RunSettings run;
  std::optional<SymmetryParams> flow;
  std::filesystem::path base_dir;  // relative paths resolve here
};

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Parses the four functions; ConfigError names the key and offset.
FieldFunctions parse_functions(const Scenario& sc);

/// FieldSpec for the scenario, with the debug corruption applied.
FieldSpec build_spec(const Scenario& sc);

/// Every setting with defaults filled in.
nlohmann::ordered_json scenario_echo(const Scenario& sc);

}  // namespace symlorentz
