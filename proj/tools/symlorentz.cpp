// symlorentz <classify|verify|simulate|trace|flow> --scenario <path>
//            [--out <dir>] [--tol <x>] [--seed <n>]
//
// Units: q = m = 1, so the equations of motion read x'' = x' x B + E.
// Exit codes: 0 pass, 1 tolerance breach, 2 config error, 3 domain error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "symlorentz/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lorentz-force fields with a prescribed point symmetry: classify, verify, simulate, "
               "trace and transport (units with q = m = 1)"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");

  symlorentz::CommandOptions opts;
  std::string out = opts.out.string();
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;

  const char* descriptions[][2] = {
      {"classify", "print the symmetry case, generator matrix, eigenframe and center"},
      {"verify", "sample every applicable residual suite at random jets"},
      {"simulate", "integrate particle trajectories and report drift of H and I"},
      {"trace", "trace magnetic field lines and report drift of I_m"},
      {"flow", "transport a trajectory by the symmetry flow and re-check the equations of motion"},
  };
  for (auto& d : descriptions) {
    CLI::App* sub = app.add_subcommand(d[0], d[1]);
    sub->add_option("--scenario", opts.scenario, "scenario file")->required();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--tol", tol, "residual tolerance (overrides [run] tol)");
    sub->add_option("--seed", seed, "sampling seed (overrides [run] seed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : symlorentz::kExitConfigError;
  }

  opts.out = out;
  opts.tol = tol;
  opts.seed = seed;
  const std::string command = app.get_subcommands().front()->get_name();
  return symlorentz::run_command(command, opts, std::cout, std::cerr);
}
