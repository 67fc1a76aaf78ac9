// dirac1d: relativistic square-barrier scattering from the command line.
//
//   dirac1d scan          --V 4 --S -2.5 --a 2 --m 1 [--emin --emax --points]
//   dirac1d resonances    --V 3 --S -3 --a 2 [--emax 10]
//   dirac1d supercritical --V 3 --a 2 --m 1
//   dirac1d sweep         --V 5 --a 2 --sfrom -6 --sto 4 --ssteps 101 --out frames/
//   dirac1d oracle-check  --config profile.json [--points 1000]
//   dirac1d bands         --V 4 --S -2.5 --a 2 [--threshold 0.9]
//
// Exit codes: 0 success, 1 usage error, 2 validation error, 3 oracle-check failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <dirac1d/dirac1d.hpp>

namespace {

using namespace dirac1d;

struct Options {
  std::string config_path;
  std::optional<double> V, S, a, m;
  std::optional<double> emin, emax;
  std::size_t points = 4096;
  double threshold = 0.9;
  std::string format = "csv";
  std::string out;

  double S_from = -6.0, S_to = 4.0;
  std::size_t S_steps = 101;
};

void add_system_options(CLI::App *cmd, Options &opt, bool with_scalar = true) {
  cmd->add_option("--config", opt.config_path, "JSON config file (barrier or segments)");
  cmd->add_option("--V", opt.V, "vector barrier height");
  if (with_scalar)
    cmd->add_option("--S", opt.S, "scalar barrier height");
  cmd->add_option("--a", opt.a, "barrier width");
  cmd->add_option("--m", opt.m, "rest mass");
  cmd->add_option("--format", opt.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", opt.out, "output file (default stdout)");
}

void add_grid_options(CLI::App *cmd, Options &opt) {
  cmd->add_option("--emin", opt.emin, "lower energy (excluded from the grid; default m)");
  cmd->add_option("--emax", opt.emax, "upper energy (default 10)");
  cmd->add_option("--points", opt.points, "number of grid points");
}

System load_system(const Options &opt) {
  System sys = BarrierConfig{};
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in)
      throw usage_error("cannot open config file " + opt.config_path);
    sys = read_system(in);
  }
  if (auto *cfg = std::get_if<BarrierConfig>(&sys)) {
    if (opt.V) cfg->V = *opt.V;
    if (opt.S) cfg->S = *opt.S;
    if (opt.a) cfg->a = *opt.a;
    if (opt.m) cfg->m = *opt.m;
    validate_config(*cfg);
    return sys;
  }
  if (opt.V || opt.S || opt.a)
    throw usage_error("--V, --S and --a do not apply to a segment profile");
  if (opt.m) {
    const auto &p = std::get<PotentialProfile>(sys);
    return PotentialProfile(p.boundaries(), p.segments(), *opt.m);
  }
  return sys;
}

BarrierConfig load_barrier(const Options &opt) {
  const System sys = load_system(opt);
  if (const auto cfg = as_single_barrier(sys))
    return *cfg;
  throw usage_error("this command needs a single barrier, not a segment profile");
}

EnergyGrid make_grid(const Options &opt, double m) {
  return {opt.emin.value_or(m), opt.emax.value_or(10.0), opt.points};
}

template <class Fn>
int with_output(const Options &opt, Fn &&fn) {
  if (opt.out.empty())
    return fn(std::cout);
  std::ofstream file(opt.out, std::ios::binary);
  if (!file)
    throw usage_error("cannot write " + opt.out);
  return fn(file);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Dirac scattering off square barriers with vector and scalar coupling"};
  app.require_subcommand(1);
  Options opt;

  auto *scan = app.add_subcommand("scan", "|T|^2, |R|^2, |mu|^2 on a uniform energy grid");
  add_system_options(scan, opt);
  add_grid_options(scan, opt);

  auto *res = app.add_subcommand("resonances", "analytic transmission resonances, numerically confirmed");
  add_system_options(res, opt);
  res->add_option("--emax", opt.emax, "largest energy to report (default 10)");

  auto *sup = app.add_subcommand("supercritical", "scalar strengths with a zero-momentum resonance");
  add_system_options(sup, opt, false);

  auto *sweep = app.add_subcommand("sweep", "scan frames over a range of scalar strengths");
  add_system_options(sweep, opt, false);
  add_grid_options(sweep, opt);
  sweep->add_option("--sfrom", opt.S_from, "first S");
  sweep->add_option("--sto", opt.S_to, "last S");
  sweep->add_option("--ssteps", opt.S_steps, "number of S values")->check(CLI::PositiveNumber);

  auto *oracle = app.add_subcommand("oracle-check", "closed form vs. independent matcher");
  add_system_options(oracle, opt);
  add_grid_options(oracle, opt);

  auto *bands = app.add_subcommand("bands", "contiguous energy ranges with |T|^2 above a threshold");
  add_system_options(bands, opt);
  add_grid_options(bands, opt);
  bands->add_option("--threshold", opt.threshold, "transmission threshold in (0, 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    const Format format = parse_format(opt.format);
    if (*scan) {
      const System sys = load_system(opt);
      return with_output(opt, [&](std::ostream &out) {
        return cmd_scan({sys, make_grid(opt, system_mass(sys)), format}, out, std::cerr);
      });
    }
    if (*res) {
      const BarrierConfig cfg = load_barrier(opt);
      return with_output(opt, [&](std::ostream &out) {
        return cmd_resonances(cfg, opt.emax.value_or(10.0), format, out, std::cerr);
      });
    }
    if (*sup) {
      const BarrierConfig cfg = load_barrier(opt);
      return with_output(opt, [&](std::ostream &out) {
        return cmd_supercritical(cfg.V, cfg.a, cfg.m, format, out, std::cerr);
      });
    }
    if (*sweep) {
      const BarrierConfig cfg = load_barrier(opt);
      SweepRequest req{cfg.V, cfg.a, cfg.m, opt.S_from, opt.S_to, opt.S_steps, make_grid(opt, cfg.m), format};
      return cmd_sweep(req, opt.out.empty() ? "sweep_frames" : opt.out, std::cerr);
    }
    if (*oracle) {
      if (oracle->count("--points") == 0)
        opt.points = 1000;
      const System sys = load_system(opt);
      return with_output(opt, [&](std::ostream &out) {
        return cmd_oracle_check(sys, make_grid(opt, system_mass(sys)), format, out, std::cerr);
      });
    }
    if (*bands) {
      const BarrierConfig cfg = load_barrier(opt);
      return with_output(opt, [&](std::ostream &out) {
        return cmd_bands(cfg, make_grid(opt, cfg.m), opt.threshold, format, out);
      });
    }
  } catch (const usage_error &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const dirac1d::error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_validation;
  }
  return exit_usage;
}
