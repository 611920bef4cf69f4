// qinc: bounds, sweeps and random-weight scans for single-qubit models.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qinc/errors.hpp"
#include "qinc/report.hpp"
#include "qinc/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSelftest = 1;
constexpr int kExitUsage = 2;

constexpr double kPi = 3.14159265358979323846;

struct ParamFlags {
  std::optional<double> theta, phi, r, omega, gamma, t, gamma_t, gamma_ad, gamma_deph;

  void attach(CLI::App* app) {
    app->add_option("--theta", theta, "polar angle (rad)");
    app->add_option("--phi", phi, "azimuthal angle (rad), default 0");
    app->add_option("--r", r, "Bloch vector length (mixed-tomography)");
    app->add_option("--omega", omega, "frequency, default 1");
    app->add_option("--gamma", gamma, "decay or dephasing rate");
    app->add_option("--t", t, "evolution time, default 1");
    app->add_option("--gamma_t,--gamma-t", gamma_t, "rate * time, with t = 1");
    app->add_option("--gamma_ad,--gamma-ad", gamma_ad, "amplitude-damping rate (ad-dephasing)");
    app->add_option("--gamma_deph,--gamma-deph", gamma_deph, "dephasing rate (ad-dephasing)");
  }

  qinc::NamedValues values() const {
    qinc::NamedValues v;
    auto put = [&](const char* k, const std::optional<double>& x) {
      if (x) v[k] = *x;
    };
    put("theta", theta);
    put("phi", phi);
    put("r", r);
    put("omega", omega);
    put("gamma", gamma);
    put("t", t);
    put("gamma_t", gamma_t);
    put("gamma_ad", gamma_ad);
    put("gamma_deph", gamma_deph);
    return v;
  }
};

struct SweepFlags {
  std::string model;
  std::string axis = "theta";
  std::optional<double> from, to;
  int count = 100;
  std::string weight = "opt";
  std::string format = "csv";
  std::string out;
  int threads = 1;
  double theta_margin = qinc::kThetaMargin;
  std::optional<std::uint64_t> seed;
  ParamFlags params;

  void attach(CLI::App* app) {
    app->add_option("--model", model, "model name (see `models`)")->required();
    app->add_option("--axis", axis, "swept name, e.g. theta or gamma_t")->capture_default_str();
    app->add_option("--from", from, "first axis value");
    app->add_option("--to", to, "last axis value");
    app->add_option("--count", count, "number of grid points")->capture_default_str();
    app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_option("--out", out, "output file (default: standard output)");
    app->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--theta-margin", theta_margin, "distance of default theta endpoints from the poles")
        ->capture_default_str();
    app->add_option("--seed", seed, "seed (recorded in the output metadata)");
    params.attach(app);
  }

  qinc::SweepSpec spec() const {
    qinc::SweepSpec s;
    s.model = qinc::model_from_name(model);
    s.axis = axis;
    s.count = count;
    s.fixed = params.values();
    s.weight = qinc::WeightSpec::parse(weight);
    s.threads = threads;
    if (axis == "theta") {
      s.start = from.value_or(theta_margin);
      s.stop = to.value_or(kPi - theta_margin);
    } else {
      if (!from || !to) throw qinc::DomainError("--from and --to are required for axis '" + axis + "'");
      s.start = *from;
      s.stop = *to;
    }
    return s;
  }
};

template <class Fn>
int with_output(const std::string& path, Fn write) {
  if (path.empty()) {
    write(std::cout);
    return std::cout ? kExitOk : kExitUsage;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot write " << path << '\n';
    return kExitUsage;
  }
  write(file);
  file.close();
  if (!file) {
    std::cerr << "error: failed writing " << path << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

int report_invalid(std::size_t invalid, std::size_t total) {
  if (invalid == 0) return kExitOk;
  std::cerr << "error: " << invalid << " of " << total << " rows could not be evaluated (written as nan)\n";
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holevo and SLD bounds for single-qubit multiparameter models"};
  app.set_version_flag("--version", qinc::kVersion);
  app.require_subcommand(1);

  auto* models = app.add_subcommand("models", "list registered models");

  auto* bounds = app.add_subcommand("bounds", "bounds at one model point (JSON)");
  std::string bounds_model, bounds_weight = "identity";
  ParamFlags bounds_params;
  bounds->add_option("--model", bounds_model, "model name")->required();
  bounds->add_option("--weight", bounds_weight, "diag:a,b[,c] | bures | identity | opt")->capture_default_str();
  bounds_params.attach(bounds);

  auto* sweep = app.add_subcommand("sweep", "bounds along a one-dimensional grid");
  SweepFlags sweep_flags;
  sweep_flags.attach(sweep);
  sweep->add_option("--weight", sweep_flags.weight, "diag:a,b[,c] | bures | identity | opt")
      ->capture_default_str();

  auto* randw = app.add_subcommand("randw", "random weight matrices along a grid");
  SweepFlags randw_flags;
  randw_flags.count = 10;
  randw_flags.seed = 1;
  int samples = 1000;
  randw_flags.attach(randw);
  randw->add_option("--samples", samples, "random weights per grid point")->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "run the property suite");
  std::uint64_t selftest_seed = 20240101;
  selftest->add_option("--seed", selftest_seed, "seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*models) {
      qinc::write_models(std::cout);
      return kExitOk;
    }
    if (*bounds) {
      const qinc::ModelId id = qinc::model_from_name(bounds_model);
      const qinc::WeightSpec weight = qinc::WeightSpec::parse(bounds_weight);
      const qinc::ResolvedPoint point = qinc::resolve_point(id, bounds_params.values());
      qinc::check_domain(point.id, point.lambda, point.ctrl);
      const qinc::ReportRow row = qinc::compute_row(point, weight);
      if (!row.valid) {
        std::cerr << "error: " << row.error << '\n';
        return kExitUsage;
      }
      qinc::write_point_json(std::cout, point, weight, row);
      return kExitOk;
    }
    if (*sweep) {
      const qinc::SweepSpec spec = sweep_flags.spec();
      const auto rows = qinc::run_sweep(spec);
      const int io = with_output(sweep_flags.out, [&](std::ostream& os) {
        if (sweep_flags.format == "csv") {
          qinc::write_csv(os, rows);
        } else {
          qinc::write_json(os, rows, spec, sweep_flags.seed);
        }
      });
      if (io != kExitOk) return io;
      std::size_t invalid = 0;
      for (const auto& r : rows) {
        if (!r.valid) {
          ++invalid;
          std::cerr << "row axis=" << qinc::format_number(r.axis) << ": " << r.error << '\n';
        }
      }
      return report_invalid(invalid, rows.size());
    }
    if (*randw) {
      const qinc::SweepSpec spec = randw_flags.spec();
      const std::uint64_t seed = *randw_flags.seed;
      const auto rows = qinc::run_random_weights(spec, samples, seed);
      const int io = with_output(randw_flags.out, [&](std::ostream& os) {
        if (randw_flags.format == "csv") {
          qinc::write_random_csv(os, rows);
        } else {
          qinc::write_random_json(os, rows, spec, samples, seed);
        }
      });
      if (io != kExitOk) return io;
      std::size_t invalid = 0;
      for (const auto& r : rows) {
        if (!r.valid) {
          ++invalid;
          std::cerr << "row axis=" << qinc::format_number(r.axis) << ": " << r.error << '\n';
        }
      }
      return report_invalid(invalid, rows.size());
    }
    if (*selftest) {
      const auto results = qinc::run_selftest(selftest_seed);
      int failed = 0;
      for (const auto& r : results) {
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
        failed += !r.passed;
      }
      std::cout << (failed ? "selftest failed: " + std::to_string(failed) + " subtest(s)" : "selftest passed")
                << '\n';
      return failed ? kExitSelftest : kExitOk;
    }
  } catch (const qinc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
