#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qinc/bounds.hpp"
#include "qinc/infogeo.hpp"
#include "qinc/models.hpp"

namespace qinc {

inline constexpr const char* kVersion = "0.1.0";

/// Named inputs as they appear on the command line: theta, phi, r, omega,
/// gamma, t, gamma_t, gamma_ad, gamma_deph.
using NamedValues = std::map<std::string, double>;

struct ResolvedPoint {
  ModelId id;
  ParamPoint lambda;
  ModelControls ctrl;
};

/// Splits named values into estimated parameters and controls.
/// Defaults: phi = 0, omega = 1, t = 1. gamma_t sets gamma with t = 1.
/// Throws DomainError for missing, duplicated or inapplicable names.
ResolvedPoint resolve_point(ModelId id, const NamedValues& values);

/// Names accepted by resolve_point for `id`.
std::vector<std::string> accepted_names(ModelId id);

struct WeightSpec {
  enum class Kind { Diag, Bures, Identity, Opt };
  Kind kind = Kind::Identity;
  std::vector<double> diag;

  /// diag:a,b[,c] | bures | identity | opt. Throws DomainError.
  static WeightSpec parse(const std::string& text);
  std::string str() const;
};

struct ReportRow {
  double axis = 0.0;
  bool valid = false;
  std::string error;
  ModelClass cls = ModelClass::Generic;
  BoundsReport rep;
  std::vector<double> w_opt;  // filled for WeightSpec::Kind::Opt
  std::optional<InfoMatrices> info;
};

/// Evaluates the model, classifies it, picks W and fills every bound.
/// Rows violating the BoundsReport invariants are rejected. Library errors
/// are caught and recorded in `error` with `valid = false`.
ReportRow compute_row(const ResolvedPoint& point, const WeightSpec& weight);

struct SweepSpec {
  ModelId model = ModelId::Dephasing;
  std::string axis = "theta";
  double start = 0.0;
  double stop = 0.0;
  int count = 2;
  NamedValues fixed;
  WeightSpec weight;
  int threads = 1;
};

/// Theta sweeps stay this far from the poles unless a range is given.
inline constexpr double kThetaMargin = 0.05;

/// `count` evenly spaced values from start to stop inclusive.
std::vector<double> linear_grid(double start, double stop, int count);

/// Throws DomainError for a malformed spec (count < 2, unknown axis, axis
/// also fixed). Out-of-domain grid points become invalid rows.
void validate_sweep(const SweepSpec& spec);

/// One row per grid point in axis order, optionally computed on several threads.
std::vector<ReportRow> run_sweep(const SweepSpec& spec);

struct RandomRow {
  double axis = 0.0;
  int sample = 0;
  bool valid = false;
  std::string error;
  RMat w{2};
  double delta_c = 0.0;
  double r = 0.0;
  double delta_c_opt = 0.0;
};

/// Seed for grid point `index`, derived from the master seed.
std::uint64_t point_seed(std::uint64_t master, std::size_t index);

/// For every grid point, `samples` random weights from an independent
/// stream plus the diagonal optimum for comparison.
std::vector<RandomRow> run_random_weights(const SweepSpec& spec, int samples, std::uint64_t seed);

/// 12 significant digits; "nan" for NaN.
std::string format_number(double x);

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows);
void write_json(std::ostream& os, const std::vector<ReportRow>& rows, const SweepSpec& spec,
                std::optional<std::uint64_t> seed);

void write_random_csv(std::ostream& os, const std::vector<RandomRow>& rows);
void write_random_json(std::ostream& os, const std::vector<RandomRow>& rows, const SweepSpec& spec,
                       int samples, std::uint64_t seed);

/// Single-point report as one JSON object.
void write_point_json(std::ostream& os, const ResolvedPoint& point, const WeightSpec& weight,
                      const ReportRow& row);

/// Plain-text model listing.
void write_models(std::ostream& os);

}  // namespace qinc
