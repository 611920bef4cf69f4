#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qinc/infogeo.hpp"
#include "qinc/smallmat.hpp"

namespace qinc {

/// Real symmetric positive-definite weight matrix.
class WeightMatrix {
 public:
  /// Throws DomainError unless `w` is symmetric (1e-12 relative) with
  /// strictly positive eigenvalues.
  explicit WeightMatrix(const RMat& w);

  static WeightMatrix diag(const std::vector<double>& entries);
  static WeightMatrix identity(int n) { return WeightMatrix(RMat::identity(n)); }

  /// Copy rescaled so that W_11 = 1; every gap quantity is invariant under it.
  WeightMatrix normalized() const;

  const RMat& mat() const noexcept { return w_; }
  int dim() const noexcept { return w_.dim(); }

 private:
  RMat w_;
};

enum class ModelClass { Classical, DInvariant, Generic };
enum class HolevoBranch { RldBranch, SCorrected, DInvariant, Classical };

std::string to_string(ModelClass c);
std::string to_string(HolevoBranch b);

/// C^S = Tr[W Q^{-1}].
double c_sld(const WeightMatrix& w, const RMat& q);

/// C^R = Tr[W Re(J^{-1})] + ||sqrt(W) Im(J^{-1}) sqrt(W)||_1.
double c_rld(const WeightMatrix& w, const CMat& j);

/// Same bound from a precomputed J^{-1}.
double c_rld_from_inverse(const WeightMatrix& w, const CMat& j_inv);

/// C^Z = C^S + ||sqrt(W) Q^{-1} D Q^{-1} sqrt(W)||_1.
double c_z(const WeightMatrix& w, const RMat& q, const RMat& d);

struct HolevoValue {
  double value;
  HolevoBranch branch;
};

/// Holevo bound for the supported cases:
///  - Classical: C^H = C^S;
///  - DInvariant: C^H = C^Z (= C^R whenever the RLD exists);
///  - Generic two-parameter qubit models: C^H = C^R when
///    C^R >= (C^Z + C^S)/2, otherwise C^R + S with
///    S = [(C^Z + C^S)/2 - C^R]^2 / (C^Z - C^R).
/// Generic models with three parameters throw Unsupported.
HolevoValue holevo(const WeightMatrix& w, const InfoMatrices& info, ModelClass cls);

/// (C^H - C^S) / C^S.
double delta_c(const WeightMatrix& w, const InfoMatrices& info, ModelClass cls);

struct BoundsReport {
  double c_s = 0, c_r = 0, c_z = 0, c_h = 0, delta_c = 0, r = 0;  // c_r is NaN without an RLD
  HolevoBranch branch = HolevoBranch::RldBranch;
  WeightMatrix w_used = WeightMatrix::identity(2);
};

BoundsReport bounds_report(const WeightMatrix& w, const InfoMatrices& info, ModelClass cls);

/// Checks c_h >= max(c_s, c_r), 0 <= delta_c <= r and c_h <= (1 + r) c_s,
/// each with slack tol * max(1, c_s). Throws InvariantViolation.
void check_report(const BoundsReport& rep, double tol = 1e-9);

/// Classical iff ||D||_max <= tol * max(1, ||Q||_max). Otherwise D-invariant
/// when `known_d_invariant` is set or, if J is available, when C^Z and C^R
/// agree to 1e-8 (relative) on a fixed set of probe weights.
ModelClass classify(const InfoMatrices& info, bool known_d_invariant, double tol = 1e-9);

struct OptimizerConfig {
  double w_min = 1e-6;
  double w_max = 1e6;
  int grid_points = 121;
  double log_tol = 1e-10;   // bracket width in log(w)
  double w_phi_cap = 1e6;   // three-parameter protocol
};

struct DiagOptimum {
  std::vector<double> w;              // {w} for n = 2, {w_theta, w_phi} for n = 3
  double delta_c_max = 0.0;
  bool flat = false;                  // objective constant over the grid
  std::optional<double> supremum;     // analytic limit (n = 3 only)
};

/// Maximizes delta_c over W = diag(1, w) (n = 2): log grid over
/// [w_min, w_max] then golden-section refinement around the best node.
/// For the three-parameter Bloch tomography model, evaluates the
/// epsilon-close protocol w_phi = cap,
/// w_theta = (w_phi + (r^4 - r^2) sin^2 theta) / sin^2 theta, with r and
/// theta read off Q, and reports R as the (unattained) supremum.
DiagOptimum optimize_delta_c_diag(const InfoMatrices& info, ModelClass cls, const OptimizerConfig& cfg = {});

/// W = A A^T + 1e-6 I with standard-normal A, rescaled to W_11 = 1.
WeightMatrix sample_random_weight(std::mt19937_64& rng, int n);
WeightMatrix sample_random_weight(std::uint64_t seed, int n);

struct WeightSample {
  WeightMatrix w;
  double delta_c;
};

/// `count` random weights drawn from one stream seeded with `seed`.
std::vector<WeightSample> random_weight_sweep(const InfoMatrices& info, ModelClass cls, int count,
                                              std::uint64_t seed);

}  // namespace qinc
