#include "qinc/bounds.hpp"

#include <cmath>
#include <limits>

#include "qinc/errors.hpp"
#include "qinc/golden.hpp"

namespace qinc {

namespace {

constexpr double kBranchTol = 1e-12;
constexpr double kProbeTol = 1e-8;

RMat inverse_q(const RMat& q) {
  try {
    return inverse(q);
  } catch (const SingularMatrix& e) {
    throw SingularModel(std::string("SLD-QFI matrix is singular: ") + e.what());
  }
}

double trace_of_product(const RMat& a, const RMat& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int k = 0; k < a.dim(); ++k) s += a(i, k) * b(k, i);
  return s;
}

double c_rld_info(const WeightMatrix& w, const InfoMatrices& info) {
  return info.j_inv ? c_rld_from_inverse(w, *info.j_inv) : c_rld(w, *info.j);
}

}  // namespace

WeightMatrix::WeightMatrix(const RMat& w) : w_(w) {
  if (!w.all_finite()) throw DomainError("weight matrix has non-finite entries");
  if (max_abs_diff(w, w.transpose()) > 1e-12 * std::max(1.0, w.max_abs())) {
    throw DomainError("weight matrix is not symmetric");
  }
  w_ = 0.5 * (w + w.transpose());
  const auto es = herm_eig(to_complex(w_));
  if (!(es.values.back() > 0.0)) throw DomainError("weight matrix is not positive definite");
}

WeightMatrix WeightMatrix::diag(const std::vector<double>& entries) {
  return WeightMatrix(RMat::diagonal(entries));
}

WeightMatrix WeightMatrix::normalized() const {
  RMat w = w_ * (1.0 / w_(0, 0));
  w(0, 0) = 1.0;
  return WeightMatrix(w);
}

std::string to_string(ModelClass c) {
  switch (c) {
    case ModelClass::Classical:
      return "classical";
    case ModelClass::DInvariant:
      return "d-invariant";
    case ModelClass::Generic:
      return "generic";
  }
  return "?";
}

std::string to_string(HolevoBranch b) {
  switch (b) {
    case HolevoBranch::RldBranch:
      return "rld";
    case HolevoBranch::SCorrected:
      return "s-corrected";
    case HolevoBranch::DInvariant:
      return "d-invariant";
    case HolevoBranch::Classical:
      return "classical";
  }
  return "?";
}

double c_sld(const WeightMatrix& w, const RMat& q) { return trace_of_product(w.mat(), inverse_q(q)); }

double c_rld(const WeightMatrix& w, const CMat& j) {
  CMat jinv(j.dim());
  try {
    jinv = inverse(j);
  } catch (const SingularMatrix& e) {
    throw SingularModel(std::string("RLD-QFI matrix is singular: ") + e.what());
  }
  return c_rld_from_inverse(w, jinv);
}

double c_rld_from_inverse(const WeightMatrix& w, const CMat& j_inv) {
  const RMat root = psd_sqrt(w.mat());
  return trace_of_product(w.mat(), real_part(j_inv)) + trace_norm(root * imag_part(j_inv) * root);
}

double c_z(const WeightMatrix& w, const RMat& q, const RMat& d) {
  const RMat qinv = inverse_q(q);
  const RMat root = psd_sqrt(w.mat());
  return trace_of_product(w.mat(), qinv) + trace_norm(root * qinv * d * qinv * root);
}

HolevoValue holevo(const WeightMatrix& w, const InfoMatrices& info, ModelClass cls) {
  switch (cls) {
    case ModelClass::Classical:
      return {c_sld(w, info.q), HolevoBranch::Classical};
    case ModelClass::DInvariant:
      return {c_z(w, info.q, info.d), HolevoBranch::DInvariant};
    case ModelClass::Generic:
      break;
  }
  if (info.n != 2) throw Unsupported("Holevo bound of a generic model is only available for two parameters");
  if (!info.j) throw RldUndefined("the two-parameter Holevo formula needs the RLD-QFI matrix");
  const double cs = c_sld(w, info.q);
  const double cz = c_z(w, info.q, info.d);
  const double cr = c_rld_info(w, info);
  const double mid = 0.5 * (cz + cs);
  if (cr >= mid) return {cr, HolevoBranch::RldBranch};
  const double gap = cz - cr;
  if (gap < kBranchTol * std::max(1.0, std::abs(cz))) return {cr, HolevoBranch::DInvariant};
  return {cr + (mid - cr) * (mid - cr) / gap, HolevoBranch::SCorrected};
}

double delta_c(const WeightMatrix& w, const InfoMatrices& info, ModelClass cls) {
  const double cs = c_sld(w, info.q);
  return (holevo(w, info, cls).value - cs) / cs;
}

BoundsReport bounds_report(const WeightMatrix& w, const InfoMatrices& info, ModelClass cls) {
  BoundsReport rep;
  rep.w_used = w;
  rep.c_s = c_sld(w, info.q);
  rep.c_z = c_z(w, info.q, info.d);
  rep.c_r = info.j ? c_rld_info(w, info) : std::numeric_limits<double>::quiet_NaN();
  const HolevoValue h = holevo(w, info, cls);
  rep.c_h = h.value;
  rep.branch = h.branch;
  rep.delta_c = (rep.c_h - rep.c_s) / rep.c_s;
  rep.r = quantumness(info);
  return rep;
}

void check_report(const BoundsReport& rep, double tol) {
  const double slack = tol * std::max(1.0, std::abs(rep.c_s));
  auto fail = [](const std::string& what) { throw InvariantViolation(what); };
  if (rep.c_h < rep.c_s - slack) fail("C^H < C^S");
  if (!std::isnan(rep.c_r) && rep.c_h < rep.c_r - slack) fail("C^H < C^R");
  if (rep.c_h > (1.0 + rep.r) * rep.c_s + slack) fail("C^H > (1 + R) C^S");
  if (rep.delta_c < -tol) fail("delta C < 0");
  if (rep.delta_c > rep.r + tol) fail("delta C > R");
  if (rep.r < 0.0 || rep.r > 1.0 + tol) fail("R outside [0, 1]");
}

ModelClass classify(const InfoMatrices& info, bool known_d_invariant, double tol) {
  if (info.d.max_abs() <= tol * std::max(1.0, info.q.max_abs())) return ModelClass::Classical;
  if (known_d_invariant) return ModelClass::DInvariant;
  if (!info.j) return ModelClass::Generic;

  std::vector<WeightMatrix> probes{WeightMatrix::identity(info.n)};
  std::vector<double> d1(info.n, 1.0), d2(info.n, 1.0);
  d1.back() = 10.0;
  d2.back() = 0.1;
  probes.push_back(WeightMatrix::diag(d1));
  probes.push_back(WeightMatrix::diag(d2));
  RMat mixed = RMat::identity(info.n);
  mixed(0, 1) = mixed(1, 0) = 0.5;
  probes.emplace_back(mixed);
  for (const auto& w : probes) {
    const double cz = c_z(w, info.q, info.d);
    const double cr = c_rld_info(w, info);
    if (std::abs(cz - cr) > kProbeTol * std::max(1.0, std::abs(cz))) return ModelClass::Generic;
  }
  return ModelClass::DInvariant;
}

DiagOptimum optimize_delta_c_diag(const InfoMatrices& info, ModelClass cls, const OptimizerConfig& cfg) {
  if (info.n == 3) {
    if (cls != ModelClass::DInvariant) {
      throw Unsupported("three-parameter optimization needs a D-invariant model");
    }
    // Bloch tomography: Q = diag(1/(1 - r^2), r^2, r^2 sin^2 theta).
    const double r2 = info.q(1, 1);
    const double s2 = info.q(2, 2) / r2;
    if (std::abs(info.q(0, 0) * (1.0 - r2) - 1.0) > 1e-8) {
      throw Unsupported("three-parameter protocol is defined for the Bloch tomography model");
    }
    const double w_phi = cfg.w_phi_cap;
    const double w_theta = (w_phi + (r2 * r2 - r2) * s2) / s2;
    DiagOptimum out;
    out.w = {w_theta, w_phi};
    out.delta_c_max = delta_c(WeightMatrix::diag({1.0, w_theta, w_phi}), info, cls);
    out.supremum = quantumness(info);
    return out;
  }
  if (info.n != 2) throw Unsupported("diagonal optimization supports two or three parameters");

  auto objective = [&](double log_w) {
    return delta_c(WeightMatrix::diag({1.0, std::exp(log_w)}), info, cls);
  };
  const double lo = std::log(cfg.w_min), hi = std::log(cfg.w_max);
  const int n = std::max(cfg.grid_points, 3);
  std::vector<double> nodes(n), values(n);
  int best = 0;
  for (int i = 0; i < n; ++i) {
    nodes[i] = lo + (hi - lo) * i / (n - 1);
    values[i] = objective(nodes[i]);
    if (values[i] > values[best]) best = i;
  }
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  DiagOptimum out;
  if (*mx - *mn <= 1e-14 * std::max(1.0, std::abs(*mx))) {
    out.flat = true;
    out.w = {std::exp(0.5 * (lo + hi))};
    out.delta_c_max = objective(0.5 * (lo + hi));
    return out;
  }
  const double a = nodes[std::max(best - 1, 0)];
  const double b = nodes[std::min(best + 1, n - 1)];
  const GoldenResult g = golden_section_maximize(objective, a, b, cfg.log_tol);
  if (g.fx >= values[best]) {
    out.w = {std::exp(g.x)};
    out.delta_c_max = g.fx;
  } else {
    out.w = {std::exp(nodes[best])};
    out.delta_c_max = values[best];
  }
  return out;
}

WeightMatrix sample_random_weight(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RMat a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  RMat w = a * a.transpose() + RMat::identity(n) * 1e-6;
  return WeightMatrix(w).normalized();
}

WeightMatrix sample_random_weight(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  return sample_random_weight(rng, n);
}

std::vector<WeightSample> random_weight_sweep(const InfoMatrices& info, ModelClass cls, int count,
                                              std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("random_weight_sweep: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<WeightSample> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    WeightMatrix w = sample_random_weight(rng, info.n);
    const double dc = delta_c(w, info, cls);
    out.push_back({std::move(w), dc});
  }
  return out;
}

}  // namespace qinc
