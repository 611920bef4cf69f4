#include <doctest.h>

#include <cmath>
#include <random>

#include "qinc/bounds.hpp"
#include "qinc/errors.hpp"
#include "qinc/selftest.hpp"
#include "test_util.hpp"

using namespace qinc;

namespace {

constexpr double kPi = 3.14159265358979323846;

InfoMatrices info_at(ModelId id, std::vector<double> values, double theta0 = kPi / 3, double t = 1.0) {
  ModelControls c;
  c.theta0 = theta0;
  c.t = t;
  return analyze(evaluate(id, ParamPoint::make(id, std::move(values)), c));
}

ModelClass class_of(ModelId id, const InfoMatrices& info) {
  return classify(info, model_info(id).d_invariant);
}

// sqrt of a 2x2 symmetric positive matrix: (W + sqrt(det) I) / sqrt(tr + 2 sqrt(det)).
RMat sqrt2(const RMat& w) {
  const double s = std::sqrt(w(0, 0) * w(1, 1) - w(0, 1) * w(1, 0));
  const double t = std::sqrt(w(0, 0) + w(1, 1) + 2.0 * s);
  RMat out = w;
  out(0, 0) += s;
  out(1, 1) += s;
  return out * (1.0 / t);
}

// C^R for two parameters from an explicit 2x2 inverse and the A^dag A trace norm.
double c_rld_oracle(const RMat& w, const CMat& j) {
  const cplx det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
  CMat ji(2);
  ji(0, 0) = j(1, 1) / det;
  ji(1, 1) = j(0, 0) / det;
  ji(0, 1) = -j(0, 1) / det;
  ji(1, 0) = -j(1, 0) / det;
  double tr = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) tr += w(a, b) * ji(b, a).real();
  const RMat sw = sqrt2(w);
  const RMat im = imag_part(ji);
  return tr + testutil::trace_norm2_oracle(to_complex(sw * im * sw));
}

WeightMatrix congruent(const WeightMatrix& w, const RMat& a) { return WeightMatrix(a * w.mat() * a.transpose()); }

}  // namespace

TEST_CASE("WeightMatrix validation") {
  CHECK_NOTHROW(WeightMatrix(RMat{{1.0, 0.2}, {0.2, 3.0}}));
  CHECK_THROWS_AS(WeightMatrix(RMat{{1.0, 0.2}, {0.3, 3.0}}), DomainError);
  CHECK_THROWS_AS(WeightMatrix(RMat{{1.0, 2.0}, {2.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(WeightMatrix::diag({1.0, 0.0}), DomainError);
  const WeightMatrix n = WeightMatrix(RMat{{4.0, 1.0}, {1.0, 2.0}}).normalized();
  CHECK(n.mat()(0, 0) == 1.0);
  CHECK(std::abs(n.mat()(1, 1) - 0.5) < 1e-15);
}

TEST_CASE("pure tomography bounds") {
  std::mt19937_64 rng(301);
  std::uniform_real_distribution<double> th(0.05, kPi - 0.05), lw(-4.0, 4.0);
  for (int k = 0; k < 200; ++k) {
    const double theta = th(rng), w = std::exp(lw(rng)), s = std::sin(theta);
    const InfoMatrices info = info_at(ModelId::PureTomography, {theta, 0.3});
    const ModelClass cls = class_of(ModelId::PureTomography, info);
    CHECK(cls == ModelClass::DInvariant);
    const WeightMatrix wm = WeightMatrix::diag({1.0, w});
    const double cs = 1.0 + w / (s * s);
    const double ch = std::pow(1.0 + std::sqrt(w) / s, 2);
    CHECK(std::abs(c_sld(wm, info.q) - cs) <= 1e-10 * cs);
    CHECK(std::abs(c_z(wm, info.q, info.d) - ch) <= 1e-10 * ch);
    const HolevoValue hv = holevo(wm, info, cls);
    CHECK(hv.branch == HolevoBranch::DInvariant);
    CHECK(std::abs(hv.value - ch) <= 1e-10 * ch);
    CHECK(std::abs(delta_c(wm, info, cls) - 2.0 * std::sqrt(w) * s / (w + s * s)) <= 1e-10);
    CHECK(std::abs(delta_c(WeightMatrix::diag({1.0, s * s}), info, cls) - 1.0) <= 1e-12);
  }
  const InfoMatrices info = info_at(ModelId::PureTomography, {kPi / 4, 0.0});
  const DiagOptimum opt = optimize_delta_c_diag(info, ModelClass::DInvariant);
  REQUIRE(opt.w.size() == 1);
  CHECK(std::abs(opt.w[0] - 0.5) <= 1e-7);
  CHECK(std::abs(opt.delta_c_max - 1.0) <= 1e-12);
  CHECK_FALSE(opt.flat);
}

TEST_CASE("mixed tomography bounds") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ur(0.05, 0.95), th(0.1, kPi - 0.1), lw(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const double r = ur(rng), theta = th(rng), s = std::sin(theta);
    const double wt = std::exp(lw(rng)), wp = std::exp(lw(rng));
    const InfoMatrices info = info_at(ModelId::MixedTomography, {r, theta, 0.5});
    const WeightMatrix wm = WeightMatrix::diag({1.0, wt, wp});
    const double cs = ((r * r - std::pow(r, 4) + wt) * s * s + wp) / (r * r * s * s);
    const double cz = cs + 2.0 * r * std::sqrt(wt * wp) * s / (r * r * s * s);
    CHECK(std::abs(c_sld(wm, info.q) - cs) <= 1e-10 * cs);
    CHECK(std::abs(c_z(wm, info.q, info.d) - cz) <= 1e-10 * cz);
    CHECK(std::abs(holevo(wm, info, ModelClass::DInvariant).value - cz) <= 1e-10 * cz);

    const WeightMatrix wq(info.q);
    CHECK(std::abs(c_sld(wq, info.q) - 3.0) <= 1e-12);
    CHECK(std::abs(delta_c(wq, info, ModelClass::DInvariant) - 2.0 * r / 3.0) <= 1e-10);
  }
  // Three parameters are only handled for D-invariant models.
  const InfoMatrices info = info_at(ModelId::MixedTomography, {0.5, 1.0, 0.0});
  CHECK_THROWS_AS(holevo(WeightMatrix::identity(3), info, ModelClass::Generic), Unsupported);

  const DiagOptimum opt = optimize_delta_c_diag(info, ModelClass::DInvariant);
  REQUIRE(opt.w.size() == 2);
  REQUIRE(opt.supremum.has_value());
  CHECK(std::abs(*opt.supremum - 0.5) < 1e-12);
  CHECK(opt.delta_c_max >= 0.5 - 1e-2);
  CHECK(opt.delta_c_max <= 0.5 + 1e-9);
}

TEST_CASE("RLD bound") {
  SUBCASE("dephasing at theta = pi/2 has a diagonal J") {
    const double g = 0.7, t = 1.3;
    const InfoMatrices info = info_at(ModelId::Dephasing, {g, 1.0}, kPi / 2, t);
    const double jd = t * t / std::expm1(2.0 * g * t);
    const WeightMatrix w(RMat{{1.0, 0.3}, {0.3, 2.0}});
    CHECK(std::abs(c_rld(w, *info.j) - 3.0 / jd) <= 1e-10 / jd);
  }
  SUBCASE("real J reduces to Tr[W J^-1]") {
    const CMat j = to_complex(RMat{{2.0, 0.5}, {0.5, 1.0}});
    const WeightMatrix w = WeightMatrix::diag({1.0, 3.0});
    const RMat ji = inverse(RMat{{2.0, 0.5}, {0.5, 1.0}});
    CHECK(std::abs(c_rld(w, j) - (ji(0, 0) + 3.0 * ji(1, 1))) < 1e-14);
  }
  SUBCASE("independent oracle at random points and weights") {
    std::mt19937_64 rng(307);
    for (ModelId id : {ModelId::Dephasing, ModelId::AmplitudeDamping}) {
      for (int k = 0; k < 300; ++k) {
        const ResolvedPoint p = random_point(id, rng);
        const InfoMatrices info = analyze(evaluate(p.id, p.lambda, p.ctrl));
        const WeightMatrix w = sample_random_weight(rng, 2);
        const double want = c_rld_oracle(w.mat(), *info.j);
        CHECK(std::abs(c_rld(w, *info.j) - want) <= 1e-9 * want);
        CHECK(std::abs(c_rld_from_inverse(w, *info.j_inv) - want) <= 1e-9 * want);
      }
    }
    const InfoMatrices info = info_at(ModelId::Dephasing, {1.0, 1.0});
    const double want = c_rld_oracle(RMat::identity(2), *info.j);
    CHECK(std::abs(c_rld(WeightMatrix::identity(2), *info.j) - want) <= 1e-12 * want);
  }
}

TEST_CASE("classification") {
  CHECK(class_of(ModelId::PureTomography, info_at(ModelId::PureTomography, {1.0, 0.0})) == ModelClass::DInvariant);
  CHECK(class_of(ModelId::MixedTomography, info_at(ModelId::MixedTomography, {0.4, 1.0, 0.0})) ==
        ModelClass::DInvariant);
  CHECK(class_of(ModelId::Dephasing, info_at(ModelId::Dephasing, {1.0, 1.0}, kPi / 3)) == ModelClass::Generic);
  CHECK(class_of(ModelId::DepolarizingFrequency, info_at(ModelId::DepolarizingFrequency, {0.5, 1.0})) ==
        ModelClass::Classical);
  CHECK(class_of(ModelId::AdPlusDephasing, info_at(ModelId::AdPlusDephasing, {0.3, 0.4})) ==
        ModelClass::Classical);
  // Amplitude damping at gamma t = ln 2 is found D-invariant by the numeric probe.
  CHECK(class_of(ModelId::AmplitudeDamping, info_at(ModelId::AmplitudeDamping, {std::log(2.0), 1.0})) ==
        ModelClass::DInvariant);
  CHECK(class_of(ModelId::AmplitudeDamping, info_at(ModelId::AmplitudeDamping, {0.3, 1.0})) ==
        ModelClass::Generic);
}

TEST_CASE("classical models: C^H = C^S and D = 0 gives C^Z = C^S") {
  std::mt19937_64 rng(311);
  for (ModelId id : {ModelId::DepolarizingFrequency, ModelId::AdPlusDephasing}) {
    for (int k = 0; k < 20; ++k) {
      const ResolvedPoint p = random_point(id, rng);
      const InfoMatrices info = analyze(evaluate(p.id, p.lambda, p.ctrl));
      for (int m = 0; m < 20; ++m) {
        const WeightMatrix w = sample_random_weight(rng, 2);
        const HolevoValue hv = holevo(w, info, ModelClass::Classical);
        CHECK(hv.branch == HolevoBranch::Classical);
        CHECK(hv.value == c_sld(w, info.q));
        CHECK(delta_c(w, info, ModelClass::Classical) == 0.0);
      }
    }
  }
  const RMat q{{2.0, 0.3}, {0.3, 1.0}};
  const WeightMatrix w = WeightMatrix::diag({1.0, 2.0});
  CHECK(c_z(w, q, RMat(2)) == c_sld(w, q));
}

TEST_CASE("dephasing at gamma t = 0.1 stays strictly below (1 + R) C^S") {
  const InfoMatrices info = info_at(ModelId::Dephasing, {0.1, 1.0}, kPi / 3);
  const ModelClass cls = class_of(ModelId::Dephasing, info);
  const DiagOptimum opt = optimize_delta_c_diag(info, cls);
  const BoundsReport rep = bounds_report(WeightMatrix::diag({1.0, opt.w[0]}), info, cls);
  CHECK(rep.c_h < (1.0 + rep.r) * rep.c_s);
  CHECK(rep.r - rep.delta_c > 0.1);
}

TEST_CASE("report invariants and scale invariance") {
  std::mt19937_64 rng(313);
  for (const auto& m : model_registry()) {
    if (param_count(m.id) != 2) continue;
    for (int k = 0; k < 50; ++k) {
      const ResolvedPoint p = random_point(m.id, rng);
      const InfoMatrices info = analyze(evaluate(p.id, p.lambda, p.ctrl));
      const ModelClass cls = class_of(m.id, info);
      for (int s = 0; s < 20; ++s) {
        const WeightMatrix w = sample_random_weight(rng, 2);
        const BoundsReport rep = bounds_report(w, info, cls);
        CHECK_NOTHROW(check_report(rep));
        CHECK(rep.c_h <= 2.0 * rep.c_s + 1e-9);
        if (cls != ModelClass::Classical) CHECK(rep.c_z >= rep.c_s);
        for (double c : {1e-3, 1e3}) {
          const double moved = delta_c(WeightMatrix(w.mat() * c), info, cls);
          CHECK(std::abs(moved - rep.delta_c) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("reparametrization covariance") {
  std::mt19937_64 rng(317);
  for (ModelId id : {ModelId::Dephasing, ModelId::AmplitudeDamping, ModelId::PureTomography}) {
    for (int k = 0; k < 30; ++k) {
      const ResolvedPoint p = random_point(id, rng);
      const InfoMatrices info = analyze(evaluate(p.id, p.lambda, p.ctrl));
      const ModelClass cls = class_of(id, info);
      const RMat b = random_invertible(2, rng);
      const InfoMatrices moved = reparametrize(info, b);
      const WeightMatrix w = sample_random_weight(rng, 2);
      // Q' = B Q B^T pairs with W' = B W B^T.
      const WeightMatrix w2 = congruent(w, b);
      const double base = delta_c(w, info, cls);
      CHECK(std::abs(delta_c(w2, moved, cls) - base) <= 1e-9);
      CHECK(std::abs(c_sld(w2, moved.q) - c_sld(w, info.q)) <= 1e-9 * c_sld(w, info.q));
      if (info.j) {
        CHECK(std::abs(c_rld(w2, *moved.j) - c_rld(w, *info.j)) <= 1e-8 * c_rld(w, *info.j));
      }
      // The other direction, B^{-T} W B^{-1}, does not give the same gap in general.
      if (id == ModelId::Dephasing && k == 0) {
        const RMat bi = inverse(b);
        const WeightMatrix w3 = congruent(w, bi.transpose());
        CHECK(std::abs(delta_c(w3, moved, cls) - base) > 1e-6);
      }
    }
  }
}

TEST_CASE("S-corrected branch is continuous across the switch") {
  // Scan theta for the dephasing model at fixed W until the branch changes, then bisect.
  const WeightMatrix w = WeightMatrix::diag({1.0, 0.2});
  auto at = [&](double theta) {
    const InfoMatrices info = info_at(ModelId::Dephasing, {0.4, 1.0}, theta);
    return bounds_report(w, info, ModelClass::Generic);
  };
  int switches = 0;
  double prev = 0.2;
  for (int k = 1; k <= 200; ++k) {
    const double theta = 0.2 + (kPi / 2 - 0.3) * k / 200.0;
    if (at(theta).branch == at(prev).branch) {
      prev = theta;
      continue;
    }
    ++switches;
    double lo = prev, hi = theta;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (at(mid).branch == at(lo).branch ? lo : hi) = mid;
    }
    const BoundsReport a = at(lo), b = at(hi);
    CHECK(a.branch != b.branch);
    CHECK(std::abs(a.c_h - b.c_h) <= 1e-9 * a.c_h);
    const BoundsReport& s = a.branch == HolevoBranch::SCorrected ? a : b;
    CHECK(s.c_h - s.c_r <= 1e-9 * s.c_h);
    prev = theta;
  }
  CHECK(switches >= 1);
}

TEST_CASE("random weights versus the diagonal optimum") {
  const InfoMatrices info = info_at(ModelId::Dephasing, {1.0, 1.0}, kPi / 3);
  const ModelClass cls = class_of(ModelId::Dephasing, info);
  const DiagOptimum opt = optimize_delta_c_diag(info, cls);
  const double r = quantumness(info);
  const auto samples = random_weight_sweep(info, cls, 1000, 42);
  REQUIRE(samples.size() == 1000);
  double best = 0.0;
  for (const auto& s : samples) {
    best = std::max(best, s.delta_c);
    CHECK(s.delta_c <= r + 1e-9);
    CHECK(s.w.mat()(0, 0) == 1.0);
    CHECK(herm_eig(to_complex(s.w.mat())).values.back() > 0.0);
  }
  CHECK(best <= opt.delta_c_max + 1e-6);

  const auto again = random_weight_sweep(info, cls, 1000, 42);
  for (std::size_t k = 0; k < samples.size(); ++k) CHECK(again[k].delta_c == samples[k].delta_c);
}

TEST_CASE("optimizer") {
  SUBCASE("flat objective") {
    std::mt19937_64 rng(319);
    const ResolvedPoint p = random_point(ModelId::DepolarizingFrequency, rng);
    const InfoMatrices info = analyze(evaluate(p.id, p.lambda, p.ctrl));
    const DiagOptimum opt = optimize_delta_c_diag(info, ModelClass::Classical);
    CHECK(opt.flat);
    CHECK(opt.w[0] == 1.0);
    CHECK(opt.delta_c_max == 0.0);
  }
  SUBCASE("amplitude damping at gamma t = ln 2 peaks at the Bures ratio") {
    for (double theta : {0.4, 1.0, 2.0}) {
      const InfoMatrices info = info_at(ModelId::AmplitudeDamping, {std::log(2.0), 1.0}, theta);
      const DiagOptimum opt = optimize_delta_c_diag(info, ModelClass::DInvariant);
      const double ratio = info.q(1, 1) / info.q(0, 0);
      CHECK(std::abs(opt.w[0] / ratio - 1.0) <= 1e-6);
      CHECK(std::abs(opt.delta_c_max - quantumness(info)) <= 1e-9);
    }
  }
  SUBCASE("dephasing near the pole: w_opt tracks the squared gap") {
    for (double g : {0.2, 1.0, 2.0}) {
      const InfoMatrices info = info_at(ModelId::Dephasing, {g, 1.0}, 1e-3);
      const DiagOptimum opt = optimize_delta_c_diag(info, class_of(ModelId::Dephasing, info));
      CAPTURE(g);
      CHECK(std::abs(opt.w[0] / (opt.delta_c_max * opt.delta_c_max) - 1.0) <= 1e-3);
    }
  }
  SUBCASE("grid maximum is refined") {
    const InfoMatrices info = info_at(ModelId::Dephasing, {0.5, 1.0}, 1.0);
    const ModelClass cls = class_of(ModelId::Dephasing, info);
    const DiagOptimum opt = optimize_delta_c_diag(info, cls);
    const double w = opt.w[0];
    for (double f : {1.0 - 1e-4, 1.0 + 1e-4}) {
      CHECK(delta_c(WeightMatrix::diag({1.0, w * f}), info, cls) <= opt.delta_c_max + 1e-15);
    }
  }
}
