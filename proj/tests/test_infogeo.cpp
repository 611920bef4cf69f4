#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "qinc/errors.hpp"
#include "qinc/infogeo.hpp"
#include "qinc/selftest.hpp"
#include "test_util.hpp"

using namespace qinc;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Solves (L rho + rho L)/2 = d as a 4x4 linear system in vec(L), by Gaussian
// elimination with partial pivoting.
CMat lyapunov_oracle(const CMat& rho, const CMat& d) {
  std::array<std::array<cplx, 5>, 4> a{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const int row = 2 * i + j;
      for (int k = 0; k < 2; ++k) {
        a[row][2 * i + k] += 0.5 * rho(k, j);  // L_ik rho_kj
        a[row][2 * k + j] += 0.5 * rho(i, k);  // rho_ik L_kj
      }
      a[row][4] = d(i, j);
    }
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const cplx f = a[r][c] / a[c][c];
      for (int k = c; k < 5; ++k) a[r][k] -= f * a[c][k];
    }
  }
  CMat l(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) l(i, j) = a[2 * i + j][4] / a[2 * i + j][2 * i + j];
  return l;
}

cplx tr(const CMat& a) { return a.trace(); }

// Q and D straight from the definitions with oracle SLDs, J from rho^{-1}.
InfoMatrices oracle_info(const ModelPoint& mp) {
  const CMat& rho = mp.rho.mat();
  const int n = static_cast<int>(mp.drho.size());
  std::vector<CMat> l;
  for (const auto& d : mp.drho.mats) l.push_back(lyapunov_oracle(rho, d));
  InfoMatrices out{RMat(n), RMat(n), CMat(n), n, std::nullopt};
  const CMat rinv = inverse(rho);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      out.q(m, k) = 0.5 * tr(rho * (l[m] * l[k] + l[k] * l[m])).real();
      out.d(m, k) = (cplx(0.0, -0.5) * tr(rho * (l[m] * l[k] - l[k] * l[m]))).real();
      const CMat lm = rinv * mp.drho.mats[m], lk = rinv * mp.drho.mats[k];
      (*out.j)(m, k) = tr(rho * lk * lm.adjoint());
    }
  return out;
}

ModelPoint point(ModelId id, std::vector<double> values, double theta0 = kPi / 3, double t = 1.0) {
  ModelControls c;
  c.theta0 = theta0;
  c.t = t;
  return evaluate(id, ParamPoint::make(id, std::move(values)), c);
}

DensityMatrix rho_of(const CMat& m) { return DensityMatrix(m); }

}  // namespace

TEST_CASE("SLD and RLD of the maximally mixed state") {
  const DensityMatrix rho = rho_of(CMat::identity(2) * cplx(0.5));
  const SldSet sld = sld_operators(rho, DerivativeSet{{pauli(3) * cplx(0.5)}});
  CHECK(max_abs_diff(sld.ops[0], pauli(3)) < 1e-15);
  const RldSet rld = rld_operators(rho, DerivativeSet{{pauli(1) * cplx(0.5)}});
  CHECK(max_abs_diff(rld.ops[0], pauli(1)) < 1e-15);
}

TEST_CASE("Q, D and J agree with the Lyapunov oracle on all full-rank models") {
  std::mt19937_64 rng(201);
  for (const auto& m : model_registry()) {
    if (m.id == ModelId::PureTomography) continue;
    CAPTURE(m.name);
    const int count = m.closed_form ? 300 : 100;
    for (int k = 0; k < count; ++k) {
      const ResolvedPoint p = random_point(m.id, rng);
      const ModelPoint mp = evaluate(p.id, p.lambda, p.ctrl);
      const InfoMatrices got = analyze(mp);
      const InfoMatrices want = oracle_info(mp);
      const double scale = std::max(1.0, want.q.max_abs());
      CHECK(max_abs_diff(got.q, want.q) <= 1e-10 * scale);
      CHECK(max_abs_diff(got.d, want.d) <= 1e-10 * scale);
      REQUIRE(got.j.has_value());
      CHECK(max_abs_diff(*got.j, *want.j) <= 1e-10 * std::max(1.0, want.j->max_abs()));
      CHECK(max_abs_diff(*got.j * *got.j_inv, CMat::identity(got.n)) <= 1e-9);
      CHECK(max_abs_diff(got.q, got.q.transpose()) <= 1e-10 * scale);
      CHECK(max_abs_diff(got.d, -got.d.transpose()) <= 1e-10 * scale);
      CHECK(max_abs_diff(*got.j, got.j->adjoint()) <= 1e-10 * std::max(1.0, got.j->max_abs()));
    }
  }
}

TEST_CASE("SLD and RLD residuals at random points") {
  std::mt19937_64 rng(203);
  for (const auto& m : model_registry()) {
    if (m.id == ModelId::PureTomography) continue;
    for (int k = 0; k < 1000; ++k) {
      const ResolvedPoint p = random_point(m.id, rng);
      const ModelPoint mp = evaluate(p.id, p.lambda, p.ctrl);
      const CMat& rho = mp.rho.mat();
      const SldSet sld = sld_operators(mp.rho, mp.drho);
      const RldSet rld = rld_operators(mp.rho, mp.drho);
      for (std::size_t mu = 0; mu < mp.drho.size(); ++mu) {
        const CMat& d = mp.drho.mats[mu];
        CHECK(max_abs_diff((sld.ops[mu] * rho + rho * sld.ops[mu]) * cplx(0.5), d) <= 1e-10);
        CHECK(max_abs_diff(sld.ops[mu], sld.ops[mu].adjoint()) <= 1e-12);
        CHECK(max_abs_diff(rho * rld.ops[mu], d) <= 1e-10);
      }
    }
  }
}

TEST_CASE("tomography information matrices") {
  SUBCASE("mixed tomography r = 0.5, theta = pi/2") {
    const InfoMatrices info = analyze(point(ModelId::MixedTomography, {0.5, kPi / 2, 0.0}));
    CHECK(max_abs_diff(info.q, RMat::diagonal({4.0 / 3.0, 0.25, 0.25})) < 1e-14);
    CHECK(max_abs_diff(inverse(info.q), RMat::diagonal({0.75, 4.0, 4.0})) < 1e-13);
  }
  SUBCASE("mixed tomography r = 0.8: D lives on the angles") {
    const double r = 0.8, th = 1.1;
    const InfoMatrices info = analyze(point(ModelId::MixedTomography, {r, th, 0.4}));
    CHECK(std::abs(info.d(1, 2) - r * r * r * std::sin(th)) < 1e-14);
    CHECK(std::abs(info.d(2, 1) + r * r * r * std::sin(th)) < 1e-14);
    CHECK(std::abs(info.d(0, 1)) < 1e-14);
    CHECK(std::abs(info.d(0, 2)) < 1e-14);
  }
  SUBCASE("pure tomography theta = pi/3 uses the state-vector route") {
    const ModelPoint mp = point(ModelId::PureTomography, {kPi / 3, 0.2});
    const InfoMatrices info = analyze(mp);
    CHECK_FALSE(info.j.has_value());
    CHECK(max_abs_diff(info.q, RMat::diagonal({1.0, 0.75})) < 1e-15);
    CHECK(std::abs(info.d(0, 1) - std::sin(kPi / 3)) < 1e-15);
  }
  SUBCASE("pure tomography theta = pi/2: |D_theta,phi| = sin(theta) = 1") {
    const InfoMatrices info = analyze(point(ModelId::PureTomography, {kPi / 2, 0.0}));
    CHECK(std::abs(std::abs(info.d(0, 1)) - 1.0) < 1e-15);
    CHECK(info.d(0, 1) == -info.d(1, 0));
  }
  SUBCASE("the pure route matches the SLD route on the support") {
    const ModelPoint mp = point(ModelId::PureTomography, {0.9, -0.7});
    const InfoMatrices pure = pure_state_info(*mp.pure);
    const InfoMatrices sld = info_matrices(mp.rho, sld_operators(mp.rho, mp.drho), nullptr);
    CHECK(max_abs_diff(pure.q, sld.q) < 1e-12);
    CHECK(max_abs_diff(pure.d, sld.d) < 1e-12);
  }
}

TEST_CASE("dephasing closed-form information matrices") {
  std::mt19937_64 rng(207);
  std::uniform_real_distribution<double> u(0.1, 1.5);
  for (int k = 0; k < 200; ++k) {
    const double g = u(rng), om = u(rng), th = 2.0 * u(rng), t = u(rng);
    const InfoMatrices info = analyze(point(ModelId::Dephasing, {g, om}, th, t));
    const double s2 = std::pow(std::sin(th), 2), c = std::cos(th);
    const double m = std::expm1(2.0 * g * t);
    CHECK(std::abs(info.q(0, 0) - t * t * s2 / m) <= 1e-12 * info.q(0, 0));
    CHECK(std::abs(info.q(1, 1) - t * t * s2 * std::exp(-2.0 * g * t)) <= 1e-12 * info.q(1, 1));
    CHECK(std::abs(info.q(0, 1)) <= 1e-12 * info.q.max_abs());
    CHECK(std::abs(std::abs(info.d(0, 1)) - std::abs(c) * t * t * s2 * std::exp(-2.0 * g * t)) <=
          1e-12 * info.q.max_abs());
    const CMat& j = *info.j;
    const double scale = t * t / m;
    CHECK(std::abs(j(0, 0) - scale) <= 1e-10 * scale);
    CHECK(std::abs(j(1, 1) - scale) <= 1e-10 * scale);
    CHECK(std::abs(j(0, 1) - cplx(0.0, -scale * c)) <= 1e-10 * scale);
  }
}

TEST_CASE("quantumness") {
  std::mt19937_64 rng(211);
  std::uniform_real_distribution<double> th(0.1, kPi - 0.1), ph(-kPi, kPi);
  for (int k = 0; k < 200; ++k) {
    CHECK(std::abs(quantumness(analyze(point(ModelId::PureTomography, {th(rng), ph(rng)}))) - 1.0) < 1e-12);
  }
  CHECK(std::abs(quantumness(analyze(point(ModelId::MixedTomography, {0.37, 1.2, 0.3}))) - 0.37) < 1e-12);

  const InfoMatrices deph = analyze(point(ModelId::Dephasing, {1.0, 1.0}, kPi / 3));
  const double expect = 0.5 * std::sqrt(1.0 - std::exp(-2.0));
  CHECK(std::abs(quantumness(deph) - expect) < 1e-12);
  CHECK(std::abs(quantumness(deph) - 0.4649) < 1e-4);
  CHECK(std::abs(quantumness_two_param(deph) - expect) < 1e-12);

  CHECK_THROWS_AS(quantumness_two_param(analyze(point(ModelId::MixedTomography, {0.5, 1.0, 0.0}))), Unsupported);
  InfoMatrices singular{RMat{{1.0, 1.0}, {1.0, 1.0}}, RMat(2), std::nullopt, 2, std::nullopt};
  CHECK_THROWS_AS(quantumness(singular), SingularModel);
}

TEST_CASE("single-parameter restriction has D = 0") {
  const ModelPoint mp = point(ModelId::AmplitudeDamping, {0.4, 1.0});
  const DerivativeSet one{{mp.drho.mats[1]}};
  const InfoMatrices info = info_matrices(mp.rho, sld_operators(mp.rho, one), nullptr);
  CHECK(info.n == 1);
  CHECK(info.d(0, 0) == 0.0);
}

TEST_CASE("reparametrization leaves R unchanged") {
  const InfoMatrices pure = analyze(point(ModelId::PureTomography, {0.8, 0.1}));
  const InfoMatrices same = reparametrize(pure, RMat::identity(2));
  CHECK(max_abs_diff(same.q, pure.q) == 0.0);
  CHECK(std::abs(quantumness(reparametrize(pure, RMat::diagonal({2.0, 3.0}))) - 1.0) < 1e-12);

  std::mt19937_64 rng(213);
  double worst = 0.0;
  for (const auto& m : model_registry()) {
    const ResolvedPoint p = random_point(m.id, rng);
    const InfoMatrices info = analyze(evaluate(p.id, p.lambda, p.ctrl));
    const double r = quantumness_raw(info);
    for (int k = 0; k < 1000; ++k) {
      const RMat b = random_invertible(info.n, rng);
      const InfoMatrices moved = reparametrize(info, b);
      worst = std::max(worst, std::abs(quantumness_raw(moved) - r));
      if (moved.j) CHECK(max_abs_diff(*moved.j * *moved.j_inv, CMat::identity(info.n)) < 1e-8);
    }
  }
  CHECK(worst <= 1e-9);
  CHECK_THROWS_AS(reparametrize(pure, RMat{{1.0, 2.0}, {0.5, 1.0}}), SingularMatrix);
}

TEST_CASE("two-parameter determinant form of R") {
  std::mt19937_64 rng(217);
  for (const auto& m : model_registry()) {
    if (param_count(m.id) != 2) continue;
    for (int k = 0; k < 200; ++k) {
      const ResolvedPoint p = random_point(m.id, rng);
      const InfoMatrices info = analyze(evaluate(p.id, p.lambda, p.ctrl));
      CHECK(std::abs(quantumness_raw(info) - quantumness_two_param(info)) <= 1e-9);
    }
  }
}

TEST_CASE("rank-deficient states") {
  const DensityMatrix ground = rho_of(to_complex(RMat::diagonal({1.0, 0.0})));
  // A tangent derivative (off-diagonal only) is fine.
  CHECK_NOTHROW(sld_operators(ground, DerivativeSet{{pauli(1) * cplx(0.5)}}));
  // A population flowing into the kernel is not.
  CHECK_THROWS_AS(sld_operators(ground, DerivativeSet{{pauli(3) * cplx(-0.5)}}), PureLimit);
  CHECK_THROWS_AS(rld_operators(ground, DerivativeSet{{pauli(1) * cplx(0.5)}}), RldUndefined);
  CHECK_THROWS_AS(rld_information(ground, DerivativeSet{{pauli(1) * cplx(0.5)}}), RldUndefined);
}

TEST_CASE("RLD inverse stays accurate close to a pure state") {
  // Amplitude damping near the pole: J is nearly rank one.
  for (double theta : {0.05, 0.02, 0.01}) {
    const InfoMatrices info = analyze(point(ModelId::AmplitudeDamping, {std::log(2.0), 1.0}, theta));
    REQUIRE(info.j_inv.has_value());
    const CMat prod = *info.j * *info.j_inv;
    CHECK(max_abs_diff(prod, CMat::identity(2)) < 1e-6);
    // At gamma t = ln 2 the model is D-invariant: Im(J^{-1}) = Q^{-1} D Q^{-1}.
    const RMat qinv = inverse(info.q);
    const RMat target = qinv * info.d * qinv;
    CHECK(max_abs_diff(imag_part(*info.j_inv), -target) <= 1e-8 * target.max_abs());
    CHECK(max_abs_diff(real_part(*info.j_inv), qinv) <= 1e-8 * qinv.max_abs());
  }
}
