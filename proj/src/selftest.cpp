#include "qinc/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "qinc/errors.hpp"

namespace qinc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTol = 1e-9;

struct Sample {
  ResolvedPoint point;
  ModelPoint mp;
  InfoMatrices info;
  ModelClass cls;
};

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

// Runs `body` and turns an exception into a failure.
SubtestResult guarded(const std::string& name, const std::function<std::string(bool&)>& body) {
  SubtestResult res{name, true, ""};
  try {
    res.detail = body(res.passed);
  } catch (const std::exception& e) {
    res.passed = false;
    res.detail = std::string("exception: ") + e.what();
  }
  return res;
}

std::vector<Sample> draw_samples(std::mt19937_64& rng) {
  std::vector<Sample> out;
  for (const auto& m : model_registry()) {
    const int count = 30;
    for (int k = 0; k < count; ++k) {
      ResolvedPoint p = random_point(m.id, rng);
      ModelPoint mp = evaluate(p.id, p.lambda, p.ctrl);
      InfoMatrices info = analyze(mp);
      const ModelClass cls = classify(info, m.d_invariant);
      out.push_back({std::move(p), std::move(mp), std::move(info), cls});
    }
  }
  return out;
}

const std::string& name_of(const Sample& s) { return model_info(s.point.id).name; }

}  // namespace

ResolvedPoint random_point(ModelId id, std::mt19937_64& rng) {
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  NamedValues v;
  v["theta"] = u(0.2, kPi - 0.2);
  v["phi"] = u(-kPi, kPi);
  switch (id) {
    case ModelId::PureTomography:
      break;
    case ModelId::MixedTomography:
      v["r"] = u(0.05, 0.95);
      break;
    case ModelId::Dephasing:
    case ModelId::AmplitudeDamping:
    case ModelId::DepolarizingFrequency:
      v["gamma"] = u(0.05, 1.5);
      v["omega"] = u(0.2, 3.0);
      v["t"] = u(0.5, 1.5);
      break;
    case ModelId::AdPlusDephasing:
      v["gamma_ad"] = u(0.05, 1.0);
      v["gamma_deph"] = u(0.05, 1.0);
      v["t"] = u(0.5, 1.5);
      break;
  }
  return resolve_point(id, v);
}

RMat random_invertible(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 0.5);
  for (;;) {
    RMat b = RMat::identity(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) += normal(rng);
    if (std::abs(determinant(b)) > 0.1) return b;
  }
}

std::vector<SubtestResult> run_selftest(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SubtestResult> out;

  std::vector<Sample> samples;
  out.push_back(guarded("sampling", [&](bool&) {
    samples = draw_samples(rng);
    return std::to_string(samples.size()) + " model points";
  }));
  if (!out.back().passed) return out;

  out.push_back(guarded("P1 R in [0,1]", [&](bool& ok) {
    double lo = 1.0, hi = 0.0;
    for (const auto& s : samples) {
      const double r = quantumness_raw(s.info);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      if (r < -kTol || r > 1.0 + kTol) ok = false;
    }
    return fmt("min %.3g, max %.12g", lo, hi);
  }));

  out.push_back(guarded("P2 R = 0 iff D = 0", [&](bool& ok) {
    int zero = 0;
    for (const auto& s : samples) {
      const bool r0 = quantumness(s.info) <= kTol;
      const bool d0 = s.info.d.max_abs() <= kTol;
      if (r0 != d0) ok = false;
      zero += r0;
    }
    return std::to_string(zero) + " points with R = 0";
  }));

  out.push_back(guarded("P3 delta_C <= R", [&](bool& ok) {
    double worst = -1.0;
    for (const auto& s : samples) {
      const double r = quantumness(s.info);
      for (int k = 0; k < 10; ++k) {
        const WeightMatrix w = sample_random_weight(rng, s.info.n);
        const double excess = delta_c(w, s.info, s.cls) - r;
        worst = std::max(worst, excess);
        if (excess > kTol) ok = false;
      }
    }
    return fmt("max delta_C - R = %.3g", worst);
  }));

  out.push_back(guarded("P4 determinant form", [&](bool& ok) {
    double worst = 0.0;
    for (const auto& s : samples) {
      if (s.info.n != 2) continue;
      const double diff = std::abs(quantumness_raw(s.info) - quantumness_two_param(s.info));
      worst = std::max(worst, diff);
      if (diff > kTol) ok = false;
    }
    return fmt("max |R - sqrt(det D / det Q)| = %.3g", worst);
  }));

  out.push_back(guarded("P5 reparametrization, 100 random B", [&](bool& ok) {
    double worst = 0.0;
    for (const auto& m : model_registry()) {
      const Sample* s = nullptr;
      for (const auto& c : samples)
        if (c.point.id == m.id) s = &c;
      const double r = quantumness_raw(s->info);
      for (int k = 0; k < 100; ++k) {
        const RMat b = random_invertible(s->info.n, rng);
        const double diff = std::abs(quantumness_raw(reparametrize(s->info, b)) - r);
        worst = std::max(worst, diff);
        if (diff > kTol) ok = false;
      }
    }
    return fmt("max |R' - R| = %.3g", worst);
  }));

  out.push_back(guarded("chain C^S <= C^H <= (1+R) C^S <= 2 C^S", [&](bool& ok) {
    int pairs = 0;
    for (const auto& s : samples) {
      for (int k = 0; k < 10; ++k) {
        const WeightMatrix w = sample_random_weight(rng, s.info.n);
        const BoundsReport rep = bounds_report(w, s.info, s.cls);
        try {
          check_report(rep);
        } catch (const InvariantViolation& e) {
          ok = false;
          return name_of(s) + ": " + e.what();
        }
        if ((1.0 + rep.r) * rep.c_s > 2.0 * rep.c_s + kTol * std::max(1.0, rep.c_s)) ok = false;
        ++pairs;
      }
    }
    return std::to_string(pairs) + " (point, W) pairs";
  }));

  out.push_back(guarded("scale invariance of delta_C", [&](bool& ok) {
    double worst = 0.0;
    for (const auto& s : samples) {
      const WeightMatrix w = sample_random_weight(rng, s.info.n);
      const double base = delta_c(w, s.info, s.cls);
      for (double c : {1e-3, 1e3}) {
        const double diff = std::abs(delta_c(WeightMatrix(w.mat() * c), s.info, s.cls) - base);
        worst = std::max(worst, diff);
        if (diff > 1e-10) ok = false;
      }
    }
    return fmt("max change %.3g", worst);
  }));

  out.push_back(guarded("classical models", [&](bool& ok) {
    double worst_d = 0.0, worst_gap = 0.0;
    int count = 0;
    for (const auto& s : samples) {
      if (!model_info(s.point.id).classical) continue;
      ++count;
      worst_d = std::max(worst_d, s.info.d.max_abs());
      if (s.cls != ModelClass::Classical) ok = false;
      const BoundsReport rep = bounds_report(WeightMatrix::identity(2), s.info, s.cls);
      worst_gap = std::max(worst_gap, std::abs(rep.c_h - rep.c_s));
    }
    if (worst_d > kTol || worst_gap > kTol || count == 0) ok = false;
    return fmt("max |D| = %.3g, max |C^H - C^S| = %.3g", worst_d, worst_gap);
  }));

  out.push_back(guarded("SLD and RLD residuals", [&](bool& ok) {
    double worst = 0.0;
    for (const auto& s : samples) {
      const auto ev = herm_eig(s.mp.rho.mat());
      if (ev.values.back() < 1e-9) continue;
      const CMat& rho = s.mp.rho.mat();
      const SldSet sld = sld_operators(s.mp.rho, s.mp.drho);
      const RldSet rld = rld_operators(s.mp.rho, s.mp.drho);
      for (std::size_t mu = 0; mu < s.mp.drho.size(); ++mu) {
        const CMat& d = s.mp.drho.mats[mu];
        const CMat lyap = (sld.ops[mu] * rho + rho * sld.ops[mu]) * cplx(0.5);
        worst = std::max({worst, max_abs_diff(lyap, d), max_abs_diff(rho * rld.ops[mu], d)});
      }
    }
    if (worst > 1e-8) ok = false;
    return fmt("max residual %.3g", worst);
  }));

  out.push_back(guarded("oracles: closed form vs integrator", [&](bool& ok) {
    double worst = 0.0;
    for (ModelId id : {ModelId::Dephasing, ModelId::AmplitudeDamping}) {
      for (int k = 0; k < 10; ++k) {
        const ResolvedPoint p = random_point(id, rng);
        const InfoMatrices a = analyze(evaluate(p.id, p.lambda, p.ctrl));
        const InfoMatrices b = analyze(evaluate_numeric(p.id, p.lambda, p.ctrl));
        worst = std::max({worst, max_abs_diff(a.q, b.q), max_abs_diff(a.d, b.d)});
        if (a.j && b.j) worst = std::max(worst, max_abs_diff(*a.j, *b.j));
      }
    }
    if (worst > 1e-5) ok = false;
    return fmt("max entry difference %.3g", worst);
  }));

  return out;
}

}  // namespace qinc
