#include "qinc/models.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "qinc/errors.hpp"

namespace qinc {

namespace {

constexpr double kPi = std::numbers::pi;
// Strict margin keeping the SLD-QFI away from its singular points.
constexpr double kMargin = 1e-6;
constexpr double kStateTol = 1e-10;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

void require_open(double v, double lo, double hi, const std::string& name) {
  require(std::isfinite(v) && v > lo && v < hi,
          name + " = " + fmt(v) + " outside (" + fmt(lo) + ", " + fmt(hi) + ")");
}

void require_nonneg(double v, const std::string& name) {
  require(std::isfinite(v) && v >= 0.0, name + " = " + fmt(v) + " must be >= 0");
}

CMat outer(const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
  CMat m(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = a[i] * std::conj(b[j]);
  return m;
}

std::array<cplx, 2> initial_state(const ModelControls& c) {
  return {std::cos(c.theta0 / 2), std::polar(1.0, c.phi0) * std::sin(c.theta0 / 2)};
}

CMat from_bloch_unchecked(const std::array<double, 3>& g) {
  CMat m = pauli(0);
  for (int j = 0; j < 3; ++j) m += pauli(j + 1) * cplx(g[j]);
  return m * cplx(0.5);
}

CMat bloch_derivative(const std::array<double, 3>& dg) {
  CMat m(2);
  for (int j = 0; j < 3; ++j) m += pauli(j + 1) * cplx(dg[j]);
  return m * cplx(0.5);
}

// --- closed forms -----------------------------------------------------------

ModelPoint pure_tomography(const ParamPoint& l) {
  const double th = l[0], ph = l[1];
  const cplx e = std::polar(1.0, ph);
  PureState ps;
  ps.psi = {std::cos(th / 2), e * std::sin(th / 2)};
  ps.dpsi = {{-0.5 * std::sin(th / 2), 0.5 * e * std::cos(th / 2)},
             {0.0, cplx(0.0, 1.0) * e * std::sin(th / 2)}};
  DerivativeSet d;
  for (const auto& dp : ps.dpsi) d.mats.push_back(outer(dp, ps.psi) + outer(ps.psi, dp));
  return {DensityMatrix(outer(ps.psi, ps.psi)), std::move(d), std::move(ps)};
}

ModelPoint mixed_tomography(const ParamPoint& l) {
  const double r = l[0], th = l[1], ph = l[2];
  const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
  const std::array<double, 3> g{r * st * cp, r * st * sp, r * ct};
  DerivativeSet d;
  d.mats.push_back(bloch_derivative({st * cp, st * sp, ct}));
  d.mats.push_back(bloch_derivative({r * ct * cp, r * ct * sp, -r * st}));
  d.mats.push_back(bloch_derivative({-r * st * sp, r * st * cp, 0.0}));
  return {density_from_bloch(g), std::move(d), std::nullopt};
}

// Coherence rho_01 = (1/2) sin(theta0) e^{-k t} e^{-i(omega t + phi0)}; the
// rotation sign follows H = (omega/2) sigma_3.
cplx coherence(double decay, double omega, const ModelControls& c) {
  return 0.5 * std::sin(c.theta0) * std::exp(-decay * c.t) * std::polar(1.0, -(omega * c.t + c.phi0));
}

ModelPoint dephasing(const ParamPoint& l, const ModelControls& c) {
  const double gamma = l[0], omega = l[1], t = c.t;
  const cplx coh = coherence(gamma, omega, c);
  const double up = std::pow(std::cos(c.theta0 / 2), 2);
  CMat rho{{up, coh}, {std::conj(coh), 1.0 - up}};
  CMat d_gamma{{0.0, -t * coh}, {-t * std::conj(coh), 0.0}};
  CMat d_omega{{0.0, cplx(0.0, -t) * coh}, {cplx(0.0, t) * std::conj(coh), 0.0}};
  return {DensityMatrix(rho), DerivativeSet{{d_gamma, d_omega}}, std::nullopt};
}

ModelPoint amplitude_damping(const ParamPoint& l, const ModelControls& c) {
  const double gamma = l[0], omega = l[1], t = c.t;
  const cplx coh = coherence(gamma / 2, omega, c);
  const double excited = std::exp(-gamma * t) * std::pow(std::sin(c.theta0 / 2), 2);
  CMat rho{{1.0 - excited, coh}, {std::conj(coh), excited}};
  CMat d_gamma{{t * excited, -0.5 * t * coh}, {-0.5 * t * std::conj(coh), -t * excited}};
  CMat d_omega{{0.0, cplx(0.0, -t) * coh}, {cplx(0.0, t) * std::conj(coh), 0.0}};
  return {DensityMatrix(rho), DerivativeSet{{d_gamma, d_omega}}, std::nullopt};
}

DensityMatrix integrated_density(ModelId id, const ParamPoint& l, const ModelControls& c) {
  const LindbladProblem p = lindblad_problem(id, l, c);
  return lindblad_integrate(p.hamiltonian, p.jumps, p.rho0, p.t, default_integration_steps(p));
}

DerivativeSet central_diff(const std::function<DensityMatrix(const ParamPoint&)>& f,
                           const ParamPoint& l, double h) {
  DerivativeSet d;
  for (std::size_t mu = 0; mu < l.size(); ++mu) {
    ParamPoint plus = l, minus = l;
    plus.values[mu] += h;
    minus.values[mu] -= h;
    d.mats.push_back((f(plus).mat() - f(minus).mat()) * cplx(1.0 / (2.0 * h)));
  }
  return d;
}

DerivativeSet fd_with(const std::function<DensityMatrix(const ParamPoint&)>& f, ModelId id,
                      const ParamPoint& l, const ModelControls& c, double h, bool richardson) {
  require(h >= 1e-8 && h <= 1e-3, "finite-difference step h = " + fmt(h) + " outside [1e-8, 1e-3]");
  for (std::size_t mu = 0; mu < l.size(); ++mu) {
    ParamPoint plus = l, minus = l;
    plus.values[mu] += h;
    minus.values[mu] -= h;
    check_domain(id, plus, c);
    check_domain(id, minus, c);
  }
  DerivativeSet coarse = central_diff(f, l, h);
  if (!richardson) return coarse;
  DerivativeSet fine = central_diff(f, l, h / 2);
  for (std::size_t mu = 0; mu < l.size(); ++mu) {
    fine.mats[mu] = (fine.mats[mu] * cplx(4.0) - coarse.mats[mu]) * cplx(1.0 / 3.0);
  }
  return fine;
}

}  // namespace

// --- registry ---------------------------------------------------------------

const std::vector<ModelInfo>& model_registry() {
  static const std::vector<ModelInfo> registry = {
      {ModelId::PureTomography, "pure-tomography", {"theta", "phi"},
       "theta in (0, pi), phi real", "cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>", true, false, true},
      {ModelId::MixedTomography, "mixed-tomography", {"r", "theta", "phi"},
       "r in (0, 1), theta in (0, pi), phi real", "(1 + r n.sigma)/2 with Bloch angles (theta, phi)",
       true, false, true},
      {ModelId::Dephasing, "dephasing", {"gamma", "omega"},
       "gamma >= 0, omega real; controls theta in (0, pi), t >= 0",
       "-i(omega/2)[sigma_3, rho] + (gamma/2) D[sigma_3] rho", false, false, true},
      {ModelId::AmplitudeDamping, "amplitude-damping", {"gamma", "omega"},
       "gamma >= 0, omega real; controls theta in (0, pi), t >= 0",
       "-i(omega/2)[sigma_3, rho] + gamma D[|0><1|] rho", false, false, true},
      {ModelId::DepolarizingFrequency, "depolarizing-frequency", {"gamma", "omega"},
       "gamma >= 0, omega real; controls theta in (0, pi), t >= 0",
       "-i(omega/2)[sigma_3, rho] + (gamma/2)(sum_i sigma_i rho sigma_i / 3 - rho)", false, true, false},
      {ModelId::AdPlusDephasing, "ad-dephasing", {"gamma_ad", "gamma_deph"},
       "gamma_ad >= 0, gamma_deph >= 0; controls theta in (0, pi), t >= 0",
       "gamma_ad D[|0><1|] rho + (gamma_deph/2) D[sigma_3] rho", false, true, false},
  };
  return registry;
}

const ModelInfo& model_info(ModelId id) {
  for (const auto& m : model_registry())
    if (m.id == id) return m;
  throw std::logic_error("unregistered model id");
}

ModelId model_from_name(std::string_view name) {
  for (const auto& m : model_registry())
    if (m.name == name) return m.id;
  throw DomainError("unknown model '" + std::string(name) + "'");
}

int param_count(ModelId id) { return static_cast<int>(model_info(id).params.size()); }

ParamPoint ParamPoint::make(ModelId id, std::vector<double> values) {
  const auto& info = model_info(id);
  if (values.size() != info.params.size()) {
    throw DomainError(info.name + " expects " + std::to_string(info.params.size()) + " parameters, got " +
                      std::to_string(values.size()));
  }
  return ParamPoint{std::move(values), info.params};
}

DensityMatrix::DensityMatrix(const CMat& m) : mat_(m) {
  if (m.dim() != 2 || !m.all_finite()) throw DomainError("density matrix must be a finite 2x2 matrix");
  if (max_abs_diff(m, m.adjoint()) > kStateTol) throw DomainError("density matrix is not Hermitian");
  if (std::abs(m.trace() - 1.0) > kStateTol) throw DomainError("density matrix trace " + fmt(m.trace().real()) + " != 1");
  // Hermitize exactly before the eigensolve.
  mat_ = (m + m.adjoint()) * cplx(0.5);
  const auto es = herm_eig(mat_);
  if (es.values.back() < -kStateTol) throw DomainError("density matrix has eigenvalue " + fmt(es.values.back()));
}

void check_domain(ModelId id, const ParamPoint& l, const ModelControls& c) {
  const auto& info = model_info(id);
  require(l.size() == info.params.size(), info.name + " expects " + std::to_string(info.params.size()) + " parameters");
  for (std::size_t i = 0; i < l.size(); ++i) require(std::isfinite(l[i]), info.params[i] + " must be finite");
  switch (id) {
    case ModelId::PureTomography:
      require_open(l[0], kMargin, kPi - kMargin, "theta");
      return;
    case ModelId::MixedTomography:
      require_open(l[0], kMargin, 1.0 - kMargin, "r");
      require_open(l[1], kMargin, kPi - kMargin, "theta");
      return;
    case ModelId::Dephasing:
    case ModelId::AmplitudeDamping:
    case ModelId::DepolarizingFrequency:
      require_nonneg(l[0], "gamma");
      break;
    case ModelId::AdPlusDephasing:
      require_nonneg(l[0], "gamma_ad");
      require_nonneg(l[1], "gamma_deph");
      break;
  }
  require_open(c.theta0, kMargin, kPi - kMargin, "theta");
  require(std::isfinite(c.phi0), "phi must be finite");
  require_nonneg(c.t, "t");
}

ModelPoint evaluate(ModelId id, const ParamPoint& l, const ModelControls& c) {
  check_domain(id, l, c);
  switch (id) {
    case ModelId::PureTomography:
      return pure_tomography(l);
    case ModelId::MixedTomography:
      return mixed_tomography(l);
    case ModelId::Dephasing:
      return dephasing(l, c);
    case ModelId::AmplitudeDamping:
      return amplitude_damping(l, c);
    case ModelId::DepolarizingFrequency:
    case ModelId::AdPlusDephasing:
      return evaluate_numeric(id, l, c);
  }
  throw std::logic_error("unhandled model");
}

DensityMatrix density(ModelId id, const ParamPoint& l, const ModelControls& c) {
  if (model_info(id).closed_form) return evaluate(id, l, c).rho;
  check_domain(id, l, c);
  return integrated_density(id, l, c);
}

DerivativeSet finite_diff_derivatives(ModelId id, const ParamPoint& l, const ModelControls& c, double h,
                                      bool richardson) {
  check_domain(id, l, c);
  return fd_with([&](const ParamPoint& p) { return density(id, p, c); }, id, l, c, h, richardson);
}

// --- Lindblad ---------------------------------------------------------------

CMat lowering_operator() { return CMat{{0.0, 1.0}, {0.0, 0.0}}; }

LindbladProblem lindblad_problem(ModelId id, const ParamPoint& l, const ModelControls& c) {
  check_domain(id, l, c);
  const std::array<cplx, 2> psi0 = initial_state(c);
  LindbladProblem p{{0.0, 0.0, 0.0}, {}, DensityMatrix(outer(psi0, psi0)), c.t};
  switch (id) {
    case ModelId::Dephasing:
      p.hamiltonian = {0.0, 0.0, l[1] / 2};
      p.jumps = {{pauli(3), l[0] / 2}};
      break;
    case ModelId::AmplitudeDamping:
      p.hamiltonian = {0.0, 0.0, l[1] / 2};
      p.jumps = {{lowering_operator(), l[0]}};
      break;
    case ModelId::DepolarizingFrequency:
      p.hamiltonian = {0.0, 0.0, l[1] / 2};
      p.jumps = {{pauli(1), l[0] / 6}, {pauli(2), l[0] / 6}, {pauli(3), l[0] / 6}};
      break;
    case ModelId::AdPlusDephasing:
      p.jumps = {{lowering_operator(), l[0]}, {pauli(3), l[1] / 2}};
      break;
    default:
      throw Unsupported(model_info(id).name + " is not defined by a master equation");
  }
  return p;
}

namespace {
double generator_scale(const std::array<double, 3>& h, const std::vector<JumpOperator>& jumps) {
  // Fastest rates of the generator: precession 2|h|, and 2 * rate * ||A^dag A||
  // for each channel (the coherence decay rate of a sigma_3 channel).
  double s = 2.0 * std::sqrt(h[0] * h[0] + h[1] * h[1] + h[2] * h[2]);
  for (const auto& j : jumps) s += 2.0 * j.rate * herm_eig(j.op.adjoint() * j.op).values.front();
  return s;
}
}  // namespace

int min_integration_steps(const LindbladProblem& p) {
  return static_cast<int>(std::ceil(1000.0 * std::max(1.0, p.t * generator_scale(p.hamiltonian, p.jumps))));
}

int default_integration_steps(const LindbladProblem& p) {
  return static_cast<int>(10000.0 * std::max(1.0, std::ceil(p.t * generator_scale(p.hamiltonian, p.jumps))));
}

CMat lindblad_rhs(const CMat& ham, const std::vector<JumpOperator>& jumps, const CMat& rho) {
  const cplx minus_i(0.0, -1.0);
  CMat out = (ham * rho - rho * ham) * minus_i;
  for (const auto& j : jumps) {
    const CMat adag = j.op.adjoint();
    const CMat ada = adag * j.op;
    out += (j.op * rho * adag - (ada * rho + rho * ada) * cplx(0.5)) * cplx(j.rate);
  }
  return out;
}

DensityMatrix lindblad_integrate(const std::array<double, 3>& h, const std::vector<JumpOperator>& jumps,
                                 const DensityMatrix& rho0, double t, int steps) {
  for (const auto& j : jumps) require_nonneg(j.rate, "dissipator rate");
  require_nonneg(t, "t");
  const int needed = static_cast<int>(std::ceil(1000.0 * std::max(1.0, t * generator_scale(h, jumps))));
  if (steps < needed) {
    throw std::invalid_argument("lindblad_integrate: " + std::to_string(steps) + " steps, need at least " +
                                std::to_string(needed));
  }
  CMat ham(2);
  for (int k = 0; k < 3; ++k) ham += pauli(k + 1) * cplx(h[k]);

  // The generator is linear, so tabulate it once as a 4x4 superoperator on
  // row-major vec(rho) and run the RK4 stages as matrix-vector products.
  using Vec4 = std::array<cplx, 4>;
  std::array<Vec4, 4> gen{};
  for (int c = 0; c < 4; ++c) {
    CMat e(2);
    e(c / 2, c % 2) = 1.0;
    const CMat col = lindblad_rhs(ham, jumps, e);
    for (int r = 0; r < 4; ++r) gen[r][c] = col(r / 2, r % 2);
  }
  auto apply = [&gen](const Vec4& v) {
    Vec4 out{};
    for (int r = 0; r < 4; ++r) out[r] = gen[r][0] * v[0] + gen[r][1] * v[1] + gen[r][2] * v[2] + gen[r][3] * v[3];
    return out;
  };
  auto axpy = [](const Vec4& x, double a, const Vec4& y) {
    Vec4 out;
    for (int r = 0; r < 4; ++r) out[r] = x[r] + a * y[r];
    return out;
  };

  const double dt = t / steps;
  Vec4 v;
  for (int r = 0; r < 4; ++r) v[r] = rho0.mat()(r / 2, r % 2);
  // Compensated (Kahan) update: the finite differences taken over this
  // output divide its round-off by h.
  Vec4 carry{};
  for (int s = 0; s < steps; ++s) {
    const Vec4 k1 = apply(v);
    const Vec4 k2 = apply(axpy(v, 0.5 * dt, k1));
    const Vec4 k3 = apply(axpy(v, 0.5 * dt, k2));
    const Vec4 k4 = apply(axpy(v, dt, k3));
    for (int r = 0; r < 4; ++r) {
      const cplx inc = (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r]) * (dt / 6.0) - carry[r];
      const cplx next = v[r] + inc;
      carry[r] = (next - v[r]) - inc;
      v[r] = next;
    }
  }
  CMat rho(2);
  for (int r = 0; r < 4; ++r) rho(r / 2, r % 2) = v[r];
  const double drift = std::abs(rho.trace() - 1.0);
  if (drift > 1e-6) throw IntegrationError("trace drifted by " + fmt(drift));
  rho = (rho + rho.adjoint()) * cplx(0.5);
  return DensityMatrix(rho);
}

ModelPoint evaluate_numeric(ModelId id, const ParamPoint& l, const ModelControls& c, double h) {
  check_domain(id, l, c);
  auto f = [&](const ParamPoint& p) { return integrated_density(id, p, c); };
  DerivativeSet d = fd_with(f, id, l, c, h, true);
  return {integrated_density(id, l, c), std::move(d), std::nullopt};
}

// --- Bloch ------------------------------------------------------------------

std::array<double, 3> bloch_vector(const DensityMatrix& rho) {
  const CMat& m = rho.mat();
  return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

DensityMatrix density_from_bloch(const std::array<double, 3>& g) {
  const double len = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
  require(len <= 1.0 + 1e-10, "Bloch vector length " + fmt(len) + " exceeds 1");
  return DensityMatrix(from_bloch_unchecked(g));
}

}  // namespace qinc
