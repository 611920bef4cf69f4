#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qinc/smallmat.hpp"

namespace qinc {

enum class ModelId {
  PureTomography,
  MixedTomography,
  Dephasing,
  AmplitudeDamping,
  DepolarizingFrequency,
  AdPlusDephasing,
};

/// Registry entry describing one statistical model.
struct ModelInfo {
  ModelId id;
  std::string name;                 // CLI identifier, e.g. "dephasing"
  std::vector<std::string> params;  // parameter order used by every matrix
  std::string domain;               // human-readable regular domain
  std::string dynamics;             // one-line description of the state family
  bool d_invariant = false;         // known analytically
  bool classical = false;           // D vanishes identically
  bool closed_form = true;          // false: integrator + finite differences
};

const std::vector<ModelInfo>& model_registry();
const ModelInfo& model_info(ModelId id);
/// Throws DomainError for unknown names.
ModelId model_from_name(std::string_view name);
int param_count(ModelId id);

/// Values of the estimated parameters, in the model's registry order.
struct ParamPoint {
  std::vector<double> values;
  std::vector<std::string> names;

  static ParamPoint make(ModelId id, std::vector<double> values);
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

/// Fixed, non-estimated settings. The noisy models start from
/// cos(theta0/2)|0> + e^{i phi0} sin(theta0/2)|1> and evolve for time t.
struct ModelControls {
  double theta0 = 1.0471975511965976;
  double phi0 = 0.0;
  double t = 1.0;
};

/// 2x2 unit-trace positive semi-definite Hermitian matrix.
class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity to 1e-10.
  explicit DensityMatrix(const CMat& m);
  const CMat& mat() const noexcept { return mat_; }

 private:
  CMat mat_;
};

struct DerivativeSet {
  std::vector<CMat> mats;
  std::size_t size() const { return mats.size(); }
};

/// State vector and its parameter derivatives for pure-state models.
struct PureState {
  std::array<cplx, 2> psi;
  std::vector<std::array<cplx, 2>> dpsi;
};

struct ModelPoint {
  DensityMatrix rho;
  DerivativeSet drho;
  std::optional<PureState> pure;
};

/// Throws DomainError naming the violated condition.
void check_domain(ModelId id, const ParamPoint& lambda, const ModelControls& ctrl);

/// State and derivatives. Closed forms for the tomography, dephasing and
/// amplitude-damping families; integrator plus Richardson-extrapolated central
/// differences for the depolarizing and damping+dephasing families.
ModelPoint evaluate(ModelId id, const ParamPoint& lambda, const ModelControls& ctrl);

/// The state alone (closed form where available, integrator otherwise).
DensityMatrix density(ModelId id, const ParamPoint& lambda, const ModelControls& ctrl);

/// Central differences (rho(l + h e_mu) - rho(l - h e_mu)) / 2h of `density`.
/// With `richardson`, combines steps h and h/2 to cancel the O(h^2) term.
DerivativeSet finite_diff_derivatives(ModelId id, const ParamPoint& lambda, const ModelControls& ctrl,
                                      double h = 1e-5, bool richardson = false);

// --- Lindblad dynamics ----------------------------------------------------

/// Dissipator channel `rate * (A rho A^dag - {A^dag A, rho}/2)`.
struct JumpOperator {
  CMat op;
  double rate;
};

/// H = sum_j h_j sigma_j, plus dissipators, acting on rho0 for time t.
struct LindbladProblem {
  std::array<double, 3> hamiltonian{};
  std::vector<JumpOperator> jumps;
  DensityMatrix rho0;
  double t;
};

/// |0><1|, taking the excited state |1> to the ground state |0>.
CMat lowering_operator();

/// Master equation defining a Lindblad-type model. Throws Unsupported for the
/// tomography models.
LindbladProblem lindblad_problem(ModelId id, const ParamPoint& lambda, const ModelControls& ctrl);

/// Smallest admissible step count: 1000 * max(1, t * s), where s adds the
/// precession rate 2 |h| to 2 * rate * ||A^dag A|| for every channel.
int min_integration_steps(const LindbladProblem& p);
/// Default step count: 10^4 per unit of t * s, at least 10^4.
int default_integration_steps(const LindbladProblem& p);

/// Classical fixed-step RK4. Throws IntegrationError when the trace drifts by
/// more than 1e-6 and std::invalid_argument when `steps` is below the minimum.
DensityMatrix lindblad_integrate(const std::array<double, 3>& hamiltonian,
                                 const std::vector<JumpOperator>& jumps, const DensityMatrix& rho0,
                                 double t, int steps);

/// Right-hand side of the master equation, exposed for tests.
CMat lindblad_rhs(const CMat& hamiltonian, const std::vector<JumpOperator>& jumps, const CMat& rho);

/// State from the integrator and derivatives from Richardson-extrapolated
/// central differences of the integrated state (step h).
ModelPoint evaluate_numeric(ModelId id, const ParamPoint& lambda, const ModelControls& ctrl,
                            double h = 1e-5);

// --- Bloch representation -------------------------------------------------

std::array<double, 3> bloch_vector(const DensityMatrix& rho);
/// Throws DomainError when |g| > 1 + 1e-10.
DensityMatrix density_from_bloch(const std::array<double, 3>& g);

}  // namespace qinc
