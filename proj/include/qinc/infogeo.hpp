#pragma once

#include <optional>
#include <vector>

#include "qinc/models.hpp"
#include "qinc/smallmat.hpp"

namespace qinc {

/// Symmetric logarithmic derivatives, one Hermitian operator per parameter.
struct SldSet {
  std::vector<CMat> ops;
};

/// Right logarithmic derivatives rho^{-1} d_mu rho (not Hermitian in general).
struct RldSet {
  std::vector<CMat> ops;
};

/// SLD-QFI matrix Q, mean Uhlmann curvature D and (for full-rank states) the
/// RLD-QFI matrix J, all in the parameter order of the originating model.
struct InfoMatrices {
  RMat q;
  RMat d;
  std::optional<CMat> j;
  int n = 2;
  std::optional<CMat> j_inv;  // J^{-1}, present whenever J is
};

/// Solves d_mu rho = (L rho + rho L)/2 in the eigenbasis of rho:
/// (L)_ij = 2 (d rho)_ij / (p_i + p_j). Pairs with p_i + p_j <= 1e-12 get
/// L_ij = 0 when the derivative vanishes there; otherwise PureLimit is thrown.
SldSet sld_operators(const DensityMatrix& rho, const DerivativeSet& drho);

/// L^R_mu = rho^{-1} d_mu rho. Throws RldUndefined when the smallest
/// eigenvalue of rho is below 1e-10.
RldSet rld_operators(const DensityMatrix& rho, const DerivativeSet& drho);

/// Q_mn = Tr[rho {L_m, L_n}] / 2, D_mn = -(i/2) Tr[rho [L_m, L_n]],
/// J_mn = Tr[rho L^R_n L^R_m^dag]. J is left empty when `rld` is null.
InfoMatrices info_matrices(const DensityMatrix& rho, const SldSet& sld, const RldSet* rld);

struct RldInformation {
  CMat j;
  CMat j_inv;
};

/// J as the Gram matrix J_mn = <u_m, u_n> with (u_n)_ij = (d_n rho)_ij / sqrt(p_i)
/// in the eigenbasis of rho. For two parameters det J is taken from the
/// Lagrange identity, which stays accurate when rho is close to pure and
/// J00 J11 - |J01|^2 cancels. Throws RldUndefined like rld_operators.
RldInformation rld_information(const DensityMatrix& rho, const DerivativeSet& drho);

/// Q and D of a pure-state family from the overlaps a_m = <d_m psi|psi> and
/// c_mn = <d_m psi|d_n psi>: Q_mn = 4 Re(c_mn + a_m a_n), D_mn = 4 Im(c_mn).
InfoMatrices pure_state_info(const PureState& state);

/// Chooses the route for a model point: the overlap formulas when a state
/// vector is available and the smallest eigenvalue of rho is below 1e-9,
/// the SLD solve otherwise. J (from rld_information) is attached whenever
/// rho is full rank.
InfoMatrices analyze(const ModelPoint& point);

/// R = ||i Q^{-1} D||_inf, clipped to [0, 1]. Throws SingularModel for singular Q.
double quantumness(const InfoMatrices& info);

/// Unclipped ||i Q^{-1} D||_inf.
double quantumness_raw(const InfoMatrices& info);

/// sqrt(det D / det Q), the two-parameter closed form of R.
double quantumness_two_param(const InfoMatrices& info);

/// Transport to new parameters: Q' = B Q B^T, D' = B D B^T, J' = B J B^T
/// (and J'^{-1} = B^{-T} J^{-1} B^{-1}).
InfoMatrices reparametrize(const InfoMatrices& info, const RMat& b);

}  // namespace qinc
