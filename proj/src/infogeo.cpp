#include "qinc/infogeo.hpp"

#include <array>
#include <cmath>
#include <string>

#include "qinc/errors.hpp"

namespace qinc {

namespace {

constexpr double kPairFloor = 1e-12;
constexpr double kNullBlockTol = 1e-8;
constexpr double kRldRankTol = 1e-10;
constexpr double kPureSwitch = 1e-9;

cplx trace_prod(const CMat& a, const CMat& b) {
  cplx s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int k = 0; k < a.dim(); ++k) s += a(i, k) * b(k, i);
  return s;
}

cplx inner(const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

}  // namespace

SldSet sld_operators(const DensityMatrix& rho, const DerivativeSet& drho) {
  const EigenSystem es = herm_eig(rho.mat());
  const CMat& v = es.vectors;
  const CMat vdag = v.adjoint();
  SldSet out;
  for (std::size_t mu = 0; mu < drho.size(); ++mu) {
    const CMat& d = drho.mats[mu];
    const CMat m = vdag * d * v;
    const double scale = std::max(d.max_abs(), 1e-300);
    CMat l(2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double denom = es.values[i] + es.values[j];
        if (denom > kPairFloor) {
          l(i, j) = 2.0 * m(i, j) / denom;
        } else if (std::abs(m(i, j)) > kNullBlockTol * scale) {
          throw PureLimit("derivative " + std::to_string(mu) +
                          " has a component outside the support of a rank-deficient state");
        }
      }
    }
    CMat op = v * l * vdag;
    out.ops.push_back((op + op.adjoint()) * cplx(0.5));
  }
  return out;
}

RldSet rld_operators(const DensityMatrix& rho, const DerivativeSet& drho) {
  const EigenSystem es = herm_eig(rho.mat());
  if (es.values.back() <= kRldRankTol) {
    throw RldUndefined("RLD needs a full-rank state; smallest eigenvalue is " +
                       std::to_string(es.values.back()));
  }
  const CMat inv = inverse(rho.mat());
  RldSet out;
  for (const auto& d : drho.mats) out.ops.push_back(inv * d);
  return out;
}

InfoMatrices info_matrices(const DensityMatrix& rho, const SldSet& sld, const RldSet* rld) {
  const int n = static_cast<int>(sld.ops.size());
  const CMat& r = rho.mat();
  InfoMatrices info{RMat(n), RMat(n), std::nullopt, n};
  for (int m = 0; m < n; ++m) {
    for (int k = m; k < n; ++k) {
      const CMat lmk = sld.ops[m] * sld.ops[k];
      const CMat lkm = sld.ops[k] * sld.ops[m];
      const double q = 0.5 * trace_prod(r, lmk + lkm).real();
      info.q(m, k) = info.q(k, m) = q;
      if (k != m) {
        const double dv = (cplx(0.0, -0.5) * trace_prod(r, lmk - lkm)).real();
        info.d(m, k) = dv;
        info.d(k, m) = -dv;
      }
    }
  }
  if (rld != nullptr) {
    CMat j(n);
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) j(m, k) = trace_prod(r, rld->ops[k] * rld->ops[m].adjoint());
    info.j = (j + j.adjoint()) * cplx(0.5);
    try {
      info.j_inv = inverse(*info.j);
    } catch (const SingularMatrix& e) {
      throw SingularModel(std::string("RLD-QFI matrix is singular: ") + e.what());
    }
  }
  return info;
}

RldInformation rld_information(const DensityMatrix& rho, const DerivativeSet& drho) {
  const EigenSystem es = herm_eig(rho.mat());
  if (es.values.back() <= kRldRankTol) {
    throw RldUndefined("RLD needs a full-rank state; smallest eigenvalue is " +
                       std::to_string(es.values.back()));
  }
  const int n = static_cast<int>(drho.size());
  const CMat vdag = es.vectors.adjoint();
  std::vector<std::array<cplx, 4>> u(n);
  for (int mu = 0; mu < n; ++mu) {
    const CMat b = vdag * drho.mats[mu] * es.vectors;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) u[mu][2 * i + k] = b(i, k) / std::sqrt(es.values[i]);
  }
  RldInformation out{CMat(n), CMat(n)};
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      cplx s = 0.0;
      for (int x = 0; x < 4; ++x) s += std::conj(u[m][x]) * u[k][x];
      out.j(m, k) = s;
    }
  if (n != 2) {
    try {
      out.j_inv = inverse(out.j);
    } catch (const SingularMatrix& e) {
      throw SingularModel(std::string("RLD-QFI matrix is singular: ") + e.what());
    }
    return out;
  }
  double det = 0.0;
  for (int x = 0; x < 4; ++x)
    for (int y = x + 1; y < 4; ++y) det += std::norm(u[0][x] * u[1][y] - u[0][y] * u[1][x]);
  if (!(det > 1e-14 * std::pow(out.j.max_abs(), 2))) {
    throw SingularModel("RLD-QFI matrix is singular: |det| = " + std::to_string(det));
  }
  out.j_inv(0, 0) = out.j(1, 1) / det;
  out.j_inv(1, 1) = out.j(0, 0) / det;
  out.j_inv(0, 1) = -out.j(0, 1) / det;
  out.j_inv(1, 0) = -out.j(1, 0) / det;
  return out;
}

InfoMatrices pure_state_info(const PureState& state) {
  const int n = static_cast<int>(state.dpsi.size());
  InfoMatrices info{RMat(n), RMat(n), std::nullopt, n};
  std::vector<cplx> a(n);
  for (int m = 0; m < n; ++m) a[m] = inner(state.dpsi[m], state.psi);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      const cplx c = inner(state.dpsi[m], state.dpsi[k]);
      info.q(m, k) = 4.0 * (c + a[m] * a[k]).real();
      info.d(m, k) = m == k ? 0.0 : 4.0 * c.imag();
    }
  }
  return info;
}

InfoMatrices analyze(const ModelPoint& point) {
  const EigenSystem es = herm_eig(point.rho.mat());
  const double p_min = es.values.back();
  if (point.pure && p_min < kPureSwitch) return pure_state_info(*point.pure);

  const SldSet sld = sld_operators(point.rho, point.drho);
  InfoMatrices info = info_matrices(point.rho, sld, nullptr);
  if (p_min > kRldRankTol) {
    RldInformation rld = rld_information(point.rho, point.drho);
    info.j = std::move(rld.j);
    info.j_inv = std::move(rld.j_inv);
  }
  return info;
}

double quantumness_raw(const InfoMatrices& info) {
  RMat qinv(info.n);
  try {
    qinv = inverse(info.q);
  } catch (const SingularMatrix& e) {
    throw SingularModel(std::string("SLD-QFI matrix is singular: ") + e.what());
  }
  return largest_abs_eig(to_complex(qinv * info.d) * cplx(0.0, 1.0));
}

double quantumness(const InfoMatrices& info) { return std::clamp(quantumness_raw(info), 0.0, 1.0); }

double quantumness_two_param(const InfoMatrices& info) {
  if (info.n != 2) throw Unsupported("determinant form of R needs exactly two parameters");
  const double dq = determinant(info.q);
  if (!(dq > 0.0)) throw SingularModel("det Q is not positive");
  return std::sqrt(std::max(0.0, determinant(info.d)) / dq);
}

InfoMatrices reparametrize(const InfoMatrices& info, const RMat& b) {
  if (b.dim() != info.n) throw std::invalid_argument("reparametrize: dimension mismatch");
  const double det = std::abs(determinant(b));
  if (!(det > 1e-12)) throw SingularMatrix("reparametrization matrix is singular", det);
  const RMat bt = b.transpose();
  InfoMatrices out{b * info.q * bt, b * info.d * bt, std::nullopt, info.n};
  if (info.j) {
    out.j = to_complex(b) * *info.j * to_complex(bt);
    const RMat binv = inverse(b);
    out.j_inv = to_complex(binv.transpose()) * *info.j_inv * to_complex(binv);
  }
  return out;
}

}  // namespace qinc
