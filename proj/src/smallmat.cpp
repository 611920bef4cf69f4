#include "qinc/smallmat.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qinc/errors.hpp"

namespace qinc {

namespace {

constexpr double kHermTol = 1e-10;
constexpr double kPsdClip = 1e-12;
constexpr double kSingularRel = 1e-14;

double hermiticity_defect(const CMat& h) { return max_abs_diff(h, h.adjoint()); }

void sort_descending(EigenSystem& es) {
  const int n = es.vectors.dim();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return es.values[a] > es.values[b]; });
  EigenSystem out{std::vector<double>(n), CMat(n)};
  for (int k = 0; k < n; ++k) {
    out.values[k] = es.values[idx[k]];
    for (int i = 0; i < n; ++i) out.vectors(i, k) = es.vectors(i, idx[k]);
  }
  es = std::move(out);
}

EigenSystem herm_eig2(const CMat& h) {
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const cplx b = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
  const double mean = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double rad = std::hypot(half_diff, std::abs(b));
  const double det = a * d - std::norm(b);

  // The eigenvalue of smaller magnitude is recovered from the determinant so
  // that nearly pure states keep full relative accuracy in p_min.
  double hi, lo;
  if (mean >= 0.0) {
    hi = mean + rad;
    lo = hi != 0.0 ? det / hi : mean - rad;
  } else {
    lo = mean - rad;
    hi = lo != 0.0 ? det / lo : mean + rad;
  }

  EigenSystem es{{hi, lo}, CMat::identity(2)};
  if (std::abs(b) == 0.0) {
    if (a < d) {
      es.vectors = CMat{{0.0, 1.0}, {1.0, 0.0}};
    }
    return es;
  }
  cplx v0, v1;
  if (half_diff >= 0.0) {
    v0 = half_diff + rad;
    v1 = std::conj(b);
  } else {
    v0 = b;
    v1 = rad - half_diff;
  }
  const double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
  v0 /= nrm;
  v1 /= nrm;
  es.vectors(0, 0) = v0;
  es.vectors(1, 0) = v1;
  es.vectors(0, 1) = -std::conj(v1);
  es.vectors(1, 1) = std::conj(v0);
  return es;
}

// Cyclic Jacobi: each step removes the phase of H_pq with a diagonal unitary,
// then applies a real Givens rotation.
EigenSystem herm_eig_jacobi(CMat h) {
  const int n = h.dim();
  CMat v = CMat::identity(n);
  const double scale = std::max(h.max_abs(), std::numeric_limits<double>::min());
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(h(p, q)));
    if (off <= 1e-17 * scale) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx hpq = h(p, q);
        const double apq = std::abs(hpq);
        if (apq <= 1e-300) continue;
        const cplx phase = hpq / apq;
        const double app = h(p, p).real();
        const double aqq = h(q, q).real();
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        CMat u = CMat::identity(n);
        u(p, p) = c;
        u(p, q) = s;
        u(q, p) = -s * std::conj(phase);
        u(q, q) = c * std::conj(phase);
        h = u.adjoint() * h * u;
        h(p, q) = 0.0;
        h(q, p) = 0.0;
        v = v * u;
      }
    }
  }
  EigenSystem es{std::vector<double>(n), v};
  for (int i = 0; i < n; ++i) es.values[i] = h(i, i).real();
  sort_descending(es);
  return es;
}

template <typename M>
auto determinant_impl(const M& a) {
  if (a.dim() == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (a.dim() == 3) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  }
  return a(0, 0);
}

template <typename M>
M inverse_impl(const M& a) {
  const int n = a.dim();
  const auto det = determinant_impl(a);
  const double scale = a.max_abs();
  if (!(std::abs(det) > kSingularRel * std::pow(scale, n))) {
    throw SingularMatrix("matrix is numerically singular", std::abs(det));
  }
  M r(n);
  if (n == 1) {
    r(0, 0) = 1.0 / a(0, 0);
  } else if (n == 2) {
    r(0, 0) = a(1, 1) / det;
    r(0, 1) = -a(0, 1) / det;
    r(1, 0) = -a(1, 0) / det;
    r(1, 1) = a(0, 0) / det;
  } else {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        // cofactor C_ji / det
        const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
        const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
        r(i, j) = (a(r0, c0) * a(r1, c1) - a(r0, c1) * a(r1, c0)) / det;
      }
    }
  }
  return r;
}

}  // namespace

CMat to_complex(const RMat& m) {
  CMat r(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) r(i, j) = m(i, j);
  return r;
}

RMat real_part(const CMat& m) {
  RMat r(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) r(i, j) = m(i, j).real();
  return r;
}

RMat imag_part(const CMat& m) {
  RMat r(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) r(i, j) = m(i, j).imag();
  return r;
}

double max_abs_diff(const CMat& a, const CMat& b) { return (a - b).max_abs(); }
double max_abs_diff(const RMat& a, const RMat& b) { return (a - b).max_abs(); }

CMat pauli(int k) {
  switch (k) {
    case 0:
      return CMat::identity(2);
    case 1:
      return CMat{{0.0, 1.0}, {1.0, 0.0}};
    case 2:
      return CMat{{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}};
    case 3:
      return CMat{{1.0, 0.0}, {0.0, -1.0}};
    default:
      throw std::invalid_argument("pauli index must be in 0..3");
  }
}

EigenSystem herm_eig(const CMat& h) {
  if (!h.all_finite()) throw NotHermitian("herm_eig: non-finite entries");
  const double defect = hermiticity_defect(h);
  if (defect > kHermTol * std::max(1.0, h.max_abs())) {
    throw NotHermitian("herm_eig: ||H - H^dag||_max = " + std::to_string(defect));
  }
  if (h.dim() == 1) return {{h(0, 0).real()}, CMat::identity(1)};
  if (h.dim() == 2) return herm_eig2(h);
  CMat sym = h;
  for (int i = 0; i < h.dim(); ++i) {
    sym(i, i) = h(i, i).real();
    for (int j = i + 1; j < h.dim(); ++j) {
      sym(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));
      sym(j, i) = std::conj(sym(i, j));
    }
  }
  return herm_eig_jacobi(sym);
}

std::vector<double> singular_values(const CMat& a) {
  if (!a.all_finite()) throw std::invalid_argument("singular_values: non-finite entries");
  const int n = a.dim();
  CMat u = a;
  auto col_dot = [&](int i, int j) {
    cplx s = 0.0;
    for (int k = 0; k < n; ++k) s += std::conj(u(k, i)) * u(k, j);
    return s;
  };
  for (int sweep = 0; sweep < 64; ++sweep) {
    bool rotated = false;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double alpha = col_dot(i, i).real();
        const double beta = col_dot(j, j).real();
        const cplx g = col_dot(i, j);
        const double ag = std::abs(g);
        if (ag <= 1e-16 * std::sqrt(alpha * beta) || ag == 0.0) continue;
        rotated = true;
        const cplx phase = g / ag;
        const double zeta = (beta - alpha) / (2.0 * ag);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int k = 0; k < n; ++k) {
          const cplx ui = u(k, i);
          const cplx uj = u(k, j) * std::conj(phase);
          u(k, i) = c * ui - s * uj;
          u(k, j) = s * ui + c * uj;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (int i = 0; i < n; ++i) sv[i] = std::sqrt(col_dot(i, i).real());
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

double trace_norm(const CMat& a) {
  const auto sv = singular_values(a);
  return std::accumulate(sv.begin(), sv.end(), 0.0);
}

double trace_norm(const RMat& a) { return trace_norm(to_complex(a)); }

RMat psd_sqrt(const RMat& w) {
  const double asym = max_abs_diff(w, w.transpose());
  if (asym > kHermTol * std::max(1.0, w.max_abs())) {
    throw NotHermitian("psd_sqrt: matrix is not symmetric");
  }
  const EigenSystem es = herm_eig(to_complex(w));
  const double radius = std::max(1.0, std::abs(es.values.front()));
  const int n = w.dim();
  CMat root(n);
  for (int k = 0; k < n; ++k) {
    double p = es.values[k];
    if (p < -kPsdClip * radius) {
      throw NotPsd("psd_sqrt: eigenvalue " + std::to_string(p) + " is negative");
    }
    p = std::sqrt(std::max(p, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        root(i, j) += p * es.vectors(i, k) * std::conj(es.vectors(j, k));
  }
  RMat r = real_part(root);
  return 0.5 * (r + r.transpose());
}

cplx determinant(const CMat& a) { return determinant_impl(a); }
double determinant(const RMat& a) { return determinant_impl(a); }

CMat inverse(const CMat& a) { return inverse_impl(a); }
RMat inverse(const RMat& a) { return inverse_impl(a); }

std::vector<cplx> eigenvalues(const CMat& a) {
  const int n = a.dim();
  if (n == 1) return {a(0, 0)};
  if (n == 2) {
    const cplx mean = 0.5 * (a(0, 0) + a(1, 1));
    const cplx disc = std::sqrt(0.25 * (a(0, 0) - a(1, 1)) * (a(0, 0) - a(1, 1)) + a(0, 1) * a(1, 0));
    return {mean + disc, mean - disc};
  }
  // Characteristic polynomial z^3 + c2 z^2 + c1 z + c0, roots by
  // Durand-Kerner followed by Newton polishing.
  const cplx c2 = -a.trace();
  const cplx c1 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) +
                  a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  const cplx c0 = -determinant(a);
  auto poly = [&](cplx z) { return ((z + c2) * z + c1) * z + c0; };
  auto dpoly = [&](cplx z) { return (3.0 * z + 2.0 * c2) * z + c1; };

  const double bound = 1.0 + std::max({std::abs(c2), std::abs(c1), std::abs(c0)});
  std::array<cplx, 3> z;
  const cplx seed(0.4, 0.9);
  for (int k = 0; k < 3; ++k) z[k] = bound * std::pow(seed, k + 1) / std::abs(std::pow(seed, k + 1));
  for (int it = 0; it < 500; ++it) {
    double move = 0.0;
    for (int k = 0; k < 3; ++k) {
      cplx denom = 1.0;
      for (int m = 0; m < 3; ++m)
        if (m != k) denom *= (z[k] - z[m]);
      if (std::abs(denom) == 0.0) denom = 1e-300;
      const cplx step = poly(z[k]) / denom;
      z[k] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move <= 1e-16 * bound) break;
  }
  for (auto& r : z) {
    for (int it = 0; it < 3; ++it) {
      const cplx d = dpoly(r);
      if (std::abs(d) < 1e-300) break;
      const cplx next = r - poly(r) / d;
      if (std::abs(poly(next)) >= std::abs(poly(r))) break;
      r = next;
    }
  }
  return {z.begin(), z.end()};
}

double largest_abs_eig(const CMat& a) {
  double m = 0.0;
  for (const auto& e : eigenvalues(a)) m = std::max(m, std::abs(e));
  return m;
}

}  // namespace qinc
