#ifndef SPLA_LINALG_HPP
#define SPLA_LINALG_HPP

// Dense kernels for the small symmetric problems SPLA works with (M up to a
// few hundred). Everything is a pure function of its inputs.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "spla/error.hpp"
#include "spla/matrix.hpp"

namespace spla {

struct Tolerances {
  double symmetry = 1e-10;
  /// Cholesky pivots must exceed this fraction of their own diagonal entry.
  double pivot_fraction = 1e-12;
  int jacobi_max_sweeps = 100;
  /// Singular values below this are treated as zero by orthogonalize().
  double rank = 1e-10;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

struct EigenResult {
  Vector values;   ///< descending
  Matrix vectors;  ///< columns are the matching unit eigenvectors
};

struct QrResult {
  Matrix q;  ///< rows × cols, orthonormal columns
  Matrix r;  ///< cols × cols, upper triangular, nonnegative diagonal
};

struct SvdResult {
  Matrix u;      ///< rows × k, orthonormal columns
  Vector sigma;  ///< k = min(rows, cols), descending, nonnegative
  Matrix v;      ///< cols × k, orthonormal columns
};

namespace detail {

/// Flip each column so its largest-magnitude entry is positive (first one on ties).
inline void canonical_signs(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j)) > best + 1e-14) {
        best = std::abs(m(i, j));
        arg = i;
      }
    }
    if (m(arg, j) < 0.0)
      for (Index i = 0; i < m.rows(); ++i) m(i, j) = -m(i, j);
  }
}

/// Orthonormal completion: fills zero columns of q (rows × k, other columns
/// orthonormal) with vectors orthogonal to all the others.
inline void complete_orthonormal(Matrix& q, const std::vector<bool>& missing) {
  const Index n = q.rows();
  Index candidate = 0;
  for (Index j = 0; j < q.cols(); ++j) {
    if (!missing[j]) continue;
    while (candidate < n) {
      Vector e(n, 0.0);
      e[candidate++] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (Index k = 0; k < q.cols(); ++k) {
          if (k == j || (missing[k] && k > j)) continue;
          const Vector qk = q.col(k);
          const double p = dot(qk, e);
          for (Index i = 0; i < n; ++i) e[i] -= p * qk[i];
        }
      if (norm2(e) > 1e-8) {
        normalize(e);
        q.set_col(j, e);
        break;
      }
    }
  }
}

}  // namespace detail

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues come back descending; ties keep their original diagonal order.
inline EigenResult sym_eigen(const Matrix& a, const Tolerances& tol = default_tolerances()) {
  if (!a.is_square()) throw Error(ErrorKind::InvalidArgument, "sym_eigen needs a square matrix");
  if (!a.all_finite()) throw Error(ErrorKind::InvalidArgument, "sym_eigen input has non-finite entries");
  const double scale_ref = std::max(a.max_abs(), 1.0);
  if (asymmetry(a) > tol.symmetry * scale_ref)
    throw Error(ErrorKind::NonSymmetric, "max |a_ij - a_ji| exceeds tolerance");

  const Index n = a.rows();
  Matrix d = a;
  Matrix v = Matrix::identity(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = 0.5 * (a(i, j) + a(j, i));

  auto off_norm = [&] {
    double s = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) s += d(i, j) * d(i, j);
    return std::sqrt(2.0 * s);
  };
  const double total = std::max(d.frobenius_norm(), 1e-300);

  bool converged = n <= 1;
  for (int sweep = 0; sweep < tol.jacobi_max_sweeps && !converged; ++sweep) {
    if (off_norm() <= 1e-15 * total) {
      converged = true;
      break;
    }
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = d(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (d(q, q) - d(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double dkp = d(k, p);
          const double dkq = d(k, q);
          d(k, p) = c * dkp - s * dkq;
          d(k, q) = s * dkp + c * dkq;
        }
        for (Index k = 0; k < n; ++k) {
          const double dpk = d(p, k);
          const double dqk = d(q, k);
          d(p, k) = c * dpk - s * dqk;
          d(q, k) = s * dpk + c * dqk;
        }
        d(p, q) = d(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && off_norm() > 1e-15 * total)
    throw Error(ErrorKind::NoConvergence, "Jacobi eigen-solver hit the sweep cap");

  IndexList order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return d(x, x) > d(y, y); });

  EigenResult out{Vector(n), Matrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.values[k] = d(order[k], order[k]);
    for (Index i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  detail::canonical_signs(out.vectors);
  return out;
}

/// Upper-triangular R with RᵀR = a and a strictly positive diagonal.
inline Matrix cholesky_upper(const Matrix& a, const Tolerances& tol = default_tolerances()) {
  if (!a.is_square()) throw Error(ErrorKind::InvalidArgument, "cholesky needs a square matrix");
  const Index n = a.rows();
  Matrix r(n, n);
  for (Index j = 0; j < n; ++j) {
    double s = a(j, j);
    for (Index k = 0; k < j; ++k) s -= r(k, j) * r(k, j);
    if (!(a(j, j) > 0.0) || !(s > tol.pivot_fraction * a(j, j)))
      throw Error(ErrorKind::NotPositiveDefinite,
                  "pivot " + std::to_string(j) + " is " + std::to_string(s));
    const double rjj = std::sqrt(s);
    r(j, j) = rjj;
    for (Index i = j + 1; i < n; ++i) {
      double t = a(j, i);
      for (Index k = 0; k < j; ++k) t -= r(k, j) * r(k, i);
      r(j, i) = t / rjj;
    }
  }
  return r;
}

/// Householder QR of a tall matrix. Diagonal of R is made nonnegative.
inline QrResult qr_decompose(const Matrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (m < n) throw Error(ErrorKind::InvalidArgument, "qr_decompose needs rows >= cols");

  Matrix r = a;
  std::vector<Vector> reflectors;
  reflectors.reserve(n);
  for (Index k = 0; k < n; ++k) {
    Vector h(m - k);
    for (Index i = k; i < m; ++i) h[i - k] = r(i, k);
    const double alpha = norm2(h);
    if (alpha == 0.0) {
      reflectors.emplace_back();
      continue;
    }
    h[0] += (h[0] >= 0.0 ? alpha : -alpha);
    const double hn = norm2(h);
    scale(h, 1.0 / hn);
    for (Index j = k; j < n; ++j) {
      double p = 0.0;
      for (Index i = k; i < m; ++i) p += h[i - k] * r(i, j);
      for (Index i = k; i < m; ++i) r(i, j) -= 2.0 * p * h[i - k];
    }
    reflectors.push_back(std::move(h));
  }

  Matrix q(m, n);
  for (Index j = 0; j < n; ++j) q(j, j) = 1.0;
  for (Index kk = n; kk-- > 0;) {
    const Vector& h = reflectors[kk];
    if (h.empty()) continue;
    for (Index j = 0; j < n; ++j) {
      double p = 0.0;
      for (Index i = kk; i < m; ++i) p += h[i - kk] * q(i, j);
      for (Index i = kk; i < m; ++i) q(i, j) -= 2.0 * p * h[i - kk];
    }
  }

  QrResult out{std::move(q), Matrix(n, n)};
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) out.r(i, j) = r(i, j);
  for (Index i = 0; i < n; ++i) {
    if (out.r(i, i) < 0.0) {
      for (Index j = i; j < n; ++j) out.r(i, j) = -out.r(i, j);
      for (Index k = 0; k < m; ++k) out.q(k, i) = -out.q(k, i);
    }
  }
  return out;
}

/// Thin SVD by one-sided Jacobi (Hestenes) rotations.
inline SvdResult svd(const Matrix& a, const Tolerances& tol = default_tolerances()) {
  if (a.rows() < a.cols()) {
    SvdResult t = svd(a.transpose(), tol);
    return {std::move(t.v), std::move(t.sigma), std::move(t.u)};
  }
  if (!a.all_finite()) throw Error(ErrorKind::InvalidArgument, "svd input has non-finite entries");
  const Index m = a.rows();
  const Index n = a.cols();
  // Columns of a and v are stored as contiguous rows of wt and vt.
  Matrix wt = a.transpose();
  Matrix vt = Matrix::identity(n);
  const double eps = 1e-15;

  auto rotate = [](double* x, double* y, Index len, double c, double s) {
    for (Index i = 0; i < len; ++i) {
      const double xp = x[i];
      const double yq = y[i];
      x[i] = c * xp - s * yq;
      y[i] = s * xp + c * yq;
    }
  };

  bool converged = n <= 1;
  for (int sweep = 0; sweep < tol.jacobi_max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        double* wp = &wt(p, 0);
        double* wq = &wt(q, 0);
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (Index i = 0; i < m; ++i) {
          alpha += wp[i] * wp[i];
          beta += wq[i] * wq[i];
          gamma += wp[i] * wq[i];
        }
        if (std::abs(gamma) <= eps * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(wp, wq, m, c, s);
        rotate(&vt(p, 0), &vt(q, 0), n, c, s);
      }
    }
    if (!rotated) converged = true;
  }
  if (!converged) throw Error(ErrorKind::NoConvergence, "one-sided Jacobi SVD hit the sweep cap");
  const Matrix w = wt.transpose();
  const Matrix v = vt.transpose();

  Vector sigma(n);
  for (Index j = 0; j < n; ++j) sigma[j] = norm2(w.col(j));
  IndexList order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return sigma[x] > sigma[y]; });

  const double smax = n > 0 ? sigma[order[0]] : 0.0;
  SvdResult out{Matrix(m, n), Vector(n), Matrix(n, n)};
  std::vector<bool> missing(n, false);
  for (Index k = 0; k < n; ++k) {
    const Index j = order[k];
    out.sigma[k] = sigma[j];
    for (Index i = 0; i < n; ++i) out.v(i, k) = v(i, j);
    if (sigma[j] > 1e-14 * std::max(smax, 1e-300) && sigma[j] > 0.0) {
      for (Index i = 0; i < m; ++i) out.u(i, k) = w(i, j) / sigma[j];
    } else {
      out.sigma[k] = 0.0;
      missing[k] = true;
    }
  }
  detail::complete_orthonormal(out.u, missing);
  return out;
}

/// Component-wise sign(v_i)·max(|v_i| − delta, 0).
inline Vector soft_threshold(std::span<const double> v, double delta) {
  if (delta < 0.0) throw Error(ErrorKind::InvalidArgument, "soft-threshold delta must be >= 0");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]) - delta;
    out[i] = m > 0.0 ? std::copysign(m, v[i]) : 0.0;
  }
  return out;
}

/// Solves a·x = b for symmetric positive-definite a via its Cholesky factor.
inline Matrix solve_spd(const Matrix& a, const Matrix& b, const Tolerances& tol = default_tolerances()) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::InvalidArgument, "solve_spd shape mismatch");
  const Matrix r = cholesky_upper(a, tol);
  const Index n = a.rows();
  Matrix x = b;
  for (Index c = 0; c < b.cols(); ++c) {
    // Rᵀ y = b
    for (Index i = 0; i < n; ++i) {
      double s = x(i, c);
      for (Index k = 0; k < i; ++k) s -= r(k, i) * x(k, c);
      x(i, c) = s / r(i, i);
    }
    // R x = y
    for (Index i = n; i-- > 0;) {
      double s = x(i, c);
      for (Index k = i + 1; k < n; ++k) s -= r(i, k) * x(k, c);
      x(i, c) = s / r(i, i);
    }
  }
  return x;
}

/// Nearest matrix with orthonormal columns (SVD with unit singular values).
inline Matrix polar_factor(const Matrix& a, const Tolerances& tol = default_tolerances()) {
  const SvdResult s = svd(a, tol);
  return s.u * s.v.transpose();
}

}  // namespace spla

#endif  // SPLA_LINALG_HPP
