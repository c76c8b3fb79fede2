#include "delayrl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace delayrl {

void SpdMatrix::add_outer(std::span<const double> phi, double weight) {
  if (static_cast<int>(phi.size()) != dim_)
    throw DimensionMismatch("add_outer: vector length " + std::to_string(phi.size()) +
                            " vs dim " + std::to_string(dim_));
  for (int i = 0; i < dim_; ++i) {
    const double wi = weight * phi[i];
    double* row = &a_[static_cast<size_t>(i) * dim_];
    for (int j = 0; j < dim_; ++j) row[j] += wi * phi[j];
  }
}

void SpdMatrix::add_diagonal(double value) {
  for (int i = 0; i < dim_; ++i) (*this)(i, i) += value;
}

Vec SpdMatrix::multiply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw DimensionMismatch("multiply: vector length " + std::to_string(x.size()) +
                            " vs dim " + std::to_string(dim_));
  Vec y(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) {
    const double* row = &a_[static_cast<size_t>(i) * dim_];
    double acc = 0.0;
    for (int j = 0; j < dim_; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

CholeskyFactor cholesky_factor(const SpdMatrix& m) {
  const int n = m.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double diff = std::fabs(m(i, j) - m(j, i));
      if (diff > 1e-12 * std::max(1.0, std::fabs(m(i, j))))
        throw std::invalid_argument("cholesky_factor: matrix is not symmetric");
    }

  CholeskyFactor f;
  f.dim = n;
  f.lower.assign(static_cast<size_t>(n) * n, 0.0);
  auto L = [&](int i, int j) -> double& { return f.lower[static_cast<size_t>(i) * n + j]; };
  for (int j = 0; j < n; ++j) {
    double diag = m(j, j);
    for (int k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
    if (!(diag > 0.0))
      throw NotPositiveDefinite("cholesky_factor: pivot " + std::to_string(j) +
                                " is not positive");
    L(j, j) = std::sqrt(diag);
    for (int i = j + 1; i < n; ++i) {
      double off = m(i, j);
      for (int k = 0; k < j; ++k) off -= L(i, k) * L(j, k);
      L(i, j) = off / L(j, j);
    }
  }
  return f;
}

Vec solve_spd(const CholeskyFactor& factor, std::span<const double> rhs) {
  const int n = factor.dim;
  if (static_cast<int>(rhs.size()) != n)
    throw DimensionMismatch("solve_spd: rhs length " + std::to_string(rhs.size()) +
                            " vs dim " + std::to_string(n));
  Vec x(rhs.begin(), rhs.end());
  // L y = rhs
  for (int i = 0; i < n; ++i) {
    double acc = x[i];
    for (int k = 0; k < i; ++k) acc -= factor.at(i, k) * x[k];
    x[i] = acc / factor.at(i, i);
  }
  // L^T x = y
  for (int i = n - 1; i >= 0; --i) {
    double acc = x[i];
    for (int k = i + 1; k < n; ++k) acc -= factor.at(k, i) * x[k];
    x[i] = acc / factor.at(i, i);
  }
  return x;
}

Vec sample_gaussian(std::span<const double> mean, const CholeskyFactor& factor,
                    double scale, RngStream& rng) {
  const int n = factor.dim;
  if (static_cast<int>(mean.size()) != n)
    throw DimensionMismatch("sample_gaussian: mean length " + std::to_string(mean.size()) +
                            " vs dim " + std::to_string(n));
  Vec out(mean.begin(), mean.end());
  if (scale == 0.0) return out;
  Vec z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();
  // x = L^{-T} z has covariance (L L^T)^{-1}
  for (int i = n - 1; i >= 0; --i) {
    double acc = z[i];
    for (int k = i + 1; k < n; ++k) acc -= factor.at(k, i) * z[k];
    z[i] = acc / factor.at(i, i);
  }
  for (int i = 0; i < n; ++i) out[i] += scale * z[i];
  return out;
}

double max_eigenvalue(const SpdMatrix& m, double tol, int max_iter) {
  const int n = m.dim();
  Vec v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    Vec w = m.multiply(v);
    double dot_vw = 0.0, dot_vv = 0.0;
    for (int i = 0; i < n; ++i) {
      dot_vw += v[i] * w[i];
      dot_vv += v[i] * v[i];
    }
    const double rayleigh = dot_vw / dot_vv;
    double norm = 0.0;
    for (double wi : w) norm += wi * wi;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;  // m is the zero matrix
    for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
    if (iter > 0 && std::fabs(rayleigh - lambda) <= tol * std::fabs(rayleigh)) {
      return rayleigh;
    }
    lambda = rayleigh;
  }
  throw NoConvergence("max_eigenvalue: power iteration did not converge in " +
                      std::to_string(max_iter) + " iterations");
}

Vec symmetric_eigenvalues(const SpdMatrix& m) {
  const int n = m.dim();
  SpdMatrix a = m;
  // Cyclic Jacobi: rotate away the largest off-diagonal entries until the
  // off-diagonal mass is negligible relative to the diagonal.
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (int i = 0; i < n; ++i) {
      diag += std::fabs(a(i, i));
      for (int j = i + 1; j < n; ++j) off += std::fabs(a(i, j));
    }
    if (off <= 1e-14 * std::max(diag, 1e-300)) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vec eig(n);
  for (int i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

SpdMatrix spd_inverse(const CholeskyFactor& factor) {
  const int n = factor.dim;
  SpdMatrix inv(n);
  Vec e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    Vec col = solve_spd(factor, e);
    e[j] = 0.0;
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = inv(j, i) = v;
    }
  return inv;
}

SpdMatrix sym_product(const SpdMatrix& a, const SpdMatrix& b) {
  const int n = a.dim();
  if (b.dim() != n)
    throw DimensionMismatch("sym_product: dims " + std::to_string(n) + " vs " +
                            std::to_string(b.dim()));
  SpdMatrix p(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += a(i, k) * b(k, j);
      p(i, j) = acc;
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (p(i, j) + p(j, i));
      p(i, j) = p(j, i) = v;
    }
  return p;
}

SpdMatrix sym_power(const SpdMatrix& m, long n) {
  SpdMatrix result = SpdMatrix::identity(m.dim());
  SpdMatrix base = m;
  while (n > 0) {
    if (n & 1) result = sym_product(result, base);
    base = sym_product(base, base);
    n >>= 1;
  }
  return result;
}

}  // namespace delayrl
