#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "delayrl/rng.hpp"

namespace delayrl {

using Vec = std::vector<double>;

struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense symmetric matrix in row-major order. Symmetry is the caller's
// responsibility when writing entries directly; positive definiteness is
// checked where it is needed (cholesky_factor), not on construction.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim, 0.0) {}

  static SpdMatrix identity(int dim, double value = 1.0) {
    SpdMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = value;
    return m;
  }

  int dim() const { return dim_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }
  const double* data() const { return a_.data(); }

  // A += weight * phi * phi^T  (symmetric rank-one update)
  void add_outer(std::span<const double> phi, double weight);
  void add_diagonal(double value);
  Vec multiply(std::span<const double> x) const;

 private:
  int dim_ = 0;
  std::vector<double> a_;
};

// Lower-triangular Cholesky factor L with M = L L^T, row-major full storage.
struct CholeskyFactor {
  int dim = 0;
  std::vector<double> lower;
  double at(int i, int j) const { return lower[static_cast<size_t>(i) * dim + j]; }
};

// Cholesky-Crout factorization. Throws NotPositiveDefinite when a pivot is
// not strictly positive, std::invalid_argument when the input is asymmetric.
CholeskyFactor cholesky_factor(const SpdMatrix& m);

// Solves (L L^T) x = rhs by forward then backward substitution.
Vec solve_spd(const CholeskyFactor& factor, std::span<const double> rhs);

// Draws mean + scale * L^{-T} z with z standard normal, i.e. a sample from
// N(mean, scale^2 * M^{-1}) where M = L L^T. scale = 0 returns mean exactly
// without consuming randomness.
Vec sample_gaussian(std::span<const double> mean, const CholeskyFactor& factor,
                    double scale, RngStream& rng);

// Largest eigenvalue by power iteration from the normalized all-ones vector,
// stopping when the Rayleigh quotient moves by at most tol relatively.
double max_eigenvalue(const SpdMatrix& m, double tol = 1e-8, int max_iter = 10000);

// All eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi.
Vec symmetric_eigenvalues(const SpdMatrix& m);

// M^{-1} from its Cholesky factor (column-by-column solves, symmetrized).
SpdMatrix spd_inverse(const CholeskyFactor& factor);

// Product of two symmetric matrices, symmetrized. Exact when the factors
// commute, which is the only way it is used here.
SpdMatrix sym_product(const SpdMatrix& a, const SpdMatrix& b);

// n-th power of a symmetric matrix by repeated squaring (n >= 0).
SpdMatrix sym_power(const SpdMatrix& m, long n);

}  // namespace delayrl
