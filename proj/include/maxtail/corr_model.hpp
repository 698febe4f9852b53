#pragma once

#include <string>
#include <vector>

// Correlation structures for centered Gaussian vectors with unit
// variances: either equicorrelated (all off-diagonal entries equal) or a
// dense symmetric matrix. Models are validated on construction and
// immutable afterwards; all operations are read-only and thread-safe.

namespace maxtail {

class CorrelationModel {
  public:
    // n >= 1; rho in (-1/(n-1), 1]. For n = 1 any rho is accepted and
    // ignored (there are no off-diagonal entries).
    static CorrelationModel equicorrelated(int n, double rho);
    static CorrelationModel identity(int n);
    // Row-major n*n entries. Validates unit diagonal, symmetry (1e-12),
    // entries in [-1, 1], and positive semidefiniteness within an
    // eigenvalue tolerance of -1e-10*n. Singular matrices are permitted.
    static CorrelationModel dense(int n, std::vector<double> row_major);
    // Header-free CSV, n rows of n comma-separated reals. Parse errors
    // name the offending row and column.
    static CorrelationModel from_csv(const std::string& path);

    int dim() const { return n_; }
    bool is_equicorrelated() const { return equicorrelated_; }
    double rho() const;  // equicorrelated models only
    double entry(int i, int j) const;

    struct OffDiagonalExtremes {
        double signed_max;  // max over i != j of R_ij
        double abs_max;     // max over i != j of |R_ij|
        bool defined;       // false for n = 1 (values are -infinity)
    };
    OffDiagonalExtremes max_offdiag() const;

    // A with n rows and k <= n columns such that A A^T reproduces R.
    // Built from a symmetric eigendecomposition with eigenvalues clipped
    // at zero (clip tolerance 1e-10*n); columns for zero eigenvalues are
    // dropped, so singular models factor cleanly.
    struct SamplingFactor {
        int rows = 0;
        int cols = 0;
        std::vector<double> a;  // row-major rows x cols
        double coeff(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
    };
    SamplingFactor sampling_factor() const;

    // var(V_i) with V_i = X_i - E[X_i | X_1..X_{i-1}]: the squared i-th
    // diagonal entry of the pivoting-free Cholesky factor of R, with a
    // rank-deficiency guard (singular leading minor => variance 0).
    struct ResidualVariances {
        std::vector<double> var;
        double sigma_n_sq;  // min over i
    };
    ResidualVariances residual_variances() const;

    // Greedy index set J with R_ij <= rho_tilde for all distinct i,j in
    // J: indices visited in ascending row-max order, added when
    // compatible with everything already in J. Deterministic; |J| >= 1.
    std::vector<int> find_low_correlation_subset(double rho_tilde) const;

    double min_eigenvalue() const { return min_eigenvalue_; }

  private:
    CorrelationModel() = default;
    void validate_dense();

    int n_ = 0;
    bool equicorrelated_ = false;
    double rho_ = 0.0;
    std::vector<double> m_;  // row-major dense entries (empty for equicorrelated)
    double min_eigenvalue_ = 0.0;
};

namespace linalg {

// Cyclic Jacobi eigensolver for a symmetric matrix (row-major n*n).
// Eigenvalues land in ascending order; eigenvectors (optional) are the
// columns of v.
void symmetric_eigen(int n, const std::vector<double>& a,
                     std::vector<double>& eigenvalues,
                     std::vector<double>* v);

}  // namespace linalg

}  // namespace maxtail
