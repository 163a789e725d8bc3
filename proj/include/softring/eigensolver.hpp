#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace softring {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Stiffness/mass pair of the generalized problem K v = lambda M v.
struct SparseSymmetricPair {
    SparseMatrix stiffness;  // symmetric, possibly indefinite
    SparseMatrix mass;       // symmetric positive definite

    Eigen::Index size() const { return stiffness.rows(); }

    /// Throws std::invalid_argument when dimensions disagree, either matrix is
    /// not symmetric to 1e-12 relative, or the mass diagonal is not positive.
    void validate() const;
};

struct EigenResult {
    std::vector<double> eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;      // columns, M-orthonormal
    std::vector<double> residuals;     // ||K v - lambda M v||_{M^-1} / ||v||_M
    std::vector<double> backward_errors;  // residual relative to (|K| + |lambda| |M|) |v|
    int iterations = 0;                // operator applications
    int restarts = 0;
    double shift = 0.0;
};

/// The shift handed to lowest_pairs is not below the spectrum of (K, M).
class ShiftNotBelowSpectrum : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EigenConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LanczosOptions {
    int max_basis = 100;          // basis size before a thick restart
    int max_operator_applications = 20000;
    std::uint64_t seed = 0x5eed5eedULL;
};

/// k smallest eigenpairs of (K, M) by shift-invert Lanczos with full
/// reorthogonalization in the M inner product and thick restarts.
/// `shift` must lie strictly below the smallest eigenvalue; this is checked
/// through the LDL^T factorization of K - shift M (ShiftNotBelowSpectrum).
/// A pair is accepted when its residual is below `tol`, or when the Lanczos
/// estimate has converged and the componentwise backward error is below 1e-12
/// (the residual then sits at the rounding level of the products K v, M v).
EigenResult lowest_pairs(const SparseSymmetricPair& pair, int k, double shift, double tol = 1e-8,
                         const LanczosOptions& options = {});

/// Same as lowest_pairs, but on ShiftNotBelowSpectrum lowers the shift to
/// shift - (1 + |shift|) and retries (at most `attempts` times).
EigenResult lowest_pairs_lowering_shift(const SparseSymmetricPair& pair, int k, double shift,
                                        double tol = 1e-8, const LanczosOptions& options = {},
                                        int attempts = 6);

/// Number of eigenvalues of (K, M) below sigma, from the inertia of the
/// LDL^T factorization of K - sigma M (Sylvester's law of inertia).
int count_eigenvalues_below(const SparseSymmetricPair& pair, double sigma);

/// Bracket [lo, hi] (both negative) around the lowest eigenvalue, found by
/// bisection of the eigenvalue count on a logarithmic scale between
/// `floor` < 0 and `ceiling` < 0. Returns false when no eigenvalue lies below `ceiling`.
bool bracket_lowest_eigenvalue(const SparseSymmetricPair& pair, double floor, double ceiling,
                               double rel_width, double& lo, double& hi);

/// (v^T K v) / (v^T M v); throws std::invalid_argument for a zero vector.
double rayleigh_quotient(const SparseSymmetricPair& pair, const Eigen::VectorXd& v);

/// Writes K and M as `<stem>_K.mtx` and `<stem>_M.mtx` (Matrix Market).
void export_matrix_market(const SparseSymmetricPair& pair, const std::filesystem::path& stem);

}  // namespace softring
