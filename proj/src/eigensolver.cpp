#include "softring/eigensolver.hpp"

#include <unsupported/Eigen/SparseExtra>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace softring {

void SparseSymmetricPair::validate() const {
    if (stiffness.rows() != stiffness.cols() || mass.rows() != mass.cols() ||
        stiffness.rows() != mass.rows())
        throw std::invalid_argument("SparseSymmetricPair: dimension mismatch");
    auto check_symmetric = [](const SparseMatrix& a, const char* name) {
        const SparseMatrix at = a.transpose();
        const double scale = std::max(a.norm(), 1e-300);
        if ((a - at).norm() > 1e-12 * scale)
            throw std::invalid_argument(std::string("SparseSymmetricPair: ") + name + " not symmetric");
    };
    check_symmetric(stiffness, "K");
    check_symmetric(mass, "M");
    for (Eigen::Index i = 0; i < mass.rows(); ++i)
        if (!(mass.coeff(i, i) > 0.0))
            throw std::invalid_argument("SparseSymmetricPair: mass diagonal must be positive");
}

double rayleigh_quotient(const SparseSymmetricPair& pair, const Eigen::VectorXd& v) {
    const double denom = v.dot(pair.mass * v);
    if (v.squaredNorm() == 0.0 || !(denom > 0.0))
        throw std::invalid_argument("rayleigh_quotient: zero vector");
    return v.dot(pair.stiffness * v) / denom;
}

namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

constexpr double kBackwardTolerance = 1e-12;

double dual_norm(const Ldlt& mass_factor, const Eigen::VectorXd& r) {
    return std::sqrt(std::max(r.dot(mass_factor.solve(r)), 0.0));
}

/// Residual ||K x - lambda M x||_{M^-1} / ||x||_M and the componentwise backward
/// error, which divides by (|K| + |lambda| |M|) |x| instead and so measures the
/// residual against the rounding level of the matrix-vector products.
std::pair<double, double> residual_norm(const SparseSymmetricPair& pair, const SparseMatrix& abs_k,
                                        const SparseMatrix& abs_m, const Ldlt& mass_factor,
                                        const Eigen::VectorXd& x, double lambda) {
    const Eigen::VectorXd r = pair.stiffness * x - lambda * (pair.mass * x);
    const Eigen::VectorXd ax = x.cwiseAbs();
    const Eigen::VectorXd scale = abs_k * ax + std::abs(lambda) * (abs_m * ax);
    const double xm = std::sqrt(std::max(x.dot(pair.mass * x), 0.0));
    const double rn = dual_norm(mass_factor, r);
    return {rn / xm, rn / std::max(dual_norm(mass_factor, scale), 1e-300)};
}

}  // namespace

EigenResult lowest_pairs(const SparseSymmetricPair& pair, int k, double shift, double tol,
                         const LanczosOptions& options) {
    const Eigen::Index n = pair.size();
    if (k < 1 || k > n) throw std::invalid_argument("lowest_pairs: k out of range");
    if (pair.mass.rows() != n) throw std::invalid_argument("lowest_pairs: dimension mismatch");

    SparseMatrix shifted = pair.stiffness - shift * pair.mass;
    shifted.makeCompressed();
    Ldlt factor(shifted);
    if (factor.info() != Eigen::Success || !(factor.vectorD().minCoeff() > 0.0))
        throw ShiftNotBelowSpectrum("lowest_pairs: K - shift*M is not positive definite");
    Ldlt mass_factor(pair.mass);
    if (mass_factor.info() != Eigen::Success || !(mass_factor.vectorD().minCoeff() > 0.0))
        throw std::invalid_argument("lowest_pairs: mass matrix is not positive definite");

    const SparseMatrix abs_k = pair.stiffness.cwiseAbs();
    const SparseMatrix abs_m = pair.mass.cwiseAbs();

    const int max_basis =
        static_cast<int>(std::min<Eigen::Index>(std::max(options.max_basis, 2 * k + 8), n));
    const int keep = std::min(max_basis - 2, std::max(k + 2, 2 * k));

    Eigen::MatrixXd basis(n, max_basis + 1);
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(max_basis + 1, max_basis + 1);

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto random_vector = [&] {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = unif(rng);
        return v;
    };
    auto m_normalize = [&](Eigen::VectorXd& v) {
        const double nrm = std::sqrt(v.dot(pair.mass * v));
        v /= nrm;
        return nrm;
    };

    {
        Eigen::VectorXd v0 = random_vector();
        m_normalize(v0);
        basis.col(0) = v0;
    }
    int size = 1;        // vectors stored
    int expanded = 0;    // vectors whose image under OP has been projected
    EigenResult result;
    result.shift = shift;

    while (true) {
        // Expand the Krylov basis.
        while (size <= max_basis) {
            const int j = expanded;
            Eigen::VectorXd w = factor.solve(pair.mass * basis.col(j));
            ++result.iterations;
            Eigen::VectorXd coeff = basis.leftCols(size).transpose() * (pair.mass * w);
            w -= basis.leftCols(size) * coeff;
            const Eigen::VectorXd again = basis.leftCols(size).transpose() * (pair.mass * w);
            w -= basis.leftCols(size) * again;
            coeff += again;
            for (int i = 0; i < size; ++i) {
                proj(i, j) = coeff[i];
                proj(j, i) = coeff[i];
            }
            ++expanded;
            double beta = std::sqrt(std::max(w.dot(pair.mass * w), 0.0));
            const double scale = std::max(coeff.cwiseAbs().maxCoeff(), 1e-300);
            if (size == n) break;
            if (beta <= 1e-13 * scale) {
                // Invariant subspace: continue with a fresh orthogonal direction.
                w = random_vector();
                for (int pass = 0; pass < 2; ++pass)
                    w -= basis.leftCols(size) * (basis.leftCols(size).transpose() * (pair.mass * w));
                m_normalize(w);
                beta = 0.0;
            } else {
                w /= beta;
            }
            basis.col(size) = w;
            proj(size, j) = beta;
            proj(j, size) = beta;
            ++size;
            if (size > max_basis) break;
            if (expanded >= keep + k + 6 && (expanded - keep) % 8 == 0) break;  // periodic check
            if (result.iterations >= options.max_operator_applications) break;
        }

        // Rayleigh-Ritz on the expanded part.
        const int m = expanded;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(proj.topLeftCorner(m, m));
        const Eigen::VectorXd& theta = ritz.eigenvalues();  // ascending; we want the largest
        const Eigen::MatrixXd& s = ritz.eigenvectors();
        const bool has_tail = size > m;
        Eigen::VectorXd coupling = Eigen::VectorXd::Zero(m);
        if (has_tail) coupling = proj.block(m, 0, 1, m).transpose();

        bool converged = true;
        std::vector<double> lambdas(k), residuals(k), backward_errors(k);
        Eigen::MatrixXd vectors(n, k);
        for (int i = 0; i < k; ++i) {
            const int col = m - 1 - i;
            const double th = theta[col];
            if (!(th > 0.0)) {
                converged = false;
                break;
            }
            const double ritz_estimate = std::abs(coupling.dot(s.col(col)));
            vectors.col(i) = basis.leftCols(m) * s.col(col);
            lambdas[i] = shift + 1.0 / th;
            if (ritz_estimate > 1e-6 * th && m < n) {
                converged = false;
                break;
            }
            const auto [res, backward] =
                residual_norm(pair, abs_k, abs_m, mass_factor, vectors.col(i), lambdas[i]);
            residuals[i] = res;
            backward_errors[i] = backward;
            // Accept either the requested residual or a residual at rounding level.
            if (res > tol && !(backward <= kBackwardTolerance && ritz_estimate <= 1e-12 * th))
                converged = false;
        }
        if (converged) {
            result.eigenvalues = lambdas;
            result.eigenvectors = vectors;
            result.residuals = residuals;
            result.backward_errors = backward_errors;
            return result;
        }
        if (result.iterations >= options.max_operator_applications || m >= n)
            throw EigenConvergenceError("lowest_pairs: no convergence within the iteration budget");
        if (size <= max_basis) continue;  // periodic check only, keep expanding

        // Thick restart: keep the `keep` largest Ritz vectors plus the residual direction.
        const Eigen::MatrixXd kept_s = s.rightCols(keep);
        Eigen::MatrixXd new_basis = basis.leftCols(m) * kept_s;
        const Eigen::VectorXd tail = basis.col(m);
        const Eigen::VectorXd new_coupling = kept_s.transpose() * coupling;
        proj.setZero();
        basis.leftCols(keep) = new_basis;
        basis.col(keep) = tail;
        for (int i = 0; i < keep; ++i) {
            proj(i, i) = theta[m - keep + i];
            proj(keep, i) = new_coupling[i];
            proj(i, keep) = new_coupling[i];
        }
        size = keep + 1;
        expanded = keep;
        ++result.restarts;
    }
}

int count_eigenvalues_below(const SparseSymmetricPair& pair, double sigma) {
    SparseMatrix shifted = pair.stiffness - sigma * pair.mass;
    shifted.makeCompressed();
    Ldlt factor(shifted);
    if (factor.info() != Eigen::Success)
        throw std::runtime_error("count_eigenvalues_below: factorization failed");
    const Eigen::VectorXd d = factor.vectorD();
    return static_cast<int>((d.array() < 0.0).count());
}

bool bracket_lowest_eigenvalue(const SparseSymmetricPair& pair, double floor, double ceiling,
                               double rel_width, double& lo, double& hi) {
    if (!(floor < ceiling && ceiling < 0.0))
        throw std::invalid_argument("bracket_lowest_eigenvalue: need floor < ceiling < 0");
    if (count_eigenvalues_below(pair, ceiling) == 0) return false;
    while (count_eigenvalues_below(pair, floor) > 0) floor *= 4.0;
    // Bisection in x = log(-sigma): count(-exp(x)) > 0 iff lambda_1 < -exp(x).
    double below = std::log(-ceiling);  // lambda_1 < -exp(below)
    double above = std::log(-floor);    // lambda_1 >= -exp(above)
    while (above - below > std::log1p(rel_width)) {
        const double mid = 0.5 * (above + below);
        if (count_eigenvalues_below(pair, -std::exp(mid)) > 0) below = mid;
        else above = mid;
    }
    lo = -std::exp(above);
    hi = -std::exp(below);
    return true;
}

EigenResult lowest_pairs_lowering_shift(const SparseSymmetricPair& pair, int k, double shift,
                                        double tol, const LanczosOptions& options, int attempts) {
    for (int a = 0;; ++a) {
        try {
            return lowest_pairs(pair, k, shift, tol, options);
        } catch (const ShiftNotBelowSpectrum&) {
            if (a + 1 >= attempts) throw;
            shift -= 1.0 + std::abs(shift);
        }
    }
}

void export_matrix_market(const SparseSymmetricPair& pair, const std::filesystem::path& stem) {
    Eigen::saveMarket(pair.stiffness, stem.string() + "_K.mtx", Eigen::Symmetric);
    Eigen::saveMarket(pair.mass, stem.string() + "_M.mtx", Eigen::Symmetric);
}

}  // namespace softring
