#include "sigf/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "sigf/errors.hpp"
#include "sigf/rng.hpp"

namespace sigf {

namespace {

void check_k(Eigen::Index order, int k) {
    if (k < 1 || k > order) {
        std::ostringstream os;
        os << "requested " << k << " eigenpairs from an operator of order " << order;
        throw usage_error(os.str());
    }
}

Eigen::VectorXd random_unit(Rng& rng, Eigen::Index order) {
    Eigen::VectorXd v(order);
    for (Eigen::Index i = 0; i < order; ++i) v[i] = rng.normal();
    return v;
}

// Two classical Gram-Schmidt passes against the locked block and the first
// `cols` columns of V. Two passes keep the basis orthonormal to machine
// precision without the cost bookkeeping of selective schemes.
void reorthogonalize(const Eigen::MatrixXd& locked, int n_locked,
                     const Eigen::MatrixXd& V, int cols, Eigen::VectorXd& w) {
    for (int pass = 0; pass < 2; ++pass) {
        if (n_locked > 0) {
            auto L = locked.leftCols(n_locked);
            w.noalias() -= L * (L.transpose() * w);
        }
        if (cols > 0) {
            auto B = V.leftCols(cols);
            w.noalias() -= B * (B.transpose() * w);
        }
    }
}

}  // namespace

EigenPairs dense_smallest(const Eigen::MatrixXd& sym, int k) {
    check_k(sym.rows(), k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) {
        throw numeric_error("dense symmetric eigendecomposition failed");
    }
    EigenPairs out;
    out.values = es.eigenvalues().head(k);
    out.vectors = es.eigenvectors().leftCols(k);
    return out;
}

EigenPairs lanczos_smallest(const Eigen::SparseMatrix<double>& sym, int k,
                            std::uint64_t seed, double tol) {
    const Eigen::Index order = sym.rows();
    check_k(order, k);

    Eigen::MatrixXd locked(order, k);
    std::vector<double> locked_vals;
    int n_locked = 0;

    Rng rng(Rng::mix(seed, 0x6c7a3fULL));
    Eigen::VectorXd pending_start;
    bool have_start = false;
    double best_unconverged = std::numeric_limits<double>::infinity();

    const int max_cycles = 400;
    for (int cycle = 0; n_locked < k; ++cycle) {
        if (cycle >= max_cycles) {
            std::ostringstream os;
            os << "lanczos did not converge: " << (k - n_locked)
               << " eigenpairs outstanding after " << max_cycles
               << " restart cycles, best residual " << best_unconverged;
            throw numeric_error(os.str());
        }

        const int want = k - n_locked;
        const int m = static_cast<int>(std::min<Eigen::Index>(
            order - n_locked, std::max(2 * want + 16, 32)));

        Eigen::MatrixXd V(order, m);
        Eigen::VectorXd alpha(m);
        Eigen::VectorXd beta(m);

        Eigen::VectorXd v = have_start ? pending_start : random_unit(rng, order);
        have_start = false;
        for (;;) {
            reorthogonalize(locked, n_locked, V, 0, v);
            const double nrm = v.norm();
            if (nrm > 1e-10) {
                v /= nrm;
                break;
            }
            v = random_unit(rng, order);
        }

        int built = 0;
        for (int j = 0; j < m; ++j) {
            V.col(j) = v;
            built = j + 1;
            Eigen::VectorXd w = sym * v;
            if (j > 0) w.noalias() -= beta[j - 1] * V.col(j - 1);
            alpha[j] = V.col(j).dot(w);
            w.noalias() -= alpha[j] * V.col(j);
            reorthogonalize(locked, n_locked, V, j + 1, w);
            if (j + 1 == m) break;
            const double b = w.norm();
            if (b < 1e-12) break;  // invariant subspace exhausted for this start
            beta[j] = b;
            v = w / b;
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small;
        if (built == 1) {
            small.computeFromTridiagonal(alpha.head(1), Eigen::VectorXd(0),
                                         Eigen::ComputeEigenvectors);
        } else {
            small.computeFromTridiagonal(alpha.head(built), beta.head(built - 1),
                                         Eigen::ComputeEigenvectors);
        }
        if (small.info() != Eigen::Success) {
            throw numeric_error("lanczos projected eigendecomposition failed");
        }

        const Eigen::VectorXd& theta = small.eigenvalues();
        Eigen::MatrixXd ritz = V.leftCols(built) * small.eigenvectors();

        for (int i = 0; i < built && n_locked < k; ++i) {
            Eigen::VectorXd y = ritz.col(i);
            reorthogonalize(locked, n_locked, V, 0, y);
            const double nrm = y.norm();
            if (nrm < 1e-10) continue;
            y /= nrm;
            const double resid = (sym * y - theta[i] * y).norm();
            if (resid <= tol * std::max(1.0, std::abs(theta[i]))) {
                locked.col(n_locked) = y;
                locked_vals.push_back(theta[i]);
                ++n_locked;
            } else {
                best_unconverged = std::min(best_unconverged, resid);
                pending_start = y;  // refine the stalled pair next cycle
                have_start = true;
                break;
            }
        }
    }

    // Cycles lock pairs bottom-up but repeated eigenvalues surface across
    // several restarts, so the locked list may be out of order.
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return locked_vals[static_cast<std::size_t>(a)] <
               locked_vals[static_cast<std::size_t>(b)];
    });

    EigenPairs out;
    out.values.resize(k);
    out.vectors.resize(order, k);
    for (int i = 0; i < k; ++i) {
        out.values[i] = locked_vals[static_cast<std::size_t>(idx[i])];
        out.vectors.col(i) = locked.col(idx[i]);
    }
    return out;
}

}  // namespace sigf
