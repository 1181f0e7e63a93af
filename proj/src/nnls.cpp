#include "conegap/nnls.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <limits>

namespace conegap {

Vec nnls(const Mat& A, const Vec& b, double tol, int max_iter) {
    const int n = static_cast<int>(A.cols());
    if (max_iter <= 0) max_iter = 3 * std::max(n, 10);

    Vec x = Vec::Zero(n);
    std::vector<bool> passive(n, false);
    Vec w = A.transpose() * (b - A * x);

    auto solve_passive = [&](const std::vector<bool>& mask) -> Vec {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (mask[i]) idx.push_back(i);
        Vec z = Vec::Zero(n);
        if (idx.empty()) return z;
        Mat Ap(A.rows(), static_cast<int>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
        Vec zp = Ap.colPivHouseholderQr().solve(b);
        for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[k];
        return z;
    };

    const double wtol = tol * std::max(1.0, b.norm());
    for (int outer = 0; outer < max_iter; ++outer) {
        int best = -1;
        double best_w = wtol;
        for (int i = 0; i < n; ++i) {
            if (!passive[i] && w[i] > best_w) {
                best_w = w[i];
                best = i;
            }
        }
        if (best < 0) break;
        passive[best] = true;

        for (int inner = 0; inner < max_iter; ++inner) {
            Vec z = solve_passive(passive);
            bool all_pos = true;
            for (int i = 0; i < n; ++i) {
                if (passive[i] && z[i] <= tol) {
                    all_pos = false;
                    break;
                }
            }
            if (all_pos) {
                x = z;
                break;
            }
            double alpha = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                if (passive[i] && z[i] <= tol) {
                    double a = x[i] / (x[i] - z[i]);
                    alpha = std::min(alpha, a);
                }
            }
            if (!std::isfinite(alpha)) alpha = 0.0;
            x += alpha * (z - x);
            for (int i = 0; i < n; ++i) {
                if (passive[i] && x[i] <= tol) {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
        w = A.transpose() * (b - A * x);
    }
    for (int i = 0; i < n; ++i) x[i] = std::max(x[i], 0.0);
    return x;
}

Vec project_onto_conic_hull(const std::vector<Vec>& generators, const Vec& x,
                            double* distance) {
    if (generators.empty()) {
        if (distance) *distance = x.norm();
        return Vec::Zero(x.size());
    }
    const int dim = static_cast<int>(x.size());
    Mat G(dim, static_cast<int>(generators.size()));
    for (std::size_t k = 0; k < generators.size(); ++k) {
        if (generators[k].size() != dim)
            throw DimensionError("generator dimension mismatch in cone projection");
        G.col(static_cast<int>(k)) = generators[k];
    }
    Vec alpha = nnls(G, x);
    Vec proj = G * alpha;
    if (distance) *distance = (x - proj).norm();
    return proj;
}

Mat kernel_basis(const Mat& E, double rel_tol) {
    if (E.rows() == 0) return Mat::Identity(E.cols(), E.cols());
    Eigen::JacobiSVD<Mat> svd(E, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double cutoff = rel_tol * (sv.size() > 0 ? sv[0] : 0.0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > cutoff) ++rank;
    const int n = static_cast<int>(E.cols());
    Mat V = svd.matrixV();
    return V.rightCols(n - rank);
}

Mat span_basis(const std::vector<Vec>& vectors, int dim, double rel_tol) {
    if (vectors.empty()) return Mat(dim, 0);
    Mat M(dim, static_cast<int>(vectors.size()));
    for (std::size_t k = 0; k < vectors.size(); ++k) M.col(static_cast<int>(k)) = vectors[k];
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    double cutoff = rel_tol * (sv.size() > 0 ? sv[0] : 0.0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > cutoff) ++rank;
    return svd.matrixU().leftCols(rank);
}

}  // namespace conegap
