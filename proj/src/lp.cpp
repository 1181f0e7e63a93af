#include "conegap/lp.hpp"

#include <cmath>
#include <limits>

namespace conegap {

namespace {

constexpr double kEps = 1e-10;

// Standard-form tableau solver: minimize cost over {z >= 0 : T z = rhs}.
// Returns false on iteration blowup.
class Tableau {
public:
    Tableau(Mat T, Vec rhs, Vec cost)
        : T_(std::move(T)), rhs_(std::move(rhs)), cost_(std::move(cost)),
          m_(static_cast<int>(T_.rows())), n_(static_cast<int>(T_.cols())),
          basis_(m_, -1) {}

    std::vector<int>& basis() { return basis_; }

    bool optimize(int max_iter) {
        reduced_ = cost_;
        obj_ = 0.0;
        for (int r = 0; r < m_; ++r) price_out(r);
        for (int it = 0; it < max_iter; ++it) {
            int col = -1;
            for (int j = 0; j < n_; ++j) {
                if (reduced_[j] < -kEps) {  // Bland: first improving column
                    col = j;
                    break;
                }
            }
            if (col < 0) return true;
            int row = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m_; ++r) {
                if (T_(r, col) > kEps) {
                    double ratio = rhs_[r] / T_(r, col);
                    if (ratio < best_ratio - kEps ||
                        (ratio < best_ratio + kEps &&
                         (row < 0 || basis_[r] < basis_[row]))) {
                        best_ratio = ratio;
                        row = r;
                    }
                }
            }
            if (row < 0) {
                unbounded_ = true;
                return true;
            }
            pivot(row, col);
        }
        return false;
    }

    bool unbounded() const { return unbounded_; }
    // Current value of the minimized cost at the basic solution.
    double objective() const { return -obj_; }

    Vec primal() const {
        Vec z = Vec::Zero(n_);
        for (int r = 0; r < m_; ++r)
            if (basis_[r] >= 0 && basis_[r] < n_) z[basis_[r]] = rhs_[r];
        return z;
    }

    void set_cost(Vec cost) { cost_ = std::move(cost); }

    // Drive a column out of pricing entirely (phase-1 artificials).
    void disable_column(int j) {
        T_.col(j).setZero();
        cost_[j] = 0.0;
    }

    void pivot(int row, int col) {
        double piv = T_(row, col);
        T_.row(row) /= piv;
        rhs_[row] /= piv;
        for (int r = 0; r < m_; ++r) {
            if (r == row) continue;
            double f = T_(r, col);
            if (f != 0.0) {
                T_.row(r) -= f * T_.row(row);
                rhs_[r] -= f * rhs_[row];
                if (rhs_[r] < 0 && rhs_[r] > -1e-11) rhs_[r] = 0.0;
            }
        }
        double f = reduced_[col];
        if (f != 0.0) {
            reduced_ -= f * T_.row(row).transpose();
            obj_ -= f * rhs_[row];
        }
        basis_[row] = col;
    }

    int rows() const { return m_; }
    double entry(int r, int c) const { return T_(r, c); }

private:
    void price_out(int r) {
        int j = basis_[r];
        if (j < 0) return;
        double f = reduced_[j];
        if (f != 0.0) {
            reduced_ -= f * T_.row(r).transpose();
            obj_ -= f * rhs_[r];
        }
    }

    Mat T_;
    Vec rhs_;
    Vec cost_;
    Vec reduced_;
    double obj_ = 0.0;
    int m_, n_;
    std::vector<int> basis_;
    bool unbounded_ = false;
};

}  // namespace

LpResult solve_lp(const Vec& c, const Mat& A, const Vec& b, const Mat& E,
                  const Vec& d) {
    const int nfree = static_cast<int>(c.size());
    const int mi = static_cast<int>(A.rows());
    const int me = static_cast<int>(E.rows());
    const int m = mi + me;

    // Columns: x+ (nfree) | x- (nfree) | slacks (mi) | artificials (m).
    const int nx = 2 * nfree;
    const int ntot = nx + mi + m;
    Mat T = Mat::Zero(m, ntot);
    Vec rhs(m);

    for (int r = 0; r < mi; ++r) {
        double sgn = (b[r] >= 0) ? 1.0 : -1.0;
        for (int j = 0; j < nfree; ++j) {
            T(r, j) = sgn * A(r, j);
            T(r, nfree + j) = -sgn * A(r, j);
        }
        T(r, nx + r) = sgn;  // slack
        rhs[r] = sgn * b[r];
    }
    for (int r = 0; r < me; ++r) {
        double sgn = (d[r] >= 0) ? 1.0 : -1.0;
        for (int j = 0; j < nfree; ++j) {
            T(mi + r, j) = sgn * E(r, j);
            T(mi + r, nfree + j) = -sgn * E(r, j);
        }
        rhs[mi + r] = sgn * d[r];
    }
    for (int r = 0; r < m; ++r) T(r, nx + mi + r) = 1.0;

    Vec phase1 = Vec::Zero(ntot);
    for (int r = 0; r < m; ++r) phase1[nx + mi + r] = 1.0;

    Tableau tab(std::move(T), std::move(rhs), phase1);
    for (int r = 0; r < m; ++r) tab.basis()[r] = nx + mi + r;

    const int max_iter = 200 * (m + ntot);
    if (!tab.optimize(max_iter)) return {LpStatus::NumericalFailure, Vec(), 0.0};
    if (tab.objective() > 1e-7) return {LpStatus::Infeasible, Vec(), 0.0};

    // Pivot any artificial still in the basis out, then freeze artificials.
    for (int r = 0; r < m; ++r) {
        if (tab.basis()[r] >= nx + mi) {
            for (int j = 0; j < nx + mi; ++j) {
                if (std::abs(tab.entry(r, j)) > 1e-8) {
                    tab.pivot(r, j);
                    break;
                }
            }
        }
    }
    for (int j = nx + mi; j < ntot; ++j) tab.disable_column(j);

    Vec phase2 = Vec::Zero(ntot);
    for (int j = 0; j < nfree; ++j) {
        phase2[j] = -c[j];  // minimize -c.x
        phase2[nfree + j] = c[j];
    }
    tab.set_cost(phase2);
    if (!tab.optimize(max_iter)) return {LpStatus::NumericalFailure, Vec(), 0.0};
    if (tab.unbounded()) return {LpStatus::Unbounded, Vec(), 0.0};

    Vec z = tab.primal();
    Vec x(nfree);
    for (int j = 0; j < nfree; ++j) x[j] = z[j] - z[nfree + j];
    return {LpStatus::Optimal, x, c.dot(x)};
}

}  // namespace conegap
