#pragma once

#include "conegap/expr.hpp"

#include <functional>
#include <optional>

namespace conegap {

// Dense derivative tensor of order k: entry (i, j1..jk) is the mixed partial
// d^k F_i / dx_j1 .. dx_jk. Order 1 is the Jacobian (rows = components).
struct DerivativeTensor {
    int n = 0;      // state dimension
    int order = 0;  // derivative order k
    std::vector<double> data;  // layout: ((i * n + j1) * n + j2) ...

    double at(int i, const std::vector<int>& j) const;
    Mat as_matrix() const;  // order 1 only
};

class VectorFieldExpr {
public:
    VectorFieldExpr() = default;
    VectorFieldExpr(std::vector<Expr> components, int n,
                    std::optional<int> smoothness_class = std::nullopt);

    // Parses one expression string per component; components may reference
    // x1..xn only.
    static VectorFieldExpr parse(const std::vector<std::string>& texts,
                                 std::optional<int> smoothness_class = std::nullopt);

    int dim() const { return n_; }
    // nullopt means C-infinity.
    std::optional<int> smoothness_class() const { return smoothness_; }
    void set_smoothness_class(std::optional<int> c) { smoothness_ = c; }
    const std::vector<Expr>& components() const { return components_; }

    Vec eval(const Vec& x) const;
    Mat jacobian(const Vec& x) const;

    // Exact symbolic derivative evaluator of the requested order.
    // Throws SmoothnessError when order exceeds the declared class.
    std::function<DerivativeTensor(const Vec&)> derivative(int order) const;

    std::vector<std::string> to_strings() const;

private:
    int n_ = 0;
    std::vector<Expr> components_;
    std::optional<int> smoothness_;
    mutable std::vector<std::vector<Expr>> jac_;  // [i][j] = dF_i/dx_j, lazy
    void ensure_jacobian() const;
};

// Lie bracket [F, G] = DG.F - DF.G, built symbolically. The result's
// smoothness class drops by one from the weaker operand.
VectorFieldExpr lie_bracket(const VectorFieldExpr& F, const VectorFieldExpr& G);

}  // namespace conegap
