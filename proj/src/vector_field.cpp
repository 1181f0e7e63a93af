#include "conegap/vector_field.hpp"

namespace conegap {

double DerivativeTensor::at(int i, const std::vector<int>& j) const {
    std::size_t idx = static_cast<std::size_t>(i);
    for (int a : j) idx = idx * n + static_cast<std::size_t>(a);
    return data[idx];
}

Mat DerivativeTensor::as_matrix() const {
    if (order != 1) throw DimensionError("as_matrix requires an order-1 tensor");
    Mat J(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) J(i, j) = data[static_cast<std::size_t>(i) * n + j];
    return J;
}

VectorFieldExpr::VectorFieldExpr(std::vector<Expr> components, int n,
                                 std::optional<int> smoothness_class)
    : n_(n), components_(std::move(components)), smoothness_(smoothness_class) {
    if (static_cast<int>(components_.size()) != n_)
        throw DimensionError("component count does not match dimension");
    for (const Expr& e : components_) {
        if (e.max_var() > n_)
            throw DomainError("component references x" + std::to_string(e.max_var()) +
                              " beyond field dimension " + std::to_string(n_));
    }
}

VectorFieldExpr VectorFieldExpr::parse(const std::vector<std::string>& texts,
                                       std::optional<int> smoothness_class) {
    std::vector<Expr> comps;
    comps.reserve(texts.size());
    for (const std::string& t : texts) comps.push_back(Expr::parse(t));
    return VectorFieldExpr(std::move(comps), static_cast<int>(texts.size()),
                           smoothness_class);
}

Vec VectorFieldExpr::eval(const Vec& x) const {
    if (x.size() != n_) throw DimensionError("point dimension mismatch");
    Vec out(n_);
    for (int i = 0; i < n_; ++i) {
        try {
            out[i] = components_[i].eval(x);
        } catch (const DomainError& e) {
            throw DomainError(std::string(e.what()) + " in component " +
                              std::to_string(i + 1), i + 1);
        }
    }
    return out;
}

void VectorFieldExpr::ensure_jacobian() const {
    if (!jac_.empty()) return;
    jac_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        jac_[i].reserve(n_);
        for (int j = 1; j <= n_; ++j) jac_[i].push_back(components_[i].derivative(j));
    }
}

Mat VectorFieldExpr::jacobian(const Vec& x) const {
    ensure_jacobian();
    Mat J(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) J(i, j) = jac_[i][j].eval(x);
    return J;
}

std::function<DerivativeTensor(const Vec&)> VectorFieldExpr::derivative(int order) const {
    if (order < 1) throw DomainError("derivative order must be positive");
    if (smoothness_ && order > *smoothness_)
        throw SmoothnessError("derivative order " + std::to_string(order) +
                              " exceeds declared smoothness class " +
                              std::to_string(*smoothness_));

    // Build all mixed partials up front; the returned evaluator only
    // evaluates.
    std::size_t count = 1;
    for (int k = 0; k < order; ++k) count *= static_cast<std::size_t>(n_);
    auto table = std::make_shared<std::vector<Expr>>();
    table->reserve(static_cast<std::size_t>(n_) * count);
    for (int i = 0; i < n_; ++i) {
        std::vector<Expr> level{components_[i]};
        for (int k = 0; k < order; ++k) {
            std::vector<Expr> next;
            next.reserve(level.size() * n_);
            for (const Expr& e : level)
                for (int j = 1; j <= n_; ++j) next.push_back(e.derivative(j));
            level = std::move(next);
        }
        for (Expr& e : level) table->push_back(std::move(e));
    }

    int n = n_;
    return [table, n, order, count](const Vec& x) {
        DerivativeTensor t;
        t.n = n;
        t.order = order;
        t.data.resize(table->size());
        for (std::size_t i = 0; i < table->size(); ++i) t.data[i] = (*table)[i].eval(x);
        (void)count;
        return t;
    };
}

std::vector<std::string> VectorFieldExpr::to_strings() const {
    std::vector<std::string> out;
    out.reserve(components_.size());
    for (const Expr& e : components_) out.push_back(e.to_string());
    return out;
}

VectorFieldExpr lie_bracket(const VectorFieldExpr& F, const VectorFieldExpr& G) {
    if (F.dim() != G.dim())
        throw DimensionError("lie_bracket requires fields of equal dimension");
    const int n = F.dim();
    std::vector<Expr> comps;
    comps.reserve(n);
    for (int i = 0; i < n; ++i) {
        Expr acc = Expr::constant(0.0);
        for (int j = 1; j <= n; ++j) {
            acc = acc + G.components()[i].derivative(j) * F.components()[j - 1] -
                  F.components()[i].derivative(j) * G.components()[j - 1];
        }
        comps.push_back(acc);
    }
    std::optional<int> cls;
    if (F.smoothness_class() || G.smoothness_class()) {
        int cf = F.smoothness_class().value_or(INT32_MAX);
        int cg = G.smoothness_class().value_or(INT32_MAX);
        cls = std::max(0, std::min(cf, cg) - 1);
    }
    return VectorFieldExpr(std::move(comps), n, cls);
}

}  // namespace conegap
