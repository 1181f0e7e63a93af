#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace conegap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Absolute tolerance for set membership / containment throughout the library.
inline constexpr double kMembershipTol = 1e-8;

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(std::size_t pos, const std::string& what)
        : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
};

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    int component;  // -1 when not tied to a vector-field component
    DomainError(const std::string& what, int comp = -1)
        : std::runtime_error(what), component(comp) {}
};

struct SmoothnessError : std::runtime_error {
    int letter;  // offending letter index, -1 when not applicable
    SmoothnessError(const std::string& what, int l = -1)
        : std::runtime_error(what), letter(l) {}
};

struct UnsupportedKindError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic sampler: every stochastic estimator in the library draws from
// one of these, seeded explicitly, so runs are reproducible.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(eng_);
    }

    Vec gaussian(int dim) {
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = normal();
        return v;
    }

    Vec unit_vector(int dim) {
        Vec v = gaussian(dim);
        double n = v.norm();
        while (n < 1e-12) {
            v = gaussian(dim);
            n = v.norm();
        }
        return v / n;
    }

    Vec in_ball(int dim, double radius) {
        Vec d = unit_vector(dim);
        double r = radius * std::pow(uniform(), 1.0 / dim);
        return r * d;
    }

private:
    std::mt19937_64 eng_;
};

inline double sqr(double x) { return x * x; }

}  // namespace conegap
