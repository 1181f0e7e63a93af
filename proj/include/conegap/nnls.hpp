#pragma once

#include "conegap/common.hpp"

namespace conegap {

// Nonnegative least squares: minimize |A x - b| subject to x >= 0
// (Lawson-Hanson active set). Returns the coefficient vector.
Vec nnls(const Mat& A, const Vec& b, double tol = 1e-12, int max_iter = 0);

// Projection of x onto the cone spanned by nonnegative combinations of the
// given generators (columns of G). Returns the projected point; `distance`
// (optional) receives |x - proj|.
Vec project_onto_conic_hull(const std::vector<Vec>& generators, const Vec& x,
                            double* distance = nullptr);

// Orthonormal basis of the kernel of E (rows = equations). Columns span
// {x : E x = 0}. `rel_tol` is the singular-value cutoff relative to the
// largest singular value.
Mat kernel_basis(const Mat& E, double rel_tol = 1e-10);

// Orthonormal basis of the span of the given vectors (as matrix columns).
Mat span_basis(const std::vector<Vec>& vectors, int dim, double rel_tol = 1e-10);

}  // namespace conegap
