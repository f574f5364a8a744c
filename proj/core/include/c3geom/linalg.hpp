#pragma once

#include <vector>

#include "c3geom/algebra.hpp"

namespace c3geom {

/// Row-major dense matrix over k, only as large as the geometry needs
/// (systems here are at most 3x4). Deterministic elimination with partial
/// pivoting on modulus so witness choices are reproducible from the seed.
struct KMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<KScalar> a;

    KMatrix() = default;
    KMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    KScalar& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    KScalar at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

struct EliminationResult {
    std::size_t rank = 0;
    double min_pivot = 0.0;     // smallest accepted pivot modulus
    KMatrix echelon;            // row-reduced form
    std::vector<std::size_t> pivot_cols;
};

/// Gauss-Jordan elimination with partial pivoting; entries below tol count
/// as zero.
EliminationResult eliminate(KMatrix m, double tol = 1e-10);

/// One deterministic unit vector spanning the null space of a homogeneous
/// system, assuming nullity exactly one; throws if rank != cols - 1.
std::vector<KScalar> null_vector(const KMatrix& m, double tol = 1e-10);

/// All null-space basis vectors (free variable set to one, others solved).
std::vector<std::vector<KScalar>> null_basis(const KMatrix& m, double tol = 1e-10);

/// Minimum-norm particular solution of m x = rhs (m with independent rows),
/// via the conjugate-transpose normal equations.
std::vector<KScalar> min_norm_solution(const KMatrix& m,
                                       const std::vector<KScalar>& rhs,
                                       double tol = 1e-10);

} // namespace c3geom
