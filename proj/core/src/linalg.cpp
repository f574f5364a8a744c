#include "c3geom/linalg.hpp"

#include <cmath>

namespace c3geom {

EliminationResult eliminate(KMatrix m, double tol) {
    EliminationResult res;
    res.min_pivot = 0.0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
        // Partial pivot: largest modulus in this column at or below `row`.
        std::size_t best = row;
        double best_abs = m.at(row, col).abs2();
        for (std::size_t r = row + 1; r < m.rows; ++r) {
            double v = m.at(r, col).abs2();
            if (v > best_abs) {
                best_abs = v;
                best = r;
            }
        }
        if (std::sqrt(best_abs) <= tol) continue;
        if (best != row)
            for (std::size_t c = 0; c < m.cols; ++c) std::swap(m.at(row, c), m.at(best, c));
        KScalar piv = m.at(row, col);
        double piv_abs = piv.abs();
        res.min_pivot = (res.rank == 0) ? piv_abs : std::min(res.min_pivot, piv_abs);
        for (std::size_t c = col; c < m.cols; ++c) m.at(row, c) = m.at(row, c) / piv;
        for (std::size_t r = 0; r < m.rows; ++r) {
            if (r == row) continue;
            KScalar f = m.at(r, col);
            if (f.abs2() == 0.0) continue;
            for (std::size_t c = col; c < m.cols; ++c)
                m.at(r, c) = m.at(r, c) - f * m.at(row, c);
        }
        res.pivot_cols.push_back(col);
        ++row;
        ++res.rank;
    }
    res.echelon = std::move(m);
    return res;
}

std::vector<std::vector<KScalar>> null_basis(const KMatrix& m, double tol) {
    EliminationResult e = eliminate(m, tol);
    std::vector<bool> is_pivot(m.cols, false);
    for (auto c : e.pivot_cols) is_pivot[c] = true;
    std::vector<std::vector<KScalar>> basis;
    for (std::size_t free_col = 0; free_col < m.cols; ++free_col) {
        if (is_pivot[free_col]) continue;
        std::vector<KScalar> v(m.cols, KScalar::zero());
        v[free_col] = KScalar::one();
        for (std::size_t r = 0; r < e.pivot_cols.size(); ++r)
            v[e.pivot_cols[r]] = -e.echelon.at(r, free_col);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<KScalar> null_vector(const KMatrix& m, double tol) {
    auto basis = null_basis(m, tol);
    if (basis.size() != 1)
        throw Error("null_vector: solution space is not one-dimensional (nullity " +
                    std::to_string(basis.size()) + ")");
    auto v = basis.front();
    double n2 = 0.0;
    for (const auto& x : v) n2 += x.abs2();
    double inv = 1.0 / std::sqrt(n2);
    for (auto& x : v) x = x * inv;
    return v;
}

std::vector<KScalar> min_norm_solution(const KMatrix& m,
                                       const std::vector<KScalar>& rhs,
                                       double tol) {
    // Solve (M M*) y = rhs, then x = M* y.
    const std::size_t r = m.rows, c = m.cols;
    if (rhs.size() != r) throw Error("min_norm_solution: rhs size mismatch");
    KMatrix g(r, r + 1);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            KScalar s = KScalar::zero();
            for (std::size_t t = 0; t < c; ++t) s = s + m.at(i, t) * m.at(j, t).conj();
            g.at(i, j) = s;
        }
        g.at(i, r) = rhs[i];
    }
    EliminationResult e = eliminate(g, tol);
    if (e.rank != r) throw Error("min_norm_solution: rows are dependent");
    std::vector<KScalar> y(r);
    for (std::size_t i = 0; i < r; ++i) y[i] = e.echelon.at(i, r);
    std::vector<KScalar> x(c, KScalar::zero());
    for (std::size_t t = 0; t < c; ++t)
        for (std::size_t i = 0; i < r; ++i) x[t] = x[t] + m.at(i, t).conj() * y[i];
    return x;
}

} // namespace c3geom
