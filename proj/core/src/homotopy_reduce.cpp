#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "homotopy_internal.hpp"

namespace c3geom {

using detail::PathEditor;
using detail::PrimitiveSlice;

// ---------------------------------------------------------------------------
// Pinching
// ---------------------------------------------------------------------------

void detail::pinch_ed(PathEditor& ed, std::size_t start, const Line& l_prime) {
    if (ed.path.v.size() < start + 5) throw Error("pinch: subpath out of range");
    PrimitiveSlice s = slice_loop(ed, start);
    const Point z = std::get<Point>(ed.path.v[start + 4]);
    const GeomCase cse = s.x.cse;
    const Field k = field_of(cse);

    if (line_equal(s.l, l_prime, ed.tol)) throw Error("pinch: L' must differ from L");
    if (!incident(Vertex{s.x}, Vertex{l_prime}, ed.tol))
        throw Error("pinch: L' does not pass through x");
    if (!coplanar(s.l, l_prime, 1e-6)) throw Error("pinch: L and L' are not coplanar");

    Plane pi = common_plane(s.l, l_prime);

    // N: the line of pi through y coplanar with M.
    auto basis = pure_basis(alg_a(cse), k);
    KMatrix sys(2, basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        sys.at(0, i) = hermitian(s.y.rep, basis[i], k);
        sys.at(1, i) = hermitian(s.m.a, basis[i], k) -
                       hermitian(s.m.b, pi.emb.apply(basis[i]), k);
    }
    auto nulls = null_basis(sys, 1e-8);
    if (nulls.empty()) throw Error("pinch: no line of pi through y coplanar with M");
    std::vector<Element> dir_candidates;
    for (const auto& lam : nulls) {
        Element e = from_pure_coordinates(alg_a(cse), k, lam);
        if (norm(e) > 1e-7) dir_candidates.push_back(normalized(e));
    }
    if (dir_candidates.size() == 2)
        dir_candidates.push_back(normalized(dir_candidates[0] + dir_candidates[1], 1e-7));

    const Element* chosen = nullptr;
    for (const auto& e : dir_candidates) {
        if (1.0 - hermitian(e, s.m.a, k).abs2() < 1e-9) continue;  // N would equal M's shadow
        chosen = &e;
        break;
    }
    if (!chosen) throw Error("pinch: degenerate N (shares M's point shadow)");
    Element e = *chosen;
    Line n = make_line(cse, e, pi.emb.apply(e));

    // y' = L' meet N (or the point of the shared shadow orthogonal to x).
    Element w;
    if (1.0 - hermitian(l_prime.a, e, k).abs2() > 1e-9)
        w = unit_orthogonal_to(cse, {l_prime.a, e});
    else
        w = unit_orthogonal_to(cse, {e, s.x.rep});
    Point y_new = make_point(cse, w);
    if (point_equal(y_new, z, ed.tol))
        throw Error("pinch: degenerate configuration (y' coincides with z)");

    Plane xi = common_plane(n, s.m);
    Line m_new = line_in_plane_through(xi, y_new, z);

    residue_connect_ed(ed, start, start + 2,
                       {Vertex{s.x}, Vertex{l_prime}, Vertex{y_new}, Vertex{n}, Vertex{s.y}},
                       pi);
    residue_connect_ed(ed, start + 2, start + 6,
                       {Vertex{y_new}, Vertex{m_new}, Vertex{z}}, xi);
}

WithLog<EdgePath> pinch(const EdgePath& gamma, const Line& l_prime, double tol) {
    require_valid(gamma, "pinch", tol);
    if (gamma.v.size() != 5) throw Error("pinch: expected a length-four path (x,L,y,M,z)");
    PathEditor ed{gamma, {}, tol};
    detail::pinch_ed(ed, 0, l_prime);
    ed.log.budget = 12;
    return {ed.path, ed.log};
}

// ---------------------------------------------------------------------------
// First-line alignment (at most two pinches)
// ---------------------------------------------------------------------------

namespace {

/// A line through x coplanar with both given lines, suitable as a pinch
/// intermediate. Tries a small deterministic family of directions in the
/// polar plane of x and completes the B-component by a least-norm solve.
Line line_through_coplanar_with(const Point& x, const Line& l1, const Line& l2) {
    const GeomCase cse = x.cse;
    const Field k = field_of(cse);
    auto polar = polar_line(x);
    std::vector<Element> dirs{polar.first, polar.second};
    const double inv_sqrt2 = 0.70710678118654752440;
    dirs.push_back((polar.first + polar.second) * inv_sqrt2);
    dirs.push_back((polar.first - polar.second) * inv_sqrt2);
    if (k == Field::Complex) {
        dirs.push_back((polar.first + right_scale(polar.second, KScalar::i())) * inv_sqrt2);
        dirs.push_back((polar.first - right_scale(polar.second, KScalar::i())) * inv_sqrt2);
    }
    auto basis = pure_basis(alg_b(cse), k);
    for (const auto& e : dirs) {
        KScalar c1 = hermitian(e, l1.a, k);
        KScalar c2 = hermitian(e, l2.a, k);
        KMatrix rows(2, basis.size());
        for (std::size_t i = 0; i < basis.size(); ++i) {
            rows.at(0, i) = hermitian(l1.b, basis[i], k);
            rows.at(1, i) = hermitian(l2.b, basis[i], k);
        }
        std::vector<KScalar> rhs{c1.conj(), c2.conj()};
        std::vector<KScalar> f0;
        try {
            f0 = min_norm_solution(rows, rhs, 1e-8);
        } catch (const Error&) {
            continue;  // dependent second components; try another direction
        }
        double n2 = 0.0;
        for (const auto& lam : f0) n2 += lam.abs2();
        if (n2 > 1.0 + 1e-9) continue;
        Element f = from_pure_coordinates(alg_b(cse), k, f0);
        if (n2 < 1.0 - 1e-9) {
            auto null_dirs = null_basis(rows, 1e-8);
            if (null_dirs.empty()) continue;
            Element wdir = normalized(from_pure_coordinates(alg_b(cse), k, null_dirs[0]));
            f += wdir * std::sqrt(1.0 - n2);
        }
        return make_line(cse, e, normalized(f));
    }
    throw Error("line_through_coplanar_with: no admissible intermediate line");
}

} // namespace

void detail::align_first_line(PathEditor& ed, std::size_t start, const Line& target) {
    PrimitiveSlice s = slice_loop(ed, start);
    if (line_equal(s.l, target, ed.tol)) return;
    if (!incident(ed.path.v[start], Vertex{target}, ed.tol))
        throw Error("align_first_line: target does not pass through the base point");
    if (coplanar(s.l, target, 1e-6)) {
        pinch_ed(ed, start, target);
        return;
    }
    Line mid = line_through_coplanar_with(std::get<Point>(ed.path.v[start]), s.l, target);
    if (line_equal(mid, s.l, ed.tol) || line_equal(mid, target, ed.tol))
        throw Error("align_first_line: degenerate intermediate line");
    pinch_ed(ed, start, mid);
    pinch_ed(ed, start, target);
}

// ---------------------------------------------------------------------------
// Primitive contraction
// ---------------------------------------------------------------------------

namespace {

bool loop_is_collapsible(const EdgePath& loop, double tol) {
    return vertex_equal(loop.v[0], loop.v[2], tol) || vertex_equal(loop.v[1], loop.v[3], tol);
}

std::vector<Line> pinch_candidates(const EdgePath& loop) {
    const auto& x = std::get<Point>(loop.v[0]);
    const auto& a = std::get<Line>(loop.v[1]);
    const auto& b = std::get<Line>(loop.v[3]);
    const GeomCase cse = x.cse;
    const Field k = field_of(cse);
    auto polar = polar_line(x);
    const double inv_sqrt2 = 0.70710678118654752440;
    std::vector<Element> dirs{polar.first, polar.second,
                              (polar.first + polar.second) * inv_sqrt2,
                              (polar.first - polar.second) * inv_sqrt2};
    if (k == Field::Complex)
        dirs.push_back((polar.first + right_scale(polar.second, KScalar::i())) * inv_sqrt2);

    std::vector<Element> seconds;
    Element w1 = unit_orthogonal_in(alg_b(cse), k, {a.b});
    Element w2 = unit_orthogonal_in(alg_b(cse), k, {a.b, w1});
    seconds.push_back(w1);
    seconds.push_back(w2);
    seconds.push_back((w1 + w2) * inv_sqrt2);
    Element other = b.b - right_scale(a.b, hermitian(a.b, b.b, k));
    if (norm(other) > 1e-6) seconds.push_back(normalized(other));

    std::vector<Line> cands;
    for (const auto& e : dirs) {
        KScalar kappa = hermitian(e, a.a, k);  // coplanarity: (e|gA) = (f|bA)
        double rest = 1.0 - kappa.abs2();
        if (rest < 1e-12) continue;
        Element f_base = right_scale(a.b, kappa.conj());
        for (const auto& wdir : seconds) {
            Element f = f_base + wdir * std::sqrt(rest);
            try {
                Line cand = make_line(cse, e, normalized(f));
                if (!line_equal(cand, a, 1e-9)) cands.push_back(cand);
            } catch (const Error&) {
            }
        }
    }
    return cands;
}

struct SearchBudget {
    std::size_t nodes;
};

std::optional<std::vector<Line>> pinch_plan(const EdgePath& loop, std::size_t depth,
                                            SearchBudget& budget, double tol) {
    if (loop_is_collapsible(loop, tol)) return std::vector<Line>{};
    if (depth == 0) return std::nullopt;
    for (const auto& cand : pinch_candidates(loop)) {
        if (budget.nodes == 0) return std::nullopt;
        --budget.nodes;
        EdgePath next;
        try {
            next = pinch(loop, cand, tol).result;
        } catch (const Error&) {
            continue;
        }
        if (auto rest = pinch_plan(next, depth - 1, budget, tol)) {
            rest->insert(rest->begin(), cand);
            return rest;
        }
    }
    return std::nullopt;
}

void collapse_backtracks(PathEditor& ed, std::size_t start) {
    // Loop (x, A, u, B, x) with either u == x or A == B; 2 moves to (x).
    if (vertex_equal(ed.path.v[start], ed.path.v[start + 2], ed.tol)) {
        ed.apply(MoveKind::remove_backtrack, start, ed.path.v[start + 1]);
        ed.apply(MoveKind::remove_backtrack, start, ed.path.v[start + 1]);
        return;
    }
    if (vertex_equal(ed.path.v[start + 1], ed.path.v[start + 3], ed.tol)) {
        ed.apply(MoveKind::remove_backtrack, start + 1, ed.path.v[start + 2]);
        ed.apply(MoveKind::remove_backtrack, start, ed.path.v[start + 1]);
        return;
    }
    throw Error("collapse_backtracks: loop is not degenerate");
}

void contract_loop4_impl(PathEditor& ed, std::size_t start, const HomotopyOptions& opts,
                         int depth) {
    if (ed.path.v.size() < start + 5 ||
        !vertex_equal(ed.path.v[start], ed.path.v[start + 4], ed.tol))
        throw Error("contract_loop4: subpath is not a loop");

    if (vertex_equal(ed.path.v[start], ed.path.v[start + 2], ed.tol) ||
        vertex_equal(ed.path.v[start + 1], ed.path.v[start + 3], ed.tol)) {
        collapse_backtracks(ed, start);
        return;
    }

    PrimitiveSlice s = slice_loop(ed, start);
    const GeomCase cse = s.x.cse;
    const Field k = field_of(cse);
    if (hermitian(s.x.rep, s.y.rep, k).abs() > ed.tol) {
        detail::orthogonalize_ed(ed, start);
        s = slice_loop(ed, start);
    }
    PrimitivePath pp = make_primitive(s.x, s.l, s.y, s.m, ed.tol);
    KScalar lambda = pl_invariant(pp, ed.tol);

    if (near(lambda, KScalar::one(), 1e-7)) {
        // Unit invariant forces equal lines.
        if (vertex_equal(ed.path.v[start + 1], ed.path.v[start + 3], 1e-6)) {
            collapse_backtracks(ed, start);
            return;
        }
        throw Error("contract_loop4: invariant one but lines differ (degenerate)");
    }

    if (lambda.abs() > 1e-9 && depth < 2) {
        // Split along J = [g, e] with e orthogonal to both second components:
        // both halves then carry PL-invariant zero.
        Element g = primitive_direction(pp);
        KScalar t = hermitian(g, s.m.a, k);
        Element c_adj = right_scale(s.m.b, t.conj());
        Element e = unit_orthogonal_in(alg_b(cse), k, {s.l.b, c_adj});
        Line j = make_line(cse, g, e);
        ed.apply(MoveKind::insert_backtrack, start + 2, Vertex{j});
        ed.apply(MoveKind::insert_backtrack, start + 3, Vertex{ed.path.v[start]});
        contract_loop4_impl(ed, start, opts, depth + 1);
        contract_loop4_impl(ed, start, opts, depth + 1);
        return;
    }

    // Base case: bounded iterative-deepening pinch search.
    EdgePath loop;
    loop.cse = cse;
    loop.v.assign(ed.path.v.begin() + static_cast<std::ptrdiff_t>(start),
                  ed.path.v.begin() + static_cast<std::ptrdiff_t>(start) + 5);
    for (std::size_t d = 1; d <= opts.search_depth; ++d) {
        SearchBudget budget{opts.search_nodes};
        if (auto plan = pinch_plan(loop, d, budget, ed.tol)) {
            for (const auto& l_prime : *plan) detail::pinch_ed(ed, start, l_prime);
            collapse_backtracks(ed, start);
            return;
        }
    }
    std::ostringstream os;
    os << "contract_loop4: bounded search exhausted (invariant " << lambda.re;
    if (k == Field::Complex) os << (lambda.im < 0 ? " - " : " + ") << std::fabs(lambda.im) << "i";
    os << ")";
    throw Error(os.str());
}

} // namespace

std::size_t detail::contract_loop4(PathEditor& ed, std::size_t start,
                                   const HomotopyOptions& opts) {
    const std::size_t before = ed.log.size();
    contract_loop4_impl(ed, start, opts, 0);
    return ed.log.size() - before;
}

MoveLog contract_primitive(const PrimitivePath& pp, const HomotopyOptions& opts) {
    PathEditor ed{to_path(pp), {}, opts.tol};
    std::size_t used = detail::contract_loop4(ed, 0, opts);
    if (used > opts.k_budget)
        throw Error("contract_primitive: used " + std::to_string(used) +
                    " moves, exceeding the configured K budget");
    return ed.log;
}

// ---------------------------------------------------------------------------
// Comparison macros (the K+30 and K+55 lemmas)
// ---------------------------------------------------------------------------

namespace {

struct MacroStats {
    std::size_t k_emp = 0;
};

/// Transforms the subpath (u, A, v, B, w) at `start` into (u, N, w).
void compare_4_2(PathEditor& ed, std::size_t start, const Line& n, const Vertex& w_check,
                 const HomotopyOptions& opts, MacroStats& stats) {
    if (!vertex_equal(ed.path.v[start + 4], w_check, ed.tol))
        throw Error("compare_4_2: endpoint mismatch");
    detail::align_first_line(ed, start, n);
    // (u, N, v1, B1, w)
    if (vertex_equal(ed.path.v[start + 3], Vertex{n}, ed.tol)) {
        ed.apply(MoveKind::remove_backtrack, start + 1, ed.path.v[start + 2]);
        return;
    }
    ed.apply(MoveKind::insert_backtrack, start + 4, Vertex{n});
    ed.apply(MoveKind::insert_backtrack, start + 5, ed.path.v[start + 2]);
    // (u, N, v1, B1, w, N, v1, N, w): contract the loop (v1, B1, w, N, v1).
    stats.k_emp = std::max(stats.k_emp, detail::contract_loop4(ed, start + 2, opts));
    ed.apply(MoveKind::remove_backtrack, start + 1, ed.path.v[start + 2]);
}

/// Transforms the subpath (x, L, y, M, z) at `start` into the length-four
/// target (x, L', y', M', z).
void compare_4_4(PathEditor& ed, std::size_t start, const std::vector<Vertex>& target,
                 const HomotopyOptions& opts, MacroStats& stats) {
    if (target.size() != 5) throw Error("compare_4_4: target must have length four");
    auto matches = [&](void) {
        for (std::size_t i = 0; i < 5; ++i)
            if (!vertex_equal(ed.path.v[start + i], target[i], ed.tol)) return false;
        return true;
    };
    if (matches()) return;
    const Line& l_prime = std::get<Line>(target[1]);
    const Point& y_prime = std::get<Point>(target[2]);
    const Line& m_prime = std::get<Line>(target[3]);
    detail::align_first_line(ed, start, l_prime);
    if (matches()) return;
    ed.apply(MoveKind::insert_backtrack, start + 1, Vertex{y_prime});
    // (x, L', y', L', y1, M1, z): compare the tail against (y', M', z).
    compare_4_2(ed, start + 2, m_prime, target[4], opts, stats);
}

void trim_backtracks(PathEditor& ed, std::size_t base = 0, std::size_t tail = 0) {
    bool changed = true;
    while (changed) {
        changed = false;
        if (ed.path.v.size() < base + tail + 3) return;
        const std::size_t last = ed.path.v.size() - 1 - tail;
        for (std::size_t i = base; i + 2 <= last; ++i) {
            if (vertex_equal(ed.path.v[i], ed.path.v[i + 2], ed.tol)) {
                ed.apply(MoveKind::remove_backtrack, i, ed.path.v[i + 1]);
                changed = true;
                break;
            }
        }
    }
}

bool path_is_point_line(const EdgePath& p) {
    for (const auto& v : p.v)
        if (type_of(v) == 3) return false;
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// Shorten (the K+56 lemma)
// ---------------------------------------------------------------------------

namespace {

/// Shortens the point-line subpath starting at `base` (running to the end
/// of the path minus `tail` vertices) by two.
void shorten_ed(PathEditor& ed, std::size_t base, std::size_t tail,
                const HomotopyOptions& opts, MacroStats& stats) {
    const EdgePath& p = ed.path;
    const std::size_t last = p.v.size() - 1 - tail;
    if (last < base || last - base < 6)
        throw Error("shorten: need an even point-line path of length at least six");
    if ((last - base) % 2 != 0)
        throw Error("shorten: need an even point-line path of length at least six");
    for (std::size_t i = base; i <= last; ++i)
        if (type_of(p.v[i]) == 3) throw Error("shorten: path contains planes");
    if (type_of(p.v[base]) != 1) throw Error("shorten: path must start at a point");

    const Point& x0 = std::get<Point>(p.v[base]);
    const Point& x2 = std::get<Point>(p.v[base + 4]);
    const Line& l3 = std::get<Line>(p.v[base + 5]);
    const GeomCase cse = x0.cse;
    const Field k = field_of(cse);

    // A point y on L3 collinear with x0 (any point works in a flat
    // geometry; prefer one orthogonal to x0 and distinct from x2).
    Element y_dir = unit_orthogonal_in(alg_a(cse), k, {l3.a, x0.rep});
    Point y = make_point(cse, y_dir);
    if (point_equal(y, x2, 1e-6)) {
        y_dir = unit_orthogonal_in(alg_a(cse), k, {l3.a, y_dir});
        y = make_point(cse, y_dir);
        if (point_equal(y, x2, 1e-6)) throw Error("shorten: no usable point on L3");
    }
    Element m_dir = unit_orthogonal_in(alg_a(cse), k, {x0.rep, y.rep});
    Line m = make_line(cse, m_dir, pure_basis(alg_b(cse), k).front());

    compare_4_4(ed, base,
                {Vertex{x0}, Vertex{m}, Vertex{y}, Vertex{l3}, Vertex{x2}}, opts, stats);
    // (x0, M, y, L3, x2, L3, ...) -> drop the backtrack through x2.
    ed.apply(MoveKind::remove_backtrack, base + 3, ed.path.v[base + 4]);
}

} // namespace

WithLog<EdgePath> shorten(const EdgePath& p, const HomotopyOptions& opts) {
    require_valid(p, "shorten", opts.tol);
    PathEditor ed{p, {}, opts.tol};
    MacroStats stats;
    shorten_ed(ed, 0, 0, opts, stats);
    ed.log.budget = opts.k_budget + 56;
    if (ed.log.size() > *ed.log.budget)
        throw Error("shorten: move budget K+56 exceeded");
    return {ed.path, ed.log};
}

// ---------------------------------------------------------------------------
// reduce: a move log transforming p into q
// ---------------------------------------------------------------------------

namespace {

std::string canon_key(const EdgePath& p) {
    std::ostringstream os;
    char buf[32];
    for (const auto& v : p.v) {
        os << type_of(v) << ":";
        auto put = [&](const Element& e) {
            for (std::size_t i = 0; i < e.dim(); ++i) {
                std::snprintf(buf, sizeof buf, "%.6f,", e[i] + 0.0);  // normalize -0
                os << buf;
            }
        };
        if (std::holds_alternative<Point>(v)) {
            put(std::get<Point>(v).rep);
        } else if (std::holds_alternative<Line>(v)) {
            put(std::get<Line>(v).a);
            put(std::get<Line>(v).b);
        } else {
            for (const auto& img : std::get<Plane>(v).emb.images) put(img);
        }
        os << "|";
    }
    return os.str();
}

struct SearchState {
    EdgePath path;
    std::vector<Move> plan;
};

/// All states reachable by shrinking moves (backtrack removal and edge
/// contraction) up to the given depth.
std::map<std::string, SearchState> shrink_reachable(const EdgePath& start, std::size_t depth,
                                                    std::size_t cap, double tol) {
    std::map<std::string, SearchState> seen;
    std::vector<SearchState> frontier{{start, {}}};
    seen.emplace(canon_key(start), frontier.front());
    for (std::size_t d = 0; d < depth && !frontier.empty(); ++d) {
        std::vector<SearchState> next;
        for (const auto& st : frontier) {
            const auto& pv = st.path.v;
            for (std::size_t i = 0; i + 2 < pv.size(); ++i) {
                std::vector<Move> tries;
                if (vertex_equal(pv[i], pv[i + 2], tol))
                    tries.push_back(Move{MoveKind::remove_backtrack, i, pv[i + 1]});
                else
                    tries.push_back(Move{MoveKind::contract_edge, i, pv[i + 1]});
                for (const auto& m : tries) {
                    EdgePath np;
                    try {
                        np = apply_move(st.path, m, tol);
                    } catch (const Error&) {
                        continue;
                    }
                    std::string key = canon_key(np);
                    if (seen.count(key)) continue;
                    SearchState ns{np, st.plan};
                    ns.plan.push_back(m);
                    if (seen.size() >= cap) return seen;
                    seen.emplace(key, ns);
                    next.push_back(std::move(ns));
                }
            }
        }
        frontier = std::move(next);
    }
    return seen;
}

bool direct_reduce(PathEditor& edp, PathEditor& edq, std::size_t depth, std::size_t cap) {
    auto reach_p = shrink_reachable(edp.path, depth, cap, edp.tol);
    auto reach_q = shrink_reachable(edq.path, depth, cap, edq.tol);
    const SearchState* best_p = nullptr;
    const SearchState* best_q = nullptr;
    std::size_t best_cost = ~std::size_t{0};
    for (const auto& [key, sp] : reach_p) {
        auto it = reach_q.find(key);
        if (it == reach_q.end()) continue;
        std::size_t cost = sp.plan.size() + it->second.plan.size();
        if (cost < best_cost) {
            best_cost = cost;
            best_p = &sp;
            best_q = &it->second;
        }
    }
    if (!best_p) return false;
    for (const auto& m : best_p->plan) edp.apply(m.kind, m.position, m.witness);
    for (const auto& m : best_q->plan) edq.apply(m.kind, m.position, m.witness);
    return true;
}

/// Finds the differing window between the two paths and, when every line
/// inside it lies on one common plane, rewrites p's window into q's window
/// through that plane residue (at most len(sigma) + len(tau) moves, the
/// plane-residue connectivity bound). Returns false when no such window
/// exists.
bool try_residue_merge(PathEditor& edp, PathEditor& edq) {
    const auto& pv = edp.path.v;
    const auto& qv = edq.path.v;
    const std::size_t np = pv.size(), nq = qv.size();
    std::size_t lcp = 0;
    while (lcp < std::min(np, nq) && vertex_equal(pv[lcp], qv[lcp], edp.tol)) ++lcp;
    if (lcp == 0) return false;
    std::size_t lcs = 0;
    while (lcs < std::min(np, nq) &&
           vertex_equal(pv[np - 1 - lcs], qv[nq - 1 - lcs], edp.tol))
        ++lcs;
    lcs = std::min({lcs, np - lcp, nq - lcp});
    if (lcs == 0) return false;
    const std::size_t start = lcp - 1;
    const std::size_t end_p = np - lcs;
    const std::size_t end_q = nq - lcs;
    if (start > end_p || start > end_q) return false;
    if (!vertex_equal(pv[start], qv[start], edp.tol) ||
        !vertex_equal(pv[end_p], qv[end_q], edp.tol))
        return false;

    std::vector<Line> lines;
    auto collect = [&](const std::vector<Vertex>& v, std::size_t a, std::size_t b) {
        for (std::size_t i = a; i <= b; ++i) {
            if (type_of(v[i]) == 3) return false;
            if (type_of(v[i]) == 2) lines.push_back(std::get<Line>(v[i]));
        }
        return true;
    };
    if (!collect(pv, start, end_p) || !collect(qv, start, end_q)) return false;
    if (lines.empty()) return false;

    // A plane whose residue holds the whole window.
    const Field k = field_of(edp.path.cse);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            if (1.0 - hermitian(lines[i].a, lines[j].a, k).abs2() < 1e-8) continue;
            if (!coplanar(lines[i], lines[j], 1e-6)) continue;
            Plane pi = common_plane(lines[i], lines[j]);
            bool all_in = true;
            for (const auto& l : lines)
                if (!incident(Vertex{l}, Vertex{pi}, 1e-6)) {
                    all_in = false;
                    break;
                }
            if (!all_in) continue;
            std::vector<Vertex> target(qv.begin() + static_cast<std::ptrdiff_t>(start),
                                       qv.begin() + static_cast<std::ptrdiff_t>(end_q) + 1);
            try {
                detail::residue_connect_ed(edp, start, end_p, target, pi);
                return true;
            } catch (const Error&) {
                continue;
            }
        }
    }
    return false;
}

/// Transforms the length-two subpath (x, A, z) at `base` into (x, B, z).
void swap_middle_line(PathEditor& ed, std::size_t base, const Line& b,
                      const HomotopyOptions& opts, MacroStats& stats) {
    if (vertex_equal(ed.path.v[base + 1], Vertex{b}, ed.tol)) return;
    ed.apply(MoveKind::insert_backtrack, base + 2, Vertex{b});
    ed.apply(MoveKind::insert_backtrack, base + 3, ed.path.v[base]);
    stats.k_emp = std::max(stats.k_emp, detail::contract_loop4(ed, base, opts));
}

/// Deterministic point incident with a line or plane vertex, used for the
/// extremity normalization of the reduce pipeline.
Vertex anchor_point_for(const Vertex& v) {
    const GeomCase c = case_of(v);
    if (type_of(v) == 2)
        return Vertex{make_point(
            c, unit_orthogonal_in(alg_a(c), field_of(c), {std::get<Line>(v).a}))};
    return Vertex{make_point(c, pure_basis(alg_a(c), field_of(c)).front())};
}

} // namespace

WithLog<ReduceStats> reduce(const EdgePath& p, const EdgePath& q, const HomotopyOptions& opts) {
    require_valid(p, "reduce", opts.tol);
    require_valid(q, "reduce", opts.tol);
    if (p.cse != q.cse) throw Error("reduce: mixed geometry cases");
    if (!vertex_equal(p.v.front(), q.v.front(), opts.tol) ||
        !vertex_equal(p.v.back(), q.v.back(), opts.tol))
        throw Error("reduce: endpoint mismatch");

    WithLog<ReduceStats> out;
    PathEditor edp{p, {}, opts.tol};
    PathEditor edq{q, {}, opts.tol};
    MacroStats stats;

    auto assemble = [&](bool ok, const std::string& why) {
        out.log = edp.log;
        out.log.append(inverted(edq.log));
        out.result.success = ok;
        out.result.moves = out.log.moves.size();
        out.result.k_emp = stats.k_emp;
        out.result.failure = why;
        if (ok) {
            EdgePath check = replay(p, out.log, opts.tol);
            if (!path_equal(check, q, 1e-6))
                throw Error("reduce: internal replay check failed");
        }
    };

    trim_backtracks(edp);
    trim_backtracks(edq);
    if (path_equal(edp.path, edq.path, opts.tol)) {
        assemble(true, "");
        return out;
    }

    // Direct difference search first.
    if (direct_reduce(edp, edq, 8, 4096)) {
        assemble(true, "");
        return out;
    }

    // Pipeline: extremity normalization, plane elimination, shortening,
    // final comparison.
    try {
        // Non-point extremities receive the same point backtrack on both
        // paths (at most four moves); everything after works on the
        // point-ended subrange between the inserted points.
        std::size_t base = 0, tail = 0;
        if (type_of(edp.path.v.front()) != 1) {
            Vertex pt = anchor_point_for(edp.path.v.front());
            edp.apply(MoveKind::insert_backtrack, 0, pt);
            edq.apply(MoveKind::insert_backtrack, 0, pt);
            base = 1;
        }
        if (type_of(edp.path.v.back()) != 1) {
            Vertex pt = anchor_point_for(edp.path.v.back());
            edp.apply(MoveKind::insert_backtrack, edp.path.v.size() - 1, pt);
            edq.apply(MoveKind::insert_backtrack, edq.path.v.size() - 1, pt);
            tail = 1;
        }
        for (PathEditor* ed : {&edp, &edq}) {
            detail::eliminate_planes_ed(*ed);
            trim_backtracks(*ed, base, tail);
        }
        // Plane elimination may already have merged the two paths.
        if (path_equal(edp.path, edq.path, opts.tol) || direct_reduce(edp, edq, 8, 4096)) {
            assemble(true, "");
            return out;
        }
        // Differences confined to single plane residues merge constructively.
        for (int round = 0; round < 16 && try_residue_merge(edp, edq); ++round) {
            trim_backtracks(edp, base, tail);
            trim_backtracks(edq, base, tail);
            if (path_equal(edp.path, edq.path, opts.tol)) {
                assemble(true, "");
                return out;
            }
        }
        if (direct_reduce(edp, edq, 8, 4096)) {
            assemble(true, "");
            return out;
        }
        auto sub_len = [&](const PathEditor& ed) {
            return ed.path.v.size() - 1 - tail - base;
        };
        while (sub_len(edp) > 4) shorten_ed(edp, base, tail, opts, stats);
        while (sub_len(edq) > 4) shorten_ed(edq, base, tail, opts, stats);
        trim_backtracks(edp, base, tail);
        trim_backtracks(edq, base, tail);
        if (path_equal(edp.path, edq.path, opts.tol)) {
            assemble(true, "");
            return out;
        }
        const std::size_t lp = sub_len(edp);
        const std::size_t lq = sub_len(edq);
        if (lp == 4 && lq == 4) {
            std::vector<Vertex> target(edq.path.v.begin() + static_cast<std::ptrdiff_t>(base),
                                       edq.path.v.begin() + static_cast<std::ptrdiff_t>(base) +
                                           5);
            compare_4_4(edp, base, target, opts, stats);
        } else if (lp == 4 && lq == 2) {
            compare_4_2(edp, base, std::get<Line>(edq.path.v[base + 1]),
                        edq.path.v[base + 2], opts, stats);
        } else if (lp == 2 && lq == 4) {
            compare_4_2(edq, base, std::get<Line>(edp.path.v[base + 1]),
                        edp.path.v[base + 2], opts, stats);
        } else if (lp == 2 && lq == 2) {
            swap_middle_line(edp, base, std::get<Line>(edq.path.v[base + 1]), opts, stats);
        } else if ((lp == 2 && lq == 0) || (lp == 0 && lq == 2)) {
            trim_backtracks(edp, base, tail);
            trim_backtracks(edq, base, tail);
            if (!path_equal(edp.path, edq.path, opts.tol))
                throw Error("leftover non-backtrack loop");
        }
        if (!path_equal(edp.path, edq.path, opts.tol))
            throw Error("paths still differ after comparison");
        assemble(true, "");
        return out;
    } catch (const Error& e) {
        assemble(false, e.what());
        return out;
    }
}

// ---------------------------------------------------------------------------
// Random experiment material
// ---------------------------------------------------------------------------

namespace {

EdgePath random_loop_impl(GeomCase c, const Point* anchor, Rng& rng, std::size_t max_len,
                          bool with_planes) {
    if (max_len < 4) throw Error("random_loop: need max_len >= 4");
    for (int attempt = 0; attempt < 64; ++attempt) {
        // Loop length 2*segments <= max_len.
        const std::size_t segments = 2 + rng.below(max_len / 2 - 1);
        EdgePath p;
        p.cse = c;
        Point x0 = anchor ? *anchor : random_point(c, rng);
        p.v.push_back(Vertex{x0});
        Point cur = x0;
        bool ok = true;
        for (std::size_t s = 0; s + 1 < segments && ok; ++s) {
            Line l = random_line_through(cur, rng);
            Point nxt = random_point_on(l, rng);
            if (point_equal(nxt, cur, 1e-6)) {
                ok = false;
                break;
            }
            p.v.push_back(Vertex{l});
            p.v.push_back(Vertex{nxt});
            cur = nxt;
        }
        if (!ok) continue;
        if (point_equal(cur, x0, 1e-6)) continue;
        Element dir = unit_orthogonal_to(c, {cur.rep, x0.rep});
        Line close = make_line(c, dir, random_unit_pure(field_of(c), alg_b(c), rng));
        if (!p.v.empty() && std::holds_alternative<Line>(p.v.back()) &&
            line_equal(std::get<Line>(p.v.back()), close, 1e-6))
            continue;
        p.v.push_back(Vertex{close});
        p.v.push_back(Vertex{x0});
        if (!path_valid(p)) continue;
        if (with_planes) {
            // Expand a couple of point-line edges through planes.
            std::size_t expansions = 1 + rng.below(2);
            for (std::size_t e = 0; e < expansions && p.length() + 1 <= max_len + 2; ++e) {
                std::size_t i = rng.below(p.v.size() - 1);
                const Vertex *a = &p.v[i], *b = &p.v[i + 1];
                if (type_of(*a) + type_of(*b) != 3) continue;  // point-line edges only
                const Line& l = std::get<Line>(type_of(*a) == 2 ? *a : *b);
                Plane pi = random_plane_through(l, rng);
                p = apply_move(p, Move{MoveKind::expand_edge, i, Vertex{pi}});
            }
        }
        return p;
    }
    throw Error("random_loop: sampling failed");
}

} // namespace

EdgePath random_loop(GeomCase c, Rng& rng, std::size_t max_len, bool with_planes) {
    return random_loop_impl(c, nullptr, rng, max_len, with_planes);
}

EdgePath random_loop_at(const Point& base, Rng& rng, std::size_t max_len) {
    return random_loop_impl(base.cse, &base, rng, max_len, false);
}

Move random_move(const EdgePath& p, Rng& rng) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        const std::size_t n = p.v.size();
        int kind = static_cast<int>(rng.below(4));
        if (kind == 0) {
            // insert_backtrack
            std::size_t i = rng.below(n);
            const Vertex& u = p.v[i];
            try {
                Vertex w;
                if (std::holds_alternative<Point>(u))
                    w = Vertex{random_line_through(std::get<Point>(u), rng)};
                else if (std::holds_alternative<Line>(u))
                    w = rng.below(2) ? Vertex{random_point_on(std::get<Line>(u), rng)}
                                     : Vertex{random_plane_through(std::get<Line>(u), rng)};
                else
                    w = Vertex{random_point(p.cse, rng)};
                return Move{MoveKind::insert_backtrack, i, w};
            } catch (const Error&) {
                continue;
            }
        } else if (kind == 1 && n >= 3) {
            std::size_t i = rng.below(n - 2);
            if (vertex_equal(p.v[i], p.v[i + 2], kPathTol))
                return Move{MoveKind::remove_backtrack, i, p.v[i + 1]};
        } else if (kind == 2 && n >= 2) {
            std::size_t i = rng.below(n - 1);
            const Vertex& a = p.v[i];
            const Vertex& b = p.v[i + 1];
            int ta = type_of(a), tb = type_of(b);
            try {
                Vertex w;
                if ((ta == 1 && tb == 2) || (ta == 2 && tb == 1)) {
                    const Line& l = std::get<Line>(ta == 2 ? a : b);
                    w = Vertex{random_plane_through(l, rng)};
                } else if ((ta == 2 && tb == 3) || (ta == 3 && tb == 2)) {
                    const Line& l = std::get<Line>(ta == 2 ? a : b);
                    w = Vertex{random_point_on(l, rng)};
                } else if ((ta == 1 && tb == 3) || (ta == 3 && tb == 1)) {
                    const Point& pt = std::get<Point>(ta == 1 ? a : b);
                    const Plane& pl = std::get<Plane>(ta == 3 ? a : b);
                    Element dir = unit_orthogonal_to(
                        p.cse, {pt.rep, random_unit_pure(field_of(p.cse), alg_a(p.cse), rng)});
                    w = Vertex{make_line(p.cse, dir, pl.emb.apply(dir))};
                } else {
                    continue;
                }
                return Move{MoveKind::expand_edge, i, w};
            } catch (const Error&) {
                continue;
            }
        } else if (kind == 3 && n >= 3) {
            std::size_t i = rng.below(n - 2);
            const Vertex& a = p.v[i];
            const Vertex& b = p.v[i + 2];
            if (!vertex_equal(a, b, kPathTol) && incident(a, b, kPathTol))
                return Move{MoveKind::contract_edge, i, p.v[i + 1]};
        }
    }
    throw Error("random_move: no applicable move found");
}

} // namespace c3geom
