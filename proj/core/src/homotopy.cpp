#include "c3geom/homotopy.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "homotopy_internal.hpp"

namespace c3geom {

bool path_valid(const EdgePath& p, double tol) {
    if (p.v.empty()) return false;
    for (const auto& v : p.v)
        if (case_of(v) != p.cse) return false;
    for (std::size_t i = 0; i + 1 < p.v.size(); ++i) {
        if (vertex_equal(p.v[i], p.v[i + 1], tol)) return false;
        if (!incident(p.v[i], p.v[i + 1], tol)) return false;
    }
    return true;
}

void require_valid(const EdgePath& p, const char* where, double tol) {
    if (!path_valid(p, tol)) throw Error(std::string(where) + ": invalid edge path");
}

bool path_equal(const EdgePath& p, const EdgePath& q, double tol) {
    if (p.cse != q.cse || p.v.size() != q.v.size()) return false;
    for (std::size_t i = 0; i < p.v.size(); ++i)
        if (!vertex_equal(p.v[i], q.v[i], tol)) return false;
    return true;
}

const char* name(MoveKind k) {
    switch (k) {
        case MoveKind::insert_backtrack: return "insert_backtrack";
        case MoveKind::remove_backtrack: return "remove_backtrack";
        case MoveKind::expand_edge: return "expand_edge";
        case MoveKind::contract_edge: return "contract_edge";
    }
    return "?";
}

void MoveLog::append(const MoveLog& other) {
    moves.insert(moves.end(), other.moves.begin(), other.moves.end());
}

EdgePath apply_move(const EdgePath& p, const Move& m, double tol) {
    const std::size_t n = p.v.size();
    EdgePath out = p;
    switch (m.kind) {
        case MoveKind::insert_backtrack: {
            if (m.position >= n) throw Error("insert_backtrack: index out of range");
            const Vertex& u = p.v[m.position];
            if (vertex_equal(u, m.witness, tol))
                throw Error("insert_backtrack: witness equals the anchor vertex");
            if (!incident(u, m.witness, tol))
                throw Error("insert_backtrack: witness not incident with the anchor");
            out.v.insert(out.v.begin() + static_cast<std::ptrdiff_t>(m.position) + 1,
                         {m.witness, u});
            break;
        }
        case MoveKind::remove_backtrack: {
            if (m.position + 2 >= n) throw Error("remove_backtrack: index out of range");
            if (!vertex_equal(p.v[m.position], p.v[m.position + 2], tol))
                throw Error("remove_backtrack: subpath is not a backtrack");
            if (!vertex_equal(p.v[m.position + 1], m.witness, tol))
                throw Error("remove_backtrack: witness does not match the path");
            out.v.erase(out.v.begin() + static_cast<std::ptrdiff_t>(m.position) + 1,
                        out.v.begin() + static_cast<std::ptrdiff_t>(m.position) + 3);
            break;
        }
        case MoveKind::expand_edge: {
            if (m.position + 1 >= n) throw Error("expand_edge: index out of range");
            const Vertex& u = p.v[m.position];
            const Vertex& v = p.v[m.position + 1];
            if (vertex_equal(u, m.witness, tol) || vertex_equal(v, m.witness, tol))
                throw Error("expand_edge: witness equals an endpoint");
            if (!incident(u, m.witness, tol) || !incident(m.witness, v, tol))
                throw Error("expand_edge: {u, w, v} is not a flag");
            out.v.insert(out.v.begin() + static_cast<std::ptrdiff_t>(m.position) + 1,
                         m.witness);
            break;
        }
        case MoveKind::contract_edge: {
            if (m.position + 2 >= n) throw Error("contract_edge: index out of range");
            const Vertex& u = p.v[m.position];
            const Vertex& w = p.v[m.position + 1];
            const Vertex& v = p.v[m.position + 2];
            if (!vertex_equal(w, m.witness, tol))
                throw Error("contract_edge: witness does not match the removed vertex");
            if (vertex_equal(u, v, tol))
                throw Error("contract_edge: endpoints coincide (use remove_backtrack)");
            if (!incident(u, v, tol)) throw Error("contract_edge: endpoints not incident");
            out.v.erase(out.v.begin() + static_cast<std::ptrdiff_t>(m.position) + 1);
            break;
        }
    }
    return out;
}

Move invert(const Move& m) {
    Move r = m;
    switch (m.kind) {
        case MoveKind::insert_backtrack: r.kind = MoveKind::remove_backtrack; break;
        case MoveKind::remove_backtrack: r.kind = MoveKind::insert_backtrack; break;
        case MoveKind::expand_edge: r.kind = MoveKind::contract_edge; break;
        case MoveKind::contract_edge: r.kind = MoveKind::expand_edge; break;
    }
    return r;
}

MoveLog inverted(const MoveLog& log) {
    MoveLog out;
    out.budget = log.budget;
    out.moves.reserve(log.moves.size());
    for (auto it = log.moves.rbegin(); it != log.moves.rend(); ++it)
        out.moves.push_back(invert(*it));
    return out;
}

EdgePath replay(const EdgePath& source, const MoveLog& log, double tol) {
    EdgePath p = source;
    for (const auto& m : log.moves) p = apply_move(p, m, tol);
    return p;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

void put_element(std::ostringstream& os, const Element& e) {
    char buf[64];
    os << e.dim();
    for (std::size_t i = 0; i < e.dim(); ++i) {
        std::snprintf(buf, sizeof buf, " %.17g", e[i]);
        os << buf;
    }
}

Element get_element(std::istringstream& is, Alg expect) {
    std::size_t d = 0;
    is >> d;
    if (d != dim(expect)) throw Error("parse: element dimension mismatch");
    Element e(expect);
    for (std::size_t i = 0; i < d; ++i)
        if (!(is >> e.c[i])) throw Error("parse: truncated element");
    return e;
}

} // namespace

std::string serialize(const Vertex& v) {
    std::ostringstream os;
    if (std::holds_alternative<Point>(v)) {
        os << "point ";
        put_element(os, std::get<Point>(v).rep);
    } else if (std::holds_alternative<Line>(v)) {
        const auto& l = std::get<Line>(v);
        os << "line ";
        put_element(os, l.a);
        os << " ";
        put_element(os, l.b);
    } else {
        const auto& pl = std::get<Plane>(v);
        os << "plane " << pl.emb.images.size();
        for (const auto& img : pl.emb.images) {
            os << " ";
            put_element(os, img);
        }
    }
    return os.str();
}

Vertex parse_vertex(GeomCase c, const std::string& text) {
    std::istringstream is(text);
    std::string kind;
    is >> kind;
    if (kind == "point") return Vertex{Point{c, get_element(is, alg_a(c))}};
    if (kind == "line") {
        Element a = get_element(is, alg_a(c));
        Element b = get_element(is, alg_b(c));
        return Vertex{Line{c, a, b}};
    }
    if (kind == "plane") {
        std::size_t n = 0;
        is >> n;
        Embedding emb;
        emb.k = field_of(c);
        emb.source = alg_a(c);
        emb.target = alg_b(c);
        for (std::size_t i = 0; i < n; ++i) emb.images.push_back(get_element(is, alg_b(c)));
        return Vertex{Plane{c, emb}};
    }
    throw Error("parse_vertex: unknown vertex kind '" + kind + "'");
}

std::string serialize(const MoveLog& log) {
    std::ostringstream os;
    for (const auto& m : log.moves)
        os << name(m.kind) << " " << m.position << " " << serialize(m.witness) << "\n";
    return os.str();
}

MoveLog parse_move_log(GeomCase c, const std::string& text) {
    MoveLog log;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        std::string kind;
        std::size_t pos = 0;
        is >> kind >> pos;
        MoveKind mk;
        if (kind == "insert_backtrack") mk = MoveKind::insert_backtrack;
        else if (kind == "remove_backtrack") mk = MoveKind::remove_backtrack;
        else if (kind == "expand_edge") mk = MoveKind::expand_edge;
        else if (kind == "contract_edge") mk = MoveKind::contract_edge;
        else throw Error("parse_move_log: unknown move kind '" + kind + "'");
        std::string rest;
        std::getline(is, rest);
        log.moves.push_back(Move{mk, pos, parse_vertex(c, rest)});
    }
    return log;
}

using detail::PathEditor;
using detail::PrimitiveSlice;

// ---------------------------------------------------------------------------
// Residue rewriting (the k + l machinery inside one plane residue)
// ---------------------------------------------------------------------------

namespace {

void check_in_residue(const Vertex& v, const Plane& pi, double tol, const char* where) {
    if (type_of(v) == 3) throw Error(std::string(where) + ": planes may not appear here");
    if (!incident(v, Vertex{pi}, tol))
        throw Error(std::string(where) + ": vertex outside the plane residue");
}

} // namespace

void detail::residue_connect_ed(PathEditor& ed, std::size_t first, std::size_t last,
                                const std::vector<Vertex>& replacement, const Plane& pi) {
    if (first > last || last >= ed.path.v.size())
        throw Error("residue_connect: bad subpath indices");
    if (replacement.empty()) throw Error("residue_connect: empty replacement");
    if (!vertex_equal(ed.path.v[first], replacement.front(), ed.tol) ||
        !vertex_equal(ed.path.v[last], replacement.back(), ed.tol))
        throw Error("residue_connect: replacement endpoints differ");
    for (std::size_t i = first; i <= last; ++i)
        check_in_residue(ed.path.v[i], pi, ed.tol, "residue_connect");
    for (const auto& v : replacement) check_in_residue(v, pi, ed.tol, "residue_connect");

    const Vertex plane_v{pi};
    // Phase 1: collapse the old subpath onto (u, pi, v).
    if (last == first) {
        ed.apply(MoveKind::insert_backtrack, first, plane_v);
    } else {
        ed.apply(MoveKind::expand_edge, first, plane_v);
        const std::size_t interior = last - first - 1;
        for (std::size_t t = 0; t < interior; ++t)
            ed.apply(MoveKind::contract_edge, first + 1, ed.path.v[first + 2]);
    }
    // Phase 2: grow the replacement out of (u, pi, v).
    const std::size_t m = replacement.size() - 1;
    if (m == 0) {
        ed.apply(MoveKind::remove_backtrack, first, plane_v);
    } else {
        for (std::size_t s = 1; s < m; ++s)
            ed.apply(MoveKind::expand_edge, first + s - 1, replacement[s]);
        ed.apply(MoveKind::contract_edge, first + m - 1, plane_v);
    }
}

MoveLog residue_connect(EdgePath& path, std::size_t first, std::size_t last,
                        const std::vector<Vertex>& replacement, const Plane& pi,
                        double tol) {
    PathEditor ed{path, {}, tol};
    detail::residue_connect_ed(ed, first, last, replacement, pi);
    path = ed.path;
    return ed.log;
}

// ---------------------------------------------------------------------------
// Plane elimination
// ---------------------------------------------------------------------------

namespace {

/// Removes the plane at position i, replacing (u, pi, v) by a path of
/// length <= 3 in the residue; at most 3 moves.
void eliminate_one_plane(PathEditor& ed, std::size_t i) {
    const Plane pi = std::get<Plane>(ed.path.v[i]);
    const Vertex u = ed.path.v[i - 1];
    const Vertex w = ed.path.v[i + 1];
    if (vertex_equal(u, w, ed.tol)) {
        ed.apply(MoveKind::remove_backtrack, i - 1, Vertex{pi});
        return;
    }
    const int tu = type_of(u), tw = type_of(w);
    if (tu == 1 && tw == 1) {
        Line join = line_in_plane_through(pi, std::get<Point>(u), std::get<Point>(w));
        ed.apply(MoveKind::expand_edge, i - 1, Vertex{join});
        ed.apply(MoveKind::contract_edge, i, Vertex{pi});
        return;
    }
    if (tu == 2 && tw == 2) {
        Point meet = meet_in_plane(std::get<Line>(u), std::get<Line>(w));
        ed.apply(MoveKind::expand_edge, i - 1, Vertex{meet});
        ed.apply(MoveKind::contract_edge, i, Vertex{pi});
        return;
    }
    // Mixed point/line neighbours.
    const bool point_first = (tu == 1);
    const Point& p = std::get<Point>(point_first ? u : w);
    const Line& l = std::get<Line>(point_first ? w : u);
    if (incident(Vertex{p}, Vertex{l}, ed.tol)) {
        ed.apply(MoveKind::contract_edge, i - 1, Vertex{pi});
        return;
    }
    Point on_l = make_point(pi.cse, unit_orthogonal_to(pi.cse, {l.a, p.rep}));
    Line join = line_in_plane_through(pi, p, on_l);
    if (point_first) {
        // (p, pi, l) -> (p, join, on_l, l)
        ed.apply(MoveKind::expand_edge, i - 1, Vertex{join});
        ed.apply(MoveKind::expand_edge, i, Vertex{on_l});
        ed.apply(MoveKind::contract_edge, i + 1, Vertex{pi});
    } else {
        // (l, pi, p) -> (l, on_l, join, p)
        ed.apply(MoveKind::expand_edge, i - 1, Vertex{on_l});
        ed.apply(MoveKind::expand_edge, i, Vertex{join});
        ed.apply(MoveKind::contract_edge, i + 1, Vertex{pi});
    }
}

} // namespace

void detail::eliminate_planes_ed(PathEditor& ed) {
    for (std::size_t i = 1; i < ed.path.v.size();) {
        if (i + 1 < ed.path.v.size() && type_of(ed.path.v[i]) == 3)
            eliminate_one_plane(ed, i);
        else
            ++i;
    }
}

WithLog<EdgePath> eliminate_planes(const EdgePath& p, double tol) {
    require_valid(p, "eliminate_planes", tol);
    if (type_of(p.v.front()) == 3 || type_of(p.v.back()) == 3)
        throw Error("eliminate_planes: path may not start or end at a plane");
    PathEditor ed{p, {}, tol};
    const std::size_t klen = p.length();
    detail::eliminate_planes_ed(ed);
    ed.log.budget = 3 * (klen / 2);
    if (ed.log.size() > *ed.log.budget)
        throw Error("eliminate_planes: 3*floor(k/2) move budget exceeded");
    return {ed.path, ed.log};
}

// ---------------------------------------------------------------------------
// Primitive paths and the PL-invariant
// ---------------------------------------------------------------------------

PrimitivePath make_primitive(const Point& x, const Line& l, const Point& y, const Line& m,
                             double tol) {
    if (point_equal(x, y, tol)) throw Error("make_primitive: points coincide");
    if (line_equal(l, m, tol)) throw Error("make_primitive: lines coincide");
    for (const Line* ln : {&l, &m})
        for (const Point* pt : {&x, &y})
            if (!incident(Vertex{*pt}, Vertex{*ln}, tol))
                throw Error("make_primitive: incidence fails");
    return PrimitivePath{x, l, y, m};
}

EdgePath to_path(const PrimitivePath& pp) {
    EdgePath p;
    p.cse = pp.x.cse;
    p.v = {Vertex{pp.x}, Vertex{pp.l}, Vertex{pp.y}, Vertex{pp.m}, Vertex{pp.x}};
    return p;
}

PrimitivePath primitive_from_path(const EdgePath& p, double tol) {
    if (p.v.size() != 5) throw Error("primitive_from_path: length is not four");
    if (!vertex_equal(p.v[0], p.v[4], tol)) throw Error("primitive_from_path: not a loop");
    return make_primitive(std::get<Point>(p.v[0]), std::get<Line>(p.v[1]),
                          std::get<Point>(p.v[2]), std::get<Line>(p.v[3]), tol);
}

PrimitivePath random_primitive(GeomCase c, Rng& rng, bool orthogonal) {
    const Field k = field_of(c);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Point x = random_point(c, rng);
        Element y_rep = orthogonal
                            ? unit_orthogonal_to(c, {x.rep, random_unit_pure(k, alg_a(c), rng)})
                            : random_unit_pure(k, alg_a(c), rng);
        Point y = make_point(c, y_rep);
        if (point_equal(x, y, 1e-6)) continue;
        if (1.0 - hermitian(x.rep, y.rep, k).abs2() < 1e-6) continue;
        Element g = unit_orthogonal_to(c, {x.rep, y.rep});
        Element b = random_unit_pure(k, alg_b(c), rng);
        Element d = random_unit_pure(k, alg_b(c), rng);
        if (near(b, d, 1e-4) || near(b, -d, 1e-4)) continue;
        Line l = make_line(c, g, b);
        Line m = make_line(c, g, d);
        if (line_equal(l, m, 1e-6)) continue;
        return make_primitive(x, l, y, m);
    }
    throw Error("random_primitive: sampling failed");
}

Element primitive_direction(const PrimitivePath& pp) {
    const Field k = field_of(pp.x.cse);
    KScalar t = hermitian(pp.l.a, pp.m.a, k);
    if (1.0 - t.abs2() > 1e-9)
        throw Error("primitive_direction: lines do not share their direction");
    return pp.l.a;
}

KScalar pl_invariant(const PrimitivePath& pp, double tol) {
    const Field k = field_of(pp.x.cse);
    if (hermitian(pp.x.rep, pp.y.rep, k).abs() > tol)
        throw Error("pl_invariant: points are not orthogonal");
    Element g = primitive_direction(pp);
    KScalar t = hermitian(g, pp.m.a, k);  // m.a = g * t with |t| = 1
    Element c = right_scale(pp.m.b, t.conj());
    return hermitian(pp.l.b, c, k);
}

// ---------------------------------------------------------------------------
// Orthogonalization of a primitive path (at most 12 moves)
// ---------------------------------------------------------------------------

detail::PrimitiveSlice detail::slice_loop(const PathEditor& ed, std::size_t start) {
    if (ed.path.v.size() < start + 5) throw Error("slice_loop: subpath out of range");
    return PrimitiveSlice{std::get<Point>(ed.path.v[start]),
                          std::get<Line>(ed.path.v[start + 1]),
                          std::get<Point>(ed.path.v[start + 2]),
                          std::get<Line>(ed.path.v[start + 3])};
}

/// (x, L, y, M, x) -> (x, L', y', M', x) with x orthogonal to y'; 12 moves.
void detail::orthogonalize_ed(PathEditor& ed, std::size_t start) {
    PrimitiveSlice s = slice_loop(ed, start);
    const GeomCase c = s.x.cse;
    const Field k = field_of(c);
    if (hermitian(s.x.rep, s.y.rep, k).abs() <= ed.tol) return;

    Element g = s.l.a;
    Element e = unit_orthogonal_to(c, {s.y.rep, g});
    Element f = unit_orthogonal_to_b(c, {s.l.b, s.m.b});
    Line n = make_line(c, e, f);
    Point y_new = make_point(c, unit_orthogonal_to(c, {e, s.x.rep}));
    Plane pi_l = common_plane(s.l, n);
    Plane pi_m = common_plane(s.m, n);
    Line l_new = line_in_plane_through(pi_l, s.x, y_new);
    Line m_new = line_in_plane_through(pi_m, s.x, y_new);
    if (line_equal(l_new, m_new, ed.tol))
        throw Error("orthogonalize_primitive: degenerate configuration (L' = M')");

    residue_connect_ed(ed, start, start + 2,
                       {Vertex{s.x}, Vertex{l_new}, Vertex{y_new}, Vertex{n}, Vertex{s.y}},
                       pi_l);
    residue_connect_ed(ed, start + 2, start + 6,
                       {Vertex{y_new}, Vertex{m_new}, Vertex{s.x}}, pi_m);
}

WithLog<PrimitivePath> orthogonalize_primitive(const PrimitivePath& pp, double tol) {
    PathEditor ed{to_path(pp), {}, tol};
    detail::orthogonalize_ed(ed, 0);
    ed.log.budget = 12;
    if (ed.log.size() > *ed.log.budget)
        throw Error("orthogonalize_primitive: twelve-move budget exceeded");
    return {primitive_from_path(ed.path, tol), ed.log};
}

// ---------------------------------------------------------------------------
// PL-reduction (12 moves, k = C)
// ---------------------------------------------------------------------------

namespace {

struct StandardFrame {
    Element a, a_prime, a_dprime;  // a'' = a * a'
    Element b, c;                  // L = [a'', b], M = [a'', c] after rescaling
};

StandardFrame make_standard_frame(const PrimitiveSlice& s, double tol) {
    const Field k = field_of(s.x.cse);
    if (hermitian(s.x.rep, s.y.rep, k).abs() > tol)
        throw Error("standard_frame: points are not orthogonal");
    StandardFrame f;
    f.a = s.x.rep;
    f.a_prime = s.y.rep;
    f.a_dprime = mul(f.a, f.a_prime);
    KScalar tl = hermitian(f.a_dprime, s.l.a, k);
    KScalar tm = hermitian(f.a_dprime, s.m.a, k);
    if (1.0 - tl.abs2() > 1e-9 || 1.0 - tm.abs2() > 1e-9)
        throw Error("standard_frame: line directions off the common direction");
    f.b = right_scale(s.l.b, tl.conj());
    f.c = right_scale(s.m.b, tm.conj());
    return f;
}

} // namespace

void detail::pl_reduce_ed(PathEditor& ed, std::size_t start, KScalar l) {
    PrimitiveSlice s = slice_loop(ed, start);
    const GeomCase cse = s.x.cse;
    const Field k = field_of(cse);
    if (k != Field::Complex)
        throw Error("pl_reduce: a unimodular non-real invariant needs k = C");
    if (std::fabs(l.abs() - 1.0) > 1e-7) throw Error("pl_reduce: |l| != 1");
    if (near(l, KScalar::one(), 1e-7) || near(l, -KScalar::one(), 1e-7))
        throw Error("pl_reduce: l = +-1 is excluded");

    StandardFrame f = make_standard_frame(s, ed.tol);
    if (!near(hermitian(f.b, f.c, k), l, 1e-6))
        throw Error("pl_reduce: stated invariant does not match the path");

    Element b_perp = unit_orthogonal_to_b(cse, {f.b});
    Element b_dp = mul(f.b, b_perp);
    Embedding phi = embed(f.a, f.a_prime, b_perp, b_dp, k);
    Embedding psi = embed(f.a, f.a_prime, b_perp, right_scale(b_dp, l.conj()), k);

    const double inv_sqrt2 = 0.70710678118654752440;
    Element d = (f.a_prime + f.a_dprime) * inv_sqrt2;
    Line n = make_line(cse, f.a, b_perp);
    Line l_new = make_line(cse, d, phi.apply(d));
    Line m_new = make_line(cse, d, psi.apply(d));
    Point y_new = make_point(cse, (f.a_prime - f.a_dprime) * inv_sqrt2);

    Plane pi_phi = make_plane(cse, phi);
    Plane pi_psi = make_plane(cse, psi);
    residue_connect_ed(ed, start, start + 2,
                       {Vertex{s.x}, Vertex{l_new}, Vertex{y_new}, Vertex{n}, Vertex{s.y}},
                       pi_phi);
    residue_connect_ed(ed, start + 2, start + 6,
                       {Vertex{y_new}, Vertex{m_new}, Vertex{s.x}}, pi_psi);
}

WithLog<PrimitivePath> pl_reduce(const PrimitivePath& pp, KScalar l, double tol) {
    PathEditor ed{to_path(pp), {}, tol};
    detail::pl_reduce_ed(ed, 0, l);
    ed.log.budget = 12;
    if (ed.log.size() > *ed.log.budget)
        throw Error("pl_reduce: twelve-move budget exceeded");
    return {primitive_from_path(ed.path, tol), ed.log};
}

// ---------------------------------------------------------------------------
// Directed-edge chains (finite diameter of the inner-product graph)
// ---------------------------------------------------------------------------

Element diam_step(const Element& b, const Element& c, KScalar l, Field k, double tol) {
    if (l.abs() >= 1.0 - 1e-12) throw Error("diam_step: |l| must be below one");
    KScalar l2 = l * l;
    if (!near(hermitian(b, c, k), l2, 1e-6))
        throw Error("diam_step: (b|c) differs from l^2");
    double rho = std::sqrt(std::max(0.0, 1.0 - l2.abs2()));
    if (rho < 1e-9) throw Error("diam_step: degenerate configuration");
    Element b_perp = (c - right_scale(b, l2)) * (1.0 / rho);
    Element b_dp = unit_orthogonal_in(b.tag, k, {b, b_perp});
    double la2 = l.abs2();
    KScalar r = l.conj() * ((1.0 - la2) / rho);
    double s = std::sqrt((1.0 - la2) / (1.0 + la2));
    Element d = right_scale(b, l) + right_scale(b_perp, r) + b_dp * s;
    if (!near(hermitian(b, d, k), l, tol) || !near(hermitian(d, c, k), l, 10 * tol))
        throw Error("diam_step: postcondition failed");
    return d;
}

namespace {

std::size_t diam_power(KScalar l) {
    double a2 = l.abs2();
    std::size_t n = 1;
    while (std::pow(a2, static_cast<double>(n)) > 0.5) {
        n *= 2;
        if (n > (std::size_t{1} << 40)) throw Error("diam_connect: |l| too close to one");
    }
    return n;
}

KScalar k_pow(KScalar l, std::size_t n) {
    KScalar r = KScalar::one();
    for (std::size_t i = 0; i < n; ++i) r = r * l;
    return r;
}

/// Chain u -> w with all steps l, given (u|w) = l^m, m a power of two.
void seg_chain(std::vector<Element>& out, const Element& u, const Element& w,
               KScalar l, std::size_t m, Field k, double tol) {
    if (m == 1) {
        out.push_back(w);
        return;
    }
    Element mid = diam_step(u, w, k_pow(l, m / 2), k, tol);
    seg_chain(out, u, mid, l, m / 2, k, tol);
    seg_chain(out, mid, w, l, m / 2, k, tol);
}

/// Chain u -> w with all steps l, given (u|w) = 0; 2n steps.
void zero_bridge(std::vector<Element>& out, const Element& u, const Element& w,
                 KScalar l, std::size_t n, Field k, double tol) {
    if (l.abs2() < 1e-24) {
        // Step value zero: u -> t -> w through a mutually orthogonal element.
        Element t = unit_orthogonal_in(u.tag, k, {u, w});
        out.push_back(t);
        out.push_back(w);
        return;
    }
    KScalar ln = k_pow(l, n);
    double beta2 = 1.0 - 2.0 * ln.abs2();
    if (beta2 < 0.0) throw Error("diam_connect: validity condition failed");
    Element b_dp = unit_orthogonal_in(u.tag, k, {u, w});
    Element d = right_scale(u, ln) + right_scale(w, ln.conj()) + b_dp * std::sqrt(beta2);
    seg_chain(out, u, d, l, n, k, tol);
    seg_chain(out, d, w, l, n, k, tol);
}

} // namespace

DiamChain diam_connect(const Element& b, const Element& c, KScalar l, Field k, double tol) {
    if (l.abs() >= 1.0 - 1e-12) throw Error("diam_connect: |l| must be below one");
    if (b.tag != c.tag) throw Error("diam_connect: tag mismatch");
    DiamChain chain;
    chain.n = diam_power(l);
    chain.nodes.push_back(b);
    KScalar bc = hermitian(b, c, k);
    if (near(bc, l, 1e-9) && !near(b, c, 1e-9)) {
        chain.nodes.push_back(c);
    } else if (near(bc, l * l, 1e-9) && !near(b, c, 1e-9)) {
        chain.nodes.push_back(diam_step(b, c, l, k, tol));
        chain.nodes.push_back(c);
    } else if (bc.abs() <= 1e-9 && !near(b, c, 1e-9)) {
        zero_bridge(chain.nodes, b, c, l, chain.n, k, tol);
    } else {
        Element e = unit_orthogonal_in(b.tag, k, {b, c});
        zero_bridge(chain.nodes, b, e, l, chain.n, k, tol);
        zero_bridge(chain.nodes, e, c, l, chain.n, k, tol);
    }
    // Self-check every consecutive product and the length bound.
    if (chain.nodes.size() - 1 > 4 * chain.n)
        throw Error("diam_connect: chain exceeds the 4n bound");
    for (std::size_t i = 0; i + 1 < chain.nodes.size(); ++i) {
        if (std::fabs(norm2(chain.nodes[i]) - 1.0) > 1e-7)
            throw Error("diam_connect: non-unit chain node");
        if (!near(hermitian(chain.nodes[i], chain.nodes[i + 1], k), l, 1e-7))
            throw Error("diam_connect: step inner product drifted");
    }
    return chain;
}

// ---------------------------------------------------------------------------
// Budget arithmetic
// ---------------------------------------------------------------------------

std::int64_t budget_c(std::int64_t k, std::int64_t k_const) {
    if (k <= 0) return 0;
    if (k <= 2) return k_const;
    if (k <= 4) return k_const + 55;
    return (k - 4) * (k_const + 56) + k_const + 55;
}

std::int64_t budget_d(std::int64_t k, std::int64_t k_const) {
    return budget_c((3 * k) / 2, k_const) + 4 + 6 * ((k + 2) / 2);
}

} // namespace c3geom
