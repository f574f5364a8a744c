#include "c3geom/geometry.hpp"

#include <cmath>
#include <sstream>

namespace c3geom {

Field field_of(GeomCase c) { return c == GeomCase::oo ? Field::Complex : Field::Real; }

Alg alg_a(GeomCase c) { return c == GeomCase::oo ? Alg::O : Alg::H; }

Alg alg_b(GeomCase c) { return c == GeomCase::hh ? Alg::H : Alg::O; }

const char* name(GeomCase c) {
    switch (c) {
        case GeomCase::hh: return "hh";
        case GeomCase::ho: return "ho";
        case GeomCase::oo: return "oo";
    }
    return "?";
}

int type_of(const Vertex& v) { return static_cast<int>(v.index()) + 1; }

GeomCase case_of(const Vertex& v) {
    return std::visit([](const auto& x) { return x.cse; }, v);
}

Element canonicalize_rep(const Element& u, Field k) {
    Element x = normalized(u);
    auto coords = pure_coordinates(x, k);
    for (const auto& lam : coords) {
        double m = lam.abs();
        if (m > kCanonThreshold) {
            return right_scale(x, lam.conj() * (1.0 / m));
        }
    }
    throw Error("canonicalize_rep: no significant coordinate (element not pure?)");
}

Point make_point(GeomCase c, const Element& rep) {
    if (rep.tag != alg_a(c)) throw Error("make_point: representative in the wrong algebra");
    if (!is_pure(rep, field_of(c), 1e-7)) throw Error("make_point: representative not k-pure");
    return Point{c, canonicalize_rep(rep, field_of(c))};
}

Line make_line(GeomCase c, const Element& a, const Element& b) {
    const Field k = field_of(c);
    if (a.tag != alg_a(c) || b.tag != alg_b(c)) throw Error("make_line: wrong algebras");
    if (!is_pure(a, k, 1e-7) || !is_pure(b, k, 1e-7)) throw Error("make_line: components not pure");
    double na = norm(a), nb = norm(b);
    if (na < 1e-9 || nb < 1e-9) throw Error("make_line: zero component");
    if (std::fabs(na - nb) > 1e-6 * (na + nb)) throw Error("make_line: |a| != |b|");
    Element ua = a * (1.0 / na);
    Element ub = b * (1.0 / nb);
    // Common unit scalar from a's first significant coordinate.
    auto coords = pure_coordinates(ua, k);
    for (const auto& lam : coords) {
        double m = lam.abs();
        if (m > kCanonThreshold) {
            KScalar s = lam.conj() * (1.0 / m);
            return Line{c, right_scale(ua, s), right_scale(ub, s)};
        }
    }
    throw Error("make_line: no significant coordinate");
}

Plane make_plane(GeomCase c, const Embedding& emb) {
    if (emb.source != alg_a(c) || emb.target != alg_b(c) || emb.k != field_of(c))
        throw Error("make_plane: embedding does not match the case");
    return Plane{c, emb};
}

bool point_equal(const Point& p, const Point& q, double tol) {
    return p.cse == q.cse && near(p.rep, q.rep, tol);
}

bool line_equal(const Line& l, const Line& m, double tol) {
    return l.cse == m.cse && near(l.a, m.a, tol) && near(l.b, m.b, tol);
}

bool plane_equal(const Plane& p, const Plane& q, double tol) {
    return p.cse == q.cse && embedding_near(p.emb, q.emb, tol);
}

bool vertex_equal(const Vertex& u, const Vertex& v, double tol) {
    if (u.index() != v.index()) return false;
    if (std::holds_alternative<Point>(u))
        return point_equal(std::get<Point>(u), std::get<Point>(v), tol);
    if (std::holds_alternative<Line>(u))
        return line_equal(std::get<Line>(u), std::get<Line>(v), tol);
    return plane_equal(std::get<Plane>(u), std::get<Plane>(v), tol);
}

std::string describe(const Vertex& v) {
    std::ostringstream os;
    os.precision(4);
    if (std::holds_alternative<Point>(v)) {
        const auto& p = std::get<Point>(v);
        os << "point<";
        for (std::size_t i = 0; i < p.rep.dim(); ++i) os << (i ? "," : "") << p.rep[i];
        os << ">";
    } else if (std::holds_alternative<Line>(v)) {
        const auto& l = std::get<Line>(v);
        os << "line[";
        for (std::size_t i = 0; i < l.a.dim(); ++i) os << (i ? "," : "") << l.a[i];
        os << " | ";
        for (std::size_t i = 0; i < l.b.dim(); ++i) os << (i ? "," : "") << l.b[i];
        os << "]";
    } else {
        os << "plane{" << name(std::get<Plane>(v).cse) << "}";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Incidence
// ---------------------------------------------------------------------------

namespace {

bool point_on_line(const Point& p, const Line& l, double tol) {
    return hermitian(p.rep, l.a, field_of(p.cse)).abs() <= tol;
}

bool line_on_plane(const Line& l, const Plane& pi, double tol) {
    return near(pi.emb.apply(l.a), l.b, tol);
}

} // namespace

bool incident(const Vertex& u, const Vertex& v, double tol) {
    if (case_of(u) != case_of(v)) throw Error("incident: mixed geometry cases");
    int tu = type_of(u), tv = type_of(v);
    if (tu == tv) return vertex_equal(u, v, tol);
    const Vertex& lo = (tu < tv) ? u : v;
    const Vertex& hi = (tu < tv) ? v : u;
    int a = std::min(tu, tv), b = std::max(tu, tv);
    if (a == 1 && b == 3) return true;  // flat: every point on every plane
    if (a == 1 && b == 2) return point_on_line(std::get<Point>(lo), std::get<Line>(hi), tol);
    return line_on_plane(std::get<Line>(lo), std::get<Plane>(hi), tol);
}

bool coplanar(const Line& l, const Line& m, double tol) {
    if (l.cse != m.cse) throw Error("coplanar: mixed geometry cases");
    const Field k = field_of(l.cse);
    return near(hermitian(l.a, m.a, k), hermitian(l.b, m.b, k), tol);
}

Plane common_plane(const Line& l, const Line& m, double tol) {
    if (!coplanar(l, m, tol)) throw Error("common_plane: lines are not coplanar");
    const Field k = field_of(l.cse);
    if (1.0 - hermitian(l.a, m.a, k).abs2() < 1e-10)
        throw Error("common_plane: proportional first components (same line or error)");
    return make_plane(l.cse, embed(l.a, m.a, l.b, m.b, k, tol));
}

namespace {

KMatrix gq_system(const Point& p, const Plane& pi, const Line& l) {
    const GeomCase c = p.cse;
    const Field k = field_of(c);
    Element defect = pi.emb.apply(l.a) - l.b;
    auto basis = pure_basis(alg_a(c), k);
    KMatrix m(2, basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        m.at(0, i) = hermitian(p.rep, basis[i], k);
        m.at(1, i) = hermitian(defect, pi.emb.apply(basis[i]), k);
    }
    return m;
}

} // namespace

Line gq_project(const Point& p, const Plane& pi, const Line& l, double tol, double cond_tol) {
    if (p.cse != pi.cse || p.cse != l.cse) throw Error("gq_project: mixed geometry cases");
    const Field k = field_of(p.cse);
    if (hermitian(p.rep, l.a, k).abs() > 1e-6) throw Error("gq_project: p is not on l");
    if (near(pi.emb.apply(l.a), l.b, tol)) throw Error("gq_project: l is incident with pi");
    KMatrix m = gq_system(p, pi, l);
    EliminationResult e = eliminate(m, cond_tol);
    if (e.rank != 2)
        throw Error("gq_project: system rank " + std::to_string(e.rank) +
                    ", degenerate below conditioning threshold");
    auto lam = null_vector(m, cond_tol);
    Element c_dir = from_pure_coordinates(alg_a(p.cse), k, lam);
    c_dir = normalized(c_dir);
    return make_line(p.cse, c_dir, pi.emb.apply(c_dir));
}

std::size_t gq_project_rank(const Point& p, const Plane& pi, const Line& l, double cond_tol) {
    return eliminate(gq_system(p, pi, l), cond_tol).rank;
}

std::pair<Element, Element> point_shadow(const Line& l) {
    auto basis = orthonormal_complete({l.a}, field_of(l.cse), alg_a(l.cse));
    return {basis[1], basis[2]};
}

std::pair<Element, Element> polar_line(const Point& p) {
    auto basis = orthonormal_complete({p.rep}, field_of(p.cse), alg_a(p.cse));
    return {basis[1], basis[2]};
}

Element unit_orthogonal_to(GeomCase c, const std::vector<Element>& constraints) {
    return unit_orthogonal_in(alg_a(c), field_of(c), constraints);
}

Element unit_orthogonal_to_b(GeomCase c, const std::vector<Element>& constraints) {
    return unit_orthogonal_in(alg_b(c), field_of(c), constraints);
}

Element join_direction(const Point& p, const Point& q) {
    if (p.cse != q.cse) throw Error("join_direction: mixed cases");
    const Field k = field_of(p.cse);
    if (1.0 - hermitian(p.rep, q.rep, k).abs2() < 1e-12)
        throw Error("join_direction: points coincide");
    return unit_orthogonal_to(p.cse, {p.rep, q.rep});
}

Line line_in_plane_through(const Plane& pi, const Point& p, const Point& q) {
    Element dir = join_direction(p, q);
    return make_line(pi.cse, dir, pi.emb.apply(dir));
}

Point meet_in_plane(const Line& l, const Line& m) {
    if (l.cse != m.cse) throw Error("meet_in_plane: mixed cases");
    const Field k = field_of(l.cse);
    if (1.0 - hermitian(l.a, m.a, k).abs2() < 1e-12)
        throw Error("meet_in_plane: lines share their point shadow");
    Element u = unit_orthogonal_to(l.cse, {l.a, m.a});
    return make_point(l.cse, u);
}

// ---------------------------------------------------------------------------
// Group action
// ---------------------------------------------------------------------------

AutoPair identity_auto(GeomCase c) {
    return {identity_embedding(alg_a(c), field_of(c)),
            identity_embedding(alg_b(c), field_of(c))};
}

AutoPair compose(const AutoPair& f, const AutoPair& g) {
    return {compose(f.alpha, g.alpha), compose(f.beta, g.beta)};
}

AutoPair inverse(const AutoPair& g) { return {g.alpha.inverse(), g.beta.inverse()}; }

namespace {

void check_automorphism(const Embedding& e, double tol) {
    if (!e.is_square()) throw Error("apply_auto: component map is not square");
    for (const auto& img : e.images)
        if (std::fabs(norm2(img) - 1.0) > tol)
            throw Error("apply_auto: component map does not preserve norms");
}

} // namespace

Point apply_auto(const AutoPair& g, const Point& p) {
    return make_point(p.cse, g.alpha.apply(p.rep));
}

Line apply_auto(const AutoPair& g, const Line& l) {
    return make_line(l.cse, g.alpha.apply(l.a), g.beta.apply(l.b));
}

Plane apply_auto(const AutoPair& g, const Plane& p, double tol) {
    check_automorphism(g.alpha, tol);
    check_automorphism(g.beta, tol);
    return make_plane(p.cse, compose(g.beta, compose(p.emb, g.alpha.inverse())));
}

Vertex apply_auto(const AutoPair& g, const Vertex& v, double tol) {
    check_automorphism(g.alpha, tol);
    check_automorphism(g.beta, tol);
    if (std::holds_alternative<Point>(v)) return apply_auto(g, std::get<Point>(v));
    if (std::holds_alternative<Line>(v)) return apply_auto(g, std::get<Line>(v));
    return apply_auto(g, std::get<Plane>(v), tol);
}

bool flag_valid(const Flag& f, double tol) {
    for (std::size_t i = 0; i < f.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < f.vertices.size(); ++j) {
            if (type_of(f.vertices[i]) == type_of(f.vertices[j])) return false;
            if (!incident(f.vertices[i], f.vertices[j], tol)) return false;
        }
    return true;
}

namespace {

struct MaximalFlag {
    Point p;
    Line l;
    Plane pi;
};

MaximalFlag split_flag(const Flag& f) {
    if (f.vertices.size() != 3) throw Error("flag_transporter: flag is not maximal");
    const Point* p = nullptr;
    const Line* l = nullptr;
    const Plane* pi = nullptr;
    for (const auto& v : f.vertices) {
        if (std::holds_alternative<Point>(v)) p = &std::get<Point>(v);
        if (std::holds_alternative<Line>(v)) l = &std::get<Line>(v);
        if (std::holds_alternative<Plane>(v)) pi = &std::get<Plane>(v);
    }
    if (!p || !l || !pi) throw Error("flag_transporter: flag is not maximal");
    return {*p, *l, *pi};
}

/// Extends an embedding H -> O to an automorphism of O along the first
/// orthonormal completion vector of its pure images.
Embedding extend_canonically(const Embedding& phi) {
    std::vector<Element> pure_images(phi.images.begin() + 1, phi.images.end());
    auto full = orthonormal_complete(pure_images, Field::Real, Alg::O);
    return extend_to_automorphism(phi, full[3]);
}

} // namespace

AutoPair flag_transporter(const Flag& f1, const Flag& f2, double tol) {
    MaximalFlag a = split_flag(f1);
    MaximalFlag b = split_flag(f2);
    if (a.p.cse != b.p.cse) throw Error("flag_transporter: mixed geometry cases");
    const GeomCase c = a.p.cse;
    const Field k = field_of(c);
    if (!flag_valid(f1, 1e-6) || !flag_valid(f2, 1e-6))
        throw Error("flag_transporter: input is not a flag");

    // alpha aligns the points and the line first components.
    Embedding alpha = embed(a.p.rep, a.l.a, b.p.rep, b.l.a, k, tol);

    // beta aligns the planes: beta = phi2 . alpha . phi1^{-1}, extended to
    // all of B through the doubling construction when dim_k B = 8.
    Embedding beta;
    if (dim(alg_b(c)) == dim(alg_a(c))) {
        beta = compose(b.pi.emb, compose(alpha, a.pi.emb.inverse()));
    } else {
        Embedding big1 = extend_canonically(a.pi.emb);
        Embedding big2 = extend_canonically(compose(b.pi.emb, alpha));
        beta = compose(big2, big1.inverse());
    }
    return {alpha, beta};
}

Embedding random_automorphism_a(GeomCase c, Rng& rng) {
    const Field k = field_of(c);
    const Alg A = alg_a(c);
    Element a1 = random_unit_pure(k, A, rng);
    Element a2 = unit_orthogonal_to(c, {a1, random_unit_pure(k, A, rng)});
    Element b1 = random_unit_pure(k, A, rng);
    Element b2 = unit_orthogonal_to(c, {b1, random_unit_pure(k, A, rng)});
    return embed(a1, a2, b1, b2, k);
}

Embedding random_automorphism_b(GeomCase c, Rng& rng) {
    const Field k = field_of(c);
    const Alg B = alg_b(c);
    auto pick_pair = [&](Element& x, Element& y) {
        x = random_unit_pure(k, B, rng);
        y = unit_orthogonal_in(B, k, {x, random_unit_pure(k, B, rng)});
    };
    Element a1, a2, b1, b2;
    pick_pair(a1, a2);
    pick_pair(b1, b2);
    if (dim(B) == dim(alg_a(c))) return embed(a1, a2, b1, b2, k);
    // G2 = Aut_R(O): an embedding H -> O extended along a random direction.
    Embedding phi = embed(Element::basis(Alg::H, 1), Element::basis(Alg::H, 2), b1, b2,
                          Field::Real);
    std::vector<Element> pure_images(phi.images.begin() + 1, phi.images.end());
    Element seedling = random_unit_pure(Field::Real, Alg::O, rng);
    Element g = unit_orthogonal_in(Alg::O, Field::Real,
                                 {pure_images[0], pure_images[1], pure_images[2], seedling});
    // Mix the seed direction in so the extension varies with the rng.
    Element raw = seedling;
    for (const auto& u : pure_images) raw -= u * bilinear(u, raw);
    if (norm(raw) > 1e-6) g = raw * (1.0 / norm(raw));
    return extend_to_automorphism(phi, g);
}

AutoPair random_auto(GeomCase c, Rng& rng) {
    return {random_automorphism_a(c, rng), random_automorphism_b(c, rng)};
}

// ---------------------------------------------------------------------------
// Random data
// ---------------------------------------------------------------------------

Point random_point(GeomCase c, Rng& rng) {
    return make_point(c, random_unit_pure(field_of(c), alg_a(c), rng));
}

Line random_line(GeomCase c, Rng& rng) {
    return make_line(c, random_unit_pure(field_of(c), alg_a(c), rng),
                     random_unit_pure(field_of(c), alg_b(c), rng));
}

Line random_line_through(const Point& p, Rng& rng) {
    Element dir = unit_orthogonal_to(p.cse, {p.rep, random_unit_pure(field_of(p.cse),
                                                                     alg_a(p.cse), rng)});
    return make_line(p.cse, dir, random_unit_pure(field_of(p.cse), alg_b(p.cse), rng));
}

Point random_point_on(const Line& l, Rng& rng) {
    Element u = unit_orthogonal_to(l.cse, {l.a, random_unit_pure(field_of(l.cse),
                                                                 alg_a(l.cse), rng)});
    return make_point(l.cse, u);
}

Plane random_plane(GeomCase c, Rng& rng) {
    const Field k = field_of(c);
    Element a = random_unit_pure(k, alg_a(c), rng);
    Element c2 = unit_orthogonal_to(c, {a, random_unit_pure(k, alg_a(c), rng)});
    Element b = random_unit_pure(k, alg_b(c), rng);
    Element d2 = unit_orthogonal_to_b(c, {b, random_unit_pure(k, alg_b(c), rng)});
    return make_plane(c, embed(a, c2, b, d2, k));
}

Plane random_plane_through(const Line& l, Rng& rng) {
    const Field k = field_of(l.cse);
    Element c2 = unit_orthogonal_to(l.cse, {l.a, random_unit_pure(k, alg_a(l.cse), rng)});
    Element d2 = unit_orthogonal_to_b(l.cse, {l.b, random_unit_pure(k, alg_b(l.cse), rng)});
    return make_plane(l.cse, embed(l.a, c2, l.b, d2, k));
}

Flag random_maximal_flag(GeomCase c, Rng& rng) {
    Plane pi = random_plane(c, rng);
    Element a = random_unit_pure(field_of(c), alg_a(c), rng);
    Line l = make_line(c, a, pi.emb.apply(a));
    Point p = random_point_on(l, rng);
    return Flag{{Vertex{p}, Vertex{l}, Vertex{pi}}};
}

// ---------------------------------------------------------------------------
// Residue verification
// ---------------------------------------------------------------------------

namespace {

void record_failure(ResidueReport& rep, const std::string& what) {
    ++rep.failures;
    if (rep.counterexample.empty()) rep.counterexample = what;
}

void verify_plane_residue(const Plane& pi, std::size_t samples, Rng& rng,
                          double tol, ResidueReport& rep) {
    const GeomCase c = pi.cse;
    for (std::size_t s = 0; s < samples; ++s) {
        // Two distinct points lie on exactly one line of the plane.
        Point p = random_point(c, rng);
        Point q = random_point(c, rng);
        if (point_equal(p, q, 1e-6)) continue;
        try {
            Line join = line_in_plane_through(pi, p, q);
            if (!incident(Vertex{p}, Vertex{join}, tol) ||
                !incident(Vertex{q}, Vertex{join}, tol) ||
                !incident(Vertex{join}, Vertex{pi}, tol)) {
                record_failure(rep, "join not incident: " + describe(Vertex{join}));
                continue;
            }
        } catch (const Error& e) {
            record_failure(rep, e.what());
            continue;
        }
        // Dually: two distinct lines of the plane meet in exactly one point.
        Element d1 = random_unit_pure(field_of(c), alg_a(c), rng);
        Element d2 = random_unit_pure(field_of(c), alg_a(c), rng);
        if (1.0 - hermitian(d1, d2, field_of(c)).abs2() < 1e-6) continue;
        Line l1 = make_line(c, d1, pi.emb.apply(d1));
        Line l2 = make_line(c, d2, pi.emb.apply(d2));
        try {
            Point meet = meet_in_plane(l1, l2);
            if (!incident(Vertex{meet}, Vertex{l1}, tol) ||
                !incident(Vertex{meet}, Vertex{l2}, tol))
                record_failure(rep, "meet not on both lines");
        } catch (const Error& e) {
            record_failure(rep, e.what());
        }
    }
}

void verify_line_residue(const Line& l, std::size_t samples, Rng& rng,
                         double tol, ResidueReport& rep) {
    // Generalized digon: every point of l is incident with every plane
    // through l.
    for (std::size_t s = 0; s < samples; ++s) {
        Point p = random_point_on(l, rng);
        Plane pi = random_plane_through(l, rng);
        if (!incident(Vertex{p}, Vertex{pi}, tol)) record_failure(rep, "digon axiom failed");
        if (!incident(Vertex{l}, Vertex{pi}, 1e-6))
            record_failure(rep, "constructed plane misses the line");
    }
}

void verify_point_residue(const Point& p, std::size_t samples, Rng& rng,
                          double tol, ResidueReport& rep) {
    const GeomCase c = p.cse;
    for (std::size_t s = 0; s < samples; ++s) {
        Plane pi = random_plane(c, rng);
        Line l = random_line_through(p, rng);
        if (incident(Vertex{l}, Vertex{pi}, 1e-6)) continue;
        try {
            Line sol = gq_project(p, pi, l, tol);
            std::size_t rank = gq_project_rank(p, pi, l);
            if (rank != 2) {
                record_failure(rep, "gq system rank " + std::to_string(rank));
                continue;
            }
            bool ok = incident(Vertex{p}, Vertex{sol}, 1e-6) &&
                      incident(Vertex{sol}, Vertex{pi}, 1e-6) && coplanar(sol, l, 1e-6);
            if (!ok) record_failure(rep, "gq solution fails re-checks");
        } catch (const Error& e) {
            record_failure(rep, e.what());
        }
    }
}

} // namespace

ResidueReport verify_residue(const Vertex& v, std::size_t samples, Rng& rng, double tol) {
    ResidueReport rep;
    rep.vertex_type = type_of(v);
    rep.samples = samples;
    if (std::holds_alternative<Plane>(v))
        verify_plane_residue(std::get<Plane>(v), samples, rng, tol, rep);
    else if (std::holds_alternative<Line>(v))
        verify_line_residue(std::get<Line>(v), samples, rng, tol, rep);
    else
        verify_point_residue(std::get<Point>(v), samples, rng, tol, rep);
    return rep;
}

} // namespace c3geom
