#include "c3geom/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace c3geom {

const char* name(Suite s) {
    switch (s) {
        case Suite::algebra: return "algebra";
        case Suite::geometry: return "geometry";
        case Suite::covering: return "covering";
        case Suite::homotopy: return "homotopy";
    }
    return "?";
}

void validate(const RunConfig& cfg) {
    if (cfg.samples < 1) throw Error("config: samples must be at least one");
    if (!(cfg.tolerance > 0.0)) throw Error("config: tolerance must be positive");
    if (cfg.k_budget < 60) throw Error("config: k_budget below the smallest macro budget");
    for (Suite s : cfg.suites)
        if (s == Suite::covering && cfg.cse != GeomCase::hh)
            throw Error("config: the covering suite applies to case hh only");
}

bool Report::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::vector<bool> Report::pass_vector() const {
    std::vector<bool> v;
    v.reserve(checks.size());
    for (const auto& c : checks) v.push_back(c.passed);
    return v;
}

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Checker {
    Report& rep;
    CheckRecord cur;

    void begin(const std::string& name, std::size_t samples) {
        cur = CheckRecord{};
        cur.name = name;
        cur.passed = true;
        cur.samples = samples;
    }
    void observe(double err, double limit, const std::string& what) {
        cur.max_error = std::max(cur.max_error, err);
        if (err > limit && cur.passed) {
            cur.passed = false;
            cur.counterexample = what + " (error " + fmt17(err) + ")";
        } else if (err > limit) {
            cur.passed = false;
        }
    }
    void require(bool ok, const std::string& what) {
        if (!ok && cur.passed) {
            cur.passed = false;
            cur.counterexample = what;
        } else if (!ok) {
            cur.passed = false;
        }
    }
    void end() { rep.checks.push_back(cur); }
};

Element random_element(Alg t, Rng& rng) {
    Element x(t);
    for (std::size_t i = 0; i < dim(t); ++i) x.c[i] = rng.gaussian();
    return x;
}

KScalar random_unit_scalar(Field k, Rng& rng) {
    if (k == Field::Real) return rng.below(2) ? KScalar::one() : KScalar{-1.0};
    double th = rng.uniform(0.0, 6.283185307179586);
    return {std::cos(th), std::sin(th)};
}

} // namespace

// ---------------------------------------------------------------------------
// Algebra suite
// ---------------------------------------------------------------------------

void run_algebra_suite(const RunConfig& cfg, Report& rep) {
    Rng rng(derive_seed(cfg.seed, std::string("algebra:") + name(cfg.cse)));
    Checker ck{rep, {}};
    const Field k = field_of(cfg.cse);
    const std::vector<Alg> algebras{alg_a(cfg.cse), alg_b(cfg.cse)};
    const double tol = cfg.tolerance;

    ck.begin("composition_law", cfg.samples);
    for (Alg t : {Alg::R, Alg::C, Alg::H, Alg::O}) {
        for (std::size_t s = 0; s < cfg.samples; ++s) {
            Element x = random_element(t, rng), y = random_element(t, rng);
            double lhs = norm2(mul(x, y));
            double rhs = norm2(x) * norm2(y);
            ck.observe(std::fabs(lhs - rhs) / (1.0 + rhs), tol,
                       std::string("|xy|^2 != |x|^2|y|^2 in ") + name(t));
        }
    }
    ck.end();

    ck.begin("conjugation_antiautomorphism", cfg.samples);
    for (Alg t : algebras)
        for (std::size_t s = 0; s < cfg.samples; ++s) {
            Element x = random_element(t, rng), y = random_element(t, rng);
            ck.observe(norm(conj(mul(x, y)) - mul(conj(y), conj(x))) /
                           (1.0 + norm(x) * norm(y)),
                       tol, "conj(xy) != conj(y) conj(x)");
        }
    ck.end();

    ck.begin("hermitian_properties", cfg.samples);
    for (Alg t : algebras) {
        for (std::size_t s = 0; s < cfg.samples; ++s) {
            Element x = random_element(t, rng), y = random_element(t, rng);
            KScalar h = hermitian(x, y, k);
            ck.observe(std::fabs(h.re - bilinear(x, y)), tol * (1.0 + norm(x) * norm(y)),
                       "Re(x|y) != <x,y>");
            ck.observe(std::fabs(hermitian(x, x, k).re - norm2(x)), tol * (1.0 + norm2(x)),
                       "(x|x) != |x|^2");
            ck.observe(std::fabs(hermitian(x, x, k).im), tol, "(x|x) not real");
            double cs = h.abs() - norm(x) * norm(y);
            ck.require(cs <= tol * (1.0 + norm(x) * norm(y)), "Cauchy-Schwarz violated");
            // Sesquilinearity in both slots.
            KScalar l = random_unit_scalar(k, rng);
            ck.observe((hermitian(x, right_scale(y, l), k) - h * l).abs(),
                       1e2 * tol * (1.0 + norm(x) * norm(y)), "(x|y l) != (x|y) l");
            ck.observe((hermitian(right_scale(x, l), y, k) - l.conj() * h).abs(),
                       1e2 * tol * (1.0 + norm(x) * norm(y)), "(x l|y) != conj(l)(x|y)");
        }
        // Equality case of Cauchy-Schwarz with constructed dependent pairs.
        for (std::size_t s = 0; s < cfg.samples; ++s) {
            Element x = random_element(t, rng);
            if (norm(x) < 1e-3) continue;
            KScalar l = random_unit_scalar(k, rng) * rng.uniform(0.25, 2.0);
            Element y = right_scale(x, l);
            ck.observe(std::fabs(hermitian(x, y, k).abs() - norm(x) * norm(y)),
                       1e2 * tol * (1.0 + norm2(x)), "CS equality fails for y = x l");
        }
    }
    ck.end();

    ck.begin("k_decompose_idempotent", cfg.samples);
    for (Alg t : algebras)
        for (std::size_t s = 0; s < cfg.samples; ++s) {
            Element x = random_element(t, rng);
            KDecomp d = k_decompose(x, k);
            KDecomp dd = k_decompose(d.pure, k);
            ck.observe(std::fabs(dd.k_part.re) + std::fabs(dd.k_part.im), tol,
                       "pure part has a k component");
            ck.observe(norm(dd.pure - d.pure), tol, "k_decompose not idempotent");
            Element back = scalar_element(t, d.k_part) + d.pure;
            ck.observe(norm(back - x), tol, "decomposition does not reassemble");
        }
    ck.end();

    ck.begin("embed_multiplicative", cfg.samples);
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        Element a = random_unit_pure(k, alg_a(cfg.cse), rng);
        Element c = unit_orthogonal_to(cfg.cse, {a, random_unit_pure(k, alg_a(cfg.cse), rng)});
        Element b = random_unit_pure(k, alg_b(cfg.cse), rng);
        Element d = unit_orthogonal_to_b(cfg.cse, {b, random_unit_pure(k, alg_b(cfg.cse), rng)});
        Embedding phi = embed(a, c, b, d, k);
        ck.observe(norm(phi.apply(a) - b), 1e-8, "phi(a) != b");
        ck.observe(norm(phi.apply(c) - d), 1e-8, "phi(c) != d");
        ck.observe(multiplicativity_defect(phi, 4, rng), 1e-8, "phi not multiplicative");
    }
    ck.end();

    if (cfg.cse == GeomCase::ho) {
        ck.begin("doubling_extension", cfg.samples);
        for (std::size_t s = 0; s < cfg.samples; ++s) {
            Element b = random_unit_pure(k, Alg::O, rng);
            Element d = unit_orthogonal_to_b(cfg.cse, {b, random_unit_pure(k, Alg::O, rng)});
            Embedding phi = embed(Element::basis(Alg::H, 1), Element::basis(Alg::H, 2), b, d, k);
            std::vector<Element> pure_images(phi.images.begin() + 1, phi.images.end());
            Element g = unit_orthogonal_in(Alg::O, Field::Real, pure_images);
            Embedding psi = extend_to_automorphism(phi, g);
            ck.observe(multiplicativity_defect(psi, 4, rng), 1e-8,
                       "doubling extension not multiplicative");
        }
        ck.end();
    }

    if (k == Field::Complex) {
        ck.begin("scalar_commutation", cfg.samples);
        for (std::size_t s = 0; s < cfg.samples; ++s) {
            Element e = random_unit_pure(k, Alg::O, rng);
            KScalar l = random_unit_scalar(k, rng);
            Element lhs = mul(scalar_element(Alg::O, l), e);
            Element rhs = mul(e, scalar_element(Alg::O, l.conj()));
            ck.observe(norm(lhs - rhs), tol, "l e != e conj(l)");
        }
        ck.end();

        ck.begin("pure_complement_stable", cfg.samples);
        for (std::size_t s = 0; s < cfg.samples; ++s) {
            Element e = random_unit_pure(k, Alg::O, rng);
            Element rotated = mul(e, Element::basis(Alg::O, 1));
            ck.observe(std::fabs(rotated.c[0]) + std::fabs(rotated.c[1]), tol,
                       "right multiplication by e1 leaves Pu_C(O)");
        }
        ck.end();
    }
}

// ---------------------------------------------------------------------------
// Geometry suite
// ---------------------------------------------------------------------------

void run_geometry_suite(const RunConfig& cfg, Report& rep) {
    Rng rng(derive_seed(cfg.seed, std::string("geometry:") + name(cfg.cse)));
    Checker ck{rep, {}};
    const GeomCase c = cfg.cse;
    const Field k = field_of(c);
    const double tol = cfg.tolerance;

    ck.begin("canonicalization_idempotent", cfg.samples);
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        Point p = random_point(c, rng);
        ck.observe(norm(make_point(c, p.rep).rep - p.rep), tol, "point canon not idempotent");
        Line l = random_line(c, rng);
        Line l2 = make_line(c, l.a, l.b);
        ck.observe(norm(l2.a - l.a) + norm(l2.b - l.b), tol, "line canon not idempotent");
    }
    ck.end();

    ck.begin("coplanarity_scalar_invariant", cfg.samples);
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        Line l = random_line(c, rng), m = random_line(c, rng);
        KScalar sc = random_unit_scalar(k, rng);
        Line m2 = make_line(c, right_scale(m.a, sc), right_scale(m.b, sc));
        ck.require(coplanar(l, m, 1e-6) == coplanar(l, m2, 1e-6),
                   "rescaling changed coplanarity");
        ck.require(line_equal(m2, m, 1e-6), "rescaled line is a different line");
    }
    ck.end();

    ck.begin("common_plane_contains_both", cfg.samples);
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        // Manufacture a coplanar pair: match the inner products.
        Line l = random_line(c, rng);
        Element cdir = random_unit_pure(k, alg_a(c), rng);
        if (1.0 - hermitian(l.a, cdir, k).abs2() < 1e-6) continue;
        KScalar mu = hermitian(l.a, cdir, k);
        Element w = unit_orthogonal_to_b(c, {l.b});
        Element d = right_scale(l.b, mu) + w * std::sqrt(std::max(0.0, 1.0 - mu.abs2()));
        Line m = make_line(c, cdir, d);
        ck.require(coplanar(l, m, 1e-7), "constructed pair not coplanar");
        Plane pi = common_plane(l, m);
        ck.require(incident(Vertex{l}, Vertex{pi}, 1e-7) && incident(Vertex{m}, Vertex{pi}, 1e-7),
                   "common plane misses a line");
    }
    ck.end();

    ck.begin("gq_project_unique_solution", cfg.samples);
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        Point p = random_point(c, rng);
        Plane pi = random_plane(c, rng);
        Line l = random_line_through(p, rng);
        if (incident(Vertex{l}, Vertex{pi}, 1e-6)) continue;
        Line sol = gq_project(p, pi, l, tol);
        ck.require(gq_project_rank(p, pi, l) == 2, "gq system rank is not two");
        ck.require(incident(Vertex{p}, Vertex{sol}, 1e-6), "solution misses p");
        ck.require(incident(Vertex{sol}, Vertex{pi}, 1e-6), "solution misses pi");
        ck.require(coplanar(sol, l, 1e-6), "solution not coplanar with l");
        Line again = gq_project(p, pi, l, tol);
        ck.require(line_equal(sol, again, 1e-9), "gq_project not deterministic");
    }
    ck.end();

    const std::size_t residue_samples = std::max<std::size_t>(8, cfg.samples / 8);
    ck.begin("residue_axioms", residue_samples * 3);
    {
        ResidueReport r3 = verify_residue(Vertex{random_plane(c, rng)}, residue_samples, rng);
        ck.require(r3.passed(), "plane residue: " + r3.counterexample);
        ResidueReport r2 = verify_residue(Vertex{random_line(c, rng)}, residue_samples, rng);
        ck.require(r2.passed(), "line residue: " + r2.counterexample);
        ResidueReport r1 = verify_residue(Vertex{random_point(c, rng)}, residue_samples, rng);
        ck.require(r1.passed(), "point residue: " + r1.counterexample);
    }
    ck.end();

    ck.begin("collinearity_witness", cfg.samples);
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        Point p = random_point(c, rng);
        Line l = random_line(c, rng);
        Point q = random_point_on(l, rng);
        if (point_equal(p, q, 1e-6)) continue;
        Element dir = unit_orthogonal_to(c, {p.rep, q.rep});
        ck.observe(hermitian(dir, p.rep, k).abs() + hermitian(dir, q.rep, k).abs(), 1e-7,
                   "join direction not orthogonal to both points");
    }
    ck.end();

    ck.begin("action_preserves_structure", std::max<std::size_t>(8, cfg.samples / 4));
    for (std::size_t s = 0; s < std::max<std::size_t>(8, cfg.samples / 4); ++s) {
        AutoPair g = random_auto(c, rng);
        Line l = random_line(c, rng);
        Point p = make_point(c, unit_orthogonal_to(c, {l.a, random_unit_pure(k, alg_a(c), rng)}));
        ck.require(incident(Vertex{p}, Vertex{l}, 1e-7), "sample construction failed");
        Vertex gp = apply_auto(g, Vertex{p});
        Vertex gl = apply_auto(g, Vertex{l});
        ck.require(incident(gp, gl, 1e-6), "action broke point-line incidence");
        Line m = random_line(c, rng);
        Vertex gm = apply_auto(g, Vertex{m});
        ck.require(coplanar(l, m, 1e-6) ==
                       coplanar(std::get<Line>(gl), std::get<Line>(gm), 1e-6),
                   "action broke coplanarity");
        KScalar before = hermitian(l.b, m.b, k);
        KScalar after = hermitian(std::get<Line>(gl).b, std::get<Line>(gm).b, k);
        // Canonical rescaling multiplies by unit scalars only.
        ck.observe(std::fabs(before.abs() - after.abs()), 1e-6,
                   "action changed the Hermitian modulus");
        AutoPair gi = inverse(g);
        Vertex back = apply_auto(gi, gp);
        ck.require(vertex_equal(back, Vertex{p}, 1e-6), "inverse does not undo the action");
    }
    ck.end();

    ck.begin("flag_transporter", std::max<std::size_t>(8, cfg.samples / 4));
    for (std::size_t s = 0; s < std::max<std::size_t>(8, cfg.samples / 4); ++s) {
        Flag f1 = random_maximal_flag(c, rng);
        Flag f2 = random_maximal_flag(c, rng);
        AutoPair g = flag_transporter(f1, f2);
        for (std::size_t i = 0; i < 3; ++i) {
            Vertex moved = apply_auto(g, f1.vertices[i]);
            bool found = false;
            for (const auto& v : f2.vertices)
                if (type_of(v) == type_of(moved)) found = vertex_equal(moved, v, 1e-5);
            ck.require(found, "transporter misses the target flag");
        }
    }
    ck.end();
}

// ---------------------------------------------------------------------------
// Covering suite
// ---------------------------------------------------------------------------

void run_covering_suite(const RunConfig& cfg, Report& rep) {
    Rng rng(derive_seed(cfg.seed, "covering"));
    Checker ck{rep, {}};

    ck.begin("q_preserved", cfg.samples);
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        QuadricPoint p = random_quadric_point(rng);
        Isoclinic g = random_isoclinic(rng);
        ck.observe(std::fabs(quadric_q(isoclinic_apply(g, p.x)) - quadric_q(p.x)), 1e-12,
                   "h_act drifted off the quadric");
        QuadricPoint gp = h_act(g, p);
        QuadricPoint back = h_act(inverse(g), gp);
        // Projective reps may flip sign; compare through the canonical form.
        ck.require(quadric_equal(back, p, 1e-7), "group law failed");
    }
    ck.end();

    ck.begin("free_action", cfg.samples);
    {
        FreenessReport fr = free_action_check(cfg.samples, rng, 1e-3);
        ck.require(fr.passed(), fr.note);
        ck.require(fr.min_abs_b >= 0.5 * 1e-3, "B minimum below delta/2");
        rep.extras["covering.min_abs_b"] = fmt17(fr.min_abs_b);
        rep.extras["covering.max_q_drift"] = fmt17(fr.max_q_drift);
        rep.extras["covering.max_frame_error"] = fmt17(fr.max_frame_error);
    }
    ck.end();

    // Sharp freeness: no non-identity left isoclinic rotation fixes any
    // point of the quadric (both blocks of a canonical representative are
    // nonzero, so even -1 moves every point).
    ck.begin("stabilizer_trivial", cfg.samples);
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        QuadricPoint p = random_quadric_point(rng);
        Isoclinic g = random_isoclinic(rng, 1.0 - 1e-3);
        ck.require(!quadric_equal(h_act(g, p), p, 1e-6),
                   "non-identity element fixed a point");
        Isoclinic one{{1.0, 0.0, 0.0, 0.0}};
        ck.require(quadric_equal(h_act(one, p), p, 1e-9), "identity moved a point");
    }
    ck.end();
}

// ---------------------------------------------------------------------------
// Homotopy suite
// ---------------------------------------------------------------------------

void run_homotopy_suite(const RunConfig& cfg, Report& rep) {
    Rng rng(derive_seed(cfg.seed, std::string("homotopy:") + name(cfg.cse)));
    Checker ck{rep, {}};
    const GeomCase c = cfg.cse;
    const Field k = field_of(c);
    HomotopyOptions opts;
    opts.k_budget = cfg.k_budget;
    const std::size_t n_exp = std::max<std::size_t>(8, cfg.samples / 2);

    ck.begin("eliminate_planes_budget", n_exp);
    for (std::size_t s = 0; s < n_exp; ++s) {
        EdgePath p = random_loop(c, rng, 8, true);
        std::size_t klen = p.length();
        auto r = eliminate_planes(p);
        ck.require(r.log.size() <= 3 * (klen / 2), "log exceeds 3 floor(k/2)");
        ck.require(r.result.length() <= (3 * klen) / 2, "length exceeds floor(3k/2)");
        for (const auto& v : r.result.v) ck.require(type_of(v) != 3, "plane survived");
        ck.require(path_equal(replay(p, r.log), r.result), "replay mismatch");
    }
    ck.end();

    ck.begin("orthogonalize_budget", n_exp);
    for (std::size_t s = 0; s < n_exp; ++s) {
        PrimitivePath pp = random_primitive(c, rng, false);
        auto r = orthogonalize_primitive(pp);
        ck.require(r.log.size() <= 12, "more than 12 moves");
        ck.observe(hermitian(r.result.x.rep, r.result.y.rep, k).abs(), 1e-7,
                   "output points not orthogonal");
        ck.require(path_equal(replay(to_path(pp), r.log), to_path(r.result)),
                   "replay mismatch");
    }
    ck.end();

    ck.begin("pinch_budget", n_exp);
    std::size_t pinched = 0;
    for (std::size_t s = 0; s < n_exp; ++s) {
        // Build (x, L, y, M, z) plus a line L' through x coplanar with L.
        PrimitivePath pp = random_primitive(c, rng, false);
        EdgePath gamma = to_path(pp);
        gamma.v[4] = Vertex{random_point_on(pp.m, rng)};
        if (vertex_equal(gamma.v[4], gamma.v[2], 1e-6) ||
            vertex_equal(gamma.v[4], gamma.v[0], 1e-6))
            continue;
        Element e = unit_orthogonal_to(c, {pp.x.rep, random_unit_pure(k, alg_a(c), rng)});
        KScalar kap = hermitian(e, pp.l.a, k);
        if (1.0 - kap.abs2() < 1e-6) continue;
        Element w = unit_orthogonal_to_b(c, {pp.l.b});
        Element f = right_scale(pp.l.b, kap.conj()) + w * std::sqrt(1.0 - kap.abs2());
        Line lp = make_line(c, e, f);
        if (line_equal(lp, pp.l, 1e-6)) continue;
        WithLog<EdgePath> r{{}, {}};
        try {
            r = pinch(gamma, lp);
        } catch (const Error&) {
            continue;  // measure-zero degeneracies are skipped, not counted
        }
        ++pinched;
        ck.require(r.log.size() == 12, "pinch is not exactly 12 moves");
        ck.require(line_equal(std::get<Line>(r.result.v[1]), lp, 1e-7),
                   "output first line is not L'");
        ck.require(vertex_equal(r.result.v[0], gamma.v[0], 1e-9) &&
                       vertex_equal(r.result.v[4], gamma.v[4], 1e-9),
                   "endpoints moved");
        ck.require(path_equal(replay(gamma, r.log), r.result), "replay mismatch");
    }
    ck.require(pinched * 2 >= n_exp, "too many degenerate pinch samples");
    ck.end();

    if (k == Field::Complex) {
        ck.begin("pl_reduce_invariant", n_exp);
        for (std::size_t s = 0; s < n_exp; ++s) {
            double th = rng.uniform(0.3, 5.9);
            KScalar l{std::cos(th), std::sin(th)};
            PrimitivePath pp = random_primitive(c, rng, true);
            // Force the invariant to l: the second line is [g, b l].
            Line m2 = make_line(c, pp.l.a, right_scale(pp.l.b, l));
            PrimitivePath forced = make_primitive(pp.x, pp.l, pp.y, m2);
            auto r = pl_reduce(forced, l);
            ck.require(r.log.size() == 12, "pl_reduce is not 12 moves");
            KScalar out = pl_invariant(r.result);
            ck.observe((out - KScalar{l.re, 0.0}).abs(), cfg.tolerance * 1e3,
                       "output invariant is not Re(l)");
            ck.require(path_equal(replay(to_path(forced), r.log), to_path(r.result)),
                       "replay mismatch");
        }
        ck.end();
    }

    ck.begin("diam_connect_chains", n_exp);
    std::size_t max_n = 0;
    for (std::size_t s = 0; s < n_exp; ++s) {
        double mod = rng.uniform(0.05, 0.8);
        KScalar l = random_unit_scalar(k, rng) * mod;
        Element b = random_unit_pure(k, alg_b(c), rng);
        Element cc = random_unit_pure(k, alg_b(c), rng);
        DiamChain chain = diam_connect(b, cc, l, k);
        max_n = std::max(max_n, chain.n);
        ck.require(chain.nodes.size() - 1 <= 4 * chain.n, "chain longer than 4n");
        ck.require(near(chain.nodes.front(), b, 1e-9) && near(chain.nodes.back(), cc, 1e-9),
                   "chain endpoints wrong");
        for (std::size_t i = 0; i + 1 < chain.nodes.size(); ++i)
            ck.observe((hermitian(chain.nodes[i], chain.nodes[i + 1], k) - l).abs(),
                       cfg.tolerance * 10, "step inner product drifted");
    }
    rep.extras["homotopy.diam_max_n"] = std::to_string(max_n);
    ck.end();

    ck.begin("budget_identities", 64);
    for (std::int64_t kc : {0LL, 1LL, 7LL, 100LL, 1000LL}) {
        ck.require(budget_c(0, kc) == 0, "C(0) != 0");
        ck.require(budget_c(2, kc) == kc, "C(2) != K");
        ck.require(budget_c(4, kc) == kc + 55, "C(4) != K+55");
        for (std::int64_t kk = 6; kk <= 64; ++kk)
            ck.require(budget_c(kk, kc) == (kk - 4) * (kc + 56) + kc + 55,
                       "C(k) formula mismatch");
        for (std::int64_t kk = 0; kk <= 64; ++kk)
            ck.require(budget_d(kk, kc) ==
                           budget_c((3 * kk) / 2, kc) + 4 + 6 * ((kk + 2) / 2),
                       "D(k) formula mismatch");
    }
    ck.end();

    // reduce experiments: homotopic pairs built by applying random moves.
    ck.begin("reduce_derived_pairs", n_exp);
    std::size_t k_emp = 0;
    std::size_t max_log = 0;
    for (std::size_t s = 0; s < n_exp; ++s) {
        EdgePath p = random_loop(c, rng, 6, false);
        EdgePath q = p;
        std::size_t nmoves = 1 + rng.below(5);
        for (std::size_t t = 0; t < nmoves && q.length() + 2 <= 10; ++t) {
            try {
                q = apply_move(q, random_move(q, rng));
            } catch (const Error&) {
                break;
            }
        }
        auto r = reduce(p, q, opts);
        ck.require(r.result.success, "reduce failed: " + r.result.failure);
        if (r.result.success) {
            std::int64_t kk = static_cast<std::int64_t>(std::max(p.length(), q.length()));
            ck.require(static_cast<std::int64_t>(r.log.size()) <=
                           budget_d(kk, static_cast<std::int64_t>(cfg.k_budget)),
                       "log exceeds D(k)");
            max_log = std::max(max_log, r.log.size());
            k_emp = std::max(k_emp, r.result.k_emp);
            if (s < 4) {
                std::ostringstream nm;
                nm << "reduce_derived_" << s;
                std::ostringstream body;
                for (const auto& v : p.v) body << "# source " << serialize(v) << "\n";
                body << serialize(r.log);
                rep.move_logs.emplace_back(nm.str(), body.str());
                rep.move_counts.push_back({nm.str(), r.log.size()});
            }
        }
    }
    rep.extras["homotopy.reduce_derived_max_log"] = std::to_string(max_log);
    rep.extras["homotopy.reduce_budget_d10"] =
        std::to_string(budget_d(10, static_cast<std::int64_t>(cfg.k_budget)));
    ck.end();

    // Independent random pairs: successes are not guaranteed (the primitive
    // contraction falls back to a bounded search); rates are reported.
    {
        std::size_t wins = 0, tries = std::max<std::size_t>(4, n_exp / 4);
        std::size_t max_log2 = 0;
        for (std::size_t s = 0; s < tries; ++s) {
            EdgePath p = random_loop(c, rng, 8, false);
            EdgePath q = random_loop_at(std::get<Point>(p.v.front()), rng, 8);
            auto r = reduce(p, q, opts);
            if (r.result.success) {
                ++wins;
                max_log2 = std::max(max_log2, r.log.size());
                k_emp = std::max(k_emp, r.result.k_emp);
            }
        }
        rep.extras["homotopy.reduce_independent_success"] =
            std::to_string(wins) + "/" + std::to_string(tries);
        rep.extras["homotopy.reduce_independent_max_log"] = std::to_string(max_log2);
    }
    rep.extras["homotopy.k_emp"] = std::to_string(k_emp);
}

// ---------------------------------------------------------------------------
// Runner and report formatting
// ---------------------------------------------------------------------------

Report run(const RunConfig& cfg) {
    validate(cfg);
    Report rep;
    rep.config = cfg;
    std::vector<Suite> suites = cfg.suites;
    if (suites.empty()) {
        suites = {Suite::algebra, Suite::geometry, Suite::homotopy};
        if (cfg.cse == GeomCase::hh) suites.push_back(Suite::covering);
    }
    auto t0 = std::chrono::steady_clock::now();
    for (Suite s : suites) {
        switch (s) {
            case Suite::algebra: run_algebra_suite(cfg, rep); break;
            case Suite::geometry: run_geometry_suite(cfg, rep); break;
            case Suite::covering: run_covering_suite(cfg, rep); break;
            case Suite::homotopy: run_homotopy_suite(cfg, rep); break;
        }
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string format_report(const Report& rep) {
    std::ostringstream os;
    os << "c3geom verification report\n";
    os << "case = " << name(rep.config.cse) << "\n";
    os << "seed = " << rep.config.seed << "\n";
    os << "samples = " << rep.config.samples << "\n";
    os << "tolerance = " << fmt17(rep.config.tolerance) << "\n";
    os << "k_budget = " << rep.config.k_budget << "\n";
    os << "suites =";
    if (rep.config.suites.empty()) {
        os << " all";
    } else {
        for (Suite s : rep.config.suites) os << " " << name(s);
    }
    os << "\n\n[checks]\n";
    for (const auto& c : rep.checks) {
        os << c.name << " = " << (c.passed ? "pass" : "FAIL") << " samples=" << c.samples
           << " max_error=" << fmt17(c.max_error);
        if (!c.counterexample.empty()) os << " note=\"" << c.counterexample << "\"";
        os << "\n";
    }
    if (!rep.move_counts.empty()) {
        os << "\n[move counts]\n";
        for (const auto& mc : rep.move_counts) os << mc.name << " = " << mc.count << "\n";
    }
    if (!rep.extras.empty()) {
        os << "\n[statistics]\n";
        for (const auto& [key, value] : rep.extras) os << key << " = " << value << "\n";
    }
    os << "\nsummary\n";
    os << "checks_total = " << rep.checks.size() << "\n";
    std::size_t passed = 0;
    for (const auto& c : rep.checks) passed += c.passed ? 1 : 0;
    os << "checks_passed = " << passed << "\n";
    os << "result = " << (rep.all_passed() ? "PASS" : "FAIL") << "\n";
    os << "wall_seconds = " << fmt17(rep.wall_seconds) << "\n";
    return os.str();
}

} // namespace c3geom
