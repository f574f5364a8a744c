#include <doctest.h>

#include <cmath>

#include "c3geom/homotopy.hpp"

using namespace c3geom;

namespace {

/// A valid length-six point-line loop whose first third is exactly the
/// comparison target used by shorten: (x0, M, y, L3, x2, L3, x0) where L3
/// joins x0, y, x2 and M is the deterministic join of x0 and y.
EdgePath structured_hexagon(GeomCase c, Rng& rng) {
    const Field k = field_of(c);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Point x0 = random_point(c, rng);
        Point x2 = random_point(c, rng);
        if (point_equal(x0, x2, 1e-4)) continue;
        Element dir3 = unit_orthogonal_to(c, {x0.rep, x2.rep});
        Line l3 = make_line(c, dir3, random_unit_pure(k, alg_b(c), rng));
        Element y_dir = unit_orthogonal_in(alg_a(c), k, {l3.a, x0.rep});
        Point y = make_point(c, y_dir);
        if (point_equal(y, x2, 1e-4) || point_equal(y, x0, 1e-4)) continue;
        Element m_dir = unit_orthogonal_in(alg_a(c), k, {x0.rep, y.rep});
        Line m = make_line(c, m_dir, pure_basis(alg_b(c), k).front());
        EdgePath p;
        p.cse = c;
        p.v = {Vertex{x0}, Vertex{m}, Vertex{y}, Vertex{l3}, Vertex{x2}, Vertex{l3},
               Vertex{x0}};
        if (!path_valid(p)) continue;
        return p;
    }
    throw Error("structured_hexagon: sampling failed");
}

} // namespace

TEST_CASE("apply_move: all four kinds with inverses") {
    Rng rng(51);
    const GeomCase c = GeomCase::hh;
    Point x = random_point(c, rng);
    Line l = random_line_through(x, rng);
    Point y = random_point_on(l, rng);
    EdgePath base;
    base.cse = c;
    base.v = {Vertex{x}};

    SUBCASE("insert then remove a backtrack") {
        Move ins{MoveKind::insert_backtrack, 0, Vertex{l}};
        EdgePath p1 = apply_move(base, ins);
        REQUIRE(p1.v.size() == 3);
        CHECK(vertex_equal(p1.v[1], Vertex{l}));
        EdgePath p0 = apply_move(p1, invert(ins));
        CHECK(path_equal(p0, base));
    }
    SUBCASE("expand then contract an edge") {
        EdgePath p1 = apply_move(base, Move{MoveKind::insert_backtrack, 0, Vertex{l}});
        // (x, l, x): expand the (x, l) edge with a plane through l.
        Plane pi = random_plane_through(l, rng);
        Move exp{MoveKind::expand_edge, 0, Vertex{pi}};
        EdgePath p2 = apply_move(p1, exp);
        REQUIRE(p2.v.size() == 4);
        CHECK(vertex_equal(p2.v[1], Vertex{pi}));
        CHECK(path_equal(apply_move(p2, invert(exp)), p1));
    }
    SUBCASE("non-flag witnesses and bad indices are rejected") {
        EdgePath p1 = apply_move(base, Move{MoveKind::insert_backtrack, 0, Vertex{l}});
        Point z = random_point(c, rng);
        if (!incident(Vertex{z}, Vertex{l}, 1e-9))
            CHECK_THROWS_AS(apply_move(p1, Move{MoveKind::expand_edge, 0, Vertex{z}}), Error);
        CHECK_THROWS_AS(apply_move(p1, Move{MoveKind::insert_backtrack, 9, Vertex{l}}), Error);
        CHECK_THROWS_AS(apply_move(base, Move{MoveKind::remove_backtrack, 0, Vertex{l}}),
                        Error);
        // Witness must be incident for insert_backtrack.
        Point far = random_point(c, rng);
        if (!incident(Vertex{far}, Vertex{l}, 1e-9)) {
            EdgePath line_start;
            line_start.cse = c;
            line_start.v = {Vertex{l}};
            CHECK_THROWS_AS(
                apply_move(line_start, Move{MoveKind::insert_backtrack, 0, Vertex{far}}),
                Error);
        }
    }
    SUBCASE("canonical shapes: (x) -> (x, L, x) and (x, L) -> (x, pi, L)") {
        EdgePath p1 = apply_move(base, Move{MoveKind::insert_backtrack, 0, Vertex{l}});
        CHECK(vertex_equal(p1.v[0], Vertex{x}));
        CHECK(vertex_equal(p1.v[2], Vertex{x}));
        EdgePath xl;
        xl.cse = c;
        xl.v = {Vertex{x}, Vertex{l}};
        Plane pi = random_plane_through(l, rng);
        EdgePath p2 = apply_move(xl, Move{MoveKind::expand_edge, 0, Vertex{pi}});
        REQUIRE(p2.v.size() == 3);
        CHECK(vertex_equal(p2.v[1], Vertex{pi}));
        (void)y;
    }
}

TEST_CASE("move log serialization round-trips through replay") {
    Rng rng(52);
    for (GeomCase c : {GeomCase::hh, GeomCase::oo}) {
        EdgePath p = random_loop(c, rng, 6, true);
        EdgePath q = p;
        MoveLog log;
        for (int t = 0; t < 6; ++t) {
            try {
                Move m = random_move(q, rng);
                q = apply_move(q, m);
                log.moves.push_back(m);
            } catch (const Error&) {
                break;
            }
        }
        std::string text = serialize(log);
        MoveLog parsed = parse_move_log(c, text);
        REQUIRE(parsed.moves.size() == log.moves.size());
        EdgePath q2 = replay(p, parsed);
        CHECK(path_equal(q2, q, 1e-6));
    }
}

TEST_CASE("eliminate_planes") {
    Rng rng(53);
    const GeomCase c = GeomCase::ho;
    SUBCASE("plane-free paths are untouched") {
        EdgePath p = random_loop(c, rng, 6, false);
        auto r = eliminate_planes(p);
        CHECK(r.log.moves.empty());
        CHECK(path_equal(r.result, p));
    }
    SUBCASE("(x, pi, y) becomes (x, J, y) through the join") {
        Plane pi = random_plane(c, rng);
        Point x = random_point(c, rng);
        Point y = random_point(c, rng);
        if (point_equal(x, y, 1e-6)) return;
        EdgePath p;
        p.cse = c;
        p.v = {Vertex{x}, Vertex{pi}, Vertex{y}};
        auto r = eliminate_planes(p);
        REQUIRE(r.result.v.size() == 3);
        CHECK(r.log.size() <= 3);
        const Line& j = std::get<Line>(r.result.v[1]);
        CHECK(incident(Vertex{x}, Vertex{j}, 1e-7));
        CHECK(incident(Vertex{y}, Vertex{j}, 1e-7));
        CHECK(incident(Vertex{j}, Vertex{pi}, 1e-7));
        CHECK(path_equal(replay(p, r.log), r.result));
    }
    SUBCASE("three interior planes on a length-6 path") {
        Rng rng2(54);
        Point x0 = random_point(c, rng2);
        Point x1 = random_point(c, rng2);
        Point x2 = random_point(c, rng2);
        Point x3 = random_point(c, rng2);
        EdgePath p;
        p.cse = c;
        p.v = {Vertex{x0}, Vertex{random_plane(c, rng2)}, Vertex{x1},
               Vertex{random_plane(c, rng2)}, Vertex{x2}, Vertex{random_plane(c, rng2)},
               Vertex{x3}};
        REQUIRE(path_valid(p));
        auto r = eliminate_planes(p);
        CHECK(r.result.length() <= 9);
        CHECK(r.log.size() <= 9);
        for (const auto& v : r.result.v) CHECK(type_of(v) != 3);
        CHECK(path_equal(replay(p, r.log), r.result));
    }
    SUBCASE("plane endpoints are rejected") {
        EdgePath p;
        p.cse = c;
        p.v = {Vertex{random_plane(c, rng)}, Vertex{random_point(c, rng)}};
        CHECK_THROWS_AS(eliminate_planes(p), Error);
    }
    SUBCASE("budget across random plane-bearing loops") {
        for (int s = 0; s < 50; ++s) {
            EdgePath p = random_loop(c, rng, 8, true);
            std::size_t klen = p.length();
            auto r = eliminate_planes(p);
            CHECK(r.log.size() <= 3 * (klen / 2));
            CHECK(r.result.length() <= (3 * klen) / 2);
            CHECK(path_equal(replay(p, r.log), r.result));
        }
    }
}

TEST_CASE("orthogonalize_primitive") {
    Rng rng(55);
    SUBCASE("already orthogonal input returns unchanged with an empty log") {
        for (GeomCase c : {GeomCase::hh, GeomCase::ho, GeomCase::oo}) {
            PrimitivePath pp = random_primitive(c, rng, true);
            auto r = orthogonalize_primitive(pp);
            CHECK(r.log.moves.empty());
            CHECK(path_equal(to_path(r.result), to_path(pp)));
        }
    }
    SUBCASE("random input: output orthogonal within 12 moves, replay exact") {
        for (GeomCase c : {GeomCase::hh, GeomCase::ho, GeomCase::oo}) {
            const Field k = field_of(c);
            for (int s = 0; s < 334; ++s) {
                PrimitivePath pp = random_primitive(c, rng, false);
                auto r = orthogonalize_primitive(pp);
                CHECK(r.log.size() <= 12);
                CHECK(hermitian(r.result.x.rep, r.result.y.rep, k).abs() < 1e-7);
                CHECK(point_equal(r.result.x, pp.x, 1e-9));
                CHECK(path_equal(replay(to_path(pp), r.log), to_path(r.result)));
            }
        }
    }
}

TEST_CASE("pl_invariant") {
    Rng rng(56);
    const GeomCase c = GeomCase::oo;
    const Field k = field_of(c);
    SUBCASE("equal lines give invariant one") {
        PrimitivePath pp = random_primitive(c, rng, true);
        PrimitivePath same{pp.x, pp.l, pp.y, pp.l};
        KScalar v = pl_invariant(same);
        CHECK(v.re == doctest::Approx(1.0));
        CHECK(v.im == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("[a'', b] against [a'', -b] gives minus one") {
        PrimitivePath pp = random_primitive(c, rng, true);
        Line neg = make_line(c, pp.l.a, -pp.l.b);
        PrimitivePath flipped{pp.x, pp.l, pp.y, neg};
        KScalar v = pl_invariant(flipped);
        CHECK(v.re == doctest::Approx(-1.0));
        CHECK(v.im == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("invariant is preserved by the automorphism action") {
        for (int s = 0; s < 30; ++s) {
            PrimitivePath pp = random_primitive(c, rng, true);
            KScalar before = pl_invariant(pp);
            AutoPair g = random_auto(c, rng);
            PrimitivePath moved{apply_auto(g, pp.x), apply_auto(g, pp.l), apply_auto(g, pp.y),
                                apply_auto(g, pp.m)};
            KScalar after = pl_invariant(moved);
            CHECK((after - before).abs() < 1e-7);
        }
    }
    SUBCASE("non-orthogonal points are rejected") {
        PrimitivePath pp = random_primitive(c, rng, false);
        if (hermitian(pp.x.rep, pp.y.rep, k).abs() > 1e-6)
            CHECK_THROWS_AS(pl_invariant(pp), Error);
    }
}

TEST_CASE("pl_reduce") {
    Rng rng(57);
    const GeomCase c = GeomCase::oo;
    const Field k = field_of(c);
    auto forced_primitive = [&](KScalar l) {
        PrimitivePath pp = random_primitive(c, rng, true);
        Line m = make_line(c, pp.l.a, right_scale(pp.l.b, l));
        return make_primitive(pp.x, pp.l, pp.y, m);
    };
    SUBCASE("l = i reduces to invariant zero") {
        PrimitivePath pp = forced_primitive(KScalar::i());
        auto r = pl_reduce(pp, KScalar::i());
        CHECK(r.log.size() == 12);
        KScalar out = pl_invariant(r.result);
        CHECK(out.abs() < 1e-9);
        CHECK(path_equal(replay(to_path(pp), r.log), to_path(r.result)));
    }
    SUBCASE("l = exp(i theta) reduces to cos(theta)") {
        for (int s = 0; s < 40; ++s) {
            double th = rng.uniform(0.25, 6.0);
            if (std::fabs(th - 3.14159265358979) < 0.25) continue;  // keep l away from -1
            KScalar l{std::cos(th), std::sin(th)};
            PrimitivePath pp = forced_primitive(l);
            auto r = pl_reduce(pp, l);
            KScalar out = pl_invariant(r.result);
            CHECK(std::fabs(out.re - l.re) < 1e-9);
            CHECK(std::fabs(out.im) < 1e-9);
            CHECK(hermitian(r.result.x.rep, r.result.y.rep, k).abs() < 1e-9);
        }
    }
    SUBCASE("the new lines sit in planes through N = [a, b']") {
        double th = 1.1;
        KScalar l{std::cos(th), std::sin(th)};
        PrimitivePath pp = forced_primitive(l);
        auto r = pl_reduce(pp, l);
        // Reconstruct the proof's N deterministically and check coplanarity.
        Element a = pp.x.rep;
        KScalar t = hermitian(mul(pp.x.rep, pp.y.rep), pp.l.a, k);
        Element b = right_scale(pp.l.b, t.conj());
        Element b_perp = unit_orthogonal_in(alg_b(c), k, {b});
        Line n = make_line(c, a, b_perp);
        CHECK(coplanar(r.result.l, n, 1e-7));
        CHECK(coplanar(r.result.m, n, 1e-7));
        CHECK(incident(Vertex{pp.x}, Vertex{r.result.l}, 1e-7));
        CHECK(incident(Vertex{pp.x}, Vertex{r.result.m}, 1e-7));
        CHECK(incident(Vertex{r.result.y}, Vertex{n}, 1e-7));
    }
    SUBCASE("preconditions") {
        PrimitivePath pp = forced_primitive(KScalar::i());
        CHECK_THROWS_AS(pl_reduce(pp, KScalar{0.5, 0.0}), Error);   // |l| != 1
        CHECK_THROWS_AS(pl_reduce(pp, KScalar::one()), Error);      // l = 1
        PrimitivePath hh_pp = random_primitive(GeomCase::hh, rng, true);
        CHECK_THROWS_AS(pl_reduce(hh_pp, KScalar::i()), Error);     // k = R
    }
}

TEST_CASE("diam_step") {
    Rng rng(58);
    auto each_case = [&](auto&& body) {
        for (GeomCase c : {GeomCase::hh, GeomCase::oo}) body(field_of(c), alg_b(c));
    };
    SUBCASE("l = 0 with orthogonal b, c lands on the frame completion") {
        each_case([&](Field k, Alg B) {
            Element b = random_unit_pure(k, B, rng);
            Element cc = unit_orthogonal_in(B, k, {b});
            Element d = diam_step(b, cc, KScalar::zero(), k);
            Element expected = unit_orthogonal_in(B, k, {b, cc});
            CHECK(near(d, expected, 1e-9));
            CHECK(hermitian(b, d, k).abs() < 1e-9);
            CHECK(hermitian(d, cc, k).abs() < 1e-9);
        });
    }
    SUBCASE("random l of modulus one half") {
        each_case([&](Field k, Alg B) {
            for (int s = 0; s < 40; ++s) {
                double th = rng.uniform(0.0, 6.28);
                KScalar l = k == Field::Real
                                ? KScalar{rng.below(2) ? 0.5 : -0.5, 0.0}
                                : KScalar{0.5 * std::cos(th), 0.5 * std::sin(th)};
                Element b = random_unit_pure(k, B, rng);
                KScalar l2 = l * l;
                Element w = unit_orthogonal_in(B, k, {b});
                Element cc = right_scale(b, l2) + w * std::sqrt(1.0 - l2.abs2());
                Element d = diam_step(b, cc, l, k);
                CHECK(std::fabs(norm2(d) - 1.0) < 1e-9);
                CHECK((hermitian(b, d, k) - l).abs() < 1e-9);
                CHECK((hermitian(d, cc, k) - l).abs() < 1e-8);
            }
        });
    }
    SUBCASE("|l| = 1 is rejected") {
        each_case([&](Field k, Alg B) {
            Element b = random_unit_pure(k, B, rng);
            Element cc = unit_orthogonal_in(B, k, {b});
            CHECK_THROWS_AS(diam_step(b, cc, KScalar::one(), k), Error);
        });
    }
}

TEST_CASE("diam_connect") {
    Rng rng(59);
    auto check_chain = [](Field k, const DiamChain& chain, const Element& b,
                          const Element& cc, KScalar l) {
        CHECK(near(chain.nodes.front(), b, 1e-9));
        CHECK(near(chain.nodes.back(), cc, 1e-9));
        CHECK(chain.nodes.size() - 1 <= 4 * chain.n);
        for (std::size_t i = 0; i + 1 < chain.nodes.size(); ++i)
            CHECK((hermitian(chain.nodes[i], chain.nodes[i + 1], k) - l).abs() < 1e-9);
    };
    auto each_case = [&](auto&& body) {
        for (GeomCase c : {GeomCase::hh, GeomCase::oo}) body(field_of(c), alg_b(c));
    };
    SUBCASE("(b|c) = l^2 goes through a single midpoint") {
        each_case([&](Field k, Alg B) {
            for (int s = 0; s < 20; ++s) {
                KScalar l = k == Field::Real ? KScalar{0.4, 0.0}
                                             : KScalar{0.4 * std::cos(1.3), 0.4 * std::sin(1.3)};
                Element b = random_unit_pure(k, B, rng);
                KScalar l2 = l * l;
                Element w = unit_orthogonal_in(B, k, {b});
                Element cc = right_scale(b, l2) + w * std::sqrt(1.0 - l2.abs2());
                DiamChain chain = diam_connect(b, cc, l, k);
                CHECK(chain.nodes.size() == 3);
                check_chain(k, chain, b, cc, l);
            }
        });
    }
    SUBCASE("orthogonal endpoints take at most 2n steps") {
        each_case([&](Field k, Alg B) {
            for (int s = 0; s < 20; ++s) {
                double mod = rng.uniform(0.05, 0.75);
                double th = rng.uniform(0.0, 6.28);
                KScalar l = k == Field::Real
                                ? KScalar{rng.below(2) ? mod : -mod, 0.0}
                                : KScalar{mod * std::cos(th), mod * std::sin(th)};
                Element b = random_unit_pure(k, B, rng);
                Element cc = unit_orthogonal_in(B, k, {b, random_unit_pure(k, B, rng)});
                DiamChain chain = diam_connect(b, cc, l, k);
                CHECK(chain.nodes.size() - 1 <= 2 * chain.n);
                check_chain(k, chain, b, cc, l);
            }
        });
    }
    SUBCASE("b = c closes through an orthogonal detour") {
        each_case([&](Field k, Alg B) {
            Element b = random_unit_pure(k, B, rng);
            KScalar l = KScalar{0.3, 0.0};
            DiamChain chain = diam_connect(b, b, l, k);
            CHECK(chain.nodes.size() > 1);
            check_chain(k, chain, b, b, l);
        });
    }
    SUBCASE("generic pairs stay within 4n") {
        each_case([&](Field k, Alg B) {
            for (int s = 0; s < 30; ++s) {
                double mod = rng.uniform(0.05, 0.8);
                double th = rng.uniform(0.0, 6.28);
                KScalar l = k == Field::Real
                                ? KScalar{rng.below(2) ? mod : -mod, 0.0}
                                : KScalar{mod * std::cos(th), mod * std::sin(th)};
                Element b = random_unit_pure(k, B, rng);
                Element cc = random_unit_pure(k, B, rng);
                check_chain(k, diam_connect(b, cc, l, k), b, cc, l);
            }
        });
    }
    SUBCASE("|l| >= 1 is rejected") {
        each_case([&](Field k, Alg B) {
            Element b = random_unit_pure(k, B, rng);
            CHECK_THROWS_AS(diam_connect(b, b, KScalar::one(), k), Error);
        });
    }
}

TEST_CASE("pinch") {
    Rng rng(60);
    for (GeomCase c : {GeomCase::hh, GeomCase::oo}) {
        const Field k = field_of(c);
        int done = 0;
        for (int s = 0; s < 60 && done < 25; ++s) {
            PrimitivePath pp = random_primitive(c, rng, false);
            EdgePath gamma = to_path(pp);
            gamma.v[4] = Vertex{random_point_on(pp.m, rng)};
            if (vertex_equal(gamma.v[4], gamma.v[2], 1e-6)) continue;
            if (!path_valid(gamma)) continue;
            // L' through x coplanar with L.
            Element dir = unit_orthogonal_to(c, {pp.x.rep, random_unit_pure(k, alg_a(c), rng)});
            KScalar kap = hermitian(dir, pp.l.a, k);
            if (1.0 - kap.abs2() < 1e-6) continue;
            Element w = unit_orthogonal_to_b(c, {pp.l.b});
            Element f = right_scale(pp.l.b, kap.conj()) + w * std::sqrt(1.0 - kap.abs2());
            Line lp = make_line(c, dir, f);
            if (line_equal(lp, pp.l, 1e-6)) continue;
            WithLog<EdgePath> r{{}, {}};
            try {
                r = pinch(gamma, lp);
            } catch (const Error&) {
                continue;
            }
            ++done;
            CHECK(r.log.size() == 12);
            CHECK(line_equal(std::get<Line>(r.result.v[1]), lp, 1e-7));
            CHECK(vertex_equal(r.result.v[0], gamma.v[0], 1e-9));
            CHECK(vertex_equal(r.result.v[4], gamma.v[4], 1e-9));
            CHECK(path_equal(replay(gamma, r.log), r.result));
        }
        CHECK(done >= 20);
        // L' = L violates the distinctness precondition.
        PrimitivePath pp = random_primitive(c, rng, false);
        EdgePath gamma = to_path(pp);
        CHECK_THROWS_AS(pinch(gamma, pp.l), Error);
    }
}

TEST_CASE("shorten on structured hexagons") {
    Rng rng(61);
    for (GeomCase c : {GeomCase::hh, GeomCase::ho, GeomCase::oo}) {
        for (int s = 0; s < 34; ++s) {
            EdgePath p = structured_hexagon(c, rng);
            HomotopyOptions opts;
            auto r = shorten(p, opts);
            CHECK(r.result.length() == p.length() - 2);
            CHECK(r.log.size() <= opts.k_budget + 56);
            CHECK(vertex_equal(r.result.v.front(), p.v.front(), 1e-9));
            CHECK(vertex_equal(r.result.v.back(), p.v.back(), 1e-9));
            CHECK(path_equal(replay(p, r.log), r.result));
        }
    }
}

TEST_CASE("budget arithmetic") {
    for (std::int64_t K : {0LL, 1LL, 17LL, 256LL, 100000LL}) {
        CHECK(budget_c(0, K) == 0);
        CHECK(budget_c(2, K) == K);
        CHECK(budget_c(4, K) == K + 55);
        for (std::int64_t k = 6; k <= 64; k += 2)
            CHECK(budget_c(k, K) == (k - 4) * (K + 56) + K + 55);
        for (std::int64_t k = 0; k <= 64; ++k)
            CHECK(budget_d(k, K) == budget_c((3 * k) / 2, K) + 4 + 6 * ((k + 2) / 2));
    }
    // Spot values: C(6) = 3K + 167, D(4) = C(6) + 4 + 18.
    CHECK(budget_c(6, 10) == 197);
    CHECK(budget_d(4, 10) == 197 + 4 + 18);
}

TEST_CASE("residue-confined paths connect within k + l moves") {
    Rng rng(62);
    for (GeomCase c : {GeomCase::hh, GeomCase::oo}) {
        for (int s = 0; s < 20; ++s) {
            Plane pi = random_plane(c, rng);
            Point u = random_point(c, rng);
            Point v = random_point(c, rng);
            if (point_equal(u, v, 1e-5)) continue;
            Point w = random_point(c, rng);
            if (point_equal(w, u, 1e-5) || point_equal(w, v, 1e-5)) continue;
            // sigma = (u, J1, w, J2, v), tau = (u, J3, v), all inside pi.
            Line j1 = line_in_plane_through(pi, u, w);
            Line j2 = line_in_plane_through(pi, w, v);
            Line j3 = line_in_plane_through(pi, u, v);
            EdgePath p;
            p.cse = c;
            p.v = {Vertex{u}, Vertex{j1}, Vertex{w}, Vertex{j2}, Vertex{v}};
            if (!path_valid(p)) continue;
            EdgePath before = p;
            MoveLog log = residue_connect(p, 0, 4, {Vertex{u}, Vertex{j3}, Vertex{v}}, pi);
            CHECK(log.size() <= 4 + 2);
            REQUIRE(p.v.size() == 3);
            CHECK(vertex_equal(p.v[1], Vertex{j3}, 1e-9));
            CHECK(path_equal(replay(before, log), p));
        }
    }
}

TEST_CASE("reduce") {
    Rng rng(63);
    HomotopyOptions opts;
    SUBCASE("identical paths need no moves") {
        for (GeomCase c : {GeomCase::hh, GeomCase::oo}) {
            EdgePath p = random_loop(c, rng, 6, false);
            auto r = reduce(p, p, opts);
            CHECK(r.result.success);
            CHECK(r.log.moves.empty());
        }
    }
    SUBCASE("q = p plus random moves is recovered within budget") {
        for (GeomCase c : {GeomCase::hh, GeomCase::ho, GeomCase::oo}) {
            for (int s = 0; s < 12; ++s) {
                EdgePath p = random_loop(c, rng, 6, false);
                EdgePath q = p;
                for (int t = 0; t < 5 && q.length() + 2 <= 10; ++t) {
                    try {
                        q = apply_move(q, random_move(q, rng));
                    } catch (const Error&) {
                        break;
                    }
                }
                auto r = reduce(p, q, opts);
                REQUIRE(r.result.success);
                CHECK(path_equal(replay(p, r.log), q, 1e-6));
                std::int64_t k = static_cast<std::int64_t>(std::max(p.length(), q.length()));
                CHECK(static_cast<std::int64_t>(r.log.size()) <=
                      budget_d(k, static_cast<std::int64_t>(opts.k_budget)));
            }
        }
    }
    SUBCASE("endpoint mismatch is rejected") {
        EdgePath p = random_loop(GeomCase::hh, rng, 6, false);
        EdgePath q = random_loop(GeomCase::hh, rng, 6, false);
        if (!vertex_equal(p.v.front(), q.v.front(), 1e-9))
            CHECK_THROWS_AS(reduce(p, q, opts), Error);
    }
    SUBCASE("search exhaustion is reported, not absorbed") {
        // Generic primitive loops defeat the bounded fallback search; the
        // failure must surface as an unsuccessful result with a reason.
        PrimitivePath pp = random_primitive(GeomCase::oo, rng, true);
        HomotopyOptions small = opts;
        small.search_depth = 1;
        small.search_nodes = 16;
        CHECK_THROWS_AS(contract_primitive(pp, small), Error);
    }
}

TEST_CASE("shorten on generic loops either succeeds or reports search exhaustion") {
    // The comparison macros bottom out in the primitive-loop contraction,
    // whose general case is handled by a bounded search; on generic loops
    // the search gives out and shorten must surface that as an Error.
    Rng rng(66);
    int outcomes = 0;
    for (int s = 0; s < 6; ++s) {
        EdgePath p = random_loop(GeomCase::oo, rng, 6, false);
        if (p.length() < 6) continue;
        HomotopyOptions opts;
        opts.search_depth = 1;
        opts.search_nodes = 32;
        try {
            auto r = shorten(p, opts);
            CHECK(r.result.length() == p.length() - 2);
            CHECK(path_equal(replay(p, r.log), r.result));
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("search exhausted") != std::string::npos);
        }
        ++outcomes;
    }
    CHECK(outcomes > 0);
}

TEST_CASE("random moves keep paths valid") {
    Rng rng(64);
    for (GeomCase c : {GeomCase::hh, GeomCase::oo}) {
        EdgePath p = random_loop(c, rng, 6, false);
        for (int t = 0; t < 25; ++t) {
            try {
                p = apply_move(p, random_move(p, rng));
            } catch (const Error&) {
                continue;
            }
            CHECK(path_valid(p));
        }
    }
}

TEST_CASE("vertex serialization round-trips for all three types") {
    Rng rng(67);
    for (GeomCase c : {GeomCase::hh, GeomCase::ho, GeomCase::oo}) {
        for (const Vertex& v : {Vertex{random_point(c, rng)}, Vertex{random_line(c, rng)},
                                Vertex{random_plane(c, rng)}}) {
            Vertex back = parse_vertex(c, serialize(v));
            CHECK(vertex_equal(back, v, 1e-12));
        }
        // A log whose witnesses include a plane survives the text format.
        Plane pi = random_plane(c, rng);
        Element dir = random_unit_pure(field_of(c), alg_a(c), rng);
        Line l = make_line(c, dir, pi.emb.apply(dir));
        Point x = random_point_on(l, rng);
        EdgePath p;
        p.cse = c;
        p.v = {Vertex{x}, Vertex{l}};
        MoveLog log;
        log.moves.push_back(Move{MoveKind::expand_edge, 0, Vertex{pi}});
        MoveLog parsed = parse_move_log(c, serialize(log));
        EdgePath q = replay(p, parsed);
        REQUIRE(q.v.size() == 3);
        CHECK(vertex_equal(q.v[1], Vertex{pi}, 1e-9));
    }
}

TEST_CASE("reduce handles line- and plane-anchored loops through extremity normalization") {
    Rng rng(68);
    HomotopyOptions opts;
    for (GeomCase c : {GeomCase::hh, GeomCase::oo}) {
        const Field k = field_of(c);
        for (int s = 0; s < 10; ++s) {
            // A loop anchored at a line: (L, x, M, y, L) with x, y on L.
            Line l = random_line(c, rng);
            Point x = random_point_on(l, rng);
            Point y = random_point_on(l, rng);
            if (point_equal(x, y, 1e-5)) continue;
            Element m_dir = unit_orthogonal_to(c, {x.rep, y.rep});
            Line m = make_line(c, m_dir, random_unit_pure(k, alg_b(c), rng));
            if (line_equal(m, l, 1e-6)) continue;
            EdgePath p;
            p.cse = c;
            p.v = {Vertex{l}, Vertex{x}, Vertex{m}, Vertex{y}, Vertex{l}};
            if (!path_valid(p)) continue;
            EdgePath q = p;
            for (int t = 0; t < 4 && q.length() + 2 <= 9; ++t) {
                try {
                    q = apply_move(q, random_move(q, rng));
                } catch (const Error&) {
                    break;
                }
            }
            auto r = reduce(p, q, opts);
            REQUIRE(r.result.success);
            CHECK(path_equal(replay(p, r.log), q, 1e-6));
        }
        for (int s = 0; s < 10; ++s) {
            // A loop anchored at a plane: (pi, x, L, y, pi).
            Plane pi = random_plane(c, rng);
            Line l = random_line(c, rng);
            Point x = random_point_on(l, rng);
            Point y = random_point_on(l, rng);
            if (point_equal(x, y, 1e-5)) continue;
            EdgePath p;
            p.cse = c;
            p.v = {Vertex{pi}, Vertex{x}, Vertex{l}, Vertex{y}, Vertex{pi}};
            if (!path_valid(p)) continue;
            EdgePath q = p;
            for (int t = 0; t < 4 && q.length() + 2 <= 9; ++t) {
                try {
                    q = apply_move(q, random_move(q, rng));
                } catch (const Error&) {
                    break;
                }
            }
            auto r = reduce(p, q, opts);
            REQUIRE(r.result.success);
            CHECK(path_equal(replay(p, r.log), q, 1e-6));
        }
    }
}
