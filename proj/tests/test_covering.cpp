#include <doctest.h>

#include <cmath>

#include "c3geom/covering.hpp"

using namespace c3geom;

TEST_CASE("quadric form and bilinear form") {
    Coord7 p{1, 0, 0, 1, 0, 0, 0};
    CHECK(quadric_q(p) == doctest::Approx(0.0));
    CHECK(bilinear_b(p, p) == doctest::Approx(quadric_q(p)));

    // The worked value: q = (1,0,0,a,b,c,d) with a^2+b^2+c^2+d^2 = 1 gives
    // B(p, q) = 1 - a.
    Rng rng(41);
    for (int s = 0; s < 200; ++s) {
        Quat u{rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()};
        double n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3]);
        if (n < 1e-6) continue;
        for (auto& w : u) w /= n;
        Coord7 q{1, 0, 0, u[0], u[1], u[2], u[3]};
        CHECK(bilinear_b(p, q) == doctest::Approx(1.0 - u[0]).epsilon(1e-12));
    }

    Coord7 minus_p;
    for (int i = 0; i < 7; ++i) minus_p[i] = -p[i];
    CHECK(bilinear_b(p, minus_p) == doctest::Approx(-quadric_q(p)));

    // Symmetry and the polarization identity on random pairs.
    for (int s = 0; s < 100; ++s) {
        Coord7 x, y;
        for (int i = 0; i < 7; ++i) {
            x[i] = rng.gaussian();
            y[i] = rng.gaussian();
        }
        CHECK(bilinear_b(x, y) == doctest::Approx(bilinear_b(y, x)));
        Coord7 sum;
        for (int i = 0; i < 7; ++i) sum[i] = x[i] + y[i];
        CHECK(bilinear_b(x, y) ==
              doctest::Approx(0.5 * (quadric_q(sum) - quadric_q(x) - quadric_q(y))));
    }
}

TEST_CASE("quadric point canonicalization") {
    Rng rng(42);
    for (int s = 0; s < 100; ++s) {
        QuadricPoint p = random_quadric_point(rng);
        CHECK(std::fabs(quadric_q(p.x)) < 1e-9);
        Coord7 doubled;
        for (int i = 0; i < 7; ++i) doubled[i] = -2.5 * p.x[i];
        QuadricPoint q = make_quadric_point(doubled);
        CHECK(quadric_equal(p, q, 1e-9));
        CHECK(quadric_equal(make_quadric_point(p.x), p, 1e-12));
        CHECK(bilinear_b(p, p) == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS(make_quadric_point(Coord7{1, 0, 0, 0, 0, 0, 0}), Error);
}

TEST_CASE("h_act") {
    Rng rng(43);
    SUBCASE("identity and the group law") {
        for (int s = 0; s < 100; ++s) {
            QuadricPoint p = random_quadric_point(rng);
            Isoclinic one{{1, 0, 0, 0}};
            CHECK(quadric_equal(h_act(one, p), p, 1e-12));
            Isoclinic g = random_isoclinic(rng);
            CHECK(quadric_equal(h_act(g, h_act(inverse(g), p)), p, 1e-9));
            Isoclinic h = random_isoclinic(rng);
            QuadricPoint lhs = h_act(compose(g, h), p);
            QuadricPoint rhs = h_act(g, h_act(h, p));
            CHECK(quadric_equal(lhs, rhs, 1e-9));
        }
    }
    SUBCASE("base point moves by left multiplication") {
        for (int s = 0; s < 50; ++s) {
            Isoclinic g = random_isoclinic(rng);
            QuadricPoint base = make_quadric_point(Coord7{1, 0, 0, 1, 0, 0, 0});
            QuadricPoint expected = make_quadric_point(
                Coord7{1, 0, 0, g.q[0], g.q[1], g.q[2], g.q[3]});
            CHECK(quadric_equal(h_act(g, base), expected, 1e-12));
        }
    }
    SUBCASE("Q preserved to 1e-12") {
        for (int s = 0; s < 200; ++s) {
            QuadricPoint p = random_quadric_point(rng);
            Isoclinic g = random_isoclinic(rng);
            CHECK(std::fabs(quadric_q(isoclinic_apply(g, p.x)) - quadric_q(p.x)) <= 1e-12);
        }
    }
    SUBCASE("off-quadric points are rejected") {
        Isoclinic g = random_isoclinic(rng);
        QuadricPoint bogus;
        bogus.x = Coord7{1, 0, 0, 0, 0, 0, 0};
        CHECK_THROWS_AS(h_act(g, bogus), Error);
    }
}

TEST_CASE("free action of the left isoclinic group") {
    Rng rng(44);
    FreenessReport rep = free_action_check(2000, rng, 1e-3);
    CHECK(rep.passed());
    CHECK(rep.min_abs_b > 0.5 * 1e-3);
    CHECK(rep.max_q_drift <= 1e-12);
    CHECK(rep.max_frame_error <= 1e-9);

    // B(p, g p) = 1 - Re(g) on the raw base representative.
    Coord7 base{1, 0, 0, 1, 0, 0, 0};
    for (int s = 0; s < 200; ++s) {
        Isoclinic g = random_isoclinic(rng);
        CHECK(bilinear_b(base, isoclinic_apply(g, base)) ==
              doctest::Approx(1.0 - g.q[0]).epsilon(1e-12));
    }
}
