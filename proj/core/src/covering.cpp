#include "c3geom/covering.hpp"

#include <cmath>

#include "c3geom/geometry.hpp"

namespace c3geom {

double quadric_q(const Coord7& x) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - x[3] * x[3] - x[4] * x[4] -
           x[5] * x[5] - x[6] * x[6];
}

double bilinear_b(const Coord7& x, const Coord7& y) {
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2] - x[3] * y[3] - x[4] * y[4] -
           x[5] * y[5] - x[6] * y[6];
}

Coord7 canonicalize_coord7(const Coord7& raw) {
    double n2 = 0.0;
    for (double v : raw) n2 += v * v;
    double n = std::sqrt(n2);
    if (n < 1e-12) throw Error("canonicalize_coord7: zero vector");
    Coord7 x;
    for (int i = 0; i < 7; ++i) x[i] = raw[i] / n;
    for (int i = 0; i < 7; ++i) {
        if (std::fabs(x[i]) > kCanonThreshold) {
            if (x[i] < 0.0)
                for (int j = 0; j < 7; ++j) x[j] = -x[j];
            break;
        }
    }
    return x;
}

QuadricPoint make_quadric_point(const Coord7& raw, double tol) {
    Coord7 x = canonicalize_coord7(raw);
    if (std::fabs(quadric_q(x)) > tol)
        throw Error("make_quadric_point: coordinates are off the quadric");
    return QuadricPoint{x};
}

bool quadric_equal(const QuadricPoint& p, const QuadricPoint& q, double tol) {
    double s = 0.0;
    for (int i = 0; i < 7; ++i) {
        double d = p.x[i] - q.x[i];
        s += d * d;
    }
    return s <= tol * tol;
}

double bilinear_b(const QuadricPoint& p, const QuadricPoint& q) {
    return bilinear_b(p.x, q.x);
}

Quat quat_mul(const Quat& a, const Quat& b) {
    return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

Quat quat_conj(const Quat& a) { return {a[0], -a[1], -a[2], -a[3]}; }

Isoclinic make_isoclinic(const Quat& q) {
    double n2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
    if (std::fabs(n2 - 1.0) > 1e-9) {
        if (n2 < 1e-18) throw Error("make_isoclinic: zero quaternion");
        double inv = 1.0 / std::sqrt(n2);
        return Isoclinic{{q[0] * inv, q[1] * inv, q[2] * inv, q[3] * inv}};
    }
    return Isoclinic{q};
}

Isoclinic inverse(const Isoclinic& g) { return Isoclinic{quat_conj(g.q)}; }

Isoclinic compose(const Isoclinic& g, const Isoclinic& h) {
    return make_isoclinic(quat_mul(g.q, h.q));
}

Coord7 isoclinic_apply(const Isoclinic& g, const Coord7& x) {
    Quat y{x[3], x[4], x[5], x[6]};
    Quat z = quat_mul(g.q, y);
    return {x[0], x[1], x[2], z[0], z[1], z[2], z[3]};
}

QuadricPoint h_act(const Isoclinic& g, const QuadricPoint& p, double tol) {
    if (std::fabs(quadric_q(p.x)) > tol) throw Error("h_act: point is off the quadric");
    return QuadricPoint{canonicalize_coord7(isoclinic_apply(g, p.x))};
}

QuadricPoint random_quadric_point(Rng& rng) {
    const double inv_sqrt2 = 0.70710678118654752440;
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::array<double, 3> u;
        std::array<double, 4> v;
        double nu = 0.0, nv = 0.0;
        for (auto& w : u) {
            w = rng.gaussian();
            nu += w * w;
        }
        for (auto& w : v) {
            w = rng.gaussian();
            nv += w * w;
        }
        if (nu < 1e-12 || nv < 1e-12) continue;
        nu = std::sqrt(nu);
        nv = std::sqrt(nv);
        Coord7 x{u[0] / nu * inv_sqrt2, u[1] / nu * inv_sqrt2, u[2] / nu * inv_sqrt2,
                 v[0] / nv * inv_sqrt2, v[1] / nv * inv_sqrt2, v[2] / nv * inv_sqrt2,
                 v[3] / nv * inv_sqrt2};
        return QuadricPoint{canonicalize_coord7(x)};
    }
    throw Error("random_quadric_point: sampling failed");
}

Isoclinic random_isoclinic(Rng& rng, double max_real_part) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        Quat q;
        double n2 = 0.0;
        for (auto& w : q) {
            w = rng.gaussian();
            n2 += w * w;
        }
        if (n2 < 1e-12) continue;
        double inv = 1.0 / std::sqrt(n2);
        for (auto& w : q) w *= inv;
        if (q[0] > max_real_part) continue;
        return Isoclinic{q};
    }
    throw Error("random_isoclinic: sampling failed");
}

namespace {

/// Rotation of R^3 sending v (unit) to (1,0,0), as an orthonormal frame:
/// rows of the matrix are v and two completions.
std::array<std::array<double, 3>, 3> frame_to_e1(const std::array<double, 3>& v) {
    std::array<std::array<double, 3>, 3> rows;
    rows[0] = v;
    // Gram-Schmidt over the coordinate candidates.
    std::size_t filled = 1;
    for (int cand = 0; cand < 3 && filled < 3; ++cand) {
        std::array<double, 3> w{0.0, 0.0, 0.0};
        w[cand] = 1.0;
        for (std::size_t r = 0; r < filled; ++r) {
            double d = rows[r][0] * w[0] + rows[r][1] * w[1] + rows[r][2] * w[2];
            for (int i = 0; i < 3; ++i) w[i] -= d * rows[r][i];
        }
        double n2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
        if (n2 > 1e-14) {
            double inv = 1.0 / std::sqrt(n2);
            for (auto& c : w) c *= inv;
            rows[filled++] = w;
        }
    }
    if (filled != 3) throw Error("frame_to_e1: degenerate input");
    // Make it a rotation (determinant +1) by flipping the last row if needed.
    double det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1]) -
                 rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0]) +
                 rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
    if (det < 0.0)
        for (auto& c : rows[2]) c = -c;
    return rows;
}

} // namespace

FreenessReport free_action_check(std::size_t samples, Rng& rng, double delta) {
    FreenessReport rep;
    rep.samples = samples;
    rep.min_abs_b = 1e300;
    rep.min_gap = 1e300;
    const Coord7 base{1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
    for (std::size_t s = 0; s < samples; ++s) {
        Isoclinic g = random_isoclinic(rng, 1.0 - delta);
        QuadricPoint p = random_quadric_point(rng);

        QuadricPoint gp = h_act(g, p);
        double drift = std::fabs(quadric_q(isoclinic_apply(g, p.x)) - quadric_q(p.x));
        rep.max_q_drift = std::max(rep.max_q_drift, drift);

        double b_direct = std::fabs(bilinear_b(p.x, isoclinic_apply(g, p.x)));
        rep.min_abs_b = std::min(rep.min_abs_b, b_direct);
        rep.min_gap = std::min(rep.min_gap, 1.0 - g.q[0]);

        // Transport p to the base point: an SO(3) rotation on the first
        // block and left multiplication by the inverse sphere part on the
        // second. The conjugated g stays left isoclinic with the same real
        // part, so B is reproduced in the normalized frame.
        std::array<double, 3> u{p.x[0], p.x[1], p.x[2]};
        Quat y{p.x[3], p.x[4], p.x[5], p.x[6]};
        double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        double ny = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]);
        if (nu < 1e-9 || ny < 1e-9) {
            ++rep.failures;
            rep.note = "sampled point with a vanishing factor";
            continue;
        }
        for (auto& w : u) w /= nu;
        Quat yh{y[0] / ny, y[1] / ny, y[2] / ny, y[3] / ny};
        auto rot = frame_to_e1(u);
        Isoclinic transport{quat_conj(yh)};
        auto move = [&](const Coord7& v) {
            Coord7 r = isoclinic_apply(transport, v);
            Coord7 out = r;
            for (int i = 0; i < 3; ++i)
                out[i] = rot[i][0] * v[0] + rot[i][1] * v[1] + rot[i][2] * v[2];
            return out;
        };
        Coord7 p_frame = move(p.x);
        Isoclinic g_conj = compose(compose(transport, g), inverse(transport));
        Coord7 gp_frame = isoclinic_apply(g_conj, p_frame);
        double base_dev = 0.0;
        for (int i = 0; i < 7; ++i) {
            double d = p_frame[i] - base[i] / std::sqrt(2.0);
            base_dev = std::max(base_dev, std::fabs(d));
        }
        if (base_dev > 1e-7) {
            ++rep.failures;
            if (rep.note.empty()) rep.note = "transport misses the base point";
        }
        double b_frame = std::fabs(bilinear_b(p_frame, gp_frame));
        rep.max_frame_error = std::max(rep.max_frame_error, std::fabs(b_frame - b_direct));

        double expected = 0.5 * (1.0 - g.q[0]);
        if (b_direct < 0.5 * delta || std::fabs(b_direct - expected) > 1e-9) {
            ++rep.failures;
            if (rep.note.empty()) rep.note = "collinearity bound violated";
        }
        (void)gp;
    }
    if (samples == 0) {
        rep.min_abs_b = 0.0;
        rep.min_gap = 0.0;
    }
    return rep;
}

} // namespace c3geom
