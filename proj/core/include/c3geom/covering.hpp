#pragma once

#include <array>
#include <string>

#include "c3geom/algebra.hpp"

namespace c3geom {

using Coord7 = std::array<double, 7>;
using Quat = std::array<double, 4>;

/// Q(X) = X0^2 + X1^2 + X2^2 - X3^2 - X4^2 - X5^2 - X6^2.
double quadric_q(const Coord7& x);

/// B(x,y) = (Q(x+y) - Q(x) - Q(y)) / 2; symmetric with B(x,x) = Q(x).
double bilinear_b(const Coord7& x, const Coord7& y);

/// Projective point of the quadric Delta: unit Euclidean norm, first
/// coordinate of modulus above the canonical threshold made positive.
struct QuadricPoint {
    Coord7 x{};
};

QuadricPoint make_quadric_point(const Coord7& raw, double tol = 1e-7);
Coord7 canonicalize_coord7(const Coord7& raw);
bool quadric_equal(const QuadricPoint& p, const QuadricPoint& q, double tol = kDefaultTol);

double bilinear_b(const QuadricPoint& p, const QuadricPoint& q);

/// Left isoclinic rotation of the (X3..X6) block: left multiplication by a
/// unit quaternion.
struct Isoclinic {
    Quat q{1.0, 0.0, 0.0, 0.0};
};

Isoclinic make_isoclinic(const Quat& q);
Isoclinic inverse(const Isoclinic& g);
Isoclinic compose(const Isoclinic& g, const Isoclinic& h);

Quat quat_mul(const Quat& a, const Quat& b);
Quat quat_conj(const Quat& a);

/// Applies the rotation to raw coordinates (no projective normalization).
Coord7 isoclinic_apply(const Isoclinic& g, const Coord7& x);

/// The H-action on Delta; requires p on the quadric.
QuadricPoint h_act(const Isoclinic& g, const QuadricPoint& p, double tol = 1e-7);

/// Uniform point of Delta: unit sphere factors scaled by 1/sqrt(2).
QuadricPoint random_quadric_point(Rng& rng);
Isoclinic random_isoclinic(Rng& rng, double max_real_part = 1.0);

struct FreenessReport {
    std::size_t samples = 0;
    std::size_t failures = 0;
    double min_abs_b = 0.0;        // over all sampled (g, p)
    double min_gap = 0.0;          // min of 1 - Re(g)
    double max_q_drift = 0.0;      // |Q(g p) - Q(p)| worst case
    double max_frame_error = 0.0;  // |B(p, gp) - B(p0, g' p0)| under transport
    std::string note;
    bool passed() const { return failures == 0; }
};

/// Empirical freeness of the H-action: samples g with Re(g) <= 1 - delta
/// and p on Delta, transports p to the base point (1,0,0,1,0,0,0) and
/// checks |B(p, g p)| stays away from zero (it equals (1 - Re g)/2 on unit
/// representatives).
FreenessReport free_action_check(std::size_t samples, Rng& rng, double delta = 1e-3);

} // namespace c3geom
