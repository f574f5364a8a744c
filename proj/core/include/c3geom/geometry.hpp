#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "c3geom/algebra.hpp"
#include "c3geom/linalg.hpp"

namespace c3geom {

// ---------------------------------------------------------------------------
// The three geometry cases
// ---------------------------------------------------------------------------

/// (k, A, B) with dim_k A = 4 and dim_k B >= dim_k A:
/// hh = (R, H, H), ho = (R, H, O), oo = (C, O, O).
enum class GeomCase : unsigned char { hh, ho, oo };

Field field_of(GeomCase c);
Alg alg_a(GeomCase c);
Alg alg_b(GeomCase c);
const char* name(GeomCase c);

/// Coordinate threshold for picking the "first significant" k-coordinate
/// during projective canonicalization. A unit vector in at most 7 pure
/// coordinates always has one above this.
constexpr double kCanonThreshold = 0.1;

// ---------------------------------------------------------------------------
// Points, lines, planes
// ---------------------------------------------------------------------------

/// A vector k-line in Pu_k(A), stored as a canonical unit representative:
/// the first k-coordinate of modulus > threshold is made positive real.
struct Point {
    GeomCase cse;
    Element rep;
};

/// A line [a, b], a in Pu_k(A), b in Pu_k(B), |a| = |b| = 1, canonical up
/// to the common unit scalar (chosen from a's first significant coordinate).
struct Line {
    GeomCase cse;
    Element a;
    Element b;
};

/// A plane: a k-algebra embedding A -> B.
struct Plane {
    GeomCase cse;
    Embedding emb;
};

using Vertex = std::variant<Point, Line, Plane>;

/// 1 = point, 2 = line, 3 = plane.
int type_of(const Vertex& v);
GeomCase case_of(const Vertex& v);

Point make_point(GeomCase c, const Element& rep);
Line make_line(GeomCase c, const Element& a, const Element& b);
Plane make_plane(GeomCase c, const Embedding& emb);

/// Canonical right unit-scalar normalization of a pure representative.
Element canonicalize_rep(const Element& u, Field k);

bool point_equal(const Point& p, const Point& q, double tol = kDefaultTol);
bool line_equal(const Line& l, const Line& m, double tol = kDefaultTol);
bool plane_equal(const Plane& p, const Plane& q, double tol = kDefaultTol);
bool vertex_equal(const Vertex& u, const Vertex& v, double tol = kDefaultTol);

std::string describe(const Vertex& v);

// ---------------------------------------------------------------------------
// Incidence and the coplanarity criterion
// ---------------------------------------------------------------------------

/// Point-plane pairs are always incident (the geometry is flat); a point
/// <u> lies on [a,b] iff (u|a) = 0; [a,b] lies on phi iff phi(a) = b.
bool incident(const Vertex& u, const Vertex& v, double tol = kDefaultTol);

/// Lines [a,b], [c,d] are coplanar iff (a|c) = (b|d).
bool coplanar(const Line& l, const Line& m, double tol = kDefaultTol);

/// The plane containing two coplanar lines with independent directions.
Plane common_plane(const Line& l, const Line& m, double tol = 1e-7);

/// GQ residue solver: the unique line through p incident with pi and
/// coplanar with l, for p on l and l not on pi. Solves the 2x3 k-linear
/// system {(u|c) = 0, (phi(a) - b | phi(c)) = 0} and errors if its rank
/// is not exactly 2.
Line gq_project(const Point& p, const Plane& pi, const Line& l,
                double tol = kDefaultTol, double cond_tol = 1e-6);

/// Rank of the gq_project system (2 means the solution line is unique).
std::size_t gq_project_rank(const Point& p, const Plane& pi, const Line& l,
                            double cond_tol = 1e-6);

/// Orthonormal spanning pair of the k-plane a^perp in Pu_k(A).
std::pair<Element, Element> point_shadow(const Line& l);
std::pair<Element, Element> polar_line(const Point& p);

/// Deterministic unit elements of Pu_k(A) resp. Pu_k(B) orthogonal to the
/// constraint set (see unit_orthogonal_in).
Element unit_orthogonal_to(GeomCase c, const std::vector<Element>& constraints);
Element unit_orthogonal_to_b(GeomCase c, const std::vector<Element>& constraints);

/// Direction of the join of two distinct points (the unique k-line
/// orthogonal to both representatives).
Element join_direction(const Point& p, const Point& q);

/// The line of `pi` through two distinct points.
Line line_in_plane_through(const Plane& pi, const Point& p, const Point& q);

/// The intersection point of two lines of one plane (independent directions).
Point meet_in_plane(const Line& l, const Line& m);

// ---------------------------------------------------------------------------
// The flag-transitive group action
// ---------------------------------------------------------------------------

/// g = (alpha, beta) with alpha in Aut_k(A), beta in Aut_k(B):
/// points ka -> alpha(ka), lines [a,b] -> [alpha(a), beta(b)],
/// planes phi -> beta phi alpha^{-1}.
struct AutoPair {
    Embedding alpha;
    Embedding beta;
};

AutoPair identity_auto(GeomCase c);
AutoPair compose(const AutoPair& f, const AutoPair& g);
AutoPair inverse(const AutoPair& g);

Vertex apply_auto(const AutoPair& g, const Vertex& v, double tol = 1e-6);
Point apply_auto(const AutoPair& g, const Point& p);
Line apply_auto(const AutoPair& g, const Line& l);
Plane apply_auto(const AutoPair& g, const Plane& p, double tol = 1e-6);

/// A flag: pairwise incident vertices of pairwise distinct types.
struct Flag {
    std::vector<Vertex> vertices;
};

bool flag_valid(const Flag& f, double tol = kDefaultTol);

/// Group element mapping one maximal flag to another, built from embed
/// (and extend_to_automorphism when dim_k B = 8).
AutoPair flag_transporter(const Flag& f1, const Flag& f2, double tol = 1e-7);

/// A random automorphism of the case's A (resp. B), built through embed.
Embedding random_automorphism_a(GeomCase c, Rng& rng);
Embedding random_automorphism_b(GeomCase c, Rng& rng);
AutoPair random_auto(GeomCase c, Rng& rng);

// ---------------------------------------------------------------------------
// Randomized residue verification
// ---------------------------------------------------------------------------

struct ResidueReport {
    int vertex_type = 0;
    std::size_t samples = 0;
    std::size_t failures = 0;
    double max_error = 0.0;
    std::string counterexample;  // empty when everything passed
    bool passed() const { return failures == 0; }
};

/// Samples the residue axioms: type 3 -> projective plane (unique joins
/// and meets), type 2 -> generalized digon, type 1 -> generalized
/// quadrangle via gq_project existence/uniqueness.
ResidueReport verify_residue(const Vertex& v, std::size_t samples, Rng& rng,
                             double tol = 1e-6);

// ---------------------------------------------------------------------------
// Random geometry data
// ---------------------------------------------------------------------------

Point random_point(GeomCase c, Rng& rng);
Line random_line(GeomCase c, Rng& rng);
Plane random_plane(GeomCase c, Rng& rng);
Line random_line_through(const Point& p, Rng& rng);
Point random_point_on(const Line& l, Rng& rng);
Plane random_plane_through(const Line& l, Rng& rng);
Flag random_maximal_flag(GeomCase c, Rng& rng);

} // namespace c3geom
