#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "c3geom/rng.hpp"

namespace c3geom {

/// Error type for precondition violations and numerically degenerate input.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

constexpr double kDefaultTol = 1e-9;

// ---------------------------------------------------------------------------
// Algebra tags and ground fields
// ---------------------------------------------------------------------------

/// The four real composition algebras, by real dimension 1, 2, 4, 8.
enum class Alg : unsigned char { R, C, H, O };

constexpr std::size_t dim(Alg a) {
    switch (a) {
        case Alg::R: return 1;
        case Alg::C: return 2;
        case Alg::H: return 4;
        case Alg::O: return 8;
    }
    return 0;
}

const char* name(Alg a);

/// Ground field k, embedded as span{e0} (real) or span{e0, e1} (complex).
enum class Field : unsigned char { Real, Complex };

constexpr std::size_t field_dim(Field k) { return k == Field::Real ? 1 : 2; }

const char* name(Field k);

// ---------------------------------------------------------------------------
// KScalar: an element of k with conjugation and modulus
// ---------------------------------------------------------------------------

struct KScalar {
    double re = 0.0;
    double im = 0.0;

    constexpr KScalar() = default;
    constexpr KScalar(double r, double i = 0.0) : re(r), im(i) {}

    constexpr KScalar conj() const { return {re, -im}; }
    constexpr double abs2() const { return re * re + im * im; }
    double abs() const;

    constexpr KScalar operator+(KScalar o) const { return {re + o.re, im + o.im}; }
    constexpr KScalar operator-(KScalar o) const { return {re - o.re, im - o.im}; }
    constexpr KScalar operator-() const { return {-re, -im}; }
    constexpr KScalar operator*(KScalar o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    constexpr KScalar operator*(double s) const { return {re * s, im * s}; }
    KScalar operator/(KScalar o) const;

    static constexpr KScalar zero() { return {0.0, 0.0}; }
    static constexpr KScalar one() { return {1.0, 0.0}; }
    static constexpr KScalar i() { return {0.0, 1.0}; }
};

inline bool near(KScalar a, KScalar b, double tol = kDefaultTol) {
    return (a - b).abs2() <= tol * tol;
}

// ---------------------------------------------------------------------------
// Element: coefficient vector in the basis e0 = 1, e1, ..., e_{n-1}
// ---------------------------------------------------------------------------

/// An element of R, C, H or O. The multiplication table is fixed by the
/// Cayley-Dickson doubling (x + ye)(u + ve) = (xu - conj(v)y) + (vx + y conj(u))e,
/// doubling R -> C -> H -> O, so that e.g. e1*e2 = e3 and e4*e1 = -e5.
struct Element {
    Alg tag = Alg::R;
    std::array<double, 8> c{};

    Element() = default;
    explicit Element(Alg t) : tag(t) {}
    Element(Alg t, std::initializer_list<double> coeffs);

    std::size_t dim() const { return c3geom::dim(tag); }
    double& operator[](std::size_t i) { return c[i]; }
    double operator[](std::size_t i) const { return c[i]; }

    Element operator+(const Element& o) const;
    Element operator-(const Element& o) const;
    Element operator-() const;
    Element operator*(double s) const;
    Element& operator+=(const Element& o);
    Element& operator-=(const Element& o);
    Element& operator*=(double s);

    static Element basis(Alg t, std::size_t i);
    static Element zero(Alg t) { return Element(t); }
    static Element one(Alg t) { return basis(t, 0); }
};

/// Composition-algebra product. Throws on tag mismatch.
Element mul(const Element& x, const Element& y);

/// Standard involution: fixes e0, negates e1..e_{n-1}.
Element conj(const Element& x);

double norm2(const Element& x);
double norm(const Element& x);

/// Positive-definite real bilinear form <x,y> = sum x_i y_i.
double bilinear(const Element& x, const Element& y);

bool near(const Element& a, const Element& b, double tol = kDefaultTol);

/// The scalar l embedded as l.re*e0 + l.im*e1.
Element scalar_element(Alg t, KScalar l);

/// Right scalar multiplication x * l (A as a right k-vector space).
Element right_scale(const Element& x, KScalar l);

Element normalized(const Element& x, double tol = 1e-14);

// ---------------------------------------------------------------------------
// k-pure decomposition and the Hermitian inner product
// ---------------------------------------------------------------------------

struct KDecomp {
    KScalar k_part;
    Element pure;
};

/// Splits x = k_part + pure with pure orthogonal to the embedded k.
/// Requires k to embed in the tag of x (Complex needs dim >= 2).
KDecomp k_decompose(const Element& x, Field k);

/// Hermitian inner product (x|y): the k-part of conj(x)*y. Conjugate-linear
/// in x, linear in y, with Re(x|y) = <x,y> and (x|x) = |x|^2.
KScalar hermitian(const Element& x, const Element& y, Field k);

bool is_pure(const Element& x, Field k, double tol = kDefaultTol);

/// Dimension of Pu_k(A) over k.
std::size_t pure_dim(Alg t, Field k);

/// Canonical k-basis of Pu_k(A): (e1, ..., e_{n-1}) for k = R and
/// (e2, e4, e6) for k = C inside O.
std::vector<Element> pure_basis(Alg t, Field k);

/// Canonical k-basis of all of A used to store embeddings: (e0, e1, ...)
/// for k = R and (1, e2, e4, e6) for k = C inside O.
std::vector<Element> algebra_basis(Alg t, Field k);

/// Hermitian coordinates of x in the canonical algebra_basis.
std::vector<KScalar> k_coordinates(const Element& x, Field k);

/// Hermitian coordinates of a pure element in the canonical pure_basis.
std::vector<KScalar> pure_coordinates(const Element& x, Field k);

Element from_pure_coordinates(Alg t, Field k, const std::vector<KScalar>& coords);

/// Unit element of Pu_k(tag), uniform via normalized Gaussian coordinates.
Element random_unit_pure(Field k, Alg tag, Rng& rng);

/// Completes a partial Hermitian-orthonormal list to a full orthonormal
/// k-basis of Pu_k(tag) by Gram-Schmidt over the fixed candidate order.
/// Throws if the partial list is not orthonormal.
std::vector<Element> orthonormal_complete(const std::vector<Element>& partial,
                                          Field k, Alg tag,
                                          double tol = 1e-7);

/// Deterministic unit element of Pu_k(t) orthogonal to every element of
/// `constraints` (the constraints are orthonormalized first, then the first
/// Gram-Schmidt completion vector is returned).
Element unit_orthogonal_in(Alg t, Field k, const std::vector<Element>& constraints);

// ---------------------------------------------------------------------------
// Embeddings (Prop.-2.1-style k-algebra morphisms)
// ---------------------------------------------------------------------------

/// A k-linear algebra morphism source -> target, stored as the images of
/// the canonical algebra_basis(source, k). Norm-preserving by construction;
/// multiplicativity is a verified property, never assumed.
struct Embedding {
    Field k = Field::Real;
    Alg source = Alg::H;
    Alg target = Alg::H;
    std::vector<Element> images;

    Element apply(const Element& x) const;

    /// Inverse of a square norm-preserving embedding (the Hermitian adjoint).
    Embedding inverse() const;

    bool is_square() const { return source == target; }
};

Embedding identity_embedding(Alg t, Field k);

/// f after g (f: B -> C, g: A -> B).
Embedding compose(const Embedding& f, const Embedding& g);

bool embedding_near(const Embedding& f, const Embedding& g, double tol = kDefaultTol);

/// The Prop.-2.1 constructor: the unique k-algebra morphism A -> B sending
/// (a, c) to (b, d), for unit pure a, c in A and b, d in B with
/// (a|c) = (b|d) and a k-independent from c. Built on the orthogonalized
/// basis (1, a, c_perp, a*c_perp) -> (1, b, d_perp, b*d_perp).
Embedding embed(const Element& a, const Element& c,
                const Element& b, const Element& d,
                Field k, double tol = 1e-7);

/// Doubling extension of phi: H -> O to an automorphism of O:
/// psi(x + y*e4) = phi(x) + phi(y)*g for a unit pure g orthogonal to im(phi).
Embedding extend_to_automorphism(const Embedding& phi, const Element& g,
                                 double tol = 1e-7);

/// Samples x, y pairs and measures max |phi(xy) - phi(x)phi(y)|.
double multiplicativity_defect(const Embedding& e, std::size_t samples, Rng& rng);

} // namespace c3geom
