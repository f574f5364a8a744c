#include "c3geom/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace c3geom {

const char* name(Alg a) {
    switch (a) {
        case Alg::R: return "R";
        case Alg::C: return "C";
        case Alg::H: return "H";
        case Alg::O: return "O";
    }
    return "?";
}

const char* name(Field k) { return k == Field::Real ? "R" : "C"; }

double KScalar::abs() const { return std::sqrt(abs2()); }

KScalar KScalar::operator/(KScalar o) const {
    double d = o.abs2();
    if (d == 0.0) throw Error("KScalar division by zero");
    return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
}

Element::Element(Alg t, std::initializer_list<double> coeffs) : tag(t) {
    if (coeffs.size() > dim()) throw Error("too many coefficients for algebra");
    std::size_t i = 0;
    for (double v : coeffs) c[i++] = v;
}

Element Element::operator+(const Element& o) const {
    Element r = *this;
    r += o;
    return r;
}
Element Element::operator-(const Element& o) const {
    Element r = *this;
    r -= o;
    return r;
}
Element Element::operator-() const {
    Element r = *this;
    for (auto& v : r.c) v = -v;
    return r;
}
Element Element::operator*(double s) const {
    Element r = *this;
    r *= s;
    return r;
}
Element& Element::operator+=(const Element& o) {
    if (tag != o.tag) throw Error("algebra tag mismatch in +");
    for (std::size_t i = 0; i < 8; ++i) c[i] += o.c[i];
    return *this;
}
Element& Element::operator-=(const Element& o) {
    if (tag != o.tag) throw Error("algebra tag mismatch in -");
    for (std::size_t i = 0; i < 8; ++i) c[i] -= o.c[i];
    return *this;
}
Element& Element::operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
}

Element Element::basis(Alg t, std::size_t i) {
    if (i >= c3geom::dim(t)) throw Error("basis index out of range");
    Element e(t);
    e.c[i] = 1.0;
    return e;
}

namespace {

// Cayley-Dickson product on coefficient spans of length n (power of two):
// (x + ye)(u + ve) = (xu - conj(v) y) + (vx + y conj(u)) e.
void conj_span(std::size_t n, const double* x, double* out) {
    out[0] = x[0];
    for (std::size_t i = 1; i < n; ++i) out[i] = -x[i];
}

void mul_span(std::size_t n, const double* x, const double* y, double* out) {
    if (n == 1) {
        out[0] = x[0] * y[0];
        return;
    }
    const std::size_t h = n / 2;
    const double* a = x;
    const double* b = x + h;
    const double* u = y;
    const double* v = y + h;
    double cu[4], cv[4], t1[4], t2[4];
    conj_span(h, u, cu);
    conj_span(h, v, cv);
    // low part: a*u - conj(v)*b
    mul_span(h, a, u, t1);
    mul_span(h, cv, b, t2);
    for (std::size_t i = 0; i < h; ++i) out[i] = t1[i] - t2[i];
    // high part: v*a + b*conj(u)
    mul_span(h, v, a, t1);
    mul_span(h, b, cu, t2);
    for (std::size_t i = 0; i < h; ++i) out[h + i] = t1[i] + t2[i];
}

} // namespace

Element mul(const Element& x, const Element& y) {
    if (x.tag != y.tag) throw Error("algebra tag mismatch in mul");
    Element r(x.tag);
    mul_span(x.dim(), x.c.data(), y.c.data(), r.c.data());
    return r;
}

Element conj(const Element& x) {
    Element r = x;
    for (std::size_t i = 1; i < x.dim(); ++i) r.c[i] = -r.c[i];
    return r;
}

double norm2(const Element& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) s += x.c[i] * x.c[i];
    return s;
}

double norm(const Element& x) { return std::sqrt(norm2(x)); }

double bilinear(const Element& x, const Element& y) {
    if (x.tag != y.tag) throw Error("algebra tag mismatch in bilinear");
    double s = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) s += x.c[i] * y.c[i];
    return s;
}

bool near(const Element& a, const Element& b, double tol) {
    if (a.tag != b.tag) return false;
    double s = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        double d = a.c[i] - b.c[i];
        s += d * d;
    }
    return s <= tol * tol;
}

Element scalar_element(Alg t, KScalar l) {
    Element e(t);
    e.c[0] = l.re;
    if (l.im != 0.0) {
        if (dim(t) < 2) throw Error("complex scalar does not embed in R");
        e.c[1] = l.im;
    }
    return e;
}

Element right_scale(const Element& x, KScalar l) {
    if (l.im == 0.0) return x * l.re;
    return mul(x, scalar_element(x.tag, l));
}

Element normalized(const Element& x, double tol) {
    double n = norm(x);
    if (n <= tol) throw Error("cannot normalize a near-zero element");
    return x * (1.0 / n);
}

KDecomp k_decompose(const Element& x, Field k) {
    if (k == Field::Complex && x.dim() < 2)
        throw Error("complex ground field does not embed in R");
    KDecomp d;
    d.k_part.re = x.c[0];
    d.k_part.im = (k == Field::Complex) ? x.c[1] : 0.0;
    d.pure = x;
    d.pure.c[0] = 0.0;
    if (k == Field::Complex) d.pure.c[1] = 0.0;
    return d;
}

KScalar hermitian(const Element& x, const Element& y, Field k) {
    if (x.tag != y.tag) throw Error("algebra tag mismatch in hermitian");
    if (k == Field::Complex && x.dim() < 2)
        throw Error("complex ground field does not embed in R");
    if (k == Field::Real) return {bilinear(x, y), 0.0};
    Element p = mul(conj(x), y);
    return {p.c[0], p.c[1]};
}

bool is_pure(const Element& x, Field k, double tol) {
    if (std::fabs(x.c[0]) > tol) return false;
    if (k == Field::Complex && std::fabs(x.c[1]) > tol) return false;
    return true;
}

std::size_t pure_dim(Alg t, Field k) {
    std::size_t n = dim(t);
    std::size_t fk = field_dim(k);
    if (n < fk) throw Error("ground field does not embed");
    return (n - fk) / fk;
}

std::vector<Element> pure_basis(Alg t, Field k) {
    std::vector<Element> b;
    if (k == Field::Real) {
        for (std::size_t i = 1; i < dim(t); ++i) b.push_back(Element::basis(t, i));
    } else {
        if (dim(t) < 2) throw Error("ground field does not embed");
        for (std::size_t i = 2; i < dim(t); i += 2) b.push_back(Element::basis(t, i));
    }
    return b;
}

std::vector<Element> algebra_basis(Alg t, Field k) {
    std::vector<Element> b;
    b.push_back(Element::one(t));
    auto p = pure_basis(t, k);
    b.insert(b.end(), p.begin(), p.end());
    return b;
}

std::vector<KScalar> k_coordinates(const Element& x, Field k) {
    std::vector<KScalar> coords;
    for (const auto& b : algebra_basis(x.tag, k)) coords.push_back(hermitian(b, x, k));
    return coords;
}

std::vector<KScalar> pure_coordinates(const Element& x, Field k) {
    std::vector<KScalar> coords;
    for (const auto& b : pure_basis(x.tag, k)) coords.push_back(hermitian(b, x, k));
    return coords;
}

Element from_pure_coordinates(Alg t, Field k, const std::vector<KScalar>& coords) {
    auto basis = pure_basis(t, k);
    if (coords.size() != basis.size()) throw Error("pure coordinate count mismatch");
    Element x(t);
    for (std::size_t i = 0; i < basis.size(); ++i) x += right_scale(basis[i], coords[i]);
    return x;
}

Element random_unit_pure(Field k, Alg tag, Rng& rng) {
    const std::size_t lo = field_dim(k);
    const std::size_t n = dim(tag);
    if (n <= lo) throw Error("no pure part: ground field fills the algebra");
    for (int attempt = 0; attempt < 64; ++attempt) {
        Element x(tag);
        for (std::size_t i = lo; i < n; ++i) x.c[i] = rng.gaussian();
        double m = norm(x);
        if (m > 1e-6) return x * (1.0 / m);
    }
    throw Error("failed to sample a unit pure element");
}

std::vector<Element> orthonormal_complete(const std::vector<Element>& partial,
                                          Field k, Alg tag, double tol) {
    for (std::size_t i = 0; i < partial.size(); ++i) {
        if (partial[i].tag != tag) throw Error("orthonormal_complete: tag mismatch");
        if (!is_pure(partial[i], k, 1e-7)) throw Error("orthonormal_complete: input not pure");
        for (std::size_t j = 0; j <= i; ++j) {
            KScalar h = hermitian(partial[j], partial[i], k);
            KScalar want = (i == j) ? KScalar::one() : KScalar::zero();
            if (!near(h, want, 1e-7))
                throw Error("orthonormal_complete: partial list not orthonormal");
        }
    }
    std::vector<Element> out = partial;
    const std::size_t want = pure_dim(tag, k);
    for (const auto& cand : pure_basis(tag, k)) {
        if (out.size() == want) break;
        Element v = cand;
        for (const auto& u : out) v -= right_scale(u, hermitian(u, v, k));
        double m = norm(v);
        if (m > tol) out.push_back(v * (1.0 / m));
    }
    if (out.size() != want) throw Error("orthonormal_complete: partial list dependent");
    return out;
}

Element unit_orthogonal_in(Alg t, Field k, const std::vector<Element>& constraints) {
    // Orthonormalize the constraints first (they need not be orthonormal),
    // then return the first Gram-Schmidt completion vector after them.
    std::vector<Element> frame;
    for (const auto& w : constraints) {
        Element v = w;
        for (const auto& u : frame) v -= right_scale(u, hermitian(u, v, k));
        double n = norm(v);
        if (n > 1e-7) frame.push_back(v * (1.0 / n));
    }
    for (const auto& cand : pure_basis(t, k)) {
        Element v = cand;
        for (const auto& u : frame) v -= right_scale(u, hermitian(u, v, k));
        double n = norm(v);
        if (n > 1e-7) return v * (1.0 / n);
    }
    throw Error("unit_orthogonal_in: constraints span the whole pure space");
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

Element Embedding::apply(const Element& x) const {
    if (x.tag != source) throw Error("embedding applied to wrong algebra");
    auto coords = k_coordinates(x, k);
    Element y(target);
    for (std::size_t i = 0; i < images.size(); ++i) y += right_scale(images[i], coords[i]);
    return y;
}

Embedding Embedding::inverse() const {
    if (!is_square()) throw Error("only square embeddings invert");
    auto basis = algebra_basis(source, k);
    Embedding inv;
    inv.k = k;
    inv.source = target;
    inv.target = source;
    inv.images.resize(basis.size());
    // Adjoint of a norm-preserving map: coordinates of inv(y) in basis b_i
    // are (apply(b_i) | y).
    for (std::size_t j = 0; j < basis.size(); ++j) {
        Element img(source);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            KScalar lam = hermitian(apply(basis[i]), basis[j], k);
            img += right_scale(basis[i], lam);
        }
        inv.images[j] = img;
    }
    return inv;
}

Embedding identity_embedding(Alg t, Field k) {
    Embedding e;
    e.k = k;
    e.source = e.target = t;
    e.images = algebra_basis(t, k);
    return e;
}

Embedding compose(const Embedding& f, const Embedding& g) {
    if (f.k != g.k || f.source != g.target) throw Error("embedding composition mismatch");
    Embedding r;
    r.k = f.k;
    r.source = g.source;
    r.target = f.target;
    for (const auto& img : g.images) r.images.push_back(f.apply(img));
    return r;
}

bool embedding_near(const Embedding& f, const Embedding& g, double tol) {
    if (f.k != g.k || f.source != g.source || f.target != g.target) return false;
    if (f.images.size() != g.images.size()) return false;
    for (std::size_t i = 0; i < f.images.size(); ++i)
        if (!near(f.images[i], g.images[i], tol)) return false;
    return true;
}

Embedding embed(const Element& a, const Element& c,
                const Element& b, const Element& d,
                Field k, double tol) {
    const Alg A = a.tag;
    const Alg B = b.tag;
    if (c.tag != A || d.tag != B) throw Error("embed: tag mismatch inside a pair");
    if (pure_dim(A, k) != 3) throw Error("embed: source must be four-dimensional over k");
    if (dim(B) < dim(A)) throw Error("embed: target smaller than source");
    if (!is_pure(a, k, 1e-7) || !is_pure(c, k, 1e-7) ||
        !is_pure(b, k, 1e-7) || !is_pure(d, k, 1e-7))
        throw Error("embed: arguments must be k-pure");
    for (const Element* e : {&a, &c, &b, &d})
        if (std::fabs(norm2(*e) - 1.0) > 1e-6) throw Error("embed: arguments must be unit norm");

    KScalar ac = hermitian(a, c, k);
    KScalar bd = hermitian(b, d, k);
    if (!near(ac, bd, tol)) throw Error("embed: inner products (a|c) and (b|d) differ");
    if (1.0 - ac.abs2() < 1e-10) throw Error("embed: proportional pair a*k = c*k");

    // Orthogonalize with a shared real scale so that phi(c) = d exactly.
    Element cp = c - right_scale(a, ac);
    Element dp = d - right_scale(b, bd);
    double s = norm(cp);
    if (s < 1e-7) throw Error("embed: proportional pair a*k = c*k");
    cp *= 1.0 / s;
    dp *= 1.0 / norm(dp);

    Element acp = mul(a, cp);
    Element bdp = mul(b, dp);

    // Images of the canonical algebra basis: expand each basis vector in the
    // Hermitian-orthonormal frame (1, a, cp, a*cp) and map it over.
    const std::array<const Element*, 4> src{nullptr, &a, &cp, &acp};
    const std::array<const Element*, 4> dst{nullptr, &b, &dp, &bdp};
    Embedding phi;
    phi.k = k;
    phi.source = A;
    phi.target = B;
    for (const auto& bas : algebra_basis(A, k)) {
        Element img = scalar_element(B, hermitian(Element::one(A), bas, k));
        for (int i = 1; i < 4; ++i)
            img += right_scale(*dst[i], hermitian(*src[i], bas, k));
        phi.images.push_back(img);
    }
    return phi;
}

Embedding extend_to_automorphism(const Embedding& phi, const Element& g, double tol) {
    if (phi.k != Field::Real || phi.source != Alg::H || phi.target != Alg::O)
        throw Error("extend_to_automorphism expects a real embedding H -> O");
    if (g.tag != Alg::O) throw Error("extend_to_automorphism: g must live in O");
    if (std::fabs(norm2(g) - 1.0) > 1e-6) throw Error("extend_to_automorphism: g not unit");
    for (const auto& img : phi.images)
        if (std::fabs(bilinear(g, img)) > tol)
            throw Error("extend_to_automorphism: g not orthogonal to the image");

    // O = H + H*e4, and e_{i+4} = e_i * e4; send x + y*e4 to phi(x) + phi(y)*g.
    Embedding psi;
    psi.k = Field::Real;
    psi.source = psi.target = Alg::O;
    psi.images.resize(8);
    for (std::size_t i = 0; i < 4; ++i) {
        Element hi = Element::basis(Alg::H, i);
        Element img = phi.apply(hi);
        psi.images[i] = img;
        psi.images[i + 4] = mul(img, g);
    }
    return psi;
}

double multiplicativity_defect(const Embedding& e, std::size_t samples, Rng& rng) {
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        Element x(e.source), y(e.source);
        for (std::size_t i = 0; i < dim(e.source); ++i) {
            x.c[i] = rng.gaussian();
            y.c[i] = rng.gaussian();
        }
        Element lhs = e.apply(mul(x, y));
        Element rhs = mul(e.apply(x), e.apply(y));
        worst = std::max(worst, norm(lhs - rhs));
    }
    return worst;
}

} // namespace c3geom
