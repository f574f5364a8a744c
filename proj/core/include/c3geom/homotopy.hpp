#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "c3geom/geometry.hpp"

namespace c3geom {

/// Tolerance used for path validity and vertex comparison inside homotopy
/// machinery (macro chains accumulate a little float error).
constexpr double kPathTol = 1e-7;

// ---------------------------------------------------------------------------
// Edge paths and elementary combinatorial deformations
// ---------------------------------------------------------------------------

/// A finite sequence of pairwise-incident, consecutively distinct vertices.
struct EdgePath {
    GeomCase cse = GeomCase::hh;
    std::vector<Vertex> v;

    std::size_t length() const { return v.empty() ? 0 : v.size() - 1; }
};

bool path_valid(const EdgePath& p, double tol = kPathTol);
void require_valid(const EdgePath& p, const char* where, double tol = kPathTol);
bool path_equal(const EdgePath& p, const EdgePath& q, double tol = kPathTol);

enum class MoveKind : unsigned char {
    insert_backtrack,  // (u) -> (u, w, u) at position
    remove_backtrack,  // (u, w, u) -> (u), position = index of the first u
    expand_edge,       // (u, v) -> (u, w, v), position = index of u
    contract_edge      // (u, w, v) -> (u, v), position = index of u
};

const char* name(MoveKind k);

struct Move {
    MoveKind kind;
    std::size_t position;
    Vertex witness;
};

/// An audited list of elementary deformations; replaying it from the source
/// path must reproduce the target exactly.
struct MoveLog {
    std::vector<Move> moves;
    std::optional<std::size_t> budget;

    std::size_t size() const { return moves.size(); }
    void append(const MoveLog& other);
};

/// Applies one move, checking the flag/backtrack conditions.
EdgePath apply_move(const EdgePath& p, const Move& m, double tol = kPathTol);

Move invert(const Move& m);
MoveLog inverted(const MoveLog& log);

EdgePath replay(const EdgePath& source, const MoveLog& log, double tol = kPathTol);

/// Serialization: one line per move, "kind position <vertex record>".
std::string serialize(const MoveLog& log);
MoveLog parse_move_log(GeomCase c, const std::string& text);
std::string serialize(const Vertex& v);
Vertex parse_vertex(GeomCase c, const std::string& text);

// ---------------------------------------------------------------------------
// Primitive edge paths and the PL-invariant
// ---------------------------------------------------------------------------

/// The loop (x, L, y, M, x): two different lines through two different points.
struct PrimitivePath {
    Point x;
    Line l;
    Point y;
    Line m;
};

PrimitivePath make_primitive(const Point& x, const Line& l, const Point& y, const Line& m,
                             double tol = kPathTol);
EdgePath to_path(const PrimitivePath& pp);
PrimitivePath primitive_from_path(const EdgePath& p, double tol = kPathTol);

/// Random primitive path; when `orthogonal` the two points are orthogonal.
PrimitivePath random_primitive(GeomCase c, Rng& rng, bool orthogonal = false);

/// The common direction of the two lines of a primitive path (both pass
/// through both points, so their canonical first components agree).
Element primitive_direction(const PrimitivePath& pp);

/// PL-invariant (b|c) of a primitive path with orthogonal points, computed
/// in the standard frame where both lines share their first component.
KScalar pl_invariant(const PrimitivePath& pp, double tol = kPathTol);

// ---------------------------------------------------------------------------
// Constructive homotopy macros (audited budgets)
// ---------------------------------------------------------------------------

template <typename T>
struct WithLog {
    T result;
    MoveLog log;
};

/// Rewrites two same-endpoint subpaths through a plane residue; the
/// emitted log has at most len(from) + len(to) moves (one more when a side
/// is a single vertex).
MoveLog residue_connect(EdgePath& path, std::size_t first, std::size_t last,
                        const std::vector<Vertex>& replacement, const Plane& pi,
                        double tol = kPathTol);

/// Removes every interior plane: at most 3*floor(k/2) moves, output length
/// at most floor(3k/2), points and lines only.
WithLog<EdgePath> eliminate_planes(const EdgePath& p, double tol = kPathTol);

/// Deforms a primitive path to one whose points are orthogonal (12 moves,
/// or none when they already are).
WithLog<PrimitivePath> orthogonalize_primitive(const PrimitivePath& pp,
                                               double tol = kPathTol);

/// PL-reduction for unimodular non-real invariant l (k = C only): returns a
/// primitive path with invariant Re(l), 12 moves.
WithLog<PrimitivePath> pl_reduce(const PrimitivePath& pp, KScalar l,
                                 double tol = kPathTol);

/// One midpoint of the directed-edge construction: unit d with
/// (b|d) = (d|c) = l given (b|c) = l^2, |l| < 1.
Element diam_step(const Element& b, const Element& c, KScalar l, Field k,
                  double tol = kPathTol);

struct DiamChain {
    std::vector<Element> nodes;  // b = v0, ..., vm = c
    std::size_t n = 0;           // the power of two used by the construction
};

/// Chain b -> c in Pu_k(B) with every consecutive Hermitian product equal
/// to l; length at most 4n where n is the first power of two with
/// |l|^n / sqrt(1 - |l|^{2n}) <= 1.
DiamChain diam_connect(const Element& b, const Element& c, KScalar l, Field k,
                       double tol = kPathTol);

/// Replaces the leading line of (x, L, y, M, z) by a given coplanar line L'
/// through x: output (x, L', y', M', z), exactly 12 moves.
WithLog<EdgePath> pinch(const EdgePath& gamma, const Line& l_prime,
                        double tol = kPathTol);

struct HomotopyOptions {
    std::size_t k_budget = 256;       // configured bound for one primitive contraction
    std::size_t search_depth = 3;     // pinch-macro search depth for the fallback
    std::size_t search_nodes = 512;   // node budget for the fallback search
    double tol = kPathTol;
};

/// Length 2l >= 6 point-line path -> length 2l - 2; at most K + 56 moves.
WithLog<EdgePath> shorten(const EdgePath& p, const HomotopyOptions& opts = {});

/// Contracts a primitive loop to its base point. Deterministic macro
/// pipeline (orthogonalize, split along an orthogonal line, pinch-search
/// base case); throws Error when the bounded search gives out.
MoveLog contract_primitive(const PrimitivePath& pp, const HomotopyOptions& opts = {});

struct ReduceStats {
    bool success = false;
    std::size_t moves = 0;
    std::size_t k_emp = 0;       // largest primitive contraction used
    std::string failure;         // reason when not successful
};

/// A move log transforming p into q (same endpoints). Tries a direct
/// difference search first, then the full plane-elimination / shorten /
/// compare pipeline; failures are reported, never silently absorbed.
WithLog<ReduceStats> reduce(const EdgePath& p, const EdgePath& q,
                            const HomotopyOptions& opts = {});

// ---------------------------------------------------------------------------
// Budget arithmetic
// ---------------------------------------------------------------------------

/// C(0) = 0, C(2) = K, C(4) = K + 55, C(k) = (k-4)(K+56) + K + 55 for k >= 6.
std::int64_t budget_c(std::int64_t k, std::int64_t k_const);

/// D(k) = C(floor(3k/2)) + 4 + 6*floor((k+2)/2).
std::int64_t budget_d(std::int64_t k, std::int64_t k_const);

// ---------------------------------------------------------------------------
// Random experiment material
// ---------------------------------------------------------------------------

/// Point-anchored random loop of even length <= max_len (points and lines,
/// optionally with planes expanded into interior positions).
EdgePath random_loop(GeomCase c, Rng& rng, std::size_t max_len, bool with_planes = false);

/// The same, anchored at a given base point.
EdgePath random_loop_at(const Point& base, Rng& rng, std::size_t max_len);

/// A random valid forward move on p (used to manufacture homotopic pairs).
Move random_move(const EdgePath& p, Rng& rng);

} // namespace c3geom
