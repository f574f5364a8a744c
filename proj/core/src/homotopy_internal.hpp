#pragma once

#include "c3geom/homotopy.hpp"

namespace c3geom::detail {

/// Applies moves to a working path while recording them.
struct PathEditor {
    EdgePath path;
    MoveLog log;
    double tol = kPathTol;

    void apply(MoveKind kind, std::size_t position, const Vertex& witness) {
        Move m{kind, position, witness};
        path = apply_move(path, m, tol);
        log.moves.push_back(m);
    }
};

struct PrimitiveSlice {
    Point x;
    Line l;
    Point y;
    Line m;
};

PrimitiveSlice slice_loop(const PathEditor& ed, std::size_t start);

void residue_connect_ed(PathEditor& ed, std::size_t first, std::size_t last,
                        const std::vector<Vertex>& replacement, const Plane& pi);

/// Removes every interior plane (endpoints are left alone; the public
/// wrapper enforces the no-plane-extremity precondition).
void eliminate_planes_ed(PathEditor& ed);

void orthogonalize_ed(PathEditor& ed, std::size_t start);

void pl_reduce_ed(PathEditor& ed, std::size_t start, KScalar l);

/// Replaces the leading line of the length-4 subpath at `start` by l_prime
/// (12 moves). Preconditions as in the pinching lemma.
void pinch_ed(PathEditor& ed, std::size_t start, const Line& l_prime);

/// Makes the first line of the length-4 subpath at `start` equal to
/// `target` (a line through the subpath's first point): up to two pinches.
void align_first_line(PathEditor& ed, std::size_t start, const Line& target);

/// Contracts the loop v[start..start+4] (v[start] == v[start+4], a point)
/// to the single vertex v[start]. Throws when the bounded fallback search
/// fails. Returns the number of moves spent.
std::size_t contract_loop4(PathEditor& ed, std::size_t start, const HomotopyOptions& opts);

} // namespace c3geom::detail
