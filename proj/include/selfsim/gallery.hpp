/**
 * @file gallery.hpp
 * @brief Built-in machines and tilesets, the box-substitution recipe
 *        (associated transducer and connectivity classification), layered
 *        grid compositions, and desk-scale verifiers for the shipped
 *        simulations.
 */
#ifndef SELFSIM_GALLERY_HPP
#define SELFSIM_GALLERY_HPP

#include <map>
#include <string>
#include <vector>

#include "selfsim/domino.hpp"
#include "selfsim/schreier.hpp"
#include "selfsim/transducer.hpp"

namespace selfsim {

/// Machine names accepted by builtin_machine.
std::vector<std::string> builtin_machine_names();

/// Tileset names accepted by builtin_tileset.  "localmark(<label>)" stands
/// for the loop-marking tileset over the given edge label.
std::vector<std::string> builtin_tileset_names();

/// Registry of the shipped machines: "odometer" (binary adding machine),
/// "hanoi" (three-peg tower machine), "longrange" (adding machine plus the
/// power-of-two jump state) and "hgraph" (four-state machine over the
/// four-letter alphabet whose orbit graphs are binary-tree levels crossed
/// with lines).  Throws Error("UnknownName", ...).
Transducer builtin_machine(const std::string& name);

/// Registry of the shipped tilesets: "lr_sunny" (five colours forcing a
/// single 0 at the origin of the long-range graph), "lr_grid" (layered
/// marking tileset whose unique seeded solution marks powers of two and
/// sums of two powers), "hgraph_horoball" (13-colour tileset whose seeded
/// solutions draw nested horoballs) and "localmark(<label>)".
/// Throws Error("UnknownName", ...).
Tileset builtin_tileset(const std::string& name);

/// A d-dimensional box substitution: a box of sizes k_1..k_d with a set of
/// black cells given by their coordinates.
struct Substitution {
    int dims = 0;
    std::vector<int> box;                 ///< k_1..k_d, each >= 2
    std::vector<std::vector<int>> black;  ///< distinct cells inside the box

    /// Throws Error("Invalid", ...) on malformed data.
    void validate() const;

    static Substitution from_json(const json& j);
    json to_json() const;
};

/**
 * The transducer of a substitution: alphabet = the black cells (in input
 * order, named by comma-joined coordinates), states = all displacement
 * vectors in {-1,0,1}^d (named likewise).  State a maps letter v to v' with
 * next state a' exactly when v + a = v' + M a' for the box diagonal M; the
 * solution is unique when it exists and the transition is undefined
 * otherwise.  State 0^d is the identity; every other state is a generator.
 */
Transducer substitution_to_transducer(const Substitution& s);

/// Connectivity classification of a substitution.
struct SubstitutionClass {
    /// Non-identity displacement states lying on a transition cycle.
    std::vector<std::vector<int>> recurrent;
    /// Per direction t: the maximal number of pairwise vertex-disjoint
    /// flexible lines (paths from a black cell x0 to x0 + k_t e_t through
    /// black cells of the box and its translate, stepping by recurrent
    /// displacements).
    std::vector<int> flexible_lines;
    /// "bounded_connectivity" | "isthmus" | "grid" | "other".
    std::string verdict;
    /// Whether every direction admits a two-part periodic partition of the
    /// black cells crossed by exactly one direction-t adjacency per period.
    bool conjugate_to_bounded = false;
    /// Per-direction witness partitions (upper part per direction) or the
    /// failing direction.
    json witness;

    json to_json() const;
};

/// Classifies the substitution; see SubstitutionClass.  Throws
/// Error("DisconnectedBlackSet", ...) when the black cells do not form a
/// single axis-connected component.
SubstitutionClass classify_substitution(const Substitution& s);

/**
 * Layered product of a named simulation base with a set of Wang tiles.
 *
 * "lr_octant": colours are (lr_grid colour, horizontal channel, vertical
 * channel) with channels in tiles + blank.  Sum-of-two-powers colours carry
 * the placed tile on both channels, power-of-two colours reset both
 * channels to blank, all other colours copy the horizontal channel across
 * u-edges and the vertical channel across t-edges.  Edges into a
 * tile-carrying colour check east/west (u) or north/south (t) tile
 * matching unless the incoming channel is blank.
 *
 * "hgraph_strips": colours are (horoball colour, tile).  z-edges into
 * {c2,d2,b3,b4} copy the tile, z-edges into {c0,c1,b0,b1,b2} match
 * north/south, x-edges into {c0,c1} and y-edges into {d0,d1} match
 * east/west.
 *
 * Throws Error("UnknownBase", ...).
 */
Tileset grid_compose(const std::string& base, const std::vector<WangTile>& tiles);

/**
 * Desk-scale verification of a shipped simulation on a finite window of
 * size controlled by extent; returns a JSON report with a boolean "pass".
 *
 * "lr_sunny": the explicit sign/alternation colouring of the segment
 * [-2^extent, 2^extent] is valid, and pinning colour 0 anywhere but the
 * origin is refuted.
 *
 * "lr_grid": on the same segment with the seed pinned at 0, a solution
 * exists, marks powers of two and sums of two powers correctly, and every
 * interior vertex colour is forced (pinning any alternative is refuted).
 *
 * "hgraph_horoball": the rule-generated window colouring (17 x 9 at
 * extent 4) is consistent on every window edge, and arc consistency from
 * the pinned corner forces the entire marker columns at abscissae
 * 2^(s+1)-1.
 *
 * Throws Error("UnknownName", ...) and Error("ExtentTooLarge", ...).
 */
json verify_simulation(const std::string& name, int extent);

/// Integer segment [-2^extent, 2^extent] of the long-range graph: t-edges
/// n -> n+1, u-edges 2^s(2m-1) -> 2^s(2m+1), a u-loop at 0.  Vertices are
/// named by their decimal value; the root is "0".
LabelledGraph longrange_segment(int extent);

/// Window of the hgraph machine's orbit graph spanned by the vertices
/// (column i, row j) with 0 <= i < cols and 0 <= j < rows, built by acting
/// on finite words with an all-zero tail.  Vertices are named "i,j"; the
/// root is "0,0".
LabelledGraph hgraph_window(int cols, int rows);

/// The horoball colouring of a window, keyed like hgraph_window vertices:
/// column 0 is a, columns 2^(s+1)-1 are b, other even columns c, other odd
/// columns d; row 0 carries subscript 0, marker columns alternate 2/1 at
/// height multiples with 3/4 runs between, and the remaining cells carry 1
/// left of the governing marker column and 2 elsewhere.
std::map<std::string, std::string> hgraph_window_coloring(int cols, int rows);

}  // namespace selfsim

#endif  // SELFSIM_GALLERY_HPP
