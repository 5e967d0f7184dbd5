/**
 * @file schreier.hpp
 * @brief Finite level graphs of a transducer action, balls around rays in
 *        orbit graphs, and verified tree decompositions.
 */
#ifndef SELFSIM_SCHREIER_HPP
#define SELFSIM_SCHREIER_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/contraction.hpp"
#include "selfsim/transducer.hpp"

namespace selfsim {

/**
 * @brief Finite graph with string vertex ids and labelled directed edges.
 *
 * Canonical form: vertices sorted lexicographically, edges sorted by
 * (tail, label, head).  `holes` lists (vertex, label) pairs where a partial
 * action was undefined; empty for total machines.
 */
struct LabelledGraph {
    std::vector<std::string> vertices;
    std::vector<std::array<std::string, 3>> edges;  ///< tail, label, head
    std::optional<std::string> root;
    std::vector<std::pair<std::string, std::string>> holes;

    void sort_canonical();
    json to_json() const;
    static LabelledGraph from_json(const json& j);
    std::string to_dot() const;
};

enum class GraphKind { Full, Tile, Simple };

/// Vertex id of a level word: the concatenated letter tokens.
std::string level_word_id(const Transducer& t, const std::vector<int>& w);

/**
 * @brief Level-n graph of the action of the machine's generators.
 *
 * Full keeps every edge (v, g, g(v)); Tile keeps only edges whose
 * restriction is the identity; Simple is the full graph with loops dropped
 * and parallel or opposite edges merged.  Undefined transitions of partial
 * machines leave holes instead of edges.
 */
LabelledGraph build_graph(const Transducer& t, int n, GraphKind kind);

/// Drop loops and merge parallel/opposite edges, keeping the lex-least
/// label and orienting each survivor from its smaller endpoint.
LabelledGraph simplify_graph(const LabelledGraph& g);

/**
 * @brief Ball of the orbit graph around an eventually periodic ray.
 *
 * Vertices are canonical rays within the given radius of the center in the
 * undirected word metric; edges are induced generator edges.  Partial
 * actions leave holes.
 */
LabelledGraph ball_around_ray(const Transducer& t, const Ray& center, int radius);

/// Induced ball of radius r around a root vertex in the undirected sense.
LabelledGraph extract_ball(const LabelledGraph& g, const std::string& root, int radius);

/**
 * @brief Canonical serialization of a rooted deterministic labelled graph;
 *        two such graphs are isomorphic (respecting root, labels and edge
 *        directions) exactly when their forms coincide.
 */
std::string canonical_rooted_form(const LabelledGraph& g);

/// Tree decomposition: a tree whose nodes carry bags of graph vertices.
struct TreeDecomposition {
    LabelledGraph tree;
    std::map<std::string, std::vector<std::string>> bags;
    int width = 0;
};

/**
 * @brief Suffix-anchored tree decomposition of the level-n graph.
 *
 * Tree nodes are words of length <= n (a node's parent drops its first
 * letter).  The bag of a node eta mixes a free entry window of length p,
 * a post-critical middle window, a free exit window of length q and the
 * suffix eta itself.  The decomposition is verified against both axioms
 * before being returned.
 */
TreeDecomposition tree_decomposition(const Transducer& nuc,
                                     const std::vector<PostCriticalWord>& P, int n);

/// Empty string when td is a valid decomposition of g, else the reason.
std::string check_tree_decomposition(const LabelledGraph& g, const TreeDecomposition& td);

json tree_decomposition_to_json(const TreeDecomposition& td);

}  // namespace selfsim

#endif  // SELFSIM_SCHREIER_HPP
