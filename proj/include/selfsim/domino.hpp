/**
 * @file domino.hpp
 * @brief Tilesets, a finite-graph tiling solver, pattern compilation, Wang tile
 *        conversion, and the level-set decision procedure for tile-graph limits.
 *
 * A tileset constrains vertex colourings of labelled graphs: an edge (u, a, v)
 * is admissible when the triple (colour(u), a, colour(v)) is allowed.  On top
 * of the finite solver this header provides the decision procedure for graphs
 * that arise as limits of tile graphs of a bounded-activity machine: the sets
 * of boundary colourings (one per level) are iterated until they either empty
 * out or enter a cycle.
 */

#ifndef SELFSIM_DOMINO_HPP
#define SELFSIM_DOMINO_HPP

#include <cstdint>
#include <map>
#include <set>

#include "selfsim/contraction.hpp"
#include "selfsim/schreier.hpp"

namespace selfsim {

/**
 * A set of allowed colour triples over edge labels, with an optional seed
 * colour that a rooted graph must carry at its root.
 *
 * Semantics are strict: solving a graph requires every edge label to be
 * declared (use complete_tileset to make undeclared labels unconstrained).
 */
struct Tileset {
    std::vector<std::string> colors;   // declared order matters for solving
    std::vector<std::string> labels;
    std::vector<std::array<std::string, 3>> triples;  // (colour, label, colour)
    std::optional<std::string> seed;

    int color_index(const std::string& name) const;  // -1 when absent
    int label_index(const std::string& name) const;  // -1 when absent
    bool has_triple(const std::string& b, const std::string& a,
                    const std::string& b2) const;

    /// Throws Error("Invalid", ...) on duplicate names or undeclared references.
    void validate() const;

    /// Sorts and deduplicates the triple list (colour/label order is kept).
    void sort_canonical();

    static Tileset from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/**
 * Returns a copy of ts whose label set is extended to cover `labels`; every
 * label the input does not declare gets the full (unconstraining) triple set
 * B x {label} x B.  Labels already declared are left untouched.
 */
Tileset complete_tileset(const Tileset& ts,
                         const std::vector<std::string>& labels);

/**
 * Forbidden patterns over a radius-R ball of reduced words in the labels and
 * their formal inverses.  Each pattern maps such words to colours; a colouring
 * is valid when no pattern occurs at any vertex (an occurrence requires every
 * support word to be realizable as a labelled path).
 */
struct PatternSet {
    std::vector<std::string> colors;
    int radius = 1;
    // Each pattern: reduced word (space-separated tokens, "a^-1" for inverses,
    // "" or "1" for the identity) -> colour name.
    std::vector<std::map<std::string, std::string>> patterns;

    void validate() const;
    static PatternSet from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/** Dynamically sized bitset used for solver domains. */
class DynBitset {
  public:
    DynBitset() = default;
    explicit DynBitset(std::size_t n, bool fill = false);

    std::size_t size() const { return n_; }
    bool test(std::size_t i) const;
    void set(std::size_t i);
    void reset(std::size_t i);
    void set_all();
    void reset_all();
    bool any() const;
    std::size_t count() const;
    int first_set() const;                 // -1 when empty
    int next_set(std::size_t from) const;  // first set index >= from, -1 when none
    bool intersects(const DynBitset& o) const;
    DynBitset& operator&=(const DynBitset& o);
    DynBitset& operator|=(const DynBitset& o);
    bool operator==(const DynBitset& o) const;

  private:
    std::vector<std::uint64_t> w_;
    std::size_t n_ = 0;
};

enum class SolveMode { First, All };

struct SolveOptions {
    SolveMode mode = SolveMode::First;
    std::size_t max_solutions = 1u << 20;          // cap for SolveMode::All
    std::map<std::string, std::string> pins;       // forced vertex colours
};

struct SolveResult {
    bool satisfiable = false;
    std::map<std::string, std::string> coloring;   // lexicographically first
    std::vector<std::map<std::string, std::string>> solutions;  // All mode
    bool capped = false;
};

/**
 * Deterministic backtracking search with arc-consistency propagation.
 * Vertices are processed in sorted order and colours in declared order, so the
 * first solution found is the lexicographically least one.  A seeded tileset
 * pins the graph root.  Throws Error("UnknownLabel", ...) if an edge label is
 * not declared and Error("Invalid", ...) for unknown pin vertices/colours.
 */
SolveResult solve_finite(const LabelledGraph& g, const Tileset& ts,
                         const SolveOptions& opts = {});

/**
 * Arc-consistent colour domains per vertex under the given pins (and the
 * root seed, when both are present), without any search.  A vertex keeps a
 * colour only when every incident edge supports it; when the network wipes
 * out, every vertex reports an empty domain.  Singleton domains are colours
 * forced by propagation alone.
 */
std::map<std::string, std::vector<std::string>> propagate_domains(
    const LabelledGraph& g, const Tileset& ts,
    const std::map<std::string, std::string>& pins = {});

/**
 * True iff every edge triple of g is allowed and, when both are present, the
 * root carries the seed colour.  Colours outside the declared set make the
 * check fail.  Throws Error("MissingColour", vertex) on uncoloured vertices.
 */
bool check_coloring(const LabelledGraph& g, const Tileset& ts,
                    const std::map<std::string, std::string>& coloring);

/**
 * True iff no forbidden pattern of ps occurs in the colouring: an occurrence
 * at vertex v needs every support word to resolve to a path in g (inverse
 * tokens walk edges backwards) whose endpoint carries the pattern's colour.
 * Graphs are assumed deterministic per (vertex, label).
 */
bool check_patterns(const LabelledGraph& g, const PatternSet& ps,
                    const std::map<std::string, std::string>& coloring);

/**
 * Compiles a pattern set into a tileset over ball colourings.  The new colours
 * are the pattern-avoiding colourings of the radius-R ball of reduced words
 * over the labels occurring in ps; a triple (beta, a, beta') is allowed when
 * the two ball colourings agree on the overlap of their shifted domains.  The
 * returned map projects each new colour to the centre colour it carries.
 * Throws Error("CapExceeded", ...) when the ball colouring space is too large
 * to enumerate.
 */
std::pair<Tileset, std::map<std::string, std::string>>
compile_patterns(const PatternSet& ps);

/** A unit square tile with four side colours. */
struct WangTile {
    std::string name;
    std::string north, east, south, west;
};

std::vector<WangTile> wang_tiles_from_json(const nlohmann::json& j);
nlohmann::json wang_tiles_to_json(const std::vector<WangTile>& tiles);

/**
 * Converts Wang tiles to a tileset over the grid labels (1,0), (-1,0), (0,1),
 * (0,-1): a step right matches east against west, a step up matches north
 * against south, and the opposite labels encode the reversed comparisons.
 * Unnamed tiles are named "t0", "t1", ... in declaration order.
 */
Tileset wang_to_tileset(const std::vector<WangTile>& tiles);

/**
 * Product of a seeded tileset with a marker tileset whose colours project to
 * {0,1}.  Colour pairs whose marker component projects to 1 but whose main
 * component is not the seed are removed, and a triple is allowed when both
 * components allow it.  The result is unseeded.
 */
Tileset compose_seeded(const Tileset& main, const Tileset& ssu,
                       const std::map<std::string, std::string>& proj);

/**
 * The 4-colour tileset that marks loop vertices: colour "0" is the only one
 * allowed on a loop_label loop, non-loop loop_label edges must join distinct
 * colours from {"1","2","3"}, and other labels are left undeclared (complete
 * the tileset to make them unconstrained).  Returns the tileset and the marked
 * colour set {"0"}.
 */
std::pair<Tileset, std::vector<std::string>>
local_mark_tileset(const std::string& loop_label);

/**
 * The set of boundary colourings at one level: all restrictions to the level-n
 * boundary words of valid colourings of the level-n tile graph (identity loops
 * included, so a declared "1" label constrains every vertex diagonally).
 */
struct LambdaSet {
    int level = 0;
    std::vector<std::vector<int>> domain;  // sorted boundary words of length n
    std::set<std::vector<int>> maps;       // colour index per domain position

    nlohmann::json to_json(const Transducer& nuc, const Tileset& ts) const;
};

/**
 * Level-0 set: the domain is the empty word and the admissible colours are
 * those allowed on an identity loop.  The tileset must declare "1" (run
 * complete_tileset first; an uncompleted tileset raises UnknownLabel).
 */
LambdaSet initial_lambda(const Tileset& ts);

/**
 * One level of the decision procedure: glues #S copies of the level-n set
 * along the cross-copy edges whose restriction dies after one more letter and
 * returns the level-(n+1) set.  P is the post-critical data of nuc; the
 * tileset must declare "1" and every generator label.
 * Throws Error("DomainMismatch", ...) when ls.domain is not the level-n
 * boundary of P.
 */
LambdaSet lambda_step(const LambdaSet& ls, const Transducer& nuc,
                      const std::vector<PostCriticalWord>& P,
                      const Tileset& ts);

/** Outcome of the decision procedure. */
struct Decision {
    std::string verdict;       // "tileable" | "not_tileable" | "inconclusive"
    nlohmann::json witness;

    nlohmann::json to_json() const;
};

/**
 * Decides the domino problem on the limit graph of the machine's tile graphs
 * along the given ray.  The machine must be contracting with bounded activity
 * (errors NotContractingUpToBound / NotBounded otherwise).  The level sets are
 * iterated until one empties (not_tileable, witness carries the level) or a
 * cycle over the boundary bijection is detected (tileable, witness carries the
 * cycle data).  Rays whose tail matches a post-critical word additionally
 * undergo the boundary-loop compatibility check at every level where the ray
 * prefix lies on the boundary.  max_levels caps the iteration; hitting the cap
 * yields verdict "inconclusive".
 */
Decision decide_pcf(const Transducer& machine, const Tileset& ts,
                    const Ray& ray, std::size_t max_iter = 10000,
                    int max_levels = 64);

}  // namespace selfsim

#endif  // SELFSIM_DOMINO_HPP
