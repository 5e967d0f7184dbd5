/**
 * @file contraction.hpp
 * @brief Nucleus computation, activity classification, post-critical sets,
 *        ancestor structure and treewidth bounds for transducers.
 */
#ifndef SELFSIM_CONTRACTION_HPP
#define SELFSIM_CONTRACTION_HPP

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/transducer.hpp"

namespace selfsim {

/// Result of the nucleus fixpoint. When contracting, `machine` holds the
/// nucleus as a transducer whose states are the nucleus elements (identity
/// first, then sorted by word length and rendered name); every non-identity
/// state is listed as a generator.
struct NucleusResult {
    bool contracting = false;
    std::size_t pairs_processed = 0;
    std::size_t max_iter = 0;
    std::optional<Transducer> machine;
};

/// Computes the nucleus by saturating products of nucleus candidates and
/// keeping the classes that keep arising as limits of restriction cycles.
/// Gives up (contracting=false) after `max_iter` candidate pairs or when
/// candidate words grow past an internal length cap.
NucleusResult nucleus(const Transducer& t, std::size_t max_iter = 10000);

/// Activity of a machine: bounded when every cycle through non-identity
/// states is simple and no such cycle reaches another. `degree` is the
/// polynomial activity degree, or nullopt for exponential activity.
struct ActivityReport {
    bool bounded = false;
    std::optional<int> degree;
};

ActivityReport activity(const Transducer& t);

/// A left-infinite word: infinitely repeated `period` followed by `suffix`.
struct PostCriticalWord {
    std::vector<int> period;
    std::vector<int> suffix;

    bool operator==(const PostCriticalWord& o) const {
        return period == o.period && suffix == o.suffix;
    }
    bool operator<(const PostCriticalWord& o) const {
        if (period != o.period) return period < o.period;
        return suffix < o.suffix;
    }
};

/// Normal form: primitive period, and no suffix letter that could be
/// absorbed into the period by rotating it.
PostCriticalWord canonical_post_critical(PostCriticalWord w);

/// Renders as "^inf p1 p2" or "^inf p1 p2 | s1 s2".
std::string render_post_critical(const Transducer& t, const PostCriticalWord& w);

/// Post-critical set of a bounded machine: all left-infinite input words
/// read along paths through non-identity states that end anywhere.
/// Throws Error("NotBounded") when the machine has unbounded activity.
std::vector<PostCriticalWord> post_critical_set(const Transducer& nuc);

/// Last n letters of a left-infinite word.
std::vector<int> truncate_post_critical(const PostCriticalWord& w, int n);

/// All length-n truncations of the words in P.
std::set<std::vector<int>> suffix_set(const std::vector<PostCriticalWord>& P, int n);

/// Equivalence structure on pairs (post-critical word, letter): two pairs
/// are merged when some non-identity nucleus element maps one extension to
/// the other along a left-infinite path. `embed` sends each post-critical
/// word to the class of (its parent, its last letter); `step[s][p]` is the
/// class of (P[p], s).
struct AncestorStructure {
    std::vector<PostCriticalWord> P;
    std::vector<std::vector<std::pair<int, int>>> classes;  ///< members as (P index, letter)
    std::vector<int> embed;                                 ///< P index -> class
    std::vector<std::vector<int>> step;                     ///< [letter][P index] -> class
    bool embed_injective = false;
    bool classes_covered = false;
    bool proper_extension = false;
};

AncestorStructure ancestor_structure(const Transducer& nuc);

/// Width data for the tree decompositions of the limit graphs: `p` bounds
/// entry paths into cycles, `q` bounds exit paths towards the identity, and
/// `bound` is #P * #alphabet^(p+q). All zero when the machine is cycle-free.
struct TreewidthReport {
    int p = 0;
    int q = 0;
    long long bound = 0;
};

TreewidthReport treewidth_bound(const Transducer& nuc);

}  // namespace selfsim

#endif  // SELFSIM_CONTRACTION_HPP
