/**
 * @file contraction.cpp
 * @brief Nucleus fixpoint, activity classification, post-critical sets,
 *        ancestor structure and treewidth bounds.
 */
#include "selfsim/contraction.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>

namespace selfsim {

namespace {

/// Strongly connected components of a multigraph given as adjacency lists;
/// returns component index per node (reverse topological order).
std::vector<int> scc_of(int n, const std::vector<std::vector<std::pair<int, int>>>& adj,
                        int& comp_count) {
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0;
    comp_count = 0;
    // iterative Tarjan
    struct Frame {
        int v;
        std::size_t edge;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> call{{root, 0}};
        while (!call.empty()) {
            auto& [v, ei] = call.back();
            if (ei == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (ei < adj[v].size()) {
                int w = adj[v][ei].second;
                ++ei;
                if (index[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                for (;;) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = comp_count;
                    if (w == v) break;
                }
                ++comp_count;
            }
            call.pop_back();
            if (!call.empty()) {
                int parent = call.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return comp;
}

/// Non-identity state digraph: adj[s] = (letter, next) for next != identity.
std::vector<std::vector<std::pair<int, int>>> nontrivial_digraph(const Transducer& t) {
    std::vector<std::vector<std::pair<int, int>>> adj(t.states.size());
    for (std::size_t s = 0; s < t.states.size(); ++s) {
        if (static_cast<int>(s) == t.identity) continue;
        for (std::size_t x = 0; x < t.alphabet.size(); ++x) {
            const auto& tr = t.states[s].transitions[x];
            if (tr && tr->second != t.identity)
                adj[s].emplace_back(static_cast<int>(x), tr->second);
        }
    }
    return adj;
}

struct CycleData {
    std::vector<bool> on_cycle;
    /// Each simple cycle as the ordered list of (node, letter read on the edge
    /// leaving it); empty when some cyclic component is not a simple cycle.
    std::vector<std::vector<std::pair<int, int>>> cycles;
    bool all_simple = true;
    int chain = 0;  ///< longest chain of cyclic components in the condensation
};

CycleData analyze_cycles(const Transducer& t) {
    const int n = static_cast<int>(t.states.size());
    auto adj = nontrivial_digraph(t);
    int nc = 0;
    std::vector<int> comp = scc_of(n, adj, nc);
    std::vector<int> internal_edges(nc, 0), comp_size(nc, 0);
    for (int v = 0; v < n; ++v) {
        if (v == t.identity) continue;
        ++comp_size[comp[v]];
        for (auto [x, w] : adj[v])
            if (comp[w] == comp[v]) ++internal_edges[comp[v]];
    }
    std::vector<bool> cyclic(nc, false);
    for (int c = 0; c < nc; ++c) cyclic[c] = internal_edges[c] > 0;

    CycleData out;
    out.on_cycle.assign(n, false);
    for (int v = 0; v < n; ++v)
        if (v != t.identity && cyclic[comp[v]]) out.on_cycle[v] = true;

    for (int c = 0; c < nc; ++c) {
        if (!cyclic[c]) continue;
        if (internal_edges[c] != comp_size[c]) {
            out.all_simple = false;
            continue;
        }
        // check one internal out-edge per node, then walk the cycle
        int start = -1;
        bool simple = true;
        for (int v = 0; v < n; ++v) {
            if (v == t.identity || comp[v] != c) continue;
            if (start == -1 || v < start) start = v;
            int internal = 0;
            for (auto [x, w] : adj[v])
                if (comp[w] == c) ++internal;
            if (internal != 1) simple = false;
        }
        if (!simple) {
            out.all_simple = false;
            continue;
        }
        std::vector<std::pair<int, int>> cyc;
        int v = start;
        do {
            for (auto [x, w] : adj[v])
                if (comp[w] == c) {
                    cyc.emplace_back(v, x);
                    v = w;
                    break;
                }
        } while (v != start);
        out.cycles.push_back(std::move(cyc));
    }

    // longest chain of cyclic components in the condensation
    std::vector<std::vector<int>> cadj(nc);
    for (int v = 0; v < n; ++v) {
        if (v == t.identity) continue;
        for (auto [x, w] : adj[v])
            if (comp[w] != comp[v]) cadj[comp[v]].push_back(comp[w]);
    }
    std::vector<int> memo(nc, -1);
    std::function<int(int)> chain = [&](int c) -> int {
        if (memo[c] >= 0) return memo[c];
        int best = 0;
        for (int d : cadj[c]) best = std::max(best, chain(d));
        memo[c] = best + (cyclic[c] ? 1 : 0);
        return memo[c];
    };
    for (int c = 0; c < nc; ++c) out.chain = std::max(out.chain, chain(c));
    return out;
}

}  // namespace

// ------------------------------------------------------------------ activity

ActivityReport activity(const Transducer& t) {
    CycleData cd = analyze_cycles(t);
    ActivityReport r;
    if (!cd.all_simple) {
        r.bounded = false;
        r.degree = std::nullopt;
        return r;
    }
    r.bounded = cd.chain <= 1;
    r.degree = std::max(cd.chain - 1, 0);
    return r;
}

// ------------------------------------------------------------------- nucleus

NucleusResult nucleus(const Transducer& t0, std::size_t max_iter) {
    const Transducer ext = inverse_closure(t0);
    constexpr std::size_t kClosureCap = 20000;
    constexpr std::size_t kLengthCap = 16;

    struct ClassInfo {
        std::string key;
        Element rep;
        std::string rep_name;
    };
    std::vector<ClassInfo> classes;
    std::map<std::string, int> class_of;
    std::deque<std::pair<int, int>> pending;
    bool overflow = false;

    auto intern = [&](const Element& e) {
        std::string key = canonical_key(ext, e);
        auto it = class_of.find(key);
        std::string name = ext.render_element(e);
        if (it != class_of.end()) {
            ClassInfo& ci = classes[it->second];
            if (std::make_pair(e.size(), name) < std::make_pair(ci.rep.size(), ci.rep_name)) {
                ci.rep = e;
                ci.rep_name = name;
            }
            return it->second;
        }
        if (e.size() > kLengthCap) {
            overflow = true;
            return -1;
        }
        int id = static_cast<int>(classes.size());
        class_of[key] = id;
        classes.push_back({key, e, name});
        for (int j = 0; j <= id; ++j) pending.emplace_back(id, j);
        for (int j = 0; j < id; ++j) pending.emplace_back(j, id);
        return id;
    };

    intern({});
    for (int g : t0.generators) {
        intern({{g, 1}});
        if (t0.states[g].invertible) intern({{g, -1}});
    }

    NucleusResult res;
    res.max_iter = max_iter;
    std::map<std::pair<int, int>, std::vector<int>> lim_sets;

    while (!pending.empty() && !overflow) {
        if (res.pairs_processed >= max_iter) {
            res.contracting = false;
            return res;
        }
        auto [ia, ib] = pending.front();
        pending.pop_front();
        ++res.pairs_processed;

        Element prod = classes[ia].rep;
        const Element& right = classes[ib].rep;
        prod.insert(prod.end(), right.begin(), right.end());

        // restriction closure of the product, nodes collapsed semantically
        std::map<std::string, int> node_of;
        std::vector<Element> nodes;
        std::vector<std::vector<std::pair<int, int>>> nadj;  // (letter, node)
        std::deque<int> todo;
        auto intern_node = [&](const Element& e) {
            std::string key = canonical_key(ext, e);
            auto it = node_of.find(key);
            if (it != node_of.end()) return it->second;
            int id = static_cast<int>(nodes.size());
            node_of[key] = id;
            nodes.push_back(e);
            nadj.emplace_back();
            todo.push_back(id);
            return id;
        };
        intern_node(prod);
        while (!todo.empty() && nodes.size() <= kClosureCap) {
            int id = todo.front();
            todo.pop_front();
            for (std::size_t x = 0; x < ext.alphabet.size(); ++x) {
                try {
                    auto [y, rest] = act_letter(ext, nodes[id], static_cast<int>(x));
                    int target = intern_node(rest);
                    nadj[id].emplace_back(static_cast<int>(x), target);
                } catch (const Error& err) {
                    if (err.code() != "UndefinedTransition") throw;
                }
            }
        }
        if (nodes.size() > kClosureCap) {
            overflow = true;
            break;
        }

        // nodes reachable from cycles
        const int nn = static_cast<int>(nodes.size());
        int nc = 0;
        std::vector<int> comp = scc_of(nn, nadj, nc);
        std::vector<int> internal(nc, 0);
        for (int v = 0; v < nn; ++v)
            for (auto [x, w] : nadj[v])
                if (comp[w] == comp[v]) ++internal[comp[v]];
        std::deque<int> bfs;
        std::vector<bool> reach(nn, false);
        for (int v = 0; v < nn; ++v)
            if (internal[comp[v]] > 0 && !reach[v]) {
                reach[v] = true;
                bfs.push_back(v);
            }
        while (!bfs.empty()) {
            int v = bfs.front();
            bfs.pop_front();
            for (auto [x, w] : nadj[v])
                if (!reach[w]) {
                    reach[w] = true;
                    bfs.push_back(w);
                }
        }
        std::vector<int> lim;
        for (int v = 0; v < nn; ++v)
            if (reach[v]) {
                int c = intern(nodes[v]);
                if (c < 0) break;
                lim.push_back(c);
            }
        if (overflow) break;
        std::sort(lim.begin(), lim.end());
        lim.erase(std::unique(lim.begin(), lim.end()), lim.end());
        lim_sets[{ia, ib}] = std::move(lim);
    }

    if (overflow) {
        res.contracting = false;
        return res;
    }

    // greatest fixpoint: keep classes that keep arising as limits
    std::vector<bool> alive(classes.size(), true);
    for (;;) {
        std::vector<bool> next(classes.size(), false);
        for (const auto& [pr, lim] : lim_sets) {
            if (!alive[pr.first] || !alive[pr.second]) continue;
            for (int c : lim)
                if (alive[c]) next[c] = true;
        }
        if (next == alive) break;
        alive = std::move(next);
    }

    // assemble the nucleus machine: identity first, then by (length, name)
    std::vector<int> kept;
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (alive[i]) kept.push_back(static_cast<int>(i));
    std::stable_sort(kept.begin(), kept.end(), [&](int a, int b) {
        bool ia = classes[a].rep.empty(), ib = classes[b].rep.empty();
        if (ia != ib) return ia;
        return std::make_pair(classes[a].rep.size(), classes[a].rep_name) <
               std::make_pair(classes[b].rep.size(), classes[b].rep_name);
    });
    std::map<std::string, int> out_index;  // canonical key -> state index
    for (std::size_t i = 0; i < kept.size(); ++i)
        out_index[classes[kept[i]].key] = static_cast<int>(i);

    Transducer nuc;
    nuc.alphabet = ext.alphabet;
    nuc.identity = 0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const ClassInfo& ci = classes[kept[i]];
        State st;
        st.name = ci.rep_name;
        st.transitions.assign(ext.alphabet.size(), std::nullopt);
        for (std::size_t x = 0; x < ext.alphabet.size(); ++x) {
            try {
                auto [y, rest] = act_letter(ext, ci.rep, static_cast<int>(x));
                std::string key = canonical_key(ext, rest);
                auto it = out_index.find(key);
                if (it == out_index.end())
                    throw Error("Internal", "nucleus not closed under restriction");
                st.transitions[x] = std::make_pair(y, it->second);
            } catch (const Error& err) {
                if (err.code() != "UndefinedTransition") throw;
            }
        }
        std::set<int> outs;
        st.invertible = true;
        for (const auto& tr : st.transitions) {
            if (!tr) { st.invertible = false; break; }
            if (!outs.insert(tr->first).second) { st.invertible = false; break; }
        }
        if (i > 0) nuc.generators.push_back(static_cast<int>(i));
        nuc.states.push_back(std::move(st));
    }
    nuc.validate();
    res.contracting = true;
    res.machine = std::move(nuc);
    return res;
}

// -------------------------------------------------------- post-critical set

PostCriticalWord canonical_post_critical(PostCriticalWord w) {
    if (w.period.empty()) throw Error("BadInput", "post-critical period must be non-empty");
    const std::size_t n = w.period.size();
    for (std::size_t d = 1; d <= n; ++d) {
        if (n % d) continue;
        bool ok = true;
        for (std::size_t i = d; i < n && ok; ++i)
            if (w.period[i] != w.period[i % d]) ok = false;
        if (ok) {
            w.period.resize(d);
            break;
        }
    }
    while (!w.suffix.empty() && w.suffix.front() == w.period.front()) {
        w.suffix.erase(w.suffix.begin());
        std::rotate(w.period.begin(), w.period.begin() + 1, w.period.end());
    }
    return w;
}

std::string render_post_critical(const Transducer& t, const PostCriticalWord& w) {
    std::string s = "^inf";
    for (int x : w.period) s += " " + t.alphabet[x];
    if (!w.suffix.empty()) {
        s += " |";
        for (int x : w.suffix) s += " " + t.alphabet[x];
    }
    return s;
}

std::vector<PostCriticalWord> post_critical_set(const Transducer& nuc) {
    ActivityReport act = activity(nuc);
    if (!act.bounded)
        throw Error("NotBounded", "post-critical set requires bounded activity");
    CycleData cd = analyze_cycles(nuc);
    auto adj = nontrivial_digraph(nuc);
    std::set<PostCriticalWord> out;

    for (const auto& cyc : cd.cycles) {
        const std::size_t m = cyc.size();
        for (std::size_t j = 0; j < m; ++j) {
            // period of the left-infinite path ending at cyc[j]
            std::vector<int> period;
            for (std::size_t i = 0; i < m; ++i) period.push_back(cyc[(j + i) % m].second);
            // all simple extensions through non-identity states
            std::vector<bool> visited(nuc.states.size(), false);
            std::vector<int> suffix;
            std::function<void(int)> dfs = [&](int v) {
                out.insert(canonical_post_critical({period, suffix}));
                visited[v] = true;
                for (auto [x, w] : adj[v]) {
                    if (visited[w]) continue;
                    suffix.push_back(x);
                    dfs(w);
                    suffix.pop_back();
                }
                visited[v] = false;
            };
            dfs(cyc[j].first);
        }
    }
    return {out.begin(), out.end()};
}

std::vector<int> truncate_post_critical(const PostCriticalWord& w, int n) {
    std::vector<int> r;
    int from_period = n - static_cast<int>(w.suffix.size());
    if (from_period > 0) {
        const int pl = static_cast<int>(w.period.size());
        for (int i = 0; i < from_period; ++i) {
            int back = from_period - i;  // distance from the suffix start
            r.push_back(w.period[((pl - (back % pl)) % pl)]);
        }
        r.insert(r.end(), w.suffix.begin(), w.suffix.end());
    } else {
        r.assign(w.suffix.end() - n, w.suffix.end());
    }
    return r;
}

std::set<std::vector<int>> suffix_set(const std::vector<PostCriticalWord>& P, int n) {
    std::set<std::vector<int>> out;
    for (const auto& w : P) out.insert(truncate_post_critical(w, n));
    return out;
}

// --------------------------------------------------------- ancestor structure

namespace {

/// Letter of a left-infinite word at backward index i >= 1 (1 = last letter).
int letter_at(const PostCriticalWord& w, long long i) {
    const long long sl = static_cast<long long>(w.suffix.size());
    if (i <= sl) return w.suffix[sl - i];
    long long j = i - sl;
    const long long pl = static_cast<long long>(w.period.size());
    return w.period[(pl - 1 - ((j - 1) % pl))];
}

/// Does a left-infinite path through non-identity states end at state g while
/// reading p as input and q as output?
bool left_infinite_path(const Transducer& t, const PostCriticalWord& p,
                        const PostCriticalWord& q, int g) {
    const int D0 = static_cast<int>(std::max(p.suffix.size(), q.suffix.size()));
    const int L = static_cast<int>(std::lcm(p.period.size(), q.period.size()));
    // phases 0..D0 are exact depths; phases D0+1..D0+L fold deeper depths mod L
    const int M = D0 + L;
    auto next_phase = [&](int c) { return c < M ? c + 1 : D0 + 1; };

    // reverse transitions: into[h] = (state h', input x, output y) with h' -> h
    std::vector<std::vector<std::tuple<int, int, int>>> into(t.states.size());
    for (std::size_t s = 0; s < t.states.size(); ++s) {
        if (static_cast<int>(s) == t.identity) continue;
        for (std::size_t x = 0; x < t.alphabet.size(); ++x) {
            const auto& tr = t.states[s].transitions[x];
            if (tr && tr->second != t.identity)
                into[tr->second].emplace_back(static_cast<int>(s), static_cast<int>(x), tr->first);
        }
    }

    const int n = static_cast<int>(t.states.size());
    auto node = [&](int state, int phase) { return state * (M + 1) + phase; };
    std::vector<bool> reach(n * (M + 1), false);
    std::deque<std::pair<int, int>> bfs;
    reach[node(g, 0)] = true;
    bfs.emplace_back(g, 0);
    std::vector<std::pair<int, int>> order;
    while (!bfs.empty()) {
        auto [h, c] = bfs.front();
        bfs.pop_front();
        order.emplace_back(h, c);
        int c2 = next_phase(c);
        // the phase value doubles as a representative depth for letter lookup
        int x = letter_at(p, c2);
        int y = letter_at(q, c2);
        for (auto [h2, xin, yout] : into[h]) {
            if (xin != x || yout != y) continue;
            if (!reach[node(h2, c2)]) {
                reach[node(h2, c2)] = true;
                bfs.emplace_back(h2, c2);
            }
        }
    }
    // infinite extension <=> a cycle among reachable folded nodes
    // (phases up to D0 strictly increase, so cycles live in [D0+1, D0+L])
    std::vector<int> color(n * (M + 1), 0);
    std::function<bool(int, int)> has_cycle = [&](int h, int c) -> bool {
        int id = node(h, c);
        color[id] = 1;
        int c2 = next_phase(c);
        int x = letter_at(p, c2), y = letter_at(q, c2);
        for (auto [h2, xin, yout] : into[h]) {
            if (xin != x || yout != y) continue;
            int id2 = node(h2, c2);
            if (!reach[id2]) continue;
            if (color[id2] == 1) return true;
            if (color[id2] == 0 && has_cycle(h2, c2)) return true;
        }
        color[id] = 2;
        return false;
    };
    for (auto [h, c] : order)
        if (color[node(h, c)] == 0 && has_cycle(h, c)) return true;
    return false;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

AncestorStructure ancestor_structure(const Transducer& nuc) {
    AncestorStructure as;
    as.P = post_critical_set(nuc);
    const int np = static_cast<int>(as.P.size());
    const int ns = static_cast<int>(nuc.alphabet.size());
    UnionFind uf(np * ns);
    auto pair_id = [&](int p, int s) { return p * ns + s; };

    for (std::size_t g = 0; g < nuc.states.size(); ++g) {
        if (static_cast<int>(g) == nuc.identity) continue;
        for (int s = 0; s < ns; ++s) {
            const auto& tr = nuc.states[g].transitions[s];
            if (!tr || tr->second != nuc.identity) continue;
            int tl = tr->first;
            for (int p = 0; p < np; ++p)
                for (int q = 0; q < np; ++q)
                    if (left_infinite_path(nuc, as.P[p], as.P[q], static_cast<int>(g)))
                        uf.unite(pair_id(p, s), pair_id(q, tl));
        }
    }

    std::map<int, int> class_idx;
    as.classes.clear();
    for (int p = 0; p < np; ++p)
        for (int s = 0; s < ns; ++s) {
            int root = uf.find(pair_id(p, s));
            auto [it, fresh] = class_idx.try_emplace(root, static_cast<int>(as.classes.size()));
            if (fresh) as.classes.emplace_back();
            as.classes[it->second].emplace_back(p, s);
        }

    as.step.assign(ns, std::vector<int>(np, -1));
    for (int s = 0; s < ns; ++s)
        for (int p = 0; p < np; ++p)
            as.step[s][p] = class_idx[uf.find(pair_id(p, s))];

    as.embed.assign(np, -1);
    for (int p = 0; p < np; ++p) {
        const PostCriticalWord& w = as.P[p];
        PostCriticalWord parent;
        int last;
        if (!w.suffix.empty()) {
            parent = w;
            last = parent.suffix.back();
            parent.suffix.pop_back();
            parent = canonical_post_critical(std::move(parent));
        } else {
            last = w.period.back();
            parent.period = w.period;
            std::rotate(parent.period.rbegin(), parent.period.rbegin() + 1, parent.period.rend());
            parent = canonical_post_critical(std::move(parent));
        }
        auto it = std::lower_bound(as.P.begin(), as.P.end(), parent);
        if (it == as.P.end() || !(*it == parent))
            throw Error("Internal", "post-critical set not closed under dropping the last letter");
        as.embed[p] = class_idx[uf.find(pair_id(static_cast<int>(it - as.P.begin()), last))];
    }

    std::set<int> embed_set(as.embed.begin(), as.embed.end());
    as.embed_injective = embed_set.size() == static_cast<std::size_t>(np);
    std::set<int> covered;
    for (int s = 0; s < ns; ++s)
        for (int p = 0; p < np; ++p) covered.insert(as.step[s][p]);
    as.classes_covered = covered.size() == as.classes.size();
    as.proper_extension = true;
    for (int s = 0; s < ns && as.proper_extension; ++s) {
        bool extra = false;
        for (int p = 0; p < np; ++p)
            if (!embed_set.count(as.step[s][p])) extra = true;
        if (!extra) as.proper_extension = false;
    }
    return as;
}

// ------------------------------------------------------------------ treewidth

TreewidthReport treewidth_bound(const Transducer& nuc) {
    TreewidthReport r;
    CycleData cd = analyze_cycles(nuc);
    if (cd.cycles.empty() && cd.chain == 0) {
        return r;  // no cycles at all: width collapses
    }
    auto adj = nontrivial_digraph(nuc);
    const int n = static_cast<int>(nuc.states.size());

    // longest path to the first on-cycle vertex
    std::vector<int> memo_f(n, -2);
    std::function<int(int)> f = [&](int v) -> int {
        if (cd.on_cycle[v]) return 0;
        if (memo_f[v] != -2) return memo_f[v];
        memo_f[v] = -1;  // no cycle reachable
        int best = -1;
        for (auto [x, w] : adj[v]) {
            int fw = f(w);
            if (fw >= 0) best = std::max(best, 1 + fw);
        }
        memo_f[v] = best;
        return best;
    };
    for (int g : nuc.generators) r.p = std::max(r.p, std::max(f(g), 0));

    // longest off-cycle path from a cycle vertex to the identity
    std::vector<int> memo_d(n, -2);
    std::function<int(int)> d = [&](int v) -> int {
        if (memo_d[v] != -2) return memo_d[v];
        memo_d[v] = -1;
        int best = -1;
        for (std::size_t x = 0; x < nuc.alphabet.size(); ++x) {
            const auto& tr = nuc.states[v].transitions[x];
            if (!tr) continue;
            if (tr->second == nuc.identity)
                best = std::max(best, 1);
            else if (!cd.on_cycle[tr->second]) {
                int dw = d(tr->second);
                if (dw >= 0) best = std::max(best, 1 + dw);
            }
        }
        memo_d[v] = best;
        return best;
    };
    for (int v = 0; v < n; ++v)
        if (v != nuc.identity && cd.on_cycle[v]) r.q = std::max(r.q, std::max(d(v), 0));

    auto P = post_critical_set(nuc);
    long long bound = static_cast<long long>(P.size());
    for (int i = 0; i < r.p + r.q; ++i) bound *= static_cast<long long>(nuc.alphabet.size());
    r.bound = bound;
    return r;
}

}  // namespace selfsim
