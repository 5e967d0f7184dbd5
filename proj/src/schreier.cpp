/**
 * @file schreier.cpp
 * @brief Level graphs, orbit balls and verified tree decompositions.
 */
#include "selfsim/schreier.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace selfsim {

namespace {

std::vector<std::vector<int>> all_words(int len, int arity) {
    std::vector<std::vector<int>> out;
    std::vector<int> w(len, 0);
    for (;;) {
        out.push_back(w);
        int i = len - 1;
        while (i >= 0 && w[i] == arity - 1) w[i--] = 0;
        if (i < 0) break;
        ++w[i];
    }
    return out;
}

std::string dot_escape(const std::string& s) {
    std::string r;
    for (char c : s) {
        if (c == '"' || c == '\\') r += '\\';
        r += c;
    }
    return r;
}

}  // namespace

// -------------------------------------------------------------- LabelledGraph

void LabelledGraph::sort_canonical() {
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::sort(holes.begin(), holes.end());
    holes.erase(std::unique(holes.begin(), holes.end()), holes.end());
}

json LabelledGraph::to_json() const {
    json j;
    j["vertices"] = vertices;
    json es = json::array();
    for (const auto& e : edges) es.push_back(json::array({e[0], e[1], e[2]}));
    j["edges"] = es;
    if (root) j["root"] = *root;
    if (!holes.empty()) {
        json hs = json::array();
        for (const auto& h : holes) hs.push_back(json::array({h.first, h.second}));
        j["holes"] = hs;
    }
    return j;
}

LabelledGraph LabelledGraph::from_json(const json& j) {
    LabelledGraph g;
    if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
        throw Error("BadInput", "graph JSON needs 'vertices' and 'edges'");
    for (const auto& v : j.at("vertices")) g.vertices.push_back(v.get<std::string>());
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3)
            throw Error("BadInput", "graph edge must be [tail, label, head]");
        g.edges.push_back({e[0].get<std::string>(), e[1].get<std::string>(),
                           e[2].get<std::string>()});
    }
    if (j.contains("root") && !j.at("root").is_null()) g.root = j.at("root").get<std::string>();
    if (j.contains("holes"))
        for (const auto& h : j.at("holes"))
            g.holes.emplace_back(h[0].get<std::string>(), h[1].get<std::string>());
    std::set<std::string> known(g.vertices.begin(), g.vertices.end());
    for (const auto& e : g.edges)
        if (!known.count(e[0]) || !known.count(e[2]))
            throw Error("BadInput", "graph edge endpoint is not a declared vertex");
    if (g.root && !known.count(*g.root)) throw Error("BadInput", "root is not a declared vertex");
    g.sort_canonical();
    return g;
}

std::string LabelledGraph::to_dot() const {
    std::ostringstream os;
    os << "digraph G {\n";
    for (const auto& v : vertices) {
        os << "  \"" << dot_escape(v) << "\"";
        if (root && *root == v) os << " [root=true]";
        os << ";\n";
    }
    for (const auto& e : edges)
        os << "  \"" << dot_escape(e[0]) << "\" -> \"" << dot_escape(e[2])
           << "\" [label=\"" << dot_escape(e[1]) << "\"];\n";
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------- level graphs

std::string level_word_id(const Transducer& t, const std::vector<int>& w) {
    std::string id;
    for (int x : w) id += t.alphabet[x];
    return id;
}

LabelledGraph build_graph(const Transducer& t, int n, GraphKind kind) {
    if (n < 0) throw Error("BadInput", "level must be non-negative");
    LabelledGraph g;
    const int arity = static_cast<int>(t.alphabet.size());
    auto words = all_words(n, arity);
    for (const auto& w : words) g.vertices.push_back(level_word_id(t, w));
    std::set<std::pair<std::string, std::string>> holes;
    for (const auto& w : words) {
        for (int gi : t.generators) {
            try {
                auto [out, rest] = act_word(t, {{gi, 1}}, w);
                if (kind == GraphKind::Tile && !rest.empty()) continue;
                g.edges.push_back({level_word_id(t, w), t.states[gi].name,
                                   level_word_id(t, out)});
            } catch (const Error& err) {
                if (err.code() != "UndefinedTransition") throw;
                holes.insert({level_word_id(t, w), t.states[gi].name});
            }
        }
    }
    g.holes.assign(holes.begin(), holes.end());
    g.sort_canonical();
    if (kind == GraphKind::Simple) return simplify_graph(g);
    return g;
}

LabelledGraph simplify_graph(const LabelledGraph& g) {
    LabelledGraph s;
    s.vertices = g.vertices;
    s.root = g.root;
    s.holes = g.holes;
    std::map<std::pair<std::string, std::string>, std::string> best;
    for (const auto& e : g.edges) {
        if (e[0] == e[2]) continue;
        auto key = std::minmax(e[0], e[2]);
        auto [it, fresh] = best.try_emplace({key.first, key.second}, e[1]);
        if (!fresh && e[1] < it->second) it->second = e[1];
    }
    for (const auto& [pr, label] : best) s.edges.push_back({pr.first, label, pr.second});
    s.sort_canonical();
    return s;
}

// ----------------------------------------------------------------- orbit balls

LabelledGraph ball_around_ray(const Transducer& t, const Ray& center, int radius) {
    if (radius < 0) throw Error("BadInput", "radius must be non-negative");
    Ray c = canonical_ray(center);
    std::map<Ray, int> dist;
    std::deque<Ray> queue;
    dist[c] = 0;
    queue.push_back(c);
    std::set<std::pair<std::string, std::string>> holes;
    while (!queue.empty()) {
        Ray v = queue.front();
        queue.pop_front();
        int d = dist[v];
        if (d == radius) continue;
        for (int gi : t.generators) {
            for (int sign : {1, -1}) {
                if (sign == -1 && !t.states[gi].invertible) continue;
                std::string label =
                    sign == 1 ? t.states[gi].name : t.states[gi].name + "^-1";
                try {
                    Ray w = act_ray(t, {{gi, sign}}, v);
                    if (dist.emplace(w, d + 1).second) queue.push_back(w);
                } catch (const Error& err) {
                    if (err.code() != "UndefinedTransition") throw;
                    holes.insert({render_ray(t, v), label});
                }
            }
        }
    }
    LabelledGraph g;
    for (const auto& [v, d] : dist) g.vertices.push_back(render_ray(t, v));
    for (const auto& [v, d] : dist) {
        for (int gi : t.generators) {
            try {
                Ray w = act_ray(t, {{gi, 1}}, v);
                if (dist.count(w))
                    g.edges.push_back({render_ray(t, v), t.states[gi].name, render_ray(t, w)});
            } catch (const Error& err) {
                if (err.code() != "UndefinedTransition") throw;
                holes.insert({render_ray(t, v), t.states[gi].name});
            }
        }
    }
    g.root = render_ray(t, c);
    g.holes.assign(holes.begin(), holes.end());
    g.sort_canonical();
    return g;
}

LabelledGraph extract_ball(const LabelledGraph& g, const std::string& root, int radius) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& e : g.edges) {
        adj[e[0]].push_back(e[2]);
        adj[e[2]].push_back(e[0]);
    }
    std::map<std::string, int> dist;
    std::deque<std::string> queue;
    if (std::find(g.vertices.begin(), g.vertices.end(), root) == g.vertices.end())
        throw Error("BadInput", "root is not a vertex of the graph");
    dist[root] = 0;
    queue.push_back(root);
    while (!queue.empty()) {
        std::string v = queue.front();
        queue.pop_front();
        if (dist[v] == radius) continue;
        for (const auto& w : adj[v])
            if (dist.emplace(w, dist[v] + 1).second) queue.push_back(w);
    }
    LabelledGraph b;
    for (const auto& [v, d] : dist) b.vertices.push_back(v);
    for (const auto& e : g.edges)
        if (dist.count(e[0]) && dist.count(e[2])) b.edges.push_back(e);
    for (const auto& h : g.holes)
        if (dist.count(h.first)) b.holes.push_back(h);
    b.root = root;
    b.sort_canonical();
    return b;
}

std::string canonical_rooted_form(const LabelledGraph& g) {
    if (!g.root) throw Error("BadInput", "canonical form needs a rooted graph");
    // deterministic renumbering: breadth-first from the root, neighbours
    // visited by (label, direction) in sorted order
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> out, in;
    for (const auto& e : g.edges) {
        out[e[0]].emplace_back(e[1], e[2]);
        in[e[2]].emplace_back(e[1], e[0]);
    }
    for (auto& [v, es] : out) std::sort(es.begin(), es.end());
    for (auto& [v, es] : in) std::sort(es.begin(), es.end());
    std::map<std::string, int> id;
    std::vector<std::string> order;
    id[*g.root] = 0;
    order.push_back(*g.root);
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (const auto& [label, w] : out[order[i]])
            if (id.emplace(w, static_cast<int>(id.size())).second) order.push_back(w);
        for (const auto& [label, u] : in[order[i]])
            if (id.emplace(u, static_cast<int>(id.size())).second) order.push_back(u);
    }
    // unreachable vertices (if any) keep their lexicographic order
    for (const auto& v : g.vertices)
        if (id.emplace(v, static_cast<int>(id.size())).second) order.push_back(v);
    std::vector<std::string> lines;
    for (const auto& e : g.edges) {
        lines.push_back(std::to_string(id[e[0]]) + "-" + e[1] + "->" +
                        std::to_string(id[e[2]]));
    }
    std::sort(lines.begin(), lines.end());
    std::string form = "n=" + std::to_string(g.vertices.size()) + ";";
    for (const auto& l : lines) form += l + ";";
    return form;
}

// --------------------------------------------------------- tree decompositions

TreeDecomposition tree_decomposition(const Transducer& nuc,
                                     const std::vector<PostCriticalWord>& P, int n) {
    if (n < 0) throw Error("BadInput", "level must be non-negative");
    TreewidthReport tw = treewidth_bound(nuc);
    const int arity = static_cast<int>(nuc.alphabet.size());

    TreeDecomposition td;
    for (int k = 0; k <= n; ++k) {
        for (const auto& w : all_words(k, arity)) {
            std::string node = level_word_id(nuc, w);
            td.tree.vertices.push_back(node);
            if (k > 0) {
                std::vector<int> parent(w.begin() + 1, w.end());
                td.tree.edges.push_back({level_word_id(nuc, parent), nuc.alphabet[w[0]], node});
            }
            // bag: entry window (p free letters), post-critical middle,
            // exit window (q free letters), then the suffix itself
            std::set<std::vector<int>> members;
            int m = n - k - tw.p - tw.q;
            if (m < 0) {
                for (const auto& u : all_words(n - k, arity)) {
                    auto full = u;
                    full.insert(full.end(), w.begin(), w.end());
                    members.insert(full);
                }
            } else {
                auto mids = suffix_set(P, m);
                for (const auto& u : all_words(tw.p, arity))
                    for (const auto& v : mids)
                        for (const auto& x : all_words(tw.q, arity)) {
                            auto full = u;
                            full.insert(full.end(), v.begin(), v.end());
                            full.insert(full.end(), x.begin(), x.end());
                            full.insert(full.end(), w.begin(), w.end());
                            members.insert(full);
                        }
            }
            std::vector<std::string> bag;
            for (const auto& v : members) bag.push_back(level_word_id(nuc, v));
            std::sort(bag.begin(), bag.end());
            td.width = std::max(td.width, static_cast<int>(bag.size()) - 1);
            td.bags[node] = std::move(bag);
        }
    }
    td.tree.root = "";
    td.tree.sort_canonical();

    LabelledGraph graph = build_graph(nuc, n, GraphKind::Full);
    std::string reason = check_tree_decomposition(graph, td);
    if (!reason.empty()) throw Error("Internal", "tree decomposition invalid: " + reason);
    return td;
}

std::string check_tree_decomposition(const LabelledGraph& g, const TreeDecomposition& td) {
    // the tree is a tree
    const auto& tv = td.tree.vertices;
    std::set<std::string> tree_nodes(tv.begin(), tv.end());
    if (tv.empty()) return "empty tree";
    if (td.tree.edges.size() + 1 != tv.size()) return "tree edge count is not #nodes - 1";
    std::map<std::string, std::vector<std::string>> tadj;
    for (const auto& e : td.tree.edges) {
        if (!tree_nodes.count(e[0]) || !tree_nodes.count(e[2]))
            return "tree edge endpoint missing";
        tadj[e[0]].push_back(e[2]);
        tadj[e[2]].push_back(e[0]);
    }
    std::set<std::string> seen{tv.front()};
    std::deque<std::string> q{tv.front()};
    while (!q.empty()) {
        std::string v = q.front();
        q.pop_front();
        for (const auto& w : tadj[v])
            if (seen.insert(w).second) q.push_back(w);
    }
    if (seen.size() != tv.size()) return "tree is not connected";

    for (const auto& node : tv)
        if (!td.bags.count(node)) return "node " + node + " has no bag";
    std::set<std::string> gverts(g.vertices.begin(), g.vertices.end());
    std::map<std::string, std::set<std::string>> nodes_of;  // graph vertex -> tree nodes
    for (const auto& [node, bag] : td.bags) {
        if (!tree_nodes.count(node)) return "bag for unknown node " + node;
        for (const auto& x : bag) {
            if (!gverts.count(x)) return "bag member " + x + " is not a graph vertex";
            nodes_of[x].insert(node);
        }
    }
    for (const auto& x : g.vertices) {
        auto it = nodes_of.find(x);
        if (it == nodes_of.end()) return "vertex " + x + " is in no bag";
        // connectivity of the induced subtree
        const auto& touched = it->second;
        std::set<std::string> comp{*touched.begin()};
        std::deque<std::string> bfs{*touched.begin()};
        while (!bfs.empty()) {
            std::string v = bfs.front();
            bfs.pop_front();
            for (const auto& w : tadj[v])
                if (touched.count(w) && comp.insert(w).second) bfs.push_back(w);
        }
        if (comp.size() != touched.size()) return "bags of vertex " + x + " are disconnected";
    }
    for (const auto& e : g.edges) {
        const auto& a = nodes_of[e[0]];
        const auto& b = nodes_of[e[2]];
        bool covered = false;
        for (const auto& node : a)
            if (b.count(node)) { covered = true; break; }
        if (!covered) return "edge " + e[0] + " -" + e[1] + "-> " + e[2] + " is in no bag";
    }
    return "";
}

json tree_decomposition_to_json(const TreeDecomposition& td) {
    json bags = json::object();
    for (const auto& [node, bag] : td.bags) bags[node] = bag;
    return json{{"bags", bags}, {"tree", td.tree.to_json()}, {"width", td.width}};
}

}  // namespace selfsim
