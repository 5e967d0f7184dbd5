/**
 * @file gallery.cpp
 * @brief Built-in machines and tilesets, the box-substitution recipe,
 *        layered grid compositions, and the shipped simulation verifiers.
 */
#include "selfsim/gallery.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace selfsim {

namespace {

// ------------------------------------------------------------------ machines

// Binary adding machine: t adds one with carry.
const char* kOdometerJson = R"({
  "alphabet": ["0", "1"],
  "identity": "e",
  "states": [
    {"name": "e", "invertible": true,
     "transitions": {"0": ["0", "e"], "1": ["1", "e"]}},
    {"name": "t", "invertible": true,
     "transitions": {"0": ["1", "e"], "1": ["0", "t"]}}
  ],
  "generators": ["t"]
})";

// Three-peg tower machine: a, b, c are involutions, each fixing one letter.
const char* kHanoiJson = R"({
  "alphabet": ["0", "1", "2"],
  "identity": "e",
  "states": [
    {"name": "e", "invertible": true,
     "transitions": {"0": ["0", "e"], "1": ["1", "e"], "2": ["2", "e"]}},
    {"name": "a", "invertible": true,
     "transitions": {"0": ["1", "e"], "1": ["0", "e"], "2": ["2", "a"]}},
    {"name": "b", "invertible": true,
     "transitions": {"0": ["2", "e"], "2": ["0", "e"], "1": ["1", "b"]}},
    {"name": "c", "invertible": true,
     "transitions": {"1": ["2", "e"], "2": ["1", "e"], "0": ["0", "c"]}}
  ],
  "generators": ["a", "b", "c"]
})";

// Adding machine plus the power-of-two jump state u.
const char* kLongRangeJson = R"({
  "alphabet": ["0", "1"],
  "identity": "e",
  "states": [
    {"name": "e", "invertible": true,
     "transitions": {"0": ["0", "e"], "1": ["1", "e"]}},
    {"name": "t", "invertible": true,
     "transitions": {"0": ["1", "e"], "1": ["0", "t"]}},
    {"name": "u", "invertible": true,
     "transitions": {"0": ["0", "u"], "1": ["1", "t"]}}
  ],
  "generators": ["t", "u"]
})";

// Four-state machine over paired bits "uv".  The u track carries a reflected
// binary (Gray) column code and the v track a plain binary row code: x flips
// the first column bit, z adds one to the row, and y scans past "00" letters
// and then either flips the next column bit (via x) or dies.  Its orbit
// graphs are binary-tree levels crossed with lines.
const char* kHgraphJson = R"({
  "alphabet": ["00", "01", "10", "11"],
  "identity": "e",
  "states": [
    {"name": "e", "invertible": true,
     "transitions": {"00": ["00", "e"], "01": ["01", "e"],
                     "10": ["10", "e"], "11": ["11", "e"]}},
    {"name": "x", "invertible": true,
     "transitions": {"00": ["10", "e"], "01": ["11", "e"],
                     "10": ["00", "e"], "11": ["01", "e"]}},
    {"name": "y", "invertible": true,
     "transitions": {"00": ["00", "y"], "10": ["10", "x"],
                     "01": ["01", "e"], "11": ["11", "e"]}},
    {"name": "z", "invertible": true,
     "transitions": {"00": ["01", "e"], "10": ["11", "e"],
                     "01": ["00", "z"], "11": ["10", "z"]}}
  ],
  "generators": ["x", "y", "z"]
})";

// ------------------------------------------------------------------ tilesets

Tileset make_lr_sunny() {
    Tileset ts;
    ts.colors = {"0", "-0", "-1", "+0", "+1"};
    ts.labels = {"t", "u"};
    auto add = [&](const std::string& a, const std::string& l, const std::string& b) {
        ts.triples.push_back({a, l, b});
    };
    // The sign tracks which side of the origin a vertex lies on and the
    // digit alternates along jump orbits; only the origin may carry "0".
    add("0", "u", "0");
    add("0", "t", "+0");
    add("0", "t", "+1");
    for (const char* i : {"0", "1"})
        for (const char* j : {"0", "1"}) {
            add(std::string("+") + i, "t", std::string("+") + j);
            add(std::string("-") + i, "t", std::string("-") + j);
        }
    add("-0", "t", "0");
    add("-1", "t", "0");
    for (const char* s : {"+", "-"})
        for (const char* s2 : {"+", "-"}) {
            add(std::string(s) + "0", "u", std::string(s2) + "1");
            add(std::string(s) + "1", "u", std::string(s2) + "0");
        }
    ts.sort_canonical();
    return ts;
}

std::string lr_grid_name(const std::string& sign, const std::string& parity,
                         const std::string& q) {
    return sign + "." + parity + "." + q;
}

std::string lr_grid_base(const std::string& parity) {
    if (parity == "pe") return "e";
    if (parity == "po") return "o";
    return parity;
}

Tileset make_lr_grid() {
    static const std::vector<std::string> signs = {"-", "0", "+"};
    static const std::vector<std::string> parities = {"e", "o", "pe", "po"};
    static const std::vector<std::string> qs = {"-", "q"};
    Tileset ts;
    for (const auto& s : signs)
        for (const auto& p : parities)
            for (const auto& q : qs) ts.colors.push_back(lr_grid_name(s, p, q));
    ts.labels = {"t", "u"};
    // Step edges keep the parity track except when entering a power mark,
    // where the underlying parity flips.
    static const std::vector<std::pair<std::string, std::string>> t_signs = {
        {"-", "-"}, {"-", "0"}, {"0", "+"}, {"+", "+"}};
    static const std::vector<std::pair<std::string, std::string>> t_parities = {
        {"e", "e"},  {"e", "po"}, {"o", "o"},  {"o", "pe"},
        {"pe", "e"}, {"pe", "po"}, {"po", "o"}, {"po", "pe"}};
    for (const auto& [s, s2] : t_signs)
        for (const auto& [p, p2] : t_parities)
            for (const auto& q : qs)
                for (const auto& q2 : qs)
                    ts.triples.push_back({lr_grid_name(s, p, q), "t",
                                          lr_grid_name(s2, p2, q2)});
    // Jump edges: the target is power-marked exactly on the (-,+) crossing,
    // and otherwise carries the q mark exactly when the underlying parity
    // changes across the jump.
    for (const auto& s : signs)
        for (const auto& s2 : signs) {
            bool power = (s == "-" && s2 == "+");
            for (const auto& p : parities)
                for (const auto& q : qs) {
                    if (power) {
                        for (const char* p2 : {"pe", "po"})
                            ts.triples.push_back({lr_grid_name(s, p, q), "u",
                                                  lr_grid_name(s2, p2, "-")});
                    } else {
                        for (const char* p2 : {"e", "o"}) {
                            std::string q2 =
                                (lr_grid_base(p) != p2) ? "q" : "-";
                            ts.triples.push_back({lr_grid_name(s, p, q), "u",
                                                  lr_grid_name(s2, p2, q2)});
                        }
                    }
                }
        }
    ts.seed = "0.e.-";
    ts.sort_canonical();
    return ts;
}

Tileset make_hgraph_horoball() {
    Tileset ts;
    ts.colors = {"a0", "a1", "b0", "b1", "b2", "b3", "b4",
                 "c0", "c1", "c2", "d0", "d1", "d2"};
    ts.labels = {"x", "y", "z"};
    static const char* x_list[][2] = {
        {"a0", "b0"}, {"b0", "c0"}, {"c0", "d0"}, {"a1", "b1"}, {"a1", "b2"},
        {"b1", "c1"}, {"b2", "c1"}, {"c1", "d1"}, {"b3", "c2"}, {"b4", "c2"},
        {"c2", "d2"}};
    static const char* y_list[][2] = {
        {"a0", "a0"}, {"b0", "c0"}, {"c0", "d0"}, {"a1", "a1"}, {"b1", "c1"},
        {"b2", "b2"}, {"c1", "d1"}, {"b3", "b3"}, {"b4", "b4"}, {"c2", "c2"},
        {"c2", "d2"}, {"d2", "d2"}};
    static const char* z_list[][2] = {
        {"a0", "a1"}, {"a1", "a0"}, {"a1", "a1"}, {"b0", "b2"}, {"b0", "b3"},
        {"b1", "b2"}, {"b1", "b3"}, {"b2", "b0"}, {"b2", "b1"}, {"b2", "b4"},
        {"b3", "b2"}, {"b3", "b3"}, {"b4", "b0"}, {"b4", "b1"}, {"b4", "b4"},
        {"c0", "c2"}, {"c1", "c2"}, {"c2", "c0"}, {"c2", "c1"}, {"c2", "c2"},
        {"d0", "d2"}, {"d1", "d2"}, {"d2", "d0"}, {"d2", "d1"}, {"d2", "d2"}};
    std::set<std::array<std::string, 3>> triples;
    // x and y act as involutions on the orbit graphs, so their constraint
    // lists are closed under reversal; z is directed (one row up).
    for (const auto& e : x_list) {
        triples.insert({e[0], "x", e[1]});
        triples.insert({e[1], "x", e[0]});
    }
    for (const auto& e : y_list) {
        triples.insert({e[0], "y", e[1]});
        triples.insert({e[1], "y", e[0]});
    }
    for (const auto& e : z_list) triples.insert({e[0], "z", e[1]});
    ts.triples.assign(triples.begin(), triples.end());
    ts.seed = "a0";
    ts.sort_canonical();
    return ts;
}

// ------------------------------------------------------------------- helpers

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

int pow2_floor_log(int n) {  // largest s with 2^s dividing n, n > 0
    int s = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++s;
    }
    return s;
}

}  // namespace

// ----------------------------------------------------------------- registry

std::vector<std::string> builtin_machine_names() {
    return {"hanoi", "hgraph", "longrange", "odometer"};
}

std::vector<std::string> builtin_tileset_names() {
    return {"hgraph_horoball", "localmark(<label>)", "lr_grid", "lr_sunny"};
}

Transducer builtin_machine(const std::string& name) {
    const char* text = nullptr;
    if (name == "odometer")
        text = kOdometerJson;
    else if (name == "hanoi")
        text = kHanoiJson;
    else if (name == "longrange")
        text = kLongRangeJson;
    else if (name == "hgraph")
        text = kHgraphJson;
    if (!text) throw Error("UnknownName", "no builtin machine '" + name + "'");
    Transducer t = Transducer::from_json(json::parse(text));
    t.validate();
    return t;
}

Tileset builtin_tileset(const std::string& name) {
    if (name == "lr_sunny") return make_lr_sunny();
    if (name == "lr_grid") return make_lr_grid();
    if (name == "hgraph_horoball") return make_hgraph_horoball();
    if (name.size() > 11 && name.compare(0, 10, "localmark(") == 0 &&
        name.back() == ')') {
        std::string label = name.substr(10, name.size() - 11);
        if (!label.empty()) return local_mark_tileset(label).first;
    }
    throw Error("UnknownName", "no builtin tileset '" + name + "'");
}

// ------------------------------------------------------------- substitution

void Substitution::validate() const {
    if (dims < 1 || dims > 6)
        throw Error("Invalid", "dims must be between 1 and 6");
    if (static_cast<int>(box.size()) != dims)
        throw Error("Invalid", "box size list must have one entry per dimension");
    for (int k : box)
        if (k < 2) throw Error("Invalid", "box sides must be at least 2");
    if (black.empty()) throw Error("Invalid", "no black cells");
    std::set<std::vector<int>> seen;
    for (const auto& c : black) {
        if (static_cast<int>(c.size()) != dims)
            throw Error("Invalid", "cell arity mismatch");
        for (int i = 0; i < dims; ++i)
            if (c[i] < 0 || c[i] >= box[i])
                throw Error("Invalid", "cell " + join_ints(c) + " outside the box");
        if (!seen.insert(c).second)
            throw Error("Invalid", "duplicate cell " + join_ints(c));
    }
}

Substitution Substitution::from_json(const json& j) {
    if (!j.is_object()) throw Error("BadInput", "substitution JSON must be an object");
    Substitution s;
    try {
        s.dims = j.at("dims").get<int>();
        s.box = j.at("box").get<std::vector<int>>();
        s.black = j.at("black").get<std::vector<std::vector<int>>>();
    } catch (const json::exception& e) {
        throw Error("BadInput", std::string("substitution JSON: ") + e.what());
    }
    s.validate();
    return s;
}

json Substitution::to_json() const {
    return json{{"dims", dims}, {"box", box}, {"black", black}};
}

namespace {

// All displacement vectors in {-1,0,1}^d, identity first, the rest in
// lexicographic order with the last component fastest.
std::vector<std::vector<int>> displacement_order(int d) {
    std::vector<std::vector<int>> all;
    std::vector<int> cur(static_cast<std::size_t>(d), -1);
    for (;;) {
        all.push_back(cur);
        int i = d - 1;
        while (i >= 0 && cur[i] == 1) {
            cur[i] = -1;
            --i;
        }
        if (i < 0) break;
        ++cur[i];
    }
    std::vector<std::vector<int>> out;
    std::vector<int> zero(static_cast<std::size_t>(d), 0);
    out.push_back(zero);
    for (const auto& v : all)
        if (v != zero) out.push_back(v);
    return out;
}

// The unique (cell', disp') with cell + disp = cell' + box*disp', or nullopt
// when cell' is not black.
std::optional<std::pair<std::vector<int>, std::vector<int>>>
substitution_step(const Substitution& s, const std::vector<int>& cell,
                  const std::vector<int>& disp) {
    std::vector<int> target(cell);
    std::vector<int> nd(static_cast<std::size_t>(s.dims));
    for (int i = 0; i < s.dims; ++i) {
        target[i] += disp[i];
        if (target[i] < 0)
            nd[i] = -1;
        else if (target[i] >= s.box[i])
            nd[i] = 1;
        else
            nd[i] = 0;
        target[i] -= s.box[i] * nd[i];
    }
    for (const auto& c : s.black)
        if (c == target) return std::make_pair(target, nd);
    return std::nullopt;
}

}  // namespace

Transducer substitution_to_transducer(const Substitution& s) {
    s.validate();
    Transducer t;
    std::map<std::vector<int>, int> cell_index;
    for (std::size_t i = 0; i < s.black.size(); ++i) {
        t.alphabet.push_back(join_ints(s.black[i]));
        cell_index[s.black[i]] = static_cast<int>(i);
    }
    std::vector<std::vector<int>> disp = displacement_order(s.dims);
    std::map<std::vector<int>, int> disp_index;
    for (std::size_t i = 0; i < disp.size(); ++i)
        disp_index[disp[i]] = static_cast<int>(i);
    for (const auto& d : disp) {
        State st;
        st.name = join_ints(d);
        st.invertible = true;
        st.transitions.assign(s.black.size(), std::nullopt);
        for (std::size_t v = 0; v < s.black.size(); ++v) {
            auto step = substitution_step(s, s.black[v], d);
            if (step)
                st.transitions[v] = std::make_pair(cell_index.at(step->first),
                                                   disp_index.at(step->second));
        }
        t.states.push_back(std::move(st));
    }
    t.identity = 0;
    for (int i = 1; i < static_cast<int>(t.states.size()); ++i)
        t.generators.push_back(i);
    t.validate();
    return t;
}

namespace {

// Non-identity displacements lying on a cycle of the restriction relation.
std::vector<std::vector<int>> recurrent_displacements(const Substitution& s) {
    std::vector<std::vector<int>> disp = displacement_order(s.dims);
    const int n = static_cast<int>(disp.size());
    std::vector<std::set<int>> succ(static_cast<std::size_t>(n));
    std::map<std::vector<int>, int> index;
    for (int i = 0; i < n; ++i) index[disp[i]] = i;
    for (int i = 0; i < n; ++i)
        for (const auto& c : s.black) {
            auto step = substitution_step(s, c, disp[static_cast<std::size_t>(i)]);
            if (step) succ[static_cast<std::size_t>(i)].insert(index.at(step->second));
        }
    std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n),
                                         std::vector<bool>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j : succ[static_cast<std::size_t>(i)])
            reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)])
                for (int j = 0; j < n; ++j)
                    if (reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])
                        reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
    std::vector<std::vector<int>> out;
    for (int i = 1; i < n; ++i)
        if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)])
            out.push_back(disp[static_cast<std::size_t>(i)]);
    return out;
}

// Maximum number of pairwise disjoint vertex sets, by branch and bound.
int max_disjoint(const std::vector<std::uint64_t>& masks) {
    int best = 0;
    std::function<void(std::size_t, std::uint64_t, int)> go =
        [&](std::size_t i, std::uint64_t used, int cnt) {
            best = std::max(best, cnt);
            if (i >= masks.size()) return;
            if (cnt + static_cast<int>(masks.size() - i) <= best) return;
            if (!(masks[i] & used)) go(i + 1, used | masks[i], cnt + 1);
            go(i + 1, used, cnt);
        };
    go(0, 0, 0);
    return best;
}

// Flexible lines in direction t: simple paths from a black cell x0 to
// x0 + k_t e_t through the black cells of the box and its translate,
// stepping by recurrent displacements.  A line repeats with period k_t e_t,
// so its footprint is the set of visited cells with the direction-t
// coordinate reduced mod k_t; two lines are disjoint when their footprints
// are.  Returns the distinct footprints.
std::vector<std::uint64_t> flexible_line_masks(
    const Substitution& s, const std::vector<std::vector<int>>& steps, int t) {
    if (s.black.size() > 64)
        throw Error("CapExceeded", "flexible-line search needs at most 64 cells");
    std::map<std::vector<int>, int> black_index;
    for (std::size_t i = 0; i < s.black.size(); ++i)
        black_index[s.black[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> region;
    std::vector<std::uint64_t> cell_bit;  // footprint bit of each region cell
    for (const auto& c : s.black) {
        region.push_back(c);
        cell_bit.push_back(std::uint64_t(1) << black_index.at(c));
    }
    for (const auto& c : s.black) {
        std::vector<int> c2(c);
        c2[t] += s.box[t];
        region.push_back(c2);
        cell_bit.push_back(std::uint64_t(1) << black_index.at(c));
    }
    std::map<std::vector<int>, int> index;
    for (std::size_t i = 0; i < region.size(); ++i)
        index[region[i]] = static_cast<int>(i);
    std::set<std::uint64_t> lines;
    const std::size_t line_cap = 200000;
    std::vector<bool> visited(region.size(), false);
    std::function<void(int, int, std::uint64_t)> dfs =
        [&](int cur, int target, std::uint64_t mask) {
            if (lines.size() > line_cap)
                throw Error("CapExceeded", "too many flexible lines");
            if (cur == target) {
                lines.insert(mask);
                return;
            }
            for (const auto& w : steps) {
                std::vector<int> next(region[static_cast<std::size_t>(cur)]);
                for (int i = 0; i < s.dims; ++i) next[i] += w[i];
                auto it = index.find(next);
                if (it == index.end()) continue;
                if (visited[static_cast<std::size_t>(it->second)]) continue;
                visited[static_cast<std::size_t>(it->second)] = true;
                dfs(it->second, target,
                    mask | cell_bit[static_cast<std::size_t>(it->second)]);
                visited[static_cast<std::size_t>(it->second)] = false;
            }
        };
    for (std::size_t i = 0; i < s.black.size(); ++i) {
        std::vector<int> goal(s.black[i]);
        goal[t] += s.box[t];
        auto it = index.find(goal);
        if (it == index.end()) continue;
        visited.assign(region.size(), false);
        visited[i] = true;
        dfs(static_cast<int>(i), it->second, cell_bit[i]);
    }
    return {lines.begin(), lines.end()};
}

// Searches for a two-part periodic partition of the black cells whose
// direction-t adjacencies cross the parts exactly once per period.  Returns
// the cells of the upper part, or nullopt.
std::optional<std::vector<int>> periodic_partition(const Substitution& s, int t) {
    const int n = static_cast<int>(s.black.size());
    if (n > 24)
        throw Error("CapExceeded", "too many black cells for partition search");
    std::map<std::vector<int>, int> index;
    for (int i = 0; i < n; ++i) index[s.black[static_cast<std::size_t>(i)]] = i;
    struct Edge {
        int from, to;
        bool wrap;
    };
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        std::vector<int> next(s.black[static_cast<std::size_t>(i)]);
        ++next[t];
        bool wrap = (next[t] == s.box[t]);
        if (wrap) next[t] = 0;
        auto it = index.find(next);
        if (it != index.end()) edges.push_back({i, it->second, wrap});
    }
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << n); ++mask) {
        int crossings = 0;
        bool ok = true;
        for (const auto& e : edges) {
            int jump = (e.wrap ? 1 : 0) + ((mask >> e.to) & 1) - ((mask >> e.from) & 1);
            if (jump < 0 || jump > 1) {
                ok = false;
                break;
            }
            crossings += jump;
            if (crossings > 1) {
                ok = false;
                break;
            }
        }
        if (ok && crossings == 1) {
            std::vector<int> upper;
            for (int i = 0; i < n; ++i)
                if ((mask >> i) & 1) upper.push_back(i);
            return upper;
        }
    }
    return std::nullopt;
}

}  // namespace

json SubstitutionClass::to_json() const {
    json rec = json::array();
    for (const auto& d : recurrent) rec.push_back(d);
    return json{{"recurrent", rec},
                {"flexible_lines", flexible_lines},
                {"verdict", verdict},
                {"conjugate_to_bounded", conjugate_to_bounded},
                {"witness", witness}};
}

SubstitutionClass classify_substitution(const Substitution& s) {
    s.validate();
    {  // the black cells must form one axis-connected component
        std::set<std::vector<int>> cells(s.black.begin(), s.black.end());
        std::vector<std::vector<int>> queue = {s.black.front()};
        std::set<std::vector<int>> seen = {s.black.front()};
        while (!queue.empty()) {
            std::vector<int> cur = queue.back();
            queue.pop_back();
            for (int i = 0; i < s.dims; ++i)
                for (int d : {-1, 1}) {
                    std::vector<int> next(cur);
                    next[i] += d;
                    if (cells.count(next) && seen.insert(next).second)
                        queue.push_back(next);
                }
        }
        if (seen.size() != cells.size())
            throw Error("DisconnectedBlackSet",
                        "black cells form more than one component");
    }
    SubstitutionClass out;
    out.recurrent = recurrent_displacements(s);
    bool all_le1 = true, any_eq1 = false, any_ge2 = false, all_ge2 = true;
    for (int t = 0; t < s.dims; ++t) {
        auto masks = flexible_line_masks(s, out.recurrent, t);
        int nu = max_disjoint(masks);
        out.flexible_lines.push_back(nu);
        if (nu > 1) all_le1 = false;
        if (nu == 1) any_eq1 = true;
        if (nu >= 2) any_ge2 = true;
        if (nu < 2) all_ge2 = false;
    }
    if (all_le1)
        out.verdict = "bounded_connectivity";
    else if (any_eq1 && any_ge2)
        out.verdict = "isthmus";
    else if (all_ge2)
        out.verdict = "grid";
    else
        out.verdict = "other";
    out.conjugate_to_bounded = true;
    out.witness = json::array();
    for (int t = 0; t < s.dims; ++t) {
        auto part = periodic_partition(s, t);
        json entry{{"direction", t}};
        if (part) {
            json upper = json::array();
            for (int i : *part) upper.push_back(join_ints(s.black[static_cast<std::size_t>(i)]));
            entry["upper"] = upper;
        } else {
            entry["ok"] = false;
            out.conjugate_to_bounded = false;
        }
        out.witness.push_back(entry);
    }
    return out;
}

// -------------------------------------------------------------- composition

namespace {

std::vector<WangTile> named_tiles(const std::vector<WangTile>& tiles) {
    std::vector<WangTile> named(tiles);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < named.size(); ++i) {
        if (named[i].name.empty()) named[i].name = "t" + std::to_string(i);
        if (!seen.insert(named[i].name).second)
            throw Error("Invalid", "duplicate tile name '" + named[i].name + "'");
    }
    return named;
}

Tileset compose_lr_octant(const std::vector<WangTile>& tiles) {
    Tileset base = make_lr_grid();
    std::map<std::string, WangTile> tile_of;
    std::vector<std::string> channels = {"_"};
    for (const auto& w : tiles) {
        channels.push_back(w.name);
        tile_of[w.name] = w;
    }
    auto parity_of = [](const std::string& name) {
        std::size_t a = name.find('.');
        std::size_t b = name.find('.', a + 1);
        return name.substr(a + 1, b - a - 1);
    };
    auto is_p = [&](const std::string& name) {
        std::string p = parity_of(name);
        return p == "pe" || p == "po";
    };
    auto is_q = [](const std::string& name) { return name.back() == 'q'; };
    // channel states per base colour: sum-of-two-powers marks carry the
    // placed tile on both channels, power marks reset both to blank, and
    // every other colour may carry any channel pair
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> chans;
    Tileset out;
    out.labels = {"t", "u"};
    for (const auto& b : base.colors) {
        if (is_p(b) && is_q(b)) continue;  // never both marks at once
        auto& list = chans[b];
        if (is_q(b)) {
            for (const auto& w : tiles) list.emplace_back(w.name, w.name);
        } else if (is_p(b)) {
            list.emplace_back("_", "_");
        } else {
            for (const auto& h : channels)
                for (const auto& v : channels) list.emplace_back(h, v);
        }
        for (const auto& [h, v] : list)
            out.colors.push_back(b + "#" + h + "#" + v);
    }
    for (const auto& tr : base.triples) {
        auto src = chans.find(tr[0]);
        auto dst = chans.find(tr[2]);
        if (src == chans.end() || dst == chans.end()) continue;
        bool vertical = (tr[1] == "t");
        for (const auto& [h, v] : src->second)
            for (const auto& [h2, v2] : dst->second) {
                bool ok;
                if (is_q(tr[2])) {
                    // the placed tile must continue the incoming channel
                    if (vertical)
                        ok = (v == "_" ||
                              tile_of.at(v).north == tile_of.at(v2).south);
                    else
                        ok = (h == "_" ||
                              tile_of.at(h).east == tile_of.at(h2).west);
                } else if (is_p(tr[2])) {
                    ok = true;  // channels reset at power marks
                } else {
                    ok = vertical ? (v2 == v) : (h2 == h);
                }
                if (ok)
                    out.triples.push_back({tr[0] + "#" + h + "#" + v, tr[1],
                                           tr[2] + "#" + h2 + "#" + v2});
            }
    }
    if (base.seed) out.seed = *base.seed + "#_#_";
    out.sort_canonical();
    return out;
}

Tileset compose_hgraph_strips(const std::vector<WangTile>& tiles) {
    Tileset base = make_hgraph_horoball();
    auto in = [](const std::string& c, std::initializer_list<const char*> set) {
        for (const char* s : set)
            if (c == s) return true;
        return false;
    };
    Tileset out;
    out.labels = base.labels;
    for (const auto& p : base.colors)
        for (const auto& w : tiles) out.colors.push_back(p + "#" + w.name);
    for (const auto& tr : base.triples)
        for (const auto& w : tiles)
            for (const auto& w2 : tiles) {
                bool ok = true;
                if (tr[1] == "z") {
                    if (in(tr[2], {"c2", "d2", "b3", "b4"}))
                        ok = (w2.name == w.name);
                    else if (in(tr[2], {"c0", "c1", "b0", "b1", "b2"}))
                        ok = (w2.south == w.north);
                } else if (tr[1] == "x") {
                    if (in(tr[2], {"c0", "c1"})) ok = (w2.east == w.west);
                } else if (tr[1] == "y") {
                    if (in(tr[2], {"d0", "d1"})) ok = (w2.east == w.west);
                }
                if (ok)
                    out.triples.push_back(
                        {tr[0] + "#" + w.name, tr[1], tr[2] + "#" + w2.name});
            }
    if (base.seed && !tiles.empty()) out.seed = *base.seed + "#" + tiles.front().name;
    out.sort_canonical();
    return out;
}

}  // namespace

Tileset grid_compose(const std::string& base, const std::vector<WangTile>& tiles) {
    std::vector<WangTile> named = named_tiles(tiles);
    if (base == "lr_octant") return compose_lr_octant(named);
    if (base == "hgraph_strips") return compose_hgraph_strips(named);
    throw Error("UnknownBase", "no composition base '" + base + "'");
}

// ------------------------------------------------------------------ windows

LabelledGraph longrange_segment(int extent) {
    if (extent < 0) throw Error("Invalid", "extent must be nonnegative");
    if (extent > 20) throw Error("ExtentTooLarge", "extent must be at most 20");
    const long long N = 1LL << extent;
    LabelledGraph g;
    for (long long n = -N; n <= N; ++n) g.vertices.push_back(std::to_string(n));
    for (long long n = -N; n < N; ++n)
        g.edges.push_back({std::to_string(n), "t", std::to_string(n + 1)});
    g.edges.push_back({"0", "u", "0"});
    for (long long step = 1; step <= N; step <<= 1) {
        long long j = -(N / step);
        if (j % 2 == 0) ++j;
        for (; (j + 2) * step <= N; j += 2)
            g.edges.push_back({std::to_string(j * step), "u",
                               std::to_string((j + 2) * step)});
    }
    g.root = "0";
    g.sort_canonical();
    return g;
}

namespace {

int gray_decode(int b) {
    int m = b;
    m ^= m >> 1;
    m ^= m >> 2;
    m ^= m >> 4;
    m ^= m >> 8;
    return m;
}

std::string cell_name(int i, int j) {
    return std::to_string(i) + "," + std::to_string(j);
}

}  // namespace

LabelledGraph hgraph_window(int cols, int rows) {
    if (cols < 1 || rows < 1) throw Error("Invalid", "window sides must be positive");
    if (cols > 2048 || rows > 2048)
        throw Error("ExtentTooLarge", "window sides must be at most 2048");
    Transducer t = builtin_machine("hgraph");
    const int L = 12;  // word length; column/row codes use at most 11 bits
    int letter[2][2];
    for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v)
            letter[u][v] =
                t.letter_index(std::to_string(u) + std::to_string(v));
    std::vector<std::pair<int, int>> bits_of(t.alphabet.size());
    for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v)
            bits_of[static_cast<std::size_t>(letter[u][v])] = {u, v};
    const int y_state = t.state_index("y");
    LabelledGraph g;
    for (int i = 0; i < cols; ++i)
        for (int j = 0; j < rows; ++j) g.vertices.push_back(cell_name(i, j));
    std::vector<int> word(L);
    for (int i = 0; i < cols; ++i)
        for (int j = 0; j < rows; ++j) {
            int gray = i ^ (i >> 1);
            for (int b = 0; b < L; ++b)
                word[static_cast<std::size_t>(b)] =
                    letter[(gray >> b) & 1][(j >> b) & 1];
            for (int s : t.generators) {
                auto [out, rest] = act_word(t, Element{{s, 1}}, word);
                // keep the move only when the all-zero tail is preserved
                if (!(rest.empty() ||
                      (rest.size() == 1 && rest[0] == SignedState{y_state, 1})))
                    continue;
                int gray2 = 0, j2 = 0;
                for (int b = 0; b < L; ++b) {
                    auto [u, v] = bits_of[static_cast<std::size_t>(
                        out[static_cast<std::size_t>(b)])];
                    gray2 |= u << b;
                    j2 |= v << b;
                }
                int i2 = gray_decode(gray2);
                if (i2 < cols && j2 < rows)
                    g.edges.push_back({cell_name(i, j), t.states[static_cast<std::size_t>(s)].name,
                                       cell_name(i2, j2)});
            }
        }
    g.root = "0,0";
    g.sort_canonical();
    return g;
}

std::map<std::string, std::string> hgraph_window_coloring(int cols, int rows) {
    if (cols < 1 || rows < 1) throw Error("Invalid", "window sides must be positive");
    std::map<std::string, std::string> out;
    for (int i = 0; i < cols; ++i)
        for (int j = 0; j < rows; ++j) {
            char letter;
            std::string sub;
            if (i == 0) {
                letter = 'a';
                sub = (j == 0) ? "0" : "1";
            } else if ((i & (i + 1)) == 0) {  // i = 2^(s+1) - 1: marker column
                letter = 'b';
                int step = (i + 1) / 2;
                if (j == 0)
                    sub = "0";
                else if (j % step == 0)
                    sub = ((j / step) % 2 == 0) ? "1" : "2";
                else
                    sub = (j % (2 * step) < step) ? "3" : "4";
            } else {
                letter = (i % 2 == 0) ? 'c' : 'd';
                if (j == 0)
                    sub = "0";
                else {
                    int threshold = (1 << (pow2_floor_log(j) + 1)) - 1;
                    sub = (i < threshold) ? "1" : "2";
                }
            }
            out[cell_name(i, j)] = std::string(1, letter) + sub;
        }
    return out;
}

// ---------------------------------------------------------------- verifiers

namespace {

json verify_lr_sunny(int extent) {
    LabelledGraph g = longrange_segment(extent);
    Tileset ts = make_lr_sunny();
    const long long N = 1LL << extent;
    std::map<std::string, std::string> coloring;
    for (long long n = -N; n <= N; ++n) {
        std::string c;
        if (n == 0)
            c = "0";
        else {
            long long odd = n;
            while (odd % 2 == 0) odd /= 2;
            long long m = (odd + 1) / 2;  // n = 2^s (2m - 1)
            c = (m >= 1 ? "+" : "-") + std::to_string(((m % 2) + 2) % 2);
        }
        coloring[std::to_string(n)] = c;
    }
    bool valid = check_coloring(g, ts, coloring);
    json misplaced = json::array();
    for (long long n = -N; n <= N; ++n) {
        if (n == 0) continue;
        SolveOptions opts;
        opts.pins = {{std::to_string(n), "0"}};
        if (solve_finite(g, ts, opts).satisfiable)
            misplaced.push_back(std::to_string(n));
    }
    bool pass = valid && misplaced.empty();
    return json{{"name", "lr_sunny"},
                {"extent", extent},
                {"vertices", g.vertices.size()},
                {"explicit_valid", valid},
                {"misplaced_zero", misplaced},
                {"pass", pass}};
}

json verify_lr_grid(int extent) {
    LabelledGraph g = longrange_segment(extent);
    Tileset ts = make_lr_grid();
    SolveResult sol = solve_finite(g, ts, {});
    const long long half = 1LL << (extent - 1);
    const long long lo = -(half / 3), hi = half;  // exclusive interior bounds
    json report{{"name", "lr_grid"}, {"extent", extent},
                {"interior", json::array({lo, hi})}};
    if (!sol.satisfiable) {
        report["satisfiable"] = false;
        report["pass"] = false;
        return report;
    }
    report["satisfiable"] = true;
    std::set<long long> p_found, q_found, p_want, q_want;
    for (long long n = lo + 1; n < hi; ++n) {
        const std::string& c = sol.coloring.at(std::to_string(n));
        std::size_t a = c.find('.');
        std::size_t b = c.find('.', a + 1);
        std::string parity = c.substr(a + 1, b - a - 1);
        if (parity == "pe" || parity == "po") p_found.insert(n);
        if (c.back() == 'q') q_found.insert(n);
    }
    for (long long p = 1; p < hi; p <<= 1)
        if (p > lo) p_want.insert(p);
    for (long long a = 2; a < hi; a <<= 1)
        for (long long b = 1; b < a; b <<= 1)
            if (a + b > lo && a + b < hi) q_want.insert(a + b);
    bool marks_ok = (p_found == p_want) && (q_found == q_want);
    json forced_fail = json::array();
    for (long long n = lo + 1; n < hi; ++n) {
        const std::string& have = sol.coloring.at(std::to_string(n));
        for (const auto& c : ts.colors) {
            if (c == have) continue;
            SolveOptions opts;
            opts.pins = {{std::to_string(n), c}};
            if (solve_finite(g, ts, opts).satisfiable) {
                forced_fail.push_back(json::array({std::to_string(n), c}));
                break;
            }
        }
    }
    auto to_array = [](const std::set<long long>& s) {
        json a = json::array();
        for (long long n : s) a.push_back(n);
        return a;
    };
    bool pass = marks_ok && forced_fail.empty();
    report["power_marks"] = to_array(p_found);
    report["power_marks_expected"] = to_array(p_want);
    report["double_marks"] = to_array(q_found);
    report["double_marks_expected"] = to_array(q_want);
    report["marks_ok"] = marks_ok;
    report["interior_not_forced"] = forced_fail;
    report["pass"] = pass;
    return report;
}

json verify_hgraph_horoball(int extent) {
    const int cols = (1 << extent) + 1;
    const int rows = (1 << (extent - 1)) + 1;
    LabelledGraph g = hgraph_window(cols, rows);
    Tileset ts = make_hgraph_horoball();
    std::map<std::string, std::string> golden = hgraph_window_coloring(cols, rows);
    json violations = json::array();
    for (const auto& e : g.edges)
        if (!ts.has_triple(golden.at(e[0]), e[1], golden.at(e[2])))
            violations.push_back(json::array({e[0], e[1], e[2]}));
    auto domains = propagate_domains(g, ts);
    int b_cells = 0, by_propagation = 0, by_refutation = 0;
    json unforced = json::array();
    for (int i = 1; i < cols; i = 2 * i + 1)
        for (int j = 0; j < rows; ++j) {
            ++b_cells;
            std::string cell = cell_name(i, j);
            const std::string& want = golden.at(cell);
            const auto& dom = domains.at(cell);
            if (dom.size() == 1 && dom.front() == want) {
                ++by_propagation;
                continue;
            }
            // arc consistency is sound, so colours outside the propagated
            // domain are already impossible; refute the rest by search
            bool forced = std::count(dom.begin(), dom.end(), want) == 1;
            if (forced)
                for (const auto& c : dom) {
                    if (c == want) continue;
                    SolveOptions opts;
                    opts.pins = {{cell, c}};
                    if (solve_finite(g, ts, opts).satisfiable) {
                        forced = false;
                        break;
                    }
                }
            if (forced)
                ++by_refutation;
            else
                unforced.push_back(cell);
        }
    json widths = json::array();
    for (int j = 0; j < rows; ++j) {
        int w = 0;
        while (w < cols && golden.at(cell_name(w, j)).substr(1) == "1") ++w;
        widths.push_back(w);
    }
    bool pass = violations.empty() && unforced.empty();
    return json{{"name", "hgraph_horoball"},
                {"window", json::array({cols, rows})},
                {"edges", g.edges.size()},
                {"edge_violations", violations},
                {"marker_cells", b_cells},
                {"marker_by_propagation", by_propagation},
                {"marker_by_refutation", by_refutation},
                {"marker_unforced", unforced},
                {"one_cluster_widths", widths},
                {"pass", pass}};
}

}  // namespace

json verify_simulation(const std::string& name, int extent) {
    if (extent < 1) throw Error("Invalid", "extent must be at least 1");
    if (extent > 8) throw Error("ExtentTooLarge", "extent must be at most 8");
    if (name == "lr_sunny") return verify_lr_sunny(extent);
    if (name == "lr_grid") return verify_lr_grid(extent);
    if (name == "hgraph_horoball") return verify_hgraph_horoball(extent);
    throw Error("UnknownName", "no simulation '" + name + "'");
}

}  // namespace selfsim
