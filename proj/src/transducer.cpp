/**
 * @file transducer.cpp
 * @brief Transducer core: JSON (de)serialization, actions, bisimulation,
 *        canonical minimal machines and inverse closure.
 */
#include "selfsim/transducer.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

namespace selfsim {

int Transducer::letter_index(const std::string& s) const {
    for (std::size_t i = 0; i < alphabet.size(); ++i)
        if (alphabet[i] == s) return static_cast<int>(i);
    throw Error("BadInput", "unknown letter '" + s + "'");
}

int Transducer::state_index(const std::string& s) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].name == s) return static_cast<int>(i);
    throw Error("BadInput", "unknown state '" + s + "'");
}

void Transducer::validate() const {
    if (alphabet.empty()) throw Error("BadInput", "empty alphabet");
    {
        std::set<std::string> seen(alphabet.begin(), alphabet.end());
        if (seen.size() != alphabet.size())
            throw Error("BadInput", "duplicate letters in alphabet");
    }
    std::set<std::string> names;
    for (const auto& st : states) {
        if (st.name.empty()) throw Error("BadInput", "empty state name");
        if (!names.insert(st.name).second)
            throw Error("BadInput", "duplicate state name '" + st.name + "'");
        if (st.transitions.size() != alphabet.size())
            throw Error("BadInput", "transition table size mismatch in '" + st.name + "'");
        std::set<int> outs;
        for (const auto& tr : st.transitions) {
            if (!tr) continue;
            auto [out, next] = *tr;
            if (out < 0 || out >= static_cast<int>(alphabet.size()) ||
                next < 0 || next >= static_cast<int>(states.size()))
                throw Error("BadInput", "transition out of range in '" + st.name + "'");
            if (st.invertible && !outs.insert(out).second)
                throw Error("BadInput",
                            "state '" + st.name + "' marked invertible but output letters repeat");
        }
    }
    if (identity < 0 || identity >= static_cast<int>(states.size()))
        throw Error("BadInput", "identity state out of range");
    const State& id = states[identity];
    for (std::size_t x = 0; x < alphabet.size(); ++x) {
        const auto& tr = id.transitions[x];
        if (!tr || tr->first != static_cast<int>(x) || tr->second != identity)
            throw Error("BadInput", "identity state must fix every letter with identity restriction");
    }
    for (int g : generators)
        if (g < 0 || g >= static_cast<int>(states.size()))
            throw Error("BadInput", "generator index out of range");
}

Transducer Transducer::from_json(const json& j) {
    if (!j.is_object()) throw Error("BadInput", "transducer JSON must be an object");
    Transducer t;
    try {
        t.alphabet = j.at("alphabet").get<std::vector<std::string>>();
        std::map<std::string, int> letter_of;
        for (std::size_t i = 0; i < t.alphabet.size(); ++i)
            letter_of[t.alphabet[i]] = static_cast<int>(i);

        std::map<std::string, int> state_of;
        const auto& jstates = j.at("states");
        for (const auto& js : jstates) {
            State st;
            st.name = js.at("name").get<std::string>();
            state_of[st.name] = static_cast<int>(t.states.size());
            t.states.push_back(std::move(st));
        }
        int k = 0;
        for (const auto& js : jstates) {
            State& st = t.states[k++];
            st.invertible = js.value("invertible", true);
            st.transitions.assign(t.alphabet.size(), std::nullopt);
            for (const auto& [letter, pair] : js.at("transitions").items()) {
                auto li = letter_of.find(letter);
                if (li == letter_of.end())
                    throw Error("BadInput", "transition on unknown letter '" + letter + "'");
                if (!pair.is_array() || pair.size() != 2)
                    throw Error("BadInput", "transition must be [letter,state]");
                auto lo = letter_of.find(pair[0].get<std::string>());
                auto so = state_of.find(pair[1].get<std::string>());
                if (lo == letter_of.end())
                    throw Error("BadInput", "unknown output letter in '" + st.name + "'");
                if (so == state_of.end())
                    throw Error("BadInput", "unknown next state in '" + st.name + "'");
                st.transitions[li->second] = std::make_pair(lo->second, so->second);
            }
        }
        auto idname = j.at("identity").get<std::string>();
        auto idit = state_of.find(idname);
        if (idit == state_of.end()) throw Error("BadInput", "identity names no state");
        t.identity = idit->second;
        if (j.contains("generators"))
            for (const auto& g : j.at("generators")) {
                auto gi = state_of.find(g.get<std::string>());
                if (gi == state_of.end()) throw Error("BadInput", "generator names no state");
                t.generators.push_back(gi->second);
            }
    } catch (const json::exception& e) {
        throw Error("BadInput", std::string("transducer JSON: ") + e.what());
    }
    t.validate();
    return t;
}

json Transducer::to_json() const {
    json jstates = json::array();
    for (const auto& st : states) {
        json tr = json::object();
        for (std::size_t x = 0; x < alphabet.size(); ++x)
            if (st.transitions[x])
                tr[alphabet[x]] = json::array(
                    {alphabet[st.transitions[x]->first], states[st.transitions[x]->second].name});
        jstates.push_back(json{{"name", st.name},
                               {"invertible", st.invertible},
                               {"transitions", tr}});
    }
    json jgens = json::array();
    for (int g : generators) jgens.push_back(states[g].name);
    return json{{"alphabet", alphabet},
                {"identity", states[identity].name},
                {"states", jstates},
                {"generators", jgens}};
}

Element Transducer::parse_element(const std::vector<std::string>& tokens) const {
    Element e;
    for (const auto& tok : tokens) {
        if (tok == "1" || tok.empty()) continue;
        int sign = 1;
        std::string name = tok;
        if (name.size() > 3 && name.substr(name.size() - 3) == "^-1") {
            sign = -1;
            name = name.substr(0, name.size() - 3);
        }
        int s = state_index(name);
        if (s == identity) continue;
        if (sign == -1 && !states[s].invertible)
            throw Error("NotInvertible", "state '" + name + "' is not invertible");
        e.emplace_back(s, sign);
    }
    return e;
}

std::string Transducer::render_element(const Element& e) const {
    if (e.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i) out += "*";
        out += states[e[i].first].name;
        if (e[i].second < 0) out += "^-1";
    }
    return out;
}

std::string element_token(const Element& e) {
    std::string s;
    for (const auto& [st, sg] : e) {
        s += std::to_string(st);
        s += (sg > 0 ? '+' : '-');
    }
    return s;
}

// ------------------------------------------------------------------- rays

Ray canonical_ray(Ray r) {
    if (r.period.empty()) throw Error("BadInput", "ray period must be non-empty");
    // primitive root of the period
    const std::size_t n = r.period.size();
    for (std::size_t d = 1; d <= n; ++d) {
        if (n % d) continue;
        bool ok = true;
        for (std::size_t i = d; i < n && ok; ++i)
            if (r.period[i] != r.period[i % d]) ok = false;
        if (ok) {
            r.period.resize(d);
            break;
        }
    }
    // absorb: a preperiod ending with the period's last letter can rotate into it
    while (!r.preperiod.empty() && r.preperiod.back() == r.period.back()) {
        r.preperiod.pop_back();
        std::rotate(r.period.rbegin(), r.period.rbegin() + 1, r.period.rend());
    }
    return r;
}

Ray ray_from_json(const Transducer& t, const json& j) {
    if (!j.is_object() || !j.contains("period"))
        throw Error("BadInput", "ray JSON must contain a period");
    Ray r;
    try {
        if (j.contains("preperiod"))
            for (const auto& s : j.at("preperiod")) r.preperiod.push_back(t.letter_index(s.get<std::string>()));
        for (const auto& s : j.at("period")) r.period.push_back(t.letter_index(s.get<std::string>()));
    } catch (const json::exception& e) {
        throw Error("BadInput", std::string("ray JSON: ") + e.what());
    }
    return canonical_ray(std::move(r));
}

json ray_to_json(const Transducer& t, const Ray& r) {
    json pre = json::array(), per = json::array();
    for (int x : r.preperiod) pre.push_back(t.alphabet[x]);
    for (int x : r.period) per.push_back(t.alphabet[x]);
    return json{{"preperiod", pre}, {"period", per}};
}

std::string render_ray(const Transducer& t, const Ray& r) {
    std::string s;
    for (std::size_t i = 0; i < r.preperiod.size(); ++i) {
        if (i) s += " ";
        s += t.alphabet[r.preperiod[i]];
    }
    if (!r.preperiod.empty()) s += " | ";
    for (std::size_t i = 0; i < r.period.size(); ++i) {
        if (i) s += " ";
        s += t.alphabet[r.period[i]];
    }
    s += " ^inf";
    return s;
}

// ---------------------------------------------------------------- actions

std::pair<int, Element> act_letter(const Transducer& t, const Element& e, int letter) {
    if (letter < 0 || letter >= static_cast<int>(t.alphabet.size()))
        throw Error("BadInput", "letter index out of range");
    Element rest;
    rest.reserve(e.size());
    int cur = letter;
    // rightmost component acts first
    std::vector<SignedState> produced;
    for (auto it = e.rbegin(); it != e.rend(); ++it) {
        auto [s, sign] = *it;
        const State& st = t.states[s];
        int out, next;
        if (sign > 0) {
            const auto& tr = st.transitions[cur];
            if (!tr)
                throw Error("UndefinedTransition",
                            "state '" + st.name + "' has no transition on '" + t.alphabet[cur] + "'");
            out = tr->first;
            next = tr->second;
        } else {
            if (!st.invertible)
                throw Error("NotInvertible", "state '" + st.name + "' is not invertible");
            int found = -1;
            for (std::size_t x = 0; x < st.transitions.size(); ++x)
                if (st.transitions[x] && st.transitions[x]->first == cur) {
                    found = static_cast<int>(x);
                    break;
                }
            if (found < 0)
                throw Error("UndefinedTransition",
                            "state '" + st.name + "^-1' has no transition on '" + t.alphabet[cur] + "'");
            out = found;
            next = st.transitions[found]->second;
        }
        cur = out;
        if (next != t.identity) produced.emplace_back(next, sign);
    }
    // produced collected right-to-left; restore left-to-right order
    rest.assign(produced.rbegin(), produced.rend());
    return {cur, rest};
}

std::pair<std::vector<int>, Element> act_word(const Transducer& t, const Element& e,
                                              const std::vector<int>& word) {
    std::vector<int> out;
    out.reserve(word.size());
    Element cur = e;
    for (int x : word) {
        auto [y, rest] = act_letter(t, cur, x);
        out.push_back(y);
        cur = std::move(rest);
    }
    return {out, cur};
}

Ray act_ray(const Transducer& t, const Element& e, const Ray& r0) {
    Ray r = canonical_ray(r0);
    Element cur = e;
    std::vector<int> pre_out;
    for (int x : r.preperiod) {
        auto [y, rest] = act_letter(t, cur, x);
        pre_out.push_back(y);
        cur = std::move(rest);
    }
    // iterate whole periods until the restriction repeats
    std::map<std::string, std::pair<std::size_t, std::size_t>> seen;  // token -> (iter, outlen)
    std::vector<int> outs;
    std::size_t iter = 0;
    for (;;) {
        std::string key = element_token(cur);
        auto it = seen.find(key);
        if (it != seen.end()) {
            std::size_t cut = it->second.second;
            Ray img;
            img.preperiod = pre_out;
            img.preperiod.insert(img.preperiod.end(), outs.begin(), outs.begin() + cut);
            img.period.assign(outs.begin() + cut, outs.end());
            return canonical_ray(std::move(img));
        }
        seen[key] = {iter, outs.size()};
        auto [block, rest] = act_word(t, cur, r.period);
        outs.insert(outs.end(), block.begin(), block.end());
        cur = std::move(rest);
        ++iter;
    }
}

// ----------------------------------------------------- semantic equality

namespace {

/// Per-letter behaviour of an element: output letter and successor element.
struct Behaviour {
    std::vector<std::optional<std::pair<int, Element>>> step;
};

Behaviour behaviour_of(const Transducer& t, const Element& e) {
    Behaviour b;
    b.step.resize(t.alphabet.size());
    for (std::size_t x = 0; x < t.alphabet.size(); ++x) {
        try {
            b.step[x] = act_letter(t, e, static_cast<int>(x));
        } catch (const Error& err) {
            if (err.code() == "UndefinedTransition")
                b.step[x] = std::nullopt;
            else
                throw;
        }
    }
    return b;
}

}  // namespace

bool elements_equal(const Transducer& t, const Element& a, const Element& b, std::size_t cap) {
    std::set<std::pair<std::string, std::string>> seen;
    std::deque<std::pair<Element, Element>> queue;
    queue.emplace_back(a, b);
    while (!queue.empty()) {
        auto [u, v] = std::move(queue.front());
        queue.pop_front();
        auto key = std::make_pair(element_token(u), element_token(v));
        if (key.first == key.second) continue;
        if (!seen.insert(key).second) continue;
        if (seen.size() > cap)
            throw Error("CapExceeded", "bisimulation explored more than " + std::to_string(cap) + " pairs");
        Behaviour bu = behaviour_of(t, u), bv = behaviour_of(t, v);
        for (std::size_t x = 0; x < t.alphabet.size(); ++x) {
            if (bu.step[x].has_value() != bv.step[x].has_value()) return false;
            if (!bu.step[x]) continue;
            if (bu.step[x]->first != bv.step[x]->first) return false;
            queue.emplace_back(bu.step[x]->second, bv.step[x]->second);
        }
    }
    return true;
}

std::string canonical_key(const Transducer& t, const Element& e) {
    // 1. reachable restriction closure
    std::map<std::string, int> index_of;
    std::vector<Element> nodes;
    std::vector<std::vector<std::optional<std::pair<int, int>>>> succ;  // node -> letter -> (out, node)
    std::deque<int> todo;
    auto intern = [&](const Element& el) {
        std::string key = element_token(el);
        auto it = index_of.find(key);
        if (it != index_of.end()) return it->second;
        int id = static_cast<int>(nodes.size());
        index_of[key] = id;
        nodes.push_back(el);
        succ.emplace_back();
        todo.push_back(id);
        return id;
    };
    intern(e);
    while (!todo.empty()) {
        int id = todo.front();
        todo.pop_front();
        Behaviour b = behaviour_of(t, nodes[id]);
        succ[id].resize(t.alphabet.size());
        for (std::size_t x = 0; x < t.alphabet.size(); ++x)
            if (b.step[x]) {
                int target = intern(b.step[x]->second);  // may reallocate succ
                succ[id][x] = std::make_pair(b.step[x]->first, target);
            }
    }
    const int n = static_cast<int>(nodes.size());

    // 2. partition refinement on (output signature, successor blocks)
    std::vector<int> block(n, 0);
    {
        std::map<std::vector<int>, int> sig_of;
        for (int i = 0; i < n; ++i) {
            std::vector<int> sig;
            for (std::size_t x = 0; x < t.alphabet.size(); ++x)
                sig.push_back(succ[i][x] ? succ[i][x]->first : -1);
            auto [it, fresh] = sig_of.try_emplace(sig, static_cast<int>(sig_of.size()));
            block[i] = it->second;
        }
    }
    for (;;) {
        std::map<std::vector<int>, int> sig_of;
        std::vector<int> nb(n);
        for (int i = 0; i < n; ++i) {
            std::vector<int> sig{block[i]};
            for (std::size_t x = 0; x < t.alphabet.size(); ++x)
                sig.push_back(succ[i][x] ? block[succ[i][x]->second] : -1);
            auto [it, fresh] = sig_of.try_emplace(sig, static_cast<int>(sig_of.size()));
            nb[i] = it->second;
        }
        bool stable = true;
        std::set<int> old(block.begin(), block.end()), neu(nb.begin(), nb.end());
        if (old.size() != neu.size()) stable = false;
        block = std::move(nb);
        if (stable) break;
    }

    // 3. canonical numbering by BFS from the root block, letters in order
    std::map<int, int> number;
    std::vector<int> order;
    std::deque<int> bfs;
    auto visit = [&](int b) {
        if (number.count(b)) return;
        number[b] = static_cast<int>(order.size());
        order.push_back(b);
        bfs.push_back(b);
    };
    visit(block[0]);
    std::map<int, int> rep;
    for (int i = 0; i < n; ++i)
        if (!rep.count(block[i])) rep[block[i]] = i;
    while (!bfs.empty()) {
        int b = bfs.front();
        bfs.pop_front();
        int i = rep[b];
        for (std::size_t x = 0; x < t.alphabet.size(); ++x)
            if (succ[i][x]) visit(block[succ[i][x]->second]);
    }
    std::ostringstream out;
    for (int b : order) {
        int i = rep[b];
        for (std::size_t x = 0; x < t.alphabet.size(); ++x) {
            if (succ[i][x])
                out << succ[i][x]->first << ":" << number[block[succ[i][x]->second]] << ";";
            else
                out << "-;";
        }
        out << "|";
    }
    return out.str();
}

// ----------------------------------------------------------- inverse closure

Transducer inverse_closure(const Transducer& t) {
    Transducer ext = t;
    const int n = static_cast<int>(t.states.size());
    std::vector<int> inv_index(n, -1);  // provisional index of the formal inverse
    for (int s = 0; s < n; ++s) {
        if (s == t.identity || !t.states[s].invertible) continue;
        inv_index[s] = static_cast<int>(ext.states.size());
        State st;
        st.name = t.states[s].name + "^-1";
        st.invertible = true;
        st.transitions.assign(t.alphabet.size(), std::nullopt);
        ext.states.push_back(std::move(st));
    }
    for (int s = 0; s < n; ++s) {
        if (inv_index[s] < 0) continue;
        State& inv = ext.states[inv_index[s]];
        for (std::size_t x = 0; x < t.alphabet.size(); ++x) {
            const auto& tr = t.states[s].transitions[x];
            if (!tr) continue;
            auto [y, nx] = *tr;
            int target;
            if (nx == t.identity)
                target = t.identity;
            else if (inv_index[nx] >= 0)
                target = inv_index[nx];
            else
                continue;  // restriction not invertible: leave undefined
            inv.transitions[y] = std::make_pair(static_cast<int>(x), target);
        }
    }
    // prune inverse states that behave like an earlier state
    std::vector<std::string> keys(ext.states.size());
    for (std::size_t i = 0; i < ext.states.size(); ++i)
        keys[i] = canonical_key(ext, Element{{static_cast<int>(i), 1}});
    std::vector<int> remap(ext.states.size());
    std::iota(remap.begin(), remap.end(), 0);
    std::vector<bool> dropped(ext.states.size(), false);
    for (std::size_t i = n; i < ext.states.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (!dropped[j] && keys[j] == keys[i]) {
                remap[i] = static_cast<int>(j);
                dropped[i] = true;
                break;
            }
    Transducer out;
    out.alphabet = t.alphabet;
    out.generators = t.generators;
    out.identity = t.identity;
    std::vector<int> newindex(ext.states.size(), -1);
    for (std::size_t i = 0; i < ext.states.size(); ++i)
        if (!dropped[i]) {
            newindex[i] = static_cast<int>(out.states.size());
            out.states.push_back(ext.states[i]);
        }
    for (auto& st : out.states)
        for (auto& tr : st.transitions)
            if (tr) tr->second = newindex[remap[tr->second]];
    out.validate();
    return out;
}

}  // namespace selfsim
