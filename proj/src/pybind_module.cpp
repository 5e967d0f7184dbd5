/**
 * @file pybind_module.cpp
 * @brief Python bindings: machines, tilesets, graphs and reports cross the
 *        boundary as plain dicts/lists mirroring the JSON formats.
 *
 * Machine and tileset arguments accept either a builtin name (with or
 * without the "gallery:" prefix) or a JSON-shaped dict.  Errors raise
 * selfsim.SelfsimError whose message is "code: detail".
 */
#include <pybind11/pybind11.h>

#include <selfsim/contraction.hpp>
#include <selfsim/domino.hpp>
#include <selfsim/gallery.hpp>
#include <selfsim/schreier.hpp>
#include <selfsim/transducer.hpp>

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace selfsim;

namespace {

py::object to_py(const json& j) {
    switch (j.type()) {
        case json::value_t::null:
            return py::none();
        case json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case json::value_t::number_integer:
            return py::int_(j.get<long long>());
        case json::value_t::number_unsigned:
            return py::int_(j.get<unsigned long long>());
        case json::value_t::number_float:
            return py::float_(j.get<double>());
        case json::value_t::string:
            return py::str(j.get<std::string>());
        case json::value_t::array: {
            py::list out;
            for (const auto& x : j) out.append(to_py(x));
            return out;
        }
        default: {
            py::dict out;
            for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
            return out;
        }
    }
}

json to_json(const py::handle& h) {
    if (h.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
    if (py::isinstance<py::int_>(h)) return h.cast<long long>();
    if (py::isinstance<py::float_>(h)) return h.cast<double>();
    if (py::isinstance<py::str>(h)) return h.cast<std::string>();
    if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
        json out = json::array();
        for (const auto& x : h) out.push_back(to_json(x));
        return out;
    }
    if (py::isinstance<py::dict>(h)) {
        json out = json::object();
        for (const auto& item : h.cast<py::dict>())
            out[item.first.cast<std::string>()] = to_json(item.second);
        return out;
    }
    throw Error("BadInput", "unsupported value in JSON conversion");
}

std::string strip_scheme(std::string name) {
    const std::string scheme = "gallery:";
    if (name.rfind(scheme, 0) == 0) name = name.substr(scheme.size());
    return name;
}

Transducer as_machine(const py::handle& h) {
    if (py::isinstance<py::str>(h))
        return builtin_machine(strip_scheme(h.cast<std::string>()));
    Transducer t = Transducer::from_json(to_json(h));
    t.validate();
    return t;
}

Tileset as_tileset(const py::handle& h) {
    if (py::isinstance<py::str>(h))
        return builtin_tileset(strip_scheme(h.cast<std::string>()));
    Tileset ts = Tileset::from_json(to_json(h));
    ts.validate();
    return ts;
}

LabelledGraph as_graph(const py::handle& h) {
    LabelledGraph g = LabelledGraph::from_json(to_json(h));
    g.sort_canonical();
    return g;
}

GraphKind as_kind(const std::string& kind) {
    if (kind == "full") return GraphKind::Full;
    if (kind == "tile") return GraphKind::Tile;
    if (kind == "simple") return GraphKind::Simple;
    throw Error("BadInput", "unknown graph kind: " + kind);
}

std::map<std::string, std::string> as_string_map(const py::handle& h) {
    std::map<std::string, std::string> out;
    if (h.is_none()) return out;
    for (const auto& item : h.cast<py::dict>())
        out[item.first.cast<std::string>()] = item.second.cast<std::string>();
    return out;
}

Element as_element(const Transducer& t, const py::handle& h) {
    std::vector<std::string> tokens;
    for (const auto& x : h) tokens.push_back(x.cast<std::string>());
    return t.parse_element(tokens);
}

Transducer nucleus_of(const Transducer& t, std::size_t max_iter) {
    NucleusResult r = nucleus(t, max_iter);
    if (!r.contracting)
        throw Error("NotContractingUpToBound",
                    "nucleus did not stabilize within " +
                        std::to_string(max_iter) + " candidate pairs");
    return *r.machine;
}

}  // namespace

PYBIND11_MODULE(_selfsim, m) {
    m.doc() = "self-similar machines, level graphs and domino tilesets";

    py::register_exception<Error>(m, "SelfsimError");

    m.def("machine_names", [] { return to_py(json(builtin_machine_names())); },
          "Names of the builtin machines.");
    m.def("tileset_names", [] { return to_py(json(builtin_tileset_names())); },
          "Names of the builtin tilesets.");
    m.def("machine", [](const std::string& name) {
              return to_py(builtin_machine(strip_scheme(name)).to_json());
          },
          py::arg("name"), "Export one builtin machine as a dict.");
    m.def("tileset", [](const std::string& name) {
              return to_py(builtin_tileset(strip_scheme(name)).to_json());
          },
          py::arg("name"), "Export one builtin tileset as a dict.");

    m.def("act",
          [](const py::object& machine, const py::object& element,
             const py::object& word) {
              Transducer t = as_machine(machine);
              Element e = as_element(t, element);
              std::vector<int> w;
              for (const auto& x : word) {
                  int idx = t.letter_index(x.cast<std::string>());
                  if (idx < 0)
                      throw Error("BadInput",
                                  "unknown letter: " + x.cast<std::string>());
                  w.push_back(idx);
              }
              auto [out, rest] = act_word(t, e, w);
              json letters = json::array();
              for (int x : out)
                  letters.push_back(t.alphabet[static_cast<std::size_t>(x)]);
              return to_py(json{{"output", letters},
                                {"restriction", t.render_element(rest)}});
          },
          py::arg("machine"), py::arg("element"), py::arg("word"),
          "Apply a signed state word to a finite word.");

    m.def("nucleus",
          [](const py::object& machine, std::size_t max_iter) {
              NucleusResult r = nucleus(as_machine(machine), max_iter);
              json out{{"contracting", r.contracting},
                       {"pairs_processed", r.pairs_processed},
                       {"max_iter", r.max_iter}};
              if (r.machine) {
                  out["size"] = r.machine->states.size();
                  out["machine"] = r.machine->to_json();
              }
              return to_py(out);
          },
          py::arg("machine"), py::arg("max_iter") = 10000,
          "Nucleus fixpoint report.");

    m.def("activity",
          [](const py::object& machine) {
              ActivityReport r = activity(as_machine(machine));
              json out{{"bounded", r.bounded}};
              out["degree"] = r.degree ? json(*r.degree) : json(nullptr);
              return to_py(out);
          },
          py::arg("machine"), "Activity growth report.");

    m.def("pcf",
          [](const py::object& machine, std::size_t max_iter) {
              Transducer t = as_machine(machine);
              ActivityReport act = activity(t);
              if (!act.bounded) {
                  json out{{"bounded", false}};
                  out["activity_degree"] = act.degree ? json(*act.degree) : json(nullptr);
                  return to_py(out);
              }
              Transducer nuc = nucleus_of(t, max_iter);
              json words = json::array();
              for (const auto& w : post_critical_set(nuc))
                  words.push_back(render_post_critical(nuc, w));
              return to_py(json{{"bounded", true}, {"postcritical", words}});
          },
          py::arg("machine"), py::arg("max_iter") = 10000,
          "Boundedness verdict and post-critical set.");

    m.def("treewidth",
          [](const py::object& machine, std::size_t max_iter) {
              TreewidthReport r = treewidth_bound(nucleus_of(as_machine(machine), max_iter));
              return to_py(json{{"p", r.p}, {"q", r.q}, {"bound", r.bound}});
          },
          py::arg("machine"), py::arg("max_iter") = 10000,
          "Treewidth bound of the level graphs.");

    m.def("schreier_graph",
          [](const py::object& machine, int level, const std::string& kind) {
              return to_py(build_graph(as_machine(machine), level, as_kind(kind)).to_json());
          },
          py::arg("machine"), py::arg("level"), py::arg("kind") = "full",
          "Level graph of the generator action.");

    m.def("ball",
          [](const py::object& machine, const py::object& ray, int radius) {
              Transducer t = as_machine(machine);
              return to_py(ball_around_ray(t, ray_from_json(t, to_json(ray)), radius)
                               .to_json());
          },
          py::arg("machine"), py::arg("ray"), py::arg("radius"),
          "Orbit ball around an eventually periodic ray.");

    m.def("tree_decomposition",
          [](const py::object& machine, int level, std::size_t max_iter) {
              Transducer nuc = nucleus_of(as_machine(machine), max_iter);
              return to_py(tree_decomposition_to_json(
                  tree_decomposition(nuc, post_critical_set(nuc), level)));
          },
          py::arg("machine"), py::arg("level"), py::arg("max_iter") = 10000,
          "Verified tree decomposition of a level graph.");

    m.def("decide",
          [](const py::object& machine, const py::object& tileset,
             const py::object& ray, std::size_t max_iter, int max_levels) {
              Transducer t = as_machine(machine);
              return to_py(decide_pcf(t, as_tileset(tileset),
                                      ray_from_json(t, to_json(ray)), max_iter,
                                      max_levels)
                               .to_json());
          },
          py::arg("machine"), py::arg("tileset"), py::arg("ray"),
          py::arg("max_iter") = 10000, py::arg("max_levels") = 64,
          "Decide the domino problem along a ray.");

    m.def("solve",
          [](const py::object& graph, const py::object& tileset,
             const py::object& pins, bool enumerate_all,
             std::size_t max_solutions) {
              SolveOptions opts;
              opts.mode = enumerate_all ? SolveMode::All : SolveMode::First;
              opts.max_solutions = max_solutions;
              opts.pins = as_string_map(pins);
              SolveResult r = solve_finite(as_graph(graph), as_tileset(tileset), opts);
              json out{{"satisfiable", r.satisfiable}};
              if (r.satisfiable) out["coloring"] = r.coloring;
              if (enumerate_all) {
                  out["solutions"] = r.solutions;
                  out["count"] = r.solutions.size();
                  out["capped"] = r.capped;
              }
              return to_py(out);
          },
          py::arg("graph"), py::arg("tileset"), py::arg("pins") = py::none(),
          py::arg("enumerate_all") = false,
          py::arg("max_solutions") = std::size_t{1} << 20,
          "Solve a tileset on a finite graph.");

    m.def("propagate",
          [](const py::object& graph, const py::object& tileset,
             const py::object& pins) {
              auto dom = propagate_domains(as_graph(graph), as_tileset(tileset),
                                           as_string_map(pins));
              json out = json::object();
              for (const auto& [v, colors] : dom) out[v] = colors;
              return to_py(out);
          },
          py::arg("graph"), py::arg("tileset"), py::arg("pins") = py::none(),
          "Arc-consistent colour domains per vertex.");

    m.def("check_coloring",
          [](const py::object& graph, const py::object& tileset,
             const py::object& coloring) {
              return check_coloring(as_graph(graph), as_tileset(tileset),
                                    as_string_map(coloring));
          },
          py::arg("graph"), py::arg("tileset"), py::arg("coloring"),
          "Check one explicit colouring.");

    m.def("complete_tileset",
          [](const py::object& tileset, const py::object& labels) {
              std::vector<std::string> ls;
              for (const auto& x : labels) ls.push_back(x.cast<std::string>());
              return to_py(complete_tileset(as_tileset(tileset), ls).to_json());
          },
          py::arg("tileset"), py::arg("labels"),
          "Extend a tileset so the given labels are unconstrained.");

    m.def("compile_patterns",
          [](const py::object& patterns) {
              PatternSet ps = PatternSet::from_json(to_json(patterns));
              ps.validate();
              auto [ts, proj] = compile_patterns(ps);
              return to_py(json{{"tileset", ts.to_json()}, {"projection", proj}});
          },
          py::arg("patterns"),
          "Compile forbidden patterns into a tileset over ball colourings.");

    m.def("wang_tileset",
          [](const py::object& tiles) {
              return to_py(wang_to_tileset(wang_tiles_from_json(to_json(tiles)))
                               .to_json());
          },
          py::arg("tiles"), "Convert square tiles to a grid tileset.");

    m.def("compose_seeded",
          [](const py::object& main, const py::object& marker,
             const py::object& projection) {
              return to_py(compose_seeded(as_tileset(main), as_tileset(marker),
                                          as_string_map(projection))
                               .to_json());
          },
          py::arg("main"), py::arg("marker"), py::arg("projection"),
          "Product of a seeded tileset with a marker tileset.");

    m.def("local_mark",
          [](const std::string& label) {
              auto [ts, marked] = local_mark_tileset(label);
              return to_py(json{{"tileset", ts.to_json()}, {"marked", marked}});
          },
          py::arg("label"), "Tileset marking loop vertices.");

    m.def("substitution_transducer",
          [](const py::object& substitution) {
              return to_py(substitution_to_transducer(
                               Substitution::from_json(to_json(substitution)))
                               .to_json());
          },
          py::arg("substitution"), "Transducer of a box substitution.");

    m.def("classify_substitution",
          [](const py::object& substitution) {
              return to_py(classify_substitution(
                               Substitution::from_json(to_json(substitution)))
                               .to_json());
          },
          py::arg("substitution"), "Connectivity classification of a substitution.");

    m.def("grid_compose",
          [](const std::string& base, const py::object& tiles) {
              return to_py(grid_compose(base, wang_tiles_from_json(to_json(tiles)))
                               .to_json());
          },
          py::arg("base"), py::arg("tiles"),
          "Drive square tiles along a named base tileset.");

    m.def("verify_simulation",
          [](const std::string& name, int extent) {
              return to_py(verify_simulation(name, extent));
          },
          py::arg("name"), py::arg("extent"),
          "Re-check a named simulation construction.");

    m.def("longrange_segment",
          [](int extent) { return to_py(longrange_segment(extent).to_json()); },
          py::arg("extent"), "Integer segment graph with step and jump edges.");

    m.def("hgraph_window",
          [](int cols, int rows) {
              return to_py(hgraph_window(cols, rows).to_json());
          },
          py::arg("cols"), py::arg("rows"),
          "Rectangular window of the paired-bit action.");
}
