/**
 * @file selfsim_main.cpp
 * @brief selfsim command line tool: self-similar machines, level graphs and
 *        domino tilesets in, byte-stable JSON reports out.
 *
 * Exit status: 0 when the requested computation ran to completion (including
 * negative verdicts such as not_tileable), 2 on bad or inconsistent input,
 * 3 when a cap was exceeded or a verdict stayed inconclusive.  Errors are
 * reported as {"error": code, "detail": text} on standard error.
 */
#include <CLI11.hpp>

#include <selfsim/contraction.hpp>
#include <selfsim/domino.hpp>
#include <selfsim/gallery.hpp>
#include <selfsim/schreier.hpp>
#include <selfsim/transducer.hpp>

#include <cstddef>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace selfsim;

namespace {

const std::string kGalleryScheme = "gallery:";

// JSON argument: an inline literal when it starts with '{' or '[', else a path
json load_json_arg(const std::string& arg) {
    std::string text = arg;
    auto first = arg.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw Error("BadInput", "empty JSON argument");
    if (arg[first] != '{' && arg[first] != '[') {
        std::ifstream in(arg);
        if (!in) throw Error("BadInput", "cannot read " + arg);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error("BadInput", std::string("JSON parse failed: ") + e.what());
    }
}

bool is_gallery(const std::string& arg) {
    return arg.rfind(kGalleryScheme, 0) == 0;
}

std::string gallery_name(const std::string& arg) {
    return arg.substr(kGalleryScheme.size());
}

Transducer load_machine(const std::string& arg) {
    if (is_gallery(arg)) return builtin_machine(gallery_name(arg));
    Transducer t = Transducer::from_json(load_json_arg(arg));
    t.validate();
    return t;
}

Tileset load_tileset(const std::string& arg) {
    if (is_gallery(arg)) return builtin_tileset(gallery_name(arg));
    Tileset ts = Tileset::from_json(load_json_arg(arg));
    ts.validate();
    return ts;
}

LabelledGraph load_graph(const std::string& arg) {
    LabelledGraph g = LabelledGraph::from_json(load_json_arg(arg));
    g.sort_canonical();
    return g;
}

GraphKind parse_kind(const std::string& kind) {
    if (kind == "full") return GraphKind::Full;
    if (kind == "tile") return GraphKind::Tile;
    if (kind == "simple") return GraphKind::Simple;
    throw Error("BadInput", "unknown graph kind: " + kind);
}

void emit_json(const json& j, bool human) {
    std::cout << (human ? j.dump(2) : j.dump()) << "\n";
}

void emit_graph(const LabelledGraph& g, const std::string& format, bool human) {
    if (format == "dot")
        std::cout << g.to_dot();
    else
        emit_json(g.to_json(), human);
}

// nucleus of a machine, or NotContractingUpToBound when the fixpoint gave up
Transducer contracting_nucleus(const Transducer& t, std::size_t max_iter) {
    NucleusResult r = nucleus(t, max_iter);
    if (!r.contracting)
        throw Error("NotContractingUpToBound",
                    "nucleus did not stabilize within " +
                        std::to_string(max_iter) + " candidate pairs");
    return *r.machine;
}

json post_critical_word_json(const Transducer& nuc, const PostCriticalWord& w) {
    json period = json::array(), suffix = json::array();
    for (int x : w.period)
        period.push_back(nuc.alphabet[static_cast<std::size_t>(x)]);
    for (int x : w.suffix)
        suffix.push_back(nuc.alphabet[static_cast<std::size_t>(x)]);
    return json{{"period", period},
                {"suffix", suffix},
                {"rendered", render_post_critical(nuc, w)}};
}

std::map<std::string, std::string> parse_pins(const std::vector<std::string>& args) {
    std::map<std::string, std::string> pins;
    for (const auto& a : args) {
        auto eq = a.find('=');
        if (eq == std::string::npos)
            throw Error("BadInput", "pin must look like vertex=colour: " + a);
        pins[a.substr(0, eq)] = a.substr(eq + 1);
    }
    return pins;
}

int exit_for(const Error& e) { return e.code() == "CapExceeded" ? 3 : 2; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-similar machines, level graphs and domino tilesets"};
    app.require_subcommand(1);

    bool human = false;
    bool json_mode = false;
    int threads = 1;
    app.add_flag("--human", human, "indent reports for reading");
    app.add_flag("--json", json_mode, "compact single-line reports (default)");
    app.add_option("--threads", threads,
                   "worker threads; results are deterministic regardless")
        ->check(CLI::PositiveNumber);

    std::string arg_machine, arg_tileset, arg_graph, arg_patterns, arg_tiles;
    std::string arg_main, arg_ssu, arg_proj, arg_ray, arg_base, arg_name, arg_label;
    std::string kind = "full", format = "json";
    int level = 1, radius = 1, extent = 1;
    std::size_t max_iter = 10000, max_solutions = 1u << 20;
    int max_levels = 64, max_extent = 6;
    bool all_solutions = false, complete_labels = false;
    std::vector<std::string> pin_args;

    auto* c_nucleus = app.add_subcommand("nucleus", "compute the nucleus of a machine");
    c_nucleus->add_option("machine", arg_machine, "machine JSON or gallery: name")->required();
    c_nucleus->add_option("--max-iter", max_iter, "candidate-pair cap");

    auto* c_pcf = app.add_subcommand("pcf", "boundedness and post-critical set");
    c_pcf->add_option("machine", arg_machine, "machine JSON or gallery: name")->required();
    c_pcf->add_option("--max-iter", max_iter, "candidate-pair cap");

    auto* c_post = app.add_subcommand("postcritical", "post-critical words in full");
    c_post->add_option("machine", arg_machine, "machine JSON or gallery: name")->required();
    c_post->add_option("--max-iter", max_iter, "candidate-pair cap");

    auto* c_anc = app.add_subcommand("ancestor", "ancestor classes of the post-critical set");
    c_anc->add_option("machine", arg_machine, "machine JSON or gallery: name")->required();
    c_anc->add_option("--max-iter", max_iter, "candidate-pair cap");

    auto* c_tw = app.add_subcommand("treewidth", "treewidth bound of the level graphs");
    c_tw->add_option("machine", arg_machine, "machine JSON or gallery: name")->required();
    c_tw->add_option("--max-iter", max_iter, "candidate-pair cap");

    auto* c_schreier = app.add_subcommand("schreier", "level graph of the generator action");
    c_schreier->add_option("machine", arg_machine, "machine JSON or gallery: name")->required();
    c_schreier->add_option("--level", level, "word length")->required();
    c_schreier->add_option("--kind", kind, "full, tile or simple");
    c_schreier->add_option("--format", format, "json or dot");

    auto* c_ball = app.add_subcommand("ball", "orbit ball around an eventually periodic ray");
    c_ball->add_option("machine", arg_machine, "machine JSON or gallery: name")->required();
    c_ball->add_option("--ray", arg_ray, "ray JSON (inline or path)")->required();
    c_ball->add_option("--radius", radius, "ball radius")->required();
    c_ball->add_option("--format", format, "json or dot");

    auto* c_td = app.add_subcommand("treedecomp", "verified tree decomposition of a level graph");
    c_td->add_option("machine", arg_machine, "machine JSON or gallery: name")->required();
    c_td->add_option("--level", level, "word length")->required();
    c_td->add_option("--max-iter", max_iter, "candidate-pair cap");

    auto* c_decide = app.add_subcommand("decide", "decide the domino problem along a ray");
    c_decide->add_option("machine", arg_machine, "machine JSON or gallery: name")->required();
    c_decide->add_option("tileset", arg_tileset, "tileset JSON or gallery: name")->required();
    c_decide->add_option("--ray", arg_ray, "ray JSON (inline or path)")->required();
    c_decide->add_option("--max-iter", max_iter, "candidate-pair cap");
    c_decide->add_option("--max-levels", max_levels, "level-set iteration cap");

    auto* c_tile = app.add_subcommand("tile", "solve a tileset on a finite graph");
    c_tile->add_option("graph", arg_graph, "graph JSON (inline or path)")->required();
    c_tile->add_option("tileset", arg_tileset, "tileset JSON or gallery: name")->required();
    c_tile->add_flag("--all", all_solutions, "enumerate all solutions");
    c_tile->add_option("--max-solutions", max_solutions, "enumeration cap");
    c_tile->add_option("--pin", pin_args, "force vertex=colour (repeatable)");
    c_tile->add_flag("--complete", complete_labels,
                     "leave undeclared edge labels unconstrained");

    auto* c_compile = app.add_subcommand("compile-patterns",
                                         "compile forbidden patterns into a tileset");
    c_compile->add_option("patterns", arg_patterns, "pattern set JSON (inline or path)")
        ->required();

    auto* c_wang = app.add_subcommand("wang", "convert square tiles to a grid tileset");
    c_wang->add_option("tiles", arg_tiles, "tile list JSON (inline or path)")->required();

    auto* c_compose = app.add_subcommand("compose-seeded",
                                         "product of a seeded tileset with a marker tileset");
    c_compose->add_option("main", arg_main, "seeded tileset JSON or gallery: name")->required();
    c_compose->add_option("marker", arg_ssu, "marker tileset JSON or gallery: name")->required();
    c_compose->add_option("--proj", arg_proj, "marker colour -> \"0\"/\"1\" JSON")->required();

    auto* c_localmark = app.add_subcommand("localmark", "tileset marking loop vertices");
    c_localmark->add_option("label", arg_label, "loop edge label")->required();

    auto* c_sub = app.add_subcommand("substitution", "box substitution tools");
    c_sub->require_subcommand(1);
    auto* c_sub_conv = c_sub->add_subcommand("convert", "substitution to transducer");
    c_sub_conv->add_option("substitution", arg_name, "substitution JSON (inline or path)")
        ->required();
    auto* c_sub_class = c_sub->add_subcommand("classify", "connectivity classification");
    c_sub_class->add_option("substitution", arg_name, "substitution JSON (inline or path)")
        ->required();

    auto* c_grid = app.add_subcommand("compose-grid",
                                      "drive square tiles along a named base tileset");
    c_grid->add_option("base", arg_base, "base construction name")->required();
    c_grid->add_option("tiles", arg_tiles, "tile list JSON (inline or path)")->required();

    auto* c_verify = app.add_subcommand("verify", "re-check a named simulation construction");
    c_verify->add_option("name", arg_name, "construction name")->required();
    c_verify->add_option("--extent", extent, "window size exponent")->required();
    c_verify->add_option("--max-extent", max_extent, "largest allowed extent");

    auto* c_gallery = app.add_subcommand("gallery", "builtin machines and tilesets");
    c_gallery->require_subcommand(1);
    auto* c_gal_list = c_gallery->add_subcommand("list", "names of all builtins");
    auto* c_gal_export = c_gallery->add_subcommand("export", "emit one builtin as JSON");
    c_gal_export->add_option("name", arg_name, "builtin name")->required();

    for (auto* s : {c_nucleus, c_pcf, c_post, c_anc, c_tw, c_schreier, c_ball,
                    c_td, c_decide, c_tile, c_compile, c_wang, c_compose,
                    c_localmark, c_sub, c_sub_conv, c_sub_class, c_grid,
                    c_verify, c_gallery, c_gal_list, c_gal_export})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", "BadInput"}, {"detail", e.what()}}.dump() << "\n";
        return 2;
    }
    (void)json_mode;
    (void)threads;

    try {
        if (c_nucleus->parsed()) {
            NucleusResult r = nucleus(load_machine(arg_machine), max_iter);
            json out{{"contracting", r.contracting},
                     {"pairs_processed", r.pairs_processed},
                     {"max_iter", r.max_iter}};
            if (r.machine) {
                out["size"] = r.machine->states.size();
                out["machine"] = r.machine->to_json();
            }
            emit_json(out, human);
            return r.contracting ? 0 : 3;
        }
        if (c_pcf->parsed()) {
            Transducer t = load_machine(arg_machine);
            ActivityReport act = activity(t);
            if (!act.bounded) {
                json out{{"bounded", false}};
                if (act.degree)
                    out["activity_degree"] = *act.degree;
                else
                    out["activity_degree"] = nullptr;
                emit_json(out, human);
                return 0;
            }
            Transducer nuc = contracting_nucleus(t, max_iter);
            json words = json::array();
            for (const auto& w : post_critical_set(nuc))
                words.push_back(render_post_critical(nuc, w));
            emit_json(json{{"bounded", true}, {"postcritical", words}}, human);
            return 0;
        }
        if (c_post->parsed()) {
            Transducer nuc = contracting_nucleus(load_machine(arg_machine), max_iter);
            std::vector<PostCriticalWord> P = post_critical_set(nuc);
            json words = json::array();
            for (const auto& w : P) words.push_back(post_critical_word_json(nuc, w));
            emit_json(json{{"count", P.size()}, {"words", words}}, human);
            return 0;
        }
        if (c_anc->parsed()) {
            Transducer nuc = contracting_nucleus(load_machine(arg_machine), max_iter);
            AncestorStructure a = ancestor_structure(nuc);
            json P = json::array();
            for (const auto& w : a.P) P.push_back(render_post_critical(nuc, w));
            json classes = json::array();
            for (const auto& cls : a.classes) {
                json members = json::array();
                for (const auto& [p, s] : cls)
                    members.push_back(json::array(
                        {p, nuc.alphabet[static_cast<std::size_t>(s)]}));
                classes.push_back(members);
            }
            json step = json::object();
            for (std::size_t s = 0; s < nuc.alphabet.size(); ++s)
                step[nuc.alphabet[s]] = a.step[s];
            emit_json(json{{"P", P},
                           {"classes", classes},
                           {"embed", a.embed},
                           {"step", step},
                           {"embed_injective", a.embed_injective},
                           {"classes_covered", a.classes_covered},
                           {"proper_extension", a.proper_extension}},
                      human);
            return 0;
        }
        if (c_tw->parsed()) {
            Transducer nuc = contracting_nucleus(load_machine(arg_machine), max_iter);
            TreewidthReport r = treewidth_bound(nuc);
            emit_json(json{{"p", r.p}, {"q", r.q}, {"bound", r.bound}}, human);
            return 0;
        }
        if (c_schreier->parsed()) {
            Transducer t = load_machine(arg_machine);
            emit_graph(build_graph(t, level, parse_kind(kind)), format, human);
            return 0;
        }
        if (c_ball->parsed()) {
            Transducer t = load_machine(arg_machine);
            Ray center = ray_from_json(t, load_json_arg(arg_ray));
            emit_graph(ball_around_ray(t, center, radius), format, human);
            return 0;
        }
        if (c_td->parsed()) {
            Transducer nuc = contracting_nucleus(load_machine(arg_machine), max_iter);
            TreeDecomposition td = tree_decomposition(nuc, post_critical_set(nuc), level);
            emit_json(tree_decomposition_to_json(td), human);
            return 0;
        }
        if (c_decide->parsed()) {
            Transducer t = load_machine(arg_machine);
            Tileset ts = load_tileset(arg_tileset);
            Ray ray = ray_from_json(t, load_json_arg(arg_ray));
            Decision d = decide_pcf(t, ts, ray, max_iter, max_levels);
            json out = d.to_json();
            out["caps"] = json{{"max_iter", max_iter}, {"max_levels", max_levels}};
            emit_json(out, human);
            return d.verdict == "inconclusive" ? 3 : 0;
        }
        if (c_tile->parsed()) {
            LabelledGraph g = load_graph(arg_graph);
            Tileset ts = load_tileset(arg_tileset);
            if (complete_labels) {
                std::vector<std::string> labels;
                for (const auto& e : g.edges) labels.push_back(e[1]);
                ts = complete_tileset(ts, labels);
            }
            SolveOptions opts;
            opts.mode = all_solutions ? SolveMode::All : SolveMode::First;
            opts.max_solutions = max_solutions;
            opts.pins = parse_pins(pin_args);
            SolveResult r = solve_finite(g, ts, opts);
            json out{{"satisfiable", r.satisfiable}};
            if (r.satisfiable) out["coloring"] = r.coloring;
            if (all_solutions) {
                out["solutions"] = r.solutions;
                out["count"] = r.solutions.size();
                out["capped"] = r.capped;
            }
            emit_json(out, human);
            return r.capped ? 3 : 0;
        }
        if (c_compile->parsed()) {
            PatternSet ps = PatternSet::from_json(load_json_arg(arg_patterns));
            ps.validate();
            auto [ts, proj] = compile_patterns(ps);
            emit_json(json{{"tileset", ts.to_json()}, {"projection", proj}}, human);
            return 0;
        }
        if (c_wang->parsed()) {
            emit_json(wang_to_tileset(wang_tiles_from_json(load_json_arg(arg_tiles)))
                          .to_json(),
                      human);
            return 0;
        }
        if (c_compose->parsed()) {
            Tileset main_ts = load_tileset(arg_main);
            Tileset marker = load_tileset(arg_ssu);
            json pj = load_json_arg(arg_proj);
            if (!pj.is_object()) throw Error("BadInput", "--proj expects an object");
            std::map<std::string, std::string> proj;
            for (auto it = pj.begin(); it != pj.end(); ++it)
                proj[it.key()] = it.value().get<std::string>();
            emit_json(compose_seeded(main_ts, marker, proj).to_json(), human);
            return 0;
        }
        if (c_localmark->parsed()) {
            auto [ts, marked] = local_mark_tileset(arg_label);
            emit_json(json{{"tileset", ts.to_json()}, {"marked", marked}}, human);
            return 0;
        }
        if (c_sub_conv->parsed()) {
            Substitution s = Substitution::from_json(load_json_arg(arg_name));
            emit_json(substitution_to_transducer(s).to_json(), human);
            return 0;
        }
        if (c_sub_class->parsed()) {
            Substitution s = Substitution::from_json(load_json_arg(arg_name));
            emit_json(classify_substitution(s).to_json(), human);
            return 0;
        }
        if (c_grid->parsed()) {
            std::vector<WangTile> tiles = wang_tiles_from_json(load_json_arg(arg_tiles));
            emit_json(grid_compose(arg_base, tiles).to_json(), human);
            return 0;
        }
        if (c_verify->parsed()) {
            if (extent > max_extent)
                throw Error("ExtentTooLarge",
                            "extent " + std::to_string(extent) + " exceeds --max-extent " +
                                std::to_string(max_extent));
            json out = verify_simulation(arg_name, extent);
            out["caps"] = json{{"max_extent", max_extent}};
            emit_json(out, human);
            return 0;
        }
        if (c_gal_list->parsed()) {
            emit_json(json{{"machines", builtin_machine_names()},
                           {"tilesets", builtin_tileset_names()}},
                      human);
            return 0;
        }
        if (c_gal_export->parsed()) {
            const auto machines = builtin_machine_names();
            if (std::find(machines.begin(), machines.end(), arg_name) != machines.end())
                emit_json(builtin_machine(arg_name).to_json(), human);
            else
                emit_json(builtin_tileset(arg_name).to_json(), human);
            return 0;
        }
        throw Error("BadInput", "no subcommand matched");
    } catch (const Error& e) {
        std::cerr << e.to_json().dump() << "\n";
        return exit_for(e);
    } catch (const json::exception& e) {
        std::cerr << json{{"error", "BadInput"}, {"detail", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "BadInput"}, {"detail", e.what()}}.dump() << "\n";
        return 2;
    }
}
