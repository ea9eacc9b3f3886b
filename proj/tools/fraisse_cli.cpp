#include <fraisse/back_and_forth.hpp>
#include <fraisse/builder.hpp>
#include <fraisse/formulas.hpp>
#include <fraisse/graph_class.hpp>
#include <fraisse/json_io.hpp>
#include <fraisse/topology.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace fraisse;
using nlohmann::json;

Structure load_seed(const std::string& seed_file, const std::string& seed_inline,
                    const std::shared_ptr<const FraisseClass>& cls) {
    if (!seed_file.empty()) return structure_from_json(load_json_file(seed_file));
    if (!seed_inline.empty()) return structure_from_string(seed_inline);
    return cls->enumerated(0); // smallest canonical structure
}

int cmd_build(const std::string& class_id, const std::string& seed_file,
              const std::string& seed_inline, std::uint64_t steps, const std::string& out,
              const std::string& dot) {
    auto cls = make_class(class_id);
    ChainState st = new_builder(cls, load_seed(seed_file, seed_inline, cls));
    run(st, steps);
    save_json_file(out, chain_state_to_json(st));
    if (!dot.empty()) {
        if (!std::holds_alternative<GraphPayload>(st.top().payload))
            throw UsageError("--dot requires a graph class");
        std::ofstream f(dot);
        if (!f) throw UsageError("cannot write " + dot);
        f << graph_to_dot(st.top());
    }
    std::cout << "steps=" << st.steps_taken << " log=" << st.log.size()
              << " size=" << domain_size(st.top()) << "\n";
    return 0;
}

int cmd_verify(const std::string& state_file, const std::string& suite,
               std::uint64_t gen_bound, std::uint64_t size_bound, std::uint64_t window,
               const std::string& report_file) {
    ChainState st = chain_state_from_json(load_json_file(state_file));
    Report rep;
    if (suite == "age") {
        rep = verify_age(st, gen_bound);
    } else if (suite == "homogeneity") {
        rep = verify_homogeneity(st, size_bound, window);
    } else if (suite == "saturation") {
        // Every realized log entry must have a witness in the saved stage.
        std::uint64_t realized = 0;
        for (const auto& e : st.log) {
            if (!e.realized || e.code < 0) continue;
            auto task = st.stream->task_for_code(static_cast<std::uint64_t>(e.code));
            if (!task) {
                rep.entries.push_back({"saturation", "fail",
                                       "log code " + std::to_string(e.code) +
                                           " does not name a task"});
                continue;
            }
            if (verify_saturation(st, *task).status != SaturationResult::Status::realized)
                rep.entries.push_back({"saturation", "fail",
                                       "code " + std::to_string(e.code) + " has no witness"});
            ++realized;
        }
        rep.entries.push_back(
            {"saturation", "pass", std::to_string(realized) + " realized tasks re-verified"});
    } else {
        throw UsageError("unknown suite: " + suite);
    }
    if (!report_file.empty()) save_json_file(report_file, rep.to_json());
    std::cout << rep.to_json().dump(2) << "\n";
    return rep.passed() ? 0 : 1;
}

int cmd_game(const std::string& class_id, const std::string& seed_file,
             const std::string& seed_inline, std::uint64_t rounds, std::uint64_t seed,
             const std::string& out) {
    auto cls = make_class(class_id);
    BasicOpen open{load_seed(seed_file, seed_inline, cls)};
    GameTranscript t = play_banach_mazur(cls, open, adversary_random(cls, seed), rounds);
    if (!out.empty()) save_json_file(out, t.to_json());
    std::cout << "rounds=" << t.rounds.size()
              << " final_size=" << domain_size(t.final_chain.top()) << "\n";
    return 0;
}

int cmd_iso(const std::string& a_file, const std::string& b_file, std::uint64_t depth,
            const std::string& out) {
    ChainState a = chain_state_from_json(load_json_file(a_file));
    ChainState b = chain_state_from_json(load_json_file(b_file));
    BfResult r = back_and_forth(a, b, depth);
    json jmap = json::array();
    for (const auto& [x, y] : r.map) jmap.push_back(json::array({x, y}));
    json result{{"success", r.success}, {"map", jmap}, {"failure", r.failure}};
    if (!out.empty()) save_json_file(out, result);
    std::cout << result.dump(2) << "\n";
    return r.success ? 0 : 1;
}

int cmd_formula(const std::string& sentence, const std::string& structure_file,
                const std::string& mode) {
    if (mode == "parse") {
        std::cout << sentence_to_string(parse_sentence(sentence)) << "\n";
        return 0;
    }
    if (structure_file.empty()) throw UsageError("--structure is required for " + mode);
    Structure s = structure_from_json(load_json_file(structure_file));
    if (mode == "eval") {
        bool v = eval_sentence(s, parse_sentence(sentence));
        std::cout << (v ? "true" : "false") << "\n";
        return 0;
    }
    if (mode == "from-structure") {
        std::cout << sentence_to_string(open_from_structure(s)) << "\n";
        return 0;
    }
    if (mode == "to-structure") {
        auto cls = make_class(s.class_id);
        Structure b = structure_from_open(*cls, parse_sentence(sentence), s);
        std::cout << structure_to_json(b).dump(2) << "\n";
        return 0;
    }
    throw UsageError("unknown formula mode: " + mode);
}

int cmd_enumerate(const std::string& class_id, std::uint64_t bound) {
    auto cls = make_class(class_id);
    json out = json::array();
    for (const Structure& s : cls->enumerate_up_to(bound)) out.push_back(structure_to_json(s));
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fraisse-limit construction engine"};
    app.require_subcommand(1);

    std::string class_id = "graph", seed_file, seed_inline, out, dot, report_file;
    std::string state_file, suite = "age", a_file, b_file, sentence, structure_file;
    std::string formula_mode = "parse";
    std::uint64_t steps = 100, rounds = 20, adversary_seed = 0, depth = 15;
    std::uint64_t gen_bound = 3, size_bound = 2, window = 8, bound = 3;

    auto* build = app.add_subcommand("build", "run the chain builder");
    build->add_option("--class", class_id, "class id");
    build->add_option("--steps", steps, "number of builder steps");
    build->add_option("--seed-file", seed_file, "seed structure JSON file");
    build->add_option("--seed", seed_inline, "seed structure inline JSON");
    build->add_option("--out", out, "output ChainState JSON")->required();
    build->add_option("--dot", dot, "DOT export path (graphs)");

    auto* verify = app.add_subcommand("verify", "verification suites on a saved state");
    verify->add_option("--state", state_file, "ChainState JSON")->required();
    verify->add_option("--suite", suite, "age | saturation | homogeneity");
    verify->add_option("--gen-bound", gen_bound, "age: generator bound");
    verify->add_option("--size-bound", size_bound, "homogeneity: substructure bound");
    verify->add_option("--window", window, "homogeneity: label window");
    verify->add_option("--report", report_file, "report JSON path");

    auto* game = app.add_subcommand("game", "play a Banach-Mazur game");
    game->add_option("--class", class_id, "class id");
    game->add_option("--seed-file", seed_file, "seed anchor JSON file");
    game->add_option("--seed-json", seed_inline, "seed anchor inline JSON");
    game->add_option("--rounds", rounds, "rounds to play");
    game->add_option("--seed", adversary_seed, "adversary PRNG seed");
    game->add_option("--out", out, "transcript JSON path");

    auto* iso = app.add_subcommand("iso", "back-and-forth between two states");
    iso->add_option("--a", a_file, "first ChainState JSON")->required();
    iso->add_option("--b", b_file, "second ChainState JSON")->required();
    iso->add_option("--depth", depth, "rounds");
    iso->add_option("--out", out, "result JSON path");

    auto* formula = app.add_subcommand("formula", "parse / eval / translate sentences");
    formula->add_option("--mode", formula_mode, "parse | eval | from-structure | to-structure");
    formula->add_option("--sentence", sentence, "sentence text");
    formula->add_option("--structure", structure_file, "structure JSON file");

    auto* enumerate = app.add_subcommand("enumerate", "canonical structures up to a bound");
    enumerate->add_option("--class", class_id, "class id");
    enumerate->add_option("--bound", bound, "size bound");

    try {
        app.parse(argc, argv);
        if (build->parsed())
            return cmd_build(class_id, seed_file, seed_inline, steps, out, dot);
        if (verify->parsed())
            return cmd_verify(state_file, suite, gen_bound, size_bound, window, report_file);
        if (game->parsed())
            return cmd_game(class_id, seed_file, seed_inline, rounds, adversary_seed, out);
        if (iso->parsed()) return cmd_iso(a_file, b_file, depth, out);
        if (formula->parsed()) return cmd_formula(sentence, structure_file, formula_mode);
        if (enumerate->parsed()) return cmd_enumerate(class_id, bound);
        throw fraisse::UsageError("no subcommand");
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const fraisse::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const fraisse::ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
}
