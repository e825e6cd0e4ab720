// tpa: command-line front end. Every command prints one JSON report on
// standard output; errors also go to standard error in plain text.

#include <iostream>

#include <CLI11.hpp>

#include "tpf/report.hpp"

namespace {

using tpf::cli::json;
using tpf::cli::Outcome;

int emit(const Outcome& out) {
    std::cout << out.report.dump(2) << '\n';
    return out.exit_code;
}

template <class Fn>
int run(const std::string& command, const json& inputs, Fn&& fn) {
    try {
        return emit(fn());
    } catch (const std::exception& e) {
        std::cerr << "tpa " << command << ": " << e.what() << '\n';
        return emit(tpf::cli::error_outcome(command, inputs, e));
    }
}

json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truth-preservation analysis of small programs over finite state spaces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "tpa 1.0");

    std::string file;
    std::string program;
    bool table = false;
    tpf::cli::Subject subject;
    std::string start;
    std::optional<std::string> element;
    std::string cond2;
    tpf::cli::ArrowRequest arrow;
    std::vector<std::string> files;
    std::vector<std::string> only;
    std::uint64_t budget = 10'000;

    auto* parse = app.add_subcommand("parse", "Parse a file and summarise its declarations");
    parse->add_option("file", file, "DSL source")->required();

    auto* denote = app.add_subcommand("denote", "Denotation of a program");
    denote->add_option("file", file, "DSL source")->required();
    denote->add_option("--program", program, "Program name")->required();
    denote->add_flag("--table", table, "Print every row of the function table");

    auto add_subject = [&](CLI::App* cmd) {
        cmd->add_option("file", subject.file, "DSL source")->required();
        cmd->add_option("--fn", subject.fn, "Declared function");
        cmd->add_option("--program", subject.program, "Program (a loop contributes its body)");
        cmd->add_option("--cond", subject.cond, "Declared condition, or true/false");
    };

    auto* orbit = app.add_subcommand("orbit", "Iterate a function from one state while a condition holds");
    add_subject(orbit);
    orbit->add_option("--start", start, "Start state, e.g. x=1,y=2")->required();

    auto* order = app.add_subcommand("order", "Element orders, truth preservation order and limit");
    add_subject(order);
    order->add_option("--element", element, "Report the order of this state");

    auto* profile = app.add_subcommand("profile", "Compare profiles under two related conditions");
    add_subject(profile);
    profile->add_option("--cond2", cond2, "Second condition")->required();

    auto* arrow_cmd = app.add_subcommand("arrow", "Verify or search an arrow between programs");
    arrow_cmd->add_option("file", arrow.file, "DSL source")->required();
    arrow_cmd->add_option("--kind", arrow.kind, "0 or 1")->default_val(0);
    arrow_cmd->add_option("--from", arrow.from, "Source program")->required();
    arrow_cmd->add_option("--to", arrow.to, "Target program")->required();
    arrow_cmd->add_option("--from-cond", arrow.from_cond, "Condition for the source program");
    arrow_cmd->add_option("--to-cond", arrow.to_cond, "Condition for the target program");
    arrow_cmd->add_option("--map", arrow.map_file, "File of 'state -> state' lines");
    arrow_cmd->add_flag("--search", arrow.search, "Search for a transform");

    auto* graph = app.add_subcommand("graph", "Isomorphism graph over every program in the files");
    graph->add_option("files", files, "DSL sources")->required();
    graph->add_option("--budget", budget, "Maximum number of pairwise searches")->default_val(10'000);
    graph->add_option("--programs", only, "Restrict the graph to these programs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return tpf::cli::kUsage;
    }

    if (*parse) return run("parse", json{{"file", file}}, [&] { return tpf::cli::cmd_parse(file); });
    if (*denote) {
        return run("denote", json{{"file", file}, {"program", program}, {"table", table}},
                   [&] { return tpf::cli::cmd_denote(file, program, table); });
    }
    auto subject_json = [&] {
        return json{{"file", subject.file}, {"fn", opt(subject.fn)}, {"program", opt(subject.program)},
                    {"cond", opt(subject.cond)}};
    };
    if (*orbit) return run("orbit", subject_json(), [&] { return tpf::cli::cmd_orbit(subject, start); });
    if (*order) return run("order", subject_json(), [&] { return tpf::cli::cmd_order(subject, element); });
    if (*profile) return run("profile", subject_json(), [&] { return tpf::cli::cmd_profile(subject, cond2); });
    if (*arrow_cmd) {
        json in{{"file", arrow.file}, {"kind", arrow.kind}, {"from", arrow.from}, {"to", arrow.to}};
        return run("arrow", in, [&] { return tpf::cli::cmd_arrow(arrow); });
    }
    if (*graph) {
        return run("graph", json{{"files", files}, {"budget", budget}, {"programs", only}},
                   [&] { return tpf::cli::cmd_graph(files, budget, only); });
    }
    return tpf::cli::kUsage;
}
