#include "tpf/report.hpp"

#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "tpf/calculus.hpp"
#include "tpf/condlab.hpp"
#include "tpf/error.hpp"
#include "tpf/syntax.hpp"

namespace tpf::cli {

namespace {

json make_report(const std::string& command, json inputs, json result, std::vector<std::string> diagnostics = {}) {
    json r;
    r["schema_version"] = kSchemaVersion;
    r["command"] = command;
    r["inputs"] = std::move(inputs);
    r["result"] = std::move(result);
    r["diagnostics"] = std::move(diagnostics);
    return r;
}

std::string fmt(const SpacePtr& space, LiftedState s) { return space->format(s); }
std::string fmt(const SpacePtr& space, StateIndex s) { return space->format(LiftedState::defined(s)); }

std::string order_name(DomainOrder o) { return o == DomainOrder::Ascending ? "asc" : "desc"; }

void note_lazy(const SpacePtr& space, std::vector<std::string>& diagnostics) {
    if (space->size() > table_bound()) {
        diagnostics.push_back("space of " + std::to_string(space->size()) +
                              " states exceeds the table bound; functions are evaluated lazily");
    }
}

Condition resolve_condition(const ProgramUnit& unit, const std::string& name, const SpacePtr& space) {
    if (name == "true") return Condition::always(space).with_label("true");
    if (name == "false") return Condition::never(space).with_label("false");
    return unit.condition(name, space);
}

struct Analysed {
    SpacePtr space;
    PartialFn f;
    Condition cond;
};

Analysed analyse(const ProgramUnit& unit, const Subject& s) {
    if (s.fn.has_value() == s.program.has_value()) {
        throw Error(ErrorKind::InvalidArgument, "give exactly one of --fn and --program");
    }
    if (s.fn) {
        if (!s.cond) throw Error(ErrorKind::InvalidArgument, "--cond is required with --fn");
        auto space = unit.full_space();
        return {space, unit.function_endo(*s.fn, space), resolve_condition(unit, *s.cond, space)};
    }
    const auto& p = unit.program(*s.program);
    if (const auto* loop = as_loop(*p.body)) {
        auto body = denote_stmt(unit, *loop->children[0], p.space);
        auto c = s.cond ? resolve_condition(unit, *s.cond, p.space)
                        : unit.condition_on(loop->cond, p.space, loop->cond_text);
        return {p.space, body, c};
    }
    if (!s.cond) throw Error(ErrorKind::InvalidArgument, "--cond is required for a program that is not a loop");
    return {p.space, denote(unit, *s.program), resolve_condition(unit, *s.cond, p.space)};
}

json subject_inputs(const Subject& s) {
    json in;
    in["file"] = s.file;
    in["fn"] = s.fn ? json(*s.fn) : json(nullptr);
    in["program"] = s.program ? json(*s.program) : json(nullptr);
    in["cond"] = s.cond ? json(*s.cond) : json(nullptr);
    return in;
}

StateIndex parse_state(const SpacePtr& space, const std::string& text) {
    auto s = space->parse_assignment(text);
    if (!s) throw Error(ErrorKind::InvalidArgument, "'" + text + "' is not a state of this space");
    return *s;
}

json split_json(const std::optional<Split>& s) {
    if (!s) return nullptr;
    return json{{"k_begin", s->k_begin}, {"k_end", s->k_end}, {"items", s->items},
                {"view", std::string(to_string(s->view))}};
}

json transform_rows(const PartialFn& T, const std::optional<Condition>& support) {
    json rows = json::array();
    const auto& from = T.domain_space();
    for (StateIndex x = 0; x < from->size(); ++x) {
        if (support && !support->contains(x)) continue;
        rows.push_back(fmt(from, x) + " -> " + fmt(T.codomain_space(), T.at(x)));
    }
    return rows;
}

} // namespace

json order_json(ExtOrder n) { return n.to_string(); }

json profile_json(const NfProfile& p) { return json{{"order", order_json(p.order)}, {"limit", order_json(p.limit)}}; }

json certificate_json(const Certificate& c, const SpacePtr& source_space) {
    json j;
    j["holds"] = c.holds;
    j["failed_clause"] = c.holds ? json(nullptr) : json(std::string(to_string(c.failed)));
    j["witness"] = c.witness ? json(fmt(source_space, *c.witness)) : json(nullptr);
    j["other_witness"] = c.other_witness ? json(fmt(source_space, *c.other_witness)) : json(nullptr);
    j["detail"] = c.detail;
    return j;
}

json arrow_json(const Arrow& a) {
    json j;
    j["kind"] = std::string(to_string(a.kind));
    j["source"] = a.source;
    j["target"] = a.target;
    j["split"] = split_json(a.split);
    if (a.kind == ArrowKind::Type2Asserted) {
        j["transform"] = nullptr;
        j["witness"] = a.witness;
        j["certificate"] = nullptr;
        return j;
    }
    j["transform"] = a.transform ? transform_rows(*a.transform, a.support) : json(nullptr);
    j["witness"] = nullptr;
    j["certificate"] = certificate_json(a.certificate, a.from->space);
    return j;
}

PartialFn read_map(const std::string& path, const SpacePtr& from, const SpacePtr& to) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open map file '" + path + "'");
    std::vector<LiftedState> table(static_cast<std::size_t>(from->size()), kBottom);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto arrow = line.find("->");
        if (arrow == std::string::npos) {
            throw Error(ErrorKind::InvalidArgument, path + ":" + std::to_string(number) + ": expected 'state -> state'");
        }
        auto lhs = from->parse_assignment(line.substr(0, arrow));
        auto rhs = to->parse_assignment(line.substr(arrow + 2));
        if (!lhs || !rhs) {
            throw Error(ErrorKind::InvalidArgument, path + ":" + std::to_string(number) + ": unknown state");
        }
        if (table[*lhs].is_defined()) {
            throw Error(ErrorKind::InvalidArgument,
                        path + ":" + std::to_string(number) + ": state mapped twice");
        }
        table[*lhs] = LiftedState::defined(*rhs);
    }
    return PartialFn(from, to, std::move(table));
}

Outcome cmd_parse(const std::string& file) {
    auto unit = parse_file(file);
    json result;
    json domains = json::array();
    for (const auto& d : unit.domains()) {
        json values = json::array();
        for (auto v : d.domain.values()) values.push_back(v);
        domains.push_back({{"name", d.name}, {"values", values}, {"order", order_name(d.domain.order())}});
    }
    json variables = json::array();
    for (const auto& v : unit.variables()) variables.push_back({{"name", v.name}, {"domain", v.domain.name()}});
    json conditions = json::array();
    for (const auto& c : unit.conditions()) conditions.push_back({{"name", c.name}, {"text", c.text}});
    json functions = json::array();
    for (const auto& f : unit.functions()) {
        functions.push_back({{"name", f.name}, {"parameter", unit.variables()[f.variable].name}, {"text", f.text}});
    }
    json programs = json::array();
    for (const auto& p : unit.programs()) {
        json vars = json::array();
        for (auto v : p.variables) vars.push_back(unit.variables()[v].name);
        programs.push_back({{"name", p.name},
                            {"variables", vars},
                            {"states", p.space->size()},
                            {"line", p.line},
                            {"is_loop", as_loop(*p.body) != nullptr},
                            {"body", unit.stmt_to_string(*p.body)}});
    }
    result["domains"] = domains;
    result["variables"] = variables;
    result["conditions"] = conditions;
    result["functions"] = functions;
    result["programs"] = programs;
    return {make_report("parse", json{{"file", file}}, result), kOk};
}

Outcome cmd_denote(const std::string& file, const std::string& program, bool table) {
    auto unit = parse_file(file);
    const auto& p = unit.program(program);
    std::vector<std::string> diagnostics;
    note_lazy(p.space, diagnostics);
    auto f = denote(unit, program);
    std::uint64_t defined = 0;
    json rows = json::array();
    for (StateIndex x = 0; x < p.space->size(); ++x) {
        auto y = f.at(x);
        if (y.is_defined()) ++defined;
        if (table) rows.push_back(fmt(p.space, x) + " -> " + fmt(p.space, y));
    }
    json result;
    result["program"] = p.name;
    result["states"] = p.space->size();
    result["defined"] = defined;
    result["undefined"] = p.space->size() - defined;
    result["rows"] = table ? rows : json(nullptr);
    json inputs{{"file", file}, {"program", program}, {"table", table}};
    return {make_report("denote", inputs, result, diagnostics), kOk};
}

Outcome cmd_orbit(const Subject& subject, const std::string& start) {
    auto unit = parse_file(subject.file);
    auto a = analyse(unit, subject);
    auto x = parse_state(a.space, start);
    auto report = orbit(a.f, a.cond, LiftedState::defined(x));
    json trace = json::array();
    for (auto s : report.trace) trace.push_back(fmt(a.space, s));
    json applied = json::array();
    for (std::size_t k = 1; k < report.trace.size(); ++k) applied.push_back(fmt(a.space, report.trace[k]));
    json result;
    result["start"] = fmt(a.space, report.start);
    result["condition"] = a.cond.label();
    result["in_condition"] = a.cond.contains(x);
    result["trace"] = trace;
    result["applied"] = applied;
    result["stop_reason"] = std::string(to_string(report.stop_reason));
    result["order"] = order_json(report.order);
    auto inputs = subject_inputs(subject);
    inputs["start"] = start;
    std::vector<std::string> diagnostics;
    note_lazy(a.space, diagnostics);
    return {make_report("orbit", inputs, result, diagnostics), kOk};
}

Outcome cmd_order(const Subject& subject, const std::optional<std::string>& element) {
    auto unit = parse_file(subject.file);
    auto a = analyse(unit, subject);
    std::vector<std::string> diagnostics;
    note_lazy(a.space, diagnostics);
    json result;
    result["condition"] = a.cond.label();
    result["restriction_size"] = a.cond.count();
    if (element) {
        auto x = parse_state(a.space, *element);
        result["element"] = json{{"state", fmt(a.space, x)},
                                 {"order", order_json(element_order(a.f, a.cond, LiftedState::defined(x)))},
                                 {"in_condition", a.cond.contains(x)}};
    } else {
        result["element"] = nullptr;
    }
    auto orders = element_orders(a.f, a.cond);
    json table = json::array();
    for (auto x : restrict(a.space, a.cond)) {
        table.push_back({{"state", fmt(a.space, x)}, {"order", order_json(orders[x])}});
    }
    auto profile = profile_of(orders, a.cond);
    result["table"] = table;
    result["m"] = order_json(profile.order);
    result["l"] = order_json(profile.limit);
    result["profile"] = profile_json(profile);
    auto inputs = subject_inputs(subject);
    inputs["element"] = element ? json(*element) : json(nullptr);
    return {make_report("order", inputs, result, diagnostics), kOk};
}

Outcome cmd_profile(const Subject& subject, const std::string& cond2) {
    auto unit = parse_file(subject.file);
    auto a = analyse(unit, subject);
    auto c2 = resolve_condition(unit, cond2, a.space);
    json result;
    std::string direction;
    bool holds = false;
    RelaxationReport rel;
    if (entails(c2, a.cond)) {
        direction = c2 == a.cond ? "equal" : "strengthening";
        rel = relaxation(a.f, a.cond, c2);
        holds = check_strengthening(a.f, a.cond, c2);
    } else if (entails(a.cond, c2)) {
        direction = "weakening";
        rel = relaxation(a.f, c2, a.cond);
        holds = check_weakening(a.f, a.cond, c2);
    } else {
        throw Error(ErrorKind::InvalidArgument, "conditions '" + a.cond.label() + "' and '" + c2.label() +
                                                    "' are not related by entailment");
    }
    result["direction"] = direction;
    result["condition"] = a.cond.label();
    result["condition2"] = c2.label();
    // `weaker` and `stronger` name the two conditions whatever the argument order.
    result["weaker_profile"] = profile_json(rel.original);
    result["stronger_profile"] = profile_json(rel.strengthened);
    result["order_relaxation"] = rel.order_relaxation.to_string();
    result["limit_relaxation"] = rel.limit_relaxation.to_string();
    result["sigma"] = rel.sigma.to_string();
    result["window_collapsed"] = rel.window_collapsed;
    result["monotone"] = holds;
    auto inputs = subject_inputs(subject);
    inputs["cond2"] = cond2;
    std::vector<std::string> diagnostics;
    if (!holds) diagnostics.push_back("profile is not monotone for this pair of conditions");
    return {make_report("profile", inputs, result, diagnostics), holds ? kOk : kPropertyFails};
}

Outcome cmd_arrow(const ArrowRequest& r) {
    if (r.kind != 0 && r.kind != 1) throw Error(ErrorKind::InvalidArgument, "--kind must be 0 or 1");
    if (r.map_file.has_value() == r.search) throw Error(ErrorKind::InvalidArgument, "give exactly one of --map and --search");
    if (r.kind == 1 && r.to_cond) throw Error(ErrorKind::InvalidArgument, "--to-cond does not apply to type-1 arrows");
    auto unit = parse_file(r.file);
    const auto& from_p = unit.program(r.from);
    const auto& to_p = unit.program(r.to);
    auto cond_of = [&](const std::optional<std::string>& name, const SpacePtr& space) -> std::optional<Condition> {
        if (!name) return std::nullopt;
        return resolve_condition(unit, *name, space);
    };
    auto src = resolve_endpoint(unit, r.from, cond_of(r.from_cond, from_p.space));

    json inputs{{"file", r.file},          {"kind", r.kind},
                {"from", r.from},          {"to", r.to},
                {"from_cond", r.from_cond ? json(*r.from_cond) : json(nullptr)},
                {"to_cond", r.to_cond ? json(*r.to_cond) : json(nullptr)},
                {"map", r.map_file ? json(*r.map_file) : json(nullptr)},
                {"search", r.search}};
    std::vector<std::string> diagnostics;
    std::optional<Arrow> arrow;
    json result;

    if (r.kind == 0) {
        auto dst = resolve_endpoint(unit, r.to, cond_of(r.to_cond, to_p.space));
        if (r.search) {
            if (auto T = search_transform(*src, *dst)) {
                auto a = make_arrow0(src, dst, *T);
                if (a.certificate.holds) arrow = a;
            }
        } else {
            auto T = read_map(*r.map_file, from_p.space, to_p.space);
            auto a = make_arrow0(src, dst, T);
            result["certificate"] = certificate_json(a.certificate, from_p.space);
            if (a.certificate.holds) arrow = a;
        }
    } else if (r.search) {
        arrow = search_arrow1(src, unit, r.to);
    } else {
        auto T = read_map(*r.map_file, from_p.space, to_p.space);
        const auto items = top_level_items(*to_p.body).size();
        json attempts = json::array();
        for (std::size_t b = 0; b < items && !arrow; ++b) {
            for (std::size_t e = items; e > b && !arrow; --e) {
                Split split{b, e, items, src->kind};
                auto cert = verify_arrow1(*src, unit, r.to, split, T);
                attempts.push_back({{"split", split_json(split)}, {"certificate", certificate_json(cert, from_p.space)}});
                if (cert.holds) {
                    Arrow a;
                    a.kind = ArrowKind::Type1;
                    a.source = r.from;
                    a.target = r.to;
                    a.from = src;
                    a.transform = T;
                    a.split = split;
                    a.certificate = cert;
                    arrow = a;
                }
            }
        }
        result["attempts"] = attempts;
    }

    result["found"] = arrow.has_value();
    result["arrow"] = arrow ? arrow_json(*arrow) : json(nullptr);
    if (!result.contains("certificate")) result["certificate"] = arrow ? arrow_json(*arrow)["certificate"] : json(nullptr);
    if (!arrow) diagnostics.push_back("no arrow of type " + std::to_string(r.kind) + " from " + r.from + " to " + r.to);
    return {make_report("arrow", inputs, result, diagnostics), arrow ? kOk : kPropertyFails};
}

Outcome cmd_graph(const std::vector<std::string>& files, std::uint64_t budget, const std::vector<std::string>& only) {
    std::vector<std::unique_ptr<ProgramUnit>> units;
    std::vector<ProgramRef> refs;
    std::vector<std::string> origin;
    std::set<std::string> wanted(only.begin(), only.end());
    for (const auto& file : files) {
        units.push_back(std::make_unique<ProgramUnit>(parse_file(file)));
        for (const auto& p : units.back()->programs()) {
            if (!wanted.empty() && !wanted.count(p.name)) continue;
            refs.push_back({units.back().get(), p.name});
            origin.push_back(file);
        }
    }
    for (const auto& name : wanted) {
        bool seen = false;
        for (const auto& r : refs) seen = seen || r.name == name;
        if (!seen) throw Error(ErrorKind::UnknownName, "program '" + name + "' is not in the given files");
    }
    GraphOptions options;
    options.budget = budget;
    auto g = build_iso_graph(refs, options);

    json nodes = json::array();
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        nodes.push_back({{"name", g.nodes[k]},
                         {"file", origin[k]},
                         {"component", g.component_of(k)},
                         {"infinite_loop", static_cast<bool>(g.infinite_loop[k])},
                         {"undefined", static_cast<bool>(g.undefined[k])}});
    }
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back(arrow_json(e.arrow));
    json components = json::array();
    for (const auto& c : g.components) {
        json members = json::array();
        for (auto m : c.members) members.push_back(g.nodes[m]);
        components.push_back({{"members", members},
                              {"contains_infinite_loop", c.contains_infinite_loop},
                              {"contains_undefined", c.contains_undefined},
                              {"guaranteed_halting", c.guaranteed_halting()}});
    }
    json result{{"nodes", nodes},
                {"edges", edges},
                {"components", components},
                {"searches", g.searches},
                {"truncated", g.truncated}};
    json inputs{{"files", files}, {"budget", budget}, {"programs", only}};
    std::vector<std::string> diagnostics;
    if (g.truncated) diagnostics.push_back("search budget exhausted; the graph is partial");
    return {make_report("graph", inputs, result, diagnostics), g.truncated ? kBudget : kOk};
}

Outcome error_outcome(const std::string& command, const json& inputs, const std::exception& e) {
    int code = kUsage;
    json error{{"kind", "Error"}, {"message", e.what()}};
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        error["kind"] = std::string(to_string(err->kind()));
        if (err->kind() == ErrorKind::SearchBudgetExceeded) code = kBudget;
        if (err->kind() == ErrorKind::PartialT) code = kPropertyFails;
    }
    auto report = make_report(command, inputs, nullptr, {e.what()});
    report["error"] = error;
    return {report, code};
}

} // namespace tpf::cli
