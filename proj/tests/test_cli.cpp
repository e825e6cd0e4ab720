#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tpf/error.hpp"
#include "tpf/report.hpp"

using namespace tpf;
using namespace tpf::cli;

namespace {

std::string fixture(const std::string& name) { return std::string(TPF_SOURCE_DIR) + "/tests/fixtures/" + name; }

Outcome run(const std::string& command, const std::function<Outcome()>& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return error_outcome(command, json::object(), e);
    }
}

} // namespace

TEST_CASE("order values serialise as strings") {
    CHECK(order_json(ExtOrder::neg_one()) == "-1");
    CHECK(order_json(ExtOrder::infinite()) == "inf");
    CHECK(order_json(ExtOrder::finite(3)) == "3");
    auto p = profile_json(NfProfile{ExtOrder::finite(0), ExtOrder::finite(4)});
    CHECK(p["order"] == "0");
    CHECK(p["limit"] == "4");
}

TEST_CASE("order report for F1") {
    auto out = cmd_order(Subject{fixture("f1.tpf"), std::nullopt, "F1", std::nullopt}, std::string("x=1"));
    CHECK(out.exit_code == kOk);
    const auto& r = out.report["result"];
    CHECK(r["m"] == "0");
    CHECK(r["l"] == "4");
    CHECK(r["restriction_size"] == 9);
    CHECK(r["table"].size() == 9);
    CHECK(r["element"]["order"] == "4");
    CHECK(out.report["schema_version"] == kSchemaVersion);
    CHECK(out.report["command"] == "order");
}

TEST_CASE("profile direction and relaxation") {
    auto weak = cmd_profile(Subject{fixture("f1.tpf"), std::nullopt, "F1", std::nullopt}, "true");
    CHECK(weak.report["result"]["direction"] == "weakening");
    CHECK(weak.report["result"]["weaker_profile"]["limit"] == "7");
    CHECK(weak.report["result"]["sigma"] == "3");

    auto same = cmd_profile(Subject{fixture("f1.tpf"), std::nullopt, "F1", std::nullopt}, "C");
    CHECK(same.report["result"]["direction"] == "equal");
    CHECK(same.exit_code == kOk);
}

TEST_CASE("denote and orbit") {
    auto d = cmd_denote(fixture("f1.tpf"), "F1", true);
    CHECK(d.exit_code == kOk);
    CHECK(d.report["result"]["rows"].size() == 15);

    auto o = cmd_orbit(Subject{fixture("f1.tpf"), std::nullopt, "F1", std::nullopt}, "x=1");
    CHECK(o.report["result"]["order"] == "4");
    CHECK(o.report["result"]["trace"].size() == 6);
}

TEST_CASE("arrows from map files") {
    ArrowRequest req{fixture("counting.tpf"), 0, "P1", "P2", std::nullopt, std::nullopt, fixture("p1_p2.map"), false};
    auto ok = cmd_arrow(req);
    CHECK(ok.exit_code == kOk);
    CHECK(ok.report["result"]["found"] == true);
    CHECK(ok.report["result"]["arrow"]["transform"][0] == "i=1 -> j=100");

    req.map_file = fixture("p1_p2_reordered.map");
    auto bad = cmd_arrow(req);
    CHECK(bad.exit_code == kPropertyFails);
    CHECK(bad.report["result"]["certificate"]["failed_clause"] == "b");

    req.map_file = fixture("p1_p2_shifted.map");
    auto partial = run("arrow", [&] { return cmd_arrow(req); });
    CHECK(partial.exit_code == kPropertyFails);
    CHECK(partial.report["error"]["kind"] == "PartialT");
    CHECK(partial.report["result"].is_null());

    req.map_file = fixture("p1_p3.map");
    req.to = "P3";
    CHECK(cmd_arrow(req).exit_code == kOk);

    ArrowRequest staged{fixture("staged.tpf"), 1, "countdown", "staged", std::nullopt, std::nullopt,
                        fixture("countdown_staged.map"), false};
    auto t1 = cmd_arrow(staged);
    CHECK(t1.exit_code == kOk);
    CHECK(t1.report["result"]["arrow"]["kind"] == "Type1");
}

TEST_CASE("arrow search") {
    ArrowRequest req{fixture("counting.tpf"), 0, "P1", "Short", std::nullopt, std::nullopt, std::nullopt, true};
    auto none = cmd_arrow(req);
    CHECK(none.exit_code == kPropertyFails);
    CHECK(none.report["result"]["found"] == false);

    req.to = "P3";
    auto found = cmd_arrow(req);
    CHECK(found.exit_code == kOk);
    CHECK(found.report["result"]["arrow"]["transform"].size() == 10);
}

TEST_CASE("read_map rejects duplicates and unknown states") {
    auto unit = parse_file(fixture("counting.tpf"));
    auto from = unit.program("P1").space;
    auto to = unit.program("P2").space;
    auto f = read_map(fixture("p1_p2.map"), from, to);
    CHECK(f.at(0) == LiftedState::defined(0));
    CHECK_THROWS_AS(read_map(fixture("p1_p2.map"), to, from), Error);
    CHECK_THROWS_AS(read_map(fixture("missing.map"), from, to), Error);
}

TEST_CASE("graph report") {
    auto g = cmd_graph({fixture("probes.tpf"), fixture("f1.tpf")}, 10'000, {"spin", "crash", "F1"});
    CHECK(g.exit_code == kOk);
    CHECK(g.report["result"]["components"].size() == 2);

    auto cut = cmd_graph({fixture("counting.tpf")}, 1, {});
    CHECK(cut.exit_code == kBudget);
    CHECK(cut.report["result"]["truncated"] == true);
}

TEST_CASE("error outcomes") {
    auto syntax = run("parse", [] { return cmd_parse(std::string(TPF_SOURCE_DIR) + "/tests/test_cli.cpp"); });
    CHECK(syntax.exit_code == kUsage);
    CHECK(syntax.report["error"]["kind"] == "SyntaxError");

    auto budget = error_outcome("graph", json::object(), Error(ErrorKind::SearchBudgetExceeded, "too big"));
    CHECK(budget.exit_code == kBudget);

    auto missing = run("order", [] { return cmd_order(Subject{fixture("f1.tpf"), std::nullopt, "Nope", std::nullopt}, {}); });
    CHECK(missing.exit_code == kUsage);
    CHECK(missing.report["error"]["kind"] == "UnknownName");
}
