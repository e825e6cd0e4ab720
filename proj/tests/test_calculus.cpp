#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "tpf/calculus.hpp"
#include "tpf/error.hpp"

using namespace tpf;

namespace {

std::string fixture(const std::string& name) { return std::string(TPF_SOURCE_DIR) + "/tests/fixtures/" + name; }

ErrorKind source_error_kind(const std::string& src, int* line = nullptr, int* col = nullptr) {
    try {
        parse(src);
    } catch (const SourceError& e) {
        if (line) *line = e.line();
        if (col) *col = e.column();
        return e.kind();
    }
    FAIL("source parsed without error");
    return ErrorKind::InvalidArgument;
}

void check_against_interpreter(const ProgramUnit& unit) {
    for (const auto& p : unit.programs()) {
        auto f = denote(unit, p.name);
        for (StateIndex x = 0; x < p.space->size(); ++x) {
            INFO(p.name << " at " << p.space->format(LiftedState::defined(x)));
            CHECK(f.at(x) == oracle::interpret(unit, p, x));
        }
    }
}

} // namespace

TEST_CASE("parser positions and error kinds") {
    int line = 0, col = 0;
    CHECK(source_error_kind("domain A = 1 .. 3\nvar x : A\nprogram P = x <- \n", &line, &col) == ErrorKind::SyntaxError);
    CHECK(line == 4);

    CHECK(source_error_kind("domain A = 1 .. 3\nvar x : B\n", &line, &col) == ErrorKind::UnknownName);
    CHECK(line == 2);
    CHECK(col == 9);

    CHECK(source_error_kind("domain A = 1 .. 3\nvar x : A\nprogram P = x <- x < 2\n") == ErrorKind::TypeError);
    CHECK(source_error_kind("domain A = 1 .. 3\nvar x : A\ncond C = x + 1\n") == ErrorKind::TypeError);
    CHECK(source_error_kind("domain A = 1 .. 3\nvar x : A\nprogram P = y <- 1\n") == ErrorKind::UnknownName);
    CHECK(source_error_kind("domain A = 3 .. 1\nvar x : A\n") != ErrorKind::InvalidArgument);
}

TEST_CASE("unicode operators read like their ascii spellings") {
    auto ascii = parse("domain A = 0 .. 9\nvar x : A\n"
                       "program P = while x <= 7 and not (x = 3) { x <- x - 1 }\n"
                       "program Q = while x \xE2\x89\xA4 7 \xE2\x88\xA7 \xC2\xAC(x = 3) { x \xE2\x86\x90 x \xE2\x88\x92 1 }\n");
    CHECK(denote(ascii, "P") == denote(ascii, "Q"));
}

TEST_CASE("denotations agree with the interpreter on every fixture") {
    for (auto name : {"f1.tpf", "counting.tpf", "condfunc.tpf", "staged.tpf", "probes.tpf", "pairs.tpf", "small_state.tpf"}) {
        INFO(name);
        check_against_interpreter(parse_file(fixture(name)));
    }
}

TEST_CASE("F1 denotation and iteration counts") {
    auto unit = parse_file(fixture("f1.tpf"));
    const auto& p = unit.program("F1");
    auto f = denote(unit, "F1");
    auto s = p.space;
    auto at = [&](Value x) { return LiftedState::defined(*s->encode(std::vector<Value>{x})); };
    CHECK(f(at(1)) == at(11));
    CHECK(f(at(8)) == at(10));
    CHECK(f(at(12)) == at(12));
    CHECK(loop_iteration_count(unit, "F1", at(1)) == ExtOrder::finite(5));
    CHECK(loop_iteration_count(unit, "F1", at(8)) == ExtOrder::finite(1));
    CHECK(loop_iteration_count(unit, "F1", at(9)) == ExtOrder::finite(1));
    CHECK(loop_iteration_count(unit, "F1", at(13)) == ExtOrder::finite(0));

    auto probes = parse_file(fixture("probes.tpf"));
    CHECK(loop_iteration_count(probes, "spin", LiftedState::defined(0)).is_infinite());
    CHECK_THROWS_AS(loop_iteration_count(probes, "crash", LiftedState::defined(0)), Error);
}

TEST_CASE("conditional function written two ways") {
    auto unit = parse_file(fixture("condfunc.tpf"));
    CHECK(check_equiv(unit, "condFunc", "condFunc2"));
}

TEST_CASE("restricting starts versus folding into the loop condition") {
    auto unit = parse_file(fixture("small_state.tpf"));
    CHECK(check_equiv(unit, "smallStateVar", "smallStateVar2"));
    CHECK_FALSE(check_equiv(unit, "leaky", "leaky2"));
}

TEST_CASE("check_equiv needs a shared space") {
    auto unit = parse_file(fixture("counting.tpf"));
    try {
        check_equiv(unit, "P1", "P2");
        FAIL("expected SpaceMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SpaceMismatch);
    }
}

TEST_CASE("beta normalisation") {
    auto unit = parse("domain S = 0 .. 4\nvar a, b, c : S\n");
    using K = BetaRhs::Kind;
    auto lit = [](Value v) { return BetaRhs{K::Literal, v, 0}; };
    auto var = [](std::size_t v) { return BetaRhs{K::Variable, 0, v}; };

    auto broadcast = beta_normalize(unit, *Stmt::beta({0, 1, 2}, {lit(3)}));
    REQUIRE(broadcast->kind == Stmt::Kind::Beta);
    CHECK(broadcast->rhs == std::vector<BetaRhs>{lit(3), lit(3), lit(3)});

    CHECK(beta_normalize(unit, *Stmt::beta({0, 1}, {lit(1), BetaRhs{K::Bottom, 0, 0}}))->kind == Stmt::Kind::Abort);
    CHECK(beta_normalize(unit, *Stmt::beta({0}, {lit(9)}))->kind == Stmt::Kind::Abort);

    auto dead = beta_normalize(unit, *Stmt::beta({0, 0}, {lit(1), lit(2)}));
    CHECK(dead->targets == std::vector<std::size_t>{0});
    CHECK(dead->rhs == std::vector<BetaRhs>{lit(2)});

    // the first write to a is read before it is overwritten
    auto live = beta_normalize(unit, *Stmt::beta({0, 1, 0}, {lit(1), var(0), lit(2)}));
    CHECK(live->targets.size() == 3);

    try {
        beta_normalize(unit, *Stmt::beta({0}, {lit(1), lit(2)}));
        FAIL("expected ArityError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ArityError);
    }
}

TEST_CASE("normalised assignments keep their meaning") {
    auto unit = parse_file(fixture("pairs.tpf"));
    auto s = unit.full_space();
    oracle::Rng rng(41);
    using K = BetaRhs::Kind;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::size_t> targets;
        std::vector<BetaRhs> rhs;
        auto n = 1 + rng.below(4);
        for (std::size_t k = 0; k < n; ++k) {
            targets.push_back(rng.below(2));
            if (k < 1 || rng.chance(0.6)) {
                auto pick = rng.below(10);
                rhs.push_back(pick < 5 ? BetaRhs{K::Literal, static_cast<Value>(rng.below(6)), 0}
                                       : pick < 9 ? BetaRhs{K::Variable, 0, rng.below(2)} : BetaRhs{K::Bottom, 0, 0});
            }
        }
        auto raw = Stmt::beta(targets, rhs);
        auto norm = beta_normalize(unit, *raw);
        CHECK(denote_stmt(unit, *raw, s) == denote_stmt(unit, *norm, s));
    }
}

TEST_CASE("program laws on generated programs") {
    oracle::Rng rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        auto n = 3 + rng.below(12);
        auto r = [&](std::uint64_t k) { return std::to_string(rng.below(k)); };
        std::ostringstream src;
        src << "domain A = 0 .. " << n - 1 << "\nvar x : A\n";
        src << "cond C = x mod " << 2 + rng.below(3) << " < " << 1 + rng.below(2) << "\n";
        src << "fn f1(x) = (" << r(4) << " * x + " << r(5) << ") mod " << n << "\n";
        src << "fn f2(x) = (" << 1 + rng.below(3) << " * x + " << r(3) << ") mod " << n << "\n";
        src << "program IfA = if C { x <- f1(x) } else { x <- f2(x) }\n"
               "program IfB = if not C { x <- f2(x) } else { x <- f1(x) }\n"
               "program Spin = while C { skip }\n"
               "program Guard = require not C\n"
               "program Req = require C\n"
               "program IfAbort = if C { skip } else { abort }\n"
               "program Loop = while C { x <- f1(x) }\n"
               "program Unrolled = if C { x <- f1(x); while C { x <- f1(x) } } else { skip }\n";
        INFO(src.str());
        auto unit = parse(src.str());
        CHECK(check_equiv(unit, "IfA", "IfB"));
        CHECK(check_equiv(unit, "Spin", "Guard"));
        CHECK(check_equiv(unit, "Req", "IfAbort"));
        CHECK(check_equiv(unit, "Loop", "Unrolled"));
        check_against_interpreter(unit);
    }
}

TEST_CASE("as_loop") {
    auto unit = parse_file(fixture("staged.tpf"));
    CHECK(as_loop(*unit.program("countdown").body) != nullptr);
    CHECK(as_loop(*unit.program("staged").body) == nullptr);
}
