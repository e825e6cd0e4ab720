#include "tpf/calculus.hpp"

#include <algorithm>
#include <unordered_set>

#include "tpf/error.hpp"

namespace tpf {

namespace {

// Resolves a while loop on `space`: every start is followed through the body
// while the condition holds; a repeated state means divergence, mapped to
// bottom.
PartialFn denote_while(const PartialFn& body, const Condition& cond) {
    const auto& space = body.domain_space();
    if (space->size() > table_bound()) {
        return PartialFn::from_rule(space, [body, cond](StateIndex x) -> LiftedState {
            std::unordered_set<StateIndex> seen;
            LiftedState y = LiftedState::defined(x);
            while (cond.contains(y)) {
                if (!seen.insert(y.index()).second) return kBottom;
                y = body(y);
            }
            return y;
        });
    }

    const auto n = static_cast<std::size_t>(space->size());
    enum : unsigned char { White, Gray, Black };
    std::vector<unsigned char> colour(n, White);
    std::vector<LiftedState> result(n);
    std::vector<StateIndex> path;
    for (std::size_t start = 0; start < n; ++start) {
        if (colour[start] != White) continue;
        path.clear();
        StateIndex x = start;
        LiftedState out;
        while (true) {
            if (!cond.contains(x)) {
                out = LiftedState::defined(x);
                break;
            }
            colour[x] = Gray;
            path.push_back(x);
            auto y = body.at(x);
            if (y.is_bottom()) {
                out = kBottom;
                break;
            }
            auto yi = y.index();
            if (colour[yi] == Gray) {
                out = kBottom;
                break;
            }
            if (colour[yi] == Black) {
                out = result[yi];
                break;
            }
            x = yi;
        }
        if (path.empty()) {
            result[start] = out;
            colour[start] = Black;
            continue;
        }
        for (auto s : path) {
            result[s] = out;
            colour[s] = Black;
        }
    }
    return PartialFn(space, space, std::move(result));
}

PartialFn denote_beta(const ProgramUnit& unit, const Stmt& stmt, const SpacePtr& space,
                      const std::vector<std::size_t>& vars) {
    if (stmt.rhs.size() > stmt.targets.size()) {
        throw Error(ErrorKind::ArityError, "assignment has more right-hand sides than targets");
    }
    if (stmt.rhs.empty()) throw Error(ErrorKind::ArityError, "assignment has no right-hand side");
    std::vector<std::size_t> slots;
    for (auto t : stmt.targets) {
        auto it = std::find(vars.begin(), vars.end(), t);
        if (it == vars.end()) {
            throw Error(ErrorKind::UnknownName, "assignment target '" + unit.variables()[t].name + "' is outside the space");
        }
        slots.push_back(static_cast<std::size_t>(it - vars.begin()));
    }
    auto rhs = stmt.rhs;
    while (rhs.size() < stmt.targets.size()) rhs.push_back(rhs.back());
    return PartialFn::from_rule(space, [&unit, space, vars, slots, rhs](StateIndex x) -> LiftedState {
        Env env;
        unit.load_state(space, vars, x, env);
        StateIndex s = x;
        for (std::size_t k = 0; k < slots.size(); ++k) {
            Value v{};
            switch (rhs[k].kind) {
            case BetaRhs::Kind::Bottom: return kBottom;
            case BetaRhs::Kind::Literal: v = rhs[k].literal; break;
            case BetaRhs::Kind::Variable: v = env.at(rhs[k].variable); break;
            }
            auto next = space->with_value(s, slots[k], v);
            if (!next) return kBottom;
            s = *next;
            env[vars[slots[k]]] = v;
        }
        return LiftedState::defined(s);
    });
}

PartialFn denote_apply(const ProgramUnit& unit, const Stmt& stmt, const SpacePtr& space,
                       const std::vector<std::size_t>& vars) {
    auto it = std::find(vars.begin(), vars.end(), stmt.variable);
    if (it == vars.end()) {
        throw Error(ErrorKind::UnknownName,
                    "assignment target '" + unit.variables()[stmt.variable].name + "' is outside the space");
    }
    const auto slot = static_cast<std::size_t>(it - vars.begin());
    return PartialFn::from_rule(space, [&unit, space, vars, slot, expr = stmt.expr](StateIndex x) -> LiftedState {
        Env env;
        unit.load_state(space, vars, x, env);
        auto v = unit.eval_int(*expr, env);
        if (!v) return kBottom;
        auto y = space->with_value(x, slot, *v);
        return y ? LiftedState::defined(*y) : kBottom;
    });
}

PartialFn denote_in(const ProgramUnit& unit, const Stmt& stmt, const SpacePtr& space,
                    const std::vector<std::size_t>& vars) {
    using K = Stmt::Kind;
    switch (stmt.kind) {
    case K::Skip: return identity_fn(space);
    case K::Abort: return undefined_fn(space);
    case K::Require: return cond_identity(unit.condition_on(stmt.cond, space, stmt.cond_text));
    case K::Beta: return denote_beta(unit, stmt, space, vars);
    case K::Apply: return denote_apply(unit, stmt, space, vars);
    case K::If: {
        auto c = unit.condition_on(stmt.cond, space, stmt.cond_text);
        auto then_fn = denote_in(unit, *stmt.children[0], space, vars);
        auto else_fn = denote_in(unit, *stmt.children[1], space, vars);
        return PartialFn::from_rule(space, [c, then_fn, else_fn](StateIndex x) {
            return c.contains(x) ? then_fn.at(x) : else_fn.at(x);
        });
    }
    case K::While: {
        auto c = unit.condition_on(stmt.cond, space, stmt.cond_text);
        return denote_while(denote_in(unit, *stmt.children[0], space, vars), c);
    }
    case K::Seq: {
        auto f = identity_fn(space);
        for (const auto& child : stmt.children) f = compose(denote_in(unit, *child, space, vars), f);
        return f;
    }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown statement kind");
}

} // namespace

PartialFn denote_stmt(const ProgramUnit& unit, const Stmt& stmt, const SpacePtr& space) {
    return denote_in(unit, stmt, space, unit.variables_of(space));
}

PartialFn denote(const ProgramUnit& unit, std::string_view program) {
    const auto& p = unit.program(program);
    return denote_stmt(unit, *p.body, p.space);
}

const Stmt* as_loop(const Stmt& stmt) {
    if (stmt.kind == Stmt::Kind::While) return &stmt;
    if (stmt.kind == Stmt::Kind::Seq && stmt.children.size() == 1) return as_loop(*stmt.children[0]);
    return nullptr;
}

StmtPtr beta_normalize(const ProgramUnit& unit, const Stmt& beta) {
    if (beta.kind != Stmt::Kind::Beta) throw Error(ErrorKind::InvalidArgument, "beta_normalize expects an assignment");
    if (beta.rhs.size() > beta.targets.size()) {
        throw Error(ErrorKind::ArityError, "assignment has more right-hand sides than targets");
    }
    if (beta.rhs.empty()) throw Error(ErrorKind::ArityError, "assignment has no right-hand side");
    auto rhs = beta.rhs;
    while (rhs.size() < beta.targets.size()) rhs.push_back(rhs.back());

    for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (rhs[k].kind == BetaRhs::Kind::Bottom) return Stmt::abort();
        if (rhs[k].kind == BetaRhs::Kind::Literal &&
            !unit.variables().at(beta.targets[k]).domain.contains(rhs[k].literal)) {
            return Stmt::abort();
        }
    }

    // An earlier write to t is dead when t is written again before anything
    // reads it.
    std::vector<std::size_t> targets;
    std::vector<BetaRhs> kept;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        const auto t = beta.targets[i];
        bool dead = false;
        for (std::size_t j = i + 1; j < rhs.size(); ++j) {
            if (rhs[j].kind == BetaRhs::Kind::Variable && rhs[j].variable == t) break;
            if (beta.targets[j] == t) {
                dead = true;
                break;
            }
        }
        if (!dead) {
            targets.push_back(t);
            kept.push_back(rhs[i]);
        }
    }
    return Stmt::beta(std::move(targets), std::move(kept));
}

bool check_equiv(const ProgramUnit& unit, std::string_view p1, std::string_view p2) {
    const auto& a = unit.program(p1);
    const auto& b = unit.program(p2);
    require_same_space(a.space, b.space, "check_equiv");
    return denote(unit, p1) == denote(unit, p2);
}

ExtOrder loop_iteration_count(const ProgramUnit& unit, std::string_view program, LiftedState x) {
    const auto& p = unit.program(program);
    const auto* loop = as_loop(*p.body);
    if (!loop) throw Error(ErrorKind::NotALoop, "program '" + p.name + "' is not a while loop");
    auto cond = unit.condition_on(loop->cond, p.space, loop->cond_text);
    auto body = denote_stmt(unit, *loop->children[0], p.space);
    auto n = element_order(body, cond, x);
    if (n.is_infinite()) return n;
    return ExtOrder::finite(n.value() + 1);
}

} // namespace tpf
