#include "tpf/syntax.hpp"

#include <sstream>

#include "tpf/error.hpp"

namespace tpf {

ExprType Expr::type() const {
    switch (op) {
    case Op::Lit:
    case Op::Var:
    case Op::Call:
    case Op::Neg:
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Mod:
    case Op::Pow:
        return ExprType::Int;
    default:
        return ExprType::Bool;
    }
}

StmtPtr Stmt::skip() {
    auto s = std::make_shared<Stmt>();
    s->kind = Kind::Skip;
    return s;
}

StmtPtr Stmt::abort() {
    auto s = std::make_shared<Stmt>();
    s->kind = Kind::Abort;
    return s;
}

StmtPtr Stmt::require(ExprPtr cond, std::string text) {
    auto s = std::make_shared<Stmt>();
    s->kind = Kind::Require;
    s->cond = std::move(cond);
    s->cond_text = std::move(text);
    return s;
}

StmtPtr Stmt::beta(std::vector<std::size_t> targets, std::vector<BetaRhs> rhs) {
    auto s = std::make_shared<Stmt>();
    s->kind = Kind::Beta;
    s->targets = std::move(targets);
    s->rhs = std::move(rhs);
    return s;
}

StmtPtr Stmt::apply(std::size_t variable, ExprPtr expr) {
    auto s = std::make_shared<Stmt>();
    s->kind = Kind::Apply;
    s->variable = variable;
    s->expr = std::move(expr);
    return s;
}

StmtPtr Stmt::if_(ExprPtr cond, std::string text, StmtPtr then_branch, StmtPtr else_branch) {
    auto s = std::make_shared<Stmt>();
    s->kind = Kind::If;
    s->cond = std::move(cond);
    s->cond_text = std::move(text);
    s->children = {std::move(then_branch), std::move(else_branch)};
    return s;
}

StmtPtr Stmt::while_(ExprPtr cond, std::string text, StmtPtr body) {
    auto s = std::make_shared<Stmt>();
    s->kind = Kind::While;
    s->cond = std::move(cond);
    s->cond_text = std::move(text);
    s->children = {std::move(body)};
    return s;
}

StmtPtr Stmt::seq(std::vector<StmtPtr> items) {
    auto s = std::make_shared<Stmt>();
    s->kind = Kind::Seq;
    s->children = std::move(items);
    return s;
}

namespace {

template <typename T>
const T* find_named(const std::vector<T>& items, std::string_view name) {
    for (const auto& item : items) {
        if (item.name == name) return &item;
    }
    return nullptr;
}

Value floor_div(Value a, Value b) {
    Value q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Value floor_mod(Value a, Value b) {
    Value r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) r += b;
    return r;
}

std::optional<Value> checked_pow(Value base, Value exp) {
    if (exp < 0) return std::nullopt;
    Value result = 1;
    while (exp > 0) {
        if (exp & 1) {
            if (__builtin_mul_overflow(result, base, &result)) return std::nullopt;
        }
        exp >>= 1;
        if (exp > 0 && __builtin_mul_overflow(base, base, &base)) return std::nullopt;
    }
    return result;
}

} // namespace

std::optional<std::size_t> ProgramUnit::variable_index(std::string_view name) const {
    for (std::size_t k = 0; k < variables_.size(); ++k) {
        if (variables_[k].name == name) return k;
    }
    return std::nullopt;
}

const ProgramUnit::DomainDecl* ProgramUnit::find_domain(std::string_view name) const {
    return find_named(domains_, name);
}
const ProgramUnit::CondDecl* ProgramUnit::find_condition(std::string_view name) const {
    return find_named(conditions_, name);
}
const ProgramUnit::FnDecl* ProgramUnit::find_function(std::string_view name) const {
    return find_named(functions_, name);
}
const ProgramUnit::Program* ProgramUnit::find_program(std::string_view name) const {
    return find_named(programs_, name);
}

const ProgramUnit::CondDecl& ProgramUnit::condition_decl(std::string_view name) const {
    if (auto* c = find_condition(name)) return *c;
    throw Error(ErrorKind::UnknownName, "no condition named '" + std::string(name) + "'");
}

const ProgramUnit::FnDecl& ProgramUnit::function_decl(std::string_view name) const {
    if (auto* f = find_function(name)) return *f;
    throw Error(ErrorKind::UnknownName, "no function named '" + std::string(name) + "'");
}

const ProgramUnit::Program& ProgramUnit::program(std::string_view name) const {
    if (auto* p = find_program(name)) return *p;
    throw Error(ErrorKind::UnknownName, "no program named '" + std::string(name) + "'");
}

SpacePtr ProgramUnit::full_space() const {
    if (!full_space_) full_space_ = make_space(variables_);
    return full_space_;
}

SpacePtr ProgramUnit::space_over(const std::vector<std::size_t>& vars) const {
    std::vector<Variable> chosen;
    chosen.reserve(vars.size());
    for (auto v : vars) chosen.push_back(variables_.at(v));
    return make_space(std::move(chosen));
}

std::vector<std::size_t> ProgramUnit::variables_of(const SpacePtr& space) const {
    std::vector<std::size_t> out;
    for (const auto& v : space->variables()) {
        auto k = variable_index(v.name);
        if (!k || !(variables_[*k] == v)) {
            throw Error(ErrorKind::UnknownName, "space variable '" + v.name + "' is not declared in this unit");
        }
        out.push_back(*k);
    }
    return out;
}

void ProgramUnit::load_state(const SpacePtr& space, const std::vector<std::size_t>& vars, StateIndex s,
                             Env& env) const {
    env.resize(variables_.size(), 0);
    for (std::size_t k = 0; k < vars.size(); ++k) env[vars[k]] = space->value_of(s, k);
}

namespace {

void require_reads_within(const ProgramUnit& unit, const Expr& e, const std::vector<std::size_t>& vars) {
    std::vector<bool> reads(unit.variables().size(), false);
    collect_reads(e, unit, reads);
    std::vector<bool> allowed(unit.variables().size(), false);
    for (auto v : vars) allowed[v] = true;
    for (std::size_t k = 0; k < reads.size(); ++k) {
        if (reads[k] && !allowed[k]) {
            throw Error(ErrorKind::UnknownName,
                        "variable '" + unit.variables()[k].name + "' is not part of the state space");
        }
    }
}

} // namespace

Condition ProgramUnit::condition_on(const ExprPtr& expr, const SpacePtr& space, std::string label) const {
    if (expr->type() != ExprType::Bool) {
        throw Error(ErrorKind::TypeError, "condition expression is not boolean");
    }
    auto vars = variables_of(space);
    require_reads_within(*this, *expr, vars);
    Env env;
    return Condition::from_predicate(
        space,
        [&](StateIndex s) {
            load_state(space, vars, s, env);
            return eval_bool(*expr, env).value_or(false);
        },
        std::move(label));
}

Condition ProgramUnit::condition(std::string_view name, const SpacePtr& space) const {
    const auto& decl = condition_decl(name);
    return condition_on(decl.expr, space, decl.name);
}

PartialFn ProgramUnit::function_endo(std::string_view name, const SpacePtr& space) const {
    const auto& decl = function_decl(name);
    auto vars = variables_of(space);
    std::optional<std::size_t> slot;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        if (vars[k] == decl.variable) slot = k;
    }
    if (!slot) {
        throw Error(ErrorKind::UnknownName, "function '" + decl.name + "' updates a variable outside the space");
    }
    require_reads_within(*this, *decl.body, vars);
    return PartialFn::from_rule(space, [this, space, vars, slot, body = decl.body](StateIndex s) {
        Env env;
        load_state(space, vars, s, env);
        auto v = eval_int(*body, env);
        if (!v) return kBottom;
        auto y = space->with_value(s, *slot, *v);
        return y ? LiftedState::defined(*y) : kBottom;
    });
}

std::optional<Value> ProgramUnit::eval_int(const Expr& e, const Env& env) const {
    using Op = Expr::Op;
    switch (e.op) {
    case Op::Lit: return e.literal;
    case Op::Var: return env.at(e.variable);
    case Op::Call: {
        const auto& fn = functions_.at(e.function);
        auto arg = eval_int(*e.args[0], env);
        if (!arg) return std::nullopt;
        Env inner = env;
        inner[fn.variable] = *arg;
        return eval_int(*fn.body, inner);
    }
    case Op::Neg: {
        auto a = eval_int(*e.args[0], env);
        Value r{};
        if (!a || __builtin_sub_overflow(Value{0}, *a, &r)) return std::nullopt;
        return r;
    }
    default: break;
    }
    auto a = eval_int(*e.args.at(0), env);
    auto b = eval_int(*e.args.at(1), env);
    if (!a || !b) return std::nullopt;
    Value r{};
    switch (e.op) {
    case Op::Add:
        if (__builtin_add_overflow(*a, *b, &r)) return std::nullopt;
        return r;
    case Op::Sub:
        if (__builtin_sub_overflow(*a, *b, &r)) return std::nullopt;
        return r;
    case Op::Mul:
        if (__builtin_mul_overflow(*a, *b, &r)) return std::nullopt;
        return r;
    case Op::Div:
        if (*b == 0 || (*b == -1 && *a == std::numeric_limits<Value>::min())) return std::nullopt;
        return floor_div(*a, *b);
    case Op::Mod:
        if (*b == 0) return std::nullopt;
        if (*b == -1) return Value{0};
        return floor_mod(*a, *b);
    case Op::Pow: return checked_pow(*a, *b);
    default: throw Error(ErrorKind::TypeError, "boolean expression used where an integer is required");
    }
}

std::optional<bool> ProgramUnit::eval_bool(const Expr& e, const Env& env) const {
    using Op = Expr::Op;
    switch (e.op) {
    case Op::BoolLit: return e.literal != 0;
    case Op::Not: {
        auto a = eval_bool(*e.args[0], env);
        if (!a) return std::nullopt;
        return !*a;
    }
    case Op::And: {
        auto a = eval_bool(*e.args[0], env);
        auto b = eval_bool(*e.args[1], env);
        if ((a && !*a) || (b && !*b)) return false;
        if (!a || !b) return std::nullopt;
        return true;
    }
    case Op::Or: {
        auto a = eval_bool(*e.args[0], env);
        auto b = eval_bool(*e.args[1], env);
        if ((a && *a) || (b && *b)) return true;
        if (!a || !b) return std::nullopt;
        return false;
    }
    default: break;
    }
    auto a = eval_int(*e.args.at(0), env);
    auto b = eval_int(*e.args.at(1), env);
    if (!a || !b) return std::nullopt;
    switch (e.op) {
    case Op::Lt: return *a < *b;
    case Op::Le: return *a <= *b;
    case Op::Gt: return *a > *b;
    case Op::Ge: return *a >= *b;
    case Op::Eq: return *a == *b;
    case Op::Ne: return *a != *b;
    default: throw Error(ErrorKind::TypeError, "integer expression used where a condition is required");
    }
}

namespace {

int precedence(Expr::Op op) {
    using Op = Expr::Op;
    switch (op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: case Op::Eq: case Op::Ne: return 3;
    case Op::Add: case Op::Sub: return 4;
    case Op::Mul: case Op::Div: case Op::Mod: return 5;
    case Op::Pow: return 6;
    case Op::Neg: case Op::Not: return 7;
    default: return 8;
    }
}

std::string_view op_text(Expr::Op op) {
    using Op = Expr::Op;
    switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "mod";
    case Op::Pow: return "^";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::And: return "and";
    case Op::Or: return "or";
    default: return "?";
    }
}

} // namespace

std::string ProgramUnit::expr_to_string(const Expr& e) const {
    using Op = Expr::Op;
    auto wrap = [&](const Expr& child, bool strict) {
        auto text = expr_to_string(child);
        int pc = precedence(child.op);
        int pe = precedence(e.op);
        return (pc < pe || (strict && pc == pe)) ? "(" + text + ")" : text;
    };
    switch (e.op) {
    case Op::Lit: return std::to_string(e.literal);
    case Op::BoolLit: return e.literal ? "true" : "false";
    case Op::Var: return variables_.at(e.variable).name;
    case Op::Call: return functions_.at(e.function).name + "(" + expr_to_string(*e.args[0]) + ")";
    case Op::Neg: return "-" + wrap(*e.args[0], false);
    case Op::Not: return "not " + wrap(*e.args[0], false);
    case Op::Pow:
        return wrap(*e.args[0], true) + " ^ " + wrap(*e.args[1], false);
    default:
        return wrap(*e.args[0], false) + " " + std::string(op_text(e.op)) + " " + wrap(*e.args[1], true);
    }
}

std::string ProgramUnit::stmt_to_string(const Stmt& s) const {
    using K = Stmt::Kind;
    auto block = [&](const Stmt& inner) { return "{ " + stmt_to_string(inner) + " }"; };
    auto rhs_text = [&](const BetaRhs& r) -> std::string {
        switch (r.kind) {
        case BetaRhs::Kind::Literal: return std::to_string(r.literal);
        case BetaRhs::Kind::Variable: return variables_.at(r.variable).name;
        case BetaRhs::Kind::Bottom: return "bottom";
        }
        return "?";
    };
    switch (s.kind) {
    case K::Skip: return "skip";
    case K::Abort: return "abort";
    case K::Require: return "require " + expr_to_string(*s.cond);
    case K::Beta: {
        std::ostringstream os;
        if (s.targets.size() == 1 && s.rhs.size() == 1) {
            os << variables_.at(s.targets[0]).name << " <- " << rhs_text(s.rhs[0]);
            return os.str();
        }
        os << '(';
        for (std::size_t k = 0; k < s.targets.size(); ++k) os << (k ? ", " : "") << variables_.at(s.targets[k]).name;
        os << ") <- (";
        for (std::size_t k = 0; k < s.rhs.size(); ++k) os << (k ? ", " : "") << rhs_text(s.rhs[k]);
        os << ')';
        return os.str();
    }
    case K::Apply: return variables_.at(s.variable).name + " <- " + expr_to_string(*s.expr);
    case K::If:
        return "if " + expr_to_string(*s.cond) + " " + block(*s.children[0]) + " else " + block(*s.children[1]);
    case K::While: return "while " + expr_to_string(*s.cond) + " " + block(*s.children[0]);
    case K::Seq: {
        std::string out;
        for (std::size_t k = 0; k < s.children.size(); ++k) {
            if (k) out += "; ";
            const auto& child = *s.children[k];
            out += child.kind == K::Seq ? block(child) : stmt_to_string(child);
        }
        return out.empty() ? "{ }" : out;
    }
    }
    return "?";
}

void collect_reads(const Expr& e, const ProgramUnit& unit, std::vector<bool>& out) {
    if (e.op == Expr::Op::Var) out.at(e.variable) = true;
    if (e.op == Expr::Op::Call) {
        const auto& fn = unit.functions().at(e.function);
        std::vector<bool> body(out.size(), false);
        collect_reads(*fn.body, unit, body);
        body[fn.variable] = false;
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = out[k] || body[k];
    }
    for (const auto& a : e.args) collect_reads(*a, unit, out);
}

void collect_vars(const Stmt& s, const ProgramUnit& unit, std::vector<bool>& out) {
    if (s.cond) collect_reads(*s.cond, unit, out);
    if (s.expr) collect_reads(*s.expr, unit, out);
    if (s.kind == Stmt::Kind::Apply) out.at(s.variable) = true;
    for (auto t : s.targets) out.at(t) = true;
    for (const auto& r : s.rhs) {
        if (r.kind == BetaRhs::Kind::Variable) out.at(r.variable) = true;
    }
    for (const auto& c : s.children) collect_vars(*c, unit, out);
}

} // namespace tpf
