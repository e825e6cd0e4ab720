#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpf/partial_fn.hpp"
#include "tpf/state.hpp"

namespace tpf {

// ---------------------------------------------------------------------------
// Expressions

enum class ExprType { Int, Bool };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Op {
        Lit, BoolLit, Var, Call,
        Neg, Not,
        Add, Sub, Mul, Div, Mod, Pow,
        Lt, Le, Gt, Ge, Eq, Ne,
        And, Or,
    };

    Op op = Op::Lit;
    Value literal = 0;          // Lit, BoolLit (0/1)
    std::size_t variable = 0;   // Var: index into ProgramUnit::variables()
    std::size_t function = 0;   // Call: index into ProgramUnit::functions()
    std::vector<ExprPtr> args;

    ExprType type() const;
};

// Values of every declared variable, indexed like ProgramUnit::variables().
using Env = std::vector<Value>;

// ---------------------------------------------------------------------------
// Statements

struct BetaRhs {
    enum class Kind { Literal, Variable, Bottom };
    Kind kind = Kind::Literal;
    Value literal = 0;
    std::size_t variable = 0;

    friend bool operator==(const BetaRhs&, const BetaRhs&) = default;
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
    enum class Kind { Skip, Abort, Require, Beta, Apply, If, While, Seq };

    Kind kind = Kind::Skip;
    ExprPtr cond;               // Require, If, While
    std::string cond_text;      // source text of the condition
    std::vector<std::size_t> targets;  // Beta
    std::vector<BetaRhs> rhs;          // Beta
    std::size_t variable = 0;   // Apply target
    ExprPtr expr;               // Apply right-hand side
    std::vector<StmtPtr> children;  // If: {then, else}; While: {body}; Seq: items

    static StmtPtr skip();
    static StmtPtr abort();
    static StmtPtr require(ExprPtr cond, std::string text);
    static StmtPtr beta(std::vector<std::size_t> targets, std::vector<BetaRhs> rhs);
    static StmtPtr apply(std::size_t variable, ExprPtr expr);
    static StmtPtr if_(ExprPtr cond, std::string text, StmtPtr then_branch, StmtPtr else_branch);
    static StmtPtr while_(ExprPtr cond, std::string text, StmtPtr body);
    static StmtPtr seq(std::vector<StmtPtr> items);
};

// ---------------------------------------------------------------------------
// Program units

class ProgramUnit {
public:
    struct DomainDecl {
        std::string name;
        Domain domain;
    };
    struct CondDecl {
        std::string name;
        ExprPtr expr;
        std::string text;
    };
    struct FnDecl {
        std::string name;
        std::size_t variable = 0;  // the parameter, a state variable
        ExprPtr body;
        std::string text;
    };
    struct Program {
        std::string name;
        std::vector<std::size_t> variables;  // program space, in order
        SpacePtr space;
        StmtPtr body;
        int line = 0;
    };

    const std::vector<DomainDecl>& domains() const noexcept { return domains_; }
    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const std::vector<CondDecl>& conditions() const noexcept { return conditions_; }
    const std::vector<FnDecl>& functions() const noexcept { return functions_; }
    const std::vector<Program>& programs() const noexcept { return programs_; }

    std::optional<std::size_t> variable_index(std::string_view name) const;
    const DomainDecl* find_domain(std::string_view name) const;
    const CondDecl* find_condition(std::string_view name) const;
    const FnDecl* find_function(std::string_view name) const;
    const Program* find_program(std::string_view name) const;

    // Throw UnknownName when absent.
    const CondDecl& condition_decl(std::string_view name) const;
    const FnDecl& function_decl(std::string_view name) const;
    const Program& program(std::string_view name) const;

    // The space spanned by every declared variable, in declaration order.
    SpacePtr full_space() const;
    // Space over the given variables (indices into variables()).
    SpacePtr space_over(const std::vector<std::size_t>& vars) const;

    // Global variable indices that make up `space`; throws UnknownName if the
    // space has a variable this unit does not declare.
    std::vector<std::size_t> variables_of(const SpacePtr& space) const;

    // Evaluates a boolean expression on every state of `space`. Undefined
    // sub-expressions make the condition false.
    Condition condition_on(const ExprPtr& expr, const SpacePtr& space, std::string label = {}) const;
    Condition condition(std::string_view name, const SpacePtr& space) const;

    // x <- fn(x) on `space` as an endo-function.
    PartialFn function_endo(std::string_view name, const SpacePtr& space) const;

    // Evaluation; nullopt means undefined (division by zero, overflow).
    std::optional<Value> eval_int(const Expr& e, const Env& env) const;
    std::optional<bool> eval_bool(const Expr& e, const Env& env) const;

    // Fills `env` with the values of state `s` of `space`.
    void load_state(const SpacePtr& space, const std::vector<std::size_t>& vars, StateIndex s,
                    Env& env) const;

    std::string expr_to_string(const Expr& e) const;
    std::string stmt_to_string(const Stmt& s) const;

private:
    friend class Parser;

    std::vector<DomainDecl> domains_;
    std::vector<Variable> variables_;
    std::vector<CondDecl> conditions_;
    std::vector<FnDecl> functions_;
    std::vector<Program> programs_;
    mutable SpacePtr full_space_;
};

// Parses DSL source. Throws SourceError (SyntaxError, UnknownName, TypeError)
// with a 1-based line and column.
ProgramUnit parse(std::string_view source);
ProgramUnit parse_file(const std::string& path);

// Variables read anywhere inside an expression or a statement.
void collect_reads(const Expr& e, const ProgramUnit& unit, std::vector<bool>& out);
void collect_vars(const Stmt& s, const ProgramUnit& unit, std::vector<bool>& out);

} // namespace tpf
