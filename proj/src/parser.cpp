#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "tpf/error.hpp"
#include "tpf/syntax.hpp"

namespace tpf {

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;  // identifier, digits, or normalised symbol
    int line = 1;
    int col = 1;
    std::size_t begin = 0;
    std::size_t end = 0;
};

const std::set<std::string, std::less<>> kKeywords = {
    "domain", "var", "cond", "fn", "program", "over", "skip", "abort", "require", "if", "else",
    "while", "true", "false", "bottom", "and", "or", "not", "mod", "step", "desc", "asc",
};

bool is_decl_keyword(const Token& t) {
    return t.kind == Tok::Ident &&
           (t.text == "domain" || t.text == "var" || t.text == "cond" || t.text == "fn" || t.text == "program");
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.line = line_;
            t.col = col_;
            t.begin = pos_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                t.end = pos_;
                out.push_back(t);
                return out;
            }
            char ch = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || src_[pos_] == '\'')) {
                    advance(1);
                }
                t.kind = Tok::Ident;
                t.text = std::string(src_.substr(t.begin, pos_ - t.begin));
            } else if (std::isdigit(static_cast<unsigned char>(ch))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance(1);
                t.kind = Tok::Int;
                t.text = std::string(src_.substr(t.begin, pos_ - t.begin));
            } else {
                t.kind = Tok::Sym;
                t.text = symbol(t);
            }
            t.end = pos_;
            out.push_back(std::move(t));
        }
    }

private:
    void advance(std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            unsigned char c = static_cast<unsigned char>(src_[pos_]);
            ++pos_;
            if (c == '\n') {
                ++line_;
                col_ = 1;
            } else if ((c & 0xC0) != 0x80) {
                ++col_;
            }
        }
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
            } else {
                return;
            }
        }
    }

    std::string symbol(const Token& t) {
        static const std::pair<std::string_view, std::string_view> table[] = {
            {"\xE2\x86\x90", "<-"}, {"\xE2\x89\xA4", "<="}, {"\xE2\x89\xA5", ">="}, {"\xE2\x89\xA0", "!="},
            {"\xE2\x88\xA7", "and"}, {"\xE2\x88\xA8", "or"}, {"\xC2\xAC", "not"}, {"\xE2\x88\x92", "-"},
            {"..", ".."}, {"<-", "<-"}, {"<=", "<="}, {">=", ">="}, {"!=", "!="}, {"==", "=="},
            {"&&", "and"}, {"||", "or"},
            {"=", "="}, {"<", "<"}, {">", ">"}, {"!", "not"}, {"+", "+"}, {"-", "-"}, {"*", "*"},
            {"/", "/"}, {"%", "mod"}, {"^", "^"}, {"(", "("}, {")", ")"}, {"{", "{"}, {"}", "}"},
            {",", ","}, {";", ";"}, {":", ":"},
        };
        auto rest = src_.substr(pos_);
        for (const auto& [spelling, norm] : table) {
            if (rest.substr(0, spelling.size()) == spelling) {
                advance(spelling.size());
                return std::string(norm);
            }
        }
        throw SourceError(ErrorKind::SyntaxError, t.line, t.col,
                          "unexpected character '" + std::string(1, src_[pos_]) + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

} // namespace

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src), toks_(Lexer(src).run()) {}

    ProgramUnit run() {
        while (!at_end()) {
            const auto& t = peek();
            if (!is_decl_keyword(t)) fail(t, "expected a declaration (domain, var, cond, fn or program)");
            if (t.text == "domain") parse_domain();
            else if (t.text == "var") parse_var();
            else if (t.text == "cond") parse_cond();
            else if (t.text == "fn") parse_fn();
            else parse_program();
        }
        return std::move(unit_);
    }

private:
    using Op = Expr::Op;

    // -- token helpers ------------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    bool at_end() const { return peek().kind == Tok::End; }
    const Token& next() {
        const auto& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool is_sym(std::string_view s, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Sym && peek(ahead).text == s;
    }
    bool is_kw(std::string_view s, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Ident && peek(ahead).text == s;
    }
    bool accept_sym(std::string_view s) {
        if (!is_sym(s)) return false;
        next();
        return true;
    }
    bool accept_kw(std::string_view s) {
        if (!is_kw(s)) return false;
        next();
        return true;
    }
    const Token& expect_sym(std::string_view s) {
        if (!is_sym(s)) fail(peek(), "expected '" + std::string(s) + "'");
        return next();
    }
    void expect_kw(std::string_view s) {
        if (!is_kw(s)) fail(peek(), "expected '" + std::string(s) + "'");
        next();
    }
    const Token& expect_name() {
        const auto& t = peek();
        if (t.kind != Tok::Ident || kKeywords.count(t.text)) fail(t, "expected a name");
        return next();
    }

    [[noreturn]] static void fail(const Token& t, const std::string& msg, ErrorKind kind = ErrorKind::SyntaxError) {
        std::string where = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw SourceError(kind, t.line, t.col, msg + " at " + where);
    }

    Value parse_int_literal() {
        bool neg = accept_sym("-");
        const auto& t = peek();
        if (t.kind != Tok::Int) fail(t, "expected an integer");
        next();
        Value v{};
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{}) fail(t, "integer literal out of range");
        return neg ? -v : v;
    }

    void require_fresh(const Token& name) {
        const auto& n = name.text;
        if (unit_.variable_index(n) || unit_.find_condition(n) || unit_.find_function(n)) {
            fail(name, "name already declared");
        }
    }

    // -- declarations -------------------------------------------------------

    void parse_domain() {
        expect_kw("domain");
        const auto& name = expect_name();
        if (unit_.find_domain(name.text)) fail(name, "domain already declared");
        expect_sym("=");
        std::vector<Value> values;
        if (accept_sym("{")) {
            values.push_back(parse_int_literal());
            while (accept_sym(",")) values.push_back(parse_int_literal());
            expect_sym("}");
        } else {
            const auto& at = peek();
            Value lo = parse_int_literal();
            expect_sym("..");
            Value hi = parse_int_literal();
            Value step = 1;
            if (accept_kw("step")) {
                const auto& st = peek();
                step = parse_int_literal();
                if (step <= 0) fail(st, "step must be positive");
            }
            if (hi < lo) fail(at, "empty range", ErrorKind::TypeError);
            if ((hi - lo) / step > 10'000'000) fail(at, "range too large");
            for (Value v = lo; v <= hi; v += step) values.push_back(v);
        }
        DomainOrder order = DomainOrder::Ascending;
        if (accept_kw("desc")) order = DomainOrder::Descending;
        else accept_kw("asc");
        unit_.domains_.push_back({name.text, Domain(name.text, std::move(values), order)});
    }

    void parse_var() {
        expect_kw("var");
        std::vector<const Token*> names{&expect_name()};
        while (accept_sym(",")) names.push_back(&expect_name());
        expect_sym(":");
        const auto& dom = expect_name();
        const auto* d = unit_.find_domain(dom.text);
        if (!d) fail(dom, "unknown domain", ErrorKind::UnknownName);
        for (const auto* n : names) {
            require_fresh(*n);
            unit_.variables_.push_back({n->text, d->domain});
        }
        unit_.full_space_.reset();
    }

    void parse_cond() {
        expect_kw("cond");
        const auto& name = expect_name();
        require_fresh(name);
        expect_sym("=");
        const auto begin = peek().begin;
        const auto& at = peek();
        auto e = parse_expr();
        if (e->type() != ExprType::Bool) fail(at, "condition must be boolean", ErrorKind::TypeError);
        unit_.conditions_.push_back({name.text, e, text_since(begin)});
    }

    void parse_fn() {
        expect_kw("fn");
        const auto& name = expect_name();
        require_fresh(name);
        expect_sym("(");
        const auto& param = expect_name();
        auto var = unit_.variable_index(param.text);
        if (!var) fail(param, "function parameter must be a declared state variable", ErrorKind::UnknownName);
        expect_sym(")");
        expect_sym("=");
        const auto begin = peek().begin;
        const auto& at = peek();
        auto e = parse_expr();
        if (e->type() != ExprType::Int) fail(at, "function body must be an integer expression", ErrorKind::TypeError);
        unit_.functions_.push_back({name.text, *var, e, text_since(begin)});
    }

    void parse_program() {
        expect_kw("program");
        const auto& name = expect_name();
        if (unit_.find_program(name.text)) fail(name, "program already declared");
        ProgramUnit::Program p;
        p.name = name.text;
        p.line = name.line;
        if (accept_kw("over")) {
            do {
                const auto& v = expect_name();
                auto k = unit_.variable_index(v.text);
                if (!k) fail(v, "unknown state variable", ErrorKind::UnknownName);
                for (auto existing : p.variables) {
                    if (existing == *k) fail(v, "variable listed twice");
                }
                p.variables.push_back(*k);
            } while (accept_sym(","));
        } else {
            for (std::size_t k = 0; k < unit_.variables_.size(); ++k) p.variables.push_back(k);
        }
        if (p.variables.empty()) fail(name, "program has no state variables", ErrorKind::TypeError);
        expect_sym("=");
        p.body = parse_seq(false);

        std::vector<bool> used(unit_.variables_.size(), false);
        collect_vars(*p.body, unit_, used);
        std::vector<bool> allowed(unit_.variables_.size(), false);
        for (auto v : p.variables) allowed[v] = true;
        for (std::size_t k = 0; k < used.size(); ++k) {
            if (used[k] && !allowed[k]) {
                fail(name, "program uses variable '" + unit_.variables_[k].name + "' outside its state space",
                     ErrorKind::UnknownName);
            }
        }
        p.space = unit_.space_over(p.variables);
        unit_.programs_.push_back(std::move(p));
    }

    std::string text_since(std::size_t begin) const {
        auto end = toks_[pos_ == 0 ? 0 : pos_ - 1].end;
        return std::string(src_.substr(begin, end - begin));
    }

    // -- statements ---------------------------------------------------------

    bool starts_statement() const {
        const auto& t = peek();
        if (t.kind == Tok::Sym) return t.text == "{" || t.text == "(";
        if (t.kind != Tok::Ident) return false;
        if (t.text == "skip" || t.text == "abort" || t.text == "require" || t.text == "if" || t.text == "while") {
            return true;
        }
        return !kKeywords.count(t.text) && is_sym("<-", 1);
    }

    StmtPtr parse_seq(bool braced) {
        std::vector<StmtPtr> items;
        while (true) {
            if (braced && is_sym("}")) break;
            if (!starts_statement()) {
                if (!braced && items.empty()) fail(peek(), "expected a statement");
                if (braced) fail(peek(), "expected a statement or '}'");
                break;
            }
            items.push_back(parse_simple());
            while (accept_sym(";")) {
            }
        }
        if (items.size() == 1) return items.front();
        return Stmt::seq(std::move(items));
    }

    StmtPtr parse_block() {
        expect_sym("{");
        auto s = parse_seq(true);
        expect_sym("}");
        return s;
    }

    std::pair<ExprPtr, std::string> parse_condition() {
        const auto begin = peek().begin;
        const auto& at = peek();
        auto e = parse_expr();
        if (e->type() != ExprType::Bool) fail(at, "condition must be boolean", ErrorKind::TypeError);
        return {e, text_since(begin)};
    }

    BetaRhs parse_beta_rhs() {
        const auto& t = peek();
        if (accept_kw("bottom")) return {BetaRhs::Kind::Bottom, 0, 0};
        if (t.kind == Tok::Int || is_sym("-")) return {BetaRhs::Kind::Literal, parse_int_literal(), 0};
        if (t.kind == Tok::Ident && !kKeywords.count(t.text)) {
            auto k = unit_.variable_index(t.text);
            if (!k) fail(t, "unknown state variable", ErrorKind::UnknownName);
            next();
            return {BetaRhs::Kind::Variable, 0, *k};
        }
        fail(t, "assignment right-hand sides must be literals or variables");
    }

    StmtPtr parse_simple() {
        if (accept_kw("skip")) return Stmt::skip();
        if (accept_kw("abort")) return Stmt::abort();
        if (accept_kw("require")) {
            auto [c, text] = parse_condition();
            return Stmt::require(c, text);
        }
        if (accept_kw("if")) return parse_if_rest();
        if (accept_kw("while")) {
            auto [c, text] = parse_condition();
            auto body = parse_block();
            return Stmt::while_(c, text, body);
        }
        if (is_sym("{")) return parse_block();
        if (accept_sym("(")) {
            std::vector<std::size_t> targets;
            do {
                const auto& v = expect_name();
                auto k = unit_.variable_index(v.text);
                if (!k) fail(v, "unknown state variable", ErrorKind::UnknownName);
                targets.push_back(*k);
            } while (accept_sym(","));
            expect_sym(")");
            expect_sym("<-");
            std::vector<BetaRhs> rhs;
            expect_sym("(");
            do {
                rhs.push_back(parse_beta_rhs());
            } while (accept_sym(","));
            const auto& close = expect_sym(")");
            if (rhs.size() > targets.size()) {
                fail(close, "more right-hand sides than targets", ErrorKind::TypeError);
            }
            return Stmt::beta(std::move(targets), std::move(rhs));
        }
        // VAR <- rhs
        const auto& v = expect_name();
        auto k = unit_.variable_index(v.text);
        if (!k) fail(v, "unknown state variable", ErrorKind::UnknownName);
        expect_sym("<-");
        if (accept_kw("bottom")) return Stmt::beta({*k}, {{BetaRhs::Kind::Bottom, 0, 0}});
        const auto& at = peek();
        auto e = parse_expr();
        if (e->type() != ExprType::Int) fail(at, "assigned expression must be an integer", ErrorKind::TypeError);
        if (e->op == Op::Lit) return Stmt::beta({*k}, {{BetaRhs::Kind::Literal, e->literal, 0}});
        if (e->op == Op::Var) return Stmt::beta({*k}, {{BetaRhs::Kind::Variable, 0, e->variable}});
        return Stmt::apply(*k, e);
    }

    StmtPtr parse_if_rest() {
        auto [c, text] = parse_condition();
        auto then_branch = parse_block();
        StmtPtr else_branch = Stmt::skip();
        if (accept_kw("else")) {
            else_branch = accept_kw("if") ? parse_if_rest() : parse_block();
        }
        return Stmt::if_(c, text, then_branch, else_branch);
    }

    // -- expressions --------------------------------------------------------

    static ExprPtr make(Op op, std::vector<ExprPtr> args) {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->args = std::move(args);
        return e;
    }

    static void want(const ExprPtr& e, ExprType type, const Token& at) {
        if (e->type() != type) {
            fail(at, type == ExprType::Int ? "integer operand expected" : "boolean operand expected",
                 ErrorKind::TypeError);
        }
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        auto lhs = parse_and();
        while (is_kw("or") || is_sym("or")) {
            const auto& at = next();
            auto rhs = parse_and();
            want(lhs, ExprType::Bool, at);
            want(rhs, ExprType::Bool, at);
            lhs = make(Op::Or, {lhs, rhs});
        }
        return lhs;
    }

    ExprPtr parse_and() {
        auto lhs = parse_cmp();
        while (is_kw("and") || is_sym("and")) {
            const auto& at = next();
            auto rhs = parse_cmp();
            want(lhs, ExprType::Bool, at);
            want(rhs, ExprType::Bool, at);
            lhs = make(Op::And, {lhs, rhs});
        }
        return lhs;
    }

    std::optional<Op> comparison_op() const {
        if (peek().kind != Tok::Sym) return std::nullopt;
        const auto& s = peek().text;
        if (s == "<") return Op::Lt;
        if (s == "<=") return Op::Le;
        if (s == ">") return Op::Gt;
        if (s == ">=") return Op::Ge;
        if (s == "=" || s == "==") return Op::Eq;
        if (s == "!=") return Op::Ne;
        return std::nullopt;
    }

    ExprPtr parse_cmp() {
        auto lhs = parse_add();
        if (auto op = comparison_op()) {
            const auto& at = next();
            auto rhs = parse_add();
            want(lhs, ExprType::Int, at);
            want(rhs, ExprType::Int, at);
            if (comparison_op()) fail(peek(), "comparisons do not chain");
            return make(*op, {lhs, rhs});
        }
        return lhs;
    }

    ExprPtr parse_add() {
        auto lhs = parse_mul();
        while (is_sym("+") || is_sym("-")) {
            const auto& at = next();
            auto rhs = parse_mul();
            want(lhs, ExprType::Int, at);
            want(rhs, ExprType::Int, at);
            lhs = make(at.text == "+" ? Op::Add : Op::Sub, {lhs, rhs});
        }
        return lhs;
    }

    ExprPtr parse_mul() {
        auto lhs = parse_pow();
        while (is_sym("*") || is_sym("/") || is_sym("mod") || is_kw("mod")) {
            const auto& at = next();
            auto rhs = parse_pow();
            want(lhs, ExprType::Int, at);
            want(rhs, ExprType::Int, at);
            Op op = at.text == "*" ? Op::Mul : at.text == "/" ? Op::Div : Op::Mod;
            lhs = make(op, {lhs, rhs});
        }
        return lhs;
    }

    ExprPtr parse_pow() {
        auto base = parse_unary();
        if (is_sym("^")) {
            const auto& at = next();
            auto exp = parse_pow();
            want(base, ExprType::Int, at);
            want(exp, ExprType::Int, at);
            return make(Op::Pow, {base, exp});
        }
        return base;
    }

    ExprPtr parse_unary() {
        if (is_sym("-")) {
            const auto& at = next();
            auto operand = parse_unary();
            want(operand, ExprType::Int, at);
            if (operand->op == Op::Lit && operand->literal != std::numeric_limits<Value>::min()) {
                auto e = std::make_shared<Expr>(*operand);
                e->literal = -operand->literal;
                return e;
            }
            return make(Op::Neg, {operand});
        }
        if (is_sym("not") || is_kw("not")) {
            const auto& at = next();
            auto operand = parse_unary();
            want(operand, ExprType::Bool, at);
            return make(Op::Not, {operand});
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        const auto& t = peek();
        if (t.kind == Tok::Int) {
            auto e = std::make_shared<Expr>();
            e->op = Op::Lit;
            e->literal = parse_int_literal();
            return e;
        }
        if (accept_sym("(")) {
            auto e = parse_expr();
            expect_sym(")");
            return e;
        }
        if (is_kw("true") || is_kw("false")) {
            next();
            auto e = std::make_shared<Expr>();
            e->op = Op::BoolLit;
            e->literal = t.text == "true" ? 1 : 0;
            return e;
        }
        if (t.kind == Tok::Ident && !kKeywords.count(t.text)) {
            next();
            if (auto k = unit_.variable_index(t.text)) {
                auto e = std::make_shared<Expr>();
                e->op = Op::Var;
                e->variable = *k;
                return e;
            }
            if (const auto* c = unit_.find_condition(t.text)) return c->expr;
            for (std::size_t k = 0; k < unit_.functions_.size(); ++k) {
                if (unit_.functions_[k].name != t.text) continue;
                expect_sym("(");
                const auto& at = peek();
                auto arg = parse_expr();
                want(arg, ExprType::Int, at);
                expect_sym(")");
                auto e = std::make_shared<Expr>();
                e->op = Op::Call;
                e->function = k;
                e->args = {arg};
                return e;
            }
            fail(t, "unknown name", ErrorKind::UnknownName);
        }
        fail(t, "expected an expression");
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    ProgramUnit unit_;
};

ProgramUnit parse(std::string_view source) {
    try {
        return Parser(source).run();
    } catch (const SourceError&) {
        throw;
    } catch (const Error& e) {
        // Domain construction errors surface without a position.
        throw SourceError(e.kind() == ErrorKind::EmptyDomain ? ErrorKind::TypeError : e.kind(), 0, 0, e.what());
    }
}

ProgramUnit parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

} // namespace tpf
