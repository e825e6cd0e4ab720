#include "tpf/arrows.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "tpf/calculus.hpp"
#include "tpf/error.hpp"

namespace tpf {

std::string_view to_string(EndpointKind k) {
    return k == EndpointKind::Loop ? "Loop" : "Once";
}

std::string_view to_string(Clause c) {
    switch (c) {
    case Clause::None: return "none";
    case Clause::KindMismatch: return "kind";
    case Clause::Injectivity: return "a";
    case Clause::Monotonicity: return "b";
    case Clause::ConditionMap: return "c";
    case Clause::OrderInvariance: return "d";
    case Clause::Range: return "range";
    }
    return "unknown";
}

std::string_view to_string(ArrowKind k) {
    switch (k) {
    case ArrowKind::Type0: return "Type0";
    case ArrowKind::Type1: return "Type1";
    case ArrowKind::Type2Asserted: return "Type2Asserted";
    }
    return "Unknown";
}

EndpointPtr loop_endpoint(const PartialFn& body, const Condition& cond, std::string label) {
    return std::make_shared<const Endpoint>(
        Endpoint{std::move(label), body.domain_space(), cond, element_orders(body, cond), EndpointKind::Loop});
}

EndpointPtr once_endpoint(const PartialFn& f, std::string label) {
    auto dom = defined_domain(f);
    std::vector<ExtOrder> orders(static_cast<std::size_t>(f.domain_space()->size()), ExtOrder::neg_one());
    for (auto x : restrict(f.domain_space(), dom)) orders[x] = ExtOrder::finite(0);
    return std::make_shared<const Endpoint>(
        Endpoint{std::move(label), f.domain_space(), dom, std::move(orders), EndpointKind::Once});
}

EndpointPtr resolve_endpoint(const ProgramUnit& unit, std::string_view program,
                             const std::optional<Condition>& cond) {
    const auto& p = unit.program(program);
    const auto* loop = as_loop(*p.body);
    if (cond) {
        require_same_space(cond->space(), p.space, "resolve_endpoint");
        auto f = loop ? denote_stmt(unit, *loop->children[0], p.space) : denote(unit, program);
        return loop_endpoint(f, *cond, p.name);
    }
    if (loop) {
        auto body = denote_stmt(unit, *loop->children[0], p.space);
        return loop_endpoint(body, unit.condition_on(loop->cond, p.space, loop->cond_text), p.name);
    }
    return once_endpoint(denote(unit, program), p.name);
}

namespace {

SpacePtr probe_space() {
    static const SpacePtr space = make_space({{"s", Domain("S", {0})}});
    return space;
}

} // namespace

EndpointPtr infinite_loop_probe() {
    static const EndpointPtr probe = loop_endpoint(identity_fn(probe_space()), Condition::always(probe_space()),
                                                   "while true { skip }");
    return probe;
}

EndpointPtr undefined_probe() {
    static const EndpointPtr probe = once_endpoint(undefined_fn(probe_space()), "abort");
    return probe;
}

Certificate verify_arrow0(const Endpoint& src, const Endpoint& dst, const PartialFn& T,
                          const std::optional<Condition>& support) {
    require_same_space(T.domain_space(), src.space, "verify_arrow0 (transform domain)");
    require_same_space(T.codomain_space(), dst.space, "verify_arrow0 (transform codomain)");
    if (support) require_same_space(support->space(), src.space, "verify_arrow0 (support)");

    Certificate cert;
    auto fail = [&](Clause clause, std::optional<StateIndex> w, std::optional<StateIndex> w2, std::string detail) {
        cert.holds = false;
        cert.failed = clause;
        cert.witness = w;
        cert.other_witness = w2;
        cert.detail = std::move(detail);
        return cert;
    };
    if (src.kind != dst.kind) {
        return fail(Clause::KindMismatch, std::nullopt, std::nullopt,
                    "endpoint kinds differ: " + std::string(to_string(src.kind)) + " vs " +
                        std::string(to_string(dst.kind)));
    }

    std::vector<StateIndex> states;
    if (support) {
        states = restrict(src.space, *support);
    } else {
        states.resize(static_cast<std::size_t>(src.space->size()));
        std::iota(states.begin(), states.end(), StateIndex{0});
    }
    for (auto x : states) {
        if (T.at(x).is_bottom()) {
            throw Error(ErrorKind::PartialT,
                        "transform is undefined at " + src.space->format(LiftedState::defined(x)));
        }
    }

    auto fmt_src = [&](StateIndex x) { return src.space->format(LiftedState::defined(x)); };

    // (a) injectivity
    std::vector<StateIndex> owner(static_cast<std::size_t>(dst.space->size()), StateIndex(-1));
    for (auto x : states) {
        auto y = T.at(x).index();
        if (owner[y] != StateIndex(-1)) {
            return fail(Clause::Injectivity, owner[y], x,
                        fmt_src(owner[y]) + " and " + fmt_src(x) + " share an image");
        }
        owner[y] = x;
    }
    // (b) strict monotonicity in the declared orders
    for (std::size_t k = 1; k < states.size(); ++k) {
        if (T.at(states[k - 1]).index() >= T.at(states[k]).index()) {
            return fail(Clause::Monotonicity, states[k - 1], states[k],
                        "order not preserved between " + fmt_src(states[k - 1]) + " and " + fmt_src(states[k]));
        }
    }
    // (c) the source condition maps into the target condition
    for (auto x : states) {
        if (src.cond.contains(x) && !dst.cond.contains(T.at(x))) {
            return fail(Clause::ConditionMap, x, std::nullopt,
                        fmt_src(x) + " satisfies the source condition but its image " +
                            dst.space->format(T.at(x)) + " does not satisfy the target condition");
        }
    }
    // (d) order invariance
    for (auto x : states) {
        const auto a = src.orders[x];
        const auto b = dst.orders[T.at(x).index()];
        if (a != b) {
            return fail(Clause::OrderInvariance, x, std::nullopt,
                        "order of " + fmt_src(x) + " is " + a.to_string() + " but its image has order " +
                            b.to_string());
        }
    }
    cert.holds = true;
    return cert;
}

std::optional<PartialFn> search_transform(const Endpoint& src, const Endpoint& dst,
                                          const std::optional<Condition>& allowed, const SearchLimits& limits) {
    if (src.space->size() > limits.max_source || dst.space->size() > limits.max_target) {
        throw Error(ErrorKind::SearchBudgetExceeded, "state space exceeds the search limits");
    }
    if (src.kind != dst.kind) return std::nullopt;
    if (allowed) require_same_space(allowed->space(), dst.space, "search_transform");
    const auto n = src.space->size();
    const auto m = dst.space->size();
    if (n > m) return std::nullopt;
    std::vector<LiftedState> table(static_cast<std::size_t>(n));
    StateIndex y = 0;
    for (StateIndex x = 0; x < n; ++x) {
        const bool in_c = src.cond.contains(x);
        while (y < m && (dst.orders[y] != src.orders[x] || (in_c && !dst.cond.contains(y)) ||
                         (allowed && !allowed->contains(y)))) {
            ++y;
        }
        if (y == m) return std::nullopt;
        table[x] = LiftedState::defined(y);
        ++y;
    }
    return PartialFn(src.space, dst.space, std::move(table));
}

Arrow make_arrow0(const EndpointPtr& from, const EndpointPtr& to, const PartialFn& T,
                  const std::optional<Condition>& support) {
    Arrow a;
    a.kind = ArrowKind::Type0;
    a.source = from->label;
    a.target = to->label;
    a.from = from;
    a.to = to;
    a.transform = T;
    a.support = support;
    a.certificate = verify_arrow0(*from, *to, T, support);
    return a;
}

std::optional<Arrow> search_arrow0(const Endpoint& src, const Endpoint& dst, const SearchLimits& limits) {
    auto T = search_transform(src, dst, std::nullopt, limits);
    if (!T) return std::nullopt;
    auto a = make_arrow0(std::make_shared<const Endpoint>(src), std::make_shared<const Endpoint>(dst), *T);
    if (!a.certificate.holds) return std::nullopt;
    return a;
}

std::optional<Arrow> search_arrow0(const ProgramUnit& unit, std::string_view p_i, std::string_view p_j,
                                   const SearchLimits& limits) {
    auto src = resolve_endpoint(unit, p_i);
    auto dst = resolve_endpoint(unit, p_j);
    auto T = search_transform(*src, *dst, std::nullopt, limits);
    if (!T) return std::nullopt;
    auto a = make_arrow0(src, dst, *T);
    if (!a.certificate.holds) return std::nullopt;
    return a;
}

std::vector<StmtPtr> top_level_items(const Stmt& body) {
    if (body.kind == Stmt::Kind::Seq) return body.children;
    return {std::make_shared<const Stmt>(body)};
}

namespace {

struct Segment {
    EndpointPtr endpoint;
    Condition range;
};

std::optional<Segment> segment_for(const ProgramUnit& unit, const ProgramUnit::Program& p,
                                   const std::vector<StmtPtr>& items, const Split& split) {
    std::vector<StmtPtr> middle(items.begin() + static_cast<std::ptrdiff_t>(split.k_begin),
                                items.begin() + static_cast<std::ptrdiff_t>(split.k_end));
    const std::string label = p.name + "[" + std::to_string(split.k_begin) + ":" + std::to_string(split.k_end) + "]";
    EndpointPtr endpoint;
    if (split.view == EndpointKind::Loop) {
        if (middle.size() != 1) return std::nullopt;
        const auto* loop = as_loop(*middle.front());
        if (!loop) return std::nullopt;
        auto body = denote_stmt(unit, *loop->children[0], p.space);
        endpoint = loop_endpoint(body, unit.condition_on(loop->cond, p.space, loop->cond_text), label);
    } else {
        endpoint = once_endpoint(denote_stmt(unit, *Stmt::seq(middle), p.space), label);
    }
    Condition range = Condition::always(p.space);
    if (split.k_begin > 0) {
        std::vector<StmtPtr> prefix(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(split.k_begin));
        auto pre = denote_stmt(unit, *Stmt::seq(prefix), p.space);
        auto im = image(pre);
        range = Condition::from_states(p.space, im, "Im(P_l)");
    }
    return Segment{endpoint, range};
}

} // namespace

Certificate verify_arrow1(const Endpoint& src, const ProgramUnit& target_unit, std::string_view p_j,
                          const Split& split, const PartialFn& T) {
    const auto& p = target_unit.program(p_j);
    auto items = top_level_items(*p.body);
    if (split.k_begin >= split.k_end || split.k_end > items.size()) {
        throw Error(ErrorKind::InvalidArgument, "split does not fit the target sequence");
    }
    auto seg = segment_for(target_unit, p, items, split);
    if (!seg) {
        Certificate c;
        c.failed = Clause::KindMismatch;
        c.detail = "segment cannot be viewed as a loop";
        return c;
    }
    auto cert = verify_arrow0(src, *seg->endpoint, T);
    if (!cert.holds) return cert;
    for (StateIndex x = 0; x < src.space->size(); ++x) {
        if (!seg->range.contains(T.at(x))) {
            cert.holds = false;
            cert.failed = Clause::Range;
            cert.witness = x;
            cert.detail = "image of " + src.space->format(LiftedState::defined(x)) +
                          " is not produced by the prefix of the target";
            return cert;
        }
    }
    return cert;
}

std::optional<Arrow> search_arrow1(const EndpointPtr& src, const ProgramUnit& target_unit, std::string_view p_j,
                                   const SearchLimits& limits) {
    const auto& p = target_unit.program(p_j);
    if (src->space->size() > limits.max_source || p.space->size() > limits.max_target) {
        throw Error(ErrorKind::SearchBudgetExceeded, "state space exceeds the search limits");
    }
    auto items = top_level_items(*p.body);
    const auto n = items.size();
    for (std::size_t begin = 0; begin < n; ++begin) {
        for (std::size_t end = n; end > begin; --end) {
            Split split{begin, end, n, src->kind};
            auto seg = segment_for(target_unit, p, items, split);
            if (!seg) continue;
            auto T = search_transform(*src, *seg->endpoint, seg->range, limits);
            if (!T) continue;
            Arrow a;
            a.kind = ArrowKind::Type1;
            a.source = src->label;
            a.target = p.name;
            a.from = src;
            a.to = seg->endpoint;
            a.transform = *T;
            a.split = split;
            a.range = seg->range;
            a.certificate = verify_arrow1(*src, target_unit, p_j, split, *T);
            if (a.certificate.holds) return a;
        }
    }
    return std::nullopt;
}

std::optional<Arrow> search_arrow1(const ProgramUnit& unit, std::string_view p_i, std::string_view p_j,
                                   const SearchLimits& limits) {
    return search_arrow1(resolve_endpoint(unit, p_i), unit, p_j, limits);
}

namespace {

[[noreturn]] void not_composable(const std::string& why) {
    throw Error(ErrorKind::NotComposable, why);
}

} // namespace

Arrow compose_arrow0(const Arrow& a1, const Arrow& a2, const ProgramUnit* target_unit) {
    if (a1.kind == ArrowKind::Type2Asserted || a2.kind == ArrowKind::Type2Asserted) {
        not_composable("asserted arrows carry no transform");
    }
    if (!a1.transform || !a2.transform) not_composable("arrow without a transform");
    if (!same_space(a1.transform->codomain_space(), a2.transform->domain_space())) {
        not_composable("transforms do not meet in a common space");
    }
    const auto T = compose(*a2.transform, *a1.transform);

    if (a1.kind == ArrowKind::Type0) {
        if (!(*a1.to == *a2.from)) not_composable("target of the first arrow is not the source of the second");
        if (a2.support) {
            for (auto x : restrict(a1.from->space, a1.support.value_or(Condition::always(a1.from->space)))) {
                if (!a2.support->contains(a1.transform->at(x))) {
                    not_composable("first arrow leaves the support of the second");
                }
            }
        }
        Arrow out;
        out.kind = a2.kind;
        out.source = a1.source;
        out.target = a2.target;
        out.from = a1.from;
        out.to = a2.to;
        out.transform = T;
        out.support = a1.support;
        out.split = a2.split;
        out.range = a2.range;
        out.certificate = verify_arrow0(*out.from, *out.to, T, out.support);
        if (out.certificate.holds && out.range) {
            for (auto x : restrict(out.from->space, out.support.value_or(Condition::always(out.from->space)))) {
                if (!out.range->contains(T.at(x))) {
                    out.certificate.holds = false;
                    out.certificate.failed = Clause::Range;
                    out.certificate.witness = x;
                    break;
                }
            }
        }
        if (!out.certificate.holds) not_composable("composite fails verification: " + out.certificate.detail);
        return out;
    }

    // a1 is a sub-structure arrow: its image lands in a segment of a2's
    // source, so the composite is checked directly against a2's target.
    Arrow out;
    out.source = a1.source;
    out.target = a2.target;
    out.from = a1.from;
    out.transform = T;
    out.kind = ArrowKind::Type0;
    out.to = a2.to;
    if (a2.kind == ArrowKind::Type0) {
        out.certificate = verify_arrow0(*out.from, *out.to, T);
        if (out.certificate.holds) return out;
    }
    if (target_unit) {
        if (const auto* p = target_unit->find_program(a2.target)) {
            auto items = top_level_items(*p->body);
            for (std::size_t begin = 0; begin < items.size(); ++begin) {
                for (std::size_t end = items.size(); end > begin; --end) {
                    Split split{begin, end, items.size(), out.from->kind};
                    auto seg = segment_for(*target_unit, *p, items, split);
                    if (!seg || !same_space(seg->endpoint->space, T.codomain_space())) continue;
                    auto cert = verify_arrow1(*out.from, *target_unit, a2.target, split, T);
                    if (cert.holds) {
                        out.kind = ArrowKind::Type1;
                        out.to = seg->endpoint;
                        out.split = split;
                        out.range = seg->range;
                        out.certificate = cert;
                        return out;
                    }
                }
            }
        }
    }
    not_composable("no segment of '" + a2.target + "' verifies the composite transform");
}

std::optional<Arrow> invert_arrow0(const Arrow& a) {
    if (a.kind != ArrowKind::Type0 || !a.transform) {
        throw Error(ErrorKind::NotInvertible, "only type-0 arrows can be inverted");
    }
    const auto& T = *a.transform;
    const auto& src = a.from->space;
    const auto& dst = a.to->space;
    std::vector<LiftedState> table(static_cast<std::size_t>(dst->size()), kBottom);
    auto support = a.support.value_or(Condition::always(src));
    std::vector<StateIndex> covered;
    for (auto x : restrict(src, support)) {
        auto y = T.at(x);
        if (y.is_bottom()) throw Error(ErrorKind::NotInvertible, "transform is not total on its support");
        if (table[y.index()].is_defined()) throw Error(ErrorKind::NotInvertible, "transform is not injective");
        table[y.index()] = LiftedState::defined(x);
        covered.push_back(y.index());
    }
    std::optional<Condition> inv_support;
    if (covered.size() != dst->size()) inv_support = Condition::from_states(dst, covered, "Im(T)");
    Arrow out;
    out.kind = ArrowKind::Type0;
    out.source = a.target;
    out.target = a.source;
    out.from = a.to;
    out.to = a.from;
    out.transform = PartialFn(dst, src, std::move(table));
    out.support = inv_support;
    out.certificate = verify_arrow0(*out.from, *out.to, *out.transform, out.support);
    if (!out.certificate.holds) return std::nullopt;
    return out;
}

Arrow assert_arrow2(std::string p_i, std::string p_j, std::string witness) {
    Arrow a;
    a.kind = ArrowKind::Type2Asserted;
    a.source = std::move(p_i);
    a.target = std::move(p_j);
    a.witness = std::move(witness);
    a.certificate.holds = false;
    a.certificate.detail = "asserted, not verified";
    return a;
}

std::size_t IsoGraph::component_of(std::size_t node) const {
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& m = components[k].members;
        if (std::find(m.begin(), m.end(), node) != m.end()) return k;
    }
    throw Error(ErrorKind::InvalidArgument, "node is not in the graph");
}

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace

IsoGraph build_iso_graph(const std::vector<ProgramRef>& programs, const GraphOptions& options) {
    IsoGraph g;
    std::set<std::string> names;
    for (const auto& p : programs) {
        if (!names.insert(p.name).second) {
            throw Error(ErrorKind::InvalidArgument, "program name '" + p.name + "' appears more than once");
        }
        p.unit->program(p.name);
        g.nodes.push_back(p.name);
    }
    const auto n = programs.size();
    std::vector<EndpointPtr> endpoints;
    for (const auto& p : programs) endpoints.push_back(resolve_endpoint(*p.unit, p.name));

    // One search attempt; false once the budget is spent.
    auto attempt = [&](auto&& search) -> std::optional<Arrow> {
        if (g.truncated) return std::nullopt;
        if (g.searches >= options.budget) {
            g.truncated = true;
            return std::nullopt;
        }
        ++g.searches;
        try {
            return search();
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SearchBudgetExceeded) throw;
            g.truncated = true;
            return std::nullopt;
        }
    };

    for (std::size_t a = 0; a < n && !g.truncated; ++a) {
        for (std::size_t b = a + 1; b < n && !g.truncated; ++b) {
            const std::pair<std::size_t, std::size_t> directions[] = {{a, b}, {b, a}};
            std::optional<IsoGraph::Edge> edge;
            for (const auto& [s, t] : directions) {
                if (edge) break;
                auto found = attempt([&] {
                    auto T = search_transform(*endpoints[s], *endpoints[t], std::nullopt, options.limits);
                    if (!T) return std::optional<Arrow>{};
                    auto arrow = make_arrow0(endpoints[s], endpoints[t], *T);
                    return arrow.certificate.holds ? std::optional<Arrow>{arrow} : std::nullopt;
                });
                if (found) edge = IsoGraph::Edge{s, t, *found};
            }
            for (const auto& [s, t] : directions) {
                if (edge) break;
                auto found = attempt([&] {
                    return search_arrow1(endpoints[s], *programs[t].unit, programs[t].name, options.limits);
                });
                if (found) edge = IsoGraph::Edge{s, t, *found};
            }
            if (edge) g.edges.push_back(std::move(*edge));
        }
    }

    g.infinite_loop.assign(n, false);
    g.undefined.assign(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        try {
            g.infinite_loop[k] =
                search_arrow1(infinite_loop_probe(), *programs[k].unit, programs[k].name, options.limits).has_value();
            g.undefined[k] =
                search_arrow1(undefined_probe(), *programs[k].unit, programs[k].name, options.limits).has_value();
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SearchBudgetExceeded) throw;
            g.truncated = true;
        }
    }

    DisjointSets sets(n);
    for (const auto& e : g.edges) sets.unite(e.from, e.to);
    std::vector<std::size_t> slot(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        auto root = sets.find(k);
        if (slot[root] == n) {
            slot[root] = g.components.size();
            g.components.emplace_back();
        }
        auto& comp = g.components[slot[root]];
        comp.members.push_back(k);
        comp.contains_infinite_loop = comp.contains_infinite_loop || g.infinite_loop[k];
        comp.contains_undefined = comp.contains_undefined || g.undefined[k];
    }
    return g;
}

} // namespace tpf
