#include "tpf/condlab.hpp"

#include <algorithm>

#include "tpf/error.hpp"

namespace tpf {

Delta Delta::between(ExtOrder a, ExtOrder b) {
    if (a.is_infinite() && b.is_infinite()) return {Kind::Indeterminate, 0};
    if (a.is_infinite()) return {Kind::PosInfinite, 0};
    if (b.is_infinite()) return {Kind::NegInfinite, 0};
    return {Kind::Finite, a.value() - b.value()};
}

Delta Delta::operator-(const Delta& rhs) const {
    if (kind == Kind::Indeterminate || rhs.kind == Kind::Indeterminate) return {Kind::Indeterminate, 0};
    if (kind == Kind::Finite && rhs.kind == Kind::Finite) return {Kind::Finite, value - rhs.value};
    if (kind == rhs.kind) return {Kind::Indeterminate, 0};
    if (kind == Kind::PosInfinite || rhs.kind == Kind::NegInfinite) return {Kind::PosInfinite, 0};
    return {Kind::NegInfinite, 0};
}

std::string Delta::to_string() const {
    switch (kind) {
    case Kind::Finite: return std::to_string(value);
    case Kind::PosInfinite: return "inf";
    case Kind::NegInfinite: return "-inf";
    case Kind::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

RelaxationReport relaxation(const PartialFn& f, const Condition& c, const Condition& c_strong) {
    if (!entails(c_strong, c)) {
        throw Error(ErrorKind::NotStronger, "the second condition does not entail the first");
    }
    RelaxationReport r;
    r.original = nf_profile(f, c);
    r.strengthened = nf_profile(f, c_strong);
    r.order_relaxation = Delta::between(r.original.order, r.strengthened.order);
    r.limit_relaxation = Delta::between(r.original.limit, r.strengthened.limit);
    r.sigma = r.limit_relaxation - r.order_relaxation;
    r.window_collapsed = r.strengthened.limit < r.original.order;
    return r;
}

bool check_strengthening(const PartialFn& f, const Condition& c, const Condition& c_strong) {
    auto r = relaxation(f, c, c_strong);
    return r.strengthened.order <= r.original.order && r.strengthened.limit <= r.original.limit;
}

bool check_weakening(const PartialFn& f, const Condition& c, const Condition& c_weak) {
    if (!entails(c, c_weak)) {
        throw Error(ErrorKind::NotWeaker, "the first condition does not entail the second");
    }
    auto before = nf_profile(f, c);
    auto after = nf_profile(f, c_weak);
    return before.order <= after.order && before.limit <= after.limit;
}

bool nested_bound_check(const PartialFn& f, const Condition& cA, const Condition& cB) {
    auto inner = nf_profile(f, cond_and(cA, cB));
    auto outer = nf_profile(f, cB);
    return inner.order <= outer.order && inner.limit <= outer.limit;
}

std::string_view to_string(RemapCase c) {
    switch (c) {
    case RemapCase::Equal: return "Equal";
    case RemapCase::StrictlyWeaker: return "StrictlyWeaker";
    case RemapCase::StrictlyStronger: return "StrictlyStronger";
    case RemapCase::Incomparable: return "Incomparable";
    case RemapCase::LargerSet: return "LargerSet";
    case RemapCase::SmallerSurjective: return "SmallerSurjective";
    case RemapCase::SmallerNonSurjective: return "SmallerNonSurjective";
    }
    return "Unknown";
}

namespace {

RemapCase compare_conditions(const Condition& given, const Condition& image) {
    if (given == image) return RemapCase::Equal;
    if (entails(image, given)) return RemapCase::StrictlyWeaker;
    if (entails(given, image)) return RemapCase::StrictlyStronger;
    return RemapCase::Incomparable;
}

bool check_relation(RemapCase rel, const NfProfile& before, const NfProfile& after, std::string& text) {
    switch (rel) {
    case RemapCase::Equal:
        text = "new profile equals old profile";
        return after == before;
    case RemapCase::StrictlyWeaker:
        text = "new order >= old order and new limit >= old limit";
        return after.order >= before.order && after.limit >= before.limit;
    case RemapCase::StrictlyStronger:
        text = "new order <= old order and new limit <= old limit";
        return after.order <= before.order && after.limit <= before.limit;
    default:
        text = "no relation is implied";
        return true;
    }
}

} // namespace

RemapReport remap(const PartialFn& f, const Condition& cA, const PartialFn& phi, const Condition& cB,
                  const std::optional<PartialFn>& extension) {
    if (!f.is_endo()) throw Error(ErrorKind::SpaceMismatch, "remap: function is not an endo-function");
    require_same_space(f.domain_space(), cA.space(), "remap");
    require_same_space(phi.domain_space(), f.domain_space(), "remap");
    require_same_space(phi.codomain_space(), cB.space(), "remap");

    const auto& A = f.domain_space();
    const auto& B = cB.space();
    for (StateIndex x = 0; x < A->size(); ++x) {
        if (phi.at(x).is_bottom()) {
            throw Error(ErrorKind::NonTotalPhi, "remap: phi is undefined at " + A->format(LiftedState::defined(x)));
        }
    }

    Condition::Bits image_bits(static_cast<std::size_t>(B->size()));
    for (auto x : restrict(A, cA)) image_bits.set(phi.at(x).index());
    Condition image_cond(B, std::move(image_bits), "phi(cA)");

    const auto old_profile = nf_profile(f, cA);
    const auto rel = compare_conditions(cB, image_cond);
    const bool injective = is_injective(phi);
    std::string text;

    if (extension) {
        const auto& g = *extension;
        if (!injective) throw Error(ErrorKind::InvalidArgument, "remap: a larger set needs an injective phi");
        if (!g.is_endo()) throw Error(ErrorKind::SpaceMismatch, "remap: extension is not an endo-function");
        require_same_space(g.domain_space(), B, "remap");
        Condition::Bits embedded(static_cast<std::size_t>(B->size()));
        for (StateIndex x = 0; x < A->size(); ++x) {
            auto y = phi.at(x);
            embedded.set(y.index());
            if (g(y) != phi(f.at(x))) {
                throw Error(ErrorKind::InvalidArgument,
                            "remap: extension disagrees with f at " + A->format(LiftedState::defined(x)));
            }
            if (cB.contains(y) != cA.contains(x)) {
                throw Error(ErrorKind::InvalidArgument,
                            "remap: the new condition must agree with the old one on phi(A)");
            }
        }
        const auto orders = element_orders(g, cB);
        const auto new_profile = profile_of(orders, cB);
        // The old restriction is empty exactly when its order is -1; it
        // then contributes nothing to the minimum.
        NfProfile expected = old_profile;
        bool have_order = !cA.empty();
        for (StateIndex y = 0; y < B->size(); ++y) {
            if (embedded.test(y) || !cB.contains(y)) continue;
            expected.order = have_order ? std::min(expected.order, orders[y]) : orders[y];
            expected.limit = std::max(expected.limit, orders[y]);
            have_order = true;
        }
        return RemapReport{RemapCase::LargerSet, rel, image_cond, old_profile, new_profile,
                           new_profile == expected,
                           "order = min(old order, orders outside phi(A)), limit = max(old limit, orders outside phi(A))"};
    }

    auto pulled = Condition::from_predicate(
        A, [&](StateIndex x) { return cB.contains(phi.at(x)); }, "phi*(cB)");
    const auto new_profile = nf_profile(f, pulled);
    RemapCase tag = rel;
    if (!injective) {
        tag = image(phi).size() == B->size() ? RemapCase::SmallerSurjective : RemapCase::SmallerNonSurjective;
    }
    bool ok = check_relation(rel, old_profile, new_profile, text);
    return RemapReport{tag, rel, image_cond, old_profile, new_profile, ok, text};
}

std::vector<ExtOrder> phase_orders(const PartialFn& f1, const PartialFn& f2, const Condition& c,
                                   const Condition& cA) {
    const auto c1 = cond_and(c, cA);
    const auto c2 = cond_and(cond_not(c), cA);
    const auto o1 = element_orders(f1, c1);
    const auto o2 = element_orders(f2, c2);
    const auto n = static_cast<std::size_t>(cA.space()->size());

    // Phase exit: the first state after a maximal run inside one phase.
    auto exit_of = [&](StateIndex x) -> std::pair<ExtOrder, LiftedState> {
        const bool first = c1.contains(x);
        const auto& fn = first ? f1 : f2;
        const auto k = first ? o1[x] : o2[x];
        if (k.is_infinite()) return {k, kBottom};
        LiftedState y = LiftedState::defined(x);
        for (std::int64_t step = 0; step <= k.value(); ++step) y = fn(y);
        return {k, y};
    };

    enum : unsigned char { White, Gray, Black };
    std::vector<unsigned char> colour(n, White);
    std::vector<ExtOrder> order(n, ExtOrder::neg_one());
    struct Frame {
        StateIndex x;
        ExtOrder k;
    };
    std::vector<Frame> path;
    for (StateIndex start = 0; start < n; ++start) {
        if (colour[start] != White) continue;
        if (!cA.contains(start)) {
            colour[start] = Black;
            continue;
        }
        path.clear();
        StateIndex x = start;
        ExtOrder tail;
        bool tail_set = false;
        while (true) {
            colour[x] = Gray;
            auto [k, y] = exit_of(x);
            path.push_back({x, k});
            if (k.is_infinite()) {
                tail = k;
                tail_set = true;
                break;
            }
            if (!cA.contains(y)) break;
            const auto yi = y.index();
            if (colour[yi] == Gray) {
                tail = ExtOrder::infinite();
                tail_set = true;
                break;
            }
            if (colour[yi] == Black) {
                tail = order[yi];
                tail_set = true;
                break;
            }
            x = yi;
        }
        // Unwind: the last frame either exits cA (n = k) or continues into
        // `tail` (n = k + 1 + tail).
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            ExtOrder value;
            if (it->k.is_infinite()) {
                value = it->k;
            } else if (!tail_set) {
                value = it->k;
            } else if (tail.is_infinite()) {
                value = tail;
            } else {
                value = ExtOrder::finite(it->k.value() + 1 + tail.value());
            }
            order[it->x] = value;
            colour[it->x] = Black;
            tail = value;
            tail_set = true;
        }
    }
    return order;
}

ConditionalBounds conditional_bounds(const PartialFn& f1, const PartialFn& f2, const Condition& c,
                                     const Condition& cA) {
    require_same_space(f1.domain_space(), f2.domain_space(), "conditional_bounds");
    require_same_space(f1.domain_space(), c.space(), "conditional_bounds");
    require_same_space(c.space(), cA.space(), "conditional_bounds");
    if (!f1.is_endo() || !f2.is_endo()) {
        throw Error(ErrorKind::SpaceMismatch, "conditional_bounds: operands must be endo-functions");
    }
    const auto f = bullet_merge(compose(f1, cond_identity(c)), compose(f2, cond_identity(cond_not(c))));

    ConditionalBounds b;
    const auto p1 = nf_profile(f1, cond_and(c, cA));
    const auto p2 = nf_profile(f2, cond_and(cond_not(c), cA));
    b.m1 = p1.order;
    b.l1 = p1.limit;
    b.m2 = p2.order;
    b.l2 = p2.limit;
    b.order_bound = std::min(b.m1, b.m2);
    b.limit_bound = std::min(b.l1, b.l2);
    const auto direct = element_orders(f, cA);
    b.exact = profile_of(direct, cA);
    b.order_bound_holds = b.exact.order >= b.order_bound;
    b.limit_bound_holds = b.exact.limit >= b.limit_bound;
    b.phase_consistent = phase_orders(f1, f2, c, cA) == direct;
    return b;
}

} // namespace tpf
