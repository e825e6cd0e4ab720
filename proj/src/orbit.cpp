#include "tpf/orbit.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "tpf/error.hpp"

namespace tpf {

namespace {

void require_endo_on(const PartialFn& f, const Condition& c, std::string_view what) {
    if (!f.is_endo()) {
        throw Error(ErrorKind::SpaceMismatch, std::string(what) + ": function is not an endo-function");
    }
    require_same_space(f.domain_space(), c.space(), what);
}

ExtOrder successor(ExtOrder n) {
    return n.is_infinite() ? n : ExtOrder::finite(n.value() + 1);
}

} // namespace

std::string ExtOrder::to_string() const {
    if (is_infinite()) return "inf";
    return std::to_string(v_);
}

std::string_view to_string(StopReason r) {
    switch (r) {
    case StopReason::ConditionFailed: return "ConditionFailed";
    case StopReason::BottomReached: return "BottomReached";
    case StopReason::CycleDetected: return "CycleDetected";
    }
    return "Unknown";
}

OrbitReport orbit(const PartialFn& f, const Condition& c, LiftedState x) {
    require_endo_on(f, c, "orbit");
    OrbitReport report;
    report.start = x;
    std::unordered_set<StateIndex> seen;
    LiftedState y = x;
    std::int64_t satisfied = 0;
    while (true) {
        report.trace.push_back(y);
        if (y.is_bottom()) {
            report.stop_reason = StopReason::BottomReached;
            break;
        }
        if (!c.contains(y)) {
            report.stop_reason = StopReason::ConditionFailed;
            break;
        }
        if (!seen.insert(y.index()).second) {
            report.stop_reason = StopReason::CycleDetected;
            break;
        }
        ++satisfied;
        y = f(y);
    }
    report.order = report.stop_reason == StopReason::CycleDetected
                       ? ExtOrder::infinite()
                       : ExtOrder::finite(satisfied - 1);
    return report;
}

ExtOrder element_order(const PartialFn& f, const Condition& c, LiftedState x) {
    return orbit(f, c, x).order;
}

std::vector<ExtOrder> element_orders(const PartialFn& f, const Condition& c) {
    require_endo_on(f, c, "element_orders");
    const auto n = static_cast<std::size_t>(f.domain_space()->size());
    enum : unsigned char { White, Gray, Black };
    std::vector<unsigned char> colour(n, White);
    std::vector<ExtOrder> order(n, ExtOrder::neg_one());
    std::vector<StateIndex> path;

    for (std::size_t start = 0; start < n; ++start) {
        if (colour[start] != White) continue;
        if (!c.contains(start)) {
            colour[start] = Black;
            continue;
        }
        // Follow the in-condition chain until it leaves C, hits a known
        // state, or closes a cycle on the current path.
        path.clear();
        StateIndex x = start;
        ExtOrder tail;
        while (true) {
            colour[x] = Gray;
            path.push_back(x);
            auto y = f.at(x);
            if (!c.contains(y)) {
                tail = ExtOrder::neg_one();
                break;
            }
            auto yi = static_cast<std::size_t>(y.index());
            if (colour[yi] == Gray) {
                tail = ExtOrder::infinite();
                break;
            }
            if (colour[yi] == Black) {
                tail = order[yi];
                break;
            }
            x = yi;
        }
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            tail = successor(tail);
            order[*it] = tail;
            colour[*it] = Black;
        }
    }
    return order;
}

NfProfile profile_of(const std::vector<ExtOrder>& orders, const Condition& c) {
    NfProfile p{ExtOrder::neg_one(), ExtOrder::neg_one()};
    bool any = false;
    for (std::size_t x = 0; x < orders.size(); ++x) {
        p.limit = std::max(p.limit, orders[x]);
        if (c.contains(static_cast<StateIndex>(x))) {
            p.order = any ? std::min(p.order, orders[x]) : orders[x];
            any = true;
        }
    }
    return p;
}

ExtOrder preservation_order(const PartialFn& f, const Condition& c) {
    return nf_profile(f, c).order;
}

ExtOrder preservation_limit(const PartialFn& f, const Condition& c) {
    return nf_profile(f, c).limit;
}

NfProfile nf_profile(const PartialFn& f, const Condition& c) {
    return profile_of(element_orders(f, c), c);
}

std::vector<StateIndex> fixed_points(const PartialFn& f) {
    if (!f.is_endo()) throw Error(ErrorKind::SpaceMismatch, "fixed_points: function is not an endo-function");
    std::vector<StateIndex> out;
    for (StateIndex x = 0; x < f.domain_space()->size(); ++x) {
        if (f.at(x) == LiftedState::defined(x)) out.push_back(x);
    }
    return out;
}

std::vector<StateIndex> periodic_points(const PartialFn& f, std::uint64_t k, bool minimal) {
    if (!f.is_endo()) throw Error(ErrorKind::SpaceMismatch, "periodic_points: function is not an endo-function");
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "periodic_points: period must be at least 1");
    std::vector<StateIndex> out;
    for (StateIndex x = 0; x < f.domain_space()->size(); ++x) {
        const auto sx = LiftedState::defined(x);
        LiftedState y = sx;
        bool early_return = false;
        for (std::uint64_t step = 1; step <= k; ++step) {
            y = f(y);
            if (y.is_bottom()) break;
            if (step < k && y == sx) early_return = true;
        }
        if (y == sx && !(minimal && early_return)) out.push_back(x);
    }
    return out;
}

namespace {

// Reverse edges of f restricted to in-condition sources, skipping self-loops.
std::vector<std::vector<StateIndex>> in_condition_preds(const PartialFn& f, const Condition& c) {
    const auto n = static_cast<std::size_t>(f.domain_space()->size());
    std::vector<std::vector<StateIndex>> preds(n);
    for (std::size_t x = 0; x < n; ++x) {
        if (!c.contains(x)) continue;
        auto fx = f.at(x);
        if (fx.is_defined() && fx.index() != x) preds[fx.index()].push_back(x);
    }
    return preds;
}

std::vector<StateIndex> reverse_reach(const std::vector<std::vector<StateIndex>>& preds, StateIndex y) {
    std::vector<bool> seen(preds.size(), false);
    std::deque<StateIndex> queue{y};
    seen[y] = true;
    std::vector<StateIndex> out;
    while (!queue.empty()) {
        auto z = queue.front();
        queue.pop_front();
        out.push_back(z);
        for (auto p : preds[z]) {
            if (!seen[p]) {
                seen[p] = true;
                queue.push_back(p);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::vector<StateIndex> basin(const PartialFn& f, const Condition& c, StateIndex y) {
    require_endo_on(f, c, "basin");
    if (!c.contains(y) || f.at(y) != LiftedState::defined(y)) return {};
    return reverse_reach(in_condition_preds(f, c), y);
}

std::vector<StateIndex> attractors(const PartialFn& f, const Condition& c) {
    require_endo_on(f, c, "attractors");
    auto preds = in_condition_preds(f, c);
    std::vector<StateIndex> out;
    for (auto y : fixed_points(f)) {
        // A direct in-condition predecessor is enough to be reached.
        if (c.contains(y) && !preds[y].empty()) out.push_back(y);
    }
    return out;
}

} // namespace tpf
