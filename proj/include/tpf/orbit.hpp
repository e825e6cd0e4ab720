#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tpf/partial_fn.hpp"
#include "tpf/state.hpp"

namespace tpf {

// -1, a natural number, or infinity, totally ordered as -1 < 0 < 1 < ... < inf.
class ExtOrder {
public:
    constexpr ExtOrder() noexcept = default;

    static constexpr ExtOrder neg_one() noexcept { return ExtOrder{-1}; }
    static constexpr ExtOrder finite(std::int64_t n) noexcept { return ExtOrder{n}; }
    static constexpr ExtOrder infinite() noexcept { return ExtOrder{kInf}; }

    constexpr bool is_neg_one() const noexcept { return v_ == -1; }
    constexpr bool is_infinite() const noexcept { return v_ == kInf; }
    // True for -1 as well as for naturals.
    constexpr bool is_finite() const noexcept { return v_ != kInf; }
    // Numeric value; only meaningful when is_finite().
    constexpr std::int64_t value() const noexcept { return v_; }

    // "-1", "inf" or the decimal count.
    std::string to_string() const;

    friend constexpr auto operator<=>(ExtOrder, ExtOrder) = default;

private:
    static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    constexpr explicit ExtOrder(std::int64_t v) noexcept : v_(v) {}
    std::int64_t v_ = -1;
};

enum class StopReason { ConditionFailed, BottomReached, CycleDetected };
std::string_view to_string(StopReason r);

struct OrbitReport {
    LiftedState start;
    // Visited states, starting with `start` and ending with the state that
    // stopped the iteration (failing, bottom, or the first repeat).
    std::vector<LiftedState> trace;
    StopReason stop_reason = StopReason::ConditionFailed;
    ExtOrder order;
};

struct NfProfile {
    ExtOrder order;
    ExtOrder limit;

    friend constexpr auto operator<=>(const NfProfile&, const NfProfile&) = default;
};

OrbitReport orbit(const PartialFn& f, const Condition& c, LiftedState x);
ExtOrder element_order(const PartialFn& f, const Condition& c, LiftedState x);

// Element order of every defined state, indexed by state. Linear in the size
// of the space.
std::vector<ExtOrder> element_orders(const PartialFn& f, const Condition& c);

ExtOrder preservation_order(const PartialFn& f, const Condition& c);
ExtOrder preservation_limit(const PartialFn& f, const Condition& c);
NfProfile nf_profile(const PartialFn& f, const Condition& c);
// Same profile from precomputed element orders.
NfProfile profile_of(const std::vector<ExtOrder>& orders, const Condition& c);

std::vector<StateIndex> fixed_points(const PartialFn& f);
// Defined x with f^k(x) = x. With `minimal`, k must also be the least such
// period.
std::vector<StateIndex> periodic_points(const PartialFn& f, std::uint64_t k, bool minimal = false);

// Fixed points y in [A]_C that are reached from some other x in [A]_C whose
// whole orbit prefix stays inside C.
std::vector<StateIndex> attractors(const PartialFn& f, const Condition& c);
// States of [A]_C whose in-condition orbit ends at the fixed point y.
std::vector<StateIndex> basin(const PartialFn& f, const Condition& c, StateIndex y);

} // namespace tpf
