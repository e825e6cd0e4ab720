#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tpf/orbit.hpp"

namespace tpf {

// Difference of two extended orders. Infinite minus infinite has no value.
struct Delta {
    enum class Kind { Finite, PosInfinite, NegInfinite, Indeterminate };

    Kind kind = Kind::Finite;
    std::int64_t value = 0;

    static Delta between(ExtOrder a, ExtOrder b);  // a - b
    Delta operator-(const Delta& rhs) const;
    std::string to_string() const;

    friend bool operator==(const Delta&, const Delta&) = default;
};

struct RelaxationReport {
    NfProfile original;
    NfProfile strengthened;
    Delta order_relaxation;  // order(C) - order(C')
    Delta limit_relaxation;  // limit(C) - limit(C')
    Delta sigma;             // limit_relaxation - order_relaxation
    bool window_collapsed = false;  // limit(C') < order(C)
};

// Requires c_strong to entail c; throws NotStronger otherwise.
RelaxationReport relaxation(const PartialFn& f, const Condition& c, const Condition& c_strong);

// True iff neither profile component grows when c is strengthened to
// c_strong. Throws NotStronger when c_strong does not entail c.
bool check_strengthening(const PartialFn& f, const Condition& c, const Condition& c_strong);
// True iff neither component shrinks when c is weakened to c_weak. Throws
// NotWeaker when c does not entail c_weak.
bool check_weakening(const PartialFn& f, const Condition& c, const Condition& c_weak);

// Compares the profile under cA and cB with the one under cB alone.
bool nested_bound_check(const PartialFn& f, const Condition& cA, const Condition& cB);

enum class RemapCase {
    Equal,
    StrictlyWeaker,
    StrictlyStronger,
    Incomparable,
    LargerSet,
    SmallerSurjective,
    SmallerNonSurjective,
};
std::string_view to_string(RemapCase c);

struct RemapReport {
    RemapCase case_tag;
    // How cB relates to the image condition phi([A]_cA).
    RemapCase image_relation;
    Condition image_condition;
    NfProfile old_profile;
    NfProfile new_profile;
    bool relation_verified;
    std::string relation;  // human-readable statement of what was checked
};

// Moves the analysis of f under cA to the space of phi along phi.
// Without `extension`, the new profile is computed for f on A with the
// condition checked through phi, that is under {x : phi(x) in cB}.
// With `extension` (an endo on B agreeing with f through an injective phi),
// the new profile is that of the extension under cB and the min/max
// composition with the states outside phi(A) is checked.
RemapReport remap(const PartialFn& f, const Condition& cA, const PartialFn& phi, const Condition& cB,
                  const std::optional<PartialFn>& extension = std::nullopt);

struct ConditionalBounds {
    ExtOrder m1, m2, l1, l2;
    ExtOrder order_bound;  // min(m1, m2)
    ExtOrder limit_bound;  // min(l1, l2)
    NfProfile exact;       // profile of the merged function under cA
    bool order_bound_holds = false;
    bool limit_bound_holds = false;
    // The phase decomposition reproduces every element order.
    bool phase_consistent = false;
};

// f = (f1 . id_c) bullet (f2 . id_not c), analysed under cA.
ConditionalBounds conditional_bounds(const PartialFn& f1, const PartialFn& f2, const Condition& c,
                                     const Condition& cA);

// Element orders of the merged function rebuilt from alternating f1/f2
// phases: n_x = k + [y in cA] (1 + n_y) where k is the phase order of x and y
// the first state after the phase.
std::vector<ExtOrder> phase_orders(const PartialFn& f1, const PartialFn& f2, const Condition& c,
                                   const Condition& cA);

} // namespace tpf
