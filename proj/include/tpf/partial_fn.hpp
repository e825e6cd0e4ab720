#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "tpf/state.hpp"

namespace tpf {

// Largest space (in defined states) that is stored as an explicit table.
// Defaults to 10^6; TPA_TABLE_BOUND overrides it at first use.
std::uint64_t table_bound();
void set_table_bound(std::uint64_t bound);

// A total map on the lifted domain space. Bottom always maps to bottom.
// Small spaces are tabulated; larger ones keep the defining rule and are
// evaluated on demand.
class PartialFn {
public:
    using Rule = std::function<LiftedState(StateIndex)>;

    PartialFn(SpacePtr domain, SpacePtr codomain, std::vector<LiftedState> table);

    // Tabulates `rule` when the domain is within table_bound().
    static PartialFn from_rule(SpacePtr domain, SpacePtr codomain, Rule rule);
    static PartialFn from_rule(SpacePtr space, Rule rule) {
        return from_rule(space, space, std::move(rule));
    }

    const SpacePtr& domain_space() const noexcept { return domain_; }
    const SpacePtr& codomain_space() const noexcept { return codomain_; }
    bool is_endo() const { return same_space(domain_, codomain_); }
    bool is_tabulated() const noexcept { return rule_ == nullptr; }

    LiftedState at(StateIndex x) const { return rule_ ? (*rule_)(x) : table_[x]; }
    LiftedState operator()(LiftedState x) const {
        return x.is_bottom() ? kBottom : at(x.index());
    }

    friend bool operator==(const PartialFn& a, const PartialFn& b);

private:
    PartialFn(SpacePtr domain, SpacePtr codomain, std::shared_ptr<const Rule> rule);

    SpacePtr domain_;
    SpacePtr codomain_;
    std::vector<LiftedState> table_;
    std::shared_ptr<const Rule> rule_;
};

PartialFn identity_fn(const SpacePtr& space);
PartialFn cond_identity(const Condition& c);
PartialFn undefined_fn(const SpacePtr& space);
PartialFn restrict_fn(const PartialFn& f, const Condition& c);

// (g . f)(x) = g(f(x)); requires f's codomain to be g's domain.
PartialFn compose(const PartialFn& g, const PartialFn& f);

// id_{c2} . f . id_{c1}
PartialFn psi(const PartialFn& f, const Condition& c1, const Condition& c2);

// Pointwise merge with bottom as identity. Throws MergeConflict when both
// operands are defined and disagree.
PartialFn bullet_merge(const PartialFn& f, const PartialFn& g);

// States of the domain with a defined image.
Condition defined_domain(const PartialFn& f);

// Defined images, ascending and without repetition.
std::vector<StateIndex> image(const PartialFn& f);

bool is_truth_preserving(const PartialFn& f, const Condition& c);
bool is_injective(const PartialFn& f);

} // namespace tpf
