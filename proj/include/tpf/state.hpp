#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace tpf {

using Value = std::int64_t;
using StateIndex = std::uint64_t;

enum class DomainOrder { Ascending, Descending };

// A finite, totally ordered set of integer values. Values are kept sorted
// ascending; the declared order decides how ranks map onto them.
class Domain {
public:
    Domain(std::string name, std::vector<Value> elements,
           DomainOrder order = DomainOrder::Ascending);

    const std::string& name() const noexcept { return name_; }
    DomainOrder order() const noexcept { return order_; }
    std::size_t size() const noexcept { return values_.size(); }

    // Ascending numeric order, independent of the declared order.
    std::span<const Value> values() const noexcept { return values_; }

    // Rank 0 is the least element under the declared order.
    Value at_rank(std::size_t rank) const;
    std::optional<std::size_t> rank_of(Value v) const;
    bool contains(Value v) const { return rank_of(v).has_value(); }

    friend bool operator==(const Domain&, const Domain&) = default;

private:
    std::string name_;
    std::vector<Value> values_;
    DomainOrder order_;
};

// Throws Error(EmptyDomain) on empty input; sorts and removes duplicates.
Domain make_domain(std::string name, std::span<const Value> elements,
                   DomainOrder order = DomainOrder::Ascending);

struct Variable {
    std::string name;
    Domain domain;

    friend bool operator==(const Variable&, const Variable&) = default;
};

// Either a state index of some space or the trapping bottom state.
class LiftedState {
public:
    constexpr LiftedState() noexcept = default;

    static constexpr LiftedState bottom() noexcept { return LiftedState{}; }
    static constexpr LiftedState defined(StateIndex index) noexcept { return LiftedState{index}; }

    constexpr bool is_bottom() const noexcept { return raw_ == kBottom; }
    constexpr bool is_defined() const noexcept { return raw_ != kBottom; }
    constexpr StateIndex index() const noexcept { return raw_; }

    friend constexpr auto operator<=>(LiftedState, LiftedState) = default;

private:
    static constexpr StateIndex kBottom = std::numeric_limits<StateIndex>::max();

    constexpr explicit LiftedState(StateIndex raw) noexcept : raw_(raw) {}

    StateIndex raw_ = kBottom;
};

inline constexpr LiftedState kBottom = LiftedState::bottom();

// The product of the variable domains. States are numbered in lexicographic
// order: the first variable is most significant and each variable follows its
// domain's declared order. Index order is the canonical total order on states.
class StateSpace {
public:
    explicit StateSpace(std::vector<Variable> variables);

    std::span<const Variable> variables() const noexcept { return variables_; }
    std::size_t variable_count() const noexcept { return variables_.size(); }
    StateIndex size() const noexcept { return size_; }

    std::optional<std::size_t> variable_index(std::string_view name) const;

    std::optional<StateIndex> encode(std::span<const Value> values) const;
    std::vector<Value> decode(StateIndex index) const;
    Value value_of(StateIndex index, std::size_t variable) const;

    // Same state with one variable replaced; nullopt when the value falls
    // outside that variable's domain.
    std::optional<StateIndex> with_value(StateIndex index, std::size_t variable, Value v) const;

    // "x=1,y=2" or "bottom".
    std::string format(LiftedState s) const;
    // Inverse of format for defined states; accepts "x=1,y=2" with every
    // variable present exactly once.
    std::optional<StateIndex> parse_assignment(std::string_view text) const;

    friend bool operator==(const StateSpace& a, const StateSpace& b) {
        return a.variables_ == b.variables_;
    }

private:
    std::vector<Variable> variables_;
    std::vector<StateIndex> strides_;
    StateIndex size_ = 1;
};

using SpacePtr = std::shared_ptr<const StateSpace>;

SpacePtr make_space(std::vector<Variable> variables);

bool same_space(const SpacePtr& a, const SpacePtr& b);
// Throws Error(SpaceMismatch) naming `what` when the spaces differ.
void require_same_space(const SpacePtr& a, const SpacePtr& b, std::string_view what);

// Extensional Boolean condition: the set of defined states satisfying it.
// Bottom is never a member.
class Condition {
public:
    using Bits = boost::dynamic_bitset<>;

    Condition(SpacePtr space, Bits members, std::string label = {});

    static Condition always(SpacePtr space);
    static Condition never(SpacePtr space);
    static Condition from_predicate(SpacePtr space, const std::function<bool(StateIndex)>& pred,
                                    std::string label = {});
    static Condition from_states(SpacePtr space, std::span<const StateIndex> states,
                                 std::string label = {});

    const SpacePtr& space() const noexcept { return space_; }
    const Bits& members() const noexcept { return members_; }
    const std::string& label() const noexcept { return label_; }
    Condition with_label(std::string label) const;

    bool contains(StateIndex s) const { return members_.test(static_cast<std::size_t>(s)); }
    bool contains(LiftedState s) const { return s.is_defined() && contains(s.index()); }
    bool operator()(LiftedState s) const { return contains(s); }

    std::size_t count() const { return members_.count(); }
    bool empty() const { return members_.none(); }
    bool is_true() const { return members_.all(); }

    // Equivalence is equality of extensions; labels are ignored.
    friend bool operator==(const Condition& a, const Condition& b);

private:
    SpacePtr space_;
    Bits members_;
    std::string label_;
};

// Defined states of [A]_C in canonical order.
std::vector<StateIndex> restrict(const SpacePtr& space, const Condition& c);

// c1 entails c2 iff members(c1) is a subset of members(c2).
bool entails(const Condition& c1, const Condition& c2);
bool strictly_stronger(const Condition& c1, const Condition& c2);

Condition cond_and(const Condition& a, const Condition& b);
Condition cond_or(const Condition& a, const Condition& b);
Condition cond_not(const Condition& c);

} // namespace tpf
