#include "tpf/state.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_set>

#include "tpf/error.hpp"

namespace tpf {

namespace {

std::vector<Value> sorted_unique(std::vector<Value> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

} // namespace

Domain::Domain(std::string name, std::vector<Value> elements, DomainOrder order)
    : name_(std::move(name)), values_(sorted_unique(std::move(elements))), order_(order) {
    if (values_.empty()) {
        throw Error(ErrorKind::EmptyDomain, "domain '" + name_ + "' has no elements");
    }
}

Value Domain::at_rank(std::size_t rank) const {
    return order_ == DomainOrder::Ascending ? values_[rank] : values_[values_.size() - 1 - rank];
}

std::optional<std::size_t> Domain::rank_of(Value v) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), v);
    if (it == values_.end() || *it != v) return std::nullopt;
    auto pos = static_cast<std::size_t>(it - values_.begin());
    return order_ == DomainOrder::Ascending ? pos : values_.size() - 1 - pos;
}

Domain make_domain(std::string name, std::span<const Value> elements, DomainOrder order) {
    return Domain(std::move(name), std::vector<Value>(elements.begin(), elements.end()), order);
}

StateSpace::StateSpace(std::vector<Variable> variables) : variables_(std::move(variables)) {
    std::unordered_set<std::string> seen;
    for (const auto& v : variables_) {
        if (!seen.insert(v.name).second) {
            throw Error(ErrorKind::InvalidArgument, "duplicate state variable '" + v.name + "'");
        }
    }
    strides_.assign(variables_.size(), 1);
    // Indices must stay below the bottom sentinel.
    constexpr StateIndex limit = std::numeric_limits<StateIndex>::max() / 2;
    for (std::size_t k = variables_.size(); k-- > 0;) {
        strides_[k] = size_;
        auto n = static_cast<StateIndex>(variables_[k].domain.size());
        if (size_ > limit / n) {
            throw Error(ErrorKind::SpaceTooLarge, "state space size overflows 64-bit indices");
        }
        size_ *= n;
    }
}

std::optional<std::size_t> StateSpace::variable_index(std::string_view name) const {
    for (std::size_t k = 0; k < variables_.size(); ++k) {
        if (variables_[k].name == name) return k;
    }
    return std::nullopt;
}

std::optional<StateIndex> StateSpace::encode(std::span<const Value> values) const {
    if (values.size() != variables_.size()) return std::nullopt;
    StateIndex index = 0;
    for (std::size_t k = 0; k < variables_.size(); ++k) {
        auto rank = variables_[k].domain.rank_of(values[k]);
        if (!rank) return std::nullopt;
        index += static_cast<StateIndex>(*rank) * strides_[k];
    }
    return index;
}

std::vector<Value> StateSpace::decode(StateIndex index) const {
    std::vector<Value> out(variables_.size());
    for (std::size_t k = 0; k < variables_.size(); ++k) out[k] = value_of(index, k);
    return out;
}

Value StateSpace::value_of(StateIndex index, std::size_t variable) const {
    const auto& dom = variables_[variable].domain;
    auto rank = (index / strides_[variable]) % static_cast<StateIndex>(dom.size());
    return dom.at_rank(static_cast<std::size_t>(rank));
}

std::optional<StateIndex> StateSpace::with_value(StateIndex index, std::size_t variable,
                                                 Value v) const {
    const auto& dom = variables_[variable].domain;
    auto rank = dom.rank_of(v);
    if (!rank) return std::nullopt;
    auto n = static_cast<StateIndex>(dom.size());
    auto old_rank = (index / strides_[variable]) % n;
    return index - old_rank * strides_[variable] + static_cast<StateIndex>(*rank) * strides_[variable];
}

std::string StateSpace::format(LiftedState s) const {
    if (s.is_bottom()) return "bottom";
    std::ostringstream os;
    for (std::size_t k = 0; k < variables_.size(); ++k) {
        if (k) os << ',';
        os << variables_[k].name << '=' << value_of(s.index(), k);
    }
    return os.str();
}

std::optional<StateIndex> StateSpace::parse_assignment(std::string_view text) const {
    std::vector<std::optional<Value>> values(variables_.size());
    text = trim(text);
    while (!text.empty()) {
        auto comma = text.find(',');
        auto item = trim(text.substr(0, comma));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        auto eq = item.find('=');
        if (eq == std::string_view::npos) return std::nullopt;
        auto name = trim(item.substr(0, eq));
        auto number = trim(item.substr(eq + 1));
        auto k = variable_index(name);
        if (!k || values[*k]) return std::nullopt;
        Value v{};
        auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), v);
        if (ec != std::errc{} || ptr != number.data() + number.size()) return std::nullopt;
        values[*k] = v;
    }
    std::vector<Value> flat;
    for (const auto& v : values) {
        if (!v) return std::nullopt;
        flat.push_back(*v);
    }
    return encode(flat);
}

SpacePtr make_space(std::vector<Variable> variables) {
    return std::make_shared<const StateSpace>(std::move(variables));
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
    return a == b || (a && b && *a == *b);
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, std::string_view what) {
    if (!same_space(a, b)) {
        throw Error(ErrorKind::SpaceMismatch, std::string(what) + ": operands live on different state spaces");
    }
}

Condition::Condition(SpacePtr space, Bits members, std::string label)
    : space_(std::move(space)), members_(std::move(members)), label_(std::move(label)) {
    if (members_.size() != space_->size()) {
        throw Error(ErrorKind::SpaceMismatch, "condition bitset does not match its space");
    }
}

Condition Condition::always(SpacePtr space) {
    Bits bits(static_cast<std::size_t>(space->size()));
    bits.set();
    return Condition(std::move(space), std::move(bits), "True");
}

Condition Condition::never(SpacePtr space) {
    Bits bits(static_cast<std::size_t>(space->size()));
    return Condition(std::move(space), std::move(bits), "False");
}

Condition Condition::from_predicate(SpacePtr space, const std::function<bool(StateIndex)>& pred,
                                    std::string label) {
    Bits bits(static_cast<std::size_t>(space->size()));
    for (StateIndex s = 0; s < space->size(); ++s) {
        if (pred(s)) bits.set(static_cast<std::size_t>(s));
    }
    return Condition(std::move(space), std::move(bits), std::move(label));
}

Condition Condition::from_states(SpacePtr space, std::span<const StateIndex> states, std::string label) {
    Bits bits(static_cast<std::size_t>(space->size()));
    for (auto s : states) bits.set(static_cast<std::size_t>(s));
    return Condition(std::move(space), std::move(bits), std::move(label));
}

Condition Condition::with_label(std::string label) const {
    return Condition(space_, members_, std::move(label));
}

bool operator==(const Condition& a, const Condition& b) {
    return same_space(a.space_, b.space_) && a.members_ == b.members_;
}

std::vector<StateIndex> restrict(const SpacePtr& space, const Condition& c) {
    require_same_space(space, c.space(), "restrict");
    std::vector<StateIndex> out;
    out.reserve(c.count());
    for (auto pos = c.members().find_first(); pos != Condition::Bits::npos;
         pos = c.members().find_next(pos)) {
        out.push_back(static_cast<StateIndex>(pos));
    }
    return out;
}

bool entails(const Condition& c1, const Condition& c2) {
    require_same_space(c1.space(), c2.space(), "entails");
    return c1.members().is_subset_of(c2.members());
}

bool strictly_stronger(const Condition& c1, const Condition& c2) {
    require_same_space(c1.space(), c2.space(), "strictly_stronger");
    return c1.members().is_proper_subset_of(c2.members());
}

namespace {

std::string join_label(std::string_view op, const Condition& a, const Condition& b) {
    if (a.label().empty() || b.label().empty()) return {};
    return "(" + a.label() + " " + std::string(op) + " " + b.label() + ")";
}

} // namespace

Condition cond_and(const Condition& a, const Condition& b) {
    require_same_space(a.space(), b.space(), "cond_and");
    return Condition(a.space(), a.members() & b.members(), join_label("and", a, b));
}

Condition cond_or(const Condition& a, const Condition& b) {
    require_same_space(a.space(), b.space(), "cond_or");
    return Condition(a.space(), a.members() | b.members(), join_label("or", a, b));
}

Condition cond_not(const Condition& c) {
    return Condition(c.space(), ~c.members(), c.label().empty() ? std::string{} : "not " + c.label());
}

} // namespace tpf
