#include "tpf/partial_fn.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

#include "tpf/error.hpp"

namespace tpf {

namespace {

constexpr std::uint64_t kDefaultTableBound = 1'000'000;

std::uint64_t bound_from_env() {
    const char* raw = std::getenv("TPA_TABLE_BOUND");
    if (raw == nullptr || *raw == '\0') return kDefaultTableBound;
    try {
        return std::stoull(raw);
    } catch (const std::exception&) {
        return kDefaultTableBound;
    }
}

std::atomic<std::uint64_t>& bound_storage() {
    static std::atomic<std::uint64_t> bound{bound_from_env()};
    return bound;
}

} // namespace

std::uint64_t table_bound() { return bound_storage().load(); }
void set_table_bound(std::uint64_t bound) { bound_storage().store(bound); }

PartialFn::PartialFn(SpacePtr domain, SpacePtr codomain, std::vector<LiftedState> table)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), table_(std::move(table)) {
    if (table_.size() != domain_->size()) {
        throw Error(ErrorKind::SpaceMismatch, "function table does not cover the domain space");
    }
    for (auto y : table_) {
        if (y.is_defined() && y.index() >= codomain_->size()) {
            throw Error(ErrorKind::InvalidArgument, "function image lies outside the codomain space");
        }
    }
}

PartialFn::PartialFn(SpacePtr domain, SpacePtr codomain, std::shared_ptr<const Rule> rule)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), rule_(std::move(rule)) {}

PartialFn PartialFn::from_rule(SpacePtr domain, SpacePtr codomain, Rule rule) {
    if (domain->size() > table_bound()) {
        return PartialFn(std::move(domain), std::move(codomain),
                         std::make_shared<const Rule>(std::move(rule)));
    }
    std::vector<LiftedState> table(static_cast<std::size_t>(domain->size()));
    for (StateIndex x = 0; x < domain->size(); ++x) table[x] = rule(x);
    return PartialFn(std::move(domain), std::move(codomain), std::move(table));
}

bool operator==(const PartialFn& a, const PartialFn& b) {
    if (!same_space(a.domain_, b.domain_) || !same_space(a.codomain_, b.codomain_)) return false;
    if (a.is_tabulated() && b.is_tabulated()) return a.table_ == b.table_;
    for (StateIndex x = 0; x < a.domain_->size(); ++x) {
        if (a.at(x) != b.at(x)) return false;
    }
    return true;
}

PartialFn identity_fn(const SpacePtr& space) {
    return PartialFn::from_rule(space, [](StateIndex x) { return LiftedState::defined(x); });
}

PartialFn cond_identity(const Condition& c) {
    return PartialFn::from_rule(c.space(), [c](StateIndex x) {
        return c.contains(x) ? LiftedState::defined(x) : kBottom;
    });
}

PartialFn undefined_fn(const SpacePtr& space) {
    return PartialFn::from_rule(space, [](StateIndex) { return kBottom; });
}

PartialFn restrict_fn(const PartialFn& f, const Condition& c) {
    require_same_space(f.domain_space(), c.space(), "restrict_fn");
    return PartialFn::from_rule(f.domain_space(), f.codomain_space(), [f, c](StateIndex x) {
        return c.contains(x) ? f.at(x) : kBottom;
    });
}

PartialFn compose(const PartialFn& g, const PartialFn& f) {
    require_same_space(f.codomain_space(), g.domain_space(), "compose");
    return PartialFn::from_rule(f.domain_space(), g.codomain_space(),
                                [f, g](StateIndex x) { return g(f.at(x)); });
}

PartialFn psi(const PartialFn& f, const Condition& c1, const Condition& c2) {
    require_same_space(f.domain_space(), c1.space(), "psi");
    require_same_space(f.codomain_space(), c2.space(), "psi");
    return PartialFn::from_rule(f.domain_space(), f.codomain_space(), [f, c1, c2](StateIndex x) {
        if (!c1.contains(x)) return kBottom;
        auto y = f.at(x);
        return c2.contains(y) ? y : kBottom;
    });
}

PartialFn bullet_merge(const PartialFn& f, const PartialFn& g) {
    require_same_space(f.domain_space(), g.domain_space(), "bullet_merge");
    require_same_space(f.codomain_space(), g.codomain_space(), "bullet_merge");
    return PartialFn::from_rule(f.domain_space(), f.codomain_space(), [f, g](StateIndex x) {
        auto a = f.at(x);
        auto b = g.at(x);
        if (a.is_bottom()) return b;
        if (b.is_bottom() || a == b) return a;
        throw Error(ErrorKind::MergeConflict,
                    "both operands are defined and differ at " + f.domain_space()->format(LiftedState::defined(x)));
    });
}

Condition defined_domain(const PartialFn& f) {
    return Condition::from_predicate(f.domain_space(),
                                     [&f](StateIndex x) { return f.at(x).is_defined(); }, "Dom");
}

std::vector<StateIndex> image(const PartialFn& f) {
    Condition::Bits hit(static_cast<std::size_t>(f.codomain_space()->size()));
    for (StateIndex x = 0; x < f.domain_space()->size(); ++x) {
        auto y = f.at(x);
        if (y.is_defined()) hit.set(static_cast<std::size_t>(y.index()));
    }
    std::vector<StateIndex> out;
    for (auto pos = hit.find_first(); pos != Condition::Bits::npos; pos = hit.find_next(pos)) {
        out.push_back(pos);
    }
    return out;
}

bool is_truth_preserving(const PartialFn& f, const Condition& c) {
    if (!f.is_endo()) {
        throw Error(ErrorKind::SpaceMismatch, "is_truth_preserving: function is not an endo-function");
    }
    require_same_space(f.domain_space(), c.space(), "is_truth_preserving");
    for (auto pos = c.members().find_first(); pos != Condition::Bits::npos;
         pos = c.members().find_next(pos)) {
        if (!c.contains(f.at(pos))) return false;
    }
    return true;
}

bool is_injective(const PartialFn& f) {
    Condition::Bits hit(static_cast<std::size_t>(f.codomain_space()->size()));
    for (StateIndex x = 0; x < f.domain_space()->size(); ++x) {
        auto y = f.at(x);
        if (y.is_bottom()) continue;
        if (hit.test(y.index())) return false;
        hit.set(y.index());
    }
    return true;
}

} // namespace tpf
