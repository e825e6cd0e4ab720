#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpf/orbit.hpp"
#include "tpf/partial_fn.hpp"
#include "tpf/syntax.hpp"

namespace tpf {

// How a program takes part in an arrow. A loop contributes the element orders
// of its body under its condition; any other program is treated as a loop
// that runs exactly once, so every state with a defined result has order 0
// and every other state has order -1.
enum class EndpointKind { Loop, Once };
std::string_view to_string(EndpointKind k);

struct Endpoint {
    std::string label;
    SpacePtr space;
    Condition cond;
    std::vector<ExtOrder> orders;
    EndpointKind kind = EndpointKind::Loop;

    friend bool operator==(const Endpoint& a, const Endpoint& b) {
        return same_space(a.space, b.space) && a.cond == b.cond && a.orders == b.orders && a.kind == b.kind;
    }
};
using EndpointPtr = std::shared_ptr<const Endpoint>;

EndpointPtr loop_endpoint(const PartialFn& body, const Condition& cond, std::string label);
EndpointPtr once_endpoint(const PartialFn& f, std::string label);

// A program's endpoint. With `cond`, the program (or the body, if it is a
// loop) is analysed under that condition; otherwise a loop uses its own
// condition and anything else is a run-once endpoint.
EndpointPtr resolve_endpoint(const ProgramUnit& unit, std::string_view program,
                             const std::optional<Condition>& cond = std::nullopt);

// The canonical infinite loop (while true { skip } on one state) and the
// canonical undefined program (abort on one state).
EndpointPtr infinite_loop_probe();
EndpointPtr undefined_probe();

enum class Clause {
    None,
    KindMismatch,
    Injectivity,
    Monotonicity,
    ConditionMap,
    OrderInvariance,
    Range,
};
std::string_view to_string(Clause c);

struct Certificate {
    bool holds = false;
    Clause failed = Clause::None;
    std::optional<StateIndex> witness;        // source state exhibiting the failure
    std::optional<StateIndex> other_witness;  // second source state, if any
    std::string detail;
};

// Type-0 check of T from `src` to `dst`. `support`, when given, restricts
// the check to those source states (used by inverses); T must be defined on
// all of it. Throws PartialT when it is not and SpaceMismatch when T does
// not go from src's space to dst's space.
Certificate verify_arrow0(const Endpoint& src, const Endpoint& dst, const PartialFn& T,
                          const std::optional<Condition>& support = std::nullopt);

enum class ArrowKind { Type0, Type1, Type2Asserted };
std::string_view to_string(ArrowKind k);

// Split of a target Seq P = P_m . P_k . P_l into item ranges
// [0, k_begin), [k_begin, k_end) and [k_end, n).
struct Split {
    std::size_t k_begin = 0;
    std::size_t k_end = 0;
    std::size_t items = 0;
    EndpointKind view = EndpointKind::Once;

    friend bool operator==(const Split&, const Split&) = default;
};

struct Arrow {
    ArrowKind kind = ArrowKind::Type0;
    std::string source;
    std::string target;
    EndpointPtr from;
    EndpointPtr to;  // for Type1, the P_k segment
    std::optional<PartialFn> transform;
    std::optional<Condition> support;
    std::optional<Split> split;
    // Type1: states that P_l can produce, which T must land in.
    std::optional<Condition> range;
    std::string witness;  // Type2Asserted
    Certificate certificate;
};

struct SearchLimits {
    std::uint64_t max_source = std::uint64_t{1} << 20;
    std::uint64_t max_target = std::uint64_t{1} << 22;
};

// Finds an order-preserving injection matching element orders, if one
// exists, by taking for every source state (in canonical order) the least
// admissible target above the previous one. `allowed` narrows the targets.
// Throws SearchBudgetExceeded when either space exceeds the limits.
std::optional<PartialFn> search_transform(const Endpoint& src, const Endpoint& dst,
                                          const std::optional<Condition>& allowed = std::nullopt,
                                          const SearchLimits& limits = {});

std::optional<Arrow> search_arrow0(const Endpoint& src, const Endpoint& dst, const SearchLimits& limits = {});
std::optional<Arrow> search_arrow0(const ProgramUnit& unit, std::string_view p_i, std::string_view p_j,
                                   const SearchLimits& limits = {});

Arrow make_arrow0(const EndpointPtr& from, const EndpointPtr& to, const PartialFn& T,
                  const std::optional<Condition>& support = std::nullopt);

// Type-1 search of `src` into the top-level sequence of `p_j` in
// `target_unit`. Splits are tried with the earliest P_k start first and,
// for each start, the longest P_k first.
std::optional<Arrow> search_arrow1(const EndpointPtr& src, const ProgramUnit& target_unit,
                                   std::string_view p_j, const SearchLimits& limits = {});
std::optional<Arrow> search_arrow1(const ProgramUnit& unit, std::string_view p_i, std::string_view p_j,
                                   const SearchLimits& limits = {});

// Checks a given T as a Type-1 arrow for one split.
Certificate verify_arrow1(const Endpoint& src, const ProgramUnit& target_unit, std::string_view p_j,
                          const Split& split, const PartialFn& T);

// The top-level items of a program body; a non-Seq body is a single item.
std::vector<StmtPtr> top_level_items(const Stmt& body);

// Composition a2 after a1. Type0 after Type0 gives Type0; Type1 after Type0
// gives Type1 on a2's split. For Type0 after Type1 the composite is checked
// as a Type0 arrow and then against every split of a2's target, which needs
// `target_unit`. Throws NotComposable when the endpoints do not meet or the
// composite fails verification.
Arrow compose_arrow0(const Arrow& a1, const Arrow& a2, const ProgramUnit* target_unit = nullptr);

// Inverse of a verified Type0 arrow on the image of its support.
std::optional<Arrow> invert_arrow0(const Arrow& a);

Arrow assert_arrow2(std::string p_i, std::string p_j, std::string witness);

// ---------------------------------------------------------------------------
// Isomorphism graph

struct ProgramRef {
    const ProgramUnit* unit = nullptr;
    std::string name;
};

struct IsoGraph {
    struct Edge {
        std::size_t from = 0;
        std::size_t to = 0;
        Arrow arrow;
    };
    struct Component {
        std::vector<std::size_t> members;
        bool contains_infinite_loop = false;
        bool contains_undefined = false;
        bool guaranteed_halting() const { return !contains_infinite_loop && !contains_undefined; }
    };

    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    std::vector<Component> components;
    std::vector<bool> infinite_loop;  // per node: arrow from the loop probe
    std::vector<bool> undefined;      // per node: arrow from the abort probe
    std::vector<Arrow> asserted;      // Type2 records; never affect flags
    std::uint64_t searches = 0;
    bool truncated = false;

    std::size_t component_of(std::size_t node) const;
};

struct GraphOptions {
    std::uint64_t budget = 10'000;  // maximum number of pairwise searches
    SearchLimits limits;
};

// Throws InvalidArgument when two programs share a name.
IsoGraph build_iso_graph(const std::vector<ProgramRef>& programs, const GraphOptions& options = {});

} // namespace tpf
