#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpf/arrows.hpp"
#include "tpf/orbit.hpp"

namespace tpf::cli {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

enum ExitCode : int { kOk = 0, kPropertyFails = 1, kUsage = 2, kBudget = 3 };

struct Outcome {
    json report;
    int exit_code = kOk;
};

// Where the function under analysis comes from: a declared `fn` (on the
// full space of the file) or a program. A loop program contributes its body
// and, unless `cond` is given, its own condition.
struct Subject {
    std::string file;
    std::optional<std::string> fn;
    std::optional<std::string> program;
    std::optional<std::string> cond;
};

struct ArrowRequest {
    std::string file;
    int kind = 0;
    std::string from;
    std::string to;
    std::optional<std::string> from_cond;
    std::optional<std::string> to_cond;
    std::optional<std::string> map_file;
    bool search = false;
};

json order_json(ExtOrder n);
json profile_json(const NfProfile& p);
json certificate_json(const Certificate& c, const SpacePtr& source_space);
json arrow_json(const Arrow& a);

// "i=1 -> j=100" lines, '#' starts a comment. States missing from the file
// are left undefined.
PartialFn read_map(const std::string& path, const SpacePtr& from, const SpacePtr& to);

Outcome cmd_parse(const std::string& file);
Outcome cmd_denote(const std::string& file, const std::string& program, bool table);
Outcome cmd_orbit(const Subject& subject, const std::string& start);
Outcome cmd_order(const Subject& subject, const std::optional<std::string>& element);
Outcome cmd_profile(const Subject& subject, const std::string& cond2);
Outcome cmd_arrow(const ArrowRequest& request);
Outcome cmd_graph(const std::vector<std::string>& files, std::uint64_t budget,
                  const std::vector<std::string>& only);

// Error report for a failed command: parse and usage errors exit with 2,
// exhausted search limits with 3, and a map that leaves a source state
// without an image with 1.
Outcome error_outcome(const std::string& command, const json& inputs, const std::exception& e);

} // namespace tpf::cli
