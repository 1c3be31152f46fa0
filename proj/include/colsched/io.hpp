#pragma once

// Text formats. Configs and assignment problems are JSON documents whose
// keys are the field names of the in-memory types; user and channel ids in
// files are 1-based.

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "colsched/assignment.hpp"
#include "colsched/core.hpp"

namespace colsched {

using Json = nlohmann::ordered_json;

/// Malformed document: bad syntax, a missing key or a wrong type.
class FormatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

Json config_to_json(const NetworkConfig& config);
/// `uncoop_rates` may be omitted only when `require_uncoop_rates` is false;
/// it then defaults to all zeros.
NetworkConfig config_from_json(const Json& doc, bool require_uncoop_rates = true);

std::string config_to_text(const NetworkConfig& config);
NetworkConfig parse_config(std::string_view text);

Json problem_to_json(const AssignmentProblem& problem);
Json set_cover_to_json(const SetCoverInstance& instance);
SetCoverInstance set_cover_from_json(const Json& doc);

/// Accepts {"base": ..., "uncoop_users": [...]} or
/// {"set_cover": {"num_elements": .., "subsets": [..], "k": ..}}; the latter
/// is reduced to its placement problem.
AssignmentProblem parse_problem(std::string_view text);

/// 12 significant digits; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double value);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Raised for unreadable or unwritable files.
class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace colsched
