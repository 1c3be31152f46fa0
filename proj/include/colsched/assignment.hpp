#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "colsched/core.hpp"
#include "colsched/stability.hpp"

namespace colsched {

struct UncoopUser {
    double rate = 0.0;
    /// Channels this user may be placed on (0-based).
    std::vector<int> candidates;

    bool operator==(const UncoopUser&) const = default;
};

/// Place each uncooperative user on one of its candidate channels, at most
/// one user per channel, so that the sufficient stability conditions hold.
/// `base.uncoop_rates` is ignored; channels left empty get rate 0.
struct AssignmentProblem {
    NetworkConfig base;
    std::vector<UncoopUser> users;

    bool operator==(const AssignmentProblem&) const = default;
};

std::vector<std::string> validate_problem(const AssignmentProblem& problem);

/// Copy of `problem.base` with uncooperative rates set by `channel_of_user`.
NetworkConfig apply_assignment(const AssignmentProblem& problem, const std::vector<int>& channel_of_user);

class SizeGuardError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExactOptions {
    bool prune = true;
    /// Keep enumerating after the first hit and count every feasible leaf.
    bool count_all = false;
    int enumeration_cap = 12;
    bool override_cap = false;
};

struct AssignmentResult {
    bool feasible = false;
    /// channel_of_user[k] for each uncooperative user; empty when no complete
    /// injective placement was produced.
    std::vector<int> channel_of_user;
    /// Sufficient-condition verdict of the returned placement.
    std::optional<FeasibilityVerdict> verdict;
    std::uint64_t nodes_explored = 0;
    std::uint64_t feasible_count = 0;  // only with count_all
};

/// Depth-first enumeration of injective placements. A branch is cut when,
/// with every still-free channel treated as empty, the adaptive demand
/// already cannot be routed. Throws SizeGuardError when the channel count
/// exceeds the enumeration cap without override.
AssignmentResult solve_exact(const AssignmentProblem& problem, const ExactOptions& options = {});

/// Users in descending rate order, each onto the free candidate channel
/// that leaves the largest max-flow slack (lowest channel on ties). May miss
/// feasible placements; any "feasible" answer is verified.
AssignmentResult solve_greedy(const AssignmentProblem& problem);

struct SetCoverInstance {
    int num_elements = 0;
    /// Subsets of {0..num_elements-1}.
    std::vector<std::vector<int>> subsets;
    int budget = 0;

    bool operator==(const SetCoverInstance&) const = default;
};

std::vector<std::string> validate_set_cover(const SetCoverInstance& instance);

/// One adaptive user per element (rate 1/|E|), one channel per subset with
/// element e allowed on channel s iff e is in s, |S|-k uncooperative users
/// of rate 1 and k of rate 0 that may go anywhere. The placement problem is
/// feasible iff some k subsets cover every element.
AssignmentProblem reduce_set_cover(const SetCoverInstance& instance);

}  // namespace colsched
