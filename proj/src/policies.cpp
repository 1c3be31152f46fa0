#include "colsched/policies.hpp"

#include <algorithm>
#include <stdexcept>

#include "colsched/bounds.hpp"

namespace colsched {

GateDecision gate_decide(ChannelGateState state, TernaryFeedback last_feedback, RandomStream& rng) {
    if (last_feedback == TernaryFeedback::Collision) {
        state.backing_off = true;
        return {Action::NoTransmit, state};
    }
    state.backing_off = false;
    const bool transmit = rng.bernoulli(state.transmit_prob);
    return {transmit ? Action::Transmit : Action::NoTransmit, state};
}

int ScheduleAssignment::load(int user) const {
    return static_cast<int>(std::count(user_for_channel.begin(), user_for_channel.end(), std::optional<int>(user)));
}

std::optional<RhoMatrix> compute_rho(const NetworkConfig& config) {
    FeasibilityVerdict verdict = check_sufficient(config);
    if (!verdict.feasible) return std::nullopt;
    return std::move(verdict.rho);
}

ScheduleAssignment schedule_randomized(const RhoMatrix& rho, const NetworkTopology& topology,
                                       const std::vector<bool>& gates_open, RandomStream& rng) {
    ScheduleAssignment out(topology.num_channels);
    for (int j = 0; j < topology.num_channels; ++j) {
        if (!gates_open[j]) continue;
        const auto users = topology.eligible_users(j);
        double total = 0.0;
        for (int i : users) total += rho(i, j);
        if (total <= 0.0) continue;

        const double target = rng.uniform() * total;
        double cumulative = 0.0;
        int chosen = -1;
        for (int i : users) {
            if (rho(i, j) <= 0.0) continue;
            cumulative += rho(i, j);
            chosen = i;
            if (target < cumulative) break;
        }
        out.user_for_channel[j] = chosen;
    }
    return out;
}

ScheduleAssignment schedule_lqf(std::span<const std::int64_t> adaptive_queues, const NetworkTopology& topology,
                                const std::vector<bool>& gates_open) {
    ScheduleAssignment out(topology.num_channels);
    for (int j = 0; j < topology.num_channels; ++j) {
        if (!gates_open[j]) continue;
        std::optional<int> best;
        for (int i = 0; i < topology.num_adaptive; ++i) {
            if (!topology.can_access(i, j)) continue;
            if (!best || adaptive_queues[i] > adaptive_queues[*best]) best = i;
        }
        out.user_for_channel[j] = best;
    }
    return out;
}

ScheduleAssignment schedule_priority(std::span<const std::int64_t> adaptive_queues, const NetworkTopology& topology,
                                     const std::vector<bool>& gates_open) {
    ScheduleAssignment out(topology.num_channels);
    std::vector<std::int64_t> remaining(adaptive_queues.begin(), adaptive_queues.end());
    for (int j = 0; j < topology.num_channels; ++j) {
        if (!gates_open[j]) continue;
        for (int i = 0; i < topology.num_adaptive; ++i) {
            if (remaining[i] > 0 && topology.can_access(i, j)) {
                out.user_for_channel[j] = i;
                --remaining[i];
                break;
            }
        }
    }
    return out;
}

ScheduleAssignment schedule_first_eligible(const NetworkTopology& topology, const std::vector<bool>& gates_open) {
    ScheduleAssignment out(topology.num_channels);
    for (int j = 0; j < topology.num_channels; ++j) {
        if (!gates_open[j]) continue;
        for (int i = 0; i < topology.num_adaptive; ++i) {
            if (topology.can_access(i, j)) {
                out.user_for_channel[j] = i;
                break;
            }
        }
    }
    return out;
}

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::PiLb: return "pi_lb";
        case PolicyKind::Randomized: return "randomized";
        case PolicyKind::Lqf: return "lqf";
        case PolicyKind::Priority: return "priority";
    }
    return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
    for (PolicyKind kind : {PolicyKind::PiLb, PolicyKind::Randomized, PolicyKind::Lqf, PolicyKind::Priority})
        if (to_string(kind) == name) return kind;
    return std::nullopt;
}

Controller::Controller(const NetworkConfig& config, PolicyKind kind, std::uint64_t seed,
                       std::optional<std::vector<double>> gate_probs)
    : topology_(config.topology), kind_(kind), scheduler_rng_(seed, stream::scheduler) {
    require_valid(config);
    const int m = config.num_channels();
    if (gate_probs && static_cast<int>(gate_probs->size()) != m)
        throw std::invalid_argument("Controller: one gate probability per channel expected");

    gates_.resize(m);
    gate_rngs_.reserve(m);
    for (int j = 0; j < m; ++j) {
        const double p = gate_probs ? (*gate_probs)[j] : optimal_transmit_prob(config.uncoop_rates[j]);
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("Controller: gate probability outside [0,1]");
        gates_[j].transmit_prob = p;
        gate_rngs_.emplace_back(seed, stream::channel_gate(j));
    }
    open_.assign(m, false);

    // Outside the sufficient region the max-flow split is still the closest
    // thing to a valid rho, so the randomized policy runs with it regardless.
    if (kind == PolicyKind::Randomized) rho_ = check_sufficient(config).rho;
}

ScheduleAssignment Controller::decide(const ControllerView& view) {
    for (std::size_t j = 0; j < gates_.size(); ++j) {
        const GateDecision d = gate_decide(gates_[j], view.last_feedback[j], gate_rngs_[j]);
        gates_[j] = d.state;
        open_[j] = d.action == Action::Transmit;
    }
    switch (kind_) {
        case PolicyKind::PiLb: return schedule_first_eligible(topology_, open_);
        case PolicyKind::Randomized: return schedule_randomized(rho_, topology_, open_, scheduler_rng_);
        case PolicyKind::Lqf: return schedule_lqf(view.adaptive_queues, topology_, open_);
        case PolicyKind::Priority: return schedule_priority(view.adaptive_queues, topology_, open_);
    }
    return ScheduleAssignment(static_cast<int>(gates_.size()));
}

}  // namespace colsched
