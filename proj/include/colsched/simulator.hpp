#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "colsched/core.hpp"
#include "colsched/policies.hpp"

namespace colsched {

struct Transmission {
    int user = 0;
    int channel = 0;
    /// False for a dummy packet (no queued data behind it).
    bool carries_data = false;
};

struct ChannelOutcome {
    TernaryFeedback feedback = TernaryFeedback::Idle;
    std::optional<int> successful_adaptive_user;
    bool dummy = false;
    bool uncoop_departed = false;
};

struct SlotOutcome {
    std::vector<ChannelOutcome> channels;
    /// Real (non-dummy) packets delivered per adaptive user.
    std::vector<int> real_departures;
};

/// Collision-channel resolution of one slot. Throws std::logic_error if two
/// adaptive transmissions share a channel or an index is out of range.
void resolve_slot(const std::vector<bool>& uncoop_nonempty, std::span<const Transmission> transmissions,
                  int num_adaptive, SlotOutcome& out);
SlotOutcome resolve_slot(const std::vector<bool>& uncoop_nonempty, std::span<const Transmission> transmissions,
                         int num_adaptive);

/// Ground truth handed to an observer after each slot; policies never get it.
struct SlotTrace {
    std::int64_t slot = 0;
    /// Backlogs after this slot's arrivals, before departures.
    std::span<const std::int64_t> adaptive_queues;
    std::span<const std::int64_t> uncoop_queues;
    const ScheduleAssignment* schedule = nullptr;
    std::span<const Transmission> transmissions;
    const SlotOutcome* outcome = nullptr;
};

struct SimOptions {
    PolicyKind policy = PolicyKind::Lqf;
    std::int64_t horizon = 1'000'000;
    std::uint64_t seed = 1;
    /// Backlog time-series period in slots.
    std::int64_t sample_every = 1000;
    /// Per-channel gate probability; defaults to p* of each channel.
    std::optional<std::vector<double>> gate_probs;
    std::function<void(const SlotTrace&)> observer;
};

struct BacklogSample {
    std::int64_t slot = 0;  // slots completed
    std::int64_t sum_backlog = 0;
    std::vector<std::int64_t> per_user;
    std::int64_t cum_collisions = 0;

    bool operator==(const BacklogSample&) const = default;
};

struct SimMetrics {
    std::int64_t horizon = 0;
    std::int64_t sample_every = 0;

    std::vector<std::int64_t> adaptive_arrivals;
    std::vector<std::int64_t> adaptive_departures;  // real packets only
    std::vector<std::int64_t> final_adaptive_backlog;
    std::vector<std::int64_t> uncoop_arrivals;
    std::vector<std::int64_t> uncoop_departures;
    std::vector<std::int64_t> final_uncoop_backlog;

    // Per channel.
    std::vector<std::int64_t> adaptive_successes;  // including dummies
    std::vector<std::int64_t> dummy_successes;
    std::vector<std::int64_t> uncoop_successes;
    std::vector<std::int64_t> collisions;
    std::vector<std::int64_t> idles;

    std::vector<BacklogSample> samples;

    double throughput(int user) const;
    /// Q(T)/T of an adaptive user.
    double backlog_growth(int user) const;
    double max_backlog_growth() const;
    double uncoop_backlog_growth(int channel) const;
    double collision_fraction() const;
    std::int64_t total_collisions() const;
    std::int64_t total_dummies() const;

    bool operator==(const SimMetrics&) const = default;
};

/// Runs `options.horizon` slots. Each slot: arrivals, controller decision
/// from feedback up to the previous slot, channel resolution, departures,
/// feedback. Deterministic in (config, options.policy, options.seed).
SimMetrics run_simulation(const NetworkConfig& config, const SimOptions& options);

/// Adaptive success rate (dummies included) of one always-backlogged
/// adaptive user behind the back-off gate with probability p.
double estimate_saturated_throughput(double uncoop_rate, double p, std::int64_t horizon, std::uint64_t seed);

}  // namespace colsched
