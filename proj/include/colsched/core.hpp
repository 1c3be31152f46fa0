#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace colsched {

/// Packets per slot, always in [0, 1].
class Rate {
public:
    constexpr Rate() = default;
    explicit Rate(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0))
            throw std::domain_error("rate out of [0,1]: " + std::to_string(value));
    }
    constexpr double value() const { return value_; }

private:
    double value_ = 0.0;
};

inline bool is_valid_rate(double value) { return value >= 0.0 && value <= 1.0; }

enum class TernaryFeedback : std::uint8_t { Success, Collision, Idle };
enum class Action : std::uint8_t { Transmit, NoTransmit };

const char* to_string(TernaryFeedback feedback);

/// Observation produced by a single collision channel, given whether the
/// uncooperative queue is nonempty and what the adaptive side did.
constexpr TernaryFeedback channel_feedback(bool uncoop_nonempty, Action action) {
    if (action == Action::Transmit)
        return uncoop_nonempty ? TernaryFeedback::Collision : TernaryFeedback::Success;
    return uncoop_nonempty ? TernaryFeedback::Success : TernaryFeedback::Idle;
}

/// Adaptive users and the channels each may transmit on. Channel and user
/// indices are 0-based here; file formats and messages use 1-based ids.
struct NetworkTopology {
    int num_adaptive = 0;
    int num_channels = 0;
    std::vector<std::vector<int>> access_sets;

    bool can_access(int user, int channel) const;
    /// Adaptive users allowed on `channel`, ascending.
    std::vector<int> eligible_users(int channel) const;

    bool operator==(const NetworkTopology&) const = default;
};

enum class ArrivalKind : std::uint8_t { Bernoulli, Binomial };

/// Per-slot adaptive arrival law. Binomial draws `trials` Bernoulli(rate/trials)
/// packets, so the mean stays `rate` and A_max = trials.
struct ArrivalModel {
    ArrivalKind kind = ArrivalKind::Bernoulli;
    int trials = 1;

    int max_batch() const { return kind == ArrivalKind::Bernoulli ? 1 : trials; }
    bool operator==(const ArrivalModel&) const = default;
};

struct NetworkConfig {
    NetworkTopology topology;
    std::vector<double> adaptive_rates;
    /// One rate per channel; 0 means the channel has no uncooperative user.
    std::vector<double> uncoop_rates;
    ArrivalModel adaptive_arrival_kind;
    std::int64_t horizon = 1'000'000;
    std::uint64_t seed = 1;

    int num_adaptive() const { return topology.num_adaptive; }
    int num_channels() const { return topology.num_channels; }

    bool operator==(const NetworkConfig&) const = default;
};

/// Every violated configuration invariant, as readable text. Empty iff valid.
std::vector<std::string> validate_config(const NetworkConfig& config);

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Throws ConfigError if validate_config reports anything.
void require_valid(const NetworkConfig& config);

/// Two-user network: one adaptive user on one channel shared with an
/// uncooperative user of rate `uncoop_rate`.
NetworkConfig two_user_network(double adaptive_rate, double uncoop_rate);

/// Four adaptive users, two channels; users 1-3 reach both channels and
/// user 4 only channel 2. All adaptive users share `adaptive_rate`.
NetworkConfig four_user_two_channel_network(double adaptive_rate, double uncoop_rate = 0.2);

}  // namespace colsched
