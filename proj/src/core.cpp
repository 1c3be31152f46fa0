#include "colsched/core.hpp"

#include <algorithm>
#include <sstream>

namespace colsched {

const char* to_string(TernaryFeedback feedback) {
    switch (feedback) {
        case TernaryFeedback::Success: return "S";
        case TernaryFeedback::Collision: return "C";
        case TernaryFeedback::Idle: return "I";
    }
    return "?";
}

bool NetworkTopology::can_access(int user, int channel) const {
    const auto& set = access_sets.at(static_cast<std::size_t>(user));
    return std::find(set.begin(), set.end(), channel) != set.end();
}

std::vector<int> NetworkTopology::eligible_users(int channel) const {
    std::vector<int> users;
    for (int i = 0; i < num_adaptive; ++i)
        if (can_access(i, channel)) users.push_back(i);
    return users;
}

namespace {

std::string rate_message(const char* what, const char* unit, std::size_t index, double value) {
    std::ostringstream out;
    out << what << " rate out of [0,1] for " << unit << ' ' << index + 1 << ": " << value;
    return out.str();
}

}  // namespace

std::vector<std::string> validate_config(const NetworkConfig& config) {
    std::vector<std::string> violations;
    const auto& topo = config.topology;

    if (topo.num_adaptive < 0) violations.emplace_back("num_adaptive must be nonnegative");
    if (topo.num_channels < 1) violations.emplace_back("num_channels must be at least 1");

    if (static_cast<int>(topo.access_sets.size()) != topo.num_adaptive) {
        violations.push_back("access_sets has " + std::to_string(topo.access_sets.size()) +
                             " entries, expected " + std::to_string(topo.num_adaptive));
    }
    for (std::size_t i = 0; i < topo.access_sets.size(); ++i) {
        const auto& set = topo.access_sets[i];
        if (set.empty()) {
            violations.push_back("access set empty for user " + std::to_string(i + 1));
            continue;
        }
        for (int channel : set) {
            if (channel < 0 || channel >= topo.num_channels) {
                violations.push_back("access set of user " + std::to_string(i + 1) +
                                     " names channel " + std::to_string(channel + 1) +
                                     " outside 1.." + std::to_string(topo.num_channels));
            }
        }
        auto sorted = set;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            violations.push_back("access set of user " + std::to_string(i + 1) + " repeats a channel");
    }

    if (static_cast<int>(config.adaptive_rates.size()) != topo.num_adaptive) {
        violations.push_back("adaptive_rates has " + std::to_string(config.adaptive_rates.size()) +
                             " entries, expected " + std::to_string(topo.num_adaptive));
    }
    for (std::size_t i = 0; i < config.adaptive_rates.size(); ++i)
        if (!is_valid_rate(config.adaptive_rates[i]))
            violations.push_back(rate_message("adaptive", "user", i, config.adaptive_rates[i]));

    if (static_cast<int>(config.uncoop_rates.size()) != topo.num_channels) {
        violations.push_back("uncoop_rates has " + std::to_string(config.uncoop_rates.size()) +
                             " entries, expected " + std::to_string(topo.num_channels));
    }
    for (std::size_t j = 0; j < config.uncoop_rates.size(); ++j)
        if (!is_valid_rate(config.uncoop_rates[j]))
            violations.push_back(rate_message("uncoop", "channel", j, config.uncoop_rates[j]));

    if (config.adaptive_arrival_kind.kind == ArrivalKind::Binomial &&
        config.adaptive_arrival_kind.trials < 1)
        violations.emplace_back("binomial arrivals need trials >= 1");
    if (config.horizon < 1) violations.emplace_back("horizon must be at least 1 slot");

    return violations;
}

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
    std::string text = "invalid network config";
    for (const auto& v : violations) text += "\n  - " + v;
    return text;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

void require_valid(const NetworkConfig& config) {
    auto violations = validate_config(config);
    if (!violations.empty()) throw ConfigError(std::move(violations));
}

NetworkConfig two_user_network(double adaptive_rate, double uncoop_rate) {
    NetworkConfig config;
    config.topology = {1, 1, {{0}}};
    config.adaptive_rates = {adaptive_rate};
    config.uncoop_rates = {uncoop_rate};
    return config;
}

NetworkConfig four_user_two_channel_network(double adaptive_rate, double uncoop_rate) {
    NetworkConfig config;
    config.topology = {4, 2, {{0, 1}, {0, 1}, {0, 1}, {1}}};
    config.adaptive_rates.assign(4, adaptive_rate);
    config.uncoop_rates.assign(2, uncoop_rate);
    return config;
}

}  // namespace colsched
