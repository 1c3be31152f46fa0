#include "colsched/simulator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "colsched/rng.hpp"

namespace colsched {

void resolve_slot(const std::vector<bool>& uncoop_nonempty, std::span<const Transmission> transmissions,
                  int num_adaptive, SlotOutcome& out) {
    const std::size_t m = uncoop_nonempty.size();
    out.channels.assign(m, ChannelOutcome{});
    out.real_departures.assign(static_cast<std::size_t>(num_adaptive), 0);

    std::vector<const Transmission*> on_channel(m, nullptr);
    for (const Transmission& tx : transmissions) {
        if (tx.channel < 0 || static_cast<std::size_t>(tx.channel) >= m || tx.user < 0 || tx.user >= num_adaptive)
            throw std::logic_error("resolve_slot: transmission index out of range");
        if (on_channel[tx.channel])
            throw std::logic_error("resolve_slot: two adaptive users on channel " + std::to_string(tx.channel + 1));
        on_channel[tx.channel] = &tx;
    }

    for (std::size_t j = 0; j < m; ++j) {
        ChannelOutcome& c = out.channels[j];
        const Transmission* tx = on_channel[j];
        c.feedback = channel_feedback(uncoop_nonempty[j], tx ? Action::Transmit : Action::NoTransmit);
        if (c.feedback != TernaryFeedback::Success) continue;
        if (tx) {
            c.successful_adaptive_user = tx->user;
            c.dummy = !tx->carries_data;
            if (tx->carries_data) ++out.real_departures[tx->user];
        } else {
            c.uncoop_departed = true;
        }
    }
}

SlotOutcome resolve_slot(const std::vector<bool>& uncoop_nonempty, std::span<const Transmission> transmissions,
                         int num_adaptive) {
    SlotOutcome out;
    resolve_slot(uncoop_nonempty, transmissions, num_adaptive, out);
    return out;
}

double SimMetrics::throughput(int user) const {
    return static_cast<double>(adaptive_departures.at(user)) / static_cast<double>(horizon);
}

double SimMetrics::backlog_growth(int user) const {
    return static_cast<double>(final_adaptive_backlog.at(user)) / static_cast<double>(horizon);
}

double SimMetrics::max_backlog_growth() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < final_adaptive_backlog.size(); ++i)
        worst = std::max(worst, backlog_growth(static_cast<int>(i)));
    return worst;
}

double SimMetrics::uncoop_backlog_growth(int channel) const {
    return static_cast<double>(final_uncoop_backlog.at(channel)) / static_cast<double>(horizon);
}

std::int64_t SimMetrics::total_collisions() const {
    return std::accumulate(collisions.begin(), collisions.end(), std::int64_t{0});
}

std::int64_t SimMetrics::total_dummies() const {
    return std::accumulate(dummy_successes.begin(), dummy_successes.end(), std::int64_t{0});
}

double SimMetrics::collision_fraction() const {
    if (collisions.empty() || horizon == 0) return 0.0;
    return static_cast<double>(total_collisions()) /
           (static_cast<double>(horizon) * static_cast<double>(collisions.size()));
}

namespace {

class ArrivalSource {
public:
    ArrivalSource(double rate, ArrivalModel model, RandomStream rng)
        : rng_(std::move(rng)), trials_(model.max_batch()), per_trial_(rate / model.max_batch()) {}

    int draw() {
        int count = 0;
        for (int k = 0; k < trials_; ++k) count += rng_.bernoulli(per_trial_) ? 1 : 0;
        return count;
    }

private:
    RandomStream rng_;
    int trials_;
    double per_trial_;
};

}  // namespace

SimMetrics run_simulation(const NetworkConfig& config, const SimOptions& options) {
    require_valid(config);
    if (options.horizon < 1) throw std::invalid_argument("run_simulation: horizon must be >= 1");
    if (options.sample_every < 1) throw std::invalid_argument("run_simulation: sample_every must be >= 1");

    const int n = config.num_adaptive();
    const int m = config.num_channels();
    Controller controller(config, options.policy, options.seed, options.gate_probs);

    std::vector<ArrivalSource> adaptive_sources;
    for (int i = 0; i < n; ++i)
        adaptive_sources.emplace_back(config.adaptive_rates[i], config.adaptive_arrival_kind,
                                      RandomStream(options.seed, stream::adaptive_arrivals(i)));
    std::vector<ArrivalSource> uncoop_sources;
    for (int j = 0; j < m; ++j)
        uncoop_sources.emplace_back(config.uncoop_rates[j], ArrivalModel{},
                                    RandomStream(options.seed, stream::uncoop_arrivals(j)));

    SimMetrics metrics;
    metrics.horizon = options.horizon;
    metrics.sample_every = options.sample_every;
    metrics.adaptive_arrivals.assign(n, 0);
    metrics.adaptive_departures.assign(n, 0);
    metrics.uncoop_arrivals.assign(m, 0);
    metrics.uncoop_departures.assign(m, 0);
    metrics.adaptive_successes.assign(m, 0);
    metrics.dummy_successes.assign(m, 0);
    metrics.uncoop_successes.assign(m, 0);
    metrics.collisions.assign(m, 0);
    metrics.idles.assign(m, 0);
    metrics.samples.reserve(static_cast<std::size_t>(options.horizon / options.sample_every + 1));

    std::vector<std::int64_t> adaptive_q(n, 0);
    std::vector<std::int64_t> uncoop_q(m, 0);
    std::vector<TernaryFeedback> last_feedback(m, TernaryFeedback::Idle);
    std::vector<bool> uncoop_nonempty(m, false);
    std::vector<Transmission> transmissions;
    std::vector<std::int64_t> data_left(n, 0);
    SlotOutcome outcome;
    std::int64_t cum_collisions = 0;

    auto check_conservation = [&] {
        for (int i = 0; i < n; ++i)
            if (adaptive_q[i] != metrics.adaptive_arrivals[i] - metrics.adaptive_departures[i])
                throw std::logic_error("queue conservation violated for adaptive user " + std::to_string(i + 1));
        for (int j = 0; j < m; ++j)
            if (uncoop_q[j] != metrics.uncoop_arrivals[j] - metrics.uncoop_departures[j])
                throw std::logic_error("queue conservation violated on channel " + std::to_string(j + 1));
    };

    for (std::int64_t t = 0; t < options.horizon; ++t) {
        for (int i = 0; i < n; ++i) {
            const int a = adaptive_sources[i].draw();
            adaptive_q[i] += a;
            metrics.adaptive_arrivals[i] += a;
        }
        for (int j = 0; j < m; ++j) {
            const int a = uncoop_sources[j].draw();
            uncoop_q[j] += a;
            metrics.uncoop_arrivals[j] += a;
            uncoop_nonempty[j] = uncoop_q[j] > 0;
        }

        const ScheduleAssignment schedule = controller.decide({adaptive_q, last_feedback});

        // A user assigned k channels sends its queued packets on the lowest
        // channels first and dummies on the rest.
        transmissions.clear();
        std::copy(adaptive_q.begin(), adaptive_q.end(), data_left.begin());
        for (int j = 0; j < m; ++j) {
            const auto& user = schedule.user_for_channel[j];
            if (!user) continue;
            const bool data = data_left[*user] > 0;
            if (data) --data_left[*user];
            transmissions.push_back({*user, j, data});
        }

        resolve_slot(uncoop_nonempty, transmissions, n, outcome);

        if (options.observer) {
            SlotTrace trace;
            trace.slot = t;
            trace.adaptive_queues = adaptive_q;
            trace.uncoop_queues = uncoop_q;
            trace.schedule = &schedule;
            trace.transmissions = transmissions;
            trace.outcome = &outcome;
            options.observer(trace);
        }

        for (int j = 0; j < m; ++j) {
            const ChannelOutcome& c = outcome.channels[j];
            switch (c.feedback) {
                case TernaryFeedback::Collision:
                    ++metrics.collisions[j];
                    ++cum_collisions;
                    break;
                case TernaryFeedback::Idle: ++metrics.idles[j]; break;
                case TernaryFeedback::Success:
                    if (c.uncoop_departed) {
                        ++metrics.uncoop_successes[j];
                        ++metrics.uncoop_departures[j];
                        --uncoop_q[j];
                    } else {
                        ++metrics.adaptive_successes[j];
                        if (c.dummy) ++metrics.dummy_successes[j];
                    }
                    break;
            }
            last_feedback[j] = c.feedback;
        }
        for (int i = 0; i < n; ++i) {
            adaptive_q[i] -= outcome.real_departures[i];
            metrics.adaptive_departures[i] += outcome.real_departures[i];
        }

        const std::int64_t done = t + 1;
        if (done % options.sample_every == 0 || done == options.horizon) {
            check_conservation();
            BacklogSample sample;
            sample.slot = done;
            sample.per_user = adaptive_q;
            sample.sum_backlog = std::accumulate(adaptive_q.begin(), adaptive_q.end(), std::int64_t{0});
            sample.cum_collisions = cum_collisions;
            metrics.samples.push_back(std::move(sample));
        }
    }

    metrics.final_adaptive_backlog = adaptive_q;
    metrics.final_uncoop_backlog = uncoop_q;
    return metrics;
}

double estimate_saturated_throughput(double uncoop_rate, double p, std::int64_t horizon, std::uint64_t seed) {
    NetworkConfig config = two_user_network(0.0, uncoop_rate);
    config.horizon = horizon;
    config.seed = seed;
    SimOptions options;
    options.policy = PolicyKind::PiLb;
    options.horizon = horizon;
    options.seed = seed;
    options.sample_every = horizon;
    options.gate_probs = std::vector<double>{p};
    const SimMetrics metrics = run_simulation(config, options);
    return static_cast<double>(metrics.adaptive_successes[0]) / static_cast<double>(horizon);
}

}  // namespace colsched
