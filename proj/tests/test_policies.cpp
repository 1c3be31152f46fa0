#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <random>

#include "colsched/bounds.hpp"
#include "colsched/policies.hpp"
#include "oracles.hpp"

using namespace colsched;

namespace {

NetworkTopology two_users_one_channel() { return {2, 1, {{0}, {0}}}; }
NetworkTopology two_users_two_channels() { return {2, 2, {{0, 1}, {0, 1}}}; }

void check_topology(const ScheduleAssignment& s, const NetworkTopology& topo, const std::vector<bool>& open) {
    for (int j = 0; j < s.num_channels(); ++j) {
        if (!s.user_for_channel[j]) continue;
        CHECK(open[j]);
        CHECK(topo.can_access(*s.user_for_channel[j], j));
    }
}

}  // namespace

TEST_CASE("gate examples") {
    RandomStream rng(3);
    CHECK(gate_decide({1.0, false}, TernaryFeedback::Success, rng).action == Action::Transmit);
    for (int k = 0; k < 100; ++k) {
        const GateDecision d = gate_decide({0.5, false}, TernaryFeedback::Collision, rng);
        CHECK(d.action == Action::NoTransmit);
        CHECK(d.state.backing_off);
    }
    CHECK(gate_decide({0.0, false}, TernaryFeedback::Idle, rng).action == Action::NoTransmit);
    CHECK_FALSE(gate_decide({0.5, true}, TernaryFeedback::Idle, rng).state.backing_off);
}

TEST_CASE("gate never transmits right after a collision and otherwise transmits at rate p") {
    RandomStream rng(11), trace(12);
    const TernaryFeedback outcomes[] = {TernaryFeedback::Success, TernaryFeedback::Collision, TernaryFeedback::Idle};
    ChannelGateState state{0.3, false};
    int eligible = 0, sent = 0;
    for (int t = 0; t < 200'000; ++t) {
        const TernaryFeedback last = outcomes[static_cast<int>(trace.uniform() * 3)];
        const GateDecision d = gate_decide(state, last, rng);
        if (last == TernaryFeedback::Collision) {
            REQUIRE(d.action == Action::NoTransmit);
        } else {
            ++eligible;
            sent += d.action == Action::Transmit;
        }
        state = d.state;
    }
    CHECK(std::abs(static_cast<double>(sent) / eligible - 0.3) < 0.01);
}

TEST_CASE("rho examples") {
    const NetworkConfig net = four_user_two_channel_network(0.25);
    const auto rho = compute_rho(net);
    REQUIRE(rho.has_value());
    for (int i = 0; i < 4; ++i) CHECK(rho->row(i).sum() >= 0.25 - 1e-12);
    for (int j = 0; j < 2; ++j) CHECK(rho->col(j).sum() <= 0.6 + 1e-12);
    CHECK((*rho)(3, 0) == 0.0);

    const double mu = lower_bound_throughput(0.2);
    const auto single = compute_rho(two_user_network(mu, 0.2));
    REQUIRE(single.has_value());
    CHECK(std::abs((*single)(0, 0) - mu) < 1e-12);
    CHECK_FALSE(compute_rho(two_user_network(mu + 0.01, 0.2)).has_value());
}

TEST_CASE("randomized scheduler examples") {
    RandomStream rng(5);
    SUBCASE("single eligible user") {
        RhoMatrix rho(2, 1);
        rho << 0.4, 0.0;
        for (int k = 0; k < 1000; ++k)
            CHECK(schedule_randomized(rho, two_users_one_channel(), {true}, rng).user_for_channel[0] == 0);
    }
    SUBCASE("equal shares") {
        RhoMatrix rho(2, 1);
        rho << 0.3, 0.3;
        int first = 0;
        const int draws = 100'000;
        for (int k = 0; k < draws; ++k)
            first += schedule_randomized(rho, two_users_one_channel(), {true}, rng).user_for_channel[0] == 0;
        CHECK(std::abs(static_cast<double>(first) / draws - 0.5) < 0.01);
    }
    SUBCASE("zero column and closed gate stay idle") {
        RhoMatrix rho(2, 2);
        rho << 0.0, 0.2, 0.0, 0.1;
        const ScheduleAssignment s = schedule_randomized(rho, two_users_two_channels(), {true, false}, rng);
        CHECK_FALSE(s.user_for_channel[0].has_value());
        CHECK_FALSE(s.user_for_channel[1].has_value());
    }
}

TEST_CASE("randomized scheduler frequencies follow rho (chi-square)") {
    const NetworkTopology topo{3, 1, {{0}, {0}, {0}}};
    RhoMatrix rho(3, 1);
    rho << 0.1, 0.3, 0.2;
    RandomStream rng(21);
    const int draws = 100'000;
    std::vector<int> counts(3, 0);
    for (int k = 0; k < draws; ++k) ++counts[*schedule_randomized(rho, topo, {true}, rng).user_for_channel[0]];
    double chi2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double expected = draws * rho(i, 0) / 0.6;
        chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    const double critical = boost::math::quantile(boost::math::chi_squared(2), 0.999);
    CHECK(chi2 < critical);
}

TEST_CASE("LQF examples") {
    const NetworkTopology topo = two_users_one_channel();
    CHECK(schedule_lqf(std::vector<std::int64_t>{5, 3}, topo, {true}).user_for_channel[0] == 0);
    CHECK(schedule_lqf(std::vector<std::int64_t>{3, 5}, topo, {true}).user_for_channel[0] == 1);
    CHECK(schedule_lqf(std::vector<std::int64_t>{4, 4}, topo, {true}).user_for_channel[0] == 0);
    CHECK_FALSE(schedule_lqf(std::vector<std::int64_t>{4, 4}, topo, {false}).user_for_channel[0].has_value());

    const NetworkConfig net = four_user_two_channel_network(0.1);
    const ScheduleAssignment s = schedule_lqf(std::vector<std::int64_t>{0, 0, 0, 7}, net.topology, {true, true});
    CHECK(s.user_for_channel[0] == 0);
    CHECK(s.user_for_channel[1] == 3);
}

TEST_CASE("priority examples") {
    const NetworkTopology topo = two_users_two_channels();
    ScheduleAssignment s = schedule_priority(std::vector<std::int64_t>{2, 9}, topo, {true, true});
    CHECK(s.user_for_channel[0] == 0);
    CHECK(s.user_for_channel[1] == 0);
    s = schedule_priority(std::vector<std::int64_t>{0, 9}, topo, {true, true});
    CHECK(s.user_for_channel[0] == 1);
    s = schedule_priority(std::vector<std::int64_t>{1, 9}, topo, {true, true});
    CHECK(s.user_for_channel[0] == 0);
    CHECK(s.user_for_channel[1] == 1);
    s = schedule_priority(std::vector<std::int64_t>{0, 0}, topo, {true, true});
    CHECK_FALSE(s.user_for_channel[0].has_value());
}

TEST_CASE("schedulers respect topology and LQF picks a largest eligible backlog") {
    std::mt19937_64 gen(99);
    RandomStream rng(4);
    for (int trial = 0; trial < 500; ++trial) {
        const NetworkConfig net = oracle::random_network(gen, 6, 4);
        const auto& topo = net.topology;
        std::vector<std::int64_t> q;
        for (int i = 0; i < topo.num_adaptive; ++i) q.push_back(static_cast<std::int64_t>(gen() % 6));
        std::vector<bool> open;
        for (int j = 0; j < topo.num_channels; ++j) open.push_back(gen() % 3 != 0);

        const ScheduleAssignment lqf = schedule_lqf(q, topo, open);
        check_topology(lqf, topo, open);
        for (int j = 0; j < topo.num_channels; ++j) {
            if (!open[j] || topo.eligible_users(j).empty()) {
                CHECK_FALSE(lqf.user_for_channel[j].has_value());
                continue;
            }
            REQUIRE(lqf.user_for_channel[j].has_value());
            for (int i : topo.eligible_users(j)) CHECK(q[*lqf.user_for_channel[j]] >= q[i]);
        }
        check_topology(schedule_priority(q, topo, open), topo, open);
        check_topology(schedule_first_eligible(topo, open), topo, open);
        const auto rho = check_sufficient(net).rho;
        check_topology(schedule_randomized(rho, topo, open, rng), topo, open);
    }
}

TEST_CASE("policy names") {
    for (PolicyKind k : {PolicyKind::PiLb, PolicyKind::Randomized, PolicyKind::Lqf, PolicyKind::Priority})
        CHECK(parse_policy(to_string(k)) == k);
    CHECK_FALSE(parse_policy("maxweight").has_value());
}

TEST_CASE("controller gates default to the optimal transmit probability") {
    NetworkConfig net = four_user_two_channel_network(0.1, 0.5);
    const Controller c(net, PolicyKind::Lqf, 1);
    for (const ChannelGateState& g : c.gates()) CHECK(g.transmit_prob == optimal_transmit_prob(0.5));
    const Controller low(four_user_two_channel_network(0.1, 0.2), PolicyKind::Lqf, 1);
    for (const ChannelGateState& g : low.gates()) CHECK(g.transmit_prob == 1.0);
}
