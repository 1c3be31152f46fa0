#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "colsched/assignment.hpp"
#include "colsched/io.hpp"
#include "oracles.hpp"

using namespace colsched;

namespace {

SetCoverInstance small_instance(int budget) { return {2, {{0}, {1}, {0, 1}}, budget}; }

SetCoverInstance random_instance(std::mt19937_64& gen) {
    SetCoverInstance inst;
    inst.num_elements = 1 + static_cast<int>(gen() % 6);
    const int num_subsets = 1 + static_cast<int>(gen() % 6);
    for (int s = 0; s < num_subsets; ++s) {
        std::vector<int> subset;
        for (int e = 0; e < inst.num_elements; ++e)
            if (gen() % 3 == 0) subset.push_back(e);
        inst.subsets.push_back(subset);
    }
    // Make the union cover every element.
    for (int e = 0; e < inst.num_elements; ++e) {
        bool covered = false;
        for (const auto& s : inst.subsets) covered = covered || std::find(s.begin(), s.end(), e) != s.end();
        if (!covered) inst.subsets[gen() % inst.subsets.size()].push_back(e);
    }
    inst.budget = static_cast<int>(gen() % (inst.subsets.size() + 1));
    return inst;
}

void check_valid_map(const AssignmentProblem& problem, const AssignmentResult& r) {
    if (r.channel_of_user.empty()) return;
    REQUIRE(r.channel_of_user.size() == problem.users.size());
    std::set<int> used;
    for (std::size_t k = 0; k < problem.users.size(); ++k) {
        const int ch = r.channel_of_user[k];
        const auto& cands = problem.users[k].candidates;
        CHECK(std::find(cands.begin(), cands.end(), ch) != cands.end());
        CHECK(used.insert(ch).second);
    }
}

}  // namespace

TEST_CASE("reduction of a small instance") {
    const AssignmentProblem p = reduce_set_cover(small_instance(1));
    CHECK(p.base.num_adaptive() == 2);
    CHECK(p.base.num_channels() == 3);
    CHECK(p.base.adaptive_rates == std::vector<double>{0.5, 0.5});
    CHECK(p.base.topology.access_sets == std::vector<std::vector<int>>{{0, 2}, {1, 2}});
    REQUIRE(p.users.size() == 3);
    CHECK(p.users[0].rate == 1.0);
    CHECK(p.users[1].rate == 1.0);
    CHECK(p.users[2].rate == 0.0);
    CHECK(p.users[2].candidates == std::vector<int>{0, 1, 2});
}

TEST_CASE("exact solver examples") {
    const AssignmentProblem yes = reduce_set_cover(small_instance(1));
    const AssignmentResult r = solve_exact(yes);
    CHECK(r.feasible);
    CHECK(r.channel_of_user[2] == 2);
    REQUIRE(r.verdict.has_value());
    CHECK(r.verdict->feasible);

    CHECK_FALSE(solve_exact(reduce_set_cover(small_instance(0))).feasible);
    CHECK(solve_exact(reduce_set_cover(small_instance(3))).feasible);
    CHECK_FALSE(solve_exact(reduce_set_cover({2, {{0}, {1}}, 1})).feasible);

    AssignmentProblem idle = yes;
    idle.base.adaptive_rates = {0.0, 0.0};
    ExactOptions all;
    all.count_all = true;
    CHECK(solve_exact(idle, all).feasible_count == 6);
}

TEST_CASE("greedy examples") {
    const AssignmentProblem yes = reduce_set_cover(small_instance(1));
    const AssignmentResult g = solve_greedy(yes);
    CHECK(g.feasible);
    CHECK(g.channel_of_user == std::vector<int>{0, 1, 2});

    AssignmentProblem symmetric;
    symmetric.base = four_user_two_channel_network(0.1);
    symmetric.base.topology.access_sets = {{0, 1}, {0, 1}, {0, 1}, {0, 1}};
    symmetric.users = {{0.3, {0, 1}}};
    CHECK(solve_greedy(symmetric).channel_of_user == std::vector<int>{0});
}

TEST_CASE("reduction agrees with exhaustive set cover") {
    std::mt19937_64 gen(31337);
    for (int trial = 0; trial < 60; ++trial) {
        const SetCoverInstance inst = random_instance(gen);
        const AssignmentProblem p = reduce_set_cover(inst);
        const AssignmentResult exact = solve_exact(p);
        CAPTURE(trial);
        CHECK(exact.feasible == oracle::brute_set_cover(inst.num_elements, inst.subsets, inst.budget));
        check_valid_map(p, exact);

        ExactOptions unpruned;
        unpruned.prune = false;
        unpruned.count_all = true;
        ExactOptions pruned = unpruned;
        pruned.prune = true;
        const AssignmentResult a = solve_exact(p, unpruned), b = solve_exact(p, pruned);
        CHECK(a.feasible == exact.feasible);
        CHECK(a.feasible_count == b.feasible_count);
        CHECK(b.nodes_explored <= a.nodes_explored);

        const AssignmentResult g = solve_greedy(p);
        check_valid_map(p, g);
        if (g.feasible) {
            CHECK(exact.feasible);
            CHECK(check_sufficient(apply_assignment(p, g.channel_of_user)).feasible);
        }
    }
}

TEST_CASE("random placement problems: pruned and unpruned search agree") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 60; ++trial) {
        AssignmentProblem p;
        p.base = oracle::random_network(gen, 4, 5);
        const int m = p.base.num_channels();
        const int users = static_cast<int>(gen() % static_cast<unsigned>(m + 1));
        for (int k = 0; k < users; ++k) {
            UncoopUser u;
            u.rate = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
            for (int j = 0; j < m; ++j)
                if (gen() % 2) u.candidates.push_back(j);
            if (u.candidates.empty()) u.candidates.push_back(static_cast<int>(gen() % static_cast<unsigned>(m)));
            p.users.push_back(u);
        }
        ExactOptions o;
        o.count_all = true;
        const AssignmentResult pruned = solve_exact(p, o);
        o.prune = false;
        const AssignmentResult full = solve_exact(p, o);
        CHECK(pruned.feasible == full.feasible);
        CHECK(pruned.feasible_count == full.feasible_count);
        check_valid_map(p, pruned);
        if (pruned.feasible) CHECK(pruned.verdict->feasible);
    }
}

TEST_CASE("problem validation and size guard") {
    AssignmentProblem p = reduce_set_cover(small_instance(1));
    p.users.push_back({0.5, {0}});
    CHECK_FALSE(validate_problem(p).empty());
    CHECK_THROWS_AS(solve_exact(p), ConfigError);

    AssignmentProblem q = reduce_set_cover(small_instance(1));
    q.users[0].candidates.clear();
    CHECK_FALSE(validate_problem(q).empty());

    CHECK_THROWS_AS(reduce_set_cover({2, {{0}, {1}}, 3}), ConfigError);
    CHECK_THROWS_AS(reduce_set_cover({2, {{0}}, 1}), ConfigError);

    SetCoverInstance wide;
    wide.num_elements = 1;
    wide.subsets.assign(20, {0});
    wide.budget = 1;
    const AssignmentProblem big = reduce_set_cover(wide);
    CHECK_THROWS_AS(solve_exact(big), SizeGuardError);
}

TEST_CASE("problem documents round-trip") {
    const AssignmentProblem p = reduce_set_cover(small_instance(1));
    CHECK(parse_problem(problem_to_json(p).dump()) == p);
    CHECK(parse_problem(set_cover_to_json(small_instance(1)).dump()) == p);
    CHECK(set_cover_from_json(set_cover_to_json(small_instance(2))) == small_instance(2));
}
