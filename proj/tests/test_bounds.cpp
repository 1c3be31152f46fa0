#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cmath>

#include "colsched/bounds.hpp"
#include "oracles.hpp"

using namespace colsched;
using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<150>, boost::multiprecision::et_off>;
using Exact = boost::multiprecision::cpp_rational;

namespace {

std::vector<double> grid(double from, double to, double step) {
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double v = std::round((from + k * step) * 1e12) / 1e12;
        if (v > to + 1e-12) break;
        out.push_back(v);
    }
    return out;
}

// Keeps multiprecision operands out of doctest's expression capture.
template <typename T>
bool same(const T& a, const T& b) {
    return a == b;
}

Exact exact_rate(double lambda) { return Exact(static_cast<long>(std::lround(lambda * 100)), 100); }

}  // namespace

TEST_CASE("lower bound examples") {
    CHECK(lower_bound_throughput(0.2) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(lower_bound_throughput(0.5) == 0.125);
    CHECK(lower_bound_throughput(0.0) == 1.0);
    CHECK(lower_bound_throughput(1.0) == 0.0);
    CHECK(std::abs(lower_bound_throughput(1.0 / 3.0) - 1.0 / 3.0) < 1e-15);
    CHECK_THROWS_AS(lower_bound_throughput(1.1), std::domain_error);
    CHECK_THROWS_AS(lower_bound_throughput(-0.1), std::domain_error);
}

TEST_CASE("both branches give exactly one third at the branch point") {
    const Exact third(1, 3);
    CHECK(same(lower_bound_throughput(third), third));
    CHECK(same(Exact(1) - 2 * third, third));
    CHECK(same(Exact((1 - third) * (1 - third) / (4 * third)), third));
    CHECK(same(optimal_transmit_prob(third), Exact(1)));
}

TEST_CASE("transmit probability examples") {
    CHECK(optimal_transmit_prob(0.2) == 1.0);
    CHECK(optimal_transmit_prob(0.5) == 0.5);
    CHECK(optimal_transmit_prob(1.0) == 0.0);
    CHECK_THROWS_AS(optimal_transmit_prob(2.0), std::domain_error);
}

TEST_CASE("lower bound is strictly decreasing") {
    double prev = lower_bound_throughput(0.0);
    for (double l : grid(0.001, 1.0, 0.001)) {
        const double cur = lower_bound_throughput(l);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("closed form examples") {
    CHECK(v1_closed_form(0.5, 2) == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(v1_closed_form(0.5, 3) == doctest::Approx(-14.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(v1_closed_form(1e-9, 2)) < 1e-8);
    CHECK(std::abs(v1_closed_form(0.5 + 1e-9, 2) + 4.0) < 1e-6);
    CHECK(std::abs(v1_closed_form(0.5 - 1e-9, 2) + 4.0) < 1e-6);
    CHECK(std::abs(v1_closed_form(0.5 + 2e-9, 7) - v1_closed_form(0.5, 7)) < 1e-6);
    CHECK_THROWS_AS(v1_closed_form(0.0, 2), std::domain_error);
    CHECK_THROWS_AS(v1_closed_form(1.0, 2), std::domain_error);
    CHECK_THROWS_AS(v1_closed_form(0.3, 1), std::domain_error);
}

TEST_CASE("Bellman solve examples") {
    const auto v = solve_bellman_linear(0.5, 2);
    REQUIRE(v.size() == 3);
    CHECK(v(0) == 0.0);
    CHECK(v(1) == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(v(2) == doctest::Approx(-6.0).epsilon(1e-14));
    CHECK(std::abs(solve_bellman_linear(1e-9, 5)(1)) < 1e-8);
    for (int y = 2; y <= 40; ++y) CHECK(std::abs(solve_bellman_linear(0.3, y)(1) - v1_closed_form(0.3, y)) < 1e-9);
}

TEST_CASE("shooting oracle agrees exactly with the closed form") {
    for (double l : {0.05, 0.3, 0.5, 0.7, 0.95}) {
        for (int y : {2, 3, 5, 11, 20}) {
            const Exact lam = exact_rate(l);
            const Exact expected = oracle::threshold_v1(lam, y);
            CAPTURE(l);
            CAPTURE(y);
            CHECK(same(v1_closed_form(lam, y), expected));
        }
    }
}

TEST_CASE("closed form matches the Bellman system in extended precision") {
    Wide worst = 0;
    for (double l : grid(0.05, 0.95, 0.05)) {
        const long percent = std::lround(l * 100);
        const Wide lam = Wide(percent) / 100;
        for (int y = 2; y <= 40; ++y) {
            const Wide closed = v1_closed_form(lam, y);
            const Wide linear = solve_bellman_linear(lam, y)(1);
            const Wide exact(oracle::threshold_v1(Exact(percent, 100), y));
            worst = std::max(worst, Wide(abs(closed - linear)));
            CAPTURE(l);
            CAPTURE(y);
            CHECK(static_cast<bool>(abs(closed - exact) <= Wide(1e-30) * std::max(Wide(1), Wide(abs(exact)))));
        }
    }
    CHECK(static_cast<bool>(worst <= Wide(1e-9)));
}

TEST_CASE("double closed form tracks the exact value") {
    for (double l : grid(0.05, 0.95, 0.05)) {
        for (int y = 2; y <= 40; ++y) {
            const double exact = static_cast<double>(oracle::threshold_v1(Exact(std::lround(l * 100), 100), y));
            CAPTURE(l);
            CAPTURE(y);
            CHECK(std::abs(v1_closed_form(l, y) - exact) <= 1e-11 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST_CASE("double Bellman solve matches the closed form while V(1) is moderate") {
    // Beyond |V(1)| ~ 1e6 the system's condition number eats the digits.
    for (double l : grid(0.05, 0.95, 0.05)) {
        for (int y = 2; y <= 40; ++y) {
            const double closed = v1_closed_form(l, y);
            if (std::abs(closed) > 1e6) continue;
            CAPTURE(l);
            CAPTURE(y);
            CHECK(std::abs(closed - solve_bellman_linear(l, y)(1)) <= 1e-9 * std::max(1.0, std::abs(closed)));
        }
    }
}

TEST_CASE("V(1) is unimodal in the threshold") {
    for (double l : grid(0.05, 0.95, 0.05)) {
        const Wide lam = Wide(static_cast<long>(std::lround(l * 100))) / 100;
        std::vector<Wide> v;
        for (int y = 2; y <= 60; ++y) v.push_back(v1_closed_form(lam, y));
        int maxima = 0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            const bool left = k == 0 || v[k] > v[k - 1];
            const bool right = k + 1 == v.size() || v[k] > v[k + 1];
            if (left && right) ++maxima;
        }
        CAPTURE(l);
        CHECK(maxima == 1);
    }
}

TEST_CASE("sigma star examples") {
    const SigmaStar s = sigma_star(0.5);
    CHECK(s.sigma == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(s.y_star == 2);
    CHECK(std::abs(sigma_star(1e-4, 100000).sigma) < 3e-4);
    CHECK_THROWS_AS(sigma_star(1e-6), SearchCapError);
    for (double l : grid(0.05, 0.95, 0.05)) {
        const SigmaStar best = sigma_star(l);
        CHECK(best.sigma <= 0.0);
        CHECK(best.sigma >= v1_closed_form(l, best.y_star + 1) - 1e-12 * std::abs(best.sigma));
        if (best.y_star > 2) CHECK(best.sigma >= v1_closed_form(l, best.y_star - 1) - 1e-12 * std::abs(best.sigma));
    }
    CHECK_THROWS_AS(sigma_star(0.5, 2), std::domain_error);
    CHECK_THROWS_AS(sigma_star(0.05, 3), SearchCapError);
}

TEST_CASE("upper bound examples and ordering") {
    CHECK(std::abs(upper_bound_throughput(0.5) - 0.2) < 1e-12);
    CHECK(upper_bound_throughput(0.0) == 1.0);
    CHECK(upper_bound_throughput(1.0) == 0.0);
    for (double l : grid(0.01, 0.99, 0.01)) {
        const BoundsResult r = compute_bounds(Rate(l));
        CAPTURE(l);
        CHECK(r.mu_lb <= r.mu_ub);
        CHECK(r.mu_ub <= 1.0 - l + 1e-12);
        CHECK(r.mu_ub == doctest::Approx(1.0 / (1.0 - r.sigma_star)).epsilon(1e-12));
        CHECK(r.y_star.has_value());
    }
    const BoundsResult zero = compute_bounds(Rate(0.0));
    CHECK(zero.mu_lb == 1.0);
    CHECK(zero.mu_ub == 1.0);
    CHECK_FALSE(zero.y_star.has_value());
    const BoundsResult one = compute_bounds(Rate(1.0));
    CHECK(one.mu_ub == 0.0);
    CHECK(std::isinf(one.sigma_star));
}

TEST_CASE("steady state of the back-off policy reproduces the lower bound") {
    for (double l : grid(0.05, 0.95, 0.05)) {
        const SteadyState s = pi_lb_steady_state(l, optimal_transmit_prob(l), 500);
        CAPTURE(l);
        CHECK(std::abs(s.throughput - lower_bound_throughput(l)) <= 1e-6);
        CHECK(s.tail_mass < 1e-8);
        CHECK_FALSE(s.tail_warning);
        CHECK(std::isfinite(s.expected_backlog));
    }
    CHECK(std::abs(pi_lb_steady_state(0.2, 1.0, 400).throughput - 0.6) < 1e-6);
    const SteadyState half = pi_lb_steady_state(0.5, 0.5, 500);
    CHECK(std::abs(half.throughput - 0.125) < 1e-6);
    CHECK(half.tail_mass < 1e-8);
    CHECK(pi_lb_steady_state(0.4, 0.0, 100).throughput == 0.0);
    CHECK_THROWS_AS(pi_lb_steady_state(0.4, 0.5, 5), std::domain_error);
}

TEST_CASE("decision model rows are distributions") {
    for (double l : grid(0.05, 0.95, 0.05)) {
        const SspModel model(l, 60);
        for (int x = 1; x <= 50; ++x) {
            for (Action a : {Action::Transmit, Action::NoTransmit}) {
                const Eigen::VectorXd row = model.transition_row(x, a);
                CHECK(std::abs(row.sum() - 1.0) <= 1e-12);
                CHECK(row.minCoeff() >= 0.0);
            }
        }
        const Eigen::VectorXd absorbing = model.transition_row(0, Action::Transmit);
        CHECK(absorbing(0) == 1.0);
        CHECK(model.expected_reward(0, Action::Transmit) == 0.0);
    }
}

TEST_CASE("value iteration agrees with the threshold search") {
    for (double l : grid(0.1, 0.9, 0.1)) {
        const ValueIterationResult vi = value_iteration_oracle(l, 200, 1e-10);
        const double sigma = sigma_star(l).sigma;
        CAPTURE(l);
        CHECK(std::abs(vi.sigma - sigma) <= 1e-3 * std::abs(sigma));
    }
    CHECK_THROWS_AS(value_iteration_oracle(0.5, 10), std::domain_error);
}
