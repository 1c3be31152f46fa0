#include "colsched/bounds.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <vector>

namespace colsched {

namespace {

// Below this rate the threshold search runs on the rearrangement
//   V(1) = -2l/(1-2l) + delta(Y),
//   delta(Y) = l^(Y-1) (2 - 2l - (1-l)^(1-Y)) / ((l^(Y-1) - 1)(1 - 2l)),
// which is algebraically the same value. For small l, V(1) sits within an ulp
// of its Y -> infinity limit, so comparing V(1) directly in double only sees
// rounding noise; delta(Y) is kept in sign/log form and never cancels.
constexpr double kStableSearchLimit = 0.4;

struct SignedLog {
    int sign = 0;  // -1, 0, +1
    double log_abs = -std::numeric_limits<double>::infinity();

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

bool operator<(const SignedLog& a, const SignedLog& b) {
    if (a.sign != b.sign) return a.sign < b.sign;
    if (a.sign == 0) return false;
    return a.sign > 0 ? a.log_abs < b.log_abs : a.log_abs > b.log_abs;
}

SignedLog threshold_excess(double lambda, int y) {
    const double c = 2.0 - 2.0 * lambda;
    const double e = -(y - 1) * std::log1p(-lambda);  // log (1-l)^(1-Y) >= 0

    int b_sign = 0;
    double b_log = 0.0;
    if (e < 700.0) {
        const double b = c - std::exp(e);
        if (b == 0.0) return {};
        b_sign = b > 0.0 ? 1 : -1;
        b_log = std::log(std::abs(b));
    } else {
        b_sign = -1;
        b_log = e + std::log1p(-c * std::exp(-e));
    }

    const double log_a = (y - 1) * std::log(lambda);
    const double a = std::exp(log_a);
    SignedLog delta;
    delta.sign = -b_sign;  // (a - 1) < 0 and (1 - 2l) > 0
    delta.log_abs = log_a + b_log - std::log1p(-a) - std::log1p(-2.0 * lambda);
    return delta;
}

struct SearchOutcome {
    SigmaStar best;
    double excess = 0.0;  // delta(Y*) when the stable search was used
};

SearchOutcome search_sigma(double lambda, int y_cap) {
    detail::require_open_unit_interval(lambda, "sigma_star");
    if (y_cap < 3) throw std::domain_error("sigma_star: y_cap must be >= 3");

    if (lambda < kStableSearchLimit) {
        SignedLog prev = threshold_excess(lambda, 2);
        for (int y = 3; y <= y_cap; ++y) {
            const SignedLog cur = threshold_excess(lambda, y);
            if (cur < prev) {
                const double excess = prev.value();
                const double always_transmit = -2.0 * lambda / (1.0 - 2.0 * lambda);
                return {{always_transmit + excess, y - 1}, excess};
            }
            prev = cur;
        }
    } else {
        double prev = v1_closed_form(lambda, 2);
        for (int y = 3; y <= y_cap; ++y) {
            const double cur = v1_closed_form(lambda, y);
            if (cur < prev) return {{prev, y - 1}, 0.0};
            prev = cur;
        }
    }
    throw SearchCapError("sigma_star: no decrease in V(1) up to Y = " + std::to_string(y_cap) +
                         " at lambda = " + std::to_string(lambda));
}

}  // namespace

SigmaStar sigma_star(double lambda, int y_cap) { return search_sigma(lambda, y_cap).best; }

double upper_bound_throughput(double lambda, int y_cap) {
    detail::require_unit_interval(lambda, "upper_bound_throughput");
    if (lambda == 0.0) return 1.0;
    if (lambda == 1.0) return 0.0;
    const SearchOutcome found = search_sigma(lambda, y_cap);
    if (lambda < kStableSearchLimit) {
        // 1/(1 - sigma*) with sigma* = -2l/(1-2l) + delta, rearranged so that
        // delta >= 0 can never round the result below 1 - 2l.
        const double base = 1.0 - 2.0 * lambda;
        return base / (1.0 - found.excess * base);
    }
    return 1.0 / (1.0 - found.best.sigma);
}

BoundsResult compute_bounds(Rate rate, int y_cap) {
    const double lambda = rate.value();
    BoundsResult result;
    result.lambda = lambda;
    result.mu_lb = lower_bound_throughput(lambda);
    result.p_star = optimal_transmit_prob(lambda);
    if (lambda == 0.0) {
        result.sigma_star = 0.0;
        result.mu_ub = 1.0;
    } else if (lambda == 1.0) {
        result.sigma_star = -std::numeric_limits<double>::infinity();
        result.mu_ub = 0.0;
    } else {
        const SigmaStar s = sigma_star(lambda, y_cap);
        result.sigma_star = s.sigma;
        result.y_star = s.y_star;
        result.mu_ub = upper_bound_throughput(lambda, y_cap);
    }
    return result;
}

SteadyState pi_lb_steady_state(double lambda, double p, int truncation, double tail_tolerance) {
    detail::require_open_unit_interval(lambda, "pi_lb_steady_state");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("pi_lb_steady_state: p outside [0,1]");
    if (truncation < 10) throw std::domain_error("pi_lb_steady_state: truncation must be >= 10");

    // State index 2q + b: q = uncooperative backlog after this slot's arrival,
    // b = 1 when the previous slot ended in a collision.
    const int n = 2 * (truncation + 1);
    auto index = [](int q, int backing_off) { return 2 * q + backing_off; };

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(n) * 6);
    auto add_transition = [&](int from, int q_after_service, int backing_off, double weight) {
        if (weight == 0.0) return;
        const int q_arrival = std::min(q_after_service + 1, truncation);
        // Row `to` of (P^T - I); row 0 is replaced by the normalization below.
        const int to_with = index(q_arrival, backing_off);
        const int to_without = index(q_after_service, backing_off);
        if (to_with != 0) entries.emplace_back(to_with, from, weight * lambda);
        if (to_without != 0) entries.emplace_back(to_without, from, weight * (1.0 - lambda));
    };

    for (int q = 0; q <= truncation; ++q) {
        for (int b = 0; b <= 1; ++b) {
            const int from = index(q, b);
            if (from != 0) entries.emplace_back(from, from, -1.0);
            const double transmit = b ? 0.0 : p;
            const double silent = 1.0 - transmit;
            if (q > 0) {
                add_transition(from, q, 1, transmit);     // collision, back off next slot
                add_transition(from, q - 1, 0, silent);  // uncooperative packet departs
            } else {
                add_transition(from, 0, 0, transmit + silent);  // success or idle
            }
        }
    }
    for (int s = 0; s < n; ++s) entries.emplace_back(0, s, 1.0);

    Eigen::SparseMatrix<double> system(n, n);
    system.setFromTriplets(entries.begin(), entries.end());
    system.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success) throw SingularSystemError("stationary system factorization failed");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(0) = 1.0;
    const Eigen::VectorXd pi = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !pi.allFinite())
        throw SingularSystemError("stationary system solve failed");

    SteadyState out;
    out.throughput = pi(index(0, 0)) * p;
    for (int q = 0; q <= truncation; ++q) out.expected_backlog += q * (pi(index(q, 0)) + pi(index(q, 1)));
    out.tail_mass = pi(index(truncation, 0)) + pi(index(truncation, 1));
    out.tail_warning = out.tail_mass > tail_tolerance;
    return out;
}

SspModel::SspModel(double lambda, int x_max) : lambda_(lambda), x_max_(x_max) {
    detail::require_open_unit_interval(lambda, "SspModel");
    if (x_max < 2) throw std::domain_error("SspModel: x_max must be >= 2");
    const int n = x_max + 1;
    const double idle = 1.0 - lambda;
    transmit_ = Eigen::MatrixXd::Zero(n, n);
    silent_ = Eigen::MatrixXd::Zero(n, n);
    transmit_reward_ = Eigen::VectorXd::Zero(n);
    silent_reward_ = Eigen::VectorXd::Zero(n);
    transmit_(0, 0) = 1.0;
    silent_(0, 0) = 1.0;

    for (int x = 1; x <= x_max; ++x) {
        const double clear = std::pow(idle, x);
        transmit_(x, 0) = clear;
        for (int y = 2; y <= x + 1; ++y)
            transmit_(x, std::min(y, x_max)) += lambda * std::pow(idle, x + 1 - y);
        transmit_reward_(x) = -2.0 * (1.0 - clear);

        silent_(x, 1) = std::pow(idle, x - 1);
        for (int y = 2; y <= x; ++y) silent_(x, y) += lambda * std::pow(idle, x - y);
        silent_reward_(x) = -1.0;
    }
}

Eigen::VectorXd SspModel::transition_row(int x, Action action) const {
    const auto& kernel = action == Action::Transmit ? transmit_ : silent_;
    return kernel.row(x).transpose();
}

double SspModel::expected_reward(int x, Action action) const {
    return action == Action::Transmit ? transmit_reward_(x) : silent_reward_(x);
}

namespace {

ValueIterationResult iterate_values(const SspModel& model, double tol, long max_sweeps) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(model.x_max() + 1);
    for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
        Eigen::VectorXd next = (model.transmit_reward() + model.transmit_kernel() * v)
                                   .cwiseMax(model.silent_reward() + model.silent_kernel() * v);
        next(0) = 0.0;
        const double change = (next - v).cwiseAbs().maxCoeff();
        v.swap(next);
        if (change < tol) return {v(1), model.x_max(), sweep};
    }
    throw std::runtime_error("value_iteration_oracle: sweep limit reached before convergence");
}

}  // namespace

ValueIterationResult value_iteration_oracle(double lambda, int x_max, double tol, long max_sweeps,
                                            int max_doublings) {
    detail::require_open_unit_interval(lambda, "value_iteration_oracle");
    if (x_max < 50) throw std::domain_error("value_iteration_oracle: x_max must be >= 50");

    ValueIterationResult result = iterate_values(SspModel(lambda, x_max), tol, max_sweeps);
    for (int d = 0; d < max_doublings; ++d) {
        ValueIterationResult wider = iterate_values(SspModel(lambda, 2 * result.x_max_used), tol, max_sweeps);
        const bool settled = std::abs(wider.sigma - result.sigma) <= tol;
        result = wider;
        if (settled) break;
    }
    return result;
}

}  // namespace colsched
