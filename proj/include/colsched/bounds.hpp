#pragma once

// Throughput bounds for one adaptive user sharing a collision channel with an
// uncooperative user of arrival rate lambda.
//
// The closed forms and the Bellman solver are templated on the scalar type so
// they can be evaluated in double, in extended precision, or exactly over the
// rationals. Everything else works in double.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <type_traits>
#include <optional>
#include <stdexcept>
#include <string>

#include "colsched/core.hpp"

namespace colsched {

class SingularSystemError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class SearchCapError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

template <typename Scalar>
void require_unit_interval(const Scalar& lambda, const char* what) {
    if (lambda < Scalar(0) || lambda > Scalar(1))
        throw std::domain_error(std::string(what) + ": lambda outside [0,1]");
}

template <typename Scalar>
void require_open_unit_interval(const Scalar& lambda, const char* what) {
    if (!(lambda > Scalar(0) && lambda < Scalar(1)))
        throw std::domain_error(std::string(what) + ": lambda outside (0,1)");
}

template <typename Scalar>
Scalar ipow(Scalar base, int exponent) {
    Scalar result(1);
    while (exponent > 0) {
        if (exponent & 1) result *= base;
        base *= base;
        exponent >>= 1;
    }
    return result;
}

}  // namespace detail

/// Throughput of the back-off-after-collision randomized policy at its best
/// transmit probability: 1-2l for l <= 1/3, (1-l)^2/(4l) above.
template <typename Scalar>
Scalar lower_bound_throughput(const Scalar& lambda) {
    detail::require_unit_interval(lambda, "lower_bound_throughput");
    if (lambda <= Scalar(1) / Scalar(3)) return Scalar(1) - Scalar(2) * lambda;
    const Scalar idle = Scalar(1) - lambda;
    return idle * idle / (Scalar(4) * lambda);
}

/// Transmit probability attaining lower_bound_throughput.
template <typename Scalar>
Scalar optimal_transmit_prob(const Scalar& lambda) {
    detail::require_unit_interval(lambda, "optimal_transmit_prob");
    if (lambda <= Scalar(1) / Scalar(3)) return Scalar(1);
    return (Scalar(1) - lambda) / (Scalar(2) * lambda);
}

/// Distance from 1/2 below which the lambda == 1/2 form of V(1) is used.
inline constexpr double kHalfBranchThreshold = 1e-9;

/// Cost-to-go V(1) of the threshold policy that transmits in states
/// 1..Y-1 and stays silent in state Y.
template <typename Scalar>
Scalar v1_closed_form(const Scalar& lambda, int y) {
    detail::require_open_unit_interval(lambda, "v1_closed_form");
    if (y < 2) throw std::domain_error("v1_closed_form: Y must be >= 2");
    using std::abs;
    const Scalar half = Scalar(1) / Scalar(2);
    if (abs(lambda - half) < Scalar(kHalfBranchThreshold)) {
        const Scalar h = detail::ipow(half, y - 1);
        return (h + Scalar(y) - Scalar(3) / Scalar(2)) / (h * half - half);
    }
    const Scalar idle = Scalar(1) - lambda;
    const Scalar lam_pow = detail::ipow(lambda, y - 1);
    const Scalar idle_pow = detail::ipow(idle, y - 1);
    const Scalar numerator = (Scalar(2) - Scalar(4) * lambda) * lam_pow * idle_pow +
                             Scalar(2) * lambda * idle_pow - lam_pow;
    const Scalar denominator = (Scalar(1) - Scalar(2) * lambda) * (lam_pow - Scalar(1)) * idle_pow;
    return numerator / denominator;
}

template <typename Scalar>
using BellmanVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Solves the (Y+1)-state Bellman system of the threshold-Y policy
/// directly. Entry x of the result is V(x); V(0) = 0.
template <typename Scalar>
BellmanVector<Scalar> solve_bellman_linear(const Scalar& lambda, int y) {
    detail::require_open_unit_interval(lambda, "solve_bellman_linear");
    if (y < 2) throw std::domain_error("solve_bellman_linear: Y must be >= 2");

    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index n = y + 1;
    Matrix a = Matrix::Zero(n, n);
    BellmanVector<Scalar> b = BellmanVector<Scalar>::Zero(n);
    const Scalar idle = Scalar(1) - lambda;

    a(0, 0) = Scalar(1);
    // Transmitting states: collisions cost two slots and move to y+1.
    for (int x = 1; x < y; ++x) {
        a(x, x) += Scalar(1);
        for (int k = 1; k <= x; ++k) {
            const Scalar w = lambda * detail::ipow(idle, x - k);
            a(x, k + 1) -= w;
            b(x) -= Scalar(2) * w;
        }
    }
    // Silent state Y.
    a(y, y) += Scalar(1);
    const Scalar back_to_one = detail::ipow(idle, y);
    a(y, 1) -= back_to_one;
    b(y) -= back_to_one;
    for (int k = 1; k <= y; ++k) {
        const Scalar w = lambda * detail::ipow(idle, y - k);
        a(y, k) -= w;
        b(y) -= w;
    }

    Eigen::PartialPivLU<Matrix> lu(a);
    if constexpr (std::is_floating_point_v<Scalar>) {
        if (!(lu.rcond() > Eigen::NumTraits<Scalar>::epsilon()))
            throw SingularSystemError("Bellman system is singular to working precision");
    } else {
        // Extended or exact scalars: reject a vanishing pivot relative to the largest.
        using std::abs;
        const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
        if (!(pivots.minCoeff() > Eigen::NumTraits<Scalar>::epsilon() * pivots.maxCoeff()))
            throw SingularSystemError("Bellman system is singular to working precision");
    }
    BellmanVector<Scalar> v = lu.solve(b);
    if constexpr (std::numeric_limits<Scalar>::has_infinity) {
        using std::isfinite;
        for (Eigen::Index i = 0; i < n; ++i)
            if (!isfinite(v(i))) throw SingularSystemError("Bellman solve produced a non-finite value");
    }
    return v;
}

struct SigmaStar {
    double sigma = 0.0;
    int y_star = 2;
};

inline constexpr int kDefaultYCap = 10'000;

/// Best threshold value over Y = 2, 3, ...; stops at the first strict
/// decrease (V(1) is unimodal in Y). Throws SearchCapError when no
/// decrease shows up by `y_cap`.
SigmaStar sigma_star(double lambda, int y_cap = kDefaultYCap);

/// 1 / (1 - sigma*), with the boundary constants 1 at lambda = 0 and 0 at 1.
double upper_bound_throughput(double lambda, int y_cap = kDefaultYCap);

struct BoundsResult {
    double lambda = 0.0;
    double mu_lb = 0.0;
    double p_star = 0.0;
    /// 0 at lambda = 0 and -inf at lambda = 1.
    double sigma_star = 0.0;
    /// Absent at the boundary rates, where no finite threshold exists.
    std::optional<int> y_star;
    double mu_ub = 0.0;
};

BoundsResult compute_bounds(Rate lambda, int y_cap = kDefaultYCap);

/// Stationary behaviour of the back-off policy with transmit probability p,
/// from the Markov chain on (uncooperative backlog, backing-off flag)
/// truncated at `truncation` packets.
struct SteadyState {
    double throughput = 0.0;
    double expected_backlog = 0.0;
    double tail_mass = 0.0;
    /// Set when tail_mass exceeds the tolerance passed in.
    bool tail_warning = false;
};

SteadyState pi_lb_steady_state(double lambda, double p, int truncation,
                               double tail_tolerance = 1e-8);

/// The decision-stage MDP over W (largest backlog consistent with the
/// observations), truncated at x_max with overflow mass lumped onto x_max.
class SspModel {
public:
    SspModel(double lambda, int x_max);

    double lambda() const { return lambda_; }
    int x_max() const { return x_max_; }

    /// Row x of the transition matrix under `action`; rows 1..x_max.
    Eigen::VectorXd transition_row(int x, Action action) const;
    /// Expected one-stage reward (negative slot count) from state x.
    double expected_reward(int x, Action action) const;

    const Eigen::MatrixXd& transmit_kernel() const { return transmit_; }
    const Eigen::MatrixXd& silent_kernel() const { return silent_; }
    const Eigen::VectorXd& transmit_reward() const { return transmit_reward_; }
    const Eigen::VectorXd& silent_reward() const { return silent_reward_; }

private:
    double lambda_;
    int x_max_;
    Eigen::MatrixXd transmit_;
    Eigen::MatrixXd silent_;
    Eigen::VectorXd transmit_reward_;
    Eigen::VectorXd silent_reward_;
};

struct ValueIterationResult {
    double sigma = 0.0;
    int x_max_used = 0;
    long sweeps = 0;
};

/// Value iteration on the truncated MDP from V = 0, maximizing over both
/// actions in every state, until two sweeps differ by less than `tol`.
/// x_max is doubled (up to `max_doublings` times) while the truncation level
/// still moves V(1) by more than tol.
ValueIterationResult value_iteration_oracle(double lambda, int x_max = 200, double tol = 1e-10,
                                            long max_sweeps = 5'000'000, int max_doublings = 3);

}  // namespace colsched
