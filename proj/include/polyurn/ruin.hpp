#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace polyurn {

/// Conditional duration moments of a Brownian gambler's ruin: started at x
/// between absorbing barriers 0 and a, conditioned to reach a first.
struct RuinMoments {
    double x = 0.0;
    double a = 0.0;
    double m1 = 0.0;  // E[H_a | H_a < H_0]
    double m2 = 0.0;  // E[H_a^2 | H_a < H_0]
};

inline RuinMoments ruin_moments_closed_form(double x, double a) {
    if (!(0.0 < x && x < a))
        throw std::invalid_argument("ruin moments: need 0 < x < a");
    RuinMoments m;
    m.x = x;
    m.a = a;
    m.m1 = (a * a - x * x) / 3.0;
    m.m2 = (7.0 * a * a * a * a - 10.0 * a * a * x * x + 3.0 * x * x * x * x) / 45.0;
    return m;
}

/// The same moments written in terms of the distance to the barrier d = a - x:
/// L1(d, x) = d^2/3 + 2dx/3 and
/// L2(d, x) = (7d^4 + 28d^3 x + 32d^2 x^2 + 8d x^3)/45,
/// so L1 >= d^2/3 whenever d, x >= 0.
inline std::pair<double, double> l_decomposition(double d, double x) {
    const double l1 = d * d / 3.0 + 2.0 * d * x / 3.0;
    const double l2 =
        (7.0 * d * d * d * d + 28.0 * d * d * d * x + 32.0 * d * d * x * x + 8.0 * d * x * x * x) /
        45.0;
    return {l1, l2};
}

/// Independent first-moment oracle: solve the absorption system of the
/// symmetric simple random walk on {0,...,a} by linear algebra.
///
/// With h(x) = P_x(hit a before 0) = x/a and w(x) = E_x[tau; hit a first],
/// w satisfies w(x) = h(x) + (w(x+1) + w(x-1))/2 with w(0) = w(a) = 0, and
/// the conditional mean is w(x)/h(x) (the h-transform). The tridiagonal
/// system is solved by elimination; the closed form never enters.
inline double ruin_mean_chain_oracle(int x, int a) {
    if (!(0 < x && x < a) || a > 200)
        throw std::invalid_argument("chain oracle: need integer 0 < x < a <= 200");

    const int n = a - 1;  // interior states 1..a-1
    std::vector<double> diag(n, 1.0), rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = static_cast<double>(i + 1) / a;

    // Thomas elimination with off-diagonal coefficients -1/2
    std::vector<double> c_prime(n, 0.0);
    c_prime[0] = -0.5 / diag[0];
    rhs[0] = rhs[0] / diag[0];
    for (int i = 1; i < n; ++i) {
        const double denom = diag[i] - (-0.5) * c_prime[i - 1];
        c_prime[i] = -0.5 / denom;
        rhs[i] = (rhs[i] - (-0.5) * rhs[i - 1]) / denom;
    }
    std::vector<double> w(n);
    w[n - 1] = rhs[n - 1];
    for (int i = n - 2; i >= 0; --i) w[i] = rhs[i] - c_prime[i] * w[i + 1];

    const double h = static_cast<double>(x) / a;
    return w[x - 1] / h;
}

/// Moment estimates from the conditional Laplace transform
/// phi(theta) = sinh(x sqrt(2 theta)) / sinh(a sqrt(2 theta)),
/// differentiated one-sidedly at theta = 0 with nodes {0, h, 2h}:
/// m1 = -phi'(0+)/phi(0+), m2 = phi''(0+)/phi(0+). Steps above 1e-3 lose the
/// cancellation battle and are rejected.
inline std::pair<double, double> laplace_moment_check(double x, double a, double h) {
    if (!(0.0 < x && x < a))
        throw std::invalid_argument("laplace check: need 0 < x < a");
    if (!(h > 0.0) || h > 1e-3)
        throw std::invalid_argument("laplace check: step must lie in (0, 1e-3]");

    const auto phi = [&](double theta) {
        const double s = std::sqrt(2.0 * theta);
        return std::sinh(x * s) / std::sinh(a * s);
    };
    const double p0 = x / a;  // limit of phi at 0+
    const double p1 = phi(h);
    const double p2 = phi(2.0 * h);

    const double d1 = (-3.0 * p0 + 4.0 * p1 - p2) / (2.0 * h);
    const double d2 = (p0 - 2.0 * p1 + p2) / (h * h);
    return {-d1 / p0, d2 / p0};
}

}  // namespace polyurn
