#include "rte/quadrature.hpp"

#include "rte/core.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace rte {

namespace {

// Returns (P_n(x), P_{n-1}(x)) by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x)
{
    double p0 = 1.0;
    double p1 = x;
    if (n == 0)
        return {p0, 0.0};
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

} // namespace

double legendre(int k, double x)
{
    return legendre_pair(k, x).first;
}

double legendre_derivative(int k, double x)
{
    // P'_k = sum over j = k-1, k-3, ... of (2j+1) P_j; stable at the endpoints.
    double d = 0.0;
    for (int j = k - 1; j >= 0; j -= 2)
        d += (2 * j + 1) * legendre(j, x);
    return d;
}

GaussRule gauss_rule(int n)
{
    if (n < 1)
        throw InvalidArgument("gauss_rule: need at least one node");
    GaussRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const auto [p, pm1] = legendre_pair(n, x);
            dp = n * (x * p - pm1) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-17)
                break;
        }
        const auto [p, pm1] = legendre_pair(n, x);
        dp = n * (x * p - pm1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[n - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    return rule;
}

std::array<double, 3> AngularQuadrature::second_moments() const
{
    std::array<double, 3> m{0.0, 0.0, 0.0};
    for (int j = 0; j < size(); ++j)
        for (int d = 0; d < 3; ++d)
            m[d] += weights[j] * directions[j][d] * directions[j][d];
    return m;
}

AngularQuadrature gauss_legendre(int n)
{
    if (n < 1)
        throw InvalidArgument("gauss_legendre: n must be positive");
    const GaussRule rule = gauss_rule(n);
    const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
    AngularQuadrature q;
    q.mode = QuadratureMode::slab_1d;
    for (int i = 0; i < n; ++i) {
        q.directions.push_back({rule.nodes[i], 0.0, 0.0});
        q.weights.push_back(rule.weights[i] / total);
    }
    return q;
}

AngularQuadrature chebyshev_legendre(int n_alpha, int n_z)
{
    if (n_alpha < 1 || n_z < 1)
        throw InvalidArgument("chebyshev_legendre: counts must be positive");
    const AngularQuadrature polar = gauss_legendre(n_z);
    AngularQuadrature q;
    q.mode = QuadratureMode::sphere_2d;
    for (int j2 = 0; j2 < n_z; ++j2) {
        const double z = polar.directions[j2][0];
        const double s = std::sqrt(1.0 - z * z);
        for (int j1 = 0; j1 < n_alpha; ++j1) {
            const double alpha = (2.0 * (j1 + 1) - 1.0) * std::numbers::pi / n_alpha;
            q.directions.push_back({std::cos(alpha) * s, std::sin(alpha) * s, z});
            q.weights.push_back(polar.weights[j2] / n_alpha);
        }
    }
    return q;
}

} // namespace rte
