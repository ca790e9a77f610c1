#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dslt/mollifier.hpp"
#include "oracles.hpp"

using namespace dslt;

namespace {
constexpr double pi = std::numbers::pi;

// Nested central differences of f_eps along multi-index k.
double fd_derivative(std::vector<double> x, double eps, std::vector<int> k, double h) {
    for (std::size_t j = 0; j < k.size(); ++j) {
        if (k[j] == 0) continue;
        std::vector<int> k2 = k;
        --k2[j];
        std::vector<double> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        return (fd_derivative(xp, eps, k2, h) - fd_derivative(xm, eps, k2, h)) / (2 * h);
    }
    return f_eps(x, eps);
}
}  // namespace

TEST_CASE("hermite polynomials") {
    CHECK(hermite_he(0, 0.7) == 1.0);
    CHECK(hermite_he(1, 0.7) == doctest::Approx(0.7));
    CHECK(hermite_he(2, 0.7) == doctest::Approx(0.49 - 1));
    CHECK(hermite_he(3, 2.0) == doctest::Approx(8 - 6));
    CHECK(hermite_he(4, 1.5) == doctest::Approx(std::pow(1.5, 4) - 6 * 1.5 * 1.5 + 3));
    // high order: recurrence agrees with the orthogonality norm E[He_m^2] = m!
    const auto rule = oracle::gauss_hermite(40);
    for (int m : {5, 9, 12}) {
        double s = 0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(hermite_he(m, rule.nodes[i]), 2);
        CHECK(s == doctest::Approx(static_cast<double>(oracle::factorial(m))).epsilon(1e-9));
    }
}

TEST_CASE("mollifier point values") {
    const std::array<double, 3> z3{0, 0, 0};
    const std::array<double, 2> z2{0, 0};
    CHECK(f_eps(z3, 0.5) == doctest::Approx(std::pow(pi, -1.5)).epsilon(1e-14));
    CHECK(f_eps(z2, 1 / (2 * pi)) == doctest::Approx(1.0).epsilon(1e-14));
    const std::array<int, 3> e1{1, 0, 0};
    CHECK(f_eps_deriv(z3, 0.3, e1) == 0.0);
    const std::array<double, 3> x{1, 0, 0};
    CHECK(f_eps_deriv(x, 1.0, e1) == doctest::Approx(-std::pow(2 * pi, -1.5) * std::exp(-0.5)).epsilon(1e-14));
    CHECK(f_eps_grad(x, 1.0, 0) == doctest::Approx(f_eps_deriv(x, 1.0, e1)).epsilon(1e-15));
    CHECK_THROWS_AS(f_eps(z3, 0.0), std::domain_error);
    CHECK_THROWS_AS(f_eps_deriv(z3, -1.0, e1), std::domain_error);
}

TEST_CASE("mollifier integrates to one under tensor gauss-hermite") {
    const auto rule = oracle::gauss_hermite(60);
    for (double eps : {0.3, 1.0, 2.5}) {
        // int f_eps dx = E[f_eps(sZ) / phi_s(sZ)] with s^2 = 2 eps, per axis
        const double s = std::sqrt(2 * eps);
        double total = 0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            for (std::size_t j = 0; j < rule.nodes.size(); ++j)
                for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                    const std::array<double, 3> x{s * rule.nodes[i], s * rule.nodes[j], s * rule.nodes[k]};
                    const double w = oracle::phi(x[0], s * s) * oracle::phi(x[1], s * s) * oracle::phi(x[2], s * s);
                    total += rule.weights[i] * rule.weights[j] * rule.weights[k] * f_eps(x, eps) / w;
                }
        CHECK(std::abs(total - 1.0) < 1e-10);
    }
}

TEST_CASE("derivatives agree with finite differences") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0, 0.7);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> x{n(rng), n(rng), n(rng)};
        const std::array<int, 3> e2{0, 1, 0};
        const double fd = fd_derivative(x, 0.5, {0, 1, 0}, 1e-5);
        CHECK(f_eps_deriv(x, 0.5, e2) == doctest::Approx(fd).epsilon(1e-6));
    }
    // every multi-index of order <= 3 in d = 2
    for (int k1 = 0; k1 <= 3; ++k1)
        for (int k2 = 0; k1 + k2 <= 3; ++k2) {
            const std::vector<double> x{0.4, -0.9};
            const std::array<int, 2> k{k1, k2};
            const double fd = fd_derivative(x, 0.8, {k1, k2}, 1e-3);
            CHECK(f_eps_deriv(x, 0.8, k) == doctest::Approx(fd).epsilon(1e-4));
        }
}

TEST_CASE("parity, scaling and underflow") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> n(0, 1);
    const std::vector<std::vector<int>> ks{{1, 0, 0}, {0, 2, 1}, {2, 0, 0}, {1, 1, 1}, {0, 0, 3}};
    for (const auto& k : ks) {
        const int order = k[0] + k[1] + k[2];
        for (int trial = 0; trial < 10; ++trial) {
            const std::array<double, 3> x{n(rng), n(rng), n(rng)};
            const std::array<double, 3> mx{-x[0], -x[1], -x[2]};
            const double v = f_eps_deriv(x, 0.7, k);
            CHECK(f_eps_deriv(mx, 0.7, k) == (order % 2 ? -v : v));
            const double c = 2.3;
            const double sc = std::sqrt(c);
            const std::array<double, 3> xs{x[0] * sc, x[1] * sc, x[2] * sc};
            const double scaled = f_eps_deriv(xs, c * 0.7, k);
            CHECK(scaled == doctest::Approx(std::pow(c, -(3.0 + order) / 2) * v).epsilon(1e-12));
        }
    }
    const std::array<double, 3> far{40, 0, 0};
    const std::array<int, 3> e1{1, 0, 0};
    CHECK(f_eps(far, 1.0) == 0.0);
    CHECK(f_eps_deriv(far, 1.0, e1) == 0.0);
}

TEST_CASE("heat-kernel semigroup") {
    // f_{e1+e2}(x) = int f_{e1}(x - y) f_{e2}(y) dy, with y drawn from the e2 density
    const auto rule = oracle::gauss_hermite(50);
    std::mt19937_64 rng(29);
    std::normal_distribution<double> n(0, 0.8);
    const double e1 = 0.6, e2 = 0.9;
    const double s = std::sqrt(e2);
    for (int trial = 0; trial < 5; ++trial) {
        const std::array<double, 2> x{n(rng), n(rng)};
        double conv = 0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                const std::array<double, 2> z{x[0] - s * rule.nodes[i], x[1] - s * rule.nodes[j]};
                conv += rule.weights[i] * rule.weights[j] * f_eps(z, e1);
            }
        CHECK(std::abs(conv - f_eps(x, e1 + e2)) < 1e-8);
    }
}

TEST_CASE("mollifier parameter validation") {
    MollifierParams p;
    p.eps = 0.5;
    p.k = {1, 0};
    CHECK_NOTHROW(p.validate());
    p.eps = 0.0;
    CHECK_THROWS(p.validate());
    p.eps = 1.0;
    p.k = {1, -1};
    CHECK_THROWS(p.validate());
}
