#include "dslt/mollifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dslt {

namespace {

constexpr int kRecurrenceMax = 8;
constexpr int kTableMax = 64;

// Monomial coefficients of He_m for m <= kTableMax, built once from
// He_{m+1}(x) = x He_m(x) - m He_{m-1}(x).
const std::vector<std::vector<double>>& hermite_table() {
    static const std::vector<std::vector<double>> table = [] {
        std::vector<std::vector<double>> c(kTableMax + 1);
        c[0] = {1.0};
        c[1] = {0.0, 1.0};
        for (int m = 1; m < kTableMax; ++m) {
            std::vector<double> next(static_cast<std::size_t>(m) + 2, 0.0);
            for (std::size_t i = 0; i < c[m].size(); ++i) next[i + 1] += c[m][i];
            for (std::size_t i = 0; i < c[m - 1].size(); ++i) next[i] -= m * c[m - 1][i];
            c[m + 1] = std::move(next);
        }
        return c;
    }();
    return table;
}

void check_eps(double eps) {
    if (!(eps > 0.0)) throw std::domain_error("mollifier width eps must be > 0");
}

double squared_norm(std::span<const double> x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return r2;
}

double gaussian(double r2, double eps, std::size_t d) {
    const double e = r2 / (2.0 * eps);
    if (e > kUnderflowExponent) return 0.0;
    return std::pow(2.0 * std::numbers::pi * eps, -0.5 * static_cast<double>(d)) * std::exp(-e);
}

}  // namespace

void MollifierParams::validate() const {
    check_eps(eps);
    for (int ki : k)
        if (ki < 0) throw std::invalid_argument("multi-index entries must be >= 0");
}

double hermite_he(int m, double x) {
    if (m < 0) throw std::invalid_argument("Hermite order must be >= 0");
    if (m <= kRecurrenceMax) {
        double prev = 1.0;
        if (m == 0) return prev;
        double cur = x;
        for (int j = 1; j < m; ++j) {
            const double next = x * cur - j * prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    if (m > kTableMax) throw std::invalid_argument("Hermite order above table size");
    const auto& c = hermite_table()[static_cast<std::size_t>(m)];
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

double f_eps(std::span<const double> x, double eps) {
    check_eps(eps);
    return gaussian(squared_norm(x), eps, x.size());
}

double f_eps_deriv(std::span<const double> x, double eps, std::span<const int> k) {
    check_eps(eps);
    if (k.size() != x.size()) throw std::invalid_argument("multi-index length must match point dimension");
    const double base = gaussian(squared_norm(x), eps, x.size());
    if (base == 0.0) return 0.0;
    const double inv_sqrt = 1.0 / std::sqrt(eps);
    double factor = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const int kj = k[j];
        if (kj == 0) continue;
        if (kj < 0) throw std::invalid_argument("multi-index entries must be >= 0");
        const double sign = (kj % 2 == 0) ? 1.0 : -1.0;
        factor *= sign * std::pow(inv_sqrt, kj) * hermite_he(kj, x[j] * inv_sqrt);
    }
    return factor * base;
}

double f_eps_grad(std::span<const double> x, double eps, int j) {
    check_eps(eps);
    if (j < 0 || static_cast<std::size_t>(j) >= x.size()) throw std::invalid_argument("coordinate out of range");
    return -(x[static_cast<std::size_t>(j)] / eps) * gaussian(squared_norm(x), eps, x.size());
}

}  // namespace dslt
