#include "dslt/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dslt/mollifier.hpp"
#include "dslt/parallel.hpp"

namespace dslt {

namespace {

constexpr std::size_t kTile = 128;

// Point-major copy of the path values that enter the kernel.
struct SimplexLayout {
    Scheme scheme;
    std::size_t n;        // grid intervals
    int d;
    double h;
    std::vector<double> points;    // Midpoint: n cell midpoints; Trapezoid: n+1 nodes
    std::vector<double> diagonal;  // Midpoint only: centroid increments of diagonal cells

    std::size_t rows() const { return scheme == Scheme::Midpoint ? n : n + 1; }
};

SimplexLayout make_layout(const FbmPath& path, Scheme scheme) {
    SimplexLayout lay;
    lay.scheme = scheme;
    lay.n = path.grid.n;
    lay.d = path.dim();
    lay.h = path.grid.step();
    const std::size_t d = static_cast<std::size_t>(lay.d);
    if (scheme == Scheme::Midpoint) {
        lay.points.resize(lay.n * d);
        lay.diagonal.resize(lay.n * d);
        for (std::size_t c = 0; c < d; ++c) {
            auto comp = path.component(static_cast<int>(c));
            for (std::size_t i = 0; i < lay.n; ++i) {
                lay.points[i * d + c] = 0.5 * (comp[i] + comp[i + 1]);
                lay.diagonal[i * d + c] = (comp[i + 1] - comp[i]) / 3.0;
            }
        }
    } else {
        lay.points.resize((lay.n + 1) * d);
        for (std::size_t c = 0; c < d; ++c) {
            auto comp = path.component(static_cast<int>(c));
            for (std::size_t i = 0; i <= lay.n; ++i) lay.points[i * d + c] = comp[i];
        }
    }
    return lay;
}

// Trapezoid weight of node pair (p, q), p <= q, in units of h^2.
double trapezoid_weight(std::size_t p, std::size_t q, std::size_t n) {
    double w = 0.0;
    // square cells (i, j), 0 <= i < j <= n-1, having (p, q) as a corner
    for (int di = -1; di <= 0; ++di) {
        for (int dj = -1; dj <= 0; ++dj) {
            const long i = static_cast<long>(p) + di;
            const long j = static_cast<long>(q) + dj;
            if (i >= 0 && i < j && j <= static_cast<long>(n) - 1) w += 0.25;
        }
    }
    // diagonal triangles (i,i),(i,i+1),(i+1,i+1)
    if (q == p) {
        if (p <= n - 1) w += 1.0 / 6.0;
        if (p >= 1) w += 1.0 / 6.0;
    } else if (q == p + 1) {
        w += 1.0 / 6.0;
    }
    return w;
}

template <class Kernel>
double simplex_sum(const SimplexLayout& lay, std::span<const double> y, unsigned threads,
                   const Kernel& kernel) {
    const std::size_t d = static_cast<std::size_t>(lay.d);
    const std::size_t rows = lay.rows();
    const std::size_t tiles = (rows + kTile - 1) / kTile;
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t I = 0; I < tiles; ++I)
        for (std::size_t J = I; J < tiles; ++J) order.emplace_back(I, J);
    std::vector<double> partial(order.size(), 0.0);

    parallel_for(order.size(), threads, [&](std::size_t idx) {
        const auto [I, J] = order[idx];
        std::vector<double> x(d);
        CompensatedSum acc;
        const std::size_t i_end = std::min(rows, (I + 1) * kTile);
        const std::size_t j_end = std::min(rows, (J + 1) * kTile);
        for (std::size_t i = I * kTile; i < i_end; ++i) {
            const double* pi = lay.points.data() + i * d;
            std::size_t j0 = J * kTile;
            if (I == J) {
                if (lay.scheme == Scheme::Midpoint) {
                    const double* dg = lay.diagonal.data() + i * d;
                    for (std::size_t c = 0; c < d; ++c) x[c] = dg[c] - y[c];
                    acc.add(0.5 * kernel(x.data()));
                    j0 = i + 1;
                } else {
                    j0 = i;
                }
            }
            for (std::size_t j = j0; j < j_end; ++j) {
                const double* pj = lay.points.data() + j * d;
                for (std::size_t c = 0; c < d; ++c) x[c] = pj[c] - pi[c] - y[c];
                const double kv = kernel(x.data());
                if (lay.scheme == Scheme::Midpoint)
                    acc.add(kv);
                else if (kv != 0.0)
                    acc.add(trapezoid_weight(i, j, lay.n) * kv);
            }
        }
        partial[idx] = acc.value();
    });

    CompensatedSum total;
    for (double v : partial) total.add(v);
    return total.value() * lay.h * lay.h;
}

std::size_t pair_count(const SimplexLayout& lay) {
    const std::size_t r = lay.rows();
    return r * (r + 1) / 2;
}

std::vector<double> offset_or_origin(const std::vector<double>& y, int d) {
    if (y.empty()) return std::vector<double>(static_cast<std::size_t>(d), 0.0);
    if (y.size() != static_cast<std::size_t>(d))
        throw std::invalid_argument("offset y must have the path dimension");
    return y;
}

void check_eps(double eps) {
    if (!(eps > 0.0)) throw std::domain_error("estimator: eps must be > 0");
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::Trapezoid ? "trapezoid" : "midpoint"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "midpoint") return Scheme::Midpoint;
    if (s == "trapezoid") return Scheme::Trapezoid;
    throw std::invalid_argument("unknown scheme '" + s + "'");
}

int unit_direction(const std::vector<int>& k) {
    int dir = -1;
    int total = 0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        total += k[j];
        if (k[j] == 1) dir = static_cast<int>(j);
    }
    if (total != 1 || dir < 0) throw std::invalid_argument("multi-index must be a unit vector e_j");
    return dir;
}

EstimatorValue dslt(const FbmPath& path, const EstimatorRequest& req) {
    check_eps(req.eps);
    const int d = path.dim();
    std::vector<int> k = req.k.empty() ? path.model.k : req.k;
    if (k.empty()) {
        k.assign(static_cast<std::size_t>(d), 0);
        k[0] = 1;
    }
    if (k.size() != static_cast<std::size_t>(d)) throw std::invalid_argument("multi-index length must equal path dimension");
    const auto y = offset_or_origin(req.y, d);
    const auto lay = make_layout(path, req.scheme);

    int order = 0;
    for (int ki : k) {
        if (ki < 0) throw std::invalid_argument("multi-index entries must be >= 0");
        order += ki;
    }

    double value = 0.0;
    if (order == 1) {
        const int j = unit_direction(k);
        const double eps = req.eps;
        const double inv2 = 1.0 / (2.0 * eps);
        const double scale = std::pow(2.0 * std::numbers::pi * eps, -0.5 * d) / eps;
        // (-1)^1 f^{(e_j)}(x) = (x_j / eps) f_eps(x)
        auto kernel = [=](const double* x) {
            double r2 = 0.0;
            for (int c = 0; c < d; ++c) r2 += x[c] * x[c];
            const double e = r2 * inv2;
            if (e > kUnderflowExponent) return 0.0;
            return x[j] * scale * std::exp(-e);
        };
        value = simplex_sum(lay, y, req.threads, kernel);
    } else {
        const double sign = (order % 2 == 0) ? 1.0 : -1.0;
        const double eps = req.eps;
        auto kernel = [&, sign, eps, d](const double* x) {
            return sign * f_eps_deriv(std::span<const double>(x, static_cast<std::size_t>(d)), eps, k);
        };
        value = simplex_sum(lay, y, req.threads, kernel);
    }
    return {value, pair_count(lay), req.eps, req.scheme};
}

EstimatorValue slt(const FbmPath& path, double eps, const std::vector<double>& y_in, Scheme scheme,
                   unsigned threads) {
    check_eps(eps);
    const int d = path.dim();
    const auto y = offset_or_origin(y_in, d);
    const auto lay = make_layout(path, scheme);
    const double inv2 = 1.0 / (2.0 * eps);
    const double norm = std::pow(2.0 * std::numbers::pi * eps, -0.5 * d);
    auto kernel = [=](const double* x) {
        double r2 = 0.0;
        for (int c = 0; c < d; ++c) r2 += x[c] * x[c];
        const double e = r2 * inv2;
        if (e > kUnderflowExponent) return 0.0;
        return norm * std::exp(-e);
    };
    return {simplex_sum(lay, y, threads, kernel), pair_count(lay), eps, scheme};
}

double first_chaos(const FbmPath& path, double eps, PrefactorMode mode, Scheme scheme) {
    check_eps(eps);
    const int d = path.dim();
    const int j = unit_direction(path.model.k.empty() ? std::vector<int>{1} : path.model.k);
    const std::size_t n = path.grid.n;
    const double h = path.grid.step();
    const double p = 2.0 * path.model.H;
    const double hp = std::pow(h, p);
    const double expo = -1.0 - 0.5 * d;
    const double beta = std::sqrt(prefactor(mode, d)) * std::pow(2.0 * std::numbers::pi, -0.5 * d);
    const auto comp = path.component(j);

    CompensatedSum acc;
    if (scheme == Scheme::Midpoint) {
        std::vector<double> prefix(n + 1, 0.0);  // prefix[k] = sum_{i<k} m_i
        for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + 0.5 * (comp[i] + comp[i + 1]);
        for (std::size_t lag = 1; lag < n; ++lag) {
            const double L = static_cast<double>(lag);
            // variance of a lag-L difference of interval midpoints
            const double v = hp * 0.25 * (2.0 * std::pow(L, p) + std::pow(L + 1.0, p) + std::pow(L - 1.0, p) - 2.0);
            const double sum_incr = (prefix[n] - prefix[lag]) - prefix[n - lag];
            acc.add(std::pow(eps + v, expo) * sum_incr);
        }
        const double v_diag = hp / 9.0;
        const double w_diag = 0.5 * std::pow(eps + v_diag, expo) / 3.0;
        for (std::size_t i = 0; i < n; ++i) acc.add(w_diag * (comp[i + 1] - comp[i]));
    } else {
        for (std::size_t lag = 1; lag <= n; ++lag) {
            const double g = std::pow(eps + hp * std::pow(static_cast<double>(lag), p), expo);
            for (std::size_t a = 0; a + lag <= n; ++a) {
                const double w = trapezoid_weight(a, a + lag, n);
                acc.add(w * g * (comp[a + lag] - comp[a]));
            }
        }
    }
    return beta * acc.value() * h * h;
}

}  // namespace dslt
