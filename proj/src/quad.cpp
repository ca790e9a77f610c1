#include "dslt/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dslt {

SingularFacet power_facet(int dim, double H, bool at_lower) {
    if (!(H > 0.0 && H <= 0.5)) throw std::domain_error("power_facet: H must lie in (0, 1/2]");
    SingularFacet f;
    f.dim = dim;
    f.at_lower = at_lower;
    f.exponent = (std::abs(H - 0.5) < 1e-12) ? 0.0 : 1.0 / (1.0 - 2.0 * H);
    return f;
}

void QuadSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("quadrature tolerances must be > 0");
    if (max_subdivisions == 0) throw std::invalid_argument("max_subdivisions must be >= 1");
    for (const auto& f : singular_edges)
        if (f.exponent < 0.0) throw std::invalid_argument("facet exponent must be >= 0");
}

namespace {

QuadSpec facets_for(const QuadSpec& spec, int dim) {
    QuadSpec s = spec;
    s.singular_edges.clear();
    for (auto f : spec.singular_edges) {
        if (f.dim != dim) continue;
        f.dim = 0;
        s.singular_edges.push_back(f);
    }
    return s;
}

struct NestedState {
    std::size_t evaluations = 0;
    bool converged = true;
};

void absorb(NestedState& st, const QuadResult& r) {
    st.evaluations += r.evaluations;
    st.converged = st.converged && r.converged;
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(std::span<const double>)>& f,
                              std::span<const double> lo, std::span<const double> hi,
                              const QuadSpec& spec) {
    spec.validate();
    const std::size_t dims = lo.size();
    if (dims == 0 || dims > 3 || hi.size() != dims)
        throw std::invalid_argument("integrate_adaptive supports boxes of dimension 1 to 3");

    std::vector<QuadSpec> per_dim;
    for (std::size_t i = 0; i < dims; ++i) {
        per_dim.push_back(facets_for(spec, static_cast<int>(i)));
        if (i > 0) {
            per_dim.back().rel_tol = 0.1 * spec.rel_tol;
            per_dim.back().abs_tol = std::numeric_limits<double>::min();
            per_dim.back().l1_relative = true;
        }
    }

    NestedState st;
    double x[3] = {0.0, 0.0, 0.0};
    std::function<double(std::size_t)> level = [&](std::size_t i) -> double {
        if (i == dims) return f(std::span<const double>(x, dims));
        auto g = [&, i](double xi) {
            x[i] = xi;
            return level(i + 1);
        };
        QuadResult r;
        try {
            r = integrate_1d(g, lo[i], hi[i], per_dim[i]);
        } catch (const QuadBudgetError& e) {
            r = e.partial();
            r.converged = false;
        }
        absorb(st, r);
        return r.value;
    };
    auto outer = [&](double x0) {
        x[0] = x0;
        return level(1);
    };
    QuadResult res = integrate_1d(outer, lo[0], hi[0], per_dim[0]);
    res.evaluations += st.evaluations;
    if (dims > 1) res.error += 0.1 * spec.rel_tol * static_cast<double>(dims - 1) * res.abs_integral;
    res.converged = res.converged && st.converged;
    return res;
}

namespace {

void require_critical(double eps, double H, int d) {
    if (!(H > 0.0 && H < 1.0) || d < 1) throw std::domain_error("log integral: invalid H or d");
    if (std::abs(H * d - 1.0) > 1e-12) throw std::domain_error("log integral: requires H d = 1");
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("log integral: requires 0 < eps < 1");
}

QuadSpec plain(const QuadSpec& spec) {
    QuadSpec s = spec;
    s.singular_edges.clear();
    return s;
}

}  // namespace

double critical_log_integral_large(double eps, double H, int d, const QuadSpec& spec) {
    require_critical(eps, H, d);
    const double expo = -0.5 * d - 1.0;
    const double log_upper = std::log(1.0 / eps) / H;  // log of eps^{-1/H}
    auto f = [=](double x) { return std::pow(x, H - 0.5) * std::pow(1.0 + std::pow(x, H), expo); };

    QuadSpec head = plain(spec);
    head.singular_edges.push_back({0, true, 1.0 / (H + 0.5)});
    const double split = std::min(1.0, std::exp(log_upper));
    double total = integrate_1d(f, 0.0, split, head).value;
    if (log_upper > 0.0) {
        // x = e^u on [1, eps^{-1/H}]
        auto g = [=](double u) {
            const double x = std::exp(u);
            return std::exp(u * (H + 0.5)) * std::pow(1.0 + std::pow(x, H), expo);
        };
        total += integrate_1d(g, 0.0, log_upper, plain(spec)).value;
    }
    return total;
}

double critical_log_integral_small(double eps, double H, int d, const QuadSpec& spec) {
    require_critical(eps, H, d);
    const double p = 2.0 * H;
    const double expo = -0.5 * d - 1.0;
    auto f = [=](double x) {
        const double xp = std::pow(x, p);
        return xp * std::pow(eps + xp, expo);
    };
    // below the crossover eps^{1/(2H)} the integrand is a pure power
    const double log_cross = std::log(eps) / p;
    const double cross = std::exp(log_cross);
    QuadSpec head = plain(spec);
    head.singular_edges.push_back({0, true, 1.0 / (p + 1.0)});
    double total = integrate_1d(f, 0.0, cross, head).value;
    // x = e^{-u} on [cross, 1]
    auto g = [=](double u) {
        const double x = std::exp(-u);
        return f(x) * x;
    };
    total += integrate_1d(g, 0.0, -log_cross, plain(spec)).value;
    return total;
}

double critical_log_integral_large_ratio(double eps, double H, int d, const QuadSpec& spec) {
    return critical_log_integral_large(eps, H, d, spec) / std::log(1.0 / eps);
}

double critical_log_integral_small_ratio(double eps, double H, int d, const QuadSpec& spec) {
    return critical_log_integral_small(eps, H, d, spec) / std::log(1.0 / eps);
}

}  // namespace dslt
