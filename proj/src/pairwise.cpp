#include "dslt/pairwise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dslt {

namespace mp = boost::multiprecision;

std::string to_string(Region r) {
    switch (r) {
        case Region::D1: return "D1";
        case Region::D2: return "D2";
        case Region::D3: return "D3";
    }
    return "?";
}

void PairGeometry::validate() const {
    if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("Hurst index must lie in (0,1)");
    if (a < 0.0 || b < 0.0 || c < 0.0) throw std::invalid_argument("gap lengths must be >= 0");
}

PairGeometry geometry_from_times(double r, double s, double r2, double s2, double H) {
    if (!(r < s) || !(r2 < s2)) throw std::invalid_argument("increments need r < s");
    if (r2 < r) {
        std::swap(r, r2);
        std::swap(s, s2);
    }
    PairGeometry g;
    g.H = H;
    if (s <= r2) {
        g.region = Region::D3;
        g.a = s - r;
        g.b = r2 - s;
        g.c = s2 - r2;
    } else if (s2 <= s) {
        g.region = Region::D2;
        g.a = r2 - r;
        g.b = s2 - r2;
        g.c = s - s2;
    } else {
        g.region = Region::D1;
        g.a = r2 - r;
        g.b = s - r2;
        g.c = s2 - s;
    }
    return g;
}

double power_increment(double x, double h, double p) {
    if (h == 0.0) return 0.0;
    if (x == 0.0) return std::pow(h, p);
    return std::pow(x, p) * std::expm1(p * std::log1p(h / x));
}

namespace {

// (b+a+c)^p - (b+a)^p - (b+c)^p + b^p for a + c <= b/2, as
// b^p sum_{k>=2} binom(p,k) [(alpha+gamma)^k - alpha^k - gamma^k]
// with alpha = a/b, gamma = c/b. The bracket obeys
// E_k = (alpha+gamma) E_{k-1} + alpha gamma^{k-1} + gamma alpha^{k-1}.
double second_difference_series(double a, double b, double c, double p) {
    const double al = a / b;
    const double ga = c / b;
    const double s = al + ga;
    double coef = p;          // binom(p, 1)
    double e = 0.0;           // E_1
    double al_pow = 1.0;      // alpha^{k-1}
    double ga_pow = 1.0;
    double sum = 0.0;
    for (int k = 2; k < 400; ++k) {
        coef *= (p - k + 1) / static_cast<double>(k);
        al_pow *= al;
        ga_pow *= ga;
        e = s * e + al * ga_pow + ga * al_pow;
        const double term = coef * e;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return std::pow(b, p) * sum;
}

double second_difference(double a, double b, double c, double p) {
    if (a == 0.0 || c == 0.0 || p == 1.0) return 0.0;
    if (b > 0.0 && a + c <= 0.5 * b) return second_difference_series(a, b, c, p);
    const double big = std::max(a, c);
    const double small = std::min(a, c);
    return power_increment(b + big, small, p) - power_increment(b, small, p);
}

}  // namespace

double mu_exact(const PairGeometry& geom) {
    geom.validate();
    const double p = 2.0 * geom.H;
    const double a = geom.a, b = geom.b, c = geom.c;
    switch (geom.region) {
        case Region::D1: {
            // [(a+c+b)^p - (a+c)^p] + b^p + [(a+c)^p - a^p - c^p]; the last
            // bracket vanishes identically at p = 1
            const double big = std::max(a, c);
            const double small = std::min(a, c);
            const double split = (p == 1.0 || small == 0.0) ? 0.0 : power_increment(big, small, p) - std::pow(small, p);
            return 0.5 * (power_increment(a + c, b, p) + std::pow(b, p) + split);
        }
        case Region::D2:
            // (a+b)^p + (b+c)^p - a^p - c^p
            return 0.5 * (power_increment(a, b, p) + power_increment(c, b, p));
        case Region::D3:
            // (a+b+c)^p + b^p - (a+b)^p - (c+b)^p
            return 0.5 * second_difference(a, b, c, p);
    }
    return 0.0;
}

PairMoments pair_moments(const PairGeometry& geom) {
    const double p = 2.0 * geom.H;
    PairMoments m;
    m.mu = mu_exact(geom);
    switch (geom.region) {
        case Region::D1:
            m.lambda = std::pow(geom.a + geom.b, p);
            m.rho = std::pow(geom.b + geom.c, p);
            break;
        case Region::D2:
            m.lambda = std::pow(geom.a + geom.b + geom.c, p);
            m.rho = std::pow(geom.b, p);
            break;
        case Region::D3:
            m.lambda = std::pow(geom.a, p);
            m.rho = std::pow(geom.c, p);
            break;
    }
    m.gap = m.lambda * m.rho - m.mu * m.mu;
    return m;
}

double mu_bridge(double x, double u1, double u2, double H) {
    if (x < 0.0 || u1 < 0.0 || u2 < 0.0) throw std::domain_error("mu_bridge: negative argument");
    if (!(H > 0.0 && H < 1.0)) throw std::domain_error("mu_bridge: H outside (0,1)");
    const double p = 2.0 * H;
    const double v = power_increment(x, u2, p) + std::pow(std::abs(x - u1), p) -
                     std::pow(std::abs(x + u2 - u1), p);
    return std::abs(0.5 * v);
}

std::string to_string(PrefactorMode m) {
    return m == PrefactorMode::Paper ? "paper" : "per_coordinate";
}

PrefactorMode prefactor_from_string(const std::string& s) {
    if (s == "paper" || s == "d2") return PrefactorMode::Paper;
    if (s == "per_coordinate" || s == "per-coordinate" || s == "unit") return PrefactorMode::PerCoordinate;
    throw std::invalid_argument("unknown prefactor mode '" + s + "'");
}

double prefactor(PrefactorMode mode, int d) {
    return mode == PrefactorMode::Paper ? static_cast<double>(d) * d : 1.0;
}

double pair_kernel(double eps, const Cov2& sigma, int d, PrefactorMode mode) {
    if (!(eps > 0.0)) throw std::domain_error("pair_kernel: eps must be > 0");
    if (d < 1) throw std::domain_error("pair_kernel: dimension must be >= 1");
    const double det = (eps + sigma.s11) * (eps + sigma.s22) - sigma.s12 * sigma.s12;
    if (!(det > 0.0)) throw std::domain_error("pair_kernel: regularized determinant is not positive");
    const double two_pi = 2.0 * std::numbers::pi;
    return prefactor(mode, d) * std::pow(two_pi, -d) * std::pow(det, -0.5 * d - 1.0) * sigma.s12;
}

mp::cpp_rational chaos_coefficient_rational(std::span<const int> q_multi) {
    if (q_multi.empty()) throw std::invalid_argument("chaos coefficient needs d >= 1");
    int q = 0;
    for (int qi : q_multi) {
        if (qi < 0) throw std::invalid_argument("chaos multi-index entries must be >= 0");
        q += qi;
    }
    if (q < 1) throw std::invalid_argument("chaos order q must be >= 1");
    if (q > kMaxChaosOrder) throw std::overflow_error("chaos order exceeds exact-arithmetic guard");

    auto factorial = [](int n) {
        mp::cpp_int f = 1;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    mp::cpp_int num = static_cast<int>(q_multi.size());
    for (int qi : q_multi) num *= factorial(2 * qi) / factorial(qi);
    mp::cpp_int den = factorial(2 * q - 1) * (mp::cpp_int(1) << q);
    mp::cpp_rational r(num, den);
    return (q % 2 == 0) ? r : mp::cpp_rational(-r);
}

double chaos_coefficient(std::span<const int> q_multi) {
    const auto r = chaos_coefficient_rational(q_multi);
    const double d = static_cast<double>(q_multi.size());
    return static_cast<double>(r) * std::pow(2.0 * std::numbers::pi, -0.5 * d);
}

double chaos_inner_kernel(double eps, double x, double u1, double u2, int q, int d, double H) {
    if (!(eps > 0.0)) throw std::domain_error("chaos_inner_kernel: eps must be > 0");
    if (q < 1) throw std::domain_error("chaos_inner_kernel: q must be >= 1");
    const double p = 2.0 * H;
    const double e = -0.5 * d - q;
    const double mu = mu_bridge(x, u1, u2, H);
    return std::pow(eps + std::pow(u1, p), e) * std::pow(eps + std::pow(u2, p), e) *
           std::pow(mu, 2 * q - 1);
}

double gap_bound_ratio(const PairGeometry& geom) {
    const auto m = pair_moments(geom);
    const double p = 2.0 * geom.H;
    const double a = geom.a, b = geom.b, c = geom.c;
    double bound = 0.0;
    switch (geom.region) {
        case Region::D1:
            bound = std::pow(a + b, p) * std::pow(c, p) + std::pow(a, p) * std::pow(b + c, p);
            break;
        case Region::D2:
            bound = std::pow(b, p) * (std::pow(a, p) + std::pow(c, p));
            break;
        case Region::D3:
            bound = std::pow(a * c, p);
            break;
    }
    if (!(bound > 0.0)) throw std::domain_error("gap_bound_ratio: bound expression vanishes");
    return m.gap / bound;
}

}  // namespace dslt
