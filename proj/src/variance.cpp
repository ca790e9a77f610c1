#include <cmath>
#include <limits>
#include <numbers>

#include "dslt/quad.hpp"

namespace dslt {

std::string to_string(MuConvention m) { return m == MuConvention::Absolute ? "absolute" : "signed"; }

MuConvention mu_convention_from_string(const std::string& s) {
    if (s == "signed") return MuConvention::Signed;
    if (s == "absolute" || s == "abs") return MuConvention::Absolute;
    throw std::invalid_argument("unknown mu convention '" + s + "'");
}

namespace {

struct NestedTally {
    std::size_t evaluations = 0;
    bool converged = true;

    double take(const QuadResult& r) {
        evaluations += r.evaluations;
        converged = converged && r.converged;
        return r.value;
    }
};

template <class F>
QuadResult guarded_1d(const F& f, const QuadSpec& spec) {
    try {
        return integrate_1d(f, 0.0, 1.0, spec);
    } catch (const QuadBudgetError& e) {
        QuadResult r = e.partial();
        r.converged = false;
        return r;
    }
}

// Integral of (t-a-b-c)_+ kernel(geometry) over the gap coordinates, using
// a = t u1, b = (t-a) u2, c = (t-a-b) u3 on the unit cube. Every lower face
// gets the exponential map so that the eps-scale peaks are resolved.
template <class Kernel>
QuadResult gap_integral(Region region, const HurstModel& model, const QuadSpec& spec, const Kernel& kernel) {
    spec.validate();
    const double t = model.t;
    QuadSpec outer = spec;
    outer.singular_edges = {SingularFacet{0, true, 0.0}};
    QuadSpec inner = outer;
    inner.rel_tol = 0.2 * spec.rel_tol;
    // pieces below this are lost to rounding in mu long before they matter
    inner.abs_tol = 1e-13 * spec.abs_tol;
    inner.l1_relative = true;
    inner.max_subdivisions = std::min<std::size_t>(spec.max_subdivisions, 4000);

    NestedTally tally;
    auto over_a = [&](double u1) {
        const double a = t * u1;
        const double ra = t - a;
        if (!(ra > 0.0)) return 0.0;
        auto over_b = [&](double u2) {
            const double b = ra * u2;
            const double rb = ra - b;
            if (!(rb > 0.0)) return 0.0;
            auto over_c = [&](double u3) {
                const double c = rb * u3;
                const double w = rb * (1.0 - u3);  // t - a - b - c
                if (!(w > 0.0)) return 0.0;
                PairGeometry g{region, a, b, c, model.H};
                return rb * w * kernel(g);
            };
            return ra * tally.take(guarded_1d(over_c, inner));
        };
        return t * tally.take(guarded_1d(over_b, inner));
    };
    QuadResult res = guarded_1d(over_a, outer);
    res.evaluations += tally.evaluations;
    res.error += 2.0 * inner.rel_tol * res.abs_integral;
    res.converged = res.converged && tally.converged;
    return res;
}

double pair_constant(const HurstModel& model, PrefactorMode mode) {
    return 2.0 * prefactor(mode, model.d) * std::pow(2.0 * std::numbers::pi, -model.d);
}

}  // namespace

QuadResult variance_piece(Region region, double eps, const HurstModel& model, MuConvention conv,
                          const QuadSpec& spec, PrefactorMode mode) {
    model.validate();
    if (!(eps > 0.0)) throw std::domain_error("variance_piece: eps must be > 0");
    const double expo = -0.5 * model.d - 1.0;
    const bool absolute = conv == MuConvention::Absolute;
    auto kernel = [=](const PairGeometry& g) {
        const PairMoments m = pair_moments(g);
        if (m.mu == 0.0) return 0.0;
        const double det = m.det_reg(eps);
        return std::pow(det, expo) * (absolute ? std::abs(m.mu) : m.mu);
    };
    QuadResult r = gap_integral(region, model, spec, kernel);
    const double k = pair_constant(model, mode);
    r.value *= k;
    r.error *= k;
    return r;
}

VarianceBreakdown variance_pieces(double eps, const HurstModel& model, MuConvention conv, const QuadSpec& spec,
                                  PrefactorMode mode) {
    VarianceBreakdown out;
    out.eps = eps;
    out.mu_convention = conv;
    out.prefactor = mode;
    const QuadResult r1 = variance_piece(Region::D1, eps, model, conv, spec, mode);
    const QuadResult r2 = variance_piece(Region::D2, eps, model, conv, spec, mode);
    const QuadResult r3 = variance_piece(Region::D3, eps, model, conv, spec, mode);
    out.v1 = r1.value;
    out.v2 = r2.value;
    out.v3 = r3.value;
    out.err1 = r1.error;
    out.err2 = r2.error;
    out.err3 = r3.error;
    out.total = out.v1 + out.v2 + out.v3;
    out.converged = r1.converged && r2.converged && r3.converged;
    const double s = scale_factor(model, eps);
    out.scaled = out.total * s * s;
    return out;
}

QuadResult first_chaos_variance(double eps, const HurstModel& model, const QuadSpec& spec, PrefactorMode mode) {
    model.validate();
    if (!(eps > 0.0)) throw std::domain_error("first_chaos_variance: eps must be > 0");
    const double expo = -0.5 * model.d - 1.0;
    auto kernel = [=](const PairGeometry& g) {
        const PairMoments m = pair_moments(g);
        if (m.mu == 0.0) return 0.0;
        return std::pow((eps + m.lambda) * (eps + m.rho), expo) * m.mu;
    };
    QuadResult total;
    const double k = pair_constant(model, mode);
    for (Region region : kRegions) {
        const QuadResult r = gap_integral(region, model, spec, kernel);
        total.value += k * r.value;
        total.error += k * r.error;
        total.evaluations += r.evaluations;
        total.subdivisions += r.subdivisions;
        total.converged = total.converged && r.converged;
    }
    return total;
}

namespace {

void require_critical_model(const HurstModel& model) {
    model.validate();
    if (!model.is_critical() || model.d < 3) throw std::domain_error("sigma_squared: requires H d = 1 and d >= 3");
}

}  // namespace

double sigma_squared(const HurstModel& model) {
    require_critical_model(model);
    const double H = model.H;
    const double d = model.d;
    return 2.0 * H * d * d * std::pow(model.t, 3.0 - 4.0 * H) /
           (std::pow(2.0 * std::numbers::pi, model.d) * (1.0 - 2.0 * H) * (1.0 - 2.0 * H));
}

double sigma_squared(const HurstModel& model, PrefactorMode mode) {
    const double d = model.d;
    return sigma_squared(model) * prefactor(mode, model.d) / (d * d);
}

double planar_sigma_squared(double t) {
    return 5.0 * t / (64.0 * std::numbers::pi * std::numbers::pi * std::numbers::sqrt2);
}

double scale_factor(const HurstModel& model, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) return std::numeric_limits<double>::quiet_NaN();
    const double L = std::log(1.0 / eps);
    if (model.d == 2 && std::abs(model.H - 0.5) < 1e-12) return 1.0 / L;
    return std::pow(std::pow(eps, -1.0 / model.H) * L, model.H - 0.5);
}

FactorizedLimit v3_factorized_limit(const HurstModel& model, double eps, const QuadSpec& spec) {
    require_critical_model(model);
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("v3_factorized_limit: requires 0 < eps < 1");
    const double H = model.H;
    const double t = model.t;
    const int d = model.d;
    const double L = std::log(1.0 / eps);
    if (!(1.0 / L < t)) throw std::domain_error("v3_factorized_limit: 1/log(1/eps) must be below t");

    FactorizedLimit out;
    QuadSpec s = spec;
    s.singular_edges = {power_facet(0, H)};
    auto fb = [=](double b) { return (t - b) * std::pow(b, 2.0 * H - 2.0); };
    out.b_factor = std::pow(L, 2.0 * H - 1.0) * integrate_1d(fb, 1.0 / L, t, s).value;

    const double expo = -0.5 * d - 1.0;
    const double log_upper = std::log(t) + L / (2.0 * H);  // log of t eps^{-1/(2H)}
    QuadSpec plain = spec;
    plain.singular_edges.clear();
    auto fa = [=](double a) { return a * std::pow(1.0 + std::pow(a, 2.0 * H), expo); };
    double ia = integrate_1d(fa, 0.0, std::min(1.0, std::exp(log_upper)), plain).value;
    if (log_upper > 0.0) {
        auto fu = [=](double u) {
            const double a = std::exp(u);
            return a * fa(a);
        };
        ia += integrate_1d(fu, 0.0, log_upper, plain).value;
    }
    // (eps^{-1/H})^{2H-1} = eps^{(1-2H)/H}
    out.ac_factor = std::pow(eps, (1.0 - 2.0 * H) / H) * ia * ia;
    out.value = H * (1.0 - 2.0 * H) * 2.0 * d * d * std::pow(2.0 * std::numbers::pi, -d) * out.b_factor *
                out.ac_factor;
    return out;
}

}  // namespace dslt
