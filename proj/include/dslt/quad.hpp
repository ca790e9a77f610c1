#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dslt/fbm.hpp"
#include "dslt/pairwise.hpp"

namespace dslt {

/// Change of variables applied on one end of one coordinate before
/// subdivision. exponent > 0: x = end -/+ width * v^exponent.
/// exponent == 0: exponential map x = end -/+ width * exp(1 - 1/v), which
/// resolves every integrable power singularity and log-uniform scales.
struct SingularFacet {
    int dim = 0;
    bool at_lower = true;
    double exponent = 0.0;
};

/// Facet for a b^{2H-2}-type endpoint: power 1/(1-2H), or the exponential
/// map when H = 1/2.
SingularFacet power_facet(int dim, double H, bool at_lower = true);

struct QuadSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    std::size_t max_subdivisions = 1'000'000;
    std::vector<SingularFacet> singular_edges;
    /// Measure rel_tol against the integral of |f| instead of |integral f|;
    /// keeps cancelling (signed) integrands from exhausting the budget.
    bool l1_relative = false;

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    double abs_integral = 0.0;  // estimate of the integral of |f|
    std::size_t evaluations = 0;
    std::size_t subdivisions = 0;
    bool converged = true;  // false: error estimate above tolerance (accuracy warning)
};

class QuadBudgetError : public std::runtime_error {
public:
    QuadBudgetError(const std::string& what, QuadResult partial)
        : std::runtime_error(what), partial_(partial) {}
    const QuadResult& partial() const { return partial_; }

private:
    QuadResult partial_;
};

namespace detail {

struct GkSegment {
    double lo, hi, value, error, absval;
    bool operator<(const GkSegment& o) const { return error < o.error; }
};

inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
GkSegment gk15(const F& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double f1[7], f2[7];
    const double fc = f(c);
    double k = fc * kKronrodWeights[7];
    double g = fc * kGaussWeights[3];
    double abs_k = std::abs(k);
    for (int i = 0; i < 7; ++i) {
        const double x = h * kGkNodes[i];
        f1[i] = f(c - x);
        f2[i] = f(c + x);
        k += kKronrodWeights[i] * (f1[i] + f2[i]);
        abs_k += kKronrodWeights[i] * (std::abs(f1[i]) + std::abs(f2[i]));
        if (i % 2 == 1) g += kGaussWeights[i / 2] * (f1[i] + f2[i]);
    }
    const double mean = 0.5 * k;
    double asc = std::abs(fc - mean) * kKronrodWeights[7];
    for (int i = 0; i < 7; ++i) asc += kKronrodWeights[i] * (std::abs(f1[i] - mean) + std::abs(f2[i] - mean));
    double err = std::abs((k - g) * h);
    asc *= std::abs(h);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    const double eps50 = 50.0 * 2.220446049250313e-16;
    if (abs_k * std::abs(h) > 2.2250738585072014e-308 / eps50)
        err = std::max(err, eps50 * abs_k * std::abs(h));
    return {lo, hi, k * h, err, abs_k * std::abs(h)};
}

template <class F>
QuadResult adaptive_interval(const F& f, double lo, double hi, const QuadSpec& spec) {
    QuadResult res;
    if (lo == hi) return res;
    std::priority_queue<GkSegment> heap;
    GkSegment first = gk15(f, lo, hi);
    heap.push(first);
    res.evaluations = 15;
    double total = first.value;
    double err = first.error;
    double l1 = first.absval;
    auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * (spec.l1_relative ? l1 : std::abs(total))); };
    bool roundoff_limited = false;
    while (err > target()) {
        if (res.subdivisions >= spec.max_subdivisions) {
            res.value = total;
            res.error = err;
            res.abs_integral = l1;
            res.converged = false;
            throw QuadBudgetError("quadrature: subdivision budget exhausted", res);
        }
        GkSegment worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > std::min(worst.lo, worst.hi) && mid < std::max(worst.lo, worst.hi))) {
            roundoff_limited = true;
            break;
        }
        heap.pop();
        const GkSegment left = gk15(f, worst.lo, mid);
        const GkSegment right = gk15(f, mid, worst.hi);
        res.evaluations += 30;
        ++res.subdivisions;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        l1 += left.absval + right.absval - worst.absval;
        heap.push(left);
        heap.push(right);
        if (res.subdivisions % 64 == 0) {
            // resum to keep the running totals from drifting
            auto copy = heap;
            double v = 0.0, e = 0.0, a = 0.0;
            while (!copy.empty()) {
                v += copy.top().value;
                e += copy.top().error;
                a += copy.top().absval;
                copy.pop();
            }
            total = v;
            err = e;
            l1 = a;
        }
    }
    double v = 0.0, e = 0.0, a = 0.0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        a += heap.top().absval;
        heap.pop();
    }
    total = v;
    l1 = a;
    res.value = v;
    res.error = e;
    res.abs_integral = a;
    res.converged = !roundoff_limited || e <= target();
    return res;
}

}  // namespace detail

/// Adaptive G7-K15 on [lo, hi]. Facets with dim == 0 in spec.singular_edges
/// are applied (at most one per end).
template <class F>
QuadResult integrate_1d(const F& f, double lo, double hi, const QuadSpec& spec) {
    const SingularFacet* at_lo = nullptr;
    const SingularFacet* at_hi = nullptr;
    for (const auto& fc : spec.singular_edges) {
        if (fc.dim != 0) continue;
        (fc.at_lower ? at_lo : at_hi) = &fc;
    }
    if (!at_lo && !at_hi) return detail::adaptive_interval(f, lo, hi, spec);

    // Map a facet onto the unit interval in v; with facets at both ends the
    // domain is split at the midpoint.
    auto mapped = [&f](const SingularFacet& fc, double end, double width, double sign) {
        return [&f, fc, end, width, sign](double v) {
            double x, jac;
            if (fc.exponent > 0.0) {
                const double vp = std::pow(v, fc.exponent - 1.0);
                x = end + sign * width * vp * v;
                jac = width * fc.exponent * vp;
            } else {
                if (v <= 0.0) return 0.0;
                const double e = std::exp(1.0 - 1.0 / v);
                x = end + sign * width * e;
                jac = width * e / (v * v);
            }
            if (jac == 0.0) return 0.0;
            return f(x) * jac;
        };
    };
    if (at_lo && at_hi) {
        const double mid = 0.5 * (lo + hi);
        auto a = detail::adaptive_interval(mapped(*at_lo, lo, mid - lo, 1.0), 0.0, 1.0, spec);
        auto b = detail::adaptive_interval(mapped(*at_hi, hi, hi - mid, -1.0), 0.0, 1.0, spec);
        QuadResult r;
        r.value = a.value + b.value;
        r.error = a.error + b.error;
        r.abs_integral = a.abs_integral + b.abs_integral;
        r.evaluations = a.evaluations + b.evaluations;
        r.subdivisions = a.subdivisions + b.subdivisions;
        r.converged = a.converged && b.converged;
        return r;
    }
    if (at_lo) return detail::adaptive_interval(mapped(*at_lo, lo, hi - lo, 1.0), 0.0, 1.0, spec);
    return detail::adaptive_interval(mapped(*at_hi, hi, hi - lo, -1.0), 0.0, 1.0, spec);
}

/// Iterated adaptive quadrature over a box of dimension 1..3. Inner
/// integrals run at a tenth of the outer tolerance, measured against their
/// L1 norm; that bound times the outer L1 norm is added to the estimate.
QuadResult integrate_adaptive(const std::function<double(std::span<const double>)>& f,
                              std::span<const double> lo, std::span<const double> hi,
                              const QuadSpec& spec = {});

// ---------------------------------------------------------------------------
// Logarithmically growing integrals at the critical index H d = 1.

/// int_0^{eps^{-1/H}} x^{H-1/2} (1 + x^H)^{-d/2-1} dx.
double critical_log_integral_large(double eps, double H, int d, const QuadSpec& spec = {});
/// int_0^1 x^{2H} (eps + x^{2H})^{-d/2-1} dx.
double critical_log_integral_small(double eps, double H, int d, const QuadSpec& spec = {});
/// The integrals above divided by log(1/eps); limits 1/H and 1/(2H).
double critical_log_integral_large_ratio(double eps, double H, int d, const QuadSpec& spec = {});
double critical_log_integral_small_ratio(double eps, double H, int d, const QuadSpec& spec = {});

// ---------------------------------------------------------------------------
// Second moments of the regularized derivative local time (|k| = 1).

enum class MuConvention { Signed, Absolute };

std::string to_string(MuConvention m);
MuConvention mu_convention_from_string(const std::string& s);

struct VarianceBreakdown {
    double eps = 0.0;
    double v1 = 0.0, v2 = 0.0, v3 = 0.0;
    double total = 0.0;
    double err1 = 0.0, err2 = 0.0, err3 = 0.0;
    MuConvention mu_convention = MuConvention::Signed;
    PrefactorMode prefactor = kElectedPrefactor;
    double scaled = 0.0;  // total * scale_factor(model, eps)^2
    bool converged = true;
};

/// V_i = 2 pref (2 pi)^{-d} int (t-a-b-c)_+ |eps I + Sigma|^{-d/2-1} mu da db dc
/// over the gap coordinates of region D_i.
VarianceBreakdown variance_pieces(double eps, const HurstModel& model, MuConvention conv,
                                  const QuadSpec& spec = {}, PrefactorMode mode = kElectedPrefactor);

/// Single region of the above (without the scaling).
QuadResult variance_piece(Region region, double eps, const HurstModel& model, MuConvention conv,
                          const QuadSpec& spec = {}, PrefactorMode mode = kElectedPrefactor);

/// E[I_1^2] for the first-chaos projection, signed covariance:
/// 2 pref (2 pi)^{-d} sum_i int (t-a-b-c)_+ (eps+lambda)^{-1-d/2} (eps+rho)^{-1-d/2} mu.
QuadResult first_chaos_variance(double eps, const HurstModel& model, const QuadSpec& spec = {},
                                PrefactorMode mode = kElectedPrefactor);

/// Closed-form critical variance 2 H d^2 t^{3-4H} / ((2 pi)^d (1-2H)^2).
/// Requires H d = 1 and d >= 3.
double sigma_squared(const HurstModel& model);
/// Same with the d^2 replaced by prefactor(mode, d).
double sigma_squared(const HurstModel& model, PrefactorMode mode);

/// 5 t / (64 pi^2 sqrt 2), the d = 2, H = 1/2 limit variance.
double planar_sigma_squared(double t);

/// Normalization of the estimator in the CLT ladder:
///   d = 2, H = 1/2: 1/log(1/eps);  otherwise (eps^{-1/H} log(1/eps))^{H-1/2}.
/// NaN for eps >= 1.
double scale_factor(const HurstModel& model, double eps);

struct FactorizedLimit {
    double b_factor = 0.0;   // (log 1/eps)^{2H-1} int_{1/log(1/eps)}^t (t-b) b^{2H-2} db
    double ac_factor = 0.0;  // (eps^{-1/H})^{2H-1} [int_0^{t eps^{-1/(2H)}} a (1+a^{2H})^{-d/2-1} da]^2
    double value = 0.0;      // H (1-2H) 2 d^2 (2 pi)^{-d} b_factor ac_factor
};

FactorizedLimit v3_factorized_limit(const HurstModel& model, double eps, const QuadSpec& spec = {});

}  // namespace dslt
