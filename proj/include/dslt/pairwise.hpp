#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dslt {

/// Time orderings of two increments [r,s], [r',s'] with r < r':
///   D1: r < r' < s < s'   a = r'-r, b = s-r',  c = s'-s
///   D2: r < r' < s' < s   a = r'-r, b = s'-r', c = s-s'
///   D3: r < s < r' < s'   a = s-r,  b = r'-s,  c = s'-r'
enum class Region : std::uint8_t { D1 = 0, D2 = 1, D3 = 2 };

inline constexpr Region kRegions[] = {Region::D1, Region::D2, Region::D3};

std::string to_string(Region r);

struct PairGeometry {
    Region region = Region::D1;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double H = 0.5;

    void validate() const;
};

/// Classifies four times (requires r < s and r' < s'); swaps the pairs when
/// r' < r so that the returned geometry has the earlier left end first.
PairGeometry geometry_from_times(double r, double s, double r2, double s2, double H);

/// Variances and covariance of the two increments.
struct PairMoments {
    double lambda = 0.0;  // |s-r|^{2H}
    double rho = 0.0;     // |s'-r'|^{2H}
    double mu = 0.0;      // signed covariance
    double gap = 0.0;     // lambda*rho - mu^2

    /// |eps I + Sigma| = eps^2 + eps(lambda+rho) + lambda*rho - mu^2.
    double det_reg(double eps) const { return eps * eps + eps * (lambda + rho) + gap; }
};

/// (x+h)^p - x^p without cancellation for h << x.
double power_increment(double x, double h, double p);

/// Signed increment covariance from the region's second-difference formula.
double mu_exact(const PairGeometry& geom);

PairMoments pair_moments(const PairGeometry& geom);

/// |E[B_{u1} (B_{x+u2} - B_x)]|.
double mu_bridge(double x, double u1, double u2, double H);

/// Prefactor convention for the |k| = 1 pair kernel. PerCoordinate is the
/// exact value of E[f_eps^{(e_j)}(X) f_eps^{(e_j)}(Y)]; Paper carries an
/// extra d^2.
enum class PrefactorMode : std::uint8_t { PerCoordinate = 0, Paper = 1 };

/// Mode validated against direct Gaussian quadrature of the estimator kernel.
inline constexpr PrefactorMode kElectedPrefactor = PrefactorMode::PerCoordinate;

std::string to_string(PrefactorMode m);
PrefactorMode prefactor_from_string(const std::string& s);

/// 1 or d^2.
double prefactor(PrefactorMode mode, int d);

struct Cov2 {
    double s11 = 0.0;
    double s22 = 0.0;
    double s12 = 0.0;
};

/// prefactor * (2 pi)^{-d} |eps I + Sigma|^{-d/2-1} Sigma_12.
double pair_kernel(double eps, const Cov2& sigma, int d, PrefactorMode mode = kElectedPrefactor);

/// beta = rational * (2 pi)^{-d/2}; the rational part is exact.
boost::multiprecision::cpp_rational chaos_coefficient_rational(std::span<const int> q_multi);

/// Chaos coefficient beta_{q,d} for q_multi of length d with sum q >= 1
/// (q <= 20):
///   (-1)^q d / ((2q-1)! (2pi)^{d/2}) * prod (2q_i)! / (q_i! 2^q).
double chaos_coefficient(std::span<const int> q_multi);

inline constexpr int kMaxChaosOrder = 20;

/// G^{(q,d)}_{eps,x}(u1,u2) = (eps+u1^{2H})^{-d/2-q} (eps+u2^{2H})^{-d/2-q} mu_bridge^{2q-1}.
double chaos_inner_kernel(double eps, double x, double u1, double u2, int q, int d, double H);

/// (lambda*rho - mu^2) divided by the region's lower-bound expression.
double gap_bound_ratio(const PairGeometry& geom);

}  // namespace dslt
