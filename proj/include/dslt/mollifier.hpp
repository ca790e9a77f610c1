#pragma once

#include <span>
#include <vector>

namespace dslt {

/// Width and derivative order of the Gaussian approximate identity.
struct MollifierParams {
    double eps = 1.0;
    std::vector<int> k;

    void validate() const;
};

/// Exponent |x|^2/(2 eps) above which kernels are returned as exact zero.
inline constexpr double kUnderflowExponent = 745.0;

/// Probabilists' Hermite polynomial He_m(x).
double hermite_he(int m, double x);

/// f_eps(x) = (2 pi eps)^{-d/2} exp(-|x|^2 / (2 eps)), d = x.size().
double f_eps(std::span<const double> x, double eps);

/// Partial derivative of f_eps of multi-index k (k.size() == x.size()):
///   prod_j (-1)^{k_j} eps^{-k_j/2} He_{k_j}(x_j / sqrt(eps)) * f_eps(x).
double f_eps_deriv(std::span<const double> x, double eps, std::span<const int> k);

/// First-order partial in coordinate j: -(x_j / eps) f_eps(x).
double f_eps_grad(std::span<const double> x, double eps, int j);

}  // namespace dslt
