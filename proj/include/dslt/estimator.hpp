#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dslt/fbm.hpp"
#include "dslt/pairwise.hpp"

namespace dslt {

/// Quadrature rule over the simplex {0 < r < s < t}.
///  Midpoint: one node per grid cell; off-diagonal square cells use the
///    cell center with linearly interpolated path values, diagonal triangles
///    use their centroid and area h^2/2.
///  Trapezoid: corner averaging, i.e. grid-node pairs with tensor trapezoid
///    weights on squares and vertex weights h^2/6 on diagonal triangles.
enum class Scheme { Midpoint, Trapezoid };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct EstimatorRequest {
    double eps = 0.1;
    std::vector<double> y;   // empty: origin
    std::vector<int> k;      // empty: the path model's multi-index
    Scheme scheme = Scheme::Midpoint;
    unsigned threads = 1;
};

struct EstimatorValue {
    double value = 0.0;
    std::size_t n_pairs = 0;
    double eps = 0.0;
    Scheme scheme = Scheme::Midpoint;
};

/// Regularized derivative of self-intersection local time,
///   (-1)^{|k|} int_{0<r<s<t} f_eps^{(k)}(B_s - B_r - y) dr ds,
/// evaluated with the request's simplex rule. Tiles are reduced in a fixed
/// order with compensated summation, so the value does not depend on
/// `threads`.
EstimatorValue dslt(const FbmPath& path, const EstimatorRequest& req);

/// Regularized self-intersection local time, int f_eps(B_s - B_r - y) dr ds.
EstimatorValue slt(const FbmPath& path, double eps, const std::vector<double>& y = {},
                   Scheme scheme = Scheme::Midpoint, unsigned threads = 1);

/// Projection of dslt (y = 0, k = e_j) onto the first Wiener chaos:
///   beta * sum_cells area * (eps + v_cell)^{-1-d/2} * (X_cell)_j
/// where X_cell is the cell's path increment and v_cell its per-component
/// variance under the chosen simplex rule. beta = sqrt(prefactor) (2 pi)^{-d/2}.
double first_chaos(const FbmPath& path, double eps, PrefactorMode mode = kElectedPrefactor,
                   Scheme scheme = Scheme::Midpoint);

/// Index j of a first-order multi-index k = e_j; throws otherwise.
int unit_direction(const std::vector<int>& k);

}  // namespace dslt
