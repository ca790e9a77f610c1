#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/statistics/univariate_statistics.hpp>

#include "dslt/experiment.hpp"

namespace dslt {

double ks_pvalue(double d_stat, std::size_t n) {
    if (n == 0) throw std::invalid_argument("ks_pvalue: n must be >= 1");
    const double rn = std::sqrt(static_cast<double>(n));
    const double lambda = (rn + 0.12 + 0.11 / rn) * d_stat;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

SampleMoments sample_moments(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("sample_moments: need at least 2 samples");
    SampleMoments m;
    auto [mean, var] = boost::math::statistics::mean_and_sample_variance(x);
    m.mean = mean;
    m.variance = var;
    return m;
}

namespace {

NormalityStats raw_stats(std::span<const double> samples) {
    const std::size_t n = samples.size();
    const SampleMoments mom = sample_moments(samples);
    const double sd = std::sqrt(mom.variance);
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = sd > 0.0 ? (x[i] - mom.mean) / sd : 0.0;
        const double F = 0.5 * std::erfc(-z / std::numbers::sqrt2);
        d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
    }
    NormalityStats s;
    s.ks_stat = d;
    s.ks_p = ks_pvalue(d, n);
    if (sd > 0.0) {
        s.skewness = boost::math::statistics::skewness(x);
        s.excess_kurtosis = boost::math::statistics::excess_kurtosis(x);
    }
    return s;
}

}  // namespace

NormalityStats normality_stats(std::span<const double> samples) {
    if (samples.size() < kMinNormalitySamples)
        throw std::invalid_argument("normality_stats: need at least 8 samples");
    return raw_stats(samples);
}

NormalityStats small_sample_stats(std::span<const double> samples) {
    NormalityStats s = raw_stats(samples);
    s.ks_p = std::numeric_limits<double>::quiet_NaN();
    return s;
}

}  // namespace dslt
