#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dslt {

/// Parameters of a d-dimensional fBm experiment: Hurst index, dimension,
/// horizon and the derivative multi-index of the local-time functional.
struct HurstModel {
    double H = 0.5;
    int d = 1;
    double t = 1.0;
    std::vector<int> k;  // empty means e_1

    /// Builds and validates a model; k defaults to the first unit vector.
    static HurstModel make(double H, int d, double t = 1.0, std::vector<int> k = {});

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    int order() const;       // |k|
    int odd_count() const;   // number of odd k_i
    bool is_critical() const;

    /// Sufficient condition for L^2 existence of the derivative local time:
    /// H < min{2/(2|k|+d), 1/(|k|+d-#odd), 1/d}.
    bool exists_l2() const;
    double existence_threshold() const;
};

struct TimeGrid {
    std::size_t n = 2;  // number of intervals
    double t = 1.0;

    TimeGrid() = default;
    TimeGrid(std::size_t n_, double t_);

    double step() const { return t / static_cast<double>(n); }
    double node(std::size_t i) const { return t * static_cast<double>(i) / static_cast<double>(n); }
};

enum class PathMethod : std::uint8_t { CirculantEmbedding = 0, Cholesky = 1 };

/// Requested synthesis route. Auto tries circulant embedding first.
enum class MethodRequest { Auto, CirculantEmbedding, Cholesky };

std::string to_string(PathMethod m);

/// Sampled fBm on a uniform grid. Storage is component-major:
/// values[i * (n+1) + j] is component i at node j.
struct FbmPath {
    HurstModel model;
    TimeGrid grid;
    std::vector<double> values;
    std::uint64_t seed = 0;
    PathMethod method = PathMethod::CirculantEmbedding;

    int dim() const { return model.d; }
    std::size_t nodes() const { return grid.n + 1; }

    std::span<const double> component(int i) const {
        return {values.data() + static_cast<std::size_t>(i) * nodes(), nodes()};
    }
    std::span<double> component(int i) {
        return {values.data() + static_cast<std::size_t>(i) * nodes(), nodes()};
    }

    /// Same path with every component multiplied by -1.
    FbmPath negated() const;

    /// Keeps every `factor`-th node; the result samples the same realization
    /// on a grid with n/factor intervals.
    FbmPath coarsened(std::size_t factor) const;
};

/// Cov(B_s, B_u) = (s^{2H} + u^{2H} - |s-u|^{2H}) / 2 for one component.
double fbm_covariance(double s, double u, double H);

/// Autocovariance of unit-step fractional Gaussian noise at integer lag.
double fgn_autocovariance(long lag, double H);

/// Mixes (master seed, index) into an independent 64-bit stream seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Exact synthesis of fBm components on a fixed (H, grid). Precomputes the
/// circulant spectrum (or the Cholesky factor) once; `generate` is const
/// and safe to call concurrently.
class FbmGenerator {
public:
    FbmGenerator(const HurstModel& model, const TimeGrid& grid,
                 MethodRequest request = MethodRequest::Auto);
    ~FbmGenerator();
    FbmGenerator(FbmGenerator&&) noexcept;
    FbmGenerator& operator=(FbmGenerator&&) noexcept;
    FbmGenerator(const FbmGenerator&) = delete;
    FbmGenerator& operator=(const FbmGenerator&) = delete;

    PathMethod method() const;
    const HurstModel& model() const;
    const TimeGrid& grid() const;

    /// Smallest and largest circulant eigenvalue (scaled by step^{2H}).
    double min_eigenvalue() const;
    double max_eigenvalue() const;

    FbmPath generate(std::uint64_t seed) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

FbmPath generate_path(const HurstModel& model, const TimeGrid& grid, std::uint64_t seed,
                      MethodRequest request = MethodRequest::Auto);

// Binary path files: "FBMP" | u16 version | u16 d | u64 n | f64 H | f64 t |
// u64 seed | u8 method | d*(n+1) f64, all little-endian, component-major.
inline constexpr std::uint16_t kPathFileVersion = 1;
inline constexpr std::size_t kPathHeaderBytes = 41;

void write_path(std::ostream& os, const FbmPath& path);
FbmPath read_path(std::istream& is);
void write_path_file(const std::string& filename, const FbmPath& path);
FbmPath read_path_file(const std::string& filename);

}  // namespace dslt
