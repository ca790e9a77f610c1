#include "dslt/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <fftw3.h>

namespace dslt {

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

HurstModel HurstModel::make(double H, int d, double t, std::vector<int> k) {
    HurstModel m;
    m.H = H;
    m.d = d;
    m.t = t;
    if (k.empty() && d >= 1) {
        k.assign(static_cast<std::size_t>(d), 0);
        k[0] = 1;
    }
    m.k = std::move(k);
    m.validate();
    return m;
}

void HurstModel::validate() const {
    if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("Hurst index must lie in (0,1)");
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("horizon t must be > 0");
    if (!k.empty()) {
        if (k.size() != static_cast<std::size_t>(d))
            throw std::invalid_argument("multi-index length must equal the dimension");
        for (int ki : k)
            if (ki < 0) throw std::invalid_argument("multi-index entries must be >= 0");
    }
}

int HurstModel::order() const {
    if (k.empty()) return 1;
    int s = 0;
    for (int ki : k) s += ki;
    return s;
}

int HurstModel::odd_count() const {
    if (k.empty()) return 1;
    return static_cast<int>(std::count_if(k.begin(), k.end(), [](int ki) { return ki % 2 != 0; }));
}

bool HurstModel::is_critical() const {
    return std::abs(H * d - 1.0) <= 1e-12;
}

double HurstModel::existence_threshold() const {
    const double kk = order();
    const double a = 2.0 / (2.0 * kk + d);
    const double denom = kk + d - odd_count();
    const double b = denom > 0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
    return std::min({a, b, 1.0 / d});
}

bool HurstModel::exists_l2() const { return H < existence_threshold(); }

TimeGrid::TimeGrid(std::size_t n_, double t_) : n(n_), t(t_) {
    if (n < 2) throw std::invalid_argument("time grid needs n >= 2 intervals");
    if (!(t > 0.0)) throw std::invalid_argument("time grid horizon must be > 0");
}

std::string to_string(PathMethod m) {
    return m == PathMethod::Cholesky ? "cholesky" : "circulant";
}

FbmPath FbmPath::negated() const {
    FbmPath out = *this;
    for (double& v : out.values) v = -v;
    return out;
}

FbmPath FbmPath::coarsened(std::size_t factor) const {
    if (factor == 0 || grid.n % factor != 0 || grid.n / factor < 2)
        throw std::invalid_argument("coarsening factor must divide n and leave >= 2 intervals");
    FbmPath out;
    out.model = model;
    out.grid = TimeGrid(grid.n / factor, grid.t);
    out.seed = seed;
    out.method = method;
    out.values.resize(static_cast<std::size_t>(model.d) * out.nodes());
    for (int i = 0; i < model.d; ++i) {
        auto src = component(i);
        auto dst = out.component(i);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = src[j * factor];
    }
    return out;
}

double fbm_covariance(double s, double u, double H) {
    if (!(H > 0.0 && H < 1.0)) throw std::domain_error("fbm_covariance: H outside (0,1)");
    if (s < 0.0 || u < 0.0) throw std::domain_error("fbm_covariance: negative time");
    const double p = 2.0 * H;
    return 0.5 * (std::pow(s, p) + std::pow(u, p) - std::pow(std::abs(s - u), p));
}

double fgn_autocovariance(long lag, double H) {
    const double p = 2.0 * H;
    const double j = std::abs(static_cast<double>(lag));
    return 0.5 * (std::pow(j + 1.0, p) + std::pow(std::abs(j - 1.0), p) - 2.0 * std::pow(j, p));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

struct FbmGenerator::Impl {
    HurstModel model;
    TimeGrid grid;
    PathMethod method = PathMethod::CirculantEmbedding;
    std::size_t m = 0;                 // embedding size 2n
    std::vector<double> sqrt_eig;      // sqrt(lambda_k / m)
    double min_eig = 0.0;
    double max_eig = 0.0;
    fftw_plan plan = nullptr;
    Eigen::MatrixXd chol;              // lower factor of the fGn covariance

    ~Impl() {
        if (plan) {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            fftw_destroy_plan(plan);
        }
    }

    void compute_spectrum() {
        const std::size_t n = grid.n;
        m = 2 * n;
        const double scale = std::pow(grid.step(), 2.0 * model.H);
        fftw_complex* buf = fftw_alloc_complex(m);
        for (std::size_t j = 0; j <= n; ++j) {
            buf[j][0] = scale * fgn_autocovariance(static_cast<long>(j), model.H);
            buf[j][1] = 0.0;
        }
        for (std::size_t j = 1; j < n; ++j) {
            buf[m - j][0] = buf[j][0];
            buf[m - j][1] = 0.0;
        }
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            plan = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        }
        fftw_execute_dft(plan, buf, buf);
        sqrt_eig.resize(m);
        min_eig = buf[0][0];
        max_eig = buf[0][0];
        for (std::size_t k = 0; k < m; ++k) {
            min_eig = std::min(min_eig, buf[k][0]);
            max_eig = std::max(max_eig, buf[k][0]);
        }
        for (std::size_t k = 0; k < m; ++k)
            sqrt_eig[k] = std::sqrt(std::max(buf[k][0], 0.0) / static_cast<double>(m));
        fftw_free(buf);
    }

    void compute_cholesky() {
        const std::size_t n = grid.n;
        const double scale = std::pow(grid.step(), 2.0 * model.H);
        Eigen::MatrixXd cov(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                cov(i, j) = scale * fgn_autocovariance(static_cast<long>(i) - static_cast<long>(j), model.H);
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("fBm synthesis: covariance is not numerically positive definite");
        chol = llt.matrixL();
        method = PathMethod::Cholesky;
    }

    void fill_component(std::mt19937_64& rng, std::span<double> out) const {
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::size_t n = grid.n;
        std::vector<double> noise(n);
        if (method == PathMethod::CirculantEmbedding) {
            fftw_complex* buf = fftw_alloc_complex(m);
            for (std::size_t k = 0; k < m; ++k) {
                const double re = normal(rng);
                const double im = normal(rng);
                buf[k][0] = sqrt_eig[k] * re;
                buf[k][1] = sqrt_eig[k] * im;
            }
            fftw_execute_dft(plan, buf, buf);
            for (std::size_t j = 0; j < n; ++j) noise[j] = buf[j][0];
            fftw_free(buf);
        } else {
            Eigen::VectorXd z(n);
            for (std::size_t j = 0; j < n; ++j) z[j] = normal(rng);
            Eigen::VectorXd x = chol.triangularView<Eigen::Lower>() * z;
            for (std::size_t j = 0; j < n; ++j) noise[j] = x[j];
        }
        out[0] = 0.0;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += noise[j];
            out[j + 1] = acc;
        }
    }
};

FbmGenerator::FbmGenerator(const HurstModel& model, const TimeGrid& grid, MethodRequest request)
    : impl_(std::make_unique<Impl>()) {
    model.validate();
    if (grid.n < 2) throw std::invalid_argument("time grid needs n >= 2 intervals");
    impl_->model = model;
    impl_->grid = grid;
    if (request == MethodRequest::Cholesky) {
        impl_->compute_cholesky();
        return;
    }
    impl_->compute_spectrum();
    const bool negative = impl_->min_eig < -1e-10 * impl_->max_eig;
    if (negative) {
        if (request == MethodRequest::CirculantEmbedding)
            throw std::runtime_error("circulant embedding has negative eigenvalues");
        impl_->compute_cholesky();
    }
}

FbmGenerator::~FbmGenerator() = default;
FbmGenerator::FbmGenerator(FbmGenerator&&) noexcept = default;
FbmGenerator& FbmGenerator::operator=(FbmGenerator&&) noexcept = default;

PathMethod FbmGenerator::method() const { return impl_->method; }
const HurstModel& FbmGenerator::model() const { return impl_->model; }
const TimeGrid& FbmGenerator::grid() const { return impl_->grid; }
double FbmGenerator::min_eigenvalue() const { return impl_->min_eig; }
double FbmGenerator::max_eigenvalue() const { return impl_->max_eig; }

FbmPath FbmGenerator::generate(std::uint64_t seed) const {
    FbmPath path;
    path.model = impl_->model;
    path.grid = impl_->grid;
    path.seed = seed;
    path.method = impl_->method;
    path.values.assign(static_cast<std::size_t>(path.model.d) * path.nodes(), 0.0);
    for (int i = 0; i < path.model.d; ++i) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        impl_->fill_component(rng, path.component(i));
    }
    return path;
}

FbmPath generate_path(const HurstModel& model, const TimeGrid& grid, std::uint64_t seed,
                      MethodRequest request) {
    return FbmGenerator(model, grid, request).generate(seed);
}

}  // namespace dslt
