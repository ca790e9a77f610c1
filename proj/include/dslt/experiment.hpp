#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dslt/estimator.hpp"
#include "dslt/fbm.hpp"
#include "dslt/pairwise.hpp"
#include "dslt/quad.hpp"

namespace dslt {

inline constexpr const char* kLibraryVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Normality statistics

struct NormalityStats {
    double ks_stat = 0.0;
    double ks_p = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    bool p_approximate = true;  // mean and variance are fitted from the sample
};

/// Asymptotic Kolmogorov survival function with Stephens' small-sample
/// correction, lambda = (sqrt n + 0.12 + 0.11/sqrt n) D.
double ks_pvalue(double d_stat, std::size_t n);

/// KS distance to the normal law with the sample's mean and standard
/// deviation, plus moment statistics. Needs at least 8 samples.
NormalityStats normality_stats(std::span<const double> samples);

inline constexpr std::size_t kMinNormalitySamples = 8;

/// Same statistics for 2 <= n < 8 with ks_p set to NaN (unreliable).
NormalityStats small_sample_stats(std::span<const double> samples);

struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
};
SampleMoments sample_moments(std::span<const double> x);

// ---------------------------------------------------------------------------
// Configuration

struct ExperimentConfig {
    HurstModel model = HurstModel::make(1.0 / 3.0, 3);
    std::size_t grid_n = 1024;
    std::size_t n_paths = 2000;
    std::vector<double> eps_ladder = default_mc_ladder();
    std::uint64_t master_seed = 1;
    Scheme scheme = Scheme::Midpoint;
    MuConvention mu_convention = MuConvention::Signed;
    PrefactorMode prefactor = kElectedPrefactor;
    unsigned threads = 0;  // 0: DSLT_THREADS or hardware concurrency
    bool with_quadrature = true;
    double quad_rel_tol = 1e-6;
    std::vector<double> hurst_list;  // existence sweep only
    std::string out_csv;
    std::string out_json;
    std::string out_plot;

    void validate() const;

    /// 10^{-1}, 10^{-1.5}, ..., 10^{-3}.
    static std::vector<double> default_mc_ladder();
    /// 10^{-2}, 10^{-3}, ..., 10^{-8}.
    static std::vector<double> default_quad_ladder();
};

/// Flat "key = value" text, '#' starts a comment. Keys: hurst, dim, t, k,
/// grid_n, n_paths, eps, seed, scheme, mu_convention, prefactor, threads,
/// with_quadrature, quad_rel_tol, hurst_list, out_csv, out_json, out_plot.
/// Unknown keys, duplicates and malformed values throw std::invalid_argument.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& cfg);

/// Comma-separated reals.
std::vector<double> parse_real_list(const std::string& s);

// ---------------------------------------------------------------------------
// Results

struct LadderRow {
    double eps = 0.0;
    std::size_t n_paths = 0;
    std::size_t grid_n = 0;
    double raw_mean = 0.0;
    double raw_var = 0.0;
    double scale_factor = 0.0;
    double scaled_var = 0.0;
    double sigma2_target = 0.0;
    double ks_stat = 0.0;
    double ks_p = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double first_chaos_var = 0.0;
    double quad_var_total = 0.0;
    bool ks_reliable = true;
};

struct LadderResult {
    ExperimentConfig config;
    std::vector<LadderRow> rows;
};

/// Target variance attached to ladder rows: the closed form for d >= 3 at
/// H = 1/d under the configured prefactor, 5t/(64 pi^2 sqrt 2) for d = 2 at
/// H = 1/2, NaN otherwise.
double ladder_target(const HurstModel& model, PrefactorMode mode);

/// Per-path values of one ensemble at one eps. Path i uses seed
/// derive_seed(master_seed, i), so the ensemble is shared across eps rows.
struct EnsembleSamples {
    std::vector<double> dslt;
    std::vector<double> first_chaos;
};
EnsembleSamples sample_ensemble(const ExperimentConfig& cfg, double eps);

/// Summary row from ensemble samples (plus optional quadrature target).
LadderRow summarize_row(const ExperimentConfig& cfg, double eps, const EnsembleSamples& s);

/// For each eps: sample the ensemble, summarize, attach quadrature. When
/// cfg.out_csv is set, rows already in that file are kept and skipped, and
/// each new row is appended as soon as it is complete.
LadderResult run_clt_ladder(const ExperimentConfig& cfg);

struct ExistenceRow {
    double H = 0.0;
    bool exists_l2 = false;
    double threshold = 0.0;
    std::vector<double> eps;
    std::vector<double> raw_var;
    double growth_ratio = 0.0;  // raw_var at the smallest eps over raw_var at the largest
    bool monotone_growth = false;
};

/// Empirical L^2 boundedness probe over cfg.hurst_list along cfg.eps_ladder.
std::vector<ExistenceRow> run_existence_sweep(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Output

/// Column order of the ladder CSV.
inline constexpr const char* kCsvHeader =
    "eps,n_paths,grid_n,raw_mean,raw_var,scale_factor,scaled_var,sigma2_target,ks_stat,ks_p,skewness,"
    "excess_kurtosis,first_chaos_var,quad_var_total";

std::string format_csv_row(const LadderRow& row);
void write_csv(const LadderResult& result, std::ostream& out);
std::vector<LadderRow> read_csv(std::istream& in);

void write_json(const LadderResult& result, std::ostream& out);
LadderResult read_json(std::istream& in);

/// Whitespace table "eps scaled_var sigma2_target".
void write_plot_data(const LadderResult& result, std::ostream& out);

enum class OutputFormat { CSV, JSON };
OutputFormat output_format_from_string(const std::string& s);

/// Writes result to `path` in the chosen format and the plot table next to
/// it (path with extension ".dat").
void emit_results(const LadderResult& result, OutputFormat format, const std::filesystem::path& path);

void write_existence_csv(const std::vector<ExistenceRow>& rows, std::ostream& out);

}  // namespace dslt
