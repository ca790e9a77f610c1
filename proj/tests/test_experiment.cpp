#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dslt/experiment.hpp"
#include "dslt/parallel.hpp"

using namespace dslt;

namespace {

ExperimentConfig small_config() {
    std::istringstream in(
        "# tiny ladder\n"
        "hurst = 0.3333333333333333\n"
        "dim = 3\n"
        "grid_n = 64\n"
        "n_paths = 40\n"
        "eps = 0.2, 0.1\n"
        "seed = 9\n"
        "with_quadrature = false\n");
    return parse_config(in);
}

std::filesystem::path temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "dslt_tests";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    std::filesystem::remove(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing and formatting") {
    const ExperimentConfig c = small_config();
    CHECK(c.model.d == 3);
    CHECK(c.model.k == std::vector<int>{1, 0, 0});
    CHECK(c.grid_n == 64);
    CHECK(c.eps_ladder == std::vector<double>{0.2, 0.1});
    CHECK_FALSE(c.with_quadrature);
    CHECK(c.scheme == Scheme::Midpoint);
    CHECK(c.mu_convention == MuConvention::Signed);
    CHECK(c.prefactor == kElectedPrefactor);

    std::istringstream again(format_config(c));
    const ExperimentConfig d = parse_config(again);
    CHECK(format_config(d) == format_config(c));
    CHECK(d.model.H == c.model.H);

    const auto defaults = ExperimentConfig::default_mc_ladder();
    CHECK(defaults.size() == 5);
    CHECK(defaults.front() == doctest::Approx(0.1));
    CHECK(defaults[1] == doctest::Approx(std::pow(10.0, -1.5)));
    CHECK(defaults.back() == doctest::Approx(1e-3));
    CHECK(ExperimentConfig::default_quad_ladder().size() == 7);
}

TEST_CASE("config errors") {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return parse_config(in);
    };
    CHECK_THROWS_AS(parse("hurts = 0.3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("dim = 3\ndim = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("dim three\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("grid_n = 12x\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("hurst = 1.2\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("n_paths = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("eps = 0.1, 0.2\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("eps = 0.1, -0.2\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("hurst_list = 0.2, 1.4\n"), std::invalid_argument);
    CHECK_THROWS(parse("scheme = simpson\n"));
    CHECK_THROWS(parse_config_file("/nonexistent/dslt.cfg"));
    CHECK(parse_real_list("1, 2.5,3e-2") == std::vector<double>{1, 2.5, 3e-2});
}

TEST_CASE("normality statistics calibration and power") {
    std::mt19937_64 rng(101);
    std::normal_distribution<double> g(1.5, 2.0);
    std::exponential_distribution<double> e(1.0);
    int pass = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> x(2000);
        for (double& v : x) v = g(rng);
        const NormalityStats s = normality_stats(x);
        if (s.ks_p > 0.01) ++pass;
        CHECK(s.p_approximate);
    }
    MESSAGE("normal samples passing: " << pass << "/" << trials);
    CHECK(pass >= 99);
    std::vector<double> x(2000);
    for (double& v : x) v = e(rng);
    const NormalityStats s = normality_stats(x);
    CHECK(s.ks_p < 0.01);
    CHECK(s.skewness == doctest::Approx(2.0).epsilon(0.2));
    CHECK(s.excess_kurtosis == doctest::Approx(6.0).epsilon(0.4));

    const std::vector<double> few{1, 2, 3};
    CHECK_THROWS(normality_stats(few));
    CHECK(std::isnan(small_sample_stats(few).ks_p));
    CHECK(ks_pvalue(0.0, 100) == doctest::Approx(1.0));
    CHECK(ks_pvalue(0.5, 100) < 1e-10);
    const SampleMoments m = sample_moments(few);
    CHECK(m.mean == 2.0);
    CHECK(m.variance == 1.0);
}

TEST_CASE("ladder rows obey the scaling identity and reuse paths") {
    ExperimentConfig c = small_config();
    c.threads = 1;
    const LadderResult r = run_clt_ladder(c);
    REQUIRE(r.rows.size() == 2);
    for (const auto& row : r.rows) {
        CHECK(row.n_paths == 40);
        CHECK(row.scaled_var == doctest::Approx(row.raw_var * row.scale_factor * row.scale_factor).epsilon(1e-12));
        CHECK(row.scale_factor == doctest::Approx(std::pow(std::pow(row.eps, -3.0) * std::log(1 / row.eps), -1.0 / 6)).epsilon(1e-14));
        CHECK(row.sigma2_target == doctest::Approx(sigma_squared(c.model, kElectedPrefactor)));
        CHECK(std::isnan(row.quad_var_total));
        CHECK(row.ks_reliable);
    }
    const EnsembleSamples s = sample_ensemble(c, 0.1);
    CHECK(sample_moments(s.dslt).variance == r.rows[1].raw_var);
}

TEST_CASE("two-path ensembles") {
    ExperimentConfig c = small_config();
    c.n_paths = 2;
    c.with_quadrature = true;
    c.quad_rel_tol = 1e-4;
    c.eps_ladder = {0.2};
    const LadderResult r = run_clt_ladder(c);
    REQUIRE(r.rows.size() == 1);
    const LadderRow& row = r.rows[0];
    CHECK_FALSE(row.ks_reliable);
    CHECK(std::isnan(row.ks_p));
    for (double v : {row.raw_mean, row.raw_var, row.scale_factor, row.scaled_var, row.sigma2_target, row.ks_stat,
                     row.skewness, row.excess_kurtosis, row.first_chaos_var, row.quad_var_total})
        CHECK(std::isfinite(v));
    std::ostringstream js;
    write_json(r, js);
    CHECK(js.str().find("\"ks_p\": null") != std::string::npos);
    CHECK(js.str().find("\"ks_p_reliable\": false") != std::string::npos);
}

TEST_CASE("targets for the planar and off-critical models") {
    CHECK(ladder_target(HurstModel::make(0.5, 2), kElectedPrefactor) == doctest::Approx(0.0055970).epsilon(1e-4));
    CHECK(std::isnan(ladder_target(HurstModel::make(0.3, 3), kElectedPrefactor)));
}

TEST_CASE("csv and json serialization") {
    LadderResult empty;
    std::ostringstream e;
    write_csv(empty, e);
    CHECK(e.str() == std::string(kCsvHeader) + "\n");

    ExperimentConfig c = small_config();
    c.eps_ladder = {0.2};
    const LadderResult r = run_clt_ladder(c);
    std::stringstream js;
    write_json(r, js);
    CHECK(js.str().find(kLibraryVersion) != std::string::npos);
    CHECK(js.str().find("path_reuse") != std::string::npos);
    const LadderResult back = read_json(js);
    REQUIRE(back.rows.size() == 1);
    CHECK(format_csv_row(back.rows[0]) == format_csv_row(r.rows[0]));
    CHECK(format_config(back.config) == format_config(r.config));

    std::stringstream cs;
    write_csv(r, cs);
    const auto rows = read_csv(cs);
    REQUIRE(rows.size() == 1);
    CHECK(format_csv_row(rows[0]) == format_csv_row(r.rows[0]));

    const auto path = temp_path("emit.csv");
    emit_results(r, OutputFormat::CSV, path);
    CHECK(slurp(path) == cs.str());
    auto plot = path;
    plot.replace_extension(".dat");
    CHECK(slurp(plot).rfind("# eps scaled_var sigma2_target\n", 0) == 0);
    CHECK(output_format_from_string("json") == OutputFormat::JSON);
    CHECK_THROWS(output_format_from_string("xml"));
}

TEST_CASE("byte-identical csv across thread budgets") {
    std::string first;
    for (unsigned threads : {1u, 2u, 5u}) {
        ExperimentConfig c = small_config();
        c.threads = threads;
        c.out_csv = temp_path("threads_" + std::to_string(threads) + ".csv").string();
        run_clt_ladder(c);
        const std::string text = slurp(c.out_csv);
        if (first.empty()) first = text;
        CHECK(text == first);
    }
}

TEST_CASE("restart safety") {
    ExperimentConfig c = small_config();
    c.out_csv = temp_path("restart.csv").string();
    c.eps_ladder = {0.2};
    run_clt_ladder(c);
    const std::string partial = slurp(c.out_csv);

    // mark the saved row so that recomputation would be detected
    std::string edited = partial;
    const auto pos = edited.find("\n0.2") + 1;
    const auto comma = edited.find(',', pos);
    const auto comma2 = edited.find(',', comma + 1);
    edited.replace(comma + 1, comma2 - comma - 1, "41");
    {
        std::ofstream out(c.out_csv);
        out << edited;
    }
    c.eps_ladder = {0.2, 0.1};
    const LadderResult r = run_clt_ladder(c);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].n_paths == 41);
    CHECK(r.rows[1].n_paths == 40);
    const std::string full = slurp(c.out_csv);
    CHECK(full.rfind(edited, 0) == 0);
    CHECK(std::count(full.begin(), full.end(), '\n') == 3);
}

TEST_CASE("existence sweep separates the regimes") {
    ExperimentConfig c = small_config();
    c.grid_n = 256;
    c.n_paths = 300;
    c.scheme = Scheme::Trapezoid;
    c.eps_ladder = {0.3, 0.1, 0.03};
    c.hurst_list = {0.25, 0.4};
    const auto rows = run_existence_sweep(c);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].exists_l2);
    CHECK_FALSE(rows[1].exists_l2);
    MESSAGE("growth ratios " << rows[0].growth_ratio << " vs " << rows[1].growth_ratio);
    CHECK(rows[0].growth_ratio < rows[1].growth_ratio);
    CHECK(rows[1].monotone_growth);

    c.hurst_list = {1.5};
    CHECK_THROWS(run_existence_sweep(c));
    c.hurst_list.clear();
    CHECK_THROWS(run_existence_sweep(c));
}

TEST_CASE("thread budget resolution") {
    CHECK(resolve_threads(3) == 3);
    CHECK(resolve_threads(0) >= 1);
    std::vector<int> hit(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { hit[i] += 1; });
    CHECK(std::count(hit.begin(), hit.end(), 1) == 100);
    CHECK_THROWS(parallel_for(10, 2, [](std::size_t i) {
        if (i == 7) throw std::runtime_error("boom");
    }));
}
