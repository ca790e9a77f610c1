// Acceptance runner: `acceptance [N]` evaluates criterion N (or all of them)
// and prints one PASS/FAIL line per criterion. Exit status is nonzero when
// any evaluated criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dslt/estimator.hpp"
#include "dslt/experiment.hpp"
#include "dslt/fbm.hpp"
#include "dslt/pairwise.hpp"
#include "dslt/quad.hpp"
#include "oracles.hpp"

using namespace dslt;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Stats {
    double mean, var, se_mean, se_var;
};

Stats stats(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double m = 0;
    for (double v : x) m += v;
    m /= n;
    double s2 = 0, s4 = 0;
    for (double v : x) {
        s2 += (v - m) * (v - m);
        s4 += std::pow(v - m, 4);
    }
    const double var = s2 / (n - 1);
    return {m, var, std::sqrt(var / n), std::sqrt((s4 / n - var * var) / n)};
}

const HurstModel kCritical3 = HurstModel::make(1.0 / 3.0, 3);

QuadSpec tol(double rel) {
    QuadSpec s;
    s.rel_tol = rel;
    return s;
}

// 1. exact mu identities
Outcome criterion1() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    for (double H : {0.25, 1.0 / 3.0, 0.5})
        for (int region = 0; region < 3; ++region)
            for (int i = 0; i < 10000; ++i) {
                const double a = u(rng), b = u(rng), c = u(rng);
                const auto t = oracle::times_for(region, a, b, c, u(rng));
                const double ref = oracle::increment_cov(t.r, t.s, t.r2, t.s2, H);
                worst = std::max(worst, std::abs(mu_exact(PairGeometry{kRegions[region], a, b, c, H}) - ref));
            }
    return {worst < 1e-11, fmt("max |mu - bilinearity oracle| = %.3e over 9e4 geometries (limit 1e-11)", worst)};
}

// 2. pair kernel against tensor Gauss-Hermite
Outcome criterion2() {
    const auto rule = oracle::gauss_hermite(200);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1), e(0.1, 2.0);
    double worst = 0, worst_other = 1e300;
    const PrefactorMode other =
        kElectedPrefactor == PrefactorMode::Paper ? PrefactorMode::PerCoordinate : PrefactorMode::Paper;
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng), c = u(rng), f = u(rng);
        const Cov2 s{a * a + b * b, c * c + f * f, a * c + b * f};
        const double eps = e(rng);
        const int d = 2 + i % 3;
        const double ref = oracle::derivative_pair_expectation(eps, s.s11, s.s22, s.s12, d, rule);
        if (std::abs(ref) < 1e-300) continue;
        worst = std::max(worst, std::abs(pair_kernel(eps, s, d, kElectedPrefactor) / ref - 1));
        worst_other = std::min(worst_other, std::abs(pair_kernel(eps, s, d, other) / ref - 1));
    }
    return {worst < 1e-6, fmt("elected prefactor mode = %s; worst rel err %.3e (limit 1e-6); mode %s best rel err %.3f",
                              to_string(kElectedPrefactor).c_str(), worst, to_string(other).c_str(), worst_other)};
}

// 3. critical log-integral constants
Outcome criterion3() {
    const double H = 1.0 / 3.0;
    const double l4 = critical_log_integral_large_ratio(1e-4, H, 3);
    const double l8 = critical_log_integral_large_ratio(1e-8, H, 3);
    const double s4 = critical_log_integral_small_ratio(1e-4, H, 3);
    const double s8 = critical_log_integral_small_ratio(1e-8, H, 3);
    const bool ok = l8 >= 2.7 && l8 <= 3.3 && std::abs(l8 - 3) < std::abs(l4 - 3) && s8 >= 1.35 && s8 <= 1.65 &&
                    std::abs(s8 - 1.5) < std::abs(s4 - 1.5);
    return {ok, fmt("large ratio %.4f (1e-4) -> %.4f (1e-8), limit 3; small ratio %.4f -> %.4f, limit 1.5", l4, l8,
                    s4, s8)};
}

// 4. sigma^2 arithmetic
Outcome criterion4() {
    const double pi = std::numbers::pi;
    const double s3 = sigma_squared(kCritical3);
    const double s4 = sigma_squared(HurstModel::make(0.25, 4));
    const double e3 = std::abs(s3 - 54 / std::pow(2 * pi, 3));
    const double e4 = std::abs(s4 - 32 / std::pow(2 * pi, 4));
    return {e3 < 1e-12 && e4 < 1e-12,
            fmt("sigma^2(d=3) = %.10f (err %.1e); sigma^2(d=4) = %.10f (err %.1e)", s3, e3, s4, e4)};
}

// 5. factorized disjoint-ordering limit
Outcome criterion5() {
    const FactorizedLimit f4 = v3_factorized_limit(kCritical3, 1e-4);
    const FactorizedLimit f8 = v3_factorized_limit(kCritical3, 1e-8);
    const double s2 = sigma_squared(kCritical3);
    const double eb = std::abs(f8.b_factor - 3) / 3;
    const double eac = std::abs(f8.ac_factor - 9) / 9;
    const double ev = std::abs(f8.value - s2) / s2;
    return {eb <= 0.10 && eac <= 0.10 && ev <= 0.15,
            fmt("eps=1e-8: b-factor %.4f (target 3, rel gap %.3f), ac-factor %.4f (target 9, rel gap %.3f), "
                "product %.4f vs sigma^2 %.4f (rel gap %.3f); at eps=1e-4: b %.4f, ac %.4f, product %.4f",
                f8.b_factor, eb, f8.ac_factor, eac, f8.value, s2, ev, f4.b_factor, f4.ac_factor, f4.value)};
}

// 6. vanishing nested and interleaved pieces
Outcome criterion6() {
    const QuadSpec spec = tol(1e-6);
    std::vector<double> s1, s2;
    std::string trail;
    for (double eps : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
        const double k = std::pow(scale_factor(kCritical3, eps), 2);
        s1.push_back(k * variance_piece(Region::D1, eps, kCritical3, MuConvention::Signed, spec).value);
        s2.push_back(k * variance_piece(Region::D2, eps, kCritical3, MuConvention::Signed, spec).value);
        trail += fmt(" [%.0e: %.3e, %.3e]", eps, s1.back(), s2.back());
    }
    bool mono = true;
    for (std::size_t i = 1; i < s1.size(); ++i) mono = mono && s1[i] < s1[i - 1] && s2[i] < s2[i - 1];
    const double target = sigma_squared(kCritical3, kElectedPrefactor);
    const double last = s1.back() + s2.back();
    return {mono && std::abs(last) < 0.1 * target,
            fmt("scaled (V1, V2):%s; monotone=%d; V1+V2 at 1e-7 = %.3e vs 0.1*sigma^2 = %.3e", trail.c_str(),
                mono ? 1 : 0, last, 0.1 * target)};
}

ExperimentConfig mc_config(const HurstModel& m, std::uint64_t seed) {
    ExperimentConfig c;
    c.model = m;
    c.grid_n = 1024;
    c.n_paths = 2000;
    c.master_seed = seed;
    c.scheme = Scheme::Trapezoid;
    c.with_quadrature = false;
    return c;
}

// 7. Monte Carlo second moment against quadrature
Outcome criterion7() {
    const ExperimentConfig c = mc_config(kCritical3, 7);
    bool ok = true;
    std::string detail = "trapezoid scheme, signed mu;";
    for (double eps : {0.1, 0.02}) {
        const EnsembleSamples s = sample_ensemble(c, eps);
        std::vector<double> sq;
        for (double v : s.dslt) sq.push_back(v * v);
        const Stats st = stats(sq);
        const double q = variance_pieces(eps, kCritical3, MuConvention::Signed, tol(1e-6)).total;
        const double z = (st.mean - q) / st.se_mean;
        ok = ok && std::abs(z) < 3;
        detail += fmt(" eps=%g: MC %.5e +- %.2e, quad %.5e, z=%.2f;", eps, st.mean, st.se_mean, q, z);
    }
    return {ok, detail};
}

std::vector<double> chaos_samples(const HurstModel& m, std::size_t n, std::size_t paths, double eps,
                                  std::uint64_t seed, Scheme scheme) {
    const FbmGenerator gen(m, TimeGrid(n, m.t));
    std::vector<double> out(paths);
    for (std::size_t i = 0; i < paths; ++i)
        out[i] = first_chaos(gen.generate(derive_seed(seed, i)), eps, kElectedPrefactor, scheme);
    return out;
}

// 8. first chaos: normality, variance, scaled trend
Outcome criterion8() {
    int normal = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto x = chaos_samples(kCritical3, 1024, 2000, 0.01, 800 + rep, Scheme::Midpoint);
        if (normality_stats(x).ks_p > 0.01) ++normal;
    }
    const bool a = normal >= 19;

    const auto x = chaos_samples(kCritical3, 1024, 2000, 0.01, 8, Scheme::Trapezoid);
    std::vector<double> sq;
    for (double v : x) sq.push_back(v * v);
    const Stats st = stats(sq);
    const double q = first_chaos_variance(0.01, kCritical3, tol(1e-7)).value;
    const double z = (st.mean - q) / st.se_mean;
    const bool b = std::abs(z) < 3;

    const double target = sigma_squared(kCritical3, kElectedPrefactor);
    std::vector<double> gaps;
    std::string trail;
    for (double eps : ExperimentConfig::default_quad_ladder()) {
        const double v = first_chaos_variance(eps, kCritical3, tol(1e-6)).value * std::pow(scale_factor(kCritical3, eps), 2);
        gaps.push_back(std::abs(v - target));
        trail += fmt(" %.3e", v);
    }
    bool c = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) c = c && gaps[i] < gaps[i - 1];
    return {a && b && c,
            fmt("(a) %d/20 ensembles with ks_p > 0.01 [%s]; (b) trapezoid MC E[I1^2] %.5e +- %.2e vs quad %.5e, z=%.2f "
                "[%s]; (c) scaled variance along 1e-2..1e-8:%s vs target %.4e [%s]",
                normal, a ? "pass" : "fail", st.mean, st.se_mean, q, z, b ? "pass" : "fail", trail.c_str(), target,
                c ? "pass" : "fail")};
}

// 9. planar critical case
Outcome criterion9() {
    const HurstModel m = HurstModel::make(0.5, 2);
    const double target = planar_sigma_squared(1.0);
    const ExperimentConfig c = mc_config(m, 9);
    double gap[2];
    std::string detail;
    int i = 0;
    for (double eps : {0.1, 0.01}) {
        const LadderRow row = summarize_row(c, eps, sample_ensemble(c, eps));
        gap[i++] = std::abs(row.scaled_var - target);
        detail += fmt("MC scaled_var(eps=%g) = %.5f; ", eps, row.scaled_var);
    }
    const double q = variance_pieces(1e-6, m, MuConvention::Signed, tol(1e-6)).scaled;
    const double rel = std::abs(q - target) / target;
    detail += fmt("target %.5f; gap %.5f (0.1) vs %.5f (0.01); quadrature scaled at 1e-6 = %.5f (rel gap %.2f)", target,
                  gap[0], gap[1], q, rel);
    return {gap[1] < gap[0] && rel <= 0.2, detail};
}

// 10. symmetry and determinism
Outcome criterion10() {
    const FbmPath p = generate_path(kCritical3, TimeGrid(512, 1.0), 10);
    const FbmPath mp = p.negated();
    bool odd = true;
    for (Scheme s : {Scheme::Midpoint, Scheme::Trapezoid}) {
        EstimatorRequest r;
        r.eps = 0.02;
        r.scheme = s;
        odd = odd && dslt::dslt(mp, r).value == -dslt::dslt(p, r).value;
    }

    const auto dir = std::filesystem::temp_directory_path() / "dslt_acceptance";
    std::filesystem::create_directories(dir);
    std::string first;
    bool identical = true;
    for (unsigned threads : {1u, 4u}) {
        ExperimentConfig c;
        c.model = kCritical3;
        c.grid_n = 256;
        c.n_paths = 64;
        c.eps_ladder = {0.1, 0.05};
        c.master_seed = 1010;
        c.with_quadrature = false;
        c.threads = threads;
        c.out_csv = (dir / ("threads" + std::to_string(threads) + ".csv")).string();
        std::filesystem::remove(c.out_csv);
        run_clt_ladder(c);
        std::ifstream in(c.out_csv);
        std::stringstream ss;
        ss << in.rdbuf();
        if (first.empty()) first = ss.str();
        identical = identical && ss.str() == first;
    }

    const std::size_t n = 1024;
    const FbmGenerator gen(kCritical3, TimeGrid(n, 1.0));
    std::vector<std::vector<double>> sq(3);
    for (std::size_t i = 0; i < 2000; ++i) {
        const FbmPath q = gen.generate(derive_seed(1011, i));
        const auto x = q.component(0);
        sq[0].push_back(x[n / 4] * x[n / 4]);
        sq[1].push_back(x[n / 2] * x[n / 2]);
        sq[2].push_back(x[n] * x[n]);
    }
    bool var_ok = true;
    std::string trail;
    const double times[] = {0.25, 0.5, 1.0};
    for (int k = 0; k < 3; ++k) {
        const Stats st = stats(sq[k]);
        const double target = std::pow(times[k], 2.0 / 3.0);
        const double z = (st.mean - target) / st.se_mean;
        var_ok = var_ok && std::abs(z) < 3;
        trail += fmt(" t=%.2f z=%.2f", times[k], z);
    }
    return {odd && identical && var_ok, fmt("negation exact=%d; csv identical across 1/4 threads=%d; variance:%s",
                                            odd ? 1 : 0, identical ? 1 : 0, trail.c_str())};
}

struct Criterion {
    int id;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, 5, criterion1},    {2, 30, criterion2},   {3, 10, criterion3},   {4, 1e9, criterion4},
        {5, 120, criterion5},  {6, 300, criterion6},  {7, 1200, criterion7}, {8, 1200, criterion8},
        {9, 1200, criterion9}, {10, 300, criterion10},
    };
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    int failures = 0;
    for (const auto& c : all) {
        if (only && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failures;
        std::printf("criterion %d: %s - %s (%.1f s%s)\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                    in_time ? "" : ", over time budget");
        std::fflush(stdout);
    }
    return failures ? 1 : 0;
}
