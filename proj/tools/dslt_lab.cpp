// dslt-lab: command-line driver for path generation, estimators, CLT ladders,
// existence sweeps, quadrature checks and chaos coefficient tables.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dslt/estimator.hpp"
#include "dslt/experiment.hpp"
#include "dslt/fbm.hpp"
#include "dslt/parallel.hpp"
#include "dslt/pairwise.hpp"
#include "dslt/quad.hpp"

namespace {

using namespace dslt;

struct Common {
    double hurst = 1.0 / 3.0;
    int dim = 3;
    double t = 1.0;
    std::size_t grid_n = 1024;
    std::size_t paths = 2000;
    std::string eps = "0.1";
    std::uint64_t seed = 1;
    std::string scheme = "midpoint";
    std::string mu_convention = "signed";
    std::string prefactor = to_string(kElectedPrefactor);
    unsigned threads = 0;
    std::string out;
    std::string format = "csv";
};

void add_model_flags(CLI::App* app, Common& c) {
    app->add_option("--hurst", c.hurst, "Hurst index H in (0,1)");
    app->add_option("--dim", c.dim, "spatial dimension d");
    app->add_option("--t", c.t, "time horizon");
}

void add_run_flags(CLI::App* app, Common& c) {
    add_model_flags(app, c);
    app->add_option("--grid-n", c.grid_n, "number of grid intervals");
    app->add_option("--paths", c.paths, "number of sample paths");
    app->add_option("--eps", c.eps, "comma-separated regularization widths");
    app->add_option("--seed", c.seed, "master seed");
    app->add_option("--scheme", c.scheme, "midpoint | trapezoid");
    app->add_option("--mu-convention", c.mu_convention, "signed | absolute");
    app->add_option("--prefactor", c.prefactor, "per_coordinate | paper");
    app->add_option("--threads", c.threads, "worker threads (0: DSLT_THREADS or hardware)");
    app->add_option("--out", c.out, "output file or directory");
    app->add_option("--format", c.format, "csv | json");
}

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

HurstModel model_of(const Common& c) { return HurstModel::make(c.hurst, c.dim, c.t); }

ExperimentConfig config_of(const Common& c, const std::string& config_file, CLI::App* app) {
    ExperimentConfig cfg;
    if (!config_file.empty()) cfg = parse_config_file(config_file);
    // flags given explicitly on the command line override the file
    auto given = [&](const char* name) { return app->count(name) > 0 || config_file.empty(); };
    HurstModel m = cfg.model;
    if (given("--hurst")) m.H = c.hurst;
    if (given("--dim")) {
        m.d = c.dim;
        m.k.assign(static_cast<std::size_t>(c.dim), 0);
        m.k[0] = 1;
    }
    if (given("--t")) m.t = c.t;
    cfg.model = m;
    if (given("--grid-n")) cfg.grid_n = c.grid_n;
    if (given("--paths")) cfg.n_paths = c.paths;
    if (given("--eps")) cfg.eps_ladder = parse_real_list(c.eps);
    if (given("--seed")) cfg.master_seed = c.seed;
    if (given("--scheme")) cfg.scheme = scheme_from_string(c.scheme);
    if (given("--mu-convention")) cfg.mu_convention = mu_convention_from_string(c.mu_convention);
    if (given("--prefactor")) cfg.prefactor = prefactor_from_string(c.prefactor);
    if (given("--threads")) cfg.threads = c.threads;
    cfg.validate();
    return cfg;
}

int cmd_gen(const Common& c, const std::string& method) {
    const HurstModel model = model_of(c);
    const TimeGrid grid(c.grid_n, c.t);
    MethodRequest req = MethodRequest::Auto;
    if (method == "circulant") req = MethodRequest::CirculantEmbedding;
    else if (method == "cholesky") req = MethodRequest::Cholesky;
    else if (method != "auto") throw std::invalid_argument("unknown method '" + method + "'");
    const FbmGenerator gen(model, grid, req);
    const std::filesystem::path dir = c.out.empty() ? "." : c.out;
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < c.paths; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "path_%06zu.fbmp", i);
        write_path_file((dir / name).string(), gen.generate(derive_seed(c.seed, i)));
    }
    std::cout << "wrote " << c.paths << " path(s) to " << dir.string() << " using " << to_string(gen.method())
              << "\n";
    return 0;
}

int cmd_estimate(const Common& c, const std::string& path_file, const std::string& y_text,
                 const std::string& k_text) {
    FbmPath path;
    if (!path_file.empty()) {
        path = read_path_file(path_file);
    } else {
        path = generate_path(model_of(c), TimeGrid(c.grid_n, c.t), c.seed);
    }
    EstimatorRequest req;
    req.scheme = scheme_from_string(c.scheme);
    req.threads = resolve_threads(c.threads);
    if (!y_text.empty()) req.y = parse_real_list(y_text);
    if (!k_text.empty()) {
        for (double v : parse_real_list(k_text)) req.k.push_back(static_cast<int>(v));
    }
    const PrefactorMode mode = prefactor_from_string(c.prefactor);
    std::ostringstream o;
    if (c.format == "json") o << "[\n";
    else o << "eps,dslt,slt,first_chaos,n_pairs\n";
    const auto eps_list = parse_real_list(c.eps);
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        req.eps = eps_list[i];
        const auto v = dslt::dslt(path, req);
        const auto s = slt(path, req.eps, req.y, req.scheme, req.threads);
        const double fc = first_chaos(path, req.eps, mode, req.scheme);
        if (c.format == "json")
            o << "  {\"eps\": " << num(req.eps) << ", \"dslt\": " << num(v.value) << ", \"slt\": " << num(s.value)
              << ", \"first_chaos\": " << num(fc) << ", \"n_pairs\": " << v.n_pairs << "}"
              << (i + 1 < eps_list.size() ? "," : "") << "\n";
        else
            o << num(req.eps) << "," << num(v.value) << "," << num(s.value) << "," << num(fc) << "," << v.n_pairs
              << "\n";
    }
    if (c.format == "json") o << "]\n";
    if (c.out.empty()) {
        std::cout << o.str();
    } else {
        std::ofstream f(c.out);
        f << o.str();
    }
    return 0;
}

int cmd_clt(const ExperimentConfig& cfg_in, const Common& c) {
    ExperimentConfig cfg = cfg_in;
    const OutputFormat fmt = output_format_from_string(c.format);
    if (!c.out.empty() && fmt == OutputFormat::CSV) cfg.out_csv = c.out;
    const LadderResult res = run_clt_ladder(cfg);
    if (c.out.empty()) {
        if (fmt == OutputFormat::CSV) write_csv(res, std::cout);
        else write_json(res, std::cout);
        return 0;
    }
    if (fmt == OutputFormat::JSON) {
        emit_results(res, fmt, c.out);
    } else {
        // the CSV was written row by row; add the plot table beside it
        std::filesystem::path plot(c.out);
        plot.replace_extension(".dat");
        std::ofstream p(plot);
        write_plot_data(res, p);
    }
    std::cerr << "wrote " << res.rows.size() << " row(s) to " << c.out << "\n";
    return 0;
}

int cmd_existence(const ExperimentConfig& cfg_in, const Common& c, const std::string& hurst_list) {
    ExperimentConfig cfg = cfg_in;
    cfg.with_quadrature = false;
    if (!hurst_list.empty()) cfg.hurst_list = parse_real_list(hurst_list);
    const auto rows = run_existence_sweep(cfg);
    if (c.out.empty()) {
        write_existence_csv(rows, std::cout);
    } else {
        std::ofstream f(c.out);
        write_existence_csv(rows, f);
    }
    return 0;
}

int cmd_quadcheck(const Common& c, double rel_tol) {
    const HurstModel model = model_of(c);
    const MuConvention conv = mu_convention_from_string(c.mu_convention);
    const PrefactorMode mode = prefactor_from_string(c.prefactor);
    QuadSpec spec;
    spec.rel_tol = rel_tol;
    std::ostream& o = std::cout;
    o << "# model H=" << num(model.H) << " d=" << model.d << " t=" << num(model.t) << " prefactor=" << to_string(mode)
      << " mu=" << to_string(conv) << "\n";
    const bool critical = model.is_critical();
    if (critical && model.d >= 3) {
        o << "sigma_squared_closed_form," << num(sigma_squared(model)) << "\n";
        o << "sigma_squared_prefactor_mode," << num(sigma_squared(model, mode)) << "\n";
    }
    if (model.d == 2 && std::abs(model.H - 0.5) < 1e-12) o << "planar_target," << num(planar_sigma_squared(model.t)) << "\n";
    o << "eps,log_ratio_large,log_ratio_small,b_factor,ac_factor,factorized,v1,v2,v3,total,scaled,first_chaos_var,"
         "scaled_first_chaos\n";
    for (double eps : parse_real_list(c.eps)) {
        double r1 = NAN, r2 = NAN;
        FactorizedLimit fl{NAN, NAN, NAN};
        if (critical && eps < 1.0) {
            r1 = critical_log_integral_large_ratio(eps, model.H, model.d, spec);
            r2 = critical_log_integral_small_ratio(eps, model.H, model.d, spec);
            if (model.d >= 3 && 1.0 / std::log(1.0 / eps) < model.t) fl = v3_factorized_limit(model, eps, spec);
        }
        const auto v = variance_pieces(eps, model, conv, spec, mode);
        const double fc = first_chaos_variance(eps, model, spec, mode).value;
        const double s = scale_factor(model, eps);
        o << num(eps) << "," << num(r1) << "," << num(r2) << "," << num(fl.b_factor) << "," << num(fl.ac_factor)
          << "," << num(fl.value) << "," << num(v.v1) << "," << num(v.v2) << "," << num(v.v3) << ","
          << num(v.total) << "," << num(v.scaled) << "," << num(fc) << "," << num(fc * s * s) << "\n";
    }
    return 0;
}

void enumerate(int d, int q, std::vector<int>& cur, int pos, std::vector<std::vector<int>>& out) {
    if (pos == d - 1) {
        cur[pos] = q;
        out.push_back(cur);
        return;
    }
    for (int i = q; i >= 0; --i) {
        cur[pos] = i;
        enumerate(d, q - i, cur, pos + 1, out);
    }
}

int cmd_chaos(int dim, int max_order) {
    std::cout << "q_multi,q,rational_part,beta\n";
    for (int q = 1; q <= max_order; ++q) {
        std::vector<std::vector<int>> all;
        std::vector<int> cur(static_cast<std::size_t>(dim), 0);
        enumerate(dim, q, cur, 0, all);
        for (const auto& m : all) {
            std::string key;
            for (std::size_t i = 0; i < m.size(); ++i) key += (i ? " " : "") + std::to_string(m[i]);
            std::cout << "(" << key << ")," << q << "," << chaos_coefficient_rational(m).str() << ","
                      << num(chaos_coefficient(m)) << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dslt-lab: regularized derivative self-intersection local time of fBm"};
    app.require_subcommand(1);
    Common c;
    std::string config_file, method = "auto", path_file, y_text, k_text, hurst_list;
    double rel_tol = 1e-6;
    int max_order = 4;

    auto* gen = app.add_subcommand("gen", "write fBm path files");
    add_run_flags(gen, c);
    gen->add_option("--method", method, "auto | circulant | cholesky");

    auto* est = app.add_subcommand("estimate", "single-path DSLT, SLT and first chaos");
    add_run_flags(est, c);
    est->add_option("--path-file", path_file, "read the path instead of generating it");
    est->add_option("--y", y_text, "offset point, comma-separated");
    est->add_option("--k", k_text, "derivative multi-index, comma-separated");

    auto* clt = app.add_subcommand("clt", "Monte Carlo eps ladder with CLT statistics");
    add_run_flags(clt, c);
    clt->add_option("--config", config_file, "key = value configuration file");

    auto* ex = app.add_subcommand("existence", "L2 boundedness probe across Hurst indices");
    add_run_flags(ex, c);
    ex->add_option("--config", config_file, "key = value configuration file");
    ex->add_option("--hurst-list", hurst_list, "comma-separated Hurst indices");

    auto* qc = app.add_subcommand("quadcheck", "deterministic quadrature of variances and limits");
    add_run_flags(qc, c);
    qc->add_option("--rel-tol", rel_tol, "relative tolerance");

    auto* ch = app.add_subcommand("chaos", "chaos coefficient table");
    ch->add_option("--dim", c.dim, "spatial dimension d");
    ch->add_option("--max-order", max_order, "largest total order q");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*gen) return cmd_gen(c, method);
        if (*est) return cmd_estimate(c, path_file, y_text, k_text);
        if (*clt) return cmd_clt(config_of(c, config_file, clt), c);
        if (*ex) return cmd_existence(config_of(c, config_file, ex), c, hurst_list);
        if (*qc) return cmd_quadcheck(c, rel_tol);
        if (*ch) return cmd_chaos(c.dim, max_order);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
