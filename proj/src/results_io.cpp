#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dslt/experiment.hpp"

namespace dslt {

namespace {

using nlohmann::json;

std::string real_text(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double real_from_text(const std::string& s) {
    if (s == "nan" || s == "NaN" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::stod(s);
}

json real_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double real_from_json(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::string format_csv_row(const LadderRow& r) {
    std::string s = real_text(r.eps);
    s += "," + std::to_string(r.n_paths);
    s += "," + std::to_string(r.grid_n);
    for (double v : {r.raw_mean, r.raw_var, r.scale_factor, r.scaled_var, r.sigma2_target, r.ks_stat, r.ks_p,
                     r.skewness, r.excess_kurtosis, r.first_chaos_var, r.quad_var_total})
        s += "," + real_text(v);
    return s;
}

void write_csv(const LadderResult& result, std::ostream& out) {
    out << kCsvHeader << "\n";
    for (const auto& row : result.rows) out << format_csv_row(row) << "\n";
}

std::vector<LadderRow> read_csv(std::istream& in) {
    std::vector<LadderRow> rows;
    std::string line;
    if (!std::getline(in, line)) return rows;
    if (line != kCsvHeader) throw std::runtime_error("ladder CSV: unexpected header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 14) throw std::runtime_error("ladder CSV: expected 14 fields");
        LadderRow r;
        r.eps = real_from_text(f[0]);
        r.n_paths = std::stoull(f[1]);
        r.grid_n = std::stoull(f[2]);
        double* slots[] = {&r.raw_mean, &r.raw_var, &r.scale_factor, &r.scaled_var, &r.sigma2_target, &r.ks_stat,
                           &r.ks_p, &r.skewness, &r.excess_kurtosis, &r.first_chaos_var, &r.quad_var_total};
        for (std::size_t i = 0; i < 11; ++i) *slots[i] = real_from_text(f[3 + i]);
        r.ks_reliable = !std::isnan(r.ks_p);
        rows.push_back(r);
    }
    return rows;
}

void write_json(const LadderResult& result, std::ostream& out) {
    json j;
    j["version"] = kLibraryVersion;
    j["config"] = format_config(result.config);
    j["path_reuse"] = "paths are shared across eps rows (seed = derive_seed(master_seed, path index))";
    j["rows"] = json::array();
    for (const auto& r : result.rows) {
        j["rows"].push_back({{"eps", real_json(r.eps)},
                             {"n_paths", r.n_paths},
                             {"grid_n", r.grid_n},
                             {"raw_mean", real_json(r.raw_mean)},
                             {"raw_var", real_json(r.raw_var)},
                             {"scale_factor", real_json(r.scale_factor)},
                             {"scaled_var", real_json(r.scaled_var)},
                             {"sigma2_target", real_json(r.sigma2_target)},
                             {"ks_stat", real_json(r.ks_stat)},
                             {"ks_p", real_json(r.ks_p)},
                             {"ks_p_reliable", r.ks_reliable},
                             {"skewness", real_json(r.skewness)},
                             {"excess_kurtosis", real_json(r.excess_kurtosis)},
                             {"first_chaos_var", real_json(r.first_chaos_var)},
                             {"quad_var_total", real_json(r.quad_var_total)}});
    }
    out << j.dump(2) << "\n";
}

LadderResult read_json(std::istream& in) {
    const json j = json::parse(in);
    LadderResult result;
    std::istringstream cfg(j.at("config").get<std::string>());
    result.config = parse_config(cfg);
    for (const auto& e : j.at("rows")) {
        LadderRow r;
        r.eps = real_from_json(e.at("eps"));
        r.n_paths = e.at("n_paths").get<std::size_t>();
        r.grid_n = e.at("grid_n").get<std::size_t>();
        r.raw_mean = real_from_json(e.at("raw_mean"));
        r.raw_var = real_from_json(e.at("raw_var"));
        r.scale_factor = real_from_json(e.at("scale_factor"));
        r.scaled_var = real_from_json(e.at("scaled_var"));
        r.sigma2_target = real_from_json(e.at("sigma2_target"));
        r.ks_stat = real_from_json(e.at("ks_stat"));
        r.ks_p = real_from_json(e.at("ks_p"));
        r.ks_reliable = e.at("ks_p_reliable").get<bool>();
        r.skewness = real_from_json(e.at("skewness"));
        r.excess_kurtosis = real_from_json(e.at("excess_kurtosis"));
        r.first_chaos_var = real_from_json(e.at("first_chaos_var"));
        r.quad_var_total = real_from_json(e.at("quad_var_total"));
        result.rows.push_back(r);
    }
    return result;
}

void write_plot_data(const LadderResult& result, std::ostream& out) {
    out << "# eps scaled_var sigma2_target\n";
    for (const auto& r : result.rows)
        out << real_text(r.eps) << " " << real_text(r.scaled_var) << " " << real_text(r.sigma2_target) << "\n";
}

OutputFormat output_format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::CSV;
    if (s == "json") return OutputFormat::JSON;
    throw std::invalid_argument("unknown output format '" + s + "'");
}

void emit_results(const LadderResult& result, OutputFormat format, const std::filesystem::path& path) {
    {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        if (format == OutputFormat::CSV)
            write_csv(result, out);
        else
            write_json(result, out);
        if (!out) throw std::runtime_error("write failed for " + path.string());
    }
    std::filesystem::path plot = path;
    plot.replace_extension(".dat");
    std::ofstream out(plot);
    if (!out) throw std::runtime_error("cannot write " + plot.string());
    write_plot_data(result, out);
}

void write_existence_csv(const std::vector<ExistenceRow>& rows, std::ostream& out) {
    out << "H,exists_l2,threshold,eps,raw_var,growth_ratio,monotone_growth\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.eps.size(); ++i) {
            out << real_text(r.H) << "," << (r.exists_l2 ? 1 : 0) << "," << real_text(r.threshold) << ","
                << real_text(r.eps[i]) << "," << real_text(r.raw_var[i]) << "," << real_text(r.growth_ratio) << ","
                << (r.monotone_growth ? 1 : 0) << "\n";
        }
    }
}

}  // namespace dslt
