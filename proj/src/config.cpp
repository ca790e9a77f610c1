#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dslt/experiment.hpp"

namespace dslt {

std::vector<double> ExperimentConfig::default_mc_ladder() {
    std::vector<double> v;
    for (int i = 2; i <= 6; ++i) v.push_back(std::pow(10.0, -0.5 * i));
    return v;
}

std::vector<double> ExperimentConfig::default_quad_ladder() {
    std::vector<double> v;
    for (int i = 2; i <= 8; ++i) v.push_back(std::pow(10.0, -i));
    return v;
}

void ExperimentConfig::validate() const {
    model.validate();
    if (grid_n < 2) throw std::invalid_argument("config: grid_n must be >= 2");
    if (n_paths < 2) throw std::invalid_argument("config: n_paths must be >= 2");
    for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
        if (!(eps_ladder[i] > 0.0)) throw std::invalid_argument("config: eps values must be > 0");
        if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
            throw std::invalid_argument("config: eps ladder must be strictly decreasing");
    }
    if (!(quad_rel_tol > 0.0)) throw std::invalid_argument("config: quad_rel_tol must be > 0");
    for (double h : hurst_list)
        if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("config: hurst_list entries must lie in (0,1)");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
    }
    if (pos != v.size()) throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
    return x;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
    Int x{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
    return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: '" + key + "' expects true/false, got '" + v + "'");
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

std::string real_text(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class T, class F>
std::string joined(const std::vector<T>& v, F fmt) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_commas(s)) {
        if (item.empty()) continue;
        out.push_back(parse_real("list", item));
    }
    return out;
}

ExperimentConfig parse_config(std::istream& in) {
    static const std::set<std::string> known = {
        "hurst", "dim", "t", "k", "grid_n", "n_paths", "eps", "seed", "scheme", "mu_convention", "prefactor",
        "threads", "with_quadrature", "quad_rel_tol", "hurst_list", "out_csv", "out_json", "out_plot"};
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
        if (kv.count(key)) throw std::invalid_argument("config: duplicate key '" + key + "'");
        kv[key] = value;
    }

    ExperimentConfig cfg;
    double H = cfg.model.H;
    int d = cfg.model.d;
    double t = cfg.model.t;
    std::vector<int> k;
    if (kv.count("hurst")) H = parse_real("hurst", kv["hurst"]);
    if (kv.count("dim")) d = parse_int<int>("dim", kv["dim"]);
    if (kv.count("t")) t = parse_real("t", kv["t"]);
    if (kv.count("k"))
        for (const auto& item : split_commas(kv["k"])) k.push_back(parse_int<int>("k", item));
    HurstModel m;
    m.H = H;
    m.d = d;
    m.t = t;
    m.k = k;
    if (m.k.empty() && d >= 1) {
        m.k.assign(static_cast<std::size_t>(d), 0);
        m.k[0] = 1;
    }
    cfg.model = m;

    if (kv.count("grid_n")) cfg.grid_n = parse_int<std::size_t>("grid_n", kv["grid_n"]);
    if (kv.count("n_paths")) cfg.n_paths = parse_int<std::size_t>("n_paths", kv["n_paths"]);
    if (kv.count("eps")) cfg.eps_ladder = parse_real_list(kv["eps"]);
    if (kv.count("seed")) cfg.master_seed = parse_int<std::uint64_t>("seed", kv["seed"]);
    if (kv.count("scheme")) cfg.scheme = scheme_from_string(kv["scheme"]);
    if (kv.count("mu_convention")) cfg.mu_convention = mu_convention_from_string(kv["mu_convention"]);
    if (kv.count("prefactor")) cfg.prefactor = prefactor_from_string(kv["prefactor"]);
    if (kv.count("threads")) cfg.threads = parse_int<unsigned>("threads", kv["threads"]);
    if (kv.count("with_quadrature")) cfg.with_quadrature = parse_bool("with_quadrature", kv["with_quadrature"]);
    if (kv.count("quad_rel_tol")) cfg.quad_rel_tol = parse_real("quad_rel_tol", kv["quad_rel_tol"]);
    if (kv.count("hurst_list")) cfg.hurst_list = parse_real_list(kv["hurst_list"]);
    if (kv.count("out_csv")) cfg.out_csv = kv["out_csv"];
    if (kv.count("out_json")) cfg.out_json = kv["out_json"];
    if (kv.count("out_plot")) cfg.out_plot = kv["out_plot"];
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    return parse_config(in);
}

std::string format_config(const ExperimentConfig& cfg) {
    std::ostringstream o;
    o << "hurst = " << real_text(cfg.model.H) << "\n";
    o << "dim = " << cfg.model.d << "\n";
    o << "t = " << real_text(cfg.model.t) << "\n";
    o << "k = " << joined(cfg.model.k, [](int x) { return std::to_string(x); }) << "\n";
    o << "grid_n = " << cfg.grid_n << "\n";
    o << "n_paths = " << cfg.n_paths << "\n";
    o << "eps = " << joined(cfg.eps_ladder, real_text) << "\n";
    o << "seed = " << cfg.master_seed << "\n";
    o << "scheme = " << to_string(cfg.scheme) << "\n";
    o << "mu_convention = " << to_string(cfg.mu_convention) << "\n";
    o << "prefactor = " << to_string(cfg.prefactor) << "\n";
    o << "threads = " << cfg.threads << "\n";
    o << "with_quadrature = " << (cfg.with_quadrature ? "true" : "false") << "\n";
    o << "quad_rel_tol = " << real_text(cfg.quad_rel_tol) << "\n";
    if (!cfg.hurst_list.empty()) o << "hurst_list = " << joined(cfg.hurst_list, real_text) << "\n";
    if (!cfg.out_csv.empty()) o << "out_csv = " << cfg.out_csv << "\n";
    if (!cfg.out_json.empty()) o << "out_json = " << cfg.out_json << "\n";
    if (!cfg.out_plot.empty()) o << "out_plot = " << cfg.out_plot << "\n";
    return o.str();
}

}  // namespace dslt
