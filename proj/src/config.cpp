#include "mmwave/config.hpp"

#include "mmwave/sampling.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mmwave {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

double to_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: " + key + ": expected a number, got '" + text + "'");
    }
}

long long to_integer(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: " + key + ": expected an integer, got '" + text + "'");
    }
}

std::vector<double> to_list(const std::string& key, const std::string& text, double scale = 1.0) {
    std::vector<double> values;
    for (const auto& part : split(text, ',')) values.push_back(scale * to_double(key, part));
    return values;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> get(const std::string& key) const {
        if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return trim(*v);
        return std::nullopt;
    }

    void read(const std::string& key, int& out) const {
        if (auto v = get(key)) out = static_cast<int>(to_integer(key, *v));
    }
    void read(const std::string& key, long long& out) const {
        if (auto v = get(key)) out = to_integer(key, *v);
    }
    void read(const std::string& key, double& out, double scale = 1.0) const {
        if (auto v = get(key)) out = scale * to_double(key, *v);
    }
    void read(const std::string& key, std::vector<double>& out, double scale = 1.0) const {
        if (auto v = get(key)) out = to_list(key, *v, scale);
    }
    void read(const std::string& key, bool& out) const {
        if (auto v = get(key)) {
            if (*v == "true" || *v == "1" || *v == "yes") out = true;
            else if (*v == "false" || *v == "0" || *v == "no") out = false;
            else throw std::runtime_error("config: " + key + ": expected true/false, got '" + *v + "'");
        }
    }

private:
    const pt::ptree& tree_;
};

std::string number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + number(v[k]);
    return s;
}

}  // namespace

Seed parse_seed(const std::string& text) {
    try {
        std::size_t used = 0;
        if (!text.empty() && text.front() == '-') throw std::invalid_argument(text);
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return static_cast<Seed>(v);
    } catch (const std::exception&) {
        throw std::runtime_error("seed: expected an unsigned 64-bit integer, got '" + text + "'");
    }
}

ExperimentConfig::ExperimentConfig() {
    for (int k = 0; k <= 10; ++k) gamma_max.push_back(0.05 * k * kPi);
}

Index ExperimentConfig::sample_count() const {
    return num_samples ? *num_samples : sample_count_for_density(num_ms, num_bs, density);
}

Index ExperimentConfig::sample_count(double p) const { return sample_count_for_density(num_ms, num_bs, p); }

double ExperimentConfig::step_size_or_default() const { return step_size ? *step_size : default_step_size(density); }

std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> errors;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };
    require(num_ms >= 1 && num_bs >= 1, "dimensions: n_ms and n_bs must be positive");
    require(num_rf_ms >= 1 && num_ms % std::max(num_rf_ms, 1) == 0, "dimensions: n_rf_ms must divide n_ms");
    require(num_rf_bs >= 1 && num_bs % std::max(num_rf_bs, 1) == 0, "dimensions: n_rf_bs must divide n_bs");
    require(element_spacing > 0, "dimensions: element_spacing must be positive");
    require(paths >= 1, "channel: paths must be >= 1");
    require(gain_variance > 0, "channel: gain_variance must be positive");
    require(gamma_max_ms >= 0 && gamma_max_bs >= 0, "channel: gamma_max must be >= 0");
    require(pilot != 0.0, "sampling: pilot must be nonzero");
    require(!step_size || *step_size > 0, "svp: step_size must be positive");
    require(tolerance_floor >= 0, "svp: tolerance_floor must be >= 0");
    require(max_iterations >= 1, "svp: max_iterations must be >= 1");
    require(!omp_iterations || *omp_iterations >= 1, "omp: iterations must be >= 1");
    require(redundant_grid_ms >= num_ms && redundant_grid_bs >= num_bs, "omp: redundant grids must be at least the array sizes");
    require(element_spacing >= 0.5, "omp: grid angles are not realizable for element_spacing < 0.5");
    require(convergence_iterations >= 1, "convergence: iterations must be >= 1");
    require(!trials || *trials >= 1, "run: trials must be >= 1");
    require(miss_trials >= 0, "missprob: empirical_trials must be >= 0");
    for (double s : step_sizes) require(s > 0, "sweep: step sizes must be positive");
    for (double g : gamma_max) require(g >= 0, "sweep: gamma_max values must be >= 0");
    require(!pnr_db.empty(), "sweep: pnr_db must not be empty");

    if (num_ms >= 1 && num_bs >= 1 && num_rf_ms >= 1 && num_ms % num_rf_ms == 0) {
        auto check_m = [&](const std::string& what, Index m) {
            if (auto msg = check_sample_count(num_ms, num_bs, num_rf_ms, m); !msg.empty())
                errors.push_back(what + ": " + msg);
        };
        check_m("sampling", sample_count());
        for (double p : densities) {
            require(p > 0 && p <= 1, "sweep: densities must be in (0, 1]");
            check_m("sweep density " + number(p), sample_count(p));
        }
    }
    for (const auto& c : miss_cases) {
        if (auto msg = check_sample_count(c.num_ms, c.num_bs, c.num_rf_ms, c.num_samples); !msg.empty())
            errors.push_back("missprob case " + std::to_string(c.num_ms) + "x" + std::to_string(c.num_bs) + ": " + msg);
    }
    return errors;
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream s;
    s << "num_ms=" << num_ms << ";num_bs=" << num_bs << ";num_rf_ms=" << num_rf_ms << ";num_rf_bs=" << num_rf_bs
      << ";element_spacing=" << number(element_spacing) << ";paths=" << paths
      << ";gain_variance=" << number(gain_variance) << ";gamma_max_ms=" << number(gamma_max_ms)
      << ";gamma_max_bs=" << number(gamma_max_bs) << ";density=" << number(density)
      << ";num_samples=" << (num_samples ? std::to_string(*num_samples) : "auto") << ";pilot=" << number(pilot)
      << ";step_size=" << (step_size ? number(*step_size) : "auto")
      << ";tolerance_floor=" << number(tolerance_floor) << ";max_iterations=" << max_iterations
      << ";projection=" << (projection == ProjectionMethod::direct_svd ? "svd" : "gram")
      << ";redundant=" << redundant << ";redundant_grid_ms=" << redundant_grid_ms
      << ";redundant_grid_bs=" << redundant_grid_bs
      << ";omp_iterations=" << (omp_iterations ? std::to_string(*omp_iterations) : "matched")
      << ";pnr_db=" << list(pnr_db) << ";densities=" << list(densities) << ";step_sizes=" << list(step_sizes)
      << ";gamma_max=" << list(gamma_max) << ";mismatch=" << static_cast<int>(mismatch) << ";snr_db=" << list(snr_db)
      << ";convergence_pnr_db=" << number(convergence_pnr_db) << ";convergence_iterations=" << convergence_iterations
      << ";se_pnr_db=" << number(se_pnr_db) << ";se_setting=" << (se_setting == SelectionSetting::A ? "A" : "B")
      << ";miss_cases=";
    for (const auto& c : miss_cases) s << c.num_ms << ':' << c.num_bs << ':' << c.num_rf_ms << ':' << c.num_samples << ',';
    s << ";miss_trials=" << miss_trials << ";trials=" << (trials ? std::to_string(*trials) : "default")
      << ";master_seed=" << master_seed;
    return s.str();
}

std::string ExperimentConfig::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_text()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }
    const Reader r(tree);
    ExperimentConfig c;

    r.read("dimensions.n_ms", c.num_ms);
    r.read("dimensions.n_bs", c.num_bs);
    r.read("dimensions.n_rf_ms", c.num_rf_ms);
    r.read("dimensions.n_rf_bs", c.num_rf_bs);
    r.read("dimensions.element_spacing", c.element_spacing);

    r.read("channel.paths", c.paths);
    r.read("channel.gain_variance", c.gain_variance);
    r.read("channel.gamma_max_ms", c.gamma_max_ms, kPi);
    r.read("channel.gamma_max_bs", c.gamma_max_bs, kPi);

    r.read("sampling.density", c.density);
    if (auto v = r.get("sampling.num_samples")) c.num_samples = to_integer("sampling.num_samples", *v);
    r.read("sampling.pilot", c.pilot);

    if (auto v = r.get("svp.step_size")) c.step_size = to_double("svp.step_size", *v);
    r.read("svp.tolerance_floor", c.tolerance_floor);
    r.read("svp.max_iterations", c.max_iterations);
    if (auto v = r.get("svp.projection")) {
        if (*v == "svd") c.projection = ProjectionMethod::direct_svd;
        else if (*v == "gram") c.projection = ProjectionMethod::gram_eigendecomposition;
        else throw std::runtime_error("config: svp.projection: expected 'svd' or 'gram', got '" + *v + "'");
    }

    r.read("omp.redundant", c.redundant);
    r.read("omp.redundant_grid_ms", c.redundant_grid_ms);
    r.read("omp.redundant_grid_bs", c.redundant_grid_bs);
    if (auto v = r.get("omp.iterations")) {
        if (*v != "matched") c.omp_iterations = static_cast<int>(to_integer("omp.iterations", *v));
    }

    r.read("sweep.pnr_db", c.pnr_db);
    r.read("sweep.densities", c.densities);
    r.read("sweep.step_sizes", c.step_sizes);
    r.read("sweep.gamma_max", c.gamma_max, kPi);
    if (auto v = r.get("sweep.mismatch")) {
        if (*v == "both") c.mismatch = MismatchTerminals::both;
        else if (*v == "ms") c.mismatch = MismatchTerminals::ms;
        else if (*v == "bs") c.mismatch = MismatchTerminals::bs;
        else throw std::runtime_error("config: sweep.mismatch: expected both, ms or bs, got '" + *v + "'");
    }
    r.read("sweep.snr_db", c.snr_db);

    r.read("convergence.pnr_db", c.convergence_pnr_db);
    r.read("convergence.iterations", c.convergence_iterations);

    r.read("se.pnr_db", c.se_pnr_db);
    if (auto v = r.get("se.setting")) {
        if (*v == "A" || *v == "a") c.se_setting = SelectionSetting::A;
        else if (*v == "B" || *v == "b") c.se_setting = SelectionSetting::B;
        else throw std::runtime_error("config: se.setting: expected A or B, got '" + *v + "'");
    }

    if (auto v = r.get("missprob.cases")) {
        c.miss_cases.clear();
        for (const auto& item : split(*v, ',')) {
            const auto f = split(item, ':');
            if (f.size() != 4)
                throw std::runtime_error("config: missprob.cases: expected n_ms:n_bs:n_rf_ms:M, got '" + item + "'");
            c.miss_cases.push_back({static_cast<int>(to_integer("missprob.cases", f[0])),
                                    static_cast<int>(to_integer("missprob.cases", f[1])),
                                    static_cast<int>(to_integer("missprob.cases", f[2])),
                                    static_cast<Index>(to_integer("missprob.cases", f[3]))});
        }
    }
    r.read("missprob.empirical_trials", c.miss_trials);

    if (auto v = r.get("run.trials")) c.trials = static_cast<int>(to_integer("run.trials", *v));
    if (auto v = r.get("run.seed")) c.master_seed = parse_seed(*v);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    return parse_config(in);
}

double noise_variance_for_pnr(double pnr_db, double gain_variance, double pilot) {
    return pilot * pilot * gain_variance / std::pow(10.0, pnr_db / 10.0);
}

}  // namespace mmwave
