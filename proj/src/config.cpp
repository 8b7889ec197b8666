#include "ebgan/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ebgan {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw std::invalid_argument("config: bad value for '" + key + "': '" + value + "'");
}

double to_double(const std::string& key, const std::string& value) {
    try {
        return parse_double(value);
    } catch (const std::exception&) {
        bad_value(key, value);
    }
}

std::size_t to_size(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) bad_value(key, value);
        return static_cast<std::size_t>(v);
    } catch (const std::invalid_argument&) {
        bad_value(key, value);
    } catch (const std::out_of_range&) {
        bad_value(key, value);
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    bad_value(key, value);
}

std::vector<std::size_t> to_size_list(const std::string& key, const std::string& value) {
    std::vector<std::size_t> out;
    for (const std::string& item : split_list(value)) out.push_back(to_size(key, item));
    if (out.empty()) bad_value(key, value);
    return out;
}

const char* latent_dist_name(LatentSpec::Dist d) {
    return d == LatentSpec::Dist::StdGaussian ? "gaussian" : "uniform01";
}

LatentSpec::Dist latent_dist_from_name(const std::string& key, const std::string& v) {
    if (v == "gaussian") return LatentSpec::Dist::StdGaussian;
    if (v == "uniform01") return LatentSpec::Dist::Uniform01;
    bad_value(key, v);
}

}  // namespace

void ExperimentConfig::validate() const {
    train.validate();
    mixture.validate();
    if (seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
    if (fake_per_generator < 1) {
        throw std::invalid_argument("config: fake_per_generator must be >= 1");
    }
    if (!(coverage.min_fraction > 0.0 && coverage.min_fraction < 1.0)) {
        throw std::invalid_argument("config: coverage_min_fraction outside (0,1)");
    }
    if (!(coverage.radius_quantile > 0.0 && coverage.radius_quantile < 1.0)) {
        throw std::invalid_argument("config: coverage_radius_quantile outside (0,1)");
    }
    if (mixture.output_dim != train.disc_sizes.front()) {
        throw std::invalid_argument(
            "config: mix_output_dim must match the discriminator input width");
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is missing a key or value");
        }

        if (key == "label") cfg.label = value;
        else if (key == "method") cfg.train.method = method_from_name(value);
        else if (key == "seeds") {
            cfg.seeds.clear();
            for (const std::string& s : split_list(value)) {
                cfg.seeds.push_back(to_size(key, s));
            }
            if (cfg.seeds.empty()) bad_value(key, value);
        }
        else if (key == "iterations") cfg.train.iterations = to_size(key, value);
        else if (key == "j_g") cfg.train.j_g = to_size(key, value);
        else if (key == "batch_size") cfg.train.batch_size = to_size(key, value);
        else if (key == "phi3") cfg.train.phi3 = phi_from_name(value);
        else if (key == "sched_c1") cfg.train.sched.c1 = to_double(key, value);
        else if (key == "sched_c2") cfg.train.sched.c2 = to_double(key, value);
        else if (key == "sched_zeta1") cfg.train.sched.zeta1 = to_double(key, value);
        else if (key == "gen_lr") cfg.train.gen_lr = to_double(key, value);
        else if (key == "gen_lr_decay") cfg.train.gen_lr_decay = to_bool(key, value);
        else if (key == "gen_lr_zeta2") cfg.train.gen_lr_zeta2 = to_double(key, value);
        else if (key == "gen_lr_t0") cfg.train.gen_lr_t0 = to_double(key, value);
        else if (key == "alpha") cfg.train.alpha = to_double(key, value);
        else if (key == "rho") cfg.train.rho = to_double(key, value);
        else if (key == "tau") cfg.train.tau = to_double(key, value);
        else if (key == "prior_zeta2") cfg.train.prior.zeta2 = to_double(key, value);
        else if (key == "disc_sizes") cfg.train.disc_sizes = to_size_list(key, value);
        else if (key == "gen_sizes") cfg.train.gen_sizes = to_size_list(key, value);
        else if (key == "latent_dim") cfg.train.latent.dim = to_size(key, value);
        else if (key == "latent_dist") cfg.train.latent.dist = latent_dist_from_name(key, value);
        else if (key == "adam_beta1") cfg.train.adam_beta1 = to_double(key, value);
        else if (key == "adam_beta2") cfg.train.adam_beta2 = to_double(key, value);
        else if (key == "disc_lr") cfg.train.disc_lr = to_double(key, value);
        else if (key == "metric_every") cfg.train.metric_every = to_size(key, value);
        else if (key == "init_std") cfg.train.init_std = to_double(key, value);
        else if (key == "eval_real_size") cfg.train.eval_real_size = to_size(key, value);
        else if (key == "eval_latent_size") cfg.train.eval_latent_size = to_size(key, value);
        else if (key == "share_z") cfg.train.share_z = to_bool(key, value);
        else if (key == "fake_per_generator") cfg.fake_per_generator = to_size(key, value);
        else if (key == "mix_components") cfg.mixture.components = to_size(key, value);
        else if (key == "mix_latent_dim") cfg.mixture.latent_dim = to_size(key, value);
        else if (key == "mix_output_dim") cfg.mixture.output_dim = to_size(key, value);
        else if (key == "mix_per_component") cfg.mixture.per_component = to_size(key, value);
        else if (key == "mix_mean_std") cfg.mixture.mean_std = to_double(key, value);
        else if (key == "mix_map_std") cfg.mixture.map_std = to_double(key, value);
        else if (key == "mix_within_scale") cfg.mixture.within_scale = to_double(key, value);
        else if (key == "mix_seed") cfg.mixture.seed = to_size(key, value);
        else if (key == "coverage_min_fraction") cfg.coverage.min_fraction = to_double(key, value);
        else if (key == "coverage_radius_quantile") cfg.coverage.radius_quantile = to_double(key, value);
        else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::string out;
    auto kv = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    auto size_list = [](const std::vector<std::size_t>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(v[i]);
        }
        return s;
    };
    kv("label", cfg.label);
    kv("method", method_name(cfg.train.method));
    {
        std::string s;
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(cfg.seeds[i]);
        }
        kv("seeds", s);
    }
    kv("iterations", std::to_string(cfg.train.iterations));
    kv("j_g", std::to_string(cfg.train.j_g));
    kv("batch_size", std::to_string(cfg.train.batch_size));
    kv("phi3", phi_name(cfg.train.phi3));
    kv("sched_c1", fmt17(cfg.train.sched.c1));
    kv("sched_c2", fmt17(cfg.train.sched.c2));
    kv("sched_zeta1", fmt17(cfg.train.sched.zeta1));
    kv("gen_lr", fmt17(cfg.train.gen_lr));
    kv("gen_lr_decay", cfg.train.gen_lr_decay ? "true" : "false");
    kv("gen_lr_zeta2", fmt17(cfg.train.gen_lr_zeta2));
    kv("gen_lr_t0", fmt17(cfg.train.gen_lr_t0));
    kv("alpha", fmt17(cfg.train.alpha));
    kv("rho", fmt17(cfg.train.rho));
    kv("tau", fmt17(cfg.train.tau));
    kv("prior_zeta2", fmt17(cfg.train.prior.zeta2));
    kv("disc_sizes", size_list(cfg.train.disc_sizes));
    kv("gen_sizes", size_list(cfg.train.gen_sizes));
    kv("latent_dim", std::to_string(cfg.train.latent.dim));
    kv("latent_dist", latent_dist_name(cfg.train.latent.dist));
    kv("adam_beta1", fmt17(cfg.train.adam_beta1));
    kv("adam_beta2", fmt17(cfg.train.adam_beta2));
    kv("disc_lr", fmt17(cfg.train.disc_lr));
    kv("metric_every", std::to_string(cfg.train.metric_every));
    kv("init_std", fmt17(cfg.train.init_std));
    kv("eval_real_size", std::to_string(cfg.train.eval_real_size));
    kv("eval_latent_size", std::to_string(cfg.train.eval_latent_size));
    kv("share_z", cfg.train.share_z ? "true" : "false");
    kv("fake_per_generator", std::to_string(cfg.fake_per_generator));
    kv("mix_components", std::to_string(cfg.mixture.components));
    kv("mix_latent_dim", std::to_string(cfg.mixture.latent_dim));
    kv("mix_output_dim", std::to_string(cfg.mixture.output_dim));
    kv("mix_per_component", std::to_string(cfg.mixture.per_component));
    kv("mix_mean_std", fmt17(cfg.mixture.mean_std));
    kv("mix_map_std", fmt17(cfg.mixture.map_std));
    kv("mix_within_scale", fmt17(cfg.mixture.within_scale));
    kv("mix_seed", std::to_string(cfg.mixture.seed));
    kv("coverage_min_fraction", fmt17(cfg.coverage.min_fraction));
    kv("coverage_radius_quantile", fmt17(cfg.coverage.radius_quantile));
    return out;
}

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_config: cannot open " + path.string());
    out << serialize_config(cfg);
    if (!out) throw std::runtime_error("save_config: write failed");
}

}  // namespace ebgan
