#include "lfm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>

#include "lfm/error.hpp"
#include "lfm/random.hpp"

namespace lfm {

namespace {

constexpr double kInf = 1e300;

ConfigKey real_key(std::string name, std::string def, double lo, double hi, bool lo_ex, bool hi_ex, std::string help) {
    return {std::move(name), ValueType::Real, std::move(def), lo, hi, lo_ex, hi_ex, {}, std::move(help)};
}
ConfigKey count_key(std::string name, std::string def, double lo, std::string help) {
    return {std::move(name), ValueType::Count, std::move(def), lo, kInf, false, false, {}, std::move(help)};
}
ConfigKey bool_key(std::string name, std::string def, std::string help) {
    return {std::move(name), ValueType::Bool, std::move(def), 0, 0, false, false, {}, std::move(help)};
}
ConfigKey text_key(std::string name, std::string def, std::vector<std::string> choices, std::string help) {
    return {std::move(name), ValueType::Text, std::move(def), 0, 0, false, false, std::move(choices), std::move(help)};
}
ConfigKey path_key(std::string name, std::string help) { return text_key(std::move(name), "", {}, std::move(help)); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(',', start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_real(const std::string& key, const std::string& token) {
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::Config, key + ": '" + token + "' is not a number");
    }
    return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& token) {
    std::uint64_t v = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw Error(ErrorKind::Config, key + ": '" + token + "' is not a non-negative integer");
    }
    return v;
}

void check_range(const ConfigKey& k, double v) {
    const bool lo_ok = k.min_exclusive ? v > k.min : v >= k.min;
    const bool hi_ok = k.max < k.min || (k.max_exclusive ? v < k.max : v <= k.max);
    if (!lo_ok || !hi_ok) {
        throw Error(ErrorKind::Config, k.name + ": value " + std::to_string(v) + " is out of range");
    }
}

void validate(const ConfigKey& k, const std::string& value) {
    switch (k.type) {
        case ValueType::Real: check_range(k, parse_real(k.name, value)); break;
        case ValueType::Count: check_range(k, static_cast<double>(parse_count(k.name, value))); break;
        case ValueType::Bool:
            if (value != "true" && value != "false") throw Error(ErrorKind::Config, k.name + ": expected true or false");
            break;
        case ValueType::Text:
            if (!k.choices.empty() && std::find(k.choices.begin(), k.choices.end(), value) == k.choices.end()) {
                throw Error(ErrorKind::Config, k.name + ": '" + value + "' is not an allowed value");
            }
            if (k.name == "methods" && !value.empty()) {
                for (const auto& m : split_commas(value)) {
                    if (!Method::parse(m)) throw Error(ErrorKind::Config, "methods: unknown method '" + m + "'");
                }
            }
            break;
        case ValueType::RealList:
            if (value.empty()) throw Error(ErrorKind::Config, k.name + ": list is empty");
            for (const auto& t : split_commas(value)) check_range(k, parse_real(k.name, t));
            break;
        case ValueType::CountList:
            if (value.empty()) throw Error(ErrorKind::Config, k.name + ": list is empty");
            for (const auto& t : split_commas(value)) check_range(k, static_cast<double>(parse_count(k.name, t)));
            break;
    }
}

const ConfigKey& find_key(const std::string& name) {
    for (const auto& k : config_keys()) {
        if (k.name == name) return k;
    }
    throw Error(ErrorKind::Config, "unknown config key '" + name + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        k.push_back(count_key("seed", "1", 0, "master seed; every stage seed is derived from it"));
        // factor model
        k.push_back(real_key("p0", "0.01", 0, 1, true, true, "activation prior"));
        k.push_back(count_key("d_pos", "30", 1, "normal factor dimension"));
        k.push_back(count_key("d_neg", "30", 1, "spam factor dimension"));
        k.push_back(real_key("init_scale", "0.1", 0, kInf, true, false, "uniform init half-width"));
        // MRLE
        k.push_back(count_key("n", "20", 0, "non-link samples per entity per epoch"));
        k.push_back(bool_key("use_non", "true", "false trains the MRLE-non ablation"));
        k.push_back(real_key("mrle_learning_rate", "0.005", 0, kInf, false, false, "MRLE gradient step"));
        k.push_back(count_key("epochs", "100", 0, "MRLE epochs"));
        k.push_back(real_key("au_fraction", "0.01", 0, 1, false, false, "MRLE+au share of held-out edges"));
        // SPR
        k.push_back(real_key("alpha", "0.005", 0, kInf, false, false, "SPR learning rate"));
        k.push_back(real_key("lambda_pos", "0.01", 0, kInf, false, false, "SPR normal-factor regularisation"));
        k.push_back(real_key("lambda_neg", "0.01", 0, kInf, false, false, "SPR spam-factor regularisation"));
        k.push_back(count_key("xi", "2", 0, "identification threshold"));
        k.push_back(count_key("iterations", "0", 0, "SPR steps; 0 = 1000 per training edge"));
        // split
        k.push_back(real_key("label_fraction", "0.5", 0, 1, true, false, "labelled share of spam edges"));
        k.push_back(bool_key("balance", "true", "train normal count equals train spam count"));
        // detection
        k.push_back(text_key("operator", "Con", {"Avg", "Con", "Sub", "IPneg", "IPpos"}, "application operator"));
        k.push_back(text_key("kind", "IPneg", {"IPneg", "IPpos"}, "ranking used by rank"));
        k.push_back(text_key("policy", "auto", {"auto", "threshold", "top_k"}, "decision policy"));
        k.push_back(real_key("tau", "0.5", 0, 1, false, false, "threshold policy cut-off"));
        k.push_back(count_key("top_k", "0", 0, "top_k policy size; 0 = prevalence x held-out"));
        k.push_back(real_key("clf_l2", "0.0001", 0, kInf, false, false, "classifier L2"));
        k.push_back(real_key("clf_learning_rate", "0.1", 0, kInf, true, false, "classifier step"));
        k.push_back(count_key("clf_epochs", "500", 0, "classifier epochs"));
        // synthetic data
        k.push_back(count_key("num_benign_users", "100", 0, ""));
        k.push_back(count_key("num_spammers", "20", 0, ""));
        k.push_back(count_key("num_legit_targets", "80", 0, ""));
        k.push_back(count_key("num_malicious_targets", "20", 0, ""));
        k.push_back(count_key("edges_per_user", "10", 0, ""));
        k.push_back(real_key("disguise_rate", "0.1", 0, 1, false, false, "spammer edges to legit targets"));
        k.push_back(real_key("camouflage_rate", "0.05", 0, 1, false, false, "benign edges to malicious targets"));
        // experiments
        k.push_back(text_key("protocol", "label_sweep", {"label_sweep", "imbalance", "incompleteness"}, ""));
        k.push_back(text_key("methods", "", {}, "comma list such as MRLE_Con,SPR_IPneg; empty = all"));
        k.push_back(count_key("num_seeds", "1", 1, "seeds per setting"));
        k.push_back(text_key("sweep", "label_fraction", {"label_fraction", "n", "d"}, "label_sweep variable"));
        {
            ConfigKey lf{"label_fractions", ValueType::RealList, "0.2,0.25,0.3,0.4,0.5", 0, 1, true, false, {}, ""};
            k.push_back(lf);
            k.push_back({"n_grid", ValueType::CountList, "5,10,20,40", 0, kInf, false, false, {}, ""});
            k.push_back({"d_grid", ValueType::CountList, "10,20,30,50", 1, kInf, false, false, {}, ""});
            k.push_back(real_key("sweep_label_fraction", "0.3", 0, 1, true, false, "fraction used by n/d sweeps"));
            k.push_back({"pk_grid", ValueType::CountList, "100,200,300,400,500", 1, kInf, false, false, {}, ""});
            k.push_back(real_key("imbalance_normal_fraction", "0.5", 0, kInf, true, false, ""));
            k.push_back(count_key("imbalance_ratio", "10", 1, "test normals per test spam"));
            k.push_back({"drop_degrees", ValueType::RealList, "0,0.03,0.05,0.07,0.1", 0, 1, false, true, {}, ""});
            k.push_back(real_key("incompleteness_label_fraction", "0.4", 0, 1, true, false, ""));
        }
        // files
        for (const char* p : {"edges", "roles", "split", "split_out", "model", "model_b", "log", "features",
                              "predictions", "metrics", "ranking", "report", "summary", "pairs"}) {
            k.push_back(path_key(p, "file path"));
        }
        return k;
    }();
    return keys;
}

RunConfig::RunConfig() {
    for (const auto& k : config_keys()) values_[k.name] = k.default_value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto& k = find_key(key);
    const std::string v = trim(value);
    validate(k, v);
    values_[key] = v;
    explicitly_set_[key] = true;
}

void RunConfig::set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Config, "expected key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void RunConfig::load(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        set_assignment(t);
    }
}

bool RunConfig::is_set(const std::string& key) const {
    find_key(key);
    auto it = explicitly_set_.find(key);
    return it != explicitly_set_.end() && it->second;
}

const std::string& RunConfig::raw(const std::string& key) const {
    find_key(key);
    return values_.at(key);
}

double RunConfig::real(const std::string& key) const { return parse_real(key, raw(key)); }
std::size_t RunConfig::count(const std::string& key) const { return parse_count(key, raw(key)); }
bool RunConfig::flag(const std::string& key) const { return raw(key) == "true"; }
const std::string& RunConfig::text(const std::string& key) const { return raw(key); }

std::vector<double> RunConfig::reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& t : split_commas(raw(key))) out.push_back(parse_real(key, t));
    return out;
}

std::vector<std::size_t> RunConfig::counts(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& t : split_commas(raw(key))) out.push_back(parse_count(key, t));
    return out;
}

std::uint64_t RunConfig::master_seed() const { return parse_count("seed", raw("seed")); }
std::uint64_t RunConfig::stage_seed() const { return experiment_seed(master_seed(), 0); }

SynthParams RunConfig::synth_params() const {
    SynthParams p;
    p.num_benign_users = count("num_benign_users");
    p.num_spammers = count("num_spammers");
    p.num_legit_targets = count("num_legit_targets");
    p.num_malicious_targets = count("num_malicious_targets");
    p.edges_per_user = count("edges_per_user");
    p.disguise_rate = real("disguise_rate");
    p.camouflage_rate = real("camouflage_rate");
    p.seed = derive_seed(master_seed(), "gen");
    return p;
}

MrleConfig RunConfig::mrle_config() const {
    MrleConfig c;
    c.n = count("n");
    c.learning_rate = real("mrle_learning_rate");
    c.epochs = count("epochs");
    c.p0 = real("p0");
    c.d_pos = count("d_pos");
    c.d_neg = count("d_neg");
    c.init_scale = real("init_scale");
    c.seed = derive_seed(stage_seed(), "mrle");
    c.use_non = flag("use_non");
    return c;
}

SprConfig RunConfig::spr_config() const {
    SprConfig c;
    c.alpha = real("alpha");
    c.lambda_pos = real("lambda_pos");
    c.lambda_neg = real("lambda_neg");
    c.xi = count("xi");
    c.iterations = count("iterations");
    c.p0 = real("p0");
    c.d_pos = count("d_pos");
    c.d_neg = count("d_neg");
    c.init_scale = real("init_scale");
    c.seed = derive_seed(stage_seed(), "spr");
    return c;
}

ClassifierConfig RunConfig::classifier_config() const {
    ClassifierConfig c;
    c.l2 = real("clf_l2");
    c.learning_rate = real("clf_learning_rate");
    c.epochs = count("clf_epochs");
    c.seed = derive_seed(stage_seed(), "classifier");
    return c;
}

PipelineConfig RunConfig::pipeline_config() const {
    PipelineConfig p;
    p.mrle = mrle_config();
    p.spr = spr_config();
    p.classifier = classifier_config();
    p.au_fraction = real("au_fraction");
    p.tau = real("tau");
    return p;
}

ExperimentConfig RunConfig::experiment_config() const {
    ExperimentConfig c;
    c.pipeline = pipeline_config();
    if (text("methods").empty()) {
        c.methods = default_methods();
    } else {
        for (const auto& m : split_commas(text("methods"))) c.methods.push_back(*Method::parse(m));
    }
    c.master_seed = master_seed();
    c.num_seeds = count("num_seeds");
    c.balance = flag("balance");
    const auto& sweep = text("sweep");
    c.sweep = sweep == "n" ? SweepParam::N : sweep == "d" ? SweepParam::D : SweepParam::LabelFraction;
    c.label_fractions = reals("label_fractions");
    c.n_grid.clear();
    for (auto v : counts("n_grid")) c.n_grid.push_back(static_cast<double>(v));
    c.d_grid.clear();
    for (auto v : counts("d_grid")) c.d_grid.push_back(static_cast<double>(v));
    c.sweep_label_fraction = real("sweep_label_fraction");
    c.pk_grid = counts("pk_grid");
    c.imbalance_normal_fraction = real("imbalance_normal_fraction");
    c.imbalance_ratio = count("imbalance_ratio");
    c.drop_degrees = reals("drop_degrees");
    c.incompleteness_label_fraction = real("incompleteness_label_fraction");
    return c;
}

std::vector<std::string> RunConfig::snapshot() const {
    std::vector<std::string> out;
    for (const auto& k : config_keys()) out.push_back(k.name + " = " + values_.at(k.name));
    return out;
}

}  // namespace lfm
