#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "lfm/config.hpp"
#include "lfm/error.hpp"
#include "lfm/eval.hpp"
#include "lfm/experiment.hpp"
#include "lfm/kernels.hpp"
#include "lfm/random.hpp"
#include "lfm/synth.hpp"

using namespace lfm;

namespace {

constexpr const char* kVersion = "lfm 1.0.0 (edge-list v1, split v1, lfm-factors v1, report-csv v1)";

const std::string& require(const RunConfig& cfg, const std::string& key) {
    const auto& v = cfg.text(key);
    if (v.empty()) throw Error(ErrorKind::Config, "missing required key '" + key + "'");
    return v;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "' for reading");
    return in;
}

/// Writes through a temporary buffer so a failed command leaves no partial file.
template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
    std::ostringstream buf;
    fn(buf);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    out << buf.str();
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

SignedNetwork load_network(const RunConfig& cfg) {
    auto in = open_in(require(cfg, "edges"));
    return parse_edge_list(in);
}

/// Split from the `split` file when given, else the seeded split an experiment's first seed uses.
TrainTestSplit load_split(const RunConfig& cfg, const SignedNetwork& net) {
    TrainTestSplit split;
    if (!cfg.text("split").empty()) {
        auto in = open_in(cfg.text("split"));
        split = read_split_for(in, net);
    } else {
        split = make_split(net, cfg.real("label_fraction"), cfg.flag("balance"), derive_seed(cfg.stage_seed(), "split"));
    }
    if (!cfg.text("split_out").empty()) {
        write_file(cfg.text("split_out"), [&](std::ostream& o) { write_split_file(o, net, split); });
    }
    return split;
}

FactorModel load_model(const std::string& path) {
    auto in = open_in(path);
    return read_model(in);
}

std::string label_token(const SignedNetwork& net, const TrainTestSplit& split, EdgeId id) {
    if (split.role(id) == EdgeRole::HeldOut) return "?";
    return net.edge(id).label == EdgeLabel::Spam ? "spam" : "normal";
}

void write_log_line(std::ostream& out, std::size_t epoch, double loss, std::chrono::milliseconds elapsed) {
    out << epoch << '\t' << format_double(loss) << '\t' << elapsed.count() << '\n';
}

int cmd_gen(const RunConfig& cfg) {
    const auto synth = generate(cfg.synth_params());
    write_file(require(cfg, "edges"), [&](std::ostream& o) { write_edge_list(o, synth.network); });
    if (!cfg.text("roles").empty()) write_file(cfg.text("roles"), [&](std::ostream& o) { write_roles(o, synth); });
    std::cout << "edges\t" << synth.network.num_edges() << '\n';
    return 0;
}

template <class Train>
int cmd_train(const RunConfig& cfg, Train&& train) {
    const auto net = load_network(cfg);
    const auto split = load_split(cfg, net);
    const std::string& model_path = require(cfg, "model");
    std::ostringstream log;
    log << "epoch\tloss\telapsed_ms\n";
    const FactorModel model = train(net, split, log);
    write_file(model_path, [&](std::ostream& o) { write_model(o, model); });
    if (!cfg.text("log").empty()) {
        write_file(cfg.text("log"), [&](std::ostream& o) { o << log.str(); });
    } else {
        std::cerr << log.str();
    }
    return 0;
}

int cmd_train_mrle(const RunConfig& cfg) {
    return cmd_train(cfg, [&](const SignedNetwork& net, const TrainTestSplit& split, std::ostream& log) {
        return train_mrle(cfg.mrle_config(), net, split, [&](std::size_t e, double loss, std::chrono::milliseconds t) {
            write_log_line(log, e, loss, t);
        });
    });
}

int cmd_train_spr(const RunConfig& cfg) {
    return cmd_train(cfg, [&](const SignedNetwork& net, const TrainTestSplit& split, std::ostream& log) {
        return train_spr(
            cfg.spr_config(), net, split, [](const std::string& w) { std::cerr << "warning\t" << w << '\n'; },
            [&](std::size_t e, double loss, std::chrono::milliseconds t) { write_log_line(log, e, loss, t); });
    });
}

OperatorKind config_operator(const RunConfig& cfg) { return *parse_operator(cfg.text("operator")); }

int cmd_features(const RunConfig& cfg) {
    const auto net = load_network(cfg);
    const auto split = load_split(cfg, net);
    const auto model = load_model(require(cfg, "model"));
    const OperatorKind op = config_operator(cfg);
    std::vector<UserTarget> pairs;
    for (const auto& e : net.edges()) pairs.push_back({e.user, e.target});
    const Matrix x = kernels::operator_features(op, model, pairs);
    write_file(require(cfg, "features"), [&](std::ostream& o) {
        for (EdgeId id = 0; id < net.num_edges(); ++id) {
            const auto& e = net.edge(id);
            o << net.users().name(e.user) << '\t' << net.targets().name(e.target) << '\t' << label_token(net, split, id);
            for (double v : x.row(id)) o << '\t' << format_double(v);
            o << '\n';
        }
    });
    return 0;
}

/// MRLE-SPR concatenation when model_b is set, otherwise a single-model method.
std::pair<Method, TrainedModels> loaded_method(const RunConfig& cfg) {
    TrainedModels models;
    models.mrle = load_model(require(cfg, "model"));
    const OperatorKind op = config_operator(cfg);
    if (!cfg.text("model_b").empty()) {
        models.spr = load_model(cfg.text("model_b"));
        return {Method{ModelKind::MrleSpr, op}, std::move(models)};
    }
    return {Method{ModelKind::Mrle, op}, std::move(models)};
}

DecisionPolicy config_policy(const RunConfig& cfg, const Method& method, const PipelineConfig& pipeline,
                             double prevalence, std::size_t n) {
    const auto& p = cfg.text("policy");
    if (p == "threshold") return DecisionPolicy::threshold(cfg.real("tau"));
    if (p == "top_k") {
        const std::size_t k = cfg.count("top_k");
        if (k == 0) return default_policy(Method{ModelKind::Mrle, OperatorKind::IPneg}, pipeline, prevalence, n);
        if (k > n) throw Error(ErrorKind::Config, "top_k exceeds the number of held-out edges");
        return DecisionPolicy::top_k(k);
    }
    return default_policy(method, pipeline, prevalence, n);
}

int cmd_classify(const RunConfig& cfg) {
    const auto net = load_network(cfg);
    const auto split = load_split(cfg, net);
    auto [method, models] = loaded_method(cfg);
    const auto pipeline = cfg.pipeline_config();

    std::vector<EdgeId> labeled;
    for (EdgeId id : split.held_out()) {
        if (net.edge(id).label) labeled.push_back(id);
    }
    std::vector<bool> truth;
    for (EdgeId id : labeled) truth.push_back(net.edge(id).label == EdgeLabel::Spam);
    const double positives = static_cast<double>(std::count(truth.begin(), truth.end(), true));
    const double prevalence = labeled.empty() ? 0.0 : positives / static_cast<double>(labeled.size());

    const auto& held = split.held_out();
    const auto scores = score_edges(method, models, pipeline, net, split, held);
    const auto decisions = decide(scores, config_policy(cfg, method, pipeline, prevalence, held.size()));
    write_file(require(cfg, "predictions"), [&](std::ostream& o) {
        for (std::size_t i = 0; i < held.size(); ++i) {
            const auto& e = net.edge(held[i]);
            o << net.users().name(e.user) << '\t' << net.targets().name(e.target) << '\t' << format_double(scores[i])
              << '\t' << (decisions[i] ? "spam" : "normal") << '\n';
        }
    });

    // Metrics cover the labelled held-out edges, in held-out order.
    std::vector<double> s;
    std::vector<bool> d;
    for (std::size_t i = 0; i < held.size(); ++i) {
        if (!net.edge(held[i]).label) continue;
        s.push_back(scores[i]);
        d.push_back(decisions[i]);
    }
    std::ostringstream m;
    m << "[metrics]\n";
    m << "method\t" << method.name() << '\n';
    m << "held_out\t" << held.size() << '\n';
    m << "labeled\t" << labeled.size() << '\n';
    if (positives > 0 && positives < static_cast<double>(labeled.size())) {
        m << "AUC\t" << format_double(auc(s, truth)) << '\n';
    } else {
        m << "AUC\tundefined\n";
    }
    m << "F1\t" << format_double(f_measure(d, truth)) << '\n';
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    std::vector<bool> ranked;
    for (auto i : order) ranked.push_back(truth[i]);
    for (auto k : cfg.counts("pk_grid")) {
        if (k <= ranked.size()) m << "P@" << k << '\t' << format_double(precision_at_k(ranked, k)) << '\n';
    }
    if (!cfg.text("metrics").empty()) {
        write_file(cfg.text("metrics"), [&](std::ostream& o) { o << m.str(); });
    }
    std::cout << m.str();
    return 0;
}

int cmd_rank(const RunConfig& cfg) {
    const auto net = load_network(cfg);
    const auto split = load_split(cfg, net);
    const auto model = load_model(require(cfg, "model"));
    const auto kind = cfg.text("kind") == "IPpos" ? InnerProductKind::IPpos : InnerProductKind::IPneg;
    const auto ranked = rank_held_out(model, net, split, kind);
    write_file(require(cfg, "ranking"), [&](std::ostream& o) {
        for (const auto& r : ranked) {
            const auto& e = net.edge(r.edge);
            o << net.users().name(e.user) << '\t' << net.targets().name(e.target) << '\t' << format_double(r.score)
              << '\n';
        }
    });
    return 0;
}

int cmd_experiment(const RunConfig& cfg) {
    const SignedNetwork net = cfg.text("edges").empty() ? generate(cfg.synth_params()).network : load_network(cfg);
    const auto protocol = *parse_protocol(cfg.text("protocol"));
    const auto report = run_experiment(protocol, net, cfg.experiment_config());
    write_file(require(cfg, "report"), [&](std::ostream& o) { write_report_csv(o, report); });
    if (!cfg.text("summary").empty()) {
        write_file(cfg.text("summary"), [&](std::ostream& o) { write_report_summary(o, report); });
    } else {
        write_report_summary(std::cout, report);
    }
    return 0;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return 2;
        case ErrorKind::Io:
        case ErrorKind::Parse:
        case ErrorKind::DuplicateEdge: return 3;
        default: return 4;
    }
}

void print_error(std::string_view kind, const std::string& message) {
    std::string flat = message;
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    std::cerr << "error\t" << kind << '\t' << flat << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Signed latent factor spam detection"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    std::string config_path;
    std::vector<std::string> overrides;
    bool list_keys = false;
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--set", overrides, "key=value override (repeatable)")->take_all();
    app.add_flag("--list-keys", list_keys, "print every config key with its default");
    app.set_version_flag("--version", kVersion);

    std::vector<std::string> positional;
    struct Command {
        const char* name;
        const char* help;
        std::vector<const char*> required;
        int (*run)(const RunConfig&);
    };
    const Command commands[] = {
        {"gen", "write a synthetic edge list (edges) and roles file (roles)", {"edges"}, cmd_gen},
        {"train-mrle", "train MRLE factors (edges, model, log)", {"edges", "model"}, cmd_train_mrle},
        {"train-spr", "train SPR factors (edges, model, log)", {"edges", "model"}, cmd_train_spr},
        {"features", "dump operator features for every edge (edges, model, features)", {"edges", "model", "features"},
         cmd_features},
        {"classify", "score held-out edges (edges, model, predictions)", {"edges", "model", "predictions"},
         cmd_classify},
        {"rank", "order held-out edges by an inner product (edges, model, ranking)", {"edges", "model", "ranking"},
         cmd_rank},
        {"experiment", "run an evaluation protocol (report)", {"report"}, cmd_experiment},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("assignments", positional, "key=value settings");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    }

    try {
        RunConfig cfg;
        if (list_keys) {
            for (const auto& k : config_keys()) std::cout << k.name << " = " << k.default_value << "\t# " << k.help << '\n';
            return 0;
        }
        if (!config_path.empty()) {
            auto in = open_in(config_path);
            cfg.load(in);
        }
        for (const auto& a : overrides) cfg.set_assignment(a);
        for (const auto& a : positional) cfg.set_assignment(a);
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            for (const char* key : commands[i].required) require(cfg, key);
            return commands[i].run(cfg);
        }
        print_error("usage", "no subcommand given; see --help");
        return 2;
    } catch (const Error& e) {
        print_error(to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 4;
    }
}
