#include "lfm/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lfm/error.hpp"
#include "lfm/eval.hpp"
#include "lfm/kernels.hpp"
#include "lfm/random.hpp"

namespace lfm {

namespace {

std::string_view model_name(ModelKind m) {
    switch (m) {
        case ModelKind::Mrle: return "MRLE";
        case ModelKind::MrleNoNon: return "MRLE-non";
        case ModelKind::MrleAux: return "MRLE+au";
        case ModelKind::Spr: return "SPR";
        case ModelKind::MrleSpr: return "MRLE-SPR";
    }
    return "?";
}

constexpr ModelKind kAllModels[] = {ModelKind::Mrle, ModelKind::MrleNoNon, ModelKind::MrleAux, ModelKind::Spr,
                                    ModelKind::MrleSpr};

bool needs(const std::vector<Method>& methods, ModelKind m) {
    return std::any_of(methods.begin(), methods.end(), [m](const Method& x) { return x.model == m; });
}

std::vector<UserTarget> endpoints(const SignedNetwork& network, std::span<const EdgeId> edges) {
    std::vector<UserTarget> out;
    out.reserve(edges.size());
    for (EdgeId id : edges) out.push_back({network.edge(id).user, network.edge(id).target});
    return out;
}

const FactorModel& single_model(const Method& method, const TrainedModels& models) {
    const std::optional<FactorModel>* m = nullptr;
    switch (method.model) {
        case ModelKind::Mrle: m = &models.mrle; break;
        case ModelKind::MrleNoNon: m = &models.mrle_no_non; break;
        case ModelKind::MrleAux: m = &models.mrle_aux; break;
        case ModelKind::Spr: m = &models.spr; break;
        case ModelKind::MrleSpr: break;
    }
    if (!m || !*m) throw Error(ErrorKind::Config, "model for " + method.name() + " was not trained");
    return **m;
}

Matrix method_features(const Method& method, const TrainedModels& models, std::span<const UserTarget> pairs) {
    if (method.model != ModelKind::MrleSpr) return kernels::operator_features(method.op, single_model(method, models), pairs);
    if (!models.mrle || !models.spr) throw Error(ErrorKind::Config, "MRLE-SPR needs both MRLE and SPR models");
    const Matrix a = kernels::operator_features(method.op, *models.mrle, pairs);
    const Matrix b = kernels::operator_features(method.op, *models.spr, pairs);
    Matrix out(pairs.size(), a.cols() + b.cols());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto dst = out.row(i);
        std::copy(a.row(i).begin(), a.row(i).end(), dst.begin());
        std::copy(b.row(i).begin(), b.row(i).end(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols()));
    }
    return out;
}

bool uses_classifier(const Method& method) {
    return !is_inner_product(method.op) || method.model == ModelKind::MrleSpr;
}

}  // namespace

std::string Method::name() const { return std::string(model_name(model)) + "_" + std::string(to_string(op)); }

std::optional<Method> Method::parse(std::string_view name) {
    auto pos = name.rfind('_');
    if (pos == std::string_view::npos) return std::nullopt;
    auto op = parse_operator(name.substr(pos + 1));
    if (!op) return std::nullopt;
    for (auto m : kAllModels) {
        if (name.substr(0, pos) == model_name(m)) return Method{m, *op};
    }
    return std::nullopt;
}

std::vector<Method> default_methods() {
    std::vector<Method> out;
    for (auto m : {ModelKind::Mrle, ModelKind::Spr}) {
        for (auto op : {OperatorKind::Avg, OperatorKind::Con, OperatorKind::Sub, OperatorKind::IPneg, OperatorKind::IPpos}) {
            out.push_back({m, op});
        }
    }
    out.push_back({ModelKind::MrleNoNon, OperatorKind::Con});
    out.push_back({ModelKind::MrleAux, OperatorKind::Con});
    out.push_back({ModelKind::MrleSpr, OperatorKind::Con});
    return out;
}

TrainedModels train_models(const PipelineConfig& config, const SignedNetwork& network, const TrainTestSplit& split,
                           const std::vector<Method>& methods, std::uint64_t stage_seed) {
    TrainedModels out;
    MrleConfig mrle = config.mrle;
    mrle.seed = derive_seed(stage_seed, "mrle");
    SprConfig spr = config.spr;
    spr.seed = derive_seed(stage_seed, "spr");

    const bool want_spr = needs(methods, ModelKind::Spr) || needs(methods, ModelKind::MrleSpr) ||
                          needs(methods, ModelKind::MrleAux);
    const bool want_mrle = needs(methods, ModelKind::Mrle) || needs(methods, ModelKind::MrleSpr);
    if (want_spr) out.spr = train_spr(spr, network, split);
    if (want_mrle) out.mrle = train_mrle(mrle, network, split);
    if (needs(methods, ModelKind::MrleNoNon)) {
        MrleConfig ablated = mrle;
        ablated.use_non = false;
        out.mrle_no_non = train_mrle(ablated, network, split);
    }
    if (needs(methods, ModelKind::MrleAux)) {
        const auto ranked = rank_held_out(*out.spr, network, split, InnerProductKind::IPneg);
        std::vector<EdgeId> order;
        order.reserve(ranked.size());
        for (const auto& r : ranked) order.push_back(r.edge);
        const std::size_t k = fraction_ceil(config.au_fraction, split.held_out().size());
        out.mrle_aux = train_mrle(mrle, network, augment_with_auxiliary(split, order, k));
    }
    return out;
}

std::vector<double> score_edges(const Method& method, const TrainedModels& models, const PipelineConfig& config,
                                const SignedNetwork& network, const TrainTestSplit& split,
                                std::span<const EdgeId> edges) {
    const auto pairs = endpoints(network, edges);
    if (!uses_classifier(method)) {
        const bool neg = method.op == OperatorKind::IPneg;
        auto scores = kernels::inner_products(single_model(method, models), neg ? EdgeLabel::Spam : EdgeLabel::Normal, pairs);
        if (!neg) {
            for (double& s : scores) s = -s;
        }
        return scores;
    }
    std::vector<EdgeId> train_edges;
    std::vector<double> labels;
    for (EdgeId id : split.train_spam()) {
        train_edges.push_back(id);
        labels.push_back(1.0);
    }
    for (EdgeId id : split.train_normal()) {
        train_edges.push_back(id);
        labels.push_back(0.0);
    }
    LabeledFeatures data{method_features(method, models, endpoints(network, train_edges)), std::move(labels)};
    const auto clf = train_classifier(data, config.classifier);
    const Matrix x = method_features(method, models, pairs);
    std::vector<double> scores(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) scores[i] = predict(clf, x.row(i));
    return scores;
}

DecisionPolicy default_policy(const Method& method, const PipelineConfig& config, double prevalence,
                              std::size_t num_edges) {
    if (uses_classifier(method)) return DecisionPolicy::threshold(config.tau);
    auto k = static_cast<std::size_t>(std::llround(prevalence * static_cast<double>(num_edges)));
    return DecisionPolicy::top_k(std::min(k, num_edges));
}

std::string_view to_string(Protocol p) {
    switch (p) {
        case Protocol::LabelSweep: return "label_sweep";
        case Protocol::Imbalance: return "imbalance";
        case Protocol::Incompleteness: return "incompleteness";
    }
    return "?";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
    for (auto p : {Protocol::LabelSweep, Protocol::Imbalance, Protocol::Incompleteness}) {
        if (name == to_string(p)) return p;
    }
    return std::nullopt;
}

std::uint64_t experiment_seed(std::uint64_t master, std::size_t k) { return derive_seed(master, "experiment", k); }

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

ImbalanceSet make_imbalance_set(const SignedNetwork& network, const ExperimentConfig& config, double spam_fraction,
                                std::uint64_t seed) {
    std::vector<EdgeId> spam, normal;
    for (EdgeId id = 0; id < network.num_edges(); ++id) {
        if (network.edge(id).label == EdgeLabel::Spam) spam.push_back(id);
        if (network.edge(id).label == EdgeLabel::Normal) normal.push_back(id);
    }
    if (spam.empty() || normal.empty()) throw Error(ErrorKind::Protocol, "imbalance protocol needs both labels");
    Rng rng(derive_seed(seed, "imbalance"));
    std::shuffle(spam.begin(), spam.end(), rng);
    std::shuffle(normal.begin(), normal.end(), rng);
    const std::size_t n_train_spam = fraction_ceil(spam_fraction, spam.size());
    const std::size_t n_train_normal = fraction_ceil(config.imbalance_normal_fraction, spam.size());
    if (n_train_normal > normal.size()) {
        throw Error(ErrorKind::Protocol, "not enough normal edges for the fixed training normal count");
    }
    std::vector<EdgeRole> roles(network.num_edges(), EdgeRole::HeldOut);
    for (std::size_t i = 0; i < n_train_spam; ++i) roles[spam[i]] = EdgeRole::TrainSpam;
    for (std::size_t i = 0; i < n_train_normal; ++i) roles[normal[i]] = EdgeRole::TrainNormal;
    TrainTestSplit split(std::move(roles), seed);

    // Test set: held-out spam plus ratio x as many unused normals. If the normal
    // pool is too small, the spam side is subsampled to keep the ratio exact.
    const std::size_t avail_spam = spam.size() - n_train_spam;
    const std::size_t avail_normal = normal.size() - n_train_normal;
    const std::size_t test_spam = std::min(avail_spam, avail_normal / config.imbalance_ratio);
    if (test_spam == 0) {
        throw Error(ErrorKind::Protocol, "cannot form a 1:" + std::to_string(config.imbalance_ratio) +
                                             " test set from the remaining edges");
    }
    std::vector<EdgeId> eval_edges;
    eval_edges.insert(eval_edges.end(), spam.begin() + static_cast<std::ptrdiff_t>(n_train_spam),
                      spam.begin() + static_cast<std::ptrdiff_t>(n_train_spam + test_spam));
    eval_edges.insert(eval_edges.end(), normal.begin() + static_cast<std::ptrdiff_t>(n_train_normal),
                      normal.begin() + static_cast<std::ptrdiff_t>(n_train_normal + test_spam * config.imbalance_ratio));
    std::sort(eval_edges.begin(), eval_edges.end());

    return {std::move(split), std::move(eval_edges)};
}

namespace {

// Scores every method on `eval_edges` and emits AUC, F-measure and P@k rows.
std::vector<ReportRow> evaluate_methods(const SignedNetwork& network, const ExperimentConfig& config,
                                        const PipelineConfig& pipeline, const TrainTestSplit& split,
                                        const TrainedModels& models, std::span<const EdgeId> eval_edges,
                                        double setting, std::uint64_t seed) {
    std::vector<bool> labels;
    labels.reserve(eval_edges.size());
    for (EdgeId id : eval_edges) labels.push_back(network.edge(id).label == EdgeLabel::Spam);
    const auto n_spam = static_cast<double>(std::count(labels.begin(), labels.end(), true));
    const double prevalence = eval_edges.empty() ? 0.0 : n_spam / static_cast<double>(eval_edges.size());

    std::vector<ReportRow> rows;
    for (const auto& method : config.methods) {
        const auto scores = score_edges(method, models, pipeline, network, split, eval_edges);
        const std::string name = method.name();
        rows.push_back({setting, name, "AUC", auc(scores, labels), seed});
        const auto decisions = decide(scores, default_policy(method, pipeline, prevalence, scores.size()));
        rows.push_back({setting, name, "F1", f_measure(decisions, labels), seed});

        std::vector<std::size_t> order(scores.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
        std::vector<bool> ranked;
        ranked.reserve(order.size());
        for (auto i : order) ranked.push_back(labels[i]);
        for (auto k : config.pk_grid) {
            if (k >= 1 && k <= ranked.size()) {
                rows.push_back({setting, name, "P@" + std::to_string(k), precision_at_k(ranked, k), seed});
            }
        }
    }
    return rows;
}

std::vector<EdgeId> labeled_held_out(const SignedNetwork& network, const TrainTestSplit& split) {
    std::vector<EdgeId> out;
    for (EdgeId id : split.held_out()) {
        if (network.edge(id).label) out.push_back(id);
    }
    return out;
}

std::vector<ReportRow> run_cell(const SignedNetwork& network, const ExperimentConfig& config,
                                const PipelineConfig& pipeline, double label_fraction, double setting,
                                std::uint64_t seed) {
    const auto split = make_split(network, label_fraction, config.balance, derive_seed(seed, "split"));
    const auto models = train_models(pipeline, network, split, config.methods, seed);
    const auto eval_edges = labeled_held_out(network, split);
    return evaluate_methods(network, config, pipeline, split, models, eval_edges, setting, seed);
}

std::vector<ReportRow> run_imbalance_cell(const SignedNetwork& network, const ExperimentConfig& config,
                                          double spam_fraction, std::uint64_t seed) {
    const auto set = make_imbalance_set(network, config, spam_fraction, seed);
    const auto models = train_models(config.pipeline, network, set.split, config.methods, seed);
    return evaluate_methods(network, config, config.pipeline, set.split, models, set.eval_edges, spam_fraction, seed);
}

}  // namespace

std::vector<ReportRow> run_label_cell(const SignedNetwork& network, const ExperimentConfig& config,
                                      double label_fraction, double setting, const std::string& metric,
                                      std::uint64_t seed) {
    auto rows = run_cell(network, config, config.pipeline, label_fraction, setting, seed);
    if (!metric.empty()) {
        std::erase_if(rows, [&](const ReportRow& r) { return r.metric != metric; });
    }
    return rows;
}

EvaluationReport run_experiment(Protocol protocol, const SignedNetwork& network, const ExperimentConfig& config) {
    if (config.methods.empty()) throw Error(ErrorKind::Config, "no methods to evaluate");
    if (config.num_seeds == 0) throw Error(ErrorKind::Config, "num_seeds must be >= 1");

    std::vector<double> settings;
    switch (protocol) {
        case Protocol::LabelSweep:
            settings = config.sweep == SweepParam::LabelFraction ? config.label_fractions
                       : config.sweep == SweepParam::N           ? config.n_grid
                                                                 : config.d_grid;
            break;
        case Protocol::Imbalance: settings = config.label_fractions; break;
        case Protocol::Incompleteness: settings = config.drop_degrees; break;
    }
    for (double s : settings) {
        const bool ok = protocol == Protocol::Incompleteness ? (s >= 0.0 && s < 1.0)
                        : (protocol == Protocol::LabelSweep && config.sweep != SweepParam::LabelFraction)
                            ? (s >= (config.sweep == SweepParam::D ? 1.0 : 0.0) && s == std::floor(s))
                            : (s > 0.0 && s <= 1.0);
        if (!ok) throw Error(ErrorKind::Protocol, "invalid protocol setting " + format_double(s));
    }

    struct Cell {
        double setting;
        std::size_t seed_index;
    };
    std::vector<Cell> cells;
    for (double s : settings) {
        for (std::size_t k = 0; k < config.num_seeds; ++k) cells.push_back({s, k});
    }
    std::vector<std::vector<ReportRow>> results(cells.size());
    std::vector<std::exception_ptr> errors(cells.size());

    const auto n_cells = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < n_cells; ++c) {
        try {
            const Cell cell = cells[c];
            const std::uint64_t seed = experiment_seed(config.master_seed, cell.seed_index);
            switch (protocol) {
                case Protocol::LabelSweep: {
                    PipelineConfig pipeline = config.pipeline;
                    double fraction = cell.setting;
                    if (config.sweep != SweepParam::LabelFraction) {
                        fraction = config.sweep_label_fraction;
                        const auto v = static_cast<std::size_t>(cell.setting);
                        if (config.sweep == SweepParam::N) {
                            pipeline.mrle.n = v;
                        } else {
                            pipeline.mrle.d_pos = pipeline.mrle.d_neg = v;
                            pipeline.spr.d_pos = pipeline.spr.d_neg = v;
                        }
                    }
                    results[c] = run_cell(network, config, pipeline, fraction, cell.setting, seed);
                    break;
                }
                case Protocol::Imbalance:
                    results[c] = run_imbalance_cell(network, config, cell.setting, seed);
                    break;
                case Protocol::Incompleteness: {
                    const auto reduced = drop_edges(network, cell.setting, derive_seed(seed, "drop"));
                    results[c] = run_cell(reduced, config, config.pipeline, config.incompleteness_label_fraction,
                                          cell.setting, seed);
                    break;
                }
            }
        } catch (...) {
            errors[c] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    EvaluationReport report{protocol, {}, {}};
    for (auto& r : results) report.rows.insert(report.rows.end(), r.begin(), r.end());
    report.snapshot.push_back("protocol = " + std::string(to_string(protocol)));
    report.snapshot.push_back("master_seed = " + std::to_string(config.master_seed));
    report.snapshot.push_back("num_seeds = " + std::to_string(config.num_seeds));
    return report;
}

void write_report_csv(std::ostream& out, const EvaluationReport& report) {
    out << "protocol,setting,method,metric,value,seed\n";
    for (const auto& r : report.rows) {
        out << to_string(report.protocol) << ',' << format_double(r.setting) << ',' << r.method << ',' << r.metric
            << ',' << format_double(r.value) << ',' << r.seed << '\n';
    }
}

void write_report_summary(std::ostream& out, const EvaluationReport& report) {
    // (metric, method) -> setting -> values, preserving first-seen method order.
    std::vector<std::string> methods, metrics;
    std::vector<double> settings;
    std::map<std::tuple<std::string, std::string, double>, std::pair<double, std::size_t>> acc;
    for (const auto& r : report.rows) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
        if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end()) metrics.push_back(r.metric);
        if (std::find(settings.begin(), settings.end(), r.setting) == settings.end()) settings.push_back(r.setting);
        auto& [sum, count] = acc[{r.metric, r.method, r.setting}];
        sum += r.value;
        ++count;
    }
    std::size_t width = 8;
    for (const auto& m : methods) width = std::max(width, m.size() + 2);
    for (const auto& metric : metrics) {
        out << metric << " (" << to_string(report.protocol) << ", mean over seeds)\n";
        out << std::left << std::setw(10) << "setting";
        for (const auto& m : methods) out << std::setw(static_cast<int>(width)) << m;
        out << '\n';
        for (double s : settings) {
            out << std::setw(10) << format_double(s);
            for (const auto& m : methods) {
                auto it = acc.find({metric, m, s});
                std::ostringstream cell;
                if (it != acc.end()) {
                    cell << std::fixed << std::setprecision(3)
                         << it->second.first / static_cast<double>(it->second.second);
                } else {
                    cell << "-";
                }
                out << std::setw(static_cast<int>(width)) << cell.str();
            }
            out << '\n';
        }
        out << '\n';
    }
}

}  // namespace lfm
