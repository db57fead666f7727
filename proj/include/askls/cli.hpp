#pragma once

#include "askls/common.hpp"
#include "askls/data.hpp"
#include "askls/kernels.hpp"
#include "askls/metrics.hpp"
#include "askls/model.hpp"
#include "askls/multiclass.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace askls {

// Exit codes: 0 ok, 2 config, 3 io, 4 data validation, 5 numerical.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitIo = 3,
    kExitData = 4,
    kExitNumerical = 5,
};

struct RunConfig {
    std::string command;
    std::string data;           // tabular CSV (vector kernels)
    std::string labels;         // id,label CSV (graph / precomputed kernels)
    std::string edges;          // edge list (adjacency kernel)
    std::string precomputed;    // dense matrix CSV (precomputed / klexp)
    std::string label_col = "label";
    std::string kernel = "rbf";
    double sigma = 1.0;
    double a = 1.0;
    double gamma = 1.0;
    std::string model = "askls";  // askls | lssvm
    std::string merge = "avg";    // avg | source | target
    int trials = 1;
    std::uint64_t seed = 0;
    double train_frac = 0.6;
    int folds = 0;  // >0 enables per-trial CV in `eval`; fold count in `cv`
    std::string standardize = "on";
    std::string out = "askls-out";
    std::string model_file;           // input model for `predict`
    std::vector<double> gammas;       // CV grid
    std::vector<double> kernel_params;  // CV grid for sigma (rbf/sne) or a (klexp)
};

// ---------------------------------------------------------------------------
// Config file: `key = value` lines, `#` comments. Keys use the flag names
// (without the leading --). Flags given on the command line win.
// ---------------------------------------------------------------------------

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad numeric list entry '" + item + "'");
        }
    }
    return out;
}

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto to_double = [&](const std::string& v) {
        try { return std::stod(v); } catch (...) { throw ConfigError("bad number for " + key + ": " + v); }
    };
    auto to_int = [&](const std::string& v) {
        try { return std::stoi(v); } catch (...) { throw ConfigError("bad integer for " + key + ": " + v); }
    };
    if (key == "data") cfg.data = value;
    else if (key == "labels") cfg.labels = value;
    else if (key == "edges") cfg.edges = value;
    else if (key == "precomputed") cfg.precomputed = value;
    else if (key == "label-col") cfg.label_col = value;
    else if (key == "kernel") cfg.kernel = value;
    else if (key == "sigma") cfg.sigma = to_double(value);
    else if (key == "a") cfg.a = to_double(value);
    else if (key == "gamma") cfg.gamma = to_double(value);
    else if (key == "model") cfg.model = value;
    else if (key == "merge") cfg.merge = value;
    else if (key == "trials") cfg.trials = to_int(value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "train-frac") cfg.train_frac = to_double(value);
    else if (key == "folds") cfg.folds = to_int(value);
    else if (key == "standardize") cfg.standardize = value;
    else if (key == "out") cfg.out = value;
    else if (key == "model-file") cfg.model_file = value;
    else if (key == "gammas") cfg.gammas = parse_double_list(value);
    else if (key == "params") cfg.kernel_params = parse_double_list(value);
    else throw ConfigError("unknown config key: " + key);
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw ConfigError(path + " line " + std::to_string(line_no) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

inline void validate_config(const RunConfig& cfg) {
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (!(cfg.gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (cfg.model != "askls" && cfg.model != "lssvm")
        throw ConfigError("model must be askls or lssvm");
    if (cfg.standardize != "on" && cfg.standardize != "off")
        throw ConfigError("standardize must be on or off");
    kernel_family_from_name(cfg.kernel);
    merge_strategy_from_name(cfg.merge);
}

inline void write_resolved_config(std::ostream& os, const RunConfig& cfg) {
    os << "# command=" << cfg.command << " kernel=" << cfg.kernel << " sigma=" << cfg.sigma
       << " a=" << cfg.a << " gamma=" << cfg.gamma << " model=" << cfg.model
       << " merge=" << cfg.merge << " trials=" << cfg.trials << " seed=" << cfg.seed
       << " train-frac=" << cfg.train_frac << " folds=" << cfg.folds
       << " standardize=" << cfg.standardize << '\n';
    if (!cfg.data.empty()) os << "# data=" << cfg.data << '\n';
    if (!cfg.labels.empty()) os << "# labels=" << cfg.labels << '\n';
    if (!cfg.edges.empty()) os << "# edges=" << cfg.edges << '\n';
    if (!cfg.precomputed.empty()) os << "# precomputed=" << cfg.precomputed << '\n';
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::shared_ptr<const PrecomputedTable> load_table_source(const std::string& source) {
    const auto colon = source.find(':');
    if (colon == std::string::npos)
        throw IoError("malformed table source '" + source + "' (want matrix:<path> or edges:<path>)");
    const std::string kind = source.substr(0, colon);
    const std::string path = source.substr(colon + 1);
    if (kind == "matrix")
        return std::make_shared<PrecomputedTable>(load_matrix_csv(path));
    if (kind == "edges") {
        GramBlock k = adjacency_kernel(load_edge_list(path), AdjacencyPreprocess::InDegreeRowNormalize);
        return std::make_shared<PrecomputedTable>(
            PrecomputedTable::from_matrix(std::move(k.values), std::move(k.row_ids)));
    }
    throw IoError("unknown table source kind '" + kind + "'");
}

}  // namespace detail

// Builds the kernel spec implied by the config; table-backed families load
// their matrix here and remember the source for model serialization.
inline KernelSpec make_kernel_spec(const RunConfig& cfg) {
    KernelSpec spec;
    spec.family = kernel_family_from_name(cfg.kernel);
    spec.sigma = cfg.sigma;
    spec.a = cfg.a;
    switch (spec.family) {
        case KernelFamily::PrecomputedDense:
        case KernelFamily::KlExp:
            if (cfg.precomputed.empty())
                throw ConfigError("kernel '" + cfg.kernel + "' needs --precomputed <matrix.csv>");
            spec.matrix_source = "matrix:" + cfg.precomputed;
            spec.table = detail::load_table_source(spec.matrix_source);
            break;
        case KernelFamily::DirectedAdjacency:
            if (cfg.edges.empty())
                throw ConfigError("kernel 'adjacency' needs --edges <edge list>");
            spec.matrix_source = "edges:" + cfg.edges;
            spec.table = detail::load_table_source(spec.matrix_source);
            break;
        default:
            break;
    }
    spec.validate();
    return spec;
}

// Dataset for the configured kernel: tabular CSV for vector kernels,
// id/label pairs for table-backed ones.
inline LabeledDataset load_dataset(const RunConfig& cfg, const KernelSpec& spec) {
    if (spec.is_table_backed() || spec.family == KernelFamily::KlExp) {
        if (cfg.labels.empty())
            throw ConfigError("table-backed kernels need --labels <id,label csv>");
        LabeledDataset ds;
        for (const auto& [id, label] : load_node_labels(cfg.labels)) {
            ds.samples.ids.push_back(id);
            ds.labels.push_back(label);
        }
        return ds;
    }
    if (cfg.data.empty()) throw ConfigError("missing --data <csv>");
    return load_csv(cfg.data, cfg.label_col);
}

// Multiclass CLI model container: class list, optional standardizer, and
// one binary section per one-vs-rest model (a single section when binary).
struct CliModel {
    std::string algo;  // askls | lssvm
    std::vector<int> classes;
    bool standardized = false;
    Standardizer transform;
    std::vector<AskLsModel> askls_models;
    std::vector<LssvmModel> lssvm_models;

    std::vector<int> predict(const SampleSet& raw) const {
        SampleSet test = raw;
        if (standardized) test.features = transform.apply(raw.features);
        std::vector<int> signs;
        if (algo == "askls") {
            if (askls_models.size() == 1) signs = askls_models[0].predict(test);
            else {
                OneVsRest<AskLsModel> ovr{classes, askls_models};
                return predict_one_vs_rest(ovr, test);
            }
        } else {
            if (lssvm_models.size() == 1) signs = lssvm_models[0].predict(test);
            else {
                OneVsRest<LssvmModel> ovr{classes, lssvm_models};
                return predict_one_vs_rest(ovr, test);
            }
        }
        std::vector<int> out(signs.size());
        for (std::size_t i = 0; i < signs.size(); ++i)
            out[i] = signs[i] > 0 ? classes[1] : classes[0];
        return out;
    }
};

inline void save_lssvm_section(const LssvmModel& model, std::ostream& os) {
    os << detail::full_precision;
    const KernelSpec& spec = model.spec();
    os << "lssvm-model v1\n";
    os << "kernel " << kernel_family_name(spec.family) << " sigma " << spec.sigma << " a " << spec.a
       << " source " << (spec.matrix_source.empty() ? "-" : spec.matrix_source) << '\n';
    os << "gamma " << model.solution().gamma << '\n';
    os << "bias " << model.solution().bias << ' ' << model.solution().residual << '\n';
    const SampleSet& train = model.train();
    const Index d = train.has_features() ? train.features.cols() : 0;
    os << "train " << train.size() << ' ' << d << '\n';
    os << "ids";
    for (auto id : train.ids) os << ' ' << id;
    os << '\n';
    detail::write_vector(os, "y", model.labels());
    detail::write_vector(os, "alpha", model.solution().alpha);
    for (Index i = 0; i < train.size() && d > 0; ++i)
        detail::write_vector(os, "x", train.features.row(i).transpose());
    if (spec.reference_set) {
        os << "reference " << spec.reference_set->rows() << ' ' << spec.reference_set->cols() << '\n';
        for (Index i = 0; i < spec.reference_set->rows(); ++i)
            detail::write_vector(os, "r", spec.reference_set->row(i).transpose());
    }
}

inline LssvmModel load_lssvm_section(std::istream& is, TableLoader table_loader) {
    {
        std::string line;
        if (!std::getline(is, line) || line != "lssvm-model v1")
            throw IoError("bad lssvm model section header");
    }
    KernelSpec spec;
    {
        auto ls = detail::expect_line(is, "kernel");
        std::string family, key, source;
        ls >> family;
        spec.family = kernel_family_from_name(family);
        ls >> key >> spec.sigma >> key >> spec.a >> key >> source;
        if (!ls) throw IoError("model file: malformed kernel line");
        if (source != "-") spec.matrix_source = source;
    }
    LssvmSolution sol;
    {
        auto ls = detail::expect_line(is, "gamma");
        if (!(ls >> sol.gamma)) throw IoError("model file: malformed gamma line");
    }
    {
        auto ls = detail::expect_line(is, "bias");
        if (!(ls >> sol.bias >> sol.residual)) throw IoError("model file: malformed bias line");
    }
    Index m = 0, d = 0;
    {
        auto ls = detail::expect_line(is, "train");
        if (!(ls >> m >> d) || m <= 0 || d < 0) throw IoError("model file: malformed train line");
    }
    SampleSet train;
    {
        auto ls = detail::expect_line(is, "ids");
        train.ids.resize(static_cast<std::size_t>(m));
        for (auto& id : train.ids)
            if (!(ls >> id)) throw IoError("model file: short ids line");
    }
    const Vector y = detail::read_vector(is, "y", m);
    sol.alpha = detail::read_vector(is, "alpha", m);
    if (d > 0) {
        train.features.resize(m, d);
        for (Index i = 0; i < m; ++i) train.features.row(i) = detail::read_vector(is, "x", d).transpose();
    }
    if (spec.needs_reference_set()) {
        Index r = 0, rd = 0;
        auto ls = detail::expect_line(is, "reference");
        if (!(ls >> r >> rd)) throw IoError("model file: malformed reference line");
        Matrix ref(r, rd);
        for (Index i = 0; i < r; ++i) ref.row(i) = detail::read_vector(is, "r", rd).transpose();
        spec.reference_set = std::make_shared<Matrix>(std::move(ref));
    }
    if (spec.is_table_backed()) {
        if (!table_loader) throw IoError("model file uses a precomputed kernel; a table loader is required");
        spec.table = table_loader(spec.matrix_source);
    }
    return LssvmModel::from_parts(std::move(train), y, std::move(spec), std::move(sol));
}

inline void save_cli_model(const CliModel& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open model file for writing: " + path);
    os << detail::full_precision;
    os << "askls-cli-model v1\n";
    os << "algo " << m.algo << '\n';
    os << "classes " << m.classes.size();
    for (int c : m.classes) os << ' ' << c;
    os << '\n';
    if (m.standardized) {
        os << "standardizer " << m.transform.mean.size() << '\n';
        detail::write_vector(os, "mean", m.transform.mean);
        detail::write_vector(os, "scale", m.transform.scale);
    } else {
        os << "standardizer 0\n";
    }
    const std::size_t n = m.algo == "askls" ? m.askls_models.size() : m.lssvm_models.size();
    os << "models " << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        if (m.algo == "askls") save_model(m.askls_models[i], os);
        else save_lssvm_section(m.lssvm_models[i], os);
    }
    if (!os.good()) throw IoError("failed writing model file: " + path);
}

inline CliModel load_cli_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open model file: " + path);
    std::string line;
    if (!std::getline(is, line) || line != "askls-cli-model v1")
        throw IoError("not an askls cli model file: " + path);
    CliModel m;
    {
        auto ls = detail::expect_line(is, "algo");
        ls >> m.algo;
        if (m.algo != "askls" && m.algo != "lssvm") throw IoError("bad algo in model file");
    }
    {
        auto ls = detail::expect_line(is, "classes");
        std::size_t k = 0;
        if (!(ls >> k) || k < 2) throw IoError("bad classes line in model file");
        m.classes.resize(k);
        for (auto& c : m.classes)
            if (!(ls >> c)) throw IoError("short classes line in model file");
    }
    {
        auto ls = detail::expect_line(is, "standardizer");
        Index d = 0;
        if (!(ls >> d) || d < 0) throw IoError("bad standardizer line in model file");
        if (d > 0) {
            m.standardized = true;
            m.transform.mean = detail::read_vector(is, "mean", d);
            m.transform.scale = detail::read_vector(is, "scale", d);
        }
    }
    std::size_t n = 0;
    {
        auto ls = detail::expect_line(is, "models");
        if (!(ls >> n) || n == 0) throw IoError("bad models line in model file");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (m.algo == "askls") m.askls_models.push_back(load_model(is, &detail::load_table_source));
        else m.lssvm_models.push_back(load_lssvm_section(is, &detail::load_table_source));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline CliModel fit_cli_model(const RunConfig& cfg, const LabeledDataset& raw,
                              const KernelSpec& spec, double gamma) {
    CliModel m;
    m.algo = cfg.model;
    m.classes = distinct_classes(raw.labels);
    if (m.classes.size() < 2) throw DataError("training data must contain at least two classes");

    LabeledDataset train = raw;
    if (cfg.standardize == "on" && train.feature_dim() > 0) {
        m.standardized = true;
        const Standardizer s = fit_standardizer(train.samples.features);
        train.samples.features = s.apply(train.samples.features);
        m.transform = s;
    }

    const MergeStrategy merge = merge_strategy_from_name(cfg.merge);
    if (m.classes.size() == 2) {
        Vector y(train.size());
        for (Index i = 0; i < train.size(); ++i)
            y[i] = train.labels[static_cast<std::size_t>(i)] == m.classes[1] ? 1.0 : -1.0;
        if (cfg.model == "askls")
            m.askls_models.push_back(AskLsModel::fit(train.samples, y, spec, gamma, merge));
        else
            m.lssvm_models.push_back(LssvmModel::fit(train.samples, y, spec, gamma));
    } else {
        if (cfg.model == "askls")
            m.askls_models = fit_ovr_askls(train.samples, train.labels, spec, gamma, merge).models;
        else
            m.lssvm_models = fit_ovr_lssvm(train.samples, train.labels, spec, gamma).models;
    }
    return m;
}

inline int cmd_train(const RunConfig& cfg) {
    const KernelSpec spec = make_kernel_spec(cfg);
    const LabeledDataset ds = load_dataset(cfg, spec);
    const CliModel model = fit_cli_model(cfg, ds, spec, cfg.gamma);

    const std::string model_path = cfg.out;
    save_cli_model(model, model_path);

    std::ofstream report(model_path + ".report.txt");
    if (!report) throw IoError("cannot write fit report");
    write_resolved_config(report, cfg);
    report << "model " << model_path << '\n';
    report << "classes " << model.classes.size() << '\n';
    report << "train_size " << ds.size() << '\n';
    report << std::setprecision(6);
    if (cfg.model == "askls") {
        for (std::size_t i = 0; i < model.askls_models.size(); ++i)
            report << "residual[" << i << "] " << std::scientific
                   << model.askls_models[i].dual().residual << std::defaultfloat << '\n';
    } else {
        for (std::size_t i = 0; i < model.lssvm_models.size(); ++i)
            report << "residual[" << i << "] " << std::scientific
                   << model.lssvm_models[i].solution().residual << std::defaultfloat << '\n';
    }
    std::cout << "wrote " << model_path << " and " << model_path << ".report.txt\n";
    return kExitOk;
}

inline int cmd_predict(const RunConfig& cfg) {
    if (cfg.model_file.empty()) throw ConfigError("predict needs --model-file");
    const CliModel model = load_cli_model(cfg.model_file);

    SampleSet test;
    std::vector<int> truth;
    const bool table_backed = model.algo == "askls"
                                  ? model.askls_models[0].spec().is_table_backed() ||
                                        model.askls_models[0].spec().family == KernelFamily::KlExp
                                  : model.lssvm_models[0].spec().is_table_backed() ||
                                        model.lssvm_models[0].spec().family == KernelFamily::KlExp;
    if (table_backed) {
        if (cfg.labels.empty()) throw ConfigError("predict with a table-backed kernel needs --labels");
        for (const auto& [id, label] : load_node_labels(cfg.labels)) {
            test.ids.push_back(id);
            truth.push_back(label);
        }
    } else if (!cfg.data.empty() && csv_has_column(cfg.data, cfg.label_col)) {
        LabeledDataset ds = load_csv(cfg.data, cfg.label_col);
        test = ds.samples;
        truth = ds.labels;
    } else if (!cfg.data.empty()) {
        test = load_csv_features(cfg.data);
    } else {
        throw ConfigError("predict needs --data (or --labels for table-backed kernels)");
    }

    const std::vector<int> pred = model.predict(test);
    std::ofstream os(cfg.out);
    if (!os) throw IoError("cannot open predictions file for writing: " + cfg.out);
    write_resolved_config(os, cfg);
    os << "id,predicted\n";
    for (std::size_t i = 0; i < pred.size(); ++i) os << test.ids[i] << ',' << pred[i] << '\n';
    if (!truth.empty()) {
        const TrialMetrics t = evaluate_predictions(pred, truth, model.classes);
        std::cout << std::fixed << std::setprecision(4) << "accuracy " << t.accuracy << " micro-f1 "
                  << t.micro_f1 << " macro-f1 " << t.macro_f1 << '\n';
    }
    std::cout << "wrote " << cfg.out << '\n';
    return kExitOk;
}

// Per-trial pipeline: split -> (cv?) -> fit -> predict. The kernel grid
// parameter maps onto sigma for rbf/sne and onto a for klexp.
inline TrialMetrics run_eval_trial(const RunConfig& cfg, const LabeledDataset& ds,
                                   const KernelSpec& base_spec, std::uint64_t trial_seed,
                                   const std::vector<int>& class_list) {
    auto [train, test] = stratified_split(ds, cfg.train_frac, trial_seed);
    if (cfg.standardize == "on" && train.feature_dim() > 0) {
        auto [tr, te] = standardize(train, test);
        train = std::move(tr);
        test = std::move(te);
    }

    RunConfig fit_cfg = cfg;
    fit_cfg.standardize = "off";  // already applied above
    double gamma = cfg.gamma;
    KernelSpec spec = base_spec;

    if (cfg.folds > 0 && !cfg.gammas.empty()) {
        CvGrid grid;
        grid.gammas = cfg.gammas;
        grid.kernel_params = cfg.kernel_params.empty() ? std::vector<double>{0.0} : cfg.kernel_params;
        grid.folds = cfg.folds;
        grid.seed = trial_seed;
        const CvResult cv = cross_validate(train, grid, [&](const LabeledDataset& tr,
                                                            const LabeledDataset& va,
                                                            const CvCell& cell) {
            RunConfig cell_cfg = fit_cfg;
            KernelSpec cell_spec = base_spec;
            if (!cfg.kernel_params.empty()) {
                if (cell_spec.family == KernelFamily::KlExp) cell_spec.a = cell.kernel_param;
                else cell_spec.sigma = cell.kernel_param;
            }
            const CliModel m = fit_cli_model(cell_cfg, tr, cell_spec, cell.gamma);
            return accuracy(m.predict(va.samples), va.labels);
        });
        gamma = cv.best.gamma;
        if (!cfg.kernel_params.empty()) {
            if (spec.family == KernelFamily::KlExp) spec.a = cv.best.kernel_param;
            else spec.sigma = cv.best.kernel_param;
        }
    }

    const CliModel model = fit_cli_model(fit_cfg, train, spec, gamma);
    return evaluate_predictions(model.predict(test.samples), test.labels, class_list);
}

inline int cmd_eval(const RunConfig& cfg) {
    const KernelSpec spec = make_kernel_spec(cfg);
    const LabeledDataset ds = load_dataset(cfg, spec);
    const std::vector<int> class_list = distinct_classes(ds.labels);

    EvalReport report;
    const std::string method = cfg.model + "-" + cfg.kernel;
    for (int t = 0; t < cfg.trials; ++t)
        report.add(method, run_eval_trial(cfg, ds, spec, cfg.seed + static_cast<std::uint64_t>(t), class_list));

    std::ofstream csv(cfg.out + ".csv");
    if (!csv) throw IoError("cannot write " + cfg.out + ".csv");
    write_resolved_config(csv, cfg);
    report.write_csv(csv);
    std::ofstream txt(cfg.out + ".txt");
    if (!txt) throw IoError("cannot write " + cfg.out + ".txt");
    write_resolved_config(txt, cfg);
    report.write_table(txt);
    report.write_table(std::cout);
    return kExitOk;
}

inline int cmd_cv(const RunConfig& cfg) {
    if (cfg.gammas.empty()) throw ConfigError("cv needs --gammas");
    if (cfg.folds < 2) throw ConfigError("cv needs --folds >= 2");
    const KernelSpec spec = make_kernel_spec(cfg);
    LabeledDataset ds = load_dataset(cfg, spec);
    if (cfg.standardize == "on" && ds.feature_dim() > 0) {
        const Standardizer s = fit_standardizer(ds.samples.features);
        ds.samples.features = s.apply(ds.samples.features);
    }

    RunConfig fit_cfg = cfg;
    fit_cfg.standardize = "off";
    CvGrid grid;
    grid.gammas = cfg.gammas;
    grid.kernel_params = cfg.kernel_params.empty() ? std::vector<double>{0.0} : cfg.kernel_params;
    grid.folds = cfg.folds;
    grid.seed = cfg.seed;
    const CvResult cv = cross_validate(ds, grid, [&](const LabeledDataset& tr, const LabeledDataset& va,
                                                     const CvCell& cell) {
        KernelSpec cell_spec = spec;
        if (!cfg.kernel_params.empty()) {
            if (cell_spec.family == KernelFamily::KlExp) cell_spec.a = cell.kernel_param;
            else cell_spec.sigma = cell.kernel_param;
        }
        const CliModel m = fit_cli_model(fit_cfg, tr, cell_spec, cell.gamma);
        return accuracy(m.predict(va.samples), va.labels);
    });

    std::ofstream csv(cfg.out + ".csv");
    if (!csv) throw IoError("cannot write " + cfg.out + ".csv");
    write_resolved_config(csv, cfg);
    write_cv_table_csv(cv, csv);
    std::ofstream txt(cfg.out + ".txt");
    if (!txt) throw IoError("cannot write " + cfg.out + ".txt");
    write_resolved_config(txt, cfg);
    txt << std::setprecision(10) << "best_gamma " << cv.best.gamma << "\nbest_kernel_param "
        << cv.best.kernel_param << "\nbest_mean_score " << cv.best_mean_score << '\n';
    std::cout << "best gamma=" << cv.best.gamma << " kernel_param=" << cv.best.kernel_param
              << " mean_score=" << cv.best_mean_score << '\n';
    return kExitOk;
}

// Transductive node classification on a directed graph: AsK-LS on the
// in-degree-normalized adjacency vs LS-SVM on its Average symmetrization.
inline int cmd_graph_eval(const RunConfig& cfg) {
    if (cfg.edges.empty() || cfg.labels.empty())
        throw ConfigError("graph-eval needs --edges and --labels");
    const DirectedGraph g = load_edge_list(cfg.edges);
    const GramBlock asym = adjacency_kernel(g, AdjacencyPreprocess::InDegreeRowNormalize);
    const GramBlock sym = symmetrize(asym, SymmetrizeMode::Average);

    KernelSpec asym_spec;
    asym_spec.family = KernelFamily::DirectedAdjacency;
    asym_spec.matrix_source = "edges:" + cfg.edges;
    asym_spec.table = std::make_shared<PrecomputedTable>(
        PrecomputedTable::from_matrix(asym.values, asym.row_ids));
    KernelSpec sym_spec;
    sym_spec.family = KernelFamily::PrecomputedDense;
    sym_spec.table = std::make_shared<PrecomputedTable>(
        PrecomputedTable::from_matrix(sym.values, sym.row_ids));

    LabeledDataset ds;
    for (const auto& [id, label] : load_node_labels(cfg.labels)) {
        ds.samples.ids.push_back(id);
        ds.labels.push_back(label);
    }
    const std::vector<int> class_list = distinct_classes(ds.labels);
    const MergeStrategy merge = merge_strategy_from_name(cfg.merge);

    EvalReport report;
    for (int t = 0; t < cfg.trials; ++t) {
        const std::uint64_t trial_seed = cfg.seed + static_cast<std::uint64_t>(t);
        auto [train, test] = stratified_split(ds, cfg.train_frac, trial_seed);
        if (class_list.size() == 2) {
            Vector y(train.size());
            for (Index i = 0; i < train.size(); ++i)
                y[i] = train.labels[static_cast<std::size_t>(i)] == class_list[1] ? 1.0 : -1.0;
            auto to_labels = [&](const std::vector<int>& signs) {
                std::vector<int> out(signs.size());
                for (std::size_t i = 0; i < signs.size(); ++i)
                    out[i] = signs[i] > 0 ? class_list[1] : class_list[0];
                return out;
            };
            const auto askls = AskLsModel::fit(train.samples, y, asym_spec, cfg.gamma, merge);
            report.add("askls-adjacency",
                       evaluate_predictions(to_labels(askls.predict(test.samples)), test.labels, class_list));
            const auto lssvm = LssvmModel::fit(train.samples, y, sym_spec, cfg.gamma);
            report.add("lssvm-symmetrized",
                       evaluate_predictions(to_labels(lssvm.predict(test.samples)), test.labels, class_list));
        } else {
            const auto askls = fit_ovr_askls(train.samples, train.labels, asym_spec, cfg.gamma, merge);
            report.add("askls-adjacency",
                       evaluate_predictions(predict_one_vs_rest(askls, test.samples), test.labels, class_list));
            const auto lssvm = fit_ovr_lssvm(train.samples, train.labels, sym_spec, cfg.gamma);
            report.add("lssvm-symmetrized",
                       evaluate_predictions(predict_one_vs_rest(lssvm, test.samples), test.labels, class_list));
        }
    }

    std::ofstream csv(cfg.out + ".csv");
    if (!csv) throw IoError("cannot write " + cfg.out + ".csv");
    write_resolved_config(csv, cfg);
    report.write_csv(csv);
    std::ofstream txt(cfg.out + ".txt");
    if (!txt) throw IoError("cannot write " + cfg.out + ".txt");
    write_resolved_config(txt, cfg);
    report.write_table(txt);
    report.write_table(std::cout);
    return kExitOk;
}

inline int run_command(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.command == "train") return cmd_train(cfg);
    if (cfg.command == "predict") return cmd_predict(cfg);
    if (cfg.command == "eval") return cmd_eval(cfg);
    if (cfg.command == "cv") return cmd_cv(cfg);
    if (cfg.command == "graph-eval") return cmd_graph_eval(cfg);
    throw ConfigError("unknown command: " + cfg.command);
}

// Single-line machine-parseable error reporting; returns the exit code.
inline int report_error_and_code(const std::exception& e, std::ostream& err = std::cerr) {
    const char* category = "internal";
    int code = 1;
    if (dynamic_cast<const ConfigError*>(&e)) { category = "config"; code = kExitConfig; }
    else if (dynamic_cast<const IoError*>(&e)) { category = "io"; code = kExitIo; }
    else if (dynamic_cast<const NumericalError*>(&e)) { category = "numerical"; code = kExitNumerical; }
    else if (dynamic_cast<const DataError*>(&e)) { category = "data"; code = kExitData; }
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: category=" << category << " message=\"" << msg << "\"\n";
    return code;
}

}  // namespace askls
