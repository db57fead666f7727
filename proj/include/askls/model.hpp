#pragma once

#include "askls/common.hpp"
#include "askls/kernels.hpp"
#include "askls/solver.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace askls {

enum class MergeStrategy { AverageScores, SourceOnly, TargetOnly };

inline const char* merge_strategy_name(MergeStrategy m) {
    switch (m) {
        case MergeStrategy::AverageScores: return "avg";
        case MergeStrategy::SourceOnly: return "source";
        case MergeStrategy::TargetOnly: return "target";
    }
    return "?";
}

inline MergeStrategy merge_strategy_from_name(const std::string& name) {
    if (name == "avg") return MergeStrategy::AverageScores;
    if (name == "source") return MergeStrategy::SourceOnly;
    if (name == "target") return MergeStrategy::TargetOnly;
    throw ConfigError("unknown merge strategy: " + name);
}

// Tie rule: sign(0) = +1.
inline int sign_label(double score) { return score >= 0.0 ? 1 : -1; }

struct DecisionScores {
    Vector f_source;
    Vector f_target;
    Vector f_merged;
    std::vector<int> predicted;  // sign(f_merged), sign(0) = +1
};

// Binary AsK-LS classifier. Immutable after fit; the kernel spec inside
// holds the frozen reference set / table, so prediction never re-binds.
class AskLsModel {
public:
    static AskLsModel fit(const SampleSet& train, const Vector& y, KernelSpec spec, double gamma,
                          MergeStrategy merge = MergeStrategy::AverageScores) {
        if (train.size() != y.size()) throw DimensionError("fit: samples and labels differ in size");
        if (spec.needs_reference_set() && !spec.reference_set)
            spec.reference_set = std::make_shared<Matrix>(train.features);
        const GramBlock k = build_gram(spec, train, train);
        AskLsModel m;
        m.train_ = train;
        m.y_ = y;
        m.spec_ = std::move(spec);
        m.merge_ = merge;
        m.dual_ = solve_askls(k, y, gamma);
        return m;
    }

    // f_s(x) = K(x, X)(beta . y) + b1,  f_t(x) = K(X, x)^T (alpha . y) + b2.
    DecisionScores decision_scores(const SampleSet& test) const {
        const GramBlock k_x_train = build_gram(spec_, test, train_);
        const GramBlock k_train_x = build_gram(spec_, train_, test);
        DecisionScores s;
        s.f_source = (k_x_train.values * dual_.beta.cwiseProduct(y_)).array() + dual_.b1;
        s.f_target = (k_train_x.values.transpose() * dual_.alpha.cwiseProduct(y_)).array() + dual_.b2;
        switch (merge_) {
            case MergeStrategy::AverageScores: s.f_merged = 0.5 * (s.f_source + s.f_target); break;
            case MergeStrategy::SourceOnly: s.f_merged = s.f_source; break;
            case MergeStrategy::TargetOnly: s.f_merged = s.f_target; break;
        }
        s.predicted.resize(static_cast<std::size_t>(s.f_merged.size()));
        for (Index i = 0; i < s.f_merged.size(); ++i)
            s.predicted[static_cast<std::size_t>(i)] = sign_label(s.f_merged[i]);
        return s;
    }

    std::vector<int> predict(const SampleSet& test) const { return decision_scores(test).predicted; }

    Vector merged_scores(const SampleSet& test) const { return decision_scores(test).f_merged; }

    const SampleSet& train() const { return train_; }
    const Vector& labels() const { return y_; }
    const KernelSpec& spec() const { return spec_; }
    const DualSolution& dual() const { return dual_; }
    MergeStrategy merge() const { return merge_; }

    // Test seam: assemble a model from parts without solving.
    static AskLsModel from_parts(SampleSet train, Vector y, KernelSpec spec, DualSolution dual,
                                 MergeStrategy merge) {
        AskLsModel m;
        m.train_ = std::move(train);
        m.y_ = std::move(y);
        m.spec_ = std::move(spec);
        m.dual_ = std::move(dual);
        m.merge_ = merge;
        return m;
    }

private:
    AskLsModel() = default;
    SampleSet train_;
    Vector y_;
    KernelSpec spec_;
    DualSolution dual_;
    MergeStrategy merge_ = MergeStrategy::AverageScores;
};

// Classical LS-SVM baseline, f(x) = K(x, X)(alpha . y) + b. Requires a
// symmetric kernel; used for the Theorem-2 comparisons and graph baselines.
class LssvmModel {
public:
    static LssvmModel fit(const SampleSet& train, const Vector& y, KernelSpec spec, double gamma) {
        if (train.size() != y.size()) throw DimensionError("fit: samples and labels differ in size");
        if (spec.needs_reference_set() && !spec.reference_set)
            spec.reference_set = std::make_shared<Matrix>(train.features);
        const GramBlock k = build_gram(spec, train, train);
        LssvmModel m;
        m.train_ = train;
        m.y_ = y;
        m.spec_ = std::move(spec);
        m.solution_ = solve_lssvm(k, y, gamma);
        return m;
    }

    Vector merged_scores(const SampleSet& test) const {
        const GramBlock k_x_train = build_gram(spec_, test, train_);
        return (k_x_train.values * solution_.alpha.cwiseProduct(y_)).array() + solution_.bias;
    }

    std::vector<int> predict(const SampleSet& test) const {
        const Vector f = merged_scores(test);
        std::vector<int> out(static_cast<std::size_t>(f.size()));
        for (Index i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(i)] = sign_label(f[i]);
        return out;
    }

    const SampleSet& train() const { return train_; }
    const Vector& labels() const { return y_; }
    const KernelSpec& spec() const { return spec_; }
    const LssvmSolution& solution() const { return solution_; }

    static LssvmModel from_parts(SampleSet train, Vector y, KernelSpec spec, LssvmSolution sol) {
        LssvmModel m;
        m.train_ = std::move(train);
        m.y_ = std::move(y);
        m.spec_ = std::move(spec);
        m.solution_ = std::move(sol);
        return m;
    }

private:
    LssvmModel() = default;
    SampleSet train_;
    Vector y_;
    KernelSpec spec_;
    LssvmSolution solution_;
};

// ---------------------------------------------------------------------------
// Flat-file model serialization
// ---------------------------------------------------------------------------
//
// Line-oriented text format. Doubles are written with max_digits10 so a
// round-trip reproduces predictions bitwise. Layout:
//
//   askls-model v1
//   kernel <family> sigma <s> a <a> source <path|->
//   merge <avg|source|target>
//   gamma <g>
//   duals <b1> <b2> <residual>
//   train <m> <d>
//   ids <m ints>
//   y <m values>
//   alpha <m values>
//   beta <m values>
//   x <row 0 of the feature matrix>        (d > 0 only; m rows)
//   ...
//   reference <r> <d>                      (SNE/T only; r rows follow)
//   ...
//
// Table-backed kernels persist `source <path>`; the table is re-read from
// that path on load.

namespace detail {

inline std::ostream& full_precision(std::ostream& os) {
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    return os;
}

inline void write_vector(std::ostream& os, const char* tag, const Vector& v) {
    os << tag;
    for (Index i = 0; i < v.size(); ++i) os << ' ' << v[i];
    os << '\n';
}

inline std::istringstream expect_line(std::istream& is, const std::string& tag) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("model file truncated; expected '" + tag + "' line");
    std::istringstream ls(line);
    std::string got;
    ls >> got;
    if (got != tag) throw IoError("model file: expected '" + tag + "', got '" + got + "'");
    return ls;
}

inline Vector read_vector(std::istream& is, const std::string& tag, Index n) {
    auto ls = expect_line(is, tag);
    Vector v(n);
    for (Index i = 0; i < n; ++i)
        if (!(ls >> v[i])) throw IoError("model file: short '" + tag + "' line");
    return v;
}

}  // namespace detail

inline void save_model(const AskLsModel& model, std::ostream& os) {
    os << detail::full_precision;
    const KernelSpec& spec = model.spec();
    os << "askls-model v1\n";
    os << "kernel " << kernel_family_name(spec.family) << " sigma " << spec.sigma << " a " << spec.a
       << " source " << (spec.matrix_source.empty() ? "-" : spec.matrix_source) << '\n';
    os << "merge " << merge_strategy_name(model.merge()) << '\n';
    os << "gamma " << model.dual().gamma << '\n';
    os << "duals " << model.dual().b1 << ' ' << model.dual().b2 << ' ' << model.dual().residual << '\n';
    const SampleSet& train = model.train();
    const Index d = train.has_features() ? train.features.cols() : 0;
    os << "train " << train.size() << ' ' << d << '\n';
    os << "ids";
    for (auto id : train.ids) os << ' ' << id;
    os << '\n';
    detail::write_vector(os, "y", model.labels());
    detail::write_vector(os, "alpha", model.dual().alpha);
    detail::write_vector(os, "beta", model.dual().beta);
    for (Index i = 0; i < train.size() && d > 0; ++i)
        detail::write_vector(os, "x", train.features.row(i).transpose());
    if (spec.reference_set) {
        os << "reference " << spec.reference_set->rows() << ' ' << spec.reference_set->cols() << '\n';
        for (Index i = 0; i < spec.reference_set->rows(); ++i)
            detail::write_vector(os, "r", spec.reference_set->row(i).transpose());
    }
}

inline void save_model(const AskLsModel& model, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open model file for writing: " + path);
    save_model(model, os);
    if (!os.good()) throw IoError("failed writing model file: " + path);
}

// `table_loader` resolves `source` paths for table-backed kernels; pass
// nullptr when the model is known to use a vector kernel.
using TableLoader = std::shared_ptr<const PrecomputedTable> (*)(const std::string& path);

inline AskLsModel load_model(std::istream& is, TableLoader table_loader = nullptr) {
    {
        std::string line;
        if (!std::getline(is, line) || line != "askls-model v1")
            throw IoError("not an askls model file (bad header)");
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
    MergeStrategy merge;
    {
        auto ls = detail::expect_line(is, "merge");
        std::string name;
        ls >> name;
        merge = merge_strategy_from_name(name);
    }
    DualSolution dual;
    {
        auto ls = detail::expect_line(is, "gamma");
        if (!(ls >> dual.gamma)) throw IoError("model file: malformed gamma line");
    }
    {
        auto ls = detail::expect_line(is, "duals");
        if (!(ls >> dual.b1 >> dual.b2 >> dual.residual)) throw IoError("model file: malformed duals line");
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
    dual.alpha = detail::read_vector(is, "alpha", m);
    dual.beta = detail::read_vector(is, "beta", m);
    if (d > 0) {
        train.features.resize(m, d);
        for (Index i = 0; i < m; ++i)
            train.features.row(i) = detail::read_vector(is, "x", d).transpose();
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
        if (spec.matrix_source.empty())
            throw IoError("model file: table-backed kernel without a source path");
        if (!table_loader)
            throw IoError("model file uses a precomputed kernel; a table loader is required");
        spec.table = table_loader(spec.matrix_source);
    }
    return AskLsModel::from_parts(std::move(train), y, std::move(spec), std::move(dual), merge);
}

inline AskLsModel load_model(const std::string& path, TableLoader table_loader = nullptr) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open model file: " + path);
    return load_model(is, table_loader);
}

}  // namespace askls
