#pragma once

#include "askls/common.hpp"
#include "askls/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace askls {

struct LabeledDataset {
    SampleSet samples;
    std::vector<int> labels;

    Index size() const { return samples.size(); }
    Index feature_dim() const { return samples.has_features() ? samples.features.cols() : 0; }

    LabeledDataset subset(const std::vector<Index>& rows) const {
        LabeledDataset d;
        d.samples = samples.subset(rows);
        d.labels.reserve(rows.size());
        for (Index r : rows) d.labels.push_back(labels[static_cast<std::size_t>(r)]);
        return d;
    }
};

namespace detail {

// getline keeps the \r of CRLF files; all line-oriented readers drop it.
inline std::string& strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, std::size_t line_no, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) + ": non-numeric " + what + " '" + s + "'");
    }
}

inline long parse_long(const std::string& s, std::size_t line_no, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) + ": non-integer " + what + " '" + s + "'");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tabular CSV: header row, one labeled sample per line
// ---------------------------------------------------------------------------

inline LabeledDataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open dataset: " + path);
    std::string line;
    if (!std::getline(is, line)) throw DataError(path + ": empty file");
    detail::strip_cr(line);
    const auto header = detail::split_csv_line(line);
    std::ptrdiff_t label_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_column) label_idx = static_cast<std::ptrdiff_t>(i);
    if (label_idx < 0) throw DataError(path + ": label column '" + label_column + "' not found");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        std::vector<double> feat;
        feat.reserve(fields.size() - 1);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (static_cast<std::ptrdiff_t>(i) == label_idx)
                labels.push_back(static_cast<int>(detail::parse_long(fields[i], line_no, "label")));
            else
                feat.push_back(detail::parse_double(fields[i], line_no, "feature"));
        }
        rows.push_back(std::move(feat));
    }
    if (rows.empty()) throw DataError(path + ": no data rows");

    LabeledDataset ds;
    ds.samples.features.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
    ds.samples.ids.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ds.samples.ids[i] = static_cast<std::int64_t>(i);
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            ds.samples.features(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    ds.labels = std::move(labels);
    return ds;
}

inline bool csv_has_column(const std::string& path, const std::string& column) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open dataset: " + path);
    std::string line;
    if (!std::getline(is, line)) throw DataError(path + ": empty file");
    detail::strip_cr(line);
    for (const auto& name : detail::split_csv_line(line))
        if (name == column) return true;
    return false;
}

// All columns numeric, no label column (prediction inputs).
inline SampleSet load_csv_features(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open dataset: " + path);
    std::string line;
    if (!std::getline(is, line)) throw DataError(path + ": empty file");
    detail::strip_cr(line);
    const std::size_t width = detail::split_csv_line(line).size();
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != width)
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        std::vector<double> feat;
        for (const auto& f : fields) feat.push_back(detail::parse_double(f, line_no, "feature"));
        rows.push_back(std::move(feat));
    }
    if (rows.empty()) throw DataError(path + ": no data rows");
    Matrix x(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            x(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return SampleSet::from_features(std::move(x));
}

inline void save_csv(const LabeledDataset& ds, const std::string& path,
                     const std::string& label_column) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Index j = 0; j < ds.feature_dim(); ++j) os << 'f' << j << ',';
    os << label_column << '\n';
    for (Index i = 0; i < ds.size(); ++i) {
        for (Index j = 0; j < ds.feature_dim(); ++j) os << ds.samples.features(i, j) << ',';
        os << ds.labels[static_cast<std::size_t>(i)] << '\n';
    }
}

// ---------------------------------------------------------------------------
// Splits, folds, standardization
// ---------------------------------------------------------------------------

namespace detail {

inline std::map<int, std::vector<Index>> indices_by_class(const std::vector<int>& labels) {
    std::map<int, std::vector<Index>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_class[labels[i]].push_back(static_cast<Index>(i));
    return by_class;
}

}  // namespace detail

// Stratified, seed-deterministic train/test split. Each class contributes
// round(fraction * count) samples to train, clamped so both sides stay
// nonempty per class.
inline std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                                  double train_fraction,
                                                                  std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw DataError("train fraction must lie strictly between 0 and 1");
    Rng rng(seed);
    std::vector<Index> train_rows, test_rows;
    for (auto& [cls, idx] : detail::indices_by_class(ds.labels)) {
        if (idx.size() < 2)
            throw DataError("class " + std::to_string(cls) + " has fewer than 2 samples; cannot stratify");
        std::vector<Index> shuffled = idx;
        rng.shuffle(shuffled);
        auto n_train = static_cast<std::size_t>(std::llround(train_fraction * double(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        train_rows.insert(train_rows.end(), shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_rows.insert(test_rows.end(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train), shuffled.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {ds.subset(train_rows), ds.subset(test_rows)};
}

// Stratified k-fold assignment: per class, shuffle then deal round-robin.
// Returns fold index per sample.
inline std::vector<int> stratified_fold_assignment(const std::vector<int>& labels, int folds,
                                                   std::uint64_t seed) {
    if (folds < 2) throw DataError("need at least 2 folds");
    Rng rng(seed);
    std::vector<int> assignment(labels.size(), -1);
    for (auto& [cls, idx] : detail::indices_by_class(labels)) {
        if (static_cast<int>(idx.size()) < folds)
            throw DataError("class " + std::to_string(cls) + " has fewer samples than folds");
        std::vector<Index> shuffled = idx;
        rng.shuffle(shuffled);
        for (std::size_t i = 0; i < shuffled.size(); ++i)
            assignment[static_cast<std::size_t>(shuffled[i])] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
    return assignment;
}

// Per-feature affine transform fitted on train only; zero-variance features
// pass through unchanged.
struct Standardizer {
    Vector mean;
    Vector scale;  // 1/std, or 1 for constant features

    Matrix apply(const Matrix& x) const {
        if (x.cols() != mean.size()) throw DimensionError("standardizer: dimension mismatch");
        return (x.rowwise() - mean.transpose()).array().rowwise() * scale.transpose().array();
    }
};

inline Standardizer fit_standardizer(const Matrix& train) {
    Standardizer s;
    const Index n = train.rows();
    s.mean = train.colwise().mean();
    s.scale.resize(train.cols());
    for (Index j = 0; j < train.cols(); ++j) {
        const double var = (train.col(j).array() - s.mean[j]).square().sum() / double(n);
        s.scale[j] = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    }
    // keep constant features bit-identical, not merely rescaled
    for (Index j = 0; j < train.cols(); ++j)
        if (s.scale[j] == 1.0 && (train.col(j).array() == train(0, j)).all()) s.mean[j] = 0.0;
    return s;
}

inline std::pair<LabeledDataset, LabeledDataset> standardize(const LabeledDataset& train,
                                                             const LabeledDataset& test,
                                                             Standardizer* out_transform = nullptr) {
    if (train.feature_dim() == 0) throw DataError("standardize: dataset has no features");
    const Standardizer s = fit_standardizer(train.samples.features);
    LabeledDataset tr = train, te = test;
    tr.samples.features = s.apply(train.samples.features);
    if (test.size() > 0) te.samples.features = s.apply(test.samples.features);
    if (out_transform) *out_transform = s;
    return {std::move(tr), std::move(te)};
}

// ---------------------------------------------------------------------------
// Cross-validation over a (gamma, kernel-parameter) grid
// ---------------------------------------------------------------------------

struct CvGrid {
    std::vector<double> gammas;
    std::vector<double> kernel_params;  // sigma or a depending on family; {0} if unused
    int folds = 10;
    std::uint64_t seed = 0;
};

struct CvCell {
    double gamma = 0.0;
    double kernel_param = 0.0;
};

struct CvFoldScore {
    CvCell cell;
    int fold = 0;
    double score = 0.0;
    bool failed = false;
    std::string error;
};

struct CvResult {
    CvCell best;
    double best_mean_score = -std::numeric_limits<double>::infinity();
    std::vector<CvFoldScore> table;  // one row per (cell, fold)
};

// Exhaustive stratified k-fold grid search. `fit_score(train, val, cell)`
// returns the validation metric (higher is better); a throwing cell scores
// -inf and is recorded. Cells are visited with gamma ascending then kernel
// parameter ascending, and strict improvement wins, so ties break toward
// the smaller gamma, then the smaller kernel parameter.
template <class FitScore>
CvResult cross_validate(const LabeledDataset& train, const CvGrid& grid, FitScore&& fit_score) {
    if (grid.gammas.empty() || grid.kernel_params.empty()) throw DataError("empty cv grid");
    const auto assignment = stratified_fold_assignment(train.labels, grid.folds, grid.seed);

    std::vector<double> gammas = grid.gammas;
    std::vector<double> params = grid.kernel_params;
    std::sort(gammas.begin(), gammas.end());
    std::sort(params.begin(), params.end());

    CvResult result;
    for (double g : gammas) {
        for (double p : params) {
            const CvCell cell{g, p};
            double sum = 0.0;
            bool cell_failed = false;
            for (int f = 0; f < grid.folds; ++f) {
                std::vector<Index> tr, va;
                for (std::size_t i = 0; i < assignment.size(); ++i)
                    (assignment[i] == f ? va : tr).push_back(static_cast<Index>(i));
                CvFoldScore row;
                row.cell = cell;
                row.fold = f;
                try {
                    row.score = fit_score(train.subset(tr), train.subset(va), cell);
                } catch (const Error& e) {
                    row.failed = true;
                    row.error = e.what();
                    cell_failed = true;
                }
                sum += row.failed ? 0.0 : row.score;
                result.table.push_back(std::move(row));
            }
            const double mean = cell_failed ? -std::numeric_limits<double>::infinity()
                                            : sum / double(grid.folds);
            if (mean > result.best_mean_score) {
                result.best_mean_score = mean;
                result.best = cell;
            }
        }
    }
    if (!std::isfinite(result.best_mean_score))
        throw NumericalError("cross-validation failed on every grid cell");
    return result;
}

inline void write_cv_table_csv(const CvResult& result, std::ostream& os) {
    os << "gamma,kernel_param,fold,score,failed,error\n";
    os << std::setprecision(10);
    for (const auto& row : result.table) {
        std::string err = row.error;
        std::replace(err.begin(), err.end(), ',', ';');
        os << row.cell.gamma << ',' << row.cell.kernel_param << ',' << row.fold << ',' << row.score
           << ',' << (row.failed ? 1 : 0) << ',' << err << '\n';
    }
}

// ---------------------------------------------------------------------------
// Graph and matrix file formats
// ---------------------------------------------------------------------------

// Edge list: one `src dst` pair per line (0-based), `#nodes N` fixes the
// node count. A line `s d` inserts the edge s->d, i.e. sets A[d][s] = 1.
inline DirectedGraph load_edge_list(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open edge list: " + path);
    DirectedGraph g;
    bool node_count_set = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line);
            std::string directive;
            ls >> directive;
            if (directive == "#nodes") {
                long n = 0;
                if (!(ls >> n) || n <= 0)
                    throw DataError("line " + std::to_string(line_no) + ": malformed #nodes directive");
                g.node_count = static_cast<Index>(n);
                node_count_set = true;
            }
            continue;
        }
        std::istringstream ls(line);
        long src = 0, dst = 0;
        if (!(ls >> src >> dst))
            throw DataError("line " + std::to_string(line_no) + ": malformed edge '" + line + "'");
        std::string extra;
        if (ls >> extra)
            throw DataError("line " + std::to_string(line_no) + ": trailing content '" + extra + "'");
        if (src < 0 || dst < 0)
            throw DataError("line " + std::to_string(line_no) + ": negative node id");
        g.edges.emplace_back(static_cast<Index>(src), static_cast<Index>(dst));
    }
    if (!node_count_set) {
        Index max_id = -1;
        for (const auto& [s, d] : g.edges) max_id = std::max({max_id, s, d});
        g.node_count = max_id + 1;
    }
    for (const auto& [s, d] : g.edges)
        if (s >= g.node_count || d >= g.node_count)
            throw DataError("edge (" + std::to_string(s) + "," + std::to_string(d) +
                            ") exceeds declared node count " + std::to_string(g.node_count));
    return g;
}

// Dense matrix CSV: header row holds column ids (first cell ignored), each
// body row starts with its row id. Row id = first kernel argument.
inline PrecomputedTable load_matrix_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open matrix file: " + path);
    std::string line;
    if (!std::getline(is, line)) throw DataError(path + ": empty matrix file");
    detail::strip_cr(line);
    const auto header = detail::split_csv_line(line);
    if (header.size() < 2) throw DataError(path + ": matrix header needs at least one column id");
    std::vector<std::int64_t> col_ids;
    for (std::size_t i = 1; i < header.size(); ++i)
        col_ids.push_back(detail::parse_long(header[i], 1, "column id"));

    std::vector<std::int64_t> row_ids;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        row_ids.push_back(detail::parse_long(fields[0], line_no, "row id"));
        std::vector<double> vals;
        for (std::size_t i = 1; i < fields.size(); ++i)
            vals.push_back(detail::parse_double(fields[i], line_no, "matrix entry"));
        rows.push_back(std::move(vals));
    }
    if (rows.size() != col_ids.size() || row_ids != col_ids)
        throw DataError(path + ": matrix must be square with matching row/column ids in order");
    Matrix values(static_cast<Index>(rows.size()), static_cast<Index>(col_ids.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return PrecomputedTable::from_matrix(std::move(values), std::move(row_ids));
}

inline void save_matrix_csv(const Matrix& values, const std::vector<std::int64_t>& ids,
                            const std::string& path) {
    if (values.rows() != values.cols() || values.rows() != static_cast<Index>(ids.size()))
        throw DimensionError("save_matrix_csv: matrix must be square with one id per row");
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << "id";
    for (auto id : ids) os << ',' << id;
    os << '\n';
    for (Index i = 0; i < values.rows(); ++i) {
        os << ids[static_cast<std::size_t>(i)];
        for (Index j = 0; j < values.cols(); ++j) os << ',' << values(i, j);
        os << '\n';
    }
}

// Node labels: CSV with header `id,label`.
inline std::vector<std::pair<std::int64_t, int>> load_node_labels(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open node label file: " + path);
    std::string line;
    if (!std::getline(is, line)) throw DataError(path + ": empty node label file");
    detail::strip_cr(line);
    std::vector<std::pair<std::int64_t, int>> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 2)
            throw DataError("line " + std::to_string(line_no) + ": expected 'id,label'");
        out.emplace_back(detail::parse_long(fields[0], line_no, "node id"),
                         static_cast<int>(detail::parse_long(fields[1], line_no, "label")));
    }
    if (out.empty()) throw DataError(path + ": no node labels");
    return out;
}

}  // namespace askls
