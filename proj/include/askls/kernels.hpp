#pragma once

#include "askls/common.hpp"
#include "askls/gram.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace askls {

// ---------------------------------------------------------------------------
// Directed graphs and the adjacency kernel
// ---------------------------------------------------------------------------

// A_ij = 1 exactly when the edge j -> i is present (column = source node).
struct DirectedGraph {
    Index node_count = 0;
    std::vector<std::pair<Index, Index>> edges;  // (src, dst)

    Matrix adjacency() const {
        Matrix a = Matrix::Zero(node_count, node_count);
        for (const auto& [src, dst] : edges) {
            if (src < 0 || src >= node_count || dst < 0 || dst >= node_count)
                throw DataError("edge endpoint out of range");
            a(dst, src) = 1.0;
        }
        return a;
    }
};

enum class AdjacencyPreprocess { InDegreeRowNormalize, None };

// Row i is divided by max(d_i, 1) with d_i the in-degree of node i, so rows
// sum to 1 for nodes with incoming edges and stay 0 otherwise.
inline GramBlock adjacency_kernel(const DirectedGraph& g, AdjacencyPreprocess preprocess) {
    Matrix k = g.adjacency();
    if (preprocess == AdjacencyPreprocess::InDegreeRowNormalize) {
        for (Index i = 0; i < k.rows(); ++i) {
            const double d = k.row(i).sum();
            if (d > 0.0) k.row(i) /= d;
        }
    }
    std::vector<std::int64_t> ids(static_cast<std::size_t>(g.node_count));
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::int64_t>(i);
    return make_gram(std::move(k), ids, ids);
}

// ---------------------------------------------------------------------------
// Scalar kernel evaluations
// ---------------------------------------------------------------------------

inline double eval_rbf(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v,
                       double sigma) {
    if (u.size() != v.size()) throw DimensionError("eval_rbf: dimension mismatch");
    if (!(sigma > 0.0)) throw DataError("eval_rbf: sigma must be positive");
    return std::exp(-(u - v).squaredNorm() / (sigma * sigma));
}

// SNE row: entry j = exp(-|x-y_j|^2/sigma^2) / sum_{z in reference} exp(-|x-z|^2/sigma^2).
// The denominator runs over the frozen reference (training) set, also at
// prediction time. Row-stochastic when targets == reference set.
inline Vector eval_sne_row(const Eigen::Ref<const Vector>& x, const Matrix& targets,
                           const Matrix& reference_set, double sigma) {
    if (!(sigma > 0.0)) throw DataError("eval_sne_row: sigma must be positive");
    if (reference_set.rows() == 0) throw DataError("eval_sne_row: empty reference set");
    if (targets.cols() != x.size() || reference_set.cols() != x.size())
        throw DimensionError("eval_sne_row: dimension mismatch");
    const double inv_s2 = 1.0 / (sigma * sigma);
    double denom = 0.0;
    for (Index z = 0; z < reference_set.rows(); ++z)
        denom += std::exp(-(reference_set.row(z).transpose() - x).squaredNorm() * inv_s2);
    if (denom == 0.0)
        throw NumericalError("eval_sne_row: denominator underflowed to zero (sigma too small for the data scale)");
    Vector row(targets.rows());
    for (Index j = 0; j < targets.rows(); ++j)
        row[j] = std::exp(-(targets.row(j).transpose() - x).squaredNorm() * inv_s2) / denom;
    return row;
}

// T row: Student-t profile (1+|x-y|^2)^{-1}, normalized over the reference
// set. No bandwidth parameter.
inline Vector eval_t_row(const Eigen::Ref<const Vector>& x, const Matrix& targets,
                         const Matrix& reference_set) {
    if (reference_set.rows() == 0) throw DataError("eval_t_row: empty reference set");
    if (targets.cols() != x.size() || reference_set.cols() != x.size())
        throw DimensionError("eval_t_row: dimension mismatch");
    double denom = 0.0;
    for (Index z = 0; z < reference_set.rows(); ++z)
        denom += 1.0 / (1.0 + (reference_set.row(z).transpose() - x).squaredNorm());
    if (denom == 0.0) throw NumericalError("eval_t_row: denominator underflowed to zero");
    Vector row(targets.rows());
    for (Index j = 0; j < targets.rows(); ++j)
        row[j] = (1.0 / (1.0 + (targets.row(j).transpose() - x).squaredNorm())) / denom;
    return row;
}

// Closed-form KL(N(mu0,var0) || N(mu1,var1)) between univariate Gaussians.
inline double kl_gaussian(double mu0, double var0, double mu1, double var1) {
    if (!(var0 > 0.0) || !(var1 > 0.0)) throw DataError("kl_gaussian: variances must be positive");
    return 0.5 * std::log(var1 / var0) + (var0 + (mu0 - mu1) * (mu0 - mu1)) / (2.0 * var1) - 0.5;
}

// K_ij = exp(-a * D_ij) for a nonnegative divergence matrix D.
inline GramBlock kl_exp_kernel(const Matrix& divergences, double a,
                               std::vector<std::int64_t> row_ids = {},
                               std::vector<std::int64_t> col_ids = {}) {
    if (!(a > 0.0)) throw DataError("kl_exp_kernel: scale a must be positive");
    if (!divergences.allFinite() || (divergences.array() < 0.0).any())
        throw DataError("kl_exp_kernel: divergences must be finite and nonnegative");
    if (row_ids.empty()) {
        row_ids.resize(static_cast<std::size_t>(divergences.rows()));
        for (std::size_t i = 0; i < row_ids.size(); ++i) row_ids[i] = static_cast<std::int64_t>(i);
    }
    if (col_ids.empty()) {
        col_ids.resize(static_cast<std::size_t>(divergences.cols()));
        for (std::size_t i = 0; i < col_ids.size(); ++i) col_ids[i] = static_cast<std::int64_t>(i);
    }
    return make_gram((-a * divergences.array()).exp().matrix(), std::move(row_ids),
                     std::move(col_ids));
}

// ---------------------------------------------------------------------------
// Kernel specs and gram construction
// ---------------------------------------------------------------------------

enum class KernelFamily { Rbf, Sne, T, KlExp, PrecomputedDense, DirectedAdjacency };

inline const char* kernel_family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::Rbf: return "rbf";
        case KernelFamily::Sne: return "sne";
        case KernelFamily::T: return "t";
        case KernelFamily::KlExp: return "klexp";
        case KernelFamily::PrecomputedDense: return "precomputed";
        case KernelFamily::DirectedAdjacency: return "adjacency";
    }
    return "?";
}

inline KernelFamily kernel_family_from_name(const std::string& name) {
    if (name == "rbf") return KernelFamily::Rbf;
    if (name == "sne") return KernelFamily::Sne;
    if (name == "t") return KernelFamily::T;
    if (name == "klexp") return KernelFamily::KlExp;
    if (name == "precomputed") return KernelFamily::PrecomputedDense;
    if (name == "adjacency") return KernelFamily::DirectedAdjacency;
    throw ConfigError("unknown kernel family: " + name);
}

// Dense matrix addressed by sample id; K(i, j) and K(j, i) are distinct
// lookups (row id = first kernel argument).
struct PrecomputedTable {
    Matrix values;
    std::vector<std::int64_t> ids;  // ids[k] labels row k and column k
    std::unordered_map<std::int64_t, Index> index;

    static PrecomputedTable from_matrix(Matrix values, std::vector<std::int64_t> ids) {
        if (values.rows() != values.cols() ||
            values.rows() != static_cast<Index>(ids.size()))
            throw DimensionError("precomputed table must be square with one id per row");
        PrecomputedTable t;
        t.values = std::move(values);
        t.ids = std::move(ids);
        for (std::size_t k = 0; k < t.ids.size(); ++k) {
            if (!t.index.emplace(t.ids[k], static_cast<Index>(k)).second)
                throw DataError("duplicate sample id in precomputed table");
        }
        return t;
    }

    Index position(std::int64_t id) const {
        auto it = index.find(id);
        if (it == index.end())
            throw DataError("sample id " + std::to_string(id) + " not found in precomputed matrix");
        return it->second;
    }
};

// Declarative kernel description plus the runtime bindings each family
// needs: SNE/T carry their frozen reference set, precomputed/adjacency
// carry the dense table.
struct KernelSpec {
    KernelFamily family = KernelFamily::Rbf;
    double sigma = 1.0;  // RBF / SNE length scale
    double a = 1.0;      // KL exponentiation scale
    std::string matrix_source;  // provenance of a precomputed table, if any
    std::shared_ptr<const Matrix> reference_set;      // SNE / T
    std::shared_ptr<const PrecomputedTable> table;    // precomputed / adjacency

    void validate() const {
        switch (family) {
            case KernelFamily::Rbf:
            case KernelFamily::Sne:
                if (!(sigma > 0.0)) throw DataError("kernel spec: sigma must be positive");
                break;
            case KernelFamily::KlExp:
                if (!(a > 0.0)) throw DataError("kernel spec: a must be positive");
                break;
            default:
                break;
        }
    }

    bool needs_reference_set() const {
        return family == KernelFamily::Sne || family == KernelFamily::T;
    }

    bool is_table_backed() const {
        return family == KernelFamily::PrecomputedDense ||
               family == KernelFamily::DirectedAdjacency;
    }

    KernelSpec with_reference(std::shared_ptr<const Matrix> ref) const {
        KernelSpec s = *this;
        s.reference_set = std::move(ref);
        return s;
    }
};

// Evaluates K(rows, cols) for the spec's family. Vector families need
// feature matrices; table-backed families resolve ids against the bound
// table, order-sensitively.
inline GramBlock build_gram(const KernelSpec& spec, const SampleSet& rows, const SampleSet& cols) {
    spec.validate();
    const Index mr = rows.size();
    const Index mc = cols.size();
    Matrix k(mr, mc);

    switch (spec.family) {
        case KernelFamily::Rbf: {
            if (!rows.has_features() || !cols.has_features())
                throw DataError("rbf kernel requires feature vectors");
            for (Index i = 0; i < mr; ++i)
                for (Index j = 0; j < mc; ++j)
                    k(i, j) = eval_rbf(rows.features.row(i), cols.features.row(j), spec.sigma);
            break;
        }
        case KernelFamily::Sne:
        case KernelFamily::T: {
            if (!rows.has_features() || !cols.has_features())
                throw DataError("sne/t kernels require feature vectors");
            if (!spec.reference_set)
                throw DataError("sne/t kernel spec has no bound reference set");
            const Matrix& ref = *spec.reference_set;
            for (Index i = 0; i < mr; ++i) {
                k.row(i) = (spec.family == KernelFamily::Sne)
                               ? eval_sne_row(rows.features.row(i), cols.features, ref, spec.sigma).transpose()
                               : eval_t_row(rows.features.row(i), cols.features, ref).transpose();
            }
            break;
        }
        case KernelFamily::KlExp: {
            // Entries of the bound table are divergences; exponentiate on lookup.
            if (!spec.table) throw DataError("klexp kernel spec has no bound divergence table");
            for (Index i = 0; i < mr; ++i) {
                const Index r = spec.table->position(rows.ids[static_cast<std::size_t>(i)]);
                for (Index j = 0; j < mc; ++j) {
                    const Index c = spec.table->position(cols.ids[static_cast<std::size_t>(j)]);
                    const double d = spec.table->values(r, c);
                    if (!(d >= 0.0) || !std::isfinite(d))
                        throw DataError("klexp: divergence entries must be finite and nonnegative");
                    k(i, j) = std::exp(-spec.a * d);
                }
            }
            break;
        }
        case KernelFamily::PrecomputedDense:
        case KernelFamily::DirectedAdjacency: {
            if (!spec.table) throw DataError("kernel spec has no bound precomputed table");
            for (Index i = 0; i < mr; ++i) {
                const Index r = spec.table->position(rows.ids[static_cast<std::size_t>(i)]);
                for (Index j = 0; j < mc; ++j)
                    k(i, j) = spec.table->values(r, spec.table->position(cols.ids[static_cast<std::size_t>(j)]));
            }
            break;
        }
    }
    return make_gram(std::move(k), rows.ids, cols.ids);
}

// Convenience binding: turn a directed graph into a table-backed spec.
inline KernelSpec adjacency_spec(const DirectedGraph& g, AdjacencyPreprocess preprocess) {
    GramBlock k = adjacency_kernel(g, preprocess);
    KernelSpec spec;
    spec.family = KernelFamily::DirectedAdjacency;
    spec.table = std::make_shared<PrecomputedTable>(
        PrecomputedTable::from_matrix(std::move(k.values), std::move(k.row_ids)));
    return spec;
}

}  // namespace askls
