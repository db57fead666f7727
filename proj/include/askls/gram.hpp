#pragma once

#include "askls/common.hpp"

#include <cmath>
#include <utility>

namespace askls {

// Rectangular block of kernel evaluations K(rows, cols). Never assumed
// symmetric; row always holds the first kernel argument.
struct GramBlock {
    Matrix values;  // m_r x m_c
    std::vector<std::int64_t> row_ids;
    std::vector<std::int64_t> col_ids;

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }

    bool is_square() const { return values.rows() == values.cols(); }

    bool is_symmetric(double tol) const {
        if (!is_square()) return false;
        return (values - values.transpose()).cwiseAbs().maxCoeff() <= tol;
    }

    void validate_finite() const {
        if (!values.allFinite()) throw DataError("GramBlock contains non-finite entries");
    }
};

inline GramBlock make_gram(Matrix values, std::vector<std::int64_t> row_ids,
                           std::vector<std::int64_t> col_ids) {
    if (values.rows() != static_cast<Index>(row_ids.size()) ||
        values.cols() != static_cast<Index>(col_ids.size()))
        throw DimensionError("gram block ids do not match matrix shape");
    GramBlock g{std::move(values), std::move(row_ids), std::move(col_ids)};
    g.validate_finite();
    return g;
}

enum class SymmetrizeMode { Average, GramProduct };

// Average: (K + K^T)/2.  GramProduct: K^T K (PSD by construction).
inline GramBlock symmetrize(const GramBlock& k, SymmetrizeMode mode) {
    if (!k.is_square()) throw DimensionError("symmetrize requires a square gram block");
    GramBlock out;
    switch (mode) {
        case SymmetrizeMode::Average:
            out.values = 0.5 * (k.values + k.values.transpose());
            out.row_ids = k.row_ids;
            break;
        case SymmetrizeMode::GramProduct:
            out.values = k.values.transpose() * k.values;
            // products round asymmetrically; enforce exact symmetry
            out.values = 0.5 * (out.values + out.values.transpose()).eval();
            out.row_ids = k.col_ids;
            break;
    }
    out.col_ids = out.row_ids;
    return out;
}

}  // namespace askls
