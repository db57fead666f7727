#pragma once

#include "askls/common.hpp"
#include "askls/gram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace askls {

// Labels are +/-1 with both classes present; with a single class the
// equality constraint sum_i alpha_i y_i = 0 degenerates the dual system.
inline void validate_binary_labels(const Vector& y) {
    if (y.size() < 2) throw DataError("need at least two labeled samples");
    bool pos = false, neg = false;
    for (Index i = 0; i < y.size(); ++i) {
        if (y[i] == 1.0) pos = true;
        else if (y[i] == -1.0) neg = true;
        else throw DataError("labels must be +1 or -1");
    }
    if (!pos || !neg) throw DataError("both classes must be present in the labels");
}

// H_ij = y_i K_ij y_j. Symmetric exactly when K is.
inline Matrix build_h(const GramBlock& k, const Vector& y) {
    if (!k.is_square() || k.rows() != y.size())
        throw DimensionError("build_h: kernel matrix and labels have mismatched sizes");
    return y.asDiagonal() * k.values * y.asDiagonal();
}

struct LinearSystem {
    Matrix lhs;
    Vector rhs;
};

// Block layout of the (2m+2)-dimensional dual system, unknowns ordered
// (b1, b2, alpha, beta):
//
//   [ 0    0    Y^T   0   ] [b1]     [0]
//   [ 0    0    0     Y^T ] [b2]  =  [0]
//   [ Y    0    I/g   H   ] [a ]     [1]
//   [ 0    Y    H^T   I/g ] [b ]     [1]
inline LinearSystem assemble_askls_system(const Matrix& h, const Vector& y, double gamma) {
    if (!(gamma > 0.0)) throw DataError("gamma must be positive");
    if (h.rows() != h.cols() || h.rows() != y.size())
        throw DimensionError("assemble_askls_system: H and labels have mismatched sizes");
    const Index m = y.size();
    const Index n = 2 * m + 2;
    LinearSystem sys;
    sys.lhs = Matrix::Zero(n, n);
    sys.lhs.block(0, 2, 1, m) = y.transpose();
    sys.lhs.block(1, 2 + m, 1, m) = y.transpose();
    sys.lhs.block(2, 0, m, 1) = y;
    sys.lhs.block(2 + m, 1, m, 1) = y;
    sys.lhs.block(2, 2, m, m) = Matrix::Identity(m, m) / gamma;
    sys.lhs.block(2 + m, 2 + m, m, m) = Matrix::Identity(m, m) / gamma;
    sys.lhs.block(2, 2 + m, m, m) = h;
    sys.lhs.block(2 + m, 2, m, m) = h.transpose();
    sys.rhs = Vector::Zero(n);
    sys.rhs.segment(2, 2 * m).setOnes();
    return sys;
}

// LS-SVM dual, unknowns (b, alpha):
//
//   [ 0   Y^T     ] [b]     [0]
//   [ Y   I/g + H ] [a]  =  [1]
inline LinearSystem assemble_lssvm_system(const Matrix& h, const Vector& y, double gamma) {
    if (!(gamma > 0.0)) throw DataError("gamma must be positive");
    if (h.rows() != h.cols() || h.rows() != y.size())
        throw DimensionError("assemble_lssvm_system: H and labels have mismatched sizes");
    const Index m = y.size();
    LinearSystem sys;
    sys.lhs = Matrix::Zero(m + 1, m + 1);
    sys.lhs.block(0, 1, 1, m) = y.transpose();
    sys.lhs.block(1, 0, m, 1) = y;
    sys.lhs.block(1, 1, m, m) = Matrix::Identity(m, m) / gamma + h;
    sys.rhs = Vector::Zero(m + 1);
    sys.rhs.tail(m).setOnes();
    return sys;
}

struct DualSolution {
    double b1 = 0.0;
    double b2 = 0.0;
    Vector alpha;
    Vector beta;
    double residual = 0.0;  // relative max-norm residual of the solved system
    double gamma = 0.0;
};

struct LssvmSolution {
    double bias = 0.0;
    Vector alpha;
    double residual = 0.0;
    double gamma = 0.0;
};

namespace detail {

inline double relative_residual(const LinearSystem& sys, const Vector& x) {
    const double scale = sys.rhs.cwiseAbs().maxCoeff();
    return (sys.lhs * x - sys.rhs).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
}

// Partial-pivot LU on regular systems. Exactly singular but consistent
// systems exist (e.g. K = I with balanced labels and gamma = 1, where the
// two discriminant block rows coincide); a vanishing pivot flags those and
// they are solved by minimum-norm least squares instead, so equivalent
// unknowns come back symmetric rather than at the whim of the elimination
// order. Only a system that also fails the least-squares residual check is
// reported as singular. (lu.rcond() itself returns garbage on exact zero
// pivots, hence the pivot-ratio test.)
inline Vector solve_with_fallback(const LinearSystem& sys, double tol, const char* what) {
    Eigen::PartialPivLU<Matrix> lu(sys.lhs);
    const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double pivot_ratio = pivots.maxCoeff() > 0.0 ? pivots.minCoeff() / pivots.maxCoeff() : 0.0;
    double res = std::numeric_limits<double>::infinity();
    if (pivot_ratio > 1e-13) {
        Vector x = lu.solve(sys.rhs);
        if (x.allFinite()) res = relative_residual(sys, x);
        if (res <= tol) return x;
    }

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sys.lhs);
    Vector x2 = cod.solve(sys.rhs);
    double res2 = x2.allFinite() ? relative_residual(sys, x2) : std::numeric_limits<double>::infinity();
    if (res2 <= tol) return x2;

    throw SingularSystemError(std::string(what) + ": system could not be solved to tolerance (residual " +
                                  std::to_string(std::min(res, res2)) + ", pivot ratio " +
                                  std::to_string(pivot_ratio) + ")",
                              pivot_ratio);
}

}  // namespace detail

inline constexpr double kSolverTolerance = 1e-10;

inline DualSolution solve_askls(const GramBlock& k, const Vector& y, double gamma,
                                double tol = kSolverTolerance) {
    validate_binary_labels(y);
    const LinearSystem sys = assemble_askls_system(build_h(k, y), y, gamma);
    const Vector x = detail::solve_with_fallback(sys, tol, "solve_askls");
    const Index m = y.size();
    DualSolution sol;
    sol.b1 = x[0];
    sol.b2 = x[1];
    sol.alpha = x.segment(2, m);
    sol.beta = x.segment(2 + m, m);
    sol.residual = detail::relative_residual(sys, x);
    sol.gamma = gamma;
    return sol;
}

// Classical LS-SVM dual. The kernel must already be symmetric; callers
// holding an asymmetric kernel symmetrize explicitly first.
inline LssvmSolution solve_lssvm(const GramBlock& k, const Vector& y, double gamma,
                                 double tol = kSolverTolerance, double symmetry_tol = 1e-10) {
    validate_binary_labels(y);
    if (!k.is_symmetric(symmetry_tol))
        throw DataError("solve_lssvm: kernel matrix is not symmetric; symmetrize it explicitly");
    const LinearSystem sys = assemble_lssvm_system(build_h(k, y), y, gamma);
    const Vector x = detail::solve_with_fallback(sys, tol, "solve_lssvm");
    LssvmSolution sol;
    sol.bias = x[0];
    sol.alpha = x.tail(y.size());
    sol.residual = detail::relative_residual(sys, x);
    sol.gamma = gamma;
    return sol;
}

// Stationarity residuals of the primal-dual optimum: for each i,
//   1 - alpha_i/g - y_i b1 - y_i sum_j beta_j  y_j K_ij  = 0
//   1 - beta_i/g  - y_i b2 - y_i sum_j alpha_j y_j K_ji  = 0
// Solver-independent check; returns the max magnitude over both families.
inline double kkt_residual(const GramBlock& k, const Vector& y, const DualSolution& sol) {
    const Vector by = sol.beta.cwiseProduct(y);
    const Vector ay = sol.alpha.cwiseProduct(y);
    const Vector r1 = Vector::Ones(y.size()) - sol.alpha / sol.gamma - y * sol.b1 -
                      y.cwiseProduct(k.values * by);
    const Vector r2 = Vector::Ones(y.size()) - sol.beta / sol.gamma - y * sol.b2 -
                      y.cwiseProduct(k.values.transpose() * ay);
    return std::max(r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff());
}

// Transposing the kernel must exchange the source and target roles:
// solve(K^T) == (b2, b1, beta, alpha) of solve(K).
inline bool transpose_swap_check(const GramBlock& k, const Vector& y, double gamma,
                                 double tol = 1e-8) {
    const DualSolution base = solve_askls(k, y, gamma);
    GramBlock kt{k.values.transpose(), k.col_ids, k.row_ids};
    const DualSolution swapped = solve_askls(kt, y, gamma);
    return std::abs(swapped.b1 - base.b2) <= tol && std::abs(swapped.b2 - base.b1) <= tol &&
           (swapped.alpha - base.beta).cwiseAbs().maxCoeff() <= tol &&
           (swapped.beta - base.alpha).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace askls
