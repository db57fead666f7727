#pragma once

// Test-side oracles, deliberately independent of the library's
// implementation paths: plain-loop assembly, a from-scratch Gaussian
// elimination, Simpson quadrature for KL integrals, and map-based
// confusion counting.

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

// Gaussian elimination with partial pivoting, back substitution.
inline Vec gauss_solve(Mat a, Vec b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0) throw std::runtime_error("oracle: singular matrix");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    Vec x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri][c] * x[c];
        x[ri] = s / a[ri][ri];
    }
    return x;
}

// From-scratch assembly of the (2m+2) dual system, unknowns (b1,b2,alpha,beta).
inline std::pair<Mat, Vec> assemble_askls(const Mat& k, const Vec& y, double gamma) {
    const std::size_t m = y.size();
    const std::size_t n = 2 * m + 2;
    Mat a(n, Vec(n, 0.0));
    Vec rhs(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        a[0][2 + i] = y[i];
        a[1][2 + m + i] = y[i];
        a[2 + i][0] = y[i];
        a[2 + m + i][1] = y[i];
        a[2 + i][2 + i] += 1.0 / gamma;
        a[2 + m + i][2 + m + i] += 1.0 / gamma;
        for (std::size_t j = 0; j < m; ++j) {
            a[2 + i][2 + m + j] = y[i] * k[i][j] * y[j];      // H
            a[2 + m + i][2 + j] = y[j] * k[j][i] * y[i];      // H^T
        }
        rhs[2 + i] = 1.0;
        rhs[2 + m + i] = 1.0;
    }
    return {std::move(a), std::move(rhs)};
}

inline Vec solve_askls(const Mat& k, const Vec& y, double gamma) {
    auto [a, rhs] = assemble_askls(k, y, gamma);
    return gauss_solve(std::move(a), std::move(rhs));
}

// Simpson quadrature of the KL integrand between two univariate Gaussians.
inline double kl_gaussian_quadrature(double mu0, double var0, double mu1, double var1) {
    const double s0 = std::sqrt(var0), s1 = std::sqrt(var1);
    const double lo = std::min(mu0, mu1) - 14.0 * std::max(s0, s1);
    const double hi = std::max(mu0, mu1) + 14.0 * std::max(s0, s1);
    const int n = 20000;  // even
    const double h = (hi - lo) / n;
    auto integrand = [&](double x) {
        const double lp = -0.5 * (x - mu0) * (x - mu0) / var0 - 0.5 * std::log(2.0 * M_PI * var0);
        const double lq = -0.5 * (x - mu1) * (x - mu1) / var1 - 0.5 * std::log(2.0 * M_PI * var1);
        return std::exp(lp) * (lp - lq);
    };
    double sum = integrand(lo) + integrand(hi);
    for (int i = 1; i < n; ++i) sum += integrand(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Pooled and per-class F1 from a plain confusion map.
struct F1Oracle {
    double micro = 0.0;
    double macro = 0.0;
};

inline F1Oracle f1_from_confusion(const std::vector<int>& pred, const std::vector<int>& truth,
                                  const std::vector<int>& classes) {
    std::map<int, long> tp, fp, fn;
    for (int c : classes) tp[c] = fp[c] = fn[c] = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        for (int c : classes) {
            const bool p = pred[i] == c, t = truth[i] == c;
            if (p && t) ++tp[c];
            if (p && !t) ++fp[c];
            if (!p && t) ++fn[c];
        }
    }
    long tps = 0, fps = 0, fns = 0;
    double macro_sum = 0.0;
    for (int c : classes) {
        tps += tp[c];
        fps += fp[c];
        fns += fn[c];
        const double denom = double(2 * tp[c] + fp[c] + fn[c]);
        macro_sum += denom == 0.0 ? 0.0 : 2.0 * double(tp[c]) / denom;
    }
    F1Oracle out;
    const double denom = double(2 * tps + fps + fns);
    out.micro = denom == 0.0 ? 0.0 : 2.0 * double(tps) / denom;
    out.macro = classes.empty() ? 0.0 : macro_sum / double(classes.size());
    return out;
}

}  // namespace oracle
