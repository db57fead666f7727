#include "askls/solver.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace askls;

namespace {

GramBlock gram_from(const Matrix& m) {
    std::vector<std::int64_t> ids(static_cast<std::size_t>(m.rows()));
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::int64_t>(i);
    return make_gram(m, ids, ids);
}

Matrix random_matrix(Index n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = 2.0 * rng.unit() - 1.0;
    return m;
}

Vector random_labels(Index n, std::uint64_t seed) {
    Rng rng(seed);
    Vector y(n);
    while (true) {
        for (Index i = 0; i < n; ++i) y[i] = rng.below(2) == 0 ? -1.0 : 1.0;
        if (y.minCoeff() < 0 && y.maxCoeff() > 0) return y;
    }
}

oracle::Mat to_oracle(const Matrix& m) {
    oracle::Mat out(static_cast<std::size_t>(m.rows()),
                    oracle::Vec(static_cast<std::size_t>(m.cols())));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    return out;
}

}  // namespace

TEST_CASE("build_h conjugates the kernel with labels") {
    Matrix k(2, 2);
    k << 1, 2, 3, 4;
    Vector y(2);
    y << 1, -1;
    const Matrix h = build_h(gram_from(k), y);
    CHECK(h(0, 0) == 1.0);
    CHECK(h(0, 1) == -2.0);
    CHECK(h(1, 0) == -3.0);
    CHECK(h(1, 1) == 4.0);

    Vector ones = Vector::Ones(2);
    CHECK(build_h(gram_from(k), ones) == k);

    const Matrix r = random_matrix(4, 3);
    const Vector yr = random_labels(4, 9);
    const Matrix hr = build_h(gram_from(r), yr);
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) CHECK(hr(i, j) == yr[i] * r(i, j) * yr[j]);
}

TEST_CASE("assemble_askls_system lays out the printed blocks") {
    Vector y(2);
    y << 1, -1;
    Matrix h(2, 2);
    h << 5, 6, 7, 8;
    const double gamma = 2.0;
    const LinearSystem sys = assemble_askls_system(h, y, gamma);
    REQUIRE(sys.lhs.rows() == 6);
    REQUIRE(sys.lhs.cols() == 6);

    // row 0: [0 0 Y^T 0], row 1: [0 0 0 Y^T]
    CHECK(sys.lhs.row(0).isApprox((Vector(6) << 0, 0, 1, -1, 0, 0).finished().transpose()));
    CHECK(sys.lhs.row(1).isApprox((Vector(6) << 0, 0, 0, 0, 1, -1).finished().transpose()));
    // alpha block rows: [Y 0 I/g H]
    CHECK(sys.lhs.row(2).isApprox((Vector(6) << 1, 0, 0.5, 0, 5, 6).finished().transpose()));
    CHECK(sys.lhs.row(3).isApprox((Vector(6) << -1, 0, 0, 0.5, 7, 8).finished().transpose()));
    // beta block rows: [0 Y H^T I/g]
    CHECK(sys.lhs.row(4).isApprox((Vector(6) << 0, 1, 5, 7, 0.5, 0).finished().transpose()));
    CHECK(sys.lhs.row(5).isApprox((Vector(6) << 0, -1, 6, 8, 0, 0.5).finished().transpose()));
    CHECK(sys.rhs.isApprox((Vector(6) << 0, 0, 1, 1, 1, 1).finished()));

    // H = 0 leaves block-diagonal I/g plus the label borders
    const LinearSystem zero = assemble_askls_system(Matrix::Zero(2, 2), y, 1.0);
    CHECK(zero.lhs.block(2, 2, 2, 2).isApprox(Matrix::Identity(2, 2)));
    CHECK(zero.lhs.block(4, 4, 2, 2).isApprox(Matrix::Identity(2, 2)));
    CHECK(zero.lhs.block(2, 4, 2, 2).isZero(0.0));
}

TEST_CASE("assemble_askls_system matches an independent assembly") {
    const Matrix k = random_matrix(5, 31);
    const Vector y = random_labels(5, 32);
    const double gamma = 0.7;
    const LinearSystem sys = assemble_askls_system(build_h(gram_from(k), y), y, gamma);

    oracle::Vec yv(static_cast<std::size_t>(y.size()));
    for (Index i = 0; i < y.size(); ++i) yv[static_cast<std::size_t>(i)] = y[i];
    const auto [a, rhs] = oracle::assemble_askls(to_oracle(k), yv, gamma);
    for (Index i = 0; i < sys.lhs.rows(); ++i) {
        CHECK(sys.rhs[i] == rhs[static_cast<std::size_t>(i)]);
        for (Index j = 0; j < sys.lhs.cols(); ++j)
            CHECK(sys.lhs(i, j) == a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
}

TEST_CASE("identity-kernel fixture solves to the symmetric solution") {
    // The 6x6 system here is exactly singular (rank 5) but consistent; the
    // solver's minimum-norm fallback must return the symmetric solution.
    const GramBlock k = gram_from(Matrix::Identity(2, 2));
    Vector y(2);
    y << 1, -1;
    const DualSolution sol = solve_askls(k, y, 1.0);
    CHECK_THAT(sol.b1, Catch::Matchers::WithinAbs(0.0, 1e-10));
    CHECK_THAT(sol.b2, Catch::Matchers::WithinAbs(0.0, 1e-10));
    for (Index i = 0; i < 2; ++i) {
        CHECK_THAT(sol.alpha[i], Catch::Matchers::WithinAbs(0.5, 1e-10));
        CHECK_THAT(sol.beta[i], Catch::Matchers::WithinAbs(0.5, 1e-10));
    }
    CHECK(sol.residual <= 1e-10);
}

TEST_CASE("asymmetric 2x2 fixture matches the elimination oracle") {
    Matrix km(2, 2);
    km << 1, 0, 0.5, 1;
    Vector y(2);
    y << 1, -1;
    const DualSolution sol = solve_askls(gram_from(km), y, 1.0);

    const oracle::Vec x = oracle::solve_askls(to_oracle(km), {1.0, -1.0}, 1.0);
    CHECK_THAT(sol.b1, Catch::Matchers::WithinAbs(x[0], 1e-10));
    CHECK_THAT(sol.b2, Catch::Matchers::WithinAbs(x[1], 1e-10));
    CHECK_THAT(sol.alpha[0], Catch::Matchers::WithinAbs(x[2], 1e-10));
    CHECK_THAT(sol.alpha[1], Catch::Matchers::WithinAbs(x[3], 1e-10));
    CHECK_THAT(sol.beta[0], Catch::Matchers::WithinAbs(x[4], 1e-10));
    CHECK_THAT(sol.beta[1], Catch::Matchers::WithinAbs(x[5], 1e-10));
    // asymmetry shows up in the biases; with two balanced samples the
    // constraint rows pin alpha = beta, so b1 = -b2 = -1/7 carries it
    CHECK_THAT(sol.b1, Catch::Matchers::WithinAbs(-1.0 / 7.0, 1e-10));
    CHECK_THAT(sol.b2, Catch::Matchers::WithinAbs(1.0 / 7.0, 1e-10));
    CHECK((sol.alpha - sol.beta).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("asymmetric kernels decouple alpha from beta once m > 2") {
    Matrix km(3, 3);
    km << 1, 0, 0, 0.5, 1, 0, 0.2, 0.7, 1;
    Vector y(3);
    y << 1, 1, -1;
    const DualSolution sol = solve_askls(gram_from(km), y, 1.0);
    CHECK((sol.alpha - sol.beta).cwiseAbs().maxCoeff() > 1.0);

    const oracle::Vec x = oracle::solve_askls(to_oracle(km), {1.0, 1.0, -1.0}, 1.0);
    for (Index i = 0; i < 3; ++i) {
        CHECK_THAT(sol.alpha[i], Catch::Matchers::WithinAbs(x[static_cast<std::size_t>(2 + i)], 1e-9));
        CHECK_THAT(sol.beta[i], Catch::Matchers::WithinAbs(x[static_cast<std::size_t>(5 + i)], 1e-9));
    }
}

TEST_CASE("constraint rows and kkt identities hold on random solves") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Index m = 2 + static_cast<Index>(seed % 5);
        const Matrix k = random_matrix(m, 100 + seed);
        const Vector y = random_labels(m, 200 + seed);
        const double gamma = (seed % 3 == 0) ? 0.1 : (seed % 3 == 1 ? 1.0 : 10.0);
        const GramBlock g = gram_from(k);
        const DualSolution sol = solve_askls(g, y, gamma);
        CHECK(std::fabs(sol.alpha.dot(y)) <= 1e-10);
        CHECK(std::fabs(sol.beta.dot(y)) <= 1e-10);
        CHECK(kkt_residual(g, y, sol) <= 1e-8);
        CHECK(sol.residual <= 1e-10);
    }
}

TEST_CASE("symmetric kernels reduce to the classical ls-svm") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Index m = 3 + static_cast<Index>(seed % 4);
        Matrix k = random_matrix(m, 300 + seed);
        k = 0.5 * (k + k.transpose()).eval();
        const Vector y = random_labels(m, 400 + seed);
        const GramBlock g = gram_from(k);
        const DualSolution sol = solve_askls(g, y, 2.0);
        CHECK(std::fabs(sol.b1 - sol.b2) <= 1e-8);
        CHECK((sol.alpha - sol.beta).cwiseAbs().maxCoeff() <= 1e-8);

        const LssvmSolution ls = solve_lssvm(g, y, 2.0);
        CHECK(std::fabs(ls.bias - sol.b1) <= 1e-8);
        CHECK((ls.alpha - sol.alpha).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("solve_lssvm basics") {
    const GramBlock k = gram_from(Matrix::Identity(2, 2));
    Vector y(2);
    y << 1, -1;
    const LssvmSolution sol = solve_lssvm(k, y, 1.0);
    CHECK_THAT(sol.bias, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(sol.alpha[0], Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(sol.alpha[1], Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK(std::fabs(sol.alpha.dot(y)) <= 1e-12);

    Matrix asym(2, 2);
    asym << 1, 0.3, 0.1, 1;
    CHECK_THROWS_AS(solve_lssvm(gram_from(asym), y, 1.0), DataError);
}

TEST_CASE("label validation rejects degenerate inputs") {
    const GramBlock k = gram_from(Matrix::Identity(3, 3));
    Vector same = Vector::Ones(3);
    CHECK_THROWS_AS(solve_askls(k, same, 1.0), DataError);
    Vector bad(3);
    bad << 1, -1, 0.5;
    CHECK_THROWS_AS(solve_askls(k, bad, 1.0), DataError);
    Vector one(1);
    one << 1;
    CHECK_THROWS_AS(validate_binary_labels(one), DataError);
    Vector mism = random_labels(4, 1);
    CHECK_THROWS_AS(solve_askls(k, mism, 1.0), DimensionError);
}

TEST_CASE("inconsistent singular systems raise SingularSystemError") {
    // K = -I, gamma = 1: the alpha/beta rows demand b1+b2 = 2 y_i for both
    // labels at once, so the system has no solution at all.
    const GramBlock k = gram_from(-Matrix::Identity(2, 2));
    Vector y(2);
    y << 1, -1;
    CHECK_THROWS_AS(solve_askls(k, y, 1.0), SingularSystemError);
    CHECK_THROWS_AS(solve_lssvm(k, y, 1.0), SingularSystemError);
}

TEST_CASE("transpose swap duality") {
    Vector y(2);
    y << 1, -1;
    Matrix sym(2, 2);
    sym << 1, 0.2, 0.2, 1;
    CHECK(transpose_swap_check(gram_from(sym), y, 1.0));

    Matrix km(2, 2);
    km << 1, 0, 0.5, 1;
    CHECK(transpose_swap_check(gram_from(km), y, 1.0));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix k = random_matrix(5, 500 + seed);
        const Vector yr = random_labels(5, 600 + seed);
        CHECK(transpose_swap_check(gram_from(k), yr, 1.5));
    }
}

TEST_CASE("solves are deterministic") {
    const Matrix k = random_matrix(6, 77);
    const Vector y = random_labels(6, 78);
    const DualSolution a = solve_askls(gram_from(k), y, 3.0);
    const DualSolution b = solve_askls(gram_from(k), y, 3.0);
    CHECK(a.b1 == b.b1);
    CHECK(a.b2 == b.b2);
    CHECK(a.alpha == b.alpha);
    CHECK(a.beta == b.beta);
}
