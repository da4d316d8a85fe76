#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "karnet/errors.hpp"
#include "karnet/linalg.hpp"
#include "oracles.hpp"

using karnet::Matrix;
using karnet::PinvConfig;

namespace {

double rel_diff(const Matrix& got, const Matrix& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.rows(); ++i)
        for (std::size_t j = 0; j < got.cols(); ++j) {
            const double d = got(i, j) - want(i, j);
            num += d * d;
            den += want(i, j) * want(i, j);
        }
    return std::sqrt(num) / std::max(1.0, std::sqrt(den));
}

}  // namespace

TEST_CASE("pseudo-inverse of a diagonal matrix inverts nonzero entries only") {
    const Matrix a{{2.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, -4.0}};
    const Matrix p = karnet::pinv(a);
    CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p(1, 1) == doctest::Approx(0.0));
    CHECK(p(2, 2) == doctest::Approx(-0.25).epsilon(1e-12));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) CHECK(std::abs(p(i, j)) < 1e-14);
}

TEST_CASE("pseudo-inverse of a rank-one matrix") {
    // a = u v^T with u = (1,2)^T, v = (3,4)^T; a+ = v u^T / (|u|^2 |v|^2).
    const Matrix a{{3.0, 4.0}, {6.0, 8.0}};
    const Matrix p = karnet::pinv(a);
    const double denom = 5.0 * 25.0;  // |u|^2 = 5, |v|^2 = 25
    CHECK(p(0, 0) == doctest::Approx(3.0 / denom).epsilon(1e-12));
    CHECK(p(0, 1) == doctest::Approx(6.0 / denom).epsilon(1e-12));
    CHECK(p(1, 0) == doctest::Approx(4.0 / denom).epsilon(1e-12));
    CHECK(p(1, 1) == doctest::Approx(8.0 / denom).epsilon(1e-12));
}

TEST_CASE("Penrose conditions hold on random full-rank and deficient matrices") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> dim(1, 12);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = dim(rng), n = dim(rng);
        Matrix a;
        if (trial % 3 == 0 && m > 1 && n > 1) {
            std::uniform_int_distribution<std::size_t> rk(1, std::min(m, n) - 1);
            a = oracles::random_rank_deficient(rng, m, n, rk(rng));
        } else {
            a = oracles::random_matrix(rng, m, n);
        }
        const Matrix x = karnet::pinv(a);
        const Matrix axa = oracles::naive_matmul(oracles::naive_matmul(a, x), a);
        const Matrix xax = oracles::naive_matmul(oracles::naive_matmul(x, a), x);
        const Matrix ax = oracles::naive_matmul(a, x);
        const Matrix xa = oracles::naive_matmul(x, a);
        CHECK(rel_diff(axa, a) < 1e-10);
        CHECK(rel_diff(xax, x) < 1e-10);
        CHECK(rel_diff(oracles::naive_transpose(ax), ax) < 1e-10);
        CHECK(rel_diff(oracles::naive_transpose(xa), xa) < 1e-10);
    }
}

TEST_CASE("solve_min_norm matches a hand-solved overdetermined system") {
    // Fit y = w x to (1,1), (1,3): least squares gives w = 2.
    const Matrix x{{1.0}, {1.0}};
    const Matrix y{{1.0}, {3.0}};
    const Matrix w = karnet::solve_min_norm(x, y);
    REQUIRE(w.rows() == 1);
    REQUIRE(w.cols() == 1);
    CHECK(w(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("solve_min_norm picks the minimum-norm exact solution when underdetermined") {
    // x w = y with x = [1 1], y = 4: solutions w = (2+t, 2-t); min norm at t=0.
    const Matrix x{{1.0, 1.0}};
    const Matrix y{{4.0}};
    const Matrix w = karnet::solve_min_norm(x, y);
    CHECK(w(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("random search never beats solve_min_norm") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> dim(2, 10);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = dim(rng), n = dim(rng), q = 1 + trial % 3;
        const Matrix x = oracles::random_matrix(rng, m, n);
        const Matrix y = oracles::random_matrix(rng, m, q);
        const Matrix w = karnet::solve_min_norm(x, y);
        for (double radius : {1e-3, 0.3}) {
            const auto search = oracles::naive_lstsq(x, y, w, 200, radius, rng);
            CHECK(search.w0_won);
        }
    }
}

TEST_CASE("rcond truncation drops directions below the cutoff") {
    // a = U diag(1, 1e-6) V^T built from explicit rotations.
    const double c1 = std::cos(0.3), s1 = std::sin(0.3);
    const double c2 = std::cos(1.1), s2 = std::sin(1.1);
    const Matrix u{{c1, -s1}, {s1, c1}};
    const Matrix v{{c2, -s2}, {s2, c2}};
    const Matrix sig{{1.0, 0.0}, {0.0, 1e-6}};
    const Matrix a = u * (sig * v.transpose());

    // The default cutoff keeps the 1e-6 direction: entries ~1e6.
    CHECK(karnet::pinv(a).max_abs() > 1e5);

    // rcond = 1e-4 drops it; the result is the pseudo-inverse of the rank-one
    // part u_0 v_0^T, whose largest entry is bounded by 1.
    PinvConfig trunc;
    trunc.rcond = 1e-4;
    const Matrix p = karnet::pinv(a, trunc);
    CHECK(p.max_abs() < 10.0);
    const Matrix rank1{{c1 * c2, c1 * s2}, {s1 * c2, s1 * s2}};  // v_0 u_0^T scaled by 1/sigma_1
    CHECK(rel_diff(p, rank1.transpose()) < 1e-8);
}

TEST_CASE("ridge mode approaches the SVD answer as lambda shrinks") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix x = oracles::random_matrix(rng, 12, 5);
        const Matrix y = oracles::random_matrix(rng, 12, 2);
        const Matrix w_svd = karnet::solve_min_norm(x, y);
        PinvConfig ridge;
        ridge.mode = PinvConfig::Mode::ridge_limit;
        ridge.lambda = 1e-10;
        const Matrix w_ridge = karnet::solve_min_norm(x, y, ridge);
        CHECK(rel_diff(w_ridge, w_svd) < 1e-6);
    }
}

TEST_CASE("ridge mode handles both orientations") {
    std::mt19937_64 rng(6);
    PinvConfig ridge;
    ridge.mode = PinvConfig::Mode::ridge_limit;
    ridge.lambda = 1e-10;
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{3, 9}, {9, 3}}) {
        const Matrix a = oracles::random_matrix(rng, m, n);
        const Matrix p = karnet::pinv(a, ridge);
        const Matrix apa = oracles::naive_matmul(oracles::naive_matmul(a, p), a);
        CHECK(rel_diff(apa, a) < 1e-6);
    }
}

TEST_CASE("rejects degenerate and non-finite input") {
    CHECK_THROWS_AS(karnet::pinv(Matrix()), karnet::DegenerateShape);
    Matrix bad(2, 2, 1.0);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(karnet::pinv(bad), karnet::NonFiniteInput);
    CHECK_THROWS_AS(karnet::solve_min_norm(Matrix(2, 2, 1.0), Matrix(3, 1, 1.0)),
                    karnet::ShapeMismatch);
}

TEST_CASE("config validation") {
    PinvConfig bad;
    bad.rcond = -0.5;
    CHECK_THROWS_AS(bad.validate(), karnet::InvalidArgument);
    PinvConfig bad2;
    bad2.mode = PinvConfig::Mode::ridge_limit;
    bad2.lambda = -1.0;
    CHECK_THROWS_AS(bad2.validate(), karnet::InvalidArgument);
    PinvConfig good;
    CHECK_NOTHROW(good.validate());
    // lambda = 0 is the exact limit and is allowed.
    PinvConfig zero_ridge;
    zero_ridge.mode = PinvConfig::Mode::ridge_limit;
    zero_ridge.lambda = 0.0;
    CHECK_NOTHROW(zero_ridge.validate());
    // Default cutoff scales with the larger dimension.
    CHECK(good.effective_rcond(100, 3) ==
          doctest::Approx(100.0 * std::numeric_limits<double>::epsilon()));
}

TEST_CASE("pinv call counter counts both entry points") {
    karnet::reset_pinv_call_count();
    const Matrix a{{1.0, 2.0}, {3.0, 4.0}};
    (void)karnet::pinv(a);
    CHECK(karnet::pinv_call_count() == 1);
    (void)karnet::solve_min_norm(a, Matrix{{1.0}, {0.0}});
    CHECK(karnet::pinv_call_count() == 2);
    karnet::reset_pinv_call_count();
    CHECK(karnet::pinv_call_count() == 0);
}

TEST_CASE("sse agrees with the loop oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix x = oracles::random_matrix(rng, 6, 4);
        const Matrix w = oracles::random_matrix(rng, 4, 2);
        const Matrix y = oracles::random_matrix(rng, 6, 2);
        CHECK(karnet::sse(x, w, y) ==
              doctest::Approx(oracles::naive_sse(x, w, y)).epsilon(1e-10));
    }
}
