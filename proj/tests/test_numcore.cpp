#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "whcn/adam.hpp"
#include "whcn/eig.hpp"
#include "whcn/errors.hpp"
#include "whcn/finite_diff.hpp"
#include "whcn/matrix.hpp"
#include "whcn/rng.hpp"

using namespace whcn;

namespace {

Matrix random_symmetric(std::size_t n, Rng& rng) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double v = rng.uniform(-1.0, 1.0);
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

}  // namespace

TEST_CASE("matmul agrees with hand computation and checks shapes") {
    Matrix a(2, 3);
    Matrix b(3, 2);
    double av[] = {1, 2, 3, 4, 5, 6};
    double bv[] = {7, 8, 9, 10, 11, 12};
    a.data().assign(av, av + 6);
    b.data().assign(bv, bv + 6);
    Matrix c = matmul(a, b);
    CHECK(c(0, 0) == 58.0);
    CHECK(c(0, 1) == 64.0);
    CHECK(c(1, 0) == 139.0);
    CHECK(c(1, 1) == 154.0);
    CHECK_THROWS_AS(matmul(a, a), ShapeMismatch);
}

TEST_CASE("matmul serial and parallel are bitwise identical") {
    Rng rng(11);
    Matrix a(37, 53), b(53, 29);
    for (auto& v : a.data()) v = rng.uniform(-2.0, 2.0);
    for (auto& v : b.data()) v = rng.uniform(-2.0, 2.0);
    Matrix cs = matmul(a, b, Exec::Serial);
    Matrix cp = matmul(a, b, Exec::Parallel);
    CHECK(cs == cp);
}

TEST_CASE("sym_eig identity has unit eigenvalues") {
    EigResult r = sym_eig(Matrix::identity(2));
    REQUIRE(r.values.size() == 2);
    CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.values[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sym_eig analytic 2x2") {
    Matrix m(2, 2);
    m(0, 0) = 2;
    m(0, 1) = 1;
    m(1, 0) = 1;
    m(1, 1) = 2;
    EigResult r = sym_eig(m);
    CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.values[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("sym_eig reconstructs a random symmetric 5x5") {
    Rng rng(17);
    Matrix m = random_symmetric(5, rng);
    EigResult r = sym_eig(m);

    // m V == V diag(lambda), entrywise
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t k = 0; k < 5; ++k) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < 5; ++j) lhs += m(i, j) * r.vectors(j, k);
            double rhs = r.values[k] * r.vectors(i, k);
            CHECK(std::abs(lhs - rhs) <= 1e-9);
        }
    }
    // V^T V == I
    Matrix vtv = matmul(r.vectors.transposed(), r.vectors);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(std::abs(vtv(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-9);
}

TEST_CASE("sym_eig eigenvalues ascend and sum to trace") {
    Rng rng(23);
    for (int it = 0; it < 10; ++it) {
        Matrix m = random_symmetric(6, rng);
        EigResult r = sym_eig(m);
        double sum = 0.0, trace = 0.0;
        for (std::size_t k = 0; k < 6; ++k) {
            sum += r.values[k];
            trace += m(k, k);
            if (k > 0) CHECK(r.values[k] >= r.values[k - 1]);
        }
        CHECK(std::abs(sum - trace) <= 1e-8);
    }
}

TEST_CASE("sym_eig rejects bad inputs") {
    Matrix rect(2, 3);
    CHECK_THROWS_AS(sym_eig(rect), NotSquare);
    Matrix asym(2, 2);
    asym(0, 1) = 1.0;
    asym(1, 0) = 0.5;
    CHECK_THROWS_AS(sym_eig(asym), NotSymmetric);
}

TEST_CASE("adam zero gradient leaves params and moments untouched") {
    Matrix p(2, 2, 1.5);
    Matrix g(2, 2, 0.0);
    AdamState st(2, 2);
    adam_step(p, g, st);
    CHECK(st.step_count == 1);
    for (double v : p.data()) CHECK(v == 1.5);
    for (double v : st.first_moment.data()) CHECK(v == 0.0);
    for (double v : st.second_moment.data()) CHECK(v == 0.0);
}

TEST_CASE("adam first step moves by -lr * sign(g)") {
    Matrix p(1, 3);
    Matrix g(1, 3);
    g(0, 0) = 0.5;
    g(0, 1) = -0.002;
    g(0, 2) = 1e-3;
    AdamState st(1, 3, 0.003);
    adam_step(p, g, st);
    CHECK(std::abs(p(0, 0) - (-0.003)) <= 1e-6);
    CHECK(std::abs(p(0, 1) - 0.003) <= 1e-6);
    CHECK(std::abs(p(0, 2) - (-0.003)) <= 1e-6);
}

TEST_CASE("adam matches an independent scalar trace over 10 steps") {
    // Scalar reference computed with straight-line arithmetic, no shared code.
    const double lr = 0.003, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    double ref_p = 0.7, ref_m = 0.0, ref_v = 0.0;

    Matrix p(1, 1);
    p(0, 0) = 0.7;
    AdamState st(1, 1, lr);

    for (int t = 1; t <= 10; ++t) {
        const double grad = 0.3 * ref_p + 0.1;  // same input fed to both
        ref_m = b1 * ref_m + (1 - b1) * grad;
        ref_v = b2 * ref_v + (1 - b2) * grad * grad;
        const double mh = ref_m / (1 - std::pow(b1, t));
        const double vh = ref_v / (1 - std::pow(b2, t));
        ref_p -= lr * mh / (std::sqrt(vh) + eps);

        Matrix g(1, 1);
        g(0, 0) = grad;
        adam_step(p, g, st);
        // keep both trajectories fed by the reference path
        CHECK(std::abs(p(0, 0) - ref_p) <= 1e-10);
        p(0, 0) = ref_p;
    }
}

TEST_CASE("adam is deterministic") {
    auto run = [] {
        Rng rng(5);
        Matrix p(3, 3), g(3, 3);
        for (auto& v : p.data()) v = rng.uniform(-1, 1);
        for (auto& v : g.data()) v = rng.uniform(-1, 1);
        AdamState st(3, 3);
        for (int i = 0; i < 7; ++i) adam_step(p, g, st);
        return p;
    };
    CHECK(run() == run());
}

TEST_CASE("adam rejects shape mismatch") {
    Matrix p(2, 2), g(2, 3);
    AdamState st(2, 2);
    CHECK_THROWS_AS(adam_step(p, g, st), ShapeMismatch);
}

TEST_CASE("finite_diff_grad on analytic functions") {
    Matrix x(1, 1);
    x(0, 0) = 3.0;
    auto square = [](const Matrix& m) { return m(0, 0) * m(0, 0); };
    Matrix gx = finite_diff_grad(square, x, 1e-5);
    CHECK(std::abs(gx(0, 0) - 6.0) <= 1e-6);

    Rng rng(31);
    Matrix y(2, 3);
    for (auto& v : y.data()) v = rng.uniform(-1.0, 1.0);
    auto sum_sin = [](const Matrix& m) {
        double s = 0.0;
        for (double v : m.data()) s += std::sin(v);
        return s;
    };
    Matrix gy = finite_diff_grad(sum_sin, y, 1e-5);
    for (std::size_t k = 0; k < y.size(); ++k)
        CHECK(std::abs(gy.data()[k] - std::cos(y.data()[k])) <= 1e-6);
}

TEST_CASE("finite_diff_grad of quadratic form matches (A + A^T) x") {
    Rng rng(37);
    const std::size_t n = 4;
    Matrix a(n, n);
    for (auto& v : a.data()) v = rng.uniform(-1.0, 1.0);
    Matrix x(n, 1);
    for (auto& v : x.data()) v = rng.uniform(-1.0, 1.0);

    auto quad = [&](const Matrix& xx) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) s += xx(i, 0) * a(i, j) * xx(j, 0);
        return s;
    };
    Matrix g = finite_diff_grad(quad, x, 1e-6);
    for (std::size_t i = 0; i < n; ++i) {
        double expect = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            expect += (a(i, j) + a(j, i)) * x(j, 0);
        CHECK(std::abs(g(i, 0) - expect) <= 1e-5);
    }
}

TEST_CASE("finite_diff_grad flags non-finite probes") {
    Matrix x(1, 1);
    x(0, 0) = 0.0;
    auto bad = [](const Matrix& m) { return std::log(m(0, 0)); };
    CHECK_THROWS_AS(finite_diff_grad(bad, x, 1e-3), NonFiniteEvaluation);
}
