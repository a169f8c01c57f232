#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "basketminer/error.hpp"
#include "basketminer/lagcorr.hpp"
#include "basketminer/rng.hpp"
#include "oracles.hpp"

using namespace bm;

namespace {

Eigen::MatrixXd random_symmetric(CounterRng& rng, Index n) {
    Eigen::MatrixXd A(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i <= j; ++i) A(i, j) = A(j, i) = rng.normal();
    return A;
}

oracle::Mat to_std(const Eigen::MatrixXd& A) {
    oracle::Mat m(static_cast<std::size_t>(A.rows()), oracle::Vec(static_cast<std::size_t>(A.cols())));
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = A(i, j);
    return m;
}

}  // namespace

TEST_CASE("normalize divides by the T-1 sample sd without demeaning") {
    Eigen::MatrixXd x(1, 4);
    x << 2, -2, 2, -2;
    const auto n = normalize(x);
    const double sd = std::sqrt(16.0 / 3.0);
    CHECK(n.scale_factors(0) == doctest::Approx(sd));
    CHECK(n.scale_factors(0) == doctest::Approx(2.309401).epsilon(1e-6));
    for (Index t = 0; t < 4; ++t) CHECK(n.M(0, t) == doctest::Approx((t % 2 == 0 ? 2.0 : -2.0) / sd));
    CHECK(n.M(0, 0) == doctest::Approx(0.866025).epsilon(1e-6));

    const auto again = normalize(n.M);
    CHECK((again.M - n.M).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(again.scale_factors(0) == doctest::Approx(1.0).epsilon(1e-12));

    CounterRng rng(derive_seed(3, 3));
    Eigen::MatrixXd y(5, 300);
    for (Index i = 0; i < 5; ++i) y.row(i) = (rng.normal_vector(300).array() * (i + 1) + 3.0 * i).matrix().transpose();
    const auto ny = normalize(y);
    for (Index i = 0; i < 5; ++i) {
        const auto row = ny.M.row(i).array();
        const double var = (row - row.mean()).square().sum() / 299.0;
        CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(ny.scale_factors(i) > 0);
    }
}

TEST_CASE("normalize rejects a zero-variance stock and names it") {
    Eigen::MatrixXd x(2, 4);
    x << 1, 2, 3, 4, 0, 0, 0, 0;
    const std::vector<int> names{7, 42};
    try {
        (void)normalize(x, names);
        FAIL("expected degenerate stock");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_stock);
        CHECK(std::string(e.what()).find("42") != std::string::npos);
    }
}

TEST_CASE("lagged_corr hand-computed examples") {
    Eigen::MatrixXd M(2, 3);
    M << 1, 0, -1, 0, 1, 0;
    const auto C = lagged_corr(M, 1);
    Eigen::Matrix2d expect;
    expect << 0, 1.0 / 3.0, -1.0 / 3.0, 0;
    CHECK((C.c_hat - expect).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(C.c_sym.cwiseAbs().maxCoeff() <= 1e-15);

    Eigen::MatrixXd single(1, 4);
    single << 1, -1, 1, -1;
    CHECK(lagged_corr(single, 1).c_hat(0, 0) == doctest::Approx(-0.75));

    CHECK_THROWS_AS((void)lagged_corr(M, 3), Error);
}

TEST_CASE("lagged_corr matches the triple-loop oracle with and without day starts") {
    CounterRng rng(derive_seed(9, 9));
    Eigen::MatrixXd M(4, 37);
    for (Index i = 0; i < 4; ++i) M.row(i) = rng.normal_vector(37).transpose();
    const std::vector<Index> starts{0, 10, 11, 25};
    const std::vector<std::size_t> starts_u{0, 10, 11, 25};
    for (Index k : {1, 2, 3}) {
        const auto plain = lagged_corr(M, k);
        const auto split = lagged_corr(M, k, starts);
        const auto o_plain = oracle::lagged(to_std(M), static_cast<std::size_t>(k));
        const auto o_split = oracle::lagged(to_std(M), static_cast<std::size_t>(k), starts_u);
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 4; ++j) {
                CHECK(plain.c_hat(i, j) == doctest::Approx(o_plain[i][j]).epsilon(1e-12));
                CHECK(split.c_hat(i, j) == doctest::Approx(o_split[i][j]).epsilon(1e-12));
            }
    }
}

TEST_CASE("symmetrisation preserves the quadratic form") {
    CounterRng rng(derive_seed(1, 2));
    Eigen::MatrixXd M(6, 200);
    for (Index i = 0; i < 6; ++i) M.row(i) = rng.normal_vector(200).transpose();
    const auto C = lagged_corr(M, 1);
    CHECK((C.c_sym - C.c_sym.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int r = 0; r < 100; ++r) {
        const Eigen::VectorXd e = rng.normal_vector(6).normalized();
        CHECK(std::abs(e.dot(C.c_hat * e) - e.dot(C.c_sym * e)) <= 1e-12);
    }
}

TEST_CASE("min_eigvec analytic cases") {
    Eigen::Matrix2d A;
    A << 0, -1, -1, 0;
    const auto w = min_eigvec(A);
    CHECK(w.lambda_min == doctest::Approx(-1.0));
    CHECK(w.e(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(w.e(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK_FALSE(w.degenerate);

    const Eigen::Matrix3d D = Eigen::Vector3d(3, 2, 1).asDiagonal();
    const auto wd = min_eigvec(D);
    CHECK(wd.lambda_min == doctest::Approx(1.0));
    CHECK(wd.e(0) == 0.0);
    CHECK(wd.e(1) == 0.0);
    CHECK(wd.e(2) == doctest::Approx(1.0));
    CHECK(wd.spectral_gap == doctest::Approx(1.0));
}

TEST_CASE("min_eigvec flags a degenerate smallest eigenvalue") {
    const auto w = min_eigvec(Eigen::Matrix3d::Identity());
    CHECK(w.degenerate);
    CHECK(w.multiplicity == 3);
    CHECK(w.e.norm() == doctest::Approx(1.0));
}

TEST_CASE("min_eigvec rejects asymmetric input") {
    Eigen::Matrix2d A;
    A << 0, 1, 0, 0;
    try {
        (void)min_eigvec(A);
        FAIL("expected contract violation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::contract_violation);
    }
    CHECK_THROWS_AS((void)min_eigvec(Eigen::Matrix<double, 1, 1>::Ones()), Error);
}

TEST_CASE("min_eigvec agrees with the inertia-bisection oracle on random 5x5") {
    CounterRng rng(derive_seed(2024, 5));
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::MatrixXd A = random_symmetric(rng, 5);
        const auto w = min_eigvec(A);
        const auto o = to_std(A);
        CHECK(w.lambda_min == doctest::Approx(oracle::min_eigenvalue(o)).epsilon(1e-8).scale(1e-8));
        const auto v = oracle::min_eigenvector(o);
        double dot = 0;
        for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * w.e(static_cast<Index>(i));
        CHECK(std::abs(std::abs(dot) - 1.0) <= 1e-8);
    }
}

TEST_CASE("jacobi_eigen agrees with Eigen's self-adjoint solver") {
    CounterRng rng(derive_seed(8, 8));
    for (Index n : {2, 3, 10, 30}) {
        const Eigen::MatrixXd A = random_symmetric(rng, n);
        const auto ours = jacobi_eigen(A);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(A);
        CHECK((ours.values - ref.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-10 * A.norm());
        CHECK((A * ours.vectors - ours.vectors * ours.values.asDiagonal()).norm() <= 1e-10 * A.norm());
        CHECK((ours.vectors.transpose() * ours.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("min_eigvec residual, norm, sign convention and Rayleigh minimality") {
    CounterRng rng(derive_seed(17, 1));
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 2 + trial % 29;
        const Eigen::MatrixXd A = random_symmetric(rng, n);
        const auto w = min_eigvec(A);
        CHECK(std::abs(w.e.norm() - 1.0) <= 1e-12);
        CHECK((A * w.e - w.lambda_min * w.e).norm() <= 1e-8 * A.norm());
        Index peak = 0;
        for (Index i = 1; i < n; ++i)
            if (std::abs(w.e(i)) > std::abs(w.e(peak)) * (1 + 1e-9)) peak = i;
        CHECK(w.e(peak) > 0);
        for (int r = 0; r < 50; ++r) {
            const Eigen::VectorXd u = rng.normal_vector(n).normalized();
            CHECK(u.dot(A * u) >= w.lambda_min - 1e-10);
        }
    }
}

TEST_CASE("min_eigvec is permutation equivariant") {
    CounterRng rng(derive_seed(4, 4));
    const Eigen::MatrixXd A = random_symmetric(rng, 8);
    std::vector<int> idx(8);
    std::iota(idx.begin(), idx.end(), 0);
    std::reverse(idx.begin(), idx.end());
    std::swap(idx[1], idx[5]);
    Eigen::PermutationMatrix<Eigen::Dynamic> P(8);
    for (int i = 0; i < 8; ++i) P.indices()(i) = idx[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd B = P * A * P.transpose();
    const auto wa = min_eigvec(A);
    const auto wb = min_eigvec(B);
    CHECK(wb.lambda_min == doctest::Approx(wa.lambda_min).epsilon(1e-12));
    const Eigen::VectorXd pe = P * wa.e;
    CHECK(std::min((pe - wb.e).norm(), (pe + wb.e).norm()) <= 1e-9);
}

TEST_CASE("basket_series uses raw increments") {
    Eigen::MatrixXd raw(3, 4);
    raw << 1, 2, 3, 4, -1, 5, 2, 0, 7, 7, 1, 2;
    BasketWeights<double> w;
    w.e = Eigen::Vector3d(1, 0, 0);
    CHECK(basket_series(w, raw) == raw.row(0).transpose());

    Eigen::MatrixXd two(2, 2);
    two << 1, 2, -1, -2;
    w.e = Eigen::Vector2d(1, 1) / std::sqrt(2.0);
    CHECK(basket_series(w, two).cwiseAbs().maxCoeff() <= 1e-15);

    w.e = Eigen::Vector3d(0.3, -0.5, 0.81).normalized();
    const Eigen::VectorXd b = basket_series(w, raw);
    BasketWeights<double> neg = w;
    neg.e = -w.e;
    CHECK(basket_series(neg, raw) == -b);
    CHECK(sample_autocorr(basket_series(neg, raw), 1).rho == doctest::Approx(sample_autocorr(b, 1).rho).epsilon(1e-14));

    w.e = Eigen::Vector2d(1, 0);
    CHECK_THROWS_AS((void)basket_series(w, raw), Error);
}
