#include "pla/mlauth/binary_svm.hpp"
#include "pla/mlauth/ocsvm.hpp"
#include "qp_oracle.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

using namespace pla;
using pla::testing::BoxQp;

namespace {

FeatureMatrix cloud(std::size_t n, std::size_t dim, Rng& rng, double scale = 1.0)
{
    FeatureMatrix m(dim);
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : row) v = scale * rng.normal();
        m.push_back(row);
    }
    return m;
}

BoxQp one_class_qp(const GramMatrix& k, double nu)
{
    const std::size_t m = k.size();
    BoxQp p{m, std::vector<double>(m * m), std::vector<double>(m, 0.0), std::vector<double>(m, 1.0), 1.0,
            1.0 / (nu * double(m))};
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) p.q[i * m + j] = k(i, j);
    return p;
}

BoxQp binary_qp(const GramMatrix& k, const std::vector<int>& y, double c)
{
    const std::size_t m = k.size();
    BoxQp p{m, std::vector<double>(m * m), std::vector<double>(m, -1.0), {}, 0.0, c};
    for (std::size_t i = 0; i < m; ++i) {
        p.a.push_back(double(y[i]));
        for (std::size_t j = 0; j < m; ++j) p.q[i * m + j] = y[i] * y[j] * k(i, j);
    }
    return p;
}

LabeledSet two_blobs(std::size_t n, double gap, Rng& rng)
{
    LabeledSet s{FeatureMatrix(2), {}};
    for (std::size_t i = 0; i < n; ++i) {
        const bool pos = i % 2 == 0;
        const std::vector<double> row{rng.normal() + (pos ? gap : -gap), rng.normal()};
        s.x.push_back(row);
        s.positive.push_back(pos);
    }
    return s;
}

} // namespace

TEST_CASE("one-class dual matches the brute-force oracles", "[svm]")
{
    Rng rng(31);
    for (std::size_t m = 2; m <= 12; ++m)
        for (double nu : {1.0, 0.5, 0.3}) {
            if (nu * double(m) < 1.0) continue;
            const auto x = cloud(m, 2, rng);
            const GramMatrix k(x, Kernel::gaussian(0.8));
            const auto d = ocsvm_solve(k, nu);
            const auto qp = one_class_qp(k, nu);
            INFO("m=" << m << " nu=" << nu);
            CHECK(std::fabs(d.objective - qp.objective(d.lambda)) < 1e-12);
            CHECK(std::fabs(d.objective - testing::active_set_minimum(qp)) < 1e-6);
            if (m <= 5) CHECK(std::fabs(d.objective - testing::grid_minimum(qp)) < 1e-3);
        }
}

TEST_CASE("one-class constraints and KKT conditions", "[svm]")
{
    Rng rng(32);
    for (double nu : {0.05, 0.1, 0.3}) {
        const auto x = cloud(200, 4, rng);
        const auto model = ocsvm_train(x, nu, 1.5);
        const double c = 1.0 / (nu * 200.0);
        const double sum = std::accumulate(model.lambdas().begin(), model.lambdas().end(), 0.0);
        CHECK(std::fabs(sum - 1.0) < 1e-8);
        for (double l : model.lambdas()) {
            CHECK(l >= 0.0);
            CHECK(l <= c + 1e-12);
        }
        const GramMatrix k(x, Kernel::gaussian(1.5));
        const auto d = ocsvm_solve(k, nu);
        for (std::size_t i = 0; i < 200; ++i) {
            const double f = d.gradient[i] - d.xi;
            if (d.lambda[i] == 0.0) CHECK(f >= -1e-6);
            else if (d.lambda[i] >= c * (1 - 1e-12)) CHECK(f <= 1e-6);
            else CHECK(std::fabs(f) < 1e-6);
            CHECK(std::fabs(model.decision(x.row(i)) - f) < 1e-9);
        }
    }
}

TEST_CASE("nu bounds the outlier fraction", "[svm]")
{
    Rng rng(33);
    const std::size_t m = 400;
    for (double nu : {0.05, 0.1, 0.2}) {
        const auto x = cloud(m, 4, rng);
        const auto model = ocsvm_train(x, nu, 2.0);
        std::size_t outliers = 0;
        for (std::size_t i = 0; i < m; ++i) outliers += model.decision(x.row(i)) < 0;
        CHECK(std::fabs(double(outliers) / double(m) - nu) < 2.0 / std::sqrt(double(m)));
    }
}

TEST_CASE("one-class edge cases", "[svm]")
{
    FeatureMatrix same(2);
    same.push_back(std::vector<double>{1.0, 1.0});
    same.push_back(std::vector<double>{1.0, 1.0});
    const GramMatrix k(same, Kernel::gaussian(1.0));
    const auto d = ocsvm_solve(k, 1.0);
    CHECK(d.lambda[0] == Catch::Approx(0.5));
    CHECK(d.lambda[1] == Catch::Approx(0.5));

    Rng rng(34);
    const auto x = cloud(50, 2, rng);
    const auto model = ocsvm_train(x, 0.1, 0.5);
    const std::vector<double> far{40.0, -40.0};
    CHECK(model.decision(far) < 0.0);
    CHECK_FALSE(model.accepts(far));

    CHECK_THROWS_AS(ocsvm_train(x, 0.0, 1.0), InvariantViolation);
    CHECK_THROWS_AS(ocsvm_train(x, 0.01, 1.0), InvariantViolation); // nu m < 1
    CHECK_THROWS_AS(ocsvm_solve(GramMatrix(cloud(30, 2, rng), Kernel::gaussian(1.0)), 0.5, {1e-6, 1}),
                    NumericError);
}

TEST_CASE("binary dual matches the brute-force oracles", "[svm]")
{
    Rng rng(41);
    for (std::size_t m = 2; m <= 12; ++m)
        for (double c : {0.5, 5.0}) {
            auto s = two_blobs(m, 0.6, rng);
            const GramMatrix k(s.x, Kernel::gaussian(1.0));
            const auto y = signed_labels(s);
            const auto d = binary_svm_solve(k, y, c);
            const auto qp = binary_qp(k, y, c);
            INFO("m=" << m << " C=" << c);
            CHECK(std::fabs(d.objective - qp.objective(d.alpha)) < 1e-10);
            CHECK(std::fabs(d.objective - testing::active_set_minimum(qp)) < 1e-6);
            if (m <= 5) CHECK(std::fabs(d.objective - testing::grid_minimum(qp)) < 1e-3);
            double eq = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                CHECK(d.alpha[i] >= 0.0);
                CHECK(d.alpha[i] <= c);
                eq += d.alpha[i] * y[i];
            }
            CHECK(std::fabs(eq) < 1e-8);
        }
}

TEST_CASE("binary SVM separates separable data", "[svm]")
{
    LabeledSet s{FeatureMatrix(2), {true, true, false, false}};
    for (auto row : {std::vector<double>{2, 2}, {3, 1}, {-2, -1}, {-1, -3}}) s.x.push_back(row);
    const auto model = binary_svm_train(s, 100.0, Kernel::linear());
    for (std::size_t i = 0; i < 4; ++i) CHECK(model.accepts(s.x.row(i)) == s.positive[i]);

    Rng rng(42);
    const auto blobs = two_blobs(200, 4.0, rng);
    const auto g = binary_svm_train(blobs, 10.0, 1.0);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < blobs.size(); ++i) errors += g.accepts(blobs.x.row(i)) != blobs.positive[i];
    CHECK(errors == 0);
}

TEST_CASE("binary SVM KKT conditions", "[svm]")
{
    Rng rng(43);
    const auto s = two_blobs(150, 0.8, rng);
    const GramMatrix k(s.x, Kernel::gaussian(1.0));
    const auto y = signed_labels(s);
    const double c = 2.0;
    const auto d = binary_svm_solve(k, y, c);
    for (std::size_t i = 0; i < s.size(); ++i) {
        // G_i = y_i (f(x_i) + rho) - 1, so this is y_i f(x_i) - 1.
        const double margin = d.gradient[i] - y[i] * d.rho;
        if (d.alpha[i] == 0.0) CHECK(margin >= -1e-6);
        else if (d.alpha[i] >= c) CHECK(margin <= 1e-6);
        else CHECK(std::fabs(margin) < 1e-6);
    }
    LabeledSet one{s.x, std::vector<bool>(s.size(), true)};
    CHECK_THROWS_AS(binary_svm_train(one, 1.0, 1.0), InvariantViolation);
    CHECK_THROWS_AS(binary_svm_train(s, 0.0, 1.0), InvariantViolation);
}
