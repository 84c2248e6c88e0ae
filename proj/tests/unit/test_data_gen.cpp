// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "discovery/data_gen.hpp"
#include "discovery/error.hpp"

using namespace discovery;

namespace {

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    Eigen::VectorXd x = a.array() - a.mean();
    Eigen::VectorXd y = b.array() - b.mean();
    return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

} // namespace

TEST_CASE("latent correlation inverts the uniform-margin relation")
{
    CHECK(latent_correlation(0.0) == 0.0);
    for (double r : {0.1, 0.2, 0.5, 0.8}) {
        double latent = latent_correlation(r);
        CHECK(latent >= r);
        // Pearson correlation of uniforms from a normal pair: (6/pi) asin(rho/2)
        CHECK(6.0 / std::numbers::pi * std::asin(latent / 2.0) == doctest::Approx(r).epsilon(1e-12));
    }
}

TEST_CASE("predictors have uniform levels and the target correlation")
{
    RngStream rng(3, 1);
    const int n = 60000;
    for (double r : {0.0, 0.2, 0.5}) {
        CAPTURE(r);
        Eigen::MatrixXd x = gen_predictors(n, 3, r, rng);
        REQUIRE(x.rows() == n);
        REQUIRE(x.cols() == 3);
        CHECK(x.minCoeff() >= 1.0);
        CHECK(x.maxCoeff() <= 100.0);
        CHECK((x.array() == x.array().round()).all());
        for (int j = 0; j < 3; ++j) {
            CHECK(x.col(j).mean() == doctest::Approx(50.5).epsilon(0.01));
            // discrete uniform on 1..100 has variance (100^2 - 1)/12
            double var = (x.col(j).array() - x.col(j).mean()).square().sum() / (n - 1);
            CHECK(var == doctest::Approx(9999.0 / 12).epsilon(0.02));
        }
        CHECK(pearson(x.col(0), x.col(1)) == doctest::Approx(r).epsilon(0.02).scale(1.0));
        CHECK(pearson(x.col(0), x.col(2)) == doctest::Approx(r).epsilon(0.02).scale(1.0));
    }
    CHECK_THROWS_AS(gen_predictors(3, 3, 0.2, rng), ConfigError);
    CHECK_THROWS_AS(gen_predictors(100, 3, 0.95, rng), ConfigError);
}

TEST_CASE("coefficients are flat Dirichlet")
{
    RngStream rng(11, 2);
    const auto model = parse_model("x1 + x2 + x3 + x1x2", 3);
    const int draws = 40000;
    std::vector<double> mean(4, 0.0);
    for (int i = 0; i < draws; ++i) {
        auto b = gen_coefficients(model, rng);
        REQUIRE(b.size() == 4);
        double total = 0;
        for (int j = 0; j < 4; ++j) {
            CHECK(b[j] > 0.0);
            total += b[j];
            mean[j] += b[j] / draws;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    // each component is Beta(1, 3): mean 1/4, sd ~0.194
    for (double m : mean)
        CHECK(std::abs(m - 0.25) < 5 * 0.194 / std::sqrt(draws));
}

TEST_CASE("term columns multiply raw levels")
{
    Eigen::MatrixXd x(2, 3);
    x << 1, 2, 3, 4, 5, 6;
    CHECK(term_column(x, 0b001) == Eigen::Vector2d(1, 4));
    CHECK(term_column(x, 0b110) == Eigen::Vector2d(6, 30));
    CHECK(term_column(x, 0b111) == Eigen::Vector2d(6, 120));
}

TEST_CASE("response is standardized")
{
    RngStream rng(4, 4);
    GroundTruth truth;
    truth.true_model = parse_model("x1 + x2 + x1x2", 3);
    truth.beta = gen_coefficients(truth.true_model, rng);
    truth.sigma_level = 0.5;
    auto d = gen_response(gen_predictors(truth.n, 3, truth.correlation, rng), truth, rng);
    CHECK(d.y.size() == truth.n);
    CHECK(std::abs(d.y.mean()) < 1e-12);
    CHECK((d.y.array() - d.y.mean()).square().sum() / (truth.n - 1) == doctest::Approx(1.0));
}

TEST_CASE("noise fraction controls the fit")
{
    // With almost no noise the true model explains most of the variance; with
    // f = 0.8 it explains far less.
    RngStream rng(8, 8);
    auto r2 = [&](double f) {
        GroundTruth truth;
        truth.true_model = parse_model("x1 + x2", 3);
        truth.beta = {0.5, 0.5};
        truth.sigma_level = f;
        truth.n = 5000;
        auto d = gen_response(gen_predictors(truth.n, 3, 0.0, rng), truth, rng);
        return pearson(d.y, d.x_raw.col(0) + d.x_raw.col(1));
    };
    CHECK(r2(0.01) > 0.95);
    CHECK(r2(0.8) < 0.3);
}

TEST_CASE("ground truth validation")
{
    GroundTruth truth;
    truth.true_model = parse_model("x1 + x2", 3);
    truth.beta = {0.5};
    CHECK_THROWS_AS(validate(truth), ConfigError);
    truth.beta = {0.5, 0.5};
    CHECK_NOTHROW(validate(truth));
    truth.sigma_level = 1.0;
    CHECK_THROWS_AS(validate(truth), ConfigError);
}

TEST_CASE("constant response cannot be standardized")
{
    CHECK_THROWS_AS(standardize(Eigen::VectorXd::Constant(10, 2.0)), GenerationError);
}
