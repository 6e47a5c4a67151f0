#include "common.hpp"

#include "dpomdp/chain.hpp"

#include <random>

using namespace dpomdp;

TEST_SUITE("chain") {
    TEST_CASE("identity") {
        const auto d = chain_decompose(Matrix::Identity(3, 3));
        CHECK(d.classes.size() == 3);
        CHECK(d.transient.empty());
        CHECK(d.stationary.isApprox(Matrix::Identity(3, 3)));
    }

    TEST_CASE("periodic two-cycle") {
        Matrix P(2, 2);
        P << 0, 1, 1, 0;
        const auto d = chain_decompose(P);
        REQUIRE(d.classes.size() == 1);
        CHECK((d.stationary.array() - 0.5).abs().maxCoeff() < 1e-15);
    }

    TEST_CASE("transient states split between classes") {
        Matrix P(4, 4);
        P << 1, 0, 0, 0,  //
            0, 0.5, 0.5, 0,  //
            0, 0.5, 0.5, 0,  //
            0.25, 0.5, 0, 0.25;
        const auto d = chain_decompose(P);
        CHECK(d.classes == std::vector<std::vector<Index>>{{0}, {1, 2}});
        CHECK(d.transient == std::vector<Index>{3});
        CHECK(d.class_of[3] == -1);
        // From 3: absorbed at 0 w.p. 1/3 and in {1,2} w.p. 2/3.
        CHECK(d.stationary(3, 0) == doctest::Approx(1.0 / 3.0));
        CHECK(d.stationary(3, 1) == doctest::Approx(1.0 / 3.0));
    }

    TEST_CASE("random chains against averaged powers") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int trial = 0; trial < 10; ++trial) {
            Matrix P = Matrix::Zero(5, 5);
            for (Index s = 0; s < 5; ++s) {
                for (Index t = 0; t < 5; ++t)
                    if (unit(rng) < 0.45) P(s, t) = unit(rng);
                if (P.row(s).sum() == 0.0) P(s, s) = 1.0;
                P.row(s) /= P.row(s).sum();
            }
            const auto d = chain_decompose(P);
            const Matrix ref = oracle::cesaro_limit(P, 24);
            CHECK((d.stationary - ref).cwiseAbs().maxCoeff() <= 1e-6);
            CHECK((d.stationary * P - d.stationary).cwiseAbs().maxCoeff() <= 1e-9);
            for (Index s = 0; s < 5; ++s) { CAPTURE(d.stationary.row(s)); CHECK(is_probability_vector(d.stationary.row(s).transpose(), 1e-9)); }
            std::size_t members = d.transient.size();
            for (const auto& c : d.classes) members += c.size();
            CHECK(members == 5);
        }
    }

    TEST_CASE("rejects non-stochastic input") {
        CHECK_THROWS_AS(chain_decompose(Matrix::Constant(2, 2, 0.7)), ValidationError);
        CHECK_THROWS_AS(chain_decompose(Matrix::Identity(2, 3)), ValidationError);
    }
}
