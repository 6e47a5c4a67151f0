#include "common.hpp"

#include "dpomdp/model.hpp"

#include <cmath>

using namespace dpomdp;

namespace {

/// One state-revealing chain: s -> s+1 mod S, observation equals the new state.
PomdpModel deterministic_ring(Index S) {
    PomdpModel m;
    m.num_states = S;
    m.num_actions = 1;
    m.num_observations = S;
    Matrix T = Matrix::Zero(S, S);
    for (Index s = 0; s < S; ++s) T(s, (s + 1) % S) = 1.0;
    m.transition = {T};
    m.observation = {Matrix::Identity(S, S)};
    m.cost = Matrix::Zero(S, 1);
    return m;
}

}  // namespace

TEST_SUITE("model") {
    TEST_CASE("belief validation") {
        CHECK_THROWS_AS(Belief(Vector::Constant(2, 0.6)), ValidationError);
        Vector negative(2);
        negative << 1.5, -0.5;
        CHECK_THROWS_AS(Belief{negative}, ValidationError);
        Vector slightly(2);
        slightly << 0.5 + 1e-8, 0.5 - 2e-8;
        const Belief b = Belief::normalized(slightly);
        CHECK(b.probs().sum() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(Belief::vertex(3, 1)[1] == 1.0);
        CHECK(Belief::uniform(4)[2] == 0.25);
    }

    TEST_CASE("observation probability") {
        SUBCASE("deterministic chain gives an indicator") {
            const auto m = deterministic_ring(3);
            const Vector p = observation_probability(m, Belief::vertex(3, 1), 0);
            CHECK(p(2) == 1.0);
            CHECK(p(0) == 0.0);
            CHECK(p(1) == 0.0);
        }
        SUBCASE("state-independent observation gives the marginal") {
            auto m = load_fixture("two_state.pomdp");
            Matrix O(2, 2);
            O << 0.3, 0.7, 0.3, 0.7;
            m.observation = {O, O};
            const Vector p = observation_probability(m, Belief::uniform(2), 0);
            CHECK(p(0) == doctest::Approx(0.3));
            CHECK(p(1) == doctest::Approx(0.7));
        }
        SUBCASE("two-state fixture against double sums") {
            const auto m = load_fixture("two_state.pomdp");
            const Belief x = belief2(0.5);
            const Vector p = observation_probability(m, x, 0);
            const Vector ref = oracle::observation_probability(m, x.probs(), 0);
            CHECK((p - ref).cwiseAbs().maxCoeff() < 1e-15);
            CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("belief update") {
        SUBCASE("perfect observation reveals the state") {
            const auto m = deterministic_ring(3);
            const Belief post = belief_update(m, Belief::uniform(3), 0, 2);
            CHECK(post.approx_equal(Belief::vertex(3, 2)));
        }
        SUBCASE("uninformative observation leaves the prediction") {
            auto m = load_fixture("two_state.pomdp");
            m.observation = {Matrix::Constant(2, 2, 0.5), Matrix::Constant(2, 2, 0.5)};
            const Belief x = belief2(0.3);
            const Belief post = belief_update(m, x, 0, 1);
            CHECK(linf_distance(post.probs(), predicted_state(m, x, 0)) < 1e-15);
        }
        SUBCASE("two-state fixture against Bayes rule") {
            const auto m = load_fixture("two_state.pomdp");
            const Belief x = belief2(0.5);
            for (Index z = 0; z < 2; ++z) {
                const Belief post = belief_update(m, x, 0, z);
                CHECK(linf_distance(post.probs(), oracle::posterior(m, x.probs(), 0, z)) < 1e-15);
            }
            // By hand: predicted (0.45, 0.55); alarm likelihoods 0.2 and 0.7.
            const Belief alarm = belief_update(m, x, 0, 1);
            CHECK(alarm[0] == doctest::Approx(0.09 / (0.09 + 0.385)));
        }
        SUBCASE("zero-probability observation") {
            const auto m = deterministic_ring(3);
            CHECK_THROWS_AS(belief_update(m, Belief::vertex(3, 0), 0, 0), ZeroProbabilityObservation);
        }
    }

    TEST_CASE("law of total probability on random models") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto m = oracle::random_pomdp(3, 2, 3, seed);
            Rng rng(seed);
            const Belief x = sample_uniform_belief(3, rng);
            for (Index u = 0; u < 2; ++u) {
                const Vector pz = observation_probability(m, x, u);
                Vector mix = Vector::Zero(3);
                for (Index z = 0; z < 3; ++z) mix += pz(z) * belief_update(m, x, u, z).probs();
                CHECK(linf_distance(mix, predicted_state(m, x, u)) <= 1e-9);
            }
        }
    }

    TEST_CASE("stage cost") {
        const auto m = load_fixture("two_state.pomdp");
        CHECK(stage_cost(m, Belief::vertex(2, 1), 0) == 1.0);
        CHECK(stage_cost(m, belief2(0.25), 1) == doctest::Approx(0.6));
        const auto zero = load_fixture("zero_cost.pomdp");
        CHECK(stage_cost(zero, Belief::uniform(3), 1) == 0.0);
    }

    TEST_CASE("exact backup") {
        const auto m = load_fixture("two_state.pomdp");
        const Belief x = belief_of({0.3, 0.7});
        SUBCASE("zero continuation") {
            const auto r = exact_backup(m, x, [](const Belief&) { return 0.0; }, 0.9);
            CHECK(r.value == doctest::Approx(std::min(0.7, 0.6)));
            CHECK(r.action() == 1);
        }
        SUBCASE("myopic when alpha is zero") {
            const auto r = exact_backup(m, x, [](const Belief& y) { return 100.0 * y[0]; }, 0.0);
            CHECK(r.value == doctest::Approx(0.6));
        }
        SUBCASE("linear continuation against enumeration over (u, z)") {
            const auto J = [](const Belief& y) { return 2.0 * y[0] - 0.5 * y[1]; };
            const auto r = exact_backup(m, x, J, 0.9);
            double best = 1e300;
            for (Index u = 0; u < 2; ++u) {
                double q = oracle::stage_cost(m, x.probs(), u);
                const Vector pz = oracle::observation_probability(m, x.probs(), u);
                for (Index z = 0; z < 2; ++z) {
                    const Vector post = oracle::posterior(m, x.probs(), u, z);
                    q += 0.9 * pz(z) * (2.0 * post(0) - 0.5 * post(1));
                }
                CHECK(r.q(u) == doctest::Approx(q).epsilon(1e-14));
                best = std::min(best, q);
            }
            CHECK(r.value == doctest::Approx(best).epsilon(1e-14));
        }
        SUBCASE("ties report every minimizer") {
            auto tied = m;
            tied.cost.col(1) = tied.cost.col(0);
            tied.transition[1] = tied.transition[0];
            const auto r = exact_backup(tied, x, [](const Belief& y) { return y[1]; }, 0.5);
            CHECK(r.argmin == std::vector<int>{0, 1});
        }
    }

    TEST_CASE("backup is monotone in the continuation") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto m = oracle::random_pomdp(3, 2, 2, seed);
            Rng rng(seed + 100);
            const Belief x = sample_uniform_belief(3, rng);
            const auto J1 = [](const Belief& y) { return y[0] * y[0] + y[2]; };
            const auto J2 = [&](const Belief& y) { return J1(y) + 0.1 + y[1]; };
            CHECK(exact_backup(m, x, J1, 0.95).value <= exact_backup(m, x, J2, 0.95).value);
        }
    }

    TEST_CASE("sampling") {
        SUBCASE("deterministic model") {
            const auto m = deterministic_ring(4);
            Rng rng(7);
            const auto step = sample_step(m, 3, 0, rng);
            CHECK(step.next_state == 0);
            CHECK(step.observation == 0);
        }
        SUBCASE("frequencies match the fixture within three sigma") {
            const auto m = load_fixture("two_state.pomdp");
            Rng rng(12345);
            const int n = 100000;
            int bad = 0, alarm_given_bad = 0;
            for (int i = 0; i < n; ++i) {
                const auto step = sample_step(m, 0, 0, rng);
                if (step.next_state == 1) {
                    ++bad;
                    alarm_given_bad += step.observation == 1;
                }
            }
            const double sigma = std::sqrt(n * 0.1 * 0.9);
            CHECK(std::abs(bad - 0.1 * n) <= 3.0 * sigma);
            const double sigma_obs = std::sqrt(bad * 0.7 * 0.3);
            CHECK(std::abs(alarm_given_bad - 0.7 * bad) <= 3.0 * sigma_obs);
        }
        SUBCASE("uniform transitions") {
            const auto m = load_fixture("ring.pomdp");
            Rng rng(99);
            const int n = 100000;
            std::vector<int> counts(3, 0);
            for (int i = 0; i < n; ++i) ++counts[sample_step(m, 1, 1, rng).next_state];
            const double sigma = std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0));
            for (int c : counts) CHECK(std::abs(c - n / 3.0) <= 3.0 * sigma);
        }
        SUBCASE("seeded streams reproduce") {
            const auto m = load_fixture("two_state.pomdp");
            Rng a(5), b(5);
            for (int i = 0; i < 100; ++i) {
                const auto sa = sample_step(m, i % 2, i % 2, a);
                const auto sb = sample_step(m, i % 2, i % 2, b);
                CHECK(sa.next_state == sb.next_state);
                CHECK(sa.observation == sb.observation);
            }
        }
    }

    TEST_CASE("sub-stream derivation") {
        CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
        CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
        CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));
        Rng rng(3);
        for (int i = 0; i < 1000; ++i) {
            const double u = uniform01(rng);
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
        }
    }

    TEST_CASE("model validation names the row") {
        auto m = load_fixture("two_state.pomdp");
        m.transition[1](0, 0) = 0.5;
        try {
            m.validate();
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("T: repair : good") != std::string::npos);
        }
    }
}
