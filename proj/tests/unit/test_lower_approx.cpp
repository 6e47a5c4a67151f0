#include "common.hpp"

#include "dpomdp/lower_approx.hpp"

#include <map>

using namespace dpomdp;

namespace {

Matrix dense(const SparseRowMatrix& m) { return Matrix(m); }

/// Value of grid-point index `i` looked up by its first coordinate.
double value_at(const ModifiedMdp& mdp, const Vector& values, double p) {
    for (Index c = 0; c < mdp.num_support(); ++c)
        if (std::abs(mdp.support[c][0] - p) < 1e-12) return values(c);
    FAIL("grid point not found");
    return 0.0;
}

}  // namespace

TEST_SUITE("lower-approx") {
    TEST_CASE("scheme names") {
        CHECK(scheme_from_string("d1") == Scheme::d1);
        CHECK(scheme_from_string("D2") == Scheme::d2);
        CHECK(to_string(Scheme::d2) == "d2");
        CHECK_THROWS_AS(scheme_from_string("d3"), ValidationError);
    }

    TEST_CASE("D1 on the vertex grid is the underlying MDP") {
        for (const char* name : {"two_state.pomdp", "ring.pomdp", "zero_cost.pomdp"}) {
            const auto m = load_fixture(name);
            const auto grid = make_edge_grid(m.num_states, 0);
            const auto mdp = build_modified_mdp(m, grid, Scheme::d1);
            for (Index u = 0; u < m.num_actions; ++u)
                for (Index s = 0; s < m.num_states; ++s)
                    for (Index t = 0; t < m.num_states; ++t)
                        CHECK(dense(mdp.mdp.transition[u])(grid.vertex_index(s), grid.vertex_index(t)) ==
                              doctest::Approx(m.transition[u](s, t)).epsilon(1e-12));
        }
    }

    TEST_CASE("D2 on the vertex grid of a fully observed model is the underlying MDP") {
        const auto m = load_fixture("observable.pomdp");
        const auto mdp = build_modified_mdp(m, make_edge_grid(2, 0), Scheme::d2);
        REQUIRE(mdp.num_support() == 2);
        for (Index c = 0; c < 2; ++c) {
            const Index s = mdp.support[c][0] == 1.0 ? 0 : 1;
            CHECK(mdp.support[c].approx_equal(Belief::vertex(2, s)));
            for (Index u = 0; u < 2; ++u) {
                CHECK(mdp.mdp.cost(c, u) == m.cost(s, u));
                for (Index d = 0; d < 2; ++d) {
                    const Index t = mdp.support[d][0] == 1.0 ? 0 : 1;
                    CHECK(dense(mdp.mdp.transition[u])(c, d) == doctest::Approx(m.transition[u](s, t)));
                }
            }
        }
    }

    TEST_CASE("D2 on the two-state vertex grid against brute-force construction") {
        const auto m = load_fixture("two_state.pomdp");
        const auto mdp = build_modified_mdp(m, make_edge_grid(2, 0), Scheme::d2);
        // Enumerate (i, u, z) in order and deduplicate.
        std::vector<Vector> support;
        for (Index i = 0; i < 2; ++i)
            for (Index u = 0; u < 2; ++u) {
                const Vector e = Belief::vertex(2, i).probs();
                const Vector pz = oracle::observation_probability(m, e, u);
                for (Index z = 0; z < 2; ++z) {
                    if (pz(z) <= 1e-12) continue;
                    const Vector post = oracle::posterior(m, e, u, z);
                    bool seen = false;
                    for (const auto& c : support) seen = seen || (c - post).cwiseAbs().maxCoeff() <= 1e-9;
                    if (!seen) support.push_back(post);
                }
            }
        REQUIRE(mdp.num_support() == static_cast<Index>(support.size()));
        for (Index c = 0; c < mdp.num_support(); ++c) CHECK(linf_distance(mdp.support[c].probs(), support[c]) <= 1e-12);

        const auto index_of = [&](const Vector& y) {
            for (Index c = 0; c < static_cast<Index>(support.size()); ++c)
                if ((support[c] - y).cwiseAbs().maxCoeff() <= 1e-9) return c;
            return Index{-1};
        };
        for (Index u = 0; u < 2; ++u) {
            const Matrix P = dense(mdp.mdp.transition[u]);
            for (Index c = 0; c < mdp.num_support(); ++c) {
                Vector row = Vector::Zero(mdp.num_support());
                for (Index i = 0; i < 2; ++i) {
                    const Vector e = Belief::vertex(2, i).probs();
                    const Vector pz = oracle::observation_probability(m, e, u);
                    for (Index z = 0; z < 2; ++z)
                        if (pz(z) > 1e-12) row(index_of(oracle::posterior(m, e, u, z))) += support[c](i) * pz(z);
                }
                CHECK((P.row(c).transpose() - row).cwiseAbs().maxCoeff() <= 1e-12);
                CHECK(mdp.mdp.cost(c, u) == doctest::Approx(oracle::stage_cost(m, support[c], u)).epsilon(1e-15));
            }
        }
        // Provenance lists every generating triple.
        std::size_t triples = 0;
        for (const auto& p : mdp.provenance) triples += p.size();
        CHECK(triples == 2 * 2 * 2);
    }

    TEST_CASE("structural invariants") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto m = oracle::random_pomdp(3, 2, 2, seed);
            for (const char* pattern : {"0-E", "1-E", "2-E+3-R"}) {
                const auto grid = make_grid(pattern, 3, seed);
                for (Scheme scheme : {Scheme::d1, Scheme::d2}) {
                    const auto mdp = build_modified_mdp(m, grid, scheme);
                    if (scheme == Scheme::d1) CHECK(mdp.num_support() == grid.size());
                    else CHECK(mdp.num_support() <= grid.size() * m.num_actions * m.num_observations);
                    for (Index u = 0; u < m.num_actions; ++u) {
                        const Matrix P = dense(mdp.mdp.transition[u]);
                        for (Index c = 0; c < mdp.num_support(); ++c) {
                            CHECK(is_probability_vector(P.row(c).transpose(), 1e-8));
                            CHECK(mdp.mdp.cost(c, u) == stage_cost(m, mdp.support[c], u));
                        }
                    }
                }
            }
        }
    }

    TEST_CASE("extension") {
        const auto m = load_fixture("two_state.pomdp");
        const auto grid = make_edge_grid(2, 2);
        SUBCASE("alpha zero is myopic") {
            const auto mdp = build_modified_mdp(m, grid, Scheme::d2);
            const Vector values = Vector::LinSpaced(mdp.num_support(), -3.0, 5.0);
            const auto r = evaluate_extension(m, mdp, values, belief2(0.3), 0.0);
            CHECK(r.value == doctest::Approx(std::min(0.7, 0.6)));
        }
        SUBCASE("support beliefs reproduce their own row") {
            for (Scheme scheme : {Scheme::d1, Scheme::d2}) {
                const auto mdp = build_modified_mdp(m, grid, scheme);
                const Vector values = Vector::LinSpaced(mdp.num_support(), 1.0, 2.0);
                for (Index c = 0; c < mdp.num_support(); ++c) {
                    const auto r = evaluate_extension(m, mdp, values, mdp.support[c], 0.9);
                    for (Index u = 0; u < 2; ++u) {
                        const double q = mdp.mdp.cost(c, u) + 0.9 * mdp.mdp.transition[u].row(c).dot(values);
                        CHECK(r.q(u) == doctest::Approx(q).epsilon(1e-12));
                    }
                }
            }
        }
        SUBCASE("D1 against the direct formula") {
            const auto mdp = build_modified_mdp(m, grid, Scheme::d1);
            Vector values(mdp.num_support());
            for (Index c = 0; c < mdp.num_support(); ++c) values(c) = 3.0 * mdp.support[c][0] * mdp.support[c][0] - 1.0;
            std::vector<double> coords;
            for (const auto& p : grid.points()) coords.push_back(p[0]);
            for (double p : {0.05, 0.3, 0.42, 0.8}) {
                const Vector x = belief2(p).probs();
                const auto r = evaluate_extension(m, mdp, values, belief2(p), 0.9);
                for (Index u = 0; u < 2; ++u) {
                    double q = oracle::stage_cost(m, x, u);
                    const Vector pz = oracle::observation_probability(m, x, u);
                    for (Index z = 0; z < 2; ++z) {
                        const Vector post = oracle::posterior(m, x, u, z);
                        for (const auto& [point, w] : oracle::bracket_weights(coords, post(0)))
                            q += 0.9 * pz(z) * w * value_at(mdp, values, point);
                    }
                    CHECK(r.q(u) == doctest::Approx(q).epsilon(1e-12));
                }
            }
        }
        SUBCASE("D2 against the direct formula") {
            const auto mdp = build_modified_mdp(m, grid, Scheme::d2);
            Vector values(mdp.num_support());
            for (Index c = 0; c < mdp.num_support(); ++c) values(c) = std::sin(5.0 * mdp.support[c][0]);
            std::vector<double> coords;
            for (const auto& p : grid.points()) coords.push_back(p[0]);
            for (double p : {0.1, 0.5, 0.77}) {
                const auto r = evaluate_extension(m, mdp, values, belief2(p), 0.9);
                for (Index u = 0; u < 2; ++u) {
                    double q = oracle::stage_cost(m, belief2(p).probs(), u);
                    for (const auto& [point, w] : oracle::bracket_weights(coords, p)) {
                        const Vector xi = belief2(point).probs();
                        const Vector pz = oracle::observation_probability(m, xi, u);
                        for (Index z = 0; z < 2; ++z)
                            q += 0.9 * w * pz(z) * value_at(mdp, values, oracle::posterior(m, xi, u, z)(0));
                    }
                    CHECK(r.q(u) == doctest::Approx(q).epsilon(1e-12));
                }
            }
        }
    }

    TEST_CASE("finite-horizon comparison") {
        const auto m = load_fixture("two_state.pomdp");
        const auto mdp = build_modified_mdp(m, make_edge_grid(2, 1), Scheme::d1);
        const Belief x0 = belief2(0.3);
        const auto zero = nstage_lower_bound_check(m, mdp, 0, x0, 1.0);
        CHECK(zero.approximate == 0.0);
        CHECK(zero.exact == 0.0);
        const auto one = nstage_lower_bound_check(m, mdp, 1, x0, 1.0);
        CHECK(one.approximate == doctest::Approx(0.6));
        CHECK(one.exact == doctest::Approx(0.6));
        const auto six = nstage_lower_bound_check(m, mdp, 6, x0, 1.0);
        CHECK(six.exact == doctest::Approx(oracle::belief_tree_value(m, x0.probs(), 6, 1.0)).epsilon(1e-12));
        CHECK(six.approximate <= six.exact + 1e-9);
        CHECK_THROWS_AS(exact_nstage_value(m, x0, 30, 1.0), Error);
    }

    TEST_CASE("finite-horizon lower bound on random models") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const Index S = 2 + static_cast<Index>(seed % 2);
            const auto m = oracle::random_pomdp(S, 2, 2, seed);
            Rng rng(seed);
            const Belief x0 = sample_uniform_belief(S, rng);
            for (const char* pattern : {"0-E", "1-E"})
                for (Scheme scheme : {Scheme::d1, Scheme::d2}) {
                    const auto mdp = build_modified_mdp(m, make_grid(pattern, S), scheme);
                    for (double alpha : {0.9, 1.0})
                        for (int N = 1; N <= 5; ++N) {
                            const auto r = nstage_lower_bound_check(m, mdp, N, x0, alpha);
                            CHECK(r.approximate <= r.exact + 1e-9);
                        }
                }
        }
    }
}
