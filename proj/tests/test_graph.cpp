#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "adadif/graph.hpp"
#include "adadif/random.hpp"
#include "adadif/spectral.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace adadif;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

TEST_CASE("edge list parsing", "[graph]") {
    SECTION("comments, blank lines, weights") {
        const Graph g = testutil::graph_from_text("# header\n"
                                                  "0 1\n"
                                                  "\n"
                                                  "1 2 2.5 # inline comment\n"
                                                  "2 0\n");
        REQUIRE(g.order() == 3);
        REQUIRE(g.undirected_edges == 3);
        REQUIRE(g.degrees[1] == Approx(3.5));
    }
    SECTION("missing endpoint") {
        std::istringstream in("0 1\n2\n");
        REQUIRE_THROWS_MATCHES(load_graph(in), format_error,
                               MessageMatches(ContainsSubstring("line 2")));
    }
    SECTION("trailing field") {
        std::istringstream in("0 1 1.0 junk\n");
        REQUIRE_THROWS_MATCHES(load_graph(in), format_error,
                               MessageMatches(ContainsSubstring("trailing")));
    }
    SECTION("nonpositive weight") {
        std::istringstream in("0 1 0\n");
        REQUIRE_THROWS_AS(load_graph(in), format_error);
        std::istringstream neg("0 1 -2\n");
        REQUIRE_THROWS_AS(load_graph(neg), format_error);
    }
    SECTION("missing file") {
        REQUIRE_THROWS_AS(load_graph(std::string("/nonexistent/graph.txt")), data_error);
    }
}

TEST_CASE("graph construction", "[graph]") {
    SECTION("parallel edges merge by weight") {
        const Graph g = testutil::graph_from_edges({{0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 1.0}});
        REQUIRE(g.undirected_edges == 2);
        REQUIRE(g.degrees[0] == Approx(3.0));
        REQUIRE(g.degrees[1] == Approx(4.0));
    }
    SECTION("self loop counts once in the edge tally") {
        const Graph g = testutil::graph_from_edges({{0, 0, 1.0}, {0, 1, 1.0}});
        REQUIRE(g.undirected_edges == 2);
        REQUIRE(g.degrees[0] == Approx(2.0));
    }
    SECTION("ids remap in first-appearance order") {
        const Graph g = testutil::graph_from_edges({{7, 3, 1.0}, {3, 100, 1.0}});
        REQUIRE(g.order() == 3);
        REQUIRE(g.node_ids == std::vector<std::int64_t>{7, 3, 100});
        REQUIRE(g.index_of(100) == 2);
        REQUIRE_THROWS_AS(g.index_of(4), data_error);
    }
    SECTION("rows are sorted") {
        std::mt19937_64 gen(11);
        const Graph g = testutil::random_connected_graph(gen, 40, {.extra_edges = 80});
        for (NodeId i = 0; i < g.order(); ++i)
            for (std::int64_t k = g.offsets[i] + 1; k < g.offsets[i + 1]; ++k)
                REQUIRE(g.targets[k - 1] < g.targets[k]);
    }
    SECTION("no edges") {
        REQUIRE_THROWS_AS(build_graph({}), structure_error);
    }
    SECTION("degree sum doubles the undirected weight") {
        const Graph g = testutil::graph_from_edges({{0, 1, 1.5}, {1, 2, 2.0}});
        REQUIRE(g.degree_sum == Approx(7.0));
    }
}

TEST_CASE("transition operator matches the dense matrix", "[graph]") {
    std::mt19937_64 gen(123);
    for (int trial = 0; trial < 30; ++trial) {
        const Graph g = testutil::random_connected_graph(
            gen, 5 + static_cast<int>(uniform_below(gen, 30)),
            {.extra_edges = 20, .weighted = true});
        const Eigen::MatrixXd H = oracles::dense_transition(g);
        REQUIRE(H.colwise().sum().isApproxToConstant(1.0, 1e-12));

        Eigen::VectorXd x(g.order());
        for (NodeId i = 0; i < g.order(); ++i) x[i] = 2.0 * uniform_unit(gen) - 1.0;
        const Eigen::VectorXd y = apply_transition(g, x);
        REQUIRE((y - H * x).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("stationary distribution is a fixed point", "[graph]") {
    std::mt19937_64 gen(7);
    const Graph g = testutil::random_connected_graph(gen, 25, {.extra_edges = 40,
                                                               .weighted = true});
    const Eigen::VectorXd pi = stationary_distribution(g);
    REQUIRE(pi.sum() == Approx(1.0));
    REQUIRE((apply_transition(g, pi) - pi).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("laplacian quadratic form matches dense algebra", "[graph]") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 20; ++trial) {
        const Graph g = testutil::random_connected_graph(gen, 20, {.extra_edges = 25,
                                                                   .weighted = true});
        const Eigen::MatrixXd L =
            Eigen::MatrixXd(g.degrees.asDiagonal()) - oracles::dense_adjacency(g);
        Eigen::VectorXd x(g.order()), y(g.order());
        for (NodeId i = 0; i < g.order(); ++i) {
            x[i] = 2.0 * uniform_unit(gen) - 1.0;
            y[i] = 2.0 * uniform_unit(gen) - 1.0;
        }
        const Eigen::VectorXd u = x.cwiseQuotient(g.degrees);
        const Eigen::VectorXd v = y.cwiseQuotient(g.degrees);
        REQUIRE(laplacian_quadratic(g, x, y) == Approx(u.dot(L * v)).margin(1e-12));
    }
}

TEST_CASE("connectivity and bipartiteness", "[graph]") {
    REQUIRE(is_connected(testutil::path_graph(6)));
    REQUIRE_FALSE(is_connected(testutil::graph_from_edges({{0, 1, 1.0}, {2, 3, 1.0}})));

    REQUIRE(is_bipartite(testutil::path_graph(6)));
    REQUIRE(is_bipartite(testutil::ring_graph(8)));
    REQUIRE_FALSE(is_bipartite(testutil::ring_graph(7)));
    REQUIRE_FALSE(is_bipartite(testutil::complete_graph(3)));
    REQUIRE_FALSE(is_bipartite(testutil::graph_from_edges({{0, 0, 1.0}, {0, 1, 1.0}})));
}

TEST_CASE("spectral summary matches a dense eigensolve", "[graph][spectral]") {
    std::mt19937_64 gen(2026);
    for (int trial = 0; trial < 12; ++trial) {
        const Graph g = testutil::random_connected_graph(
            gen, 8 + static_cast<int>(uniform_below(gen, 25)),
            {.extra_edges = 15, .weighted = trial % 2 == 0});
        const Eigen::VectorXd eigs = oracles::dense_laplacian_spectrum(g);
        const SpectralSummary s = spectral_summary(g, 1e-10);
        REQUIRE(eigs[0] == Approx(0.0).margin(1e-9));
        REQUIRE(s.mu2 == Approx(eigs[1]).margin(1e-6));
        REQUIRE(s.muN == Approx(eigs[eigs.size() - 1]).margin(1e-6));
        REQUIRE(s.mu_prime ==
                Approx(std::min(s.mu2, 2.0 - s.muN)).margin(1e-12));
    }
}

TEST_CASE("spectral summary on structured graphs", "[graph][spectral]") {
    SECTION("complete graph") {
        const int n = 12;
        const SpectralSummary s = spectral_summary(testutil::complete_graph(n));
        const double mu = static_cast<double>(n) / (n - 1);
        REQUIRE(s.mu2 == Approx(mu).margin(1e-6));
        REQUIRE(s.muN == Approx(mu).margin(1e-6));
    }
    SECTION("even ring is bipartite: muN = 2, mu_prime ~ 0") {
        const SpectralSummary s = spectral_summary(testutil::ring_graph(8));
        REQUIRE(s.muN == Approx(2.0).margin(1e-6));
        REQUIRE(s.mu_prime < 1e-6);
    }
    SECTION("disconnected graph is rejected") {
        REQUIRE_THROWS_AS(spectral_summary(testutil::graph_from_edges(
                              {{0, 1, 1.0}, {2, 3, 1.0}})),
                          structure_error);
    }
}

TEST_CASE("seeded draws are deterministic and in range", "[random]") {
    SECTION("derive_seed separates streams") {
        const auto a = derive_seed(42, 0);
        const auto b = derive_seed(42, 1);
        REQUIRE(a != b);
        REQUIRE(derive_seed(42, 0) == a);
    }
    SECTION("uniform_below stays below its bound") {
        std::mt19937_64 gen(5);
        for (int i = 0; i < 2000; ++i) REQUIRE(uniform_below(gen, 7) < 7);
    }
    SECTION("uniform_unit stays in [0, 1)") {
        std::mt19937_64 gen(6);
        for (int i = 0; i < 2000; ++i) {
            const double u = uniform_unit(gen);
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
        }
    }
    SECTION("sampling without replacement is a partial permutation") {
        std::mt19937_64 gen(7);
        const auto draw = sample_without_replacement(gen, 20, 8);
        REQUIRE(draw.size() == 8);
        std::set<std::int64_t> unique(draw.begin(), draw.end());
        REQUIRE(unique.size() == 8);
        for (auto v : draw) {
            REQUIRE(v >= 0);
            REQUIRE(v < 20);
        }

        std::mt19937_64 gen2(7);
        REQUIRE(sample_without_replacement(gen2, 20, 8) == draw);

        std::mt19937_64 gen3(8);
        const auto full = sample_without_replacement(gen3, 10, 10);
        std::set<std::int64_t> all(full.begin(), full.end());
        REQUIRE(all.size() == 10);
    }
}
