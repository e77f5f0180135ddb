#include <doctest.h>

#include <cmath>
#include <sstream>

#include "netsirs/error.hpp"
#include "netsirs/graph.hpp"
#include "netsirs/rng.hpp"

using namespace netsirs;

namespace {

void check_invariants(const Graph& g) {
    for (int i = 0; i < g.node_count(); ++i) {
        const auto& nbrs = g.neighbors(i);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const int j = nbrs[k];
            CHECK(j != i);
            if (k > 0) CHECK(nbrs[k - 1] < j); // sorted, no duplicates
            CHECK(g.has_edge(j, i));           // symmetry
        }
    }
}

} // namespace

TEST_CASE("complete(4): 6 edges, every degree 3") {
    const Graph g = make_complete(4);
    CHECK(g.edge_count() == 6);
    for (int i = 0; i < 4; ++i) CHECK(g.degree(i) == 3);
    check_invariants(g);
}

TEST_CASE("erdos_renyi(100, 0) has no edges") {
    for (std::uint64_t seed : {1ULL, 7ULL, 99ULL}) {
        const Graph g = make_erdos_renyi(100, 0.0, seed);
        CHECK(g.edge_count() == 0);
        CHECK(g.node_count() == 100);
    }
}

TEST_CASE("erdos_renyi(1000, 0.01) edge count sits in the binomial window") {
    // C(1000,2) * 0.01 = 4995 expected; [3500, 6500] is a +-6 sigma window.
    const Graph g = make_erdos_renyi(1000, 0.01, 42);
    CHECK(g.edge_count() >= 3500);
    CHECK(g.edge_count() <= 6500);
    check_invariants(g);
}

TEST_CASE("erdos_renyi is deterministic for a fixed seed") {
    const Graph a = make_erdos_renyi(200, 0.05, 7);
    const Graph b = make_erdos_renyi(200, 0.05, 7);
    REQUIRE(a.node_count() == b.node_count());
    CHECK(a.edge_count() == b.edge_count());
    for (int i = 0; i < a.node_count(); ++i)
        CHECK(a.neighbors(i) == b.neighbors(i));
    const Graph c = make_erdos_renyi(200, 0.05, 8);
    CHECK(a.edge_count() != c.edge_count()); // overwhelmingly likely
}

TEST_CASE("erdos_renyi(n, 1) is complete") {
    const Graph g = make_erdos_renyi(20, 1.0, 3);
    CHECK(g.edge_count() == 190);
}

TEST_CASE("generators reject n = 0") {
    CHECK_THROWS_AS(make_complete(0), Error);
    CHECK_THROWS_AS(make_erdos_renyi(0, 0.5, 1), Error);
    CHECK_THROWS_AS(make_path(0), Error);
    CHECK_THROWS_AS(make_star(0), Error);
    CHECK_THROWS_AS(make_erdos_renyi(10, 1.5, 1), Error);
}

TEST_CASE("edge list loading") {
    SUBCASE("path of 3 nodes") {
        std::istringstream in("0 1\n1 2");
        const Graph g = load_edge_list(in);
        CHECK(g.node_count() == 3);
        CHECK(g.edge_count() == 2);
        CHECK(g.degree(1) == 2);
        check_invariants(g);
    }
    SUBCASE("symmetrization dedups reversed duplicates") {
        std::istringstream in("0 1\n1 0");
        const Graph g = load_edge_list(in);
        CHECK(g.edge_count() == 1);
    }
    SUBCASE("self-loop rejected") {
        std::istringstream in("0 0");
        CHECK_THROWS_AS(load_edge_list(in), Error);
    }
    SUBCASE("parse failure names the offending line") {
        std::istringstream in("0 1\nbroken");
        try {
            load_edge_list(in);
            FAIL("expected a parse error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("comments and id gaps (gaps stay isolated)") {
        std::istringstream in("# a comment\n0 1\n\n4 5 # trailing\n");
        const Graph g = load_edge_list(in);
        CHECK(g.node_count() == 6);
        CHECK(g.edge_count() == 2);
        CHECK(g.degree(2) == 0);
    }
    SUBCASE("round trip through save_edge_list") {
        const Graph g = make_erdos_renyi(50, 0.1, 5);
        std::stringstream buf;
        save_edge_list(g, buf);
        const Graph h = load_edge_list(buf);
        REQUIRE(h.node_count() == g.node_count());
        for (int i = 0; i < g.node_count(); ++i)
            CHECK(g.neighbors(i) == h.neighbors(i));
    }
}

TEST_CASE("graph_from_spec parses generator strings") {
    CHECK(graph_from_spec("complete:10", 1).edge_count() == 45);
    CHECK(graph_from_spec("path:3", 1).edge_count() == 2);
    CHECK(graph_from_spec("cycle:5", 1).edge_count() == 5);
    CHECK(graph_from_spec("star:5", 1).edge_count() == 4);
    CHECK(graph_from_spec("er:100:0.0", 9).edge_count() == 0);
    CHECK_THROWS_AS(graph_from_spec("torus:4", 1), Error);
    CHECK_THROWS_AS(graph_from_spec("complete:x", 1), Error);
}

TEST_CASE("spectral radius on closed-form graphs") {
    CHECK(spectral_radius(make_complete(5)).lambda_max == doctest::Approx(4.0).epsilon(1e-9));
    // star(5) = K_{1,4}: lambda = sqrt(4) = 2
    CHECK(spectral_radius(make_star(5)).lambda_max == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(spectral_radius(make_path(3)).lambda_max ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("spectral radius closed forms up to 64 nodes") {
    for (int n = 2; n <= 64; n += 6) {
        CAPTURE(n);
        CHECK(std::abs(spectral_radius(make_complete(n)).lambda_max - (n - 1)) <
              1e-9);
        CHECK(std::abs(spectral_radius(make_star(n)).lambda_max -
                       std::sqrt(n - 1.0)) < 1e-9);
    }
}

TEST_CASE("Rayleigh estimate is monotone and bounded by degree bounds") {
    const Graph g = make_erdos_renyi(60, 0.1, 11);
    std::vector<double> trace;
    const auto rep = spectral_radius(g, 1e-12, 100000, &trace);
    CHECK(rep.residual <= 1e-12);
    for (std::size_t k = 11; k < trace.size(); ++k)
        CHECK(trace[k] >= trace[k - 1] - 1e-12);
    CHECK(rep.lambda_max >= g.average_degree() - 1e-9);
    CHECK(rep.lambda_max <= g.max_degree() + 1e-9);
}

TEST_CASE("disconnected graphs: component-wise max with a warning flag") {
    // K_3 plus K_5, disjoint.
    std::istringstream in("0 1\n0 2\n1 2\n3 4\n3 5\n3 6\n3 7\n4 5\n4 6\n4 7\n5 6\n5 7\n6 7");
    const Graph g = load_edge_list(in);
    const auto rep = spectral_radius(g);
    CHECK(rep.disconnected);
    CHECK(rep.components == 2);
    CHECK(rep.lambda_max == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("single node graph has lambda_max 0") {
    const auto rep = spectral_radius(make_path(1));
    CHECK(rep.lambda_max == doctest::Approx(0.0));
}

TEST_CASE("lambda_min closed forms") {
    CHECK(lambda_min(make_complete(6)) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(lambda_min(make_star(10)) == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(lambda_min(make_path(3)) ==
          doctest::Approx(-std::sqrt(2.0)).epsilon(1e-9));
}
