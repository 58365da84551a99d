#include <doctest.h>

#include <map>
#include <queue>
#include <set>

#include "fixtures.hpp"
#include "fsl/space.hpp"

using namespace fsl;

namespace {

// BFS shortest-path oracle on the recorded edges (unit hop = edge length).
Mat bfs_distance_oracle(const MetricMeasureSpace& s) {
    const int n = static_cast<int>(s.size());
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
    for (const auto& e : s.edges()) {
        adj[static_cast<std::size_t>(e.i)].push_back({e.j, e.len});
        adj[static_cast<std::size_t>(e.j)].push_back({e.i, e.len});
    }
    Mat d(static_cast<std::size_t>(n), static_cast<std::size_t>(n), 0.0);
    for (int src = 0; src < n; ++src) {
        std::map<int, double> dist{{src, 0.0}};
        std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                            std::greater<>>
            pq;
        pq.push({0.0, src});
        while (!pq.empty()) {
            auto [dd, u] = pq.top();
            pq.pop();
            if (dist.count(u) && dd > dist[u] + 1e-15) continue;
            for (auto [v, len] : adj[static_cast<std::size_t>(u)])
                if (!dist.count(v) || dd + len < dist[v] - 1e-15) {
                    dist[v] = dd + len;
                    pq.push({dd + len, v});
                }
        }
        for (auto [v, dd] : dist) d(static_cast<std::size_t>(src), static_cast<std::size_t>(v)) = dd;
    }
    return d;
}

} // namespace

TEST_CASE("grid space: 1d periodic basics") {
    const auto s = build_grid_space(1, 4, 0.25);
    CHECK(s.size() == 4);
    CHECK(s.d(0, 2) == doctest::Approx(0.5));
    CHECK(s.mu(0) == doctest::Approx(0.25));
    CHECK(s.total_mass() == doctest::Approx(1.0));
    s.check_invariants();
}

TEST_CASE("grid space: ball volume matches lattice count") {
    const auto& s = test::grid1d();
    // lattice points within distance < 0.1 of an interior point: |delta| <= 6
    CHECK(s.volume(10, 0.1) == doctest::Approx(13.0 / 64.0));
}

TEST_CASE("grid space: distances match BFS oracle") {
    for (auto boundary : {GridBoundary::Dirichlet, GridBoundary::Periodic}) {
        const auto s = build_grid_space(2, 8, 1.0, boundary);
        CHECK(s.size() == 64);
        const Mat oracle = bfs_distance_oracle(s);
        double worst = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = 0; j < s.size(); ++j)
                worst = std::max(worst, std::abs(oracle(i, j) - s.dist()(i, j)));
        CHECK(worst == doctest::Approx(0.0));
        if (boundary == GridBoundary::Dirichlet) CHECK(s.d(0, 63) == doctest::Approx(14.0));
        else CHECK(s.d(0, 63) == doctest::Approx(2.0));
    }
}

TEST_CASE("grid space: rejects bad arguments") {
    CHECK_THROWS(build_grid_space(3, 8, 1.0));
    CHECK_THROWS(build_grid_space(1, 3, 1.0));
    CHECK_THROWS(build_grid_space(1, 8, -1.0));
}

TEST_CASE("graph space: line graph and connectivity error") {
    std::vector<Edge> edges = {{0, 1, 1.0}, {1, 2, 2.0}};
    const auto s = build_graph_space(3, edges, Vec{1.0, 1.0, 1.0});
    CHECK(s.d(0, 2) == doctest::Approx(3.0));
    CHECK_THROWS(build_graph_space(3, {{0, 1, 1.0}}, Vec{1.0, 1.0, 1.0}));
}

TEST_CASE("doubling: 1d close to exponent 1") {
    const auto rep = estimate_doubling(test::grid1d());
    CHECK(rep.n_exp == doctest::Approx(1.0).epsilon(0.25));
    CHECK(rep.n_tilde <= rep.n_exp + 1e-12);
    // exhaustive pure doubling with the reported constant
    const auto& s = test::grid1d();
    for (int x = 0; x < static_cast<int>(s.size()); ++x)
        for (double r : s.distance_set())
            CHECK(s.volume(x, 2.0 * r) <= rep.c_pure * s.volume(x, r) + 1e-12);
}

TEST_CASE("doubling: single point space") {
    MetricMeasureSpace s(Mat(1, 1, 0.0), Vec{1.0}, 1.0);
    const auto rep = estimate_doubling(s);
    CHECK(rep.n_exp == doctest::Approx(0.0));
    CHECK(rep.c_doubling == doctest::Approx(1.0));
}

TEST_CASE("doubling: 2d close to exponent 2") {
    const auto rep = estimate_doubling(test::grid2d());
    CHECK(rep.n_exp == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("distinct balls: dedup and prefix structure") {
    const auto& s = test::grid1d();
    const auto balls = enumerate_distinct_balls(s);
    CHECK(!balls.empty());
    std::set<std::vector<int>> seen;
    for (const auto& b : balls) {
        auto members = s.ball_members(b.center, 0.5 * (b.r_lo + b.r_hi) + 1e-15);
        std::vector<int> sorted(members);
        std::sort(sorted.begin(), sorted.end());
        CHECK(static_cast<int>(members.size()) == b.count);
        CHECK(seen.insert(sorted).second); // genuinely distinct
    }
}

TEST_CASE("dyadic cubes: 1d path splits evenly at scale 4") {
    const auto s = build_grid_space(1, 8, 1.0, GridBoundary::Dirichlet);
    const auto tree = build_dyadic_cubes(s, -3, 0);
    const CubeLevel* level = tree.level_for_nu(-2);
    REQUIRE(level != nullptr);
    CHECK(level->cubes.size() == 2);
    for (const auto& q : level->cubes) CHECK(q.members.size() == 4);
}

TEST_CASE("dyadic cubes: partition, nesting, sandwich") {
    const auto& s = test::grid2d();
    // diameter 16 -> coarsest scale 8 (nu = -3); min distance 1 -> nu_max = 0
    const auto tree = build_dyadic_cubes(s, -3, 0);

    for (const auto& level : tree.levels) {
        double mass = 0.0;
        std::vector<int> owner(s.size(), -1);
        for (std::size_t c = 0; c < level.cubes.size(); ++c)
            for (int y : level.cubes[c].members) {
                CHECK(owner[static_cast<std::size_t>(y)] == -1);
                owner[static_cast<std::size_t>(y)] = static_cast<int>(c);
                mass += s.mu(y);
            }
        CHECK(mass == doctest::Approx(s.total_mass()));
        for (int o : owner) CHECK(o >= 0);
    }

    // nesting: members of each cube lie inside the parent's member set
    for (std::size_t li = 1; li < tree.levels.size(); ++li) {
        const auto& fine = tree.levels[li];
        const auto& coarse = tree.levels[li - 1];
        for (const auto& q : fine.cubes) {
            REQUIRE(q.parent >= 0);
            const DyadicCube* parent = nullptr;
            for (const auto& pq : coarse.cubes)
                if (pq.id == q.parent) parent = &pq;
            REQUIRE(parent != nullptr);
            std::set<int> pm(parent->members.begin(), parent->members.end());
            for (int y : q.members) CHECK(pm.count(y) == 1);
        }
    }

    // measured sandwich holds exhaustively
    for (const auto& level : tree.levels)
        for (const auto& q : level.cubes) {
            for (int y : q.members) CHECK(s.d(q.center, y) <= tree.kappa0 * level.scale + 1e-12);
            for (int y = 0; y < static_cast<int>(s.size()); ++y)
                if (s.d(q.center, y) < tree.c0 * level.scale - 1e-12) {
                    bool member = false;
                    for (int m : q.members) member |= (m == y);
                    CHECK(member);
                }
        }
}

TEST_CASE("dyadic cubes: finest level is singletons") {
    const auto s = build_grid_space(1, 8, 1.0, GridBoundary::Dirichlet);
    const auto tree = build_dyadic_cubes(s, -3, 0);
    const CubeLevel* finest = tree.level_for_nu(0);
    REQUIRE(finest != nullptr);
    CHECK(finest->cubes.size() == s.size());
    for (const auto& q : finest->cubes) CHECK(q.members.size() == 1);
}

TEST_CASE("dyadic cubes: rejects bad scale ranges") {
    const auto& s = test::grid1d();
    CHECK_THROWS(build_dyadic_cubes(s, 4, 8));   // coarsest below diameter/2
    CHECK_THROWS(build_dyadic_cubes(s, 1, 0));   // inverted range
    CHECK_THROWS(build_dyadic_cubes(s, 1, 3));   // finest scale 1/8 above min distance 1/64
}
