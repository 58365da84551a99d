#include "fsl/space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <unordered_set>

namespace fsl {

MetricMeasureSpace::MetricMeasureSpace(Mat dist, Vec measure, double quasi_const,
                                       std::vector<Edge> edges, std::string descriptor)
    : dist_(std::move(dist)),
      measure_(std::move(measure)),
      quasi_const_(quasi_const),
      edges_(std::move(edges)),
      descriptor_(std::move(descriptor)) {
    const std::size_t n = measure_.size();
    if (dist_.rows() != n || dist_.cols() != n)
        throw std::invalid_argument("space: distance matrix size mismatch");
    for (double m : measure_)
        if (!(m > 0.0)) throw std::invalid_argument("space: measure must be positive");

    total_mass_ = 0.0;
    for (double m : measure_) total_mass_ += m;

    min_pos_dist_ = std::numeric_limits<double>::infinity();
    std::set<double> dset;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d = dist_(i, j);
            diameter_ = std::max(diameter_, d);
            if (d > 0.0) {
                min_pos_dist_ = std::min(min_pos_dist_, d);
                dset.insert(d);
            }
        }
    if (!std::isfinite(min_pos_dist_)) min_pos_dist_ = 0.0;
    distance_set_.assign(dset.begin(), dset.end());

    order_.resize(n);
    sorted_d_.resize(n);
    prefix_mu_.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
        order_[x].resize(n);
        for (std::size_t i = 0; i < n; ++i) order_[x][i] = static_cast<int>(i);
        std::sort(order_[x].begin(), order_[x].end(), [&](int a, int b) {
            const double da = dist_(x, a), db = dist_(x, b);
            if (da != db) return da < db;
            return a < b;
        });
        sorted_d_[x].resize(n);
        prefix_mu_[x].resize(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            sorted_d_[x][i] = dist_(x, order_[x][i]);
            prefix_mu_[x][i + 1] = prefix_mu_[x][i] + measure_[order_[x][i]];
        }
    }
}

double MetricMeasureSpace::volume(int x, double r) const {
    const auto& d = sorted_d_[x];
    const auto it = std::lower_bound(d.begin(), d.end(), r); // first >= r
    const std::size_t k = static_cast<std::size_t>(it - d.begin());
    return prefix_mu_[x][k];
}

std::vector<int> MetricMeasureSpace::ball_members(int x, double r) const {
    const auto& d = sorted_d_[x];
    const auto it = std::lower_bound(d.begin(), d.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - d.begin());
    return {order_[x].begin(), order_[x].begin() + static_cast<std::ptrdiff_t>(k)};
}

void MetricMeasureSpace::check_invariants() const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        if (dist_(i, i) != 0.0) throw std::runtime_error("space: d(x,x) != 0");
        for (std::size_t j = 0; j < n; ++j)
            if (dist_(i, j) != dist_(j, i)) throw std::runtime_error("space: asymmetric distance");
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (dist_(i, j) > quasi_const_ * (dist_(i, k) + dist_(k, j)) + 1e-12)
                    throw std::runtime_error("space: quasi-triangle inequality fails");
}

std::vector<BallRef> enumerate_distinct_balls(const MetricMeasureSpace& s) {
    const int n = static_cast<int>(s.size());
    std::vector<BallRef> balls;
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(n) * 8);

    const auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    for (int x = 0; x < n; ++x) {
        const auto& ids = s.sorted_ids(x);
        const auto& d = s.sorted_dists(x);
        // order-independent set hash: the same ball reached from two centers
        // must collapse to one key
        std::uint64_t h1 = 0, h2 = 0;
        for (int k = 1; k <= n; ++k) {
            const auto id = static_cast<std::uint64_t>(ids[k - 1]);
            h1 += mix(id + 1);
            h2 ^= mix((id + 1) * 0x9e3779b97f4a7c15ull);
            // A prefix is a ball only if it ends at a strict distance jump.
            if (k < n && d[k] == d[k - 1]) continue;
            const std::uint64_t key =
                mix(h1 ^ (h2 * 1099511628211ull) ^ static_cast<std::uint64_t>(k));
            if (!seen.insert(key).second) continue;
            BallRef b;
            b.center = x;
            b.count = k;
            b.r_lo = d[k - 1];
            b.r_hi = (k < n) ? d[k] : 2.0 * std::max(s.diameter(), s.min_positive_distance());
            balls.push_back(b);
        }
    }
    return balls;
}

namespace {

int grid_index(int ix, int iy, int side) { return iy * side + ix; }

int wrap_delta(int a, int b, int side, bool periodic) {
    int d = std::abs(a - b);
    if (periodic) d = std::min(d, side - d);
    return d;
}

} // namespace

MetricMeasureSpace build_grid_space(int dim, int side, double spacing, GridBoundary boundary) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("build_grid_space: dim must be 1 or 2");
    if (side < 4) throw std::invalid_argument("build_grid_space: side must be >= 4");
    if (!(spacing > 0.0)) throw std::invalid_argument("build_grid_space: spacing must be positive");
    const double extent = static_cast<double>(side) * spacing;
    if (!std::isfinite(extent) || extent > 1e300)
        throw std::invalid_argument("build_grid_space: side*spacing overflows");

    const bool periodic = (boundary == GridBoundary::Periodic);
    const int n = (dim == 1) ? side : side * side;
    Mat dist(n, n, 0.0);
    std::vector<Edge> edges;

    if (dim == 1) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                dist(i, j) = spacing * wrap_delta(i, j, side, periodic);
        for (int i = 0; i + 1 < side; ++i) edges.push_back({i, i + 1, spacing});
        if (periodic) edges.push_back({side - 1, 0, spacing});
    } else {
        for (int x1 = 0; x1 < side; ++x1)
            for (int y1 = 0; y1 < side; ++y1)
                for (int x2 = 0; x2 < side; ++x2)
                    for (int y2 = 0; y2 < side; ++y2) {
                        const int i = grid_index(x1, y1, side);
                        const int j = grid_index(x2, y2, side);
                        dist(i, j) = spacing * (wrap_delta(x1, x2, side, periodic) +
                                                wrap_delta(y1, y2, side, periodic));
                    }
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) {
                const int i = grid_index(x, y, side);
                if (x + 1 < side) edges.push_back({i, grid_index(x + 1, y, side), spacing});
                else if (periodic) edges.push_back({i, grid_index(0, y, side), spacing});
                if (y + 1 < side) edges.push_back({i, grid_index(x, y + 1, side), spacing});
                else if (periodic) edges.push_back({i, grid_index(x, 0, side), spacing});
            }
    }

    Vec mu(static_cast<std::size_t>(n), std::pow(spacing, dim));
    std::string desc = "grid-" + std::to_string(dim) + "d-" + std::to_string(side) +
                       (periodic ? "-periodic" : "-dirichlet");
    return MetricMeasureSpace(std::move(dist), std::move(mu), 1.0, std::move(edges), desc);
}

MetricMeasureSpace build_graph_space(int n, const std::vector<Edge>& edges, Vec measure) {
    if (n <= 0) throw std::invalid_argument("build_graph_space: need n > 0");
    if (static_cast<int>(measure.size()) != n)
        throw std::invalid_argument("build_graph_space: measure size mismatch");

    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
    for (const auto& e : edges) {
        if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n || !(e.len > 0.0))
            throw std::invalid_argument("build_graph_space: bad edge");
        adj[static_cast<std::size_t>(e.i)].push_back({e.j, e.len});
        adj[static_cast<std::size_t>(e.j)].push_back({e.i, e.len});
    }

    const double inf = std::numeric_limits<double>::infinity();
    Mat dist(static_cast<std::size_t>(n), static_cast<std::size_t>(n), inf);
    for (int src = 0; src < n; ++src) {
        std::vector<double> d(static_cast<std::size_t>(n), inf);
        d[static_cast<std::size_t>(src)] = 0.0;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        pq.push({0.0, src});
        while (!pq.empty()) {
            auto [dd, u] = pq.top();
            pq.pop();
            if (dd > d[static_cast<std::size_t>(u)]) continue;
            for (auto [v, len] : adj[static_cast<std::size_t>(u)]) {
                const double nd = dd + len;
                if (nd < d[static_cast<std::size_t>(v)]) {
                    d[static_cast<std::size_t>(v)] = nd;
                    pq.push({nd, v});
                }
            }
        }
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite(d[static_cast<std::size_t>(j)]))
                throw std::invalid_argument("build_graph_space: graph not connected");
            dist(src, j) = d[static_cast<std::size_t>(j)];
        }
    }
    return MetricMeasureSpace(std::move(dist), std::move(measure), 1.0, edges, "graph");
}

namespace {

/// Max over the exhaustive (x, r, lambda) sweep of V(x, lr) / (l^n V(x, r)).
double doubling_constant_for(const MetricMeasureSpace& s, double n_exp) {
    static const double lambdas[] = {2.0, 4.0, 8.0};
    double c = 1.0;
    const int n = static_cast<int>(s.size());
    for (int x = 0; x < n; ++x)
        for (double r : s.distance_set()) {
            const double vr = s.volume(x, r);
            if (vr <= 0.0) continue;
            for (double l : lambdas)
                c = std::max(c, s.volume(x, l * r) / (std::pow(l, n_exp) * vr));
        }
    return c;
}

double cross_center_constant_for(const MetricMeasureSpace& s, double n_tilde) {
    double c = 1.0;
    const int n = static_cast<int>(s.size());
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (double r : s.distance_set()) {
                const double vy = s.volume(y, r);
                if (vy <= 0.0) continue;
                const double factor = std::pow(1.0 + s.d(x, y) / r, n_tilde);
                c = std::max(c, s.volume(x, r) / (factor * vy));
            }
    return c;
}

double bisect_exponent(const std::function<double(double)>& constant_of, double cap) {
    if (constant_of(0.0) <= cap) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (constant_of(hi) > cap && hi < 128.0) hi *= 2.0;
    for (int it = 0; it < 60 && hi - lo > 1e-3; ++it) {
        const double mid = 0.5 * (lo + hi);
        (constant_of(mid) <= cap ? hi : lo) = mid;
    }
    return hi;
}

} // namespace

DoublingReport estimate_doubling(const MetricMeasureSpace& s, double constant_cap) {
    DoublingReport rep;
    if (s.distance_set().empty()) {
        rep.n_exp = 0.0;
        rep.n_tilde = 0.0;
        rep.c_doubling = 1.0;
        rep.c_pure = 1.0;
        return rep;
    }
    rep.n_exp = bisect_exponent([&](double n) { return doubling_constant_for(s, n); }, constant_cap);
    rep.c_doubling = doubling_constant_for(s, rep.n_exp);
    rep.n_tilde = bisect_exponent([&](double n) { return cross_center_constant_for(s, n); }, constant_cap);
    rep.n_tilde = std::min(rep.n_tilde, rep.n_exp);

    double c2 = 1.0;
    for (int x = 0; x < static_cast<int>(s.size()); ++x)
        for (double r : s.distance_set()) {
            const double vr = s.volume(x, r);
            if (vr > 0.0) c2 = std::max(c2, s.volume(x, 2.0 * r) / vr);
        }
    rep.c_pure = c2;
    return rep;
}

const CubeLevel* DyadicCubeTree::level_for_nu(int nu) const {
    for (const auto& l : levels)
        if (l.nu == nu) return &l;
    return nullptr;
}

const DyadicCube* DyadicCubeTree::find(int id) const {
    for (const auto& l : levels)
        for (const auto& q : l.cubes)
            if (q.id == id) return &q;
    return nullptr;
}

DyadicCubeTree build_dyadic_cubes(const MetricMeasureSpace& s, int nu_min, int nu_max) {
    const int n = static_cast<int>(s.size());
    if (nu_max < nu_min) throw std::invalid_argument("build_dyadic_cubes: nu_max < nu_min");
    const double coarse = std::pow(2.0, -nu_min);
    const double fine = std::pow(2.0, -nu_max);
    if (coarse < s.diameter() / 2.0)
        throw std::invalid_argument("build_dyadic_cubes: coarsest scale below diameter/2");
    if (s.min_positive_distance() > 0.0 && fine > s.min_positive_distance())
        throw std::invalid_argument("build_dyadic_cubes: finest scale above min distance");

    DyadicCubeTree tree;
    std::vector<int> prev_net;           // net points of the previous (coarser) level
    std::vector<int> prev_assign;        // point -> cube index at previous level
    int next_id = 0;

    for (int nu = nu_min; nu <= nu_max; ++nu) {
        const double sep = std::pow(2.0, -nu);
        CubeLevel level;
        level.nu = nu;
        level.scale = sep;

        // Maximal separated net by farthest-point traversal, seeded with the
        // coarser net so net points persist down the hierarchy.
        std::vector<int> net = prev_net;
        std::vector<double> mind(static_cast<std::size_t>(n),
                                 std::numeric_limits<double>::infinity());
        for (int c : net)
            for (int x = 0; x < n; ++x)
                mind[static_cast<std::size_t>(x)] =
                    std::min(mind[static_cast<std::size_t>(x)], s.d(c, x));
        if (net.empty()) {
            net.push_back(0);
            for (int x = 0; x < n; ++x) mind[static_cast<std::size_t>(x)] = s.d(0, x);
        }
        while (true) {
            int best = -1;
            double bestd = -1.0;
            for (int x = 0; x < n; ++x)
                if (mind[static_cast<std::size_t>(x)] > bestd) {
                    bestd = mind[static_cast<std::size_t>(x)];
                    best = x;
                }
            if (bestd < sep) break;
            net.push_back(best);
            for (int x = 0; x < n; ++x)
                mind[static_cast<std::size_t>(x)] =
                    std::min(mind[static_cast<std::size_t>(x)], s.d(best, x));
        }

        // Parent of each net point = the coarser cube containing it.
        std::vector<int> net_parent(net.size(), -1);
        if (!prev_assign.empty())
            for (std::size_t c = 0; c < net.size(); ++c)
                net_parent[c] = prev_assign[static_cast<std::size_t>(net[c])];

        // Nearest-net assignment restricted to nets sharing the point's
        // parent cube; ties broken by lowest net point index.
        std::vector<int> assign(static_cast<std::size_t>(n), -1);
        for (int x = 0; x < n; ++x) {
            const int want_parent = prev_assign.empty()
                                        ? -1
                                        : prev_assign[static_cast<std::size_t>(x)];
            int best = -1;
            double bestd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < net.size(); ++c) {
                if (!prev_assign.empty() && net_parent[c] != want_parent) continue;
                const double dd = s.d(net[c], x);
                if (dd < bestd - 1e-15 ||
                    (std::abs(dd - bestd) <= 1e-15 && best >= 0 &&
                     net[c] < net[static_cast<std::size_t>(best)])) {
                    bestd = dd;
                    best = static_cast<int>(c);
                }
            }
            if (best < 0) throw std::runtime_error("build_dyadic_cubes: no admissible net point");
            assign[static_cast<std::size_t>(x)] = best;
        }

        level.cubes.resize(net.size());
        for (std::size_t c = 0; c < net.size(); ++c) {
            level.cubes[c].id = next_id++;
            level.cubes[c].center = net[c];
            level.cubes[c].side = sep;
            if (!prev_assign.empty() && net_parent[c] >= 0)
                level.cubes[c].parent =
                    tree.levels.back().cubes[static_cast<std::size_t>(net_parent[c])].id;
        }
        for (int x = 0; x < n; ++x)
            level.cubes[static_cast<std::size_t>(assign[static_cast<std::size_t>(x)])]
                .members.push_back(x);
        level.assignment = assign;

        // Empty cubes can appear when the parent constraint funnels points
        // away from a net point that is itself near a parent boundary; drop
        // them (a net point is always a member of its own cube, so this only
        // removes cubes that never received any point -- cannot happen for
        // the cube containing its own center, kept for safety).
        std::vector<DyadicCube> kept;
        std::vector<int> remap(level.cubes.size(), -1);
        for (std::size_t c = 0; c < level.cubes.size(); ++c) {
            if (level.cubes[c].members.empty()) continue;
            remap[c] = static_cast<int>(kept.size());
            kept.push_back(std::move(level.cubes[c]));
        }
        level.cubes = std::move(kept);
        for (auto& a : level.assignment) a = remap[static_cast<std::size_t>(a)];

        prev_net = net;
        prev_assign = level.assignment;
        tree.levels.push_back(std::move(level));
    }

    // Measured sandwich constants, global over all cubes.
    double kappa0 = 0.0;
    double c0 = std::numeric_limits<double>::infinity();
    for (const auto& level : tree.levels) {
        for (const auto& q : level.cubes) {
            double maxd = 0.0;
            for (int y : q.members) maxd = std::max(maxd, s.d(q.center, y));
            kappa0 = std::max(kappa0, maxd / level.scale);

            double nearest_out = std::numeric_limits<double>::infinity();
            std::vector<char> in(s.size(), 0);
            for (int y : q.members) in[static_cast<std::size_t>(y)] = 1;
            for (int y = 0; y < static_cast<int>(s.size()); ++y)
                if (!in[static_cast<std::size_t>(y)])
                    nearest_out = std::min(nearest_out, s.d(q.center, y));
            if (std::isfinite(nearest_out)) c0 = std::min(c0, nearest_out / level.scale);
        }
    }
    if (!std::isfinite(c0)) c0 = 2.0 * std::max(s.diameter(), 1.0);
    tree.c0 = c0;
    tree.kappa0 = std::max(kappa0, 1e-12);
    return tree;
}

} // namespace fsl
