#ifndef FSL_SPACE_HPP
#define FSL_SPACE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsl/linalg.hpp"

namespace fsl {

/// Weighted edge (i, j, length); the builders record these so operator
/// assembly can reuse the connectivity that generated the distances.
struct Edge {
    int i = 0;
    int j = 0;
    double len = 0.0;
};

/// Finite metric measure space: quasi-distance matrix, positive point
/// measure, and the derived ball geometry caches used by every sweep.
///
/// Balls are open sets {y : d(x,y) < r}. On a finite space the distinct
/// balls centered at x are the prefixes of the distance-sorted point list,
/// cut at strict jumps of the distance.
class MetricMeasureSpace {
public:
    MetricMeasureSpace(Mat dist, Vec measure, double quasi_const,
                       std::vector<Edge> edges = {}, std::string descriptor = "custom");

    std::size_t size() const { return measure_.size(); }
    double d(int x, int y) const { return dist_(x, y); }
    const Mat& dist() const { return dist_; }
    double mu(int x) const { return measure_[x]; }
    const Vec& measure() const { return measure_; }
    double total_mass() const { return total_mass_; }
    double quasi_const() const { return quasi_const_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::string& descriptor() const { return descriptor_; }

    double diameter() const { return diameter_; }
    /// Smallest positive pairwise distance (grid spacing on lattices).
    double min_positive_distance() const { return min_pos_dist_; }

    /// V(x, r) = mu({y : d(x,y) < r}).
    double volume(int x, double r) const;
    /// Members of the open ball B(x, r), in distance order.
    std::vector<int> ball_members(int x, double r) const;

    /// Point indices sorted by distance from x (ties by index).
    const std::vector<int>& sorted_ids(int x) const { return order_[x]; }
    /// Distances matching sorted_ids(x).
    const std::vector<double>& sorted_dists(int x) const { return sorted_d_[x]; }
    /// Prefix sums of mu along sorted_ids(x); prefix_mu(x)[k] = mu of first k points.
    const std::vector<double>& prefix_mu(int x) const { return prefix_mu_[x]; }

    /// All distinct positive pairwise distances, ascending.
    const std::vector<double>& distance_set() const { return distance_set_; }

    void check_invariants() const;

private:
    Mat dist_;
    Vec measure_;
    double quasi_const_;
    std::vector<Edge> edges_;
    std::string descriptor_;

    double diameter_ = 0.0;
    double min_pos_dist_ = 0.0;
    double total_mass_ = 0.0;
    std::vector<std::vector<int>> order_;
    std::vector<std::vector<double>> sorted_d_;
    std::vector<std::vector<double>> prefix_mu_;
    std::vector<double> distance_set_;
};

/// One distinct ball, as (center, prefix length) into the sorted order.
/// r_lo is the largest member distance, r_hi the next distance outward
/// (2*diameter for the full space); any radius in (r_lo, r_hi] realizes
/// the same point set.
struct BallRef {
    int center = 0;
    int count = 0;
    double r_lo = 0.0;
    double r_hi = 0.0;
};

/// Every distinct ball of the space, deduplicated as point sets.
std::vector<BallRef> enumerate_distinct_balls(const MetricMeasureSpace& s);

enum class GridBoundary { Periodic, Dirichlet };

/// Lattice space: d = shortest lattice path x spacing, mu = spacing^dim.
MetricMeasureSpace build_grid_space(int dim, int side, double spacing,
                                    GridBoundary boundary = GridBoundary::Periodic);

/// Weighted-graph space: d = shortest path metric (Dijkstra).
MetricMeasureSpace build_graph_space(int n, const std::vector<Edge>& edges, Vec measure);

struct DoublingReport {
    double n_exp = 0.0;     ///< exponent in V(x, lambda r) <= C lambda^n V(x, r)
    double n_tilde = 0.0;   ///< exponent in V(x,r) <= C (1 + d(x,y)/r)^n~ V(y,r)
    double c_doubling = 1.0;///< constant accompanying n_exp
    double c_pure = 1.0;    ///< plain V(x,2r) <= C V(x,r) constant
};

/// Exhaustive doubling diagnostics; exponents are the smallest values for
/// which the measured constant stays below an explicit cap (finite spaces
/// satisfy any exponent with a large enough constant, so a cap is the only
/// meaningful reading of "smallest").
DoublingReport estimate_doubling(const MetricMeasureSpace& s, double constant_cap = 4.0);

struct DyadicCube {
    int id = 0;         ///< global id, unique across the tree
    int center = 0;     ///< net point index in the space
    int parent = -1;    ///< global id of the parent cube (-1 at the root level)
    std::vector<int> members;
    double side = 0.0;  ///< ell(Q) = 2^{-nu}
};

struct CubeLevel {
    int nu = 0;
    double scale = 0.0;          ///< 2^{-nu}
    std::vector<DyadicCube> cubes;
    std::vector<int> assignment; ///< point -> index into cubes
};

/// Christ-type dyadic structure built from maximal separated nets
/// (farthest-point traversal, coarse nets reused in fine nets) with
/// parent-consistent assignment. c0/kappa0 are measured:
///   B(x_Q, c0 * 2^{-nu}) subset Q subset {y : d(x_Q,y) <= kappa0 * 2^{-nu}}.
struct DyadicCubeTree {
    std::vector<CubeLevel> levels; ///< coarse to fine
    double c0 = 0.0;
    double kappa0 = 0.0;

    const CubeLevel* level_for_nu(int nu) const;
    const DyadicCube* find(int id) const;
};

DyadicCubeTree build_dyadic_cubes(const MetricMeasureSpace& s, int nu_min, int nu_max);

} // namespace fsl

#endif
