#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace heatbv {

enum class GeometryKind : std::uint8_t {
    LineGrid,       // uniform cells on [a,b], points at cell midpoints
    CircleGrid,     // uniform points on a circle of length L
    TorusGrid,      // 2-D flat torus, per-axis circle grids
    EuclideanGrid,  // uniform cells in an axis-aligned box, points at midpoints
    WeightedGraph,  // finite weighted graph, shortest-path metric
};

struct GraphEdge {
    std::size_t u = 0, v = 0;
    double w = 1.0;
};

/// Tagged geometry descriptor consumed by build_space.
struct GeometryDescriptor {
    GeometryKind kind = GeometryKind::CircleGrid;
    // LineGrid
    double a = 0.0, b = 1.0;
    // CircleGrid / TorusGrid
    double length = 1.0;
    // Grid resolution: cells per axis.
    std::size_t resolution = 0;
    // EuclideanGrid box (dim = lo.size())
    std::vector<double> box_lo, box_hi;
    // WeightedGraph
    std::vector<GraphEdge> edges;
    std::vector<double> vertex_weights;  // empty = unit weights

    static GeometryDescriptor line(double a, double b, std::size_t n);
    static GeometryDescriptor circle(double length, std::size_t n);
    static GeometryDescriptor torus(double length, std::size_t n_per_axis);
    static GeometryDescriptor euclidean(std::vector<double> lo, std::vector<double> hi,
                                        std::size_t n_per_axis);
    static GeometryDescriptor graph(std::vector<GraphEdge> edges,
                                    std::vector<double> vertex_weights = {});
};

/// Finite metric measure space: points with pairwise distances and positive
/// measure weights. Immutable after construction; accessors are read-only
/// and safe for concurrent use.
class MetricMeasureSpace {
public:
    explicit MetricMeasureSpace(const GeometryDescriptor& desc);

    GeometryKind kind() const { return kind_; }
    std::size_t size() const { return n_points_; }
    int dim() const { return dim_; }

    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }
    double total_mass() const { return total_mass_; }

    /// Coordinates of point i (dim() entries).
    std::array<double, 2> point(std::size_t i) const;
    /// 1-D coordinate shortcut (line/circle).
    double position(std::size_t i) const { return coords_[i * dim_]; }

    double dist(std::size_t i, std::size_t j) const;

    /// Mass of the open metric ball {d(·, center) < r}.
    double ball_mass(std::size_t center, double r) const;

    /// Grid spacing h (max over axes); 0 for graphs without a grid structure.
    double spacing() const { return spacing_; }
    bool is_uniform_grid() const { return kind_ != GeometryKind::WeightedGraph; }
    bool is_closed() const {
        return kind_ == GeometryKind::CircleGrid || kind_ == GeometryKind::TorusGrid;
    }
    /// Period per axis for closed grids.
    double period() const { return period_; }
    /// Points per axis (grids).
    std::size_t axis_resolution() const { return axis_res_; }

    /// Line-grid window [a + margin, b - margin] as an index range [lo, hi).
    /// The margin emulates ℝ on a finite segment; fields are expected to be
    /// constant outside the window.
    std::pair<std::size_t, std::size_t> window_indices(double margin) const;
    double line_a() const { return a_; }
    double line_b() const { return b_; }

    const GeometryDescriptor& descriptor() const { return desc_; }

    /// Diameter of the point set (max pairwise distance; cached).
    double diameter() const { return diameter_; }

    /// Graph accessors (WeightedGraph only).
    const std::vector<GraphEdge>& graph_edges() const { return desc_.edges; }

private:
    void build_line(const GeometryDescriptor& d);
    void build_circle(const GeometryDescriptor& d);
    void build_torus(const GeometryDescriptor& d);
    void build_euclidean(const GeometryDescriptor& d);
    void build_graph(const GeometryDescriptor& d);
    void validate_metric() const;

    GeometryDescriptor desc_;
    GeometryKind kind_;
    std::size_t n_points_ = 0;
    int dim_ = 1;
    std::vector<double> coords_;   // n_points * dim, row-major
    std::vector<double> weights_;
    double total_mass_ = 0.0;
    double spacing_ = 0.0;
    double period_ = 0.0;
    double a_ = 0.0, b_ = 0.0;
    std::size_t axis_res_ = 0;
    double diameter_ = 0.0;
    std::vector<double> graph_dist_;  // dense n×n, graphs only
};

/// Construct and validate a space from a descriptor.
/// Throws NonPositiveLength / ResolutionTooSmall on bad input.
MetricMeasureSpace build_space(const GeometryDescriptor& desc);

/// Parse the edge-list text format: one "u v w" triple per line, 0-based
/// indices, w > 0. '#' starts a comment.
std::vector<GraphEdge> parse_edge_list(const std::string& text);

}  // namespace heatbv
