#include "heatbv/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

#include "heatbv/errors.hpp"

namespace heatbv {

GeometryDescriptor GeometryDescriptor::line(double a, double b, std::size_t n) {
    GeometryDescriptor d;
    d.kind = GeometryKind::LineGrid;
    d.a = a;
    d.b = b;
    d.resolution = n;
    return d;
}

GeometryDescriptor GeometryDescriptor::circle(double length, std::size_t n) {
    GeometryDescriptor d;
    d.kind = GeometryKind::CircleGrid;
    d.length = length;
    d.resolution = n;
    return d;
}

GeometryDescriptor GeometryDescriptor::torus(double length, std::size_t n_per_axis) {
    GeometryDescriptor d;
    d.kind = GeometryKind::TorusGrid;
    d.length = length;
    d.resolution = n_per_axis;
    return d;
}

GeometryDescriptor GeometryDescriptor::euclidean(std::vector<double> lo, std::vector<double> hi,
                                                 std::size_t n_per_axis) {
    GeometryDescriptor d;
    d.kind = GeometryKind::EuclideanGrid;
    d.box_lo = std::move(lo);
    d.box_hi = std::move(hi);
    d.resolution = n_per_axis;
    return d;
}

GeometryDescriptor GeometryDescriptor::graph(std::vector<GraphEdge> edges,
                                             std::vector<double> vertex_weights) {
    GeometryDescriptor d;
    d.kind = GeometryKind::WeightedGraph;
    d.edges = std::move(edges);
    d.vertex_weights = std::move(vertex_weights);
    return d;
}

namespace {
void require_resolution(std::size_t n) {
    if (n < 4) throw ResolutionTooSmall("resolution must be at least 4, got " + std::to_string(n));
}
}  // namespace

MetricMeasureSpace::MetricMeasureSpace(const GeometryDescriptor& desc)
    : desc_(desc), kind_(desc.kind) {
    switch (kind_) {
        case GeometryKind::LineGrid: build_line(desc); break;
        case GeometryKind::CircleGrid: build_circle(desc); break;
        case GeometryKind::TorusGrid: build_torus(desc); break;
        case GeometryKind::EuclideanGrid: build_euclidean(desc); break;
        case GeometryKind::WeightedGraph: build_graph(desc); break;
    }
    validate_metric();
}

void MetricMeasureSpace::build_line(const GeometryDescriptor& d) {
    require_resolution(d.resolution);
    if (!(d.b > d.a)) throw NonPositiveLength("line grid needs b > a");
    dim_ = 1;
    n_points_ = d.resolution;
    axis_res_ = d.resolution;
    a_ = d.a;
    b_ = d.b;
    spacing_ = (d.b - d.a) / static_cast<double>(n_points_);
    coords_.resize(n_points_);
    weights_.assign(n_points_, spacing_);
    for (std::size_t i = 0; i < n_points_; ++i)
        coords_[i] = d.a + (static_cast<double>(i) + 0.5) * spacing_;
    total_mass_ = spacing_ * static_cast<double>(n_points_);
    diameter_ = coords_.back() - coords_.front();
}

void MetricMeasureSpace::build_circle(const GeometryDescriptor& d) {
    require_resolution(d.resolution);
    if (!(d.length > 0)) throw NonPositiveLength("circle length must be positive");
    dim_ = 1;
    n_points_ = d.resolution;
    axis_res_ = d.resolution;
    period_ = d.length;
    spacing_ = d.length / static_cast<double>(n_points_);
    coords_.resize(n_points_);
    weights_.assign(n_points_, spacing_);
    for (std::size_t i = 0; i < n_points_; ++i) coords_[i] = static_cast<double>(i) * spacing_;
    total_mass_ = spacing_ * static_cast<double>(n_points_);
    diameter_ = 0.5 * d.length;
}

void MetricMeasureSpace::build_torus(const GeometryDescriptor& d) {
    require_resolution(d.resolution);
    if (!(d.length > 0)) throw NonPositiveLength("torus length must be positive");
    dim_ = 2;
    axis_res_ = d.resolution;
    n_points_ = d.resolution * d.resolution;
    period_ = d.length;
    spacing_ = d.length / static_cast<double>(d.resolution);
    coords_.resize(n_points_ * 2);
    const double cell = spacing_ * spacing_;
    weights_.assign(n_points_, cell);
    for (std::size_t i = 0; i < d.resolution; ++i) {
        for (std::size_t j = 0; j < d.resolution; ++j) {
            const std::size_t k = i * d.resolution + j;
            coords_[2 * k] = static_cast<double>(i) * spacing_;
            coords_[2 * k + 1] = static_cast<double>(j) * spacing_;
        }
    }
    total_mass_ = cell * static_cast<double>(n_points_);
    diameter_ = 0.5 * d.length * std::numbers::sqrt2;
}

void MetricMeasureSpace::build_euclidean(const GeometryDescriptor& d) {
    require_resolution(d.resolution);
    if (d.box_lo.size() != 2 || d.box_hi.size() != 2)
        throw UnsupportedGeometry("euclidean grid is implemented for dimension 2");
    for (int ax = 0; ax < 2; ++ax)
        if (!(d.box_hi[ax] > d.box_lo[ax])) throw NonPositiveLength("euclidean box must have positive extent");
    dim_ = 2;
    axis_res_ = d.resolution;
    n_points_ = d.resolution * d.resolution;
    const double hx = (d.box_hi[0] - d.box_lo[0]) / static_cast<double>(d.resolution);
    const double hy = (d.box_hi[1] - d.box_lo[1]) / static_cast<double>(d.resolution);
    spacing_ = std::max(hx, hy);
    coords_.resize(n_points_ * 2);
    weights_.assign(n_points_, hx * hy);
    for (std::size_t i = 0; i < d.resolution; ++i) {
        for (std::size_t j = 0; j < d.resolution; ++j) {
            const std::size_t k = i * d.resolution + j;
            coords_[2 * k] = d.box_lo[0] + (static_cast<double>(i) + 0.5) * hx;
            coords_[2 * k + 1] = d.box_lo[1] + (static_cast<double>(j) + 0.5) * hy;
        }
    }
    total_mass_ = hx * hy * static_cast<double>(n_points_);
    const double ex = d.box_hi[0] - d.box_lo[0] - hx;
    const double ey = d.box_hi[1] - d.box_lo[1] - hy;
    diameter_ = std::hypot(ex, ey);
}

void MetricMeasureSpace::build_graph(const GeometryDescriptor& d) {
    std::size_t n = 0;
    for (const auto& e : d.edges) {
        if (!(e.w > 0)) throw NonPositiveLength("graph edge weight must be positive");
        n = std::max(n, std::max(e.u, e.v) + 1);
    }
    if (!d.vertex_weights.empty()) n = std::max(n, d.vertex_weights.size());
    if (n < 4) throw ResolutionTooSmall("graph needs at least 4 vertices");
    dim_ = 1;
    n_points_ = n;
    coords_.assign(n, 0.0);
    if (d.vertex_weights.empty()) {
        weights_.assign(n, 1.0);
    } else {
        weights_ = d.vertex_weights;
        for (double w : weights_)
            if (!(w > 0)) throw NonPositiveLength("vertex weights must be positive");
    }
    total_mass_ = 0.0;
    for (double w : weights_) total_mass_ += w;

    // Shortest-path metric with edge length = w, Dijkstra from every vertex.
    const double inf = std::numeric_limits<double>::infinity();
    graph_dist_.assign(n * n, inf);
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const auto& e : d.edges) {
        adj[e.u].emplace_back(e.v, e.w);
        adj[e.v].emplace_back(e.u, e.w);
    }
    for (std::size_t s = 0; s < n; ++s) {
        auto* dist = &graph_dist_[s * n];
        dist[s] = 0.0;
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        pq.emplace(0.0, s);
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (du > dist[u]) continue;
            for (auto [v, w] : adj[u]) {
                if (du + w < dist[v]) {
                    dist[v] = du + w;
                    pq.emplace(dist[v], v);
                }
            }
        }
    }
    diameter_ = 0.0;
    for (double v : graph_dist_) {
        if (std::isinf(v)) throw UnsupportedGeometry("graph must be connected");
        diameter_ = std::max(diameter_, v);
    }
    spacing_ = 0.0;
}

std::array<double, 2> MetricMeasureSpace::point(std::size_t i) const {
    std::array<double, 2> p{0.0, 0.0};
    for (int d = 0; d < dim_; ++d) p[static_cast<std::size_t>(d)] = coords_[i * dim_ + d];
    return p;
}

double MetricMeasureSpace::dist(std::size_t i, std::size_t j) const {
    switch (kind_) {
        case GeometryKind::LineGrid:
            return std::fabs(coords_[i] - coords_[j]);
        case GeometryKind::CircleGrid: {
            double d = std::fabs(coords_[i] - coords_[j]);
            return std::min(d, period_ - d);
        }
        case GeometryKind::TorusGrid: {
            double dx = std::fabs(coords_[2 * i] - coords_[2 * j]);
            double dy = std::fabs(coords_[2 * i + 1] - coords_[2 * j + 1]);
            dx = std::min(dx, period_ - dx);
            dy = std::min(dy, period_ - dy);
            return std::hypot(dx, dy);
        }
        case GeometryKind::EuclideanGrid: {
            const double dx = coords_[2 * i] - coords_[2 * j];
            const double dy = coords_[2 * i + 1] - coords_[2 * j + 1];
            return std::hypot(dx, dy);
        }
        case GeometryKind::WeightedGraph:
            return graph_dist_[i * n_points_ + j];
    }
    return 0.0;
}

double MetricMeasureSpace::ball_mass(std::size_t center, double r) const {
    // Open ball: strict inequality, matching B_r(x).
    double m = 0.0;
    for (std::size_t j = 0; j < n_points_; ++j)
        if (dist(center, j) < r) m += weights_[j];
    return m;
}

std::pair<std::size_t, std::size_t> MetricMeasureSpace::window_indices(double margin) const {
    if (kind_ != GeometryKind::LineGrid)
        return {0, n_points_};
    std::size_t lo = 0, hi = n_points_;
    while (lo < n_points_ && coords_[lo] < a_ + margin) ++lo;
    while (hi > lo && coords_[hi - 1] > b_ - margin) --hi;
    return {lo, hi};
}

void MetricMeasureSpace::validate_metric() const {
    for (double w : weights_)
        if (!(w > 0)) throw NonPositiveLength("weights must be strictly positive");
    // Triangle inequality spot check on random triples (build-time validation;
    // all O(N³) triples would dominate construction cost).
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<std::size_t> pick(0, n_points_ - 1);
    const double tol = 1e-12 * std::max(1.0, diameter_);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t i = pick(rng), j = pick(rng), l = pick(rng);
        const double dij = dist(i, j), dil = dist(i, l), dlj = dist(l, j);
        if (dij > dil + dlj + tol)
            throw Error("triangle inequality violated on spot-checked triple");
        if (i == j && dij != 0.0) throw Error("nonzero diagonal distance");
    }
}

MetricMeasureSpace build_space(const GeometryDescriptor& desc) {
    return MetricMeasureSpace(desc);
}

std::vector<GraphEdge> parse_edge_list(const std::string& text) {
    std::vector<GraphEdge> edges;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long long u, v;
        double w;
        if (!(ls >> u)) continue;  // blank line
        if (!(ls >> v >> w))
            throw ConfigParse("edge list expects 'u v w' per line", lineno, 1);
        if (u < 0 || v < 0) throw ConfigParse("edge indices must be non-negative", lineno, 1);
        if (!(w > 0)) throw ConfigParse("edge weight must be positive", lineno, 1);
        edges.push_back({static_cast<std::size_t>(u), static_cast<std::size_t>(v), w});
    }
    return edges;
}

}  // namespace heatbv
