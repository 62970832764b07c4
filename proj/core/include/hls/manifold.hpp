#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hls {

/// Canonical coordinates of a point on a catalog manifold. Unused trailing
/// entries are zero. Conventions per kind:
///   circle        angle in [0, 2*pi)                     (1 coordinate)
///   sphere2       embedded Cartesian (x, y, z), |x| = R  (3 coordinates)
///   torus-d       per-axis position in [0, L_i)          (d coordinates)
///   ball-d        Cartesian, |x| <= R                    (d coordinates)
using Point = std::array<double, 3>;

/// Tangent coordinates in a normal chart; first `dimension` entries are used.
using Tangent = std::array<double, 3>;

enum class ManifoldKind { Circle, Sphere2, Torus1, Torus2, Ball1, Ball2, Ball3 };

/// A compact catalog manifold (or a flat Euclidean ball used as a chart
/// domain). Immutable after construction; all closed-form quantities
/// (volume, diameter, injectivity radius) come from the catalog entry.
struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::Circle;
    double radius = 1.0;                     // circle / sphere2 / balls
    std::array<double, 2> periods{1.0, 1.0}; // tori

    static ManifoldSpec circle(double radius);
    static ManifoldSpec sphere2(double radius);
    static ManifoldSpec torus1(double period);
    static ManifoldSpec torus2(double period0, double period1);
    static ManifoldSpec ball(int dim, double radius);

    int dimension() const;
    int coord_count() const;
    double volume() const;
    double diameter() const;
    /// Closed-form injectivity radius. Throws DomainError for balls, which
    /// are chart domains rather than chart targets.
    double injectivity_radius() const;
    bool is_ball() const;
    std::string name() const;

    bool operator==(const ManifoldSpec&) const = default;
};

/// Quadrature nodes and positive weights on a manifold. Weights of every
/// catalog grid sum to Vol(M) exactly (up to rounding); mesh_size is the
/// largest nearest-neighbor distance over nodes.
struct QuadratureGrid {
    ManifoldSpec spec;
    std::vector<Point> nodes;
    std::vector<double> weights;
    double mesh_size = 0.0;

    int size() const { return static_cast<int>(nodes.size()); }
    double weight_sum() const;
};

/// Normal-coordinate chart: exp-map coordinates at `center`, valid on the
/// tangent ball of radius `radius`. `distortion` is the epsilon with
///   (1 - eps)|u - v| <= d_g(exp(u), exp(v)) <= (1 + eps)|u - v|
/// for all u, v in the tangent ball.
struct NormalChart {
    ManifoldSpec spec;
    Point center{};
    double radius = 0.0;
    double distortion = 0.0;
    // orthonormal tangent frame (used by the sphere entry)
    std::array<double, 3> e1{}, e2{};
};

/// Deterministic quadrature grid for `spec` at the given resolution.
/// Node count grows with resolution and mesh size shrinks.
QuadratureGrid build_grid(const ManifoldSpec& spec, int resolution);

double geodesic_distance(const ManifoldSpec& spec, const Point& x, const Point& y);

/// Distance-distortion bound for the normal chart of radius delta at P.
/// Zero for flat entries when no wraparound can occur; 1 - sinc(delta/R)
/// on the sphere.
double metric_distortion(const ManifoldSpec& spec, const Point& center, double delta);

NormalChart build_chart(const ManifoldSpec& spec, const Point& center, double delta);

Point exp_map(const NormalChart& chart, const Tangent& u);

/// Chart inverse; empty when x lies outside exp(B_radius).
std::optional<Tangent> log_map(const NormalChart& chart, const Point& x);

/// sqrt(det g) at chart coordinate u (1 on flat entries).
double volume_density(const NormalChart& chart, const Tangent& u);

/// One row per node: coordinates, then the weight.
void write_grid_csv(const QuadratureGrid& grid, std::ostream& out);

} // namespace hls
