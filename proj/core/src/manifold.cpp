#include "hls/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hls/csv.hpp"
#include "hls/errors.hpp"
#include "hls/parallel.hpp"

namespace hls {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGoldenAngle = kPi * (3.0 - 2.23606797749978969); // pi*(3-sqrt 5)

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + " must be strictly positive");
    }
}

double wrap_diff(double a, double b, double period) {
    return std::abs(std::remainder(a - b, period));
}

void check_on_sphere(const ManifoldSpec& spec, const Point& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (std::abs(r - spec.radius) > 1e-9 * spec.radius) {
        throw DomainError("point is not on the sphere: |x| = " + fmt_double(r));
    }
}

void check_in_ball(const ManifoldSpec& spec, const Point& x) {
    double r2 = 0.0;
    for (int k = 0; k < spec.dimension(); ++k) r2 += x[k] * x[k];
    if (r2 > spec.radius * spec.radius * (1.0 + 1e-9)) {
        throw DomainError("point lies outside the ball");
    }
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double norm3(const std::array<double, 3>& a) { return std::sqrt(dot3(a, a)); }

} // namespace

ManifoldSpec ManifoldSpec::circle(double radius) {
    require_positive(radius, "circle radius");
    ManifoldSpec s;
    s.kind = ManifoldKind::Circle;
    s.radius = radius;
    return s;
}

ManifoldSpec ManifoldSpec::sphere2(double radius) {
    require_positive(radius, "sphere radius");
    ManifoldSpec s;
    s.kind = ManifoldKind::Sphere2;
    s.radius = radius;
    return s;
}

ManifoldSpec ManifoldSpec::torus1(double period) {
    require_positive(period, "torus period");
    ManifoldSpec s;
    s.kind = ManifoldKind::Torus1;
    s.periods = {period, period};
    return s;
}

ManifoldSpec ManifoldSpec::torus2(double period0, double period1) {
    require_positive(period0, "torus period");
    require_positive(period1, "torus period");
    ManifoldSpec s;
    s.kind = ManifoldKind::Torus2;
    s.periods = {period0, period1};
    return s;
}

ManifoldSpec ManifoldSpec::ball(int dim, double radius) {
    require_positive(radius, "ball radius");
    ManifoldSpec s;
    switch (dim) {
    case 1: s.kind = ManifoldKind::Ball1; break;
    case 2: s.kind = ManifoldKind::Ball2; break;
    case 3: s.kind = ManifoldKind::Ball3; break;
    default: throw ConfigError("euclidean balls exist for dimension 1, 2, 3");
    }
    s.radius = radius;
    return s;
}

int ManifoldSpec::dimension() const {
    switch (kind) {
    case ManifoldKind::Circle:
    case ManifoldKind::Torus1:
    case ManifoldKind::Ball1: return 1;
    case ManifoldKind::Sphere2:
    case ManifoldKind::Torus2:
    case ManifoldKind::Ball2: return 2;
    case ManifoldKind::Ball3: return 3;
    }
    return 0;
}

int ManifoldSpec::coord_count() const {
    return kind == ManifoldKind::Sphere2 ? 3 : dimension();
}

double ManifoldSpec::volume() const {
    switch (kind) {
    case ManifoldKind::Circle: return 2.0 * kPi * radius;
    case ManifoldKind::Sphere2: return 4.0 * kPi * radius * radius;
    case ManifoldKind::Torus1: return periods[0];
    case ManifoldKind::Torus2: return periods[0] * periods[1];
    case ManifoldKind::Ball1: return 2.0 * radius;
    case ManifoldKind::Ball2: return kPi * radius * radius;
    case ManifoldKind::Ball3: return 4.0 / 3.0 * kPi * radius * radius * radius;
    }
    return 0.0;
}

double ManifoldSpec::diameter() const {
    switch (kind) {
    case ManifoldKind::Circle:
    case ManifoldKind::Sphere2: return kPi * radius;
    case ManifoldKind::Torus1: return periods[0] / 2.0;
    case ManifoldKind::Torus2:
        return 0.5 * std::hypot(periods[0], periods[1]);
    case ManifoldKind::Ball1:
    case ManifoldKind::Ball2:
    case ManifoldKind::Ball3: return 2.0 * radius;
    }
    return 0.0;
}

double ManifoldSpec::injectivity_radius() const {
    switch (kind) {
    case ManifoldKind::Circle:
    case ManifoldKind::Sphere2: return kPi * radius;
    case ManifoldKind::Torus1: return periods[0] / 2.0;
    case ManifoldKind::Torus2: return std::min(periods[0], periods[1]) / 2.0;
    default:
        throw DomainError("euclidean balls are chart domains, not chart targets");
    }
}

bool ManifoldSpec::is_ball() const {
    return kind == ManifoldKind::Ball1 || kind == ManifoldKind::Ball2 ||
           kind == ManifoldKind::Ball3;
}

std::string ManifoldSpec::name() const {
    switch (kind) {
    case ManifoldKind::Circle: return "circle";
    case ManifoldKind::Sphere2: return "sphere2";
    case ManifoldKind::Torus1: return "torus-1";
    case ManifoldKind::Torus2: return "torus-2";
    case ManifoldKind::Ball1: return "ball-1";
    case ManifoldKind::Ball2: return "ball-2";
    case ManifoldKind::Ball3: return "ball-3";
    }
    return "?";
}

double QuadratureGrid::weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double geodesic_distance(const ManifoldSpec& spec, const Point& x, const Point& y) {
    switch (spec.kind) {
    case ManifoldKind::Circle:
        return spec.radius * wrap_diff(x[0], y[0], 2.0 * kPi);
    case ManifoldKind::Sphere2: {
        check_on_sphere(spec, x);
        check_on_sphere(spec, y);
        const double R = spec.radius;
        const std::array<double, 3> a{x[0] / R, x[1] / R, x[2] / R};
        const std::array<double, 3> b{y[0] / R, y[1] / R, y[2] / R};
        return R * std::atan2(norm3(cross(a, b)), dot3(a, b));
    }
    case ManifoldKind::Torus1:
        return wrap_diff(x[0], y[0], spec.periods[0]);
    case ManifoldKind::Torus2: {
        const double d0 = wrap_diff(x[0], y[0], spec.periods[0]);
        const double d1 = wrap_diff(x[1], y[1], spec.periods[1]);
        return std::hypot(d0, d1);
    }
    case ManifoldKind::Ball1:
        check_in_ball(spec, x);
        check_in_ball(spec, y);
        return std::abs(x[0] - y[0]);
    case ManifoldKind::Ball2:
        check_in_ball(spec, x);
        check_in_ball(spec, y);
        return std::hypot(x[0] - y[0], x[1] - y[1]);
    case ManifoldKind::Ball3:
        check_in_ball(spec, x);
        check_in_ball(spec, y);
        return std::hypot(x[0] - y[0], x[1] - y[1], x[2] - y[2]);
    }
    return 0.0;
}

namespace {

void fill_mesh_size(QuadratureGrid& grid) {
    const int n = grid.size();
    if (n < 2) {
        grid.mesh_size = 0.0;
        return;
    }
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    parallel_for(n, [&](int i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            best = std::min(best, geodesic_distance(grid.spec, grid.nodes[i], grid.nodes[j]));
        }
        nearest[i] = best;
    });
    grid.mesh_size = *std::max_element(nearest.begin(), nearest.end());
}

QuadratureGrid grid_circle(const ManifoldSpec& spec, int resolution) {
    QuadratureGrid g;
    g.spec = spec;
    const double w = 2.0 * kPi * spec.radius / resolution;
    for (int k = 0; k < resolution; ++k) {
        g.nodes.push_back({2.0 * kPi * k / resolution, 0.0, 0.0});
        g.weights.push_back(w);
    }
    return g;
}

QuadratureGrid grid_torus1(const ManifoldSpec& spec, int resolution) {
    QuadratureGrid g;
    g.spec = spec;
    const double L = spec.periods[0];
    for (int k = 0; k < resolution; ++k) {
        g.nodes.push_back({L * k / resolution, 0.0, 0.0});
        g.weights.push_back(L / resolution);
    }
    return g;
}

QuadratureGrid grid_torus2(const ManifoldSpec& spec, int resolution) {
    QuadratureGrid g;
    g.spec = spec;
    const double L0 = spec.periods[0], L1 = spec.periods[1];
    const double w = L0 * L1 / (static_cast<double>(resolution) * resolution);
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            g.nodes.push_back({L0 * i / resolution, L1 * j / resolution, 0.0});
            g.weights.push_back(w);
        }
    }
    return g;
}

// Fibonacci spiral: equal-area bands in z, golden-angle azimuth. Equal
// weights 4*pi*R^2/N make the weight sum exact.
QuadratureGrid grid_sphere2(const ManifoldSpec& spec, int resolution) {
    QuadratureGrid g;
    g.spec = spec;
    const int n = resolution;
    const double R = spec.radius;
    const double w = 4.0 * kPi * R * R / n;
    for (int k = 0; k < n; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double th = kGoldenAngle * k;
        g.nodes.push_back({R * rho * std::cos(th), R * rho * std::sin(th), R * z});
        g.weights.push_back(w);
    }
    return g;
}

QuadratureGrid grid_ball1(const ManifoldSpec& spec, int resolution) {
    QuadratureGrid g;
    g.spec = spec;
    const double R = spec.radius;
    const double w = 2.0 * R / resolution;
    for (int k = 0; k < resolution; ++k) {
        g.nodes.push_back({-R + (k + 0.5) * w, 0.0, 0.0});
        g.weights.push_back(w);
    }
    return g;
}

// Concentric rings at midpoint radii; each annulus distributes its exact
// area over round(pi*(2i+1)) nodes, so the total is pi*R^2 exactly.
QuadratureGrid grid_ball2(const ManifoldSpec& spec, int resolution) {
    QuadratureGrid g;
    g.spec = spec;
    const double R = spec.radius;
    const int rings = resolution;
    for (int i = 0; i < rings; ++i) {
        const double r = (i + 0.5) * R / rings;
        const int cnt = std::max<int>(3, static_cast<int>(std::llround(kPi * (2 * i + 1))));
        const double ring_area = kPi * R * R * (2.0 * i + 1.0) / (static_cast<double>(rings) * rings);
        const double w = ring_area / cnt;
        const double offset = kGoldenAngle * i;
        for (int j = 0; j < cnt; ++j) {
            const double th = offset + 2.0 * kPi * j / cnt;
            g.nodes.push_back({r * std::cos(th), r * std::sin(th), 0.0});
            g.weights.push_back(w);
        }
    }
    return g;
}

// Spherical shells at midpoint radii, Fibonacci directions per shell.
QuadratureGrid grid_ball3(const ManifoldSpec& spec, int resolution) {
    QuadratureGrid g;
    g.spec = spec;
    const double R = spec.radius;
    const int shells = resolution;
    for (int i = 0; i < shells; ++i) {
        const double r = (i + 0.5) * R / shells;
        const int cnt = std::max<int>(
            4, static_cast<int>(std::llround(4.0 * kPi * (i + 0.5) * (i + 0.5))));
        const double lo = static_cast<double>(i) / shells;
        const double hi = static_cast<double>(i + 1) / shells;
        const double shell_vol =
            4.0 / 3.0 * kPi * R * R * R * (hi * hi * hi - lo * lo * lo);
        const double w = shell_vol / cnt;
        const double offset = kGoldenAngle * i;
        for (int k = 0; k < cnt; ++k) {
            const double z = 1.0 - (2.0 * k + 1.0) / cnt;
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double th = kGoldenAngle * k + offset;
            g.nodes.push_back({r * rho * std::cos(th), r * rho * std::sin(th), r * z});
            g.weights.push_back(w);
        }
    }
    return g;
}

} // namespace

QuadratureGrid build_grid(const ManifoldSpec& spec, int resolution) {
    if (resolution < 2) {
        throw ConfigError("grid resolution must be at least 2");
    }
    QuadratureGrid g;
    switch (spec.kind) {
    case ManifoldKind::Circle: g = grid_circle(spec, resolution); break;
    case ManifoldKind::Sphere2: g = grid_sphere2(spec, resolution); break;
    case ManifoldKind::Torus1: g = grid_torus1(spec, resolution); break;
    case ManifoldKind::Torus2: g = grid_torus2(spec, resolution); break;
    case ManifoldKind::Ball1: g = grid_ball1(spec, resolution); break;
    case ManifoldKind::Ball2: g = grid_ball2(spec, resolution); break;
    case ManifoldKind::Ball3: g = grid_ball3(spec, resolution); break;
    }
    fill_mesh_size(g);
    return g;
}

double metric_distortion(const ManifoldSpec& spec, const Point& center, double delta) {
    if (!(delta > 0.0)) throw DomainError("chart radius must be positive");
    const double inj = spec.injectivity_radius();
    if (!(delta < inj)) {
        throw DomainError("chart radius " + fmt_double(delta) +
                          " is not below the injectivity radius " + fmt_double(inj));
    }
    switch (spec.kind) {
    case ManifoldKind::Sphere2:
        check_on_sphere(spec, center);
        return 1.0 - sinc(delta / spec.radius);
    case ManifoldKind::Circle:
        // wraparound kicks in once tangent pairs can be more than half the
        // circumference apart: 2*delta > pi*R
        return std::max(0.0, 2.0 - kPi * spec.radius / delta);
    case ManifoldKind::Torus1:
        return std::max(0.0, 2.0 - 0.5 * spec.periods[0] / delta);
    case ManifoldKind::Torus2:
        return std::max(0.0, 2.0 - 0.5 * std::min(spec.periods[0], spec.periods[1]) / delta);
    default:
        throw DomainError("no charts on euclidean balls");
    }
}

NormalChart build_chart(const ManifoldSpec& spec, const Point& center, double delta) {
    NormalChart chart;
    chart.spec = spec;
    chart.center = center;
    chart.radius = delta;
    chart.distortion = metric_distortion(spec, center, delta);
    if (spec.kind == ManifoldKind::Sphere2) {
        const double R = spec.radius;
        const std::array<double, 3> nrm{center[0] / R, center[1] / R, center[2] / R};
        // axis least aligned with the normal seeds a deterministic frame
        int k = 0;
        for (int a = 1; a < 3; ++a) {
            if (std::abs(nrm[a]) < std::abs(nrm[k])) k = a;
        }
        std::array<double, 3> e{0.0, 0.0, 0.0};
        e[k] = 1.0;
        const double proj = dot3(e, nrm);
        std::array<double, 3> e1{e[0] - proj * nrm[0], e[1] - proj * nrm[1], e[2] - proj * nrm[2]};
        const double len = norm3(e1);
        for (auto& c : e1) c /= len;
        chart.e1 = e1;
        chart.e2 = cross(nrm, e1);
    }
    return chart;
}

Point exp_map(const NormalChart& chart, const Tangent& u) {
    const ManifoldSpec& spec = chart.spec;
    const int dim = spec.dimension();
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) r2 += u[k] * u[k];
    const double r = std::sqrt(r2);
    if (r > chart.radius * (1.0 + 1e-12)) {
        throw DomainError("tangent vector leaves the chart ball");
    }
    switch (spec.kind) {
    case ManifoldKind::Circle: {
        const double th = std::remainder(chart.center[0] + u[0] / spec.radius, 2.0 * kPi);
        return {th < 0.0 ? th + 2.0 * kPi : th, 0.0, 0.0};
    }
    case ManifoldKind::Torus1: {
        double v = std::fmod(chart.center[0] + u[0], spec.periods[0]);
        if (v < 0.0) v += spec.periods[0];
        return {v, 0.0, 0.0};
    }
    case ManifoldKind::Torus2: {
        Point p{0.0, 0.0, 0.0};
        for (int k = 0; k < 2; ++k) {
            double v = std::fmod(chart.center[k] + u[k], spec.periods[k]);
            if (v < 0.0) v += spec.periods[k];
            p[k] = v;
        }
        return p;
    }
    case ManifoldKind::Sphere2: {
        const double R = spec.radius;
        if (r == 0.0) return chart.center;
        const double c = std::cos(r / R), s = std::sin(r / R);
        const double d1 = u[0] / r, d2 = u[1] / r;
        Point p;
        for (int k = 0; k < 3; ++k) {
            p[k] = c * chart.center[k] + s * R * (d1 * chart.e1[k] + d2 * chart.e2[k]);
        }
        return p;
    }
    default:
        throw DomainError("no charts on euclidean balls");
    }
}

std::optional<Tangent> log_map(const NormalChart& chart, const Point& x) {
    const ManifoldSpec& spec = chart.spec;
    switch (spec.kind) {
    case ManifoldKind::Circle: {
        const double d = std::remainder(x[0] - chart.center[0], 2.0 * kPi) * spec.radius;
        if (std::abs(d) > chart.radius) return std::nullopt;
        return Tangent{d, 0.0, 0.0};
    }
    case ManifoldKind::Torus1: {
        const double d = std::remainder(x[0] - chart.center[0], spec.periods[0]);
        if (std::abs(d) > chart.radius) return std::nullopt;
        return Tangent{d, 0.0, 0.0};
    }
    case ManifoldKind::Torus2: {
        Tangent u{0.0, 0.0, 0.0};
        double r2 = 0.0;
        for (int k = 0; k < 2; ++k) {
            u[k] = std::remainder(x[k] - chart.center[k], spec.periods[k]);
            r2 += u[k] * u[k];
        }
        if (r2 > chart.radius * chart.radius) return std::nullopt;
        return u;
    }
    case ManifoldKind::Sphere2: {
        const double R = spec.radius;
        check_on_sphere(spec, x);
        const double d = geodesic_distance(spec, chart.center, x);
        if (d > chart.radius) return std::nullopt;
        if (d == 0.0) return Tangent{0.0, 0.0, 0.0};
        // project out the center direction, rescale to geodesic length
        const double cosd = std::cos(d / R);
        std::array<double, 3> tang;
        for (int k = 0; k < 3; ++k) tang[k] = x[k] - cosd * chart.center[k];
        const double len = norm3(tang);
        if (len == 0.0) return Tangent{0.0, 0.0, 0.0};
        return Tangent{d * dot3(tang, chart.e1) / len, d * dot3(tang, chart.e2) / len, 0.0};
    }
    default:
        throw DomainError("no charts on euclidean balls");
    }
}

double volume_density(const NormalChart& chart, const Tangent& u) {
    if (chart.spec.kind != ManifoldKind::Sphere2) return 1.0;
    const double r = std::hypot(u[0], u[1]);
    return sinc(r / chart.spec.radius);
}

void write_grid_csv(const QuadratureGrid& grid, std::ostream& out) {
    const int nc = grid.spec.coord_count();
    for (int c = 0; c < nc; ++c) out << "x" << c << ",";
    out << "weight\n";
    for (int i = 0; i < grid.size(); ++i) {
        for (int c = 0; c < nc; ++c) out << fmt_double(grid.nodes[i][c]) << ",";
        out << fmt_double(grid.weights[i]) << "\n";
    }
}

} // namespace hls
