#include "hls/transplant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hls/csv.hpp"
#include "hls/errors.hpp"

namespace hls {

namespace {

double node_radius(const QuadratureGrid& grid, int i) {
    const int n = grid.spec.dimension();
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += grid.nodes[i][k] * grid.nodes[i][k];
    return std::sqrt(r2);
}

} // namespace

RadialProfile RadialProfile::from_field(const QuadratureGrid& ball_grid, const DensityField& f) {
    if (!ball_grid.spec.is_ball()) throw UsageError("radial profile expects a ball grid");
    if (f.size() != ball_grid.size()) throw UsageError("field length does not match grid");

    struct Bin {
        double r;
        double wsum = 0.0;
        double vsum = 0.0;
    };
    std::vector<Bin> bins;
    const double tol = 1e-9 * ball_grid.spec.radius;
    std::vector<int> order(ball_grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return node_radius(ball_grid, a) < node_radius(ball_grid, b);
    });
    for (int idx : order) {
        const double r = node_radius(ball_grid, idx);
        if (bins.empty() || r - bins.back().r > tol) bins.push_back({r});
        bins.back().wsum += ball_grid.weights[idx];
        bins.back().vsum += ball_grid.weights[idx] * f.values[idx];
    }

    RadialProfile prof;
    prof.support_ = ball_grid.spec.radius;
    for (const Bin& b : bins) {
        prof.radii_.push_back(b.r);
        prof.values_.push_back(b.vsum / b.wsum);
    }
    return prof;
}

double RadialProfile::operator()(double r) const {
    if (radii_.empty() || r >= support_) return 0.0;
    if (r <= radii_.front()) return values_.front();
    if (r >= radii_.back()) {
        // taper linearly to zero at the ball radius
        const double r0 = radii_.back(), v0 = values_.back();
        return support_ == r0 ? 0.0 : v0 * (support_ - r) / (support_ - r0);
    }
    const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
    const size_t hi = static_cast<size_t>(it - radii_.begin());
    const size_t lo = hi - 1;
    const double s = (r - radii_[lo]) / (radii_[hi] - radii_[lo]);
    return values_[lo] + s * (values_[hi] - values_[lo]);
}

DensityField truncate(const QuadratureGrid& ball_grid, const DensityField& f, double delta) {
    if (!ball_grid.spec.is_ball()) throw UsageError("truncate expects a ball grid");
    if (f.size() != ball_grid.size()) throw UsageError("field length does not match grid");
    if (!(delta > 0.0)) throw UsageError("truncation radius must be positive");
    std::vector<double> out(f.values);
    for (int i = 0; i < ball_grid.size(); ++i) {
        if (node_radius(ball_grid, i) > delta) out[i] = 0.0;
    }
    return DensityField(std::move(out), f.exponent);
}

std::array<double, 3> correction_terms(const RieszKernel& kernel, const QuadratureGrid& ball_grid,
                                       const DensityField& f_lambda, const DensityField& g_lambda,
                                       double delta, double n_proxy, double p, double t) {
    if (!ball_grid.spec.is_ball()) throw UsageError("correction_terms expects a ball grid");
    if (f_lambda.size() != ball_grid.size() || g_lambda.size() != ball_grid.size()) {
        throw UsageError("field length does not match grid");
    }
    const int n = ball_grid.spec.dimension();
    const double kexp = kernel.exponent();

    std::vector<int> outside;
    double mass_f = 0.0, mass_g = 0.0;
    for (int i = 0; i < ball_grid.size(); ++i) {
        if (node_radius(ball_grid, i) > delta) {
            outside.push_back(i);
            mass_f += ball_grid.weights[i] * std::pow(f_lambda.values[i], p);
            mass_g += ball_grid.weights[i] * std::pow(g_lambda.values[i], t);
        }
    }

    double tail_bilinear = 0.0;
    const double omega = n == 1 ? 2.0 : (n == 2 ? std::numbers::pi : 4.0 / 3.0 * std::numbers::pi);
    for (int a : outside) {
        const double wf = ball_grid.weights[a] * f_lambda.values[a];
        if (wf == 0.0) continue;
        double acc = 0.0;
        for (int b : outside) {
            if (b == a) continue;
            const double d = geodesic_distance(ball_grid.spec, ball_grid.nodes[a], ball_grid.nodes[b]);
            acc += std::pow(d, kexp) * ball_grid.weights[b] * g_lambda.values[b];
        }
        const double h = std::pow(ball_grid.weights[a] / omega, 1.0 / n);
        const double c = (n / kernel.alpha) * std::pow(h, kexp);
        acc += c * ball_grid.weights[a] * g_lambda.values[a];
        tail_bilinear += wf * acc;
    }
    return {n_proxy * mass_f, n_proxy * mass_g, tail_bilinear};
}

TransplantedPair transplant(const NormalChart& chart, const QuadratureGrid& ball_grid,
                            const DensityField& f_truncated, const DensityField& g_truncated) {
    if (!ball_grid.spec.is_ball()) throw UsageError("transplant expects a ball grid");
    if (ball_grid.spec.dimension() != chart.spec.dimension()) {
        throw UsageError("chart dimension does not match the euclidean grid");
    }
    if (f_truncated.size() != ball_grid.size() || g_truncated.size() != ball_grid.size()) {
        throw UsageError("field length does not match grid");
    }

    TransplantedPair out;
    out.grid.spec = chart.spec;
    std::vector<double> uv, vv;
    double mesh_scale = 0.0;
    for (int i = 0; i < ball_grid.size(); ++i) {
        const double r = node_radius(ball_grid, i);
        if (r > chart.radius) {
            if (f_truncated.values[i] != 0.0 || g_truncated.values[i] != 0.0) {
                throw UsageError("truncation radius exceeds the chart radius");
            }
            continue;
        }
        Tangent u{};
        for (int k = 0; k < ball_grid.spec.dimension(); ++k) u[k] = ball_grid.nodes[i][k];
        out.grid.nodes.push_back(exp_map(chart, u));
        out.grid.weights.push_back(ball_grid.weights[i] * volume_density(chart, u));
        uv.push_back(f_truncated.values[i]);
        vv.push_back(g_truncated.values[i]);
        mesh_scale = std::max(mesh_scale, ball_grid.mesh_size);
    }
    if (out.grid.nodes.empty()) {
        throw DegenerateInputError("no euclidean nodes fall inside the chart ball");
    }
    out.grid.mesh_size = mesh_scale;
    out.u = DensityField(std::move(uv), f_truncated.exponent);
    out.v = DensityField(std::move(vv), g_truncated.exponent);
    return out;
}

QuadratureGrid scale_ball_grid(const QuadratureGrid& ball_grid, double lambda) {
    if (!ball_grid.spec.is_ball()) throw UsageError("scale_ball_grid expects a ball grid");
    if (!(lambda > 0.0)) throw UsageError("scaling factor must be positive");
    const int n = ball_grid.spec.dimension();
    QuadratureGrid out;
    out.spec = ManifoldSpec::ball(n, ball_grid.spec.radius * lambda);
    out.nodes = ball_grid.nodes;
    for (Point& x : out.nodes) {
        for (int k = 0; k < n; ++k) x[k] *= lambda;
    }
    out.weights = ball_grid.weights;
    const double wscale = std::pow(lambda, n);
    for (double& w : out.weights) w *= wscale;
    out.mesh_size = ball_grid.mesh_size * lambda;
    return out;
}

double distortion_prefactor(double epsilon, int n, double alpha, double p, double t) {
    const double expo = 0.5 * n * (1.0 / p + 1.0 / t) + n - alpha;
    return std::pow(1.0 - epsilon, n) / std::pow(1.0 + epsilon, expo);
}

std::vector<TransplantReport> lower_bound_sweep(const ManifoldSpec& spec, const Point& center,
                                                double alpha, double p,
                                                const std::vector<double>& lambdas, double delta,
                                                int resolution, int max_iterations,
                                                double tolerance) {
    if (lambdas.empty()) throw UsageError("lambda sweep must be nonempty");
    for (size_t i = 1; i < lambdas.size(); ++i) {
        if (!(lambdas[i] < lambdas[i - 1])) throw UsageError("lambda values must decrease");
    }
    const int n = spec.dimension();
    const Exponents e = critical_exponent(n, alpha, p);

    const ExtremalResult base =
        euclidean_baseline(n, alpha, p, 1.0, resolution, max_iterations, tolerance);
    const QuadratureGrid base_grid = build_grid(ManifoldSpec::ball(n, 1.0), resolution);
    const NormalChart chart = build_chart(spec, center, delta);
    const double prefactor = distortion_prefactor(chart.distortion, n, alpha, e.p, e.t);
    const RieszKernel manifold_kernel(spec, alpha);

    std::vector<TransplantReport> reports;
    for (double lambda : lambdas) {
        const QuadratureGrid g_lambda = scale_ball_grid(base_grid, lambda);
        const RieszKernel flat_kernel(g_lambda.spec, alpha);

        // exact rescaled samples: node lambda*u carries lambda^(-n/p) f(u)
        std::vector<double> fv(base.f.values), gv(base.g.values);
        const double fscale = std::pow(lambda, -static_cast<double>(n) / e.p);
        const double gscale = std::pow(lambda, -static_cast<double>(n) / e.t);
        for (double& v : fv) v *= fscale;
        for (double& v : gv) v *= gscale;
        const DensityField f_l(std::move(fv), e.p);
        const DensityField g_l(std::move(gv), e.t);

        const auto [term_I, term_II, term_III] =
            correction_terms(flat_kernel, g_lambda, f_l, g_l, delta, base.n_estimate, e.p, e.t);

        const DensityField f_tr = truncate(g_lambda, f_l, delta);
        const DensityField g_tr = truncate(g_lambda, g_l, delta);
        const TransplantedPair pair = transplant(chart, g_lambda, f_tr, g_tr);

        const KernelMatrix K = KernelMatrix::assemble(manifold_kernel, pair.grid, std::nullopt);
        const double unorm = lp_norm(pair.grid, pair.u, e.p);
        const double vnorm = lp_norm(pair.grid, pair.v, e.t);
        double quotient = 0.0;
        if (unorm > 0.0 && vnorm > 0.0) {
            quotient = bilinear_form(K, pair.grid, pair.u, pair.v) / (unorm * vnorm);
        }

        TransplantReport rep;
        rep.lambda = lambda;
        rep.delta = delta;
        rep.epsilon = chart.distortion;
        rep.quotient = quotient;
        rep.n_proxy = base.n_estimate;
        rep.term_I = term_I;
        rep.term_II = term_II;
        rep.term_III = term_III;
        rep.certificate = prefactor * (base.n_estimate - term_I - term_II);
        reports.push_back(rep);
    }
    return reports;
}

DensityField chart_bubble(const NormalChart& chart, const QuadratureGrid& grid,
                          const RadialProfile& profile, double lambda, double p) {
    if (!(lambda > 0.0)) throw UsageError("bubble scale must be positive");
    const int n = chart.spec.dimension();
    const double scale = std::pow(lambda, -static_cast<double>(n) / p);
    std::vector<double> out(grid.size(), 0.0);
    for (int i = 0; i < grid.size(); ++i) {
        const auto u = log_map(chart, grid.nodes[i]);
        if (!u) continue;
        const double r = std::sqrt((*u)[0] * (*u)[0] + (*u)[1] * (*u)[1] + (*u)[2] * (*u)[2]);
        out[i] = scale * profile(r / lambda);
    }
    return DensityField(std::move(out), p);
}

void write_sweep_csv(const std::vector<TransplantReport>& reports, std::ostream& out) {
    out << "lambda,delta,epsilon,term_I,term_II,term_III,certificate,quotient\n";
    for (const TransplantReport& r : reports) {
        out << fmt_double(r.lambda) << "," << fmt_double(r.delta) << "," << fmt_double(r.epsilon)
            << "," << fmt_double(r.term_I) << "," << fmt_double(r.term_II) << ","
            << fmt_double(r.term_III) << "," << fmt_double(r.certificate) << ","
            << fmt_double(r.quotient) << "\n";
    }
}

} // namespace hls
