#include "hls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hls/csv.hpp"
#include "hls/errors.hpp"

namespace hls {

namespace {

double dual_exponent(double p) { return p / (p - 1.0); }

/// Relative weighted-L2 distance ||a - b|| / ||a||.
double rel_l2(const QuadratureGrid& grid, const std::vector<double>& a,
              const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        const double d = a[i] - b[i];
        num += grid.weights[i] * d * d;
        den += grid.weights[i] * a[i] * a[i];
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

std::vector<double> pow_field(const std::vector<double>& v, double e) {
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = std::pow(v[i], e);
    return out;
}

} // namespace

SolverConfig SolverConfig::from_exponents(const Exponents& e, int max_iterations,
                                          double tolerance) {
    SolverConfig c;
    c.p = e.p;
    c.q = e.q;
    c.t = e.t;
    c.max_iterations = max_iterations;
    c.tolerance = tolerance;
    c.validate();
    return c;
}

void SolverConfig::validate() const {
    if (!(p > 1.0) || !(q > 1.0) || !(t > 1.0)) {
        throw ExponentError("solver exponents must exceed 1");
    }
    if (std::abs(t - q / (q - 1.0)) > 1e-9 * t) {
        throw ExponentError("t must equal q/(q-1)");
    }
    if (!(tolerance > 0.0)) throw UsageError("solver tolerance must be positive");
    if (max_iterations < 1) throw UsageError("max_iterations must be at least 1");
}

DensityField dual_element(const QuadratureGrid& grid, const DensityField& h, double p) {
    if (h.size() != grid.size()) throw UsageError("field length does not match grid");
    if (!(p > 1.0) || !std::isfinite(p)) throw UsageError("dual exponent must lie in (1, inf)");
    const double pp = dual_exponent(p);
    std::vector<double> f = pow_field(h.values, pp - 1.0);
    const double nrm = lp_norm(grid, f, p);
    if (nrm == 0.0 || !std::isfinite(nrm)) {
        throw DegenerateInputError("dual_element of an identically-zero density");
    }
    for (double& v : f) v /= nrm;
    return DensityField(std::move(f), p);
}

ExtremalResult alternating_maximize(const KernelMatrix& K, const QuadratureGrid& grid,
                                    const SolverConfig& config, const DensityField& initial_g) {
    config.validate();
    if (initial_g.size() != grid.size()) throw UsageError("initial field does not match grid");
    double gnorm = lp_norm(grid, initial_g, config.t);
    if (gnorm == 0.0) throw DegenerateInputError("initial field is identically zero");

    const double p = config.p, t = config.t, q = config.q;
    const double pp = dual_exponent(p); // conjugate of p; ||I_a g||_{p'} is the f-step value
    ExtremalResult res;

    DensityField g = initial_g;
    for (double& v : g.values) v /= gnorm;
    DensityField f;
    DensityField kg = apply_ialpha(K, grid, g); // I_alpha g

    double prev_value = 0.0;
    int quiet_sweeps = 0;
    for (int it = 1; it <= config.max_iterations; ++it) {
        const double value_half = lp_norm(grid, kg, pp);
        f = dual_element(grid, kg, p);

        const DensityField kf = apply_ialpha(K, grid, f); // I_alpha f
        const double value = lp_norm(grid, kf, q);        // q = conjugate of t
        g = dual_element(grid, kf, t);

        kg = apply_ialpha(K, grid, g);
        const auto [res_f, res_g] = el_residual(K, grid, f, g, value, p, t);

        res.history.push_back(value_half);
        res.history.push_back(value);
        res.stats.push_back({it, value_half, value, res_f, res_g});
        res.iterations = it;

        if (it > 1 && std::abs(value - prev_value) <= config.tolerance * std::abs(value)) {
            if (++quiet_sweeps >= 2) {
                res.converged = true;
                prev_value = value;
                break;
            }
        } else {
            quiet_sweeps = 0;
        }
        prev_value = value;
    }

    res.n_estimate = prev_value;
    res.f = std::move(f);
    res.g = std::move(g);
    res.f.exponent = p;
    res.g.exponent = t;
    res.el_residuals = el_residual(K, grid, res.f, res.g, res.n_estimate, p, t);
    return res;
}

std::pair<double, double> el_residual(const KernelMatrix& K, const QuadratureGrid& grid,
                                      const DensityField& f, const DensityField& g,
                                      double n_value, double p, double t) {
    const DensityField kg = apply_ialpha(K, grid, g);
    const DensityField kf = apply_ialpha(K, grid, f);
    std::vector<double> fp = pow_field(f.values, p - 1.0);
    std::vector<double> gt = pow_field(g.values, t - 1.0);
    for (double& v : fp) v *= n_value;
    for (double& v : gt) v *= n_value;
    return {rel_l2(grid, kg.values, fp), rel_l2(grid, kf.values, gt)};
}

ExtremalResult euclidean_baseline(int n, double alpha, double p, double ball_radius,
                                  int resolution, int max_iterations, double tolerance) {
    const Exponents e = critical_exponent(n, alpha, p);
    const ManifoldSpec ball = ManifoldSpec::ball(n, ball_radius);
    const QuadratureGrid grid = build_grid(ball, resolution);
    const RieszKernel kernel(ball, alpha);
    const KernelMatrix K = KernelMatrix::assemble(kernel, grid, std::nullopt);
    const SolverConfig config = SolverConfig::from_exponents(e, max_iterations, tolerance);
    return alternating_maximize(K, grid, config, initial_field(grid, e.t, false, 0));
}

DensityField scaling_family(const QuadratureGrid& ball_grid, const DensityField& f,
                            double lambda, double p) {
    if (!ball_grid.spec.is_ball()) throw UsageError("scaling_family expects a ball grid");
    if (!(lambda > 0.0)) throw UsageError("scaling factor must be positive");
    if (f.size() != ball_grid.size()) throw UsageError("field length does not match grid");

    const int n = ball_grid.spec.dimension();
    const double R = ball_grid.spec.radius;

    // supported nodes must stay inside after rescaling the support by lambda
    if (lambda > 1.0) {
        for (int i = 0; i < ball_grid.size(); ++i) {
            if (f.values[i] == 0.0) continue;
            double r2 = 0.0;
            for (int k = 0; k < n; ++k) r2 += ball_grid.nodes[i][k] * ball_grid.nodes[i][k];
            if (std::sqrt(r2) * lambda > R * (1.0 + 1e-12)) {
                throw DomainError("rescaled support escapes the ball");
            }
        }
    }

    const double scale = std::pow(lambda, -static_cast<double>(n) / p);
    std::vector<double> out(ball_grid.size(), 0.0);

    if (n == 1) {
        // linear interpolation over the sorted 1-D nodes
        std::vector<int> order(ball_grid.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return ball_grid.nodes[a][0] < ball_grid.nodes[b][0];
        });
        auto eval = [&](double x) -> double {
            if (x < ball_grid.nodes[order.front()][0] || x > ball_grid.nodes[order.back()][0]) {
                return 0.0;
            }
            int lo = 0, hi = static_cast<int>(order.size()) - 1;
            while (hi - lo > 1) {
                const int mid = (lo + hi) / 2;
                (ball_grid.nodes[order[mid]][0] <= x ? lo : hi) = mid;
            }
            const double x0 = ball_grid.nodes[order[lo]][0], x1 = ball_grid.nodes[order[hi]][0];
            const double y0 = f.values[order[lo]], y1 = f.values[order[hi]];
            if (x == x0) return y0;
            if (x == x1) return y1;
            return x1 == x0 ? y0 : y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        };
        for (int i = 0; i < ball_grid.size(); ++i) {
            out[i] = scale * eval(ball_grid.nodes[i][0] / lambda);
        }
        return DensityField(std::move(out), p);
    }

    auto eval_nearest = [&](const Point& x) -> double {
        double r2 = 0.0;
        for (int k = 0; k < n; ++k) r2 += x[k] * x[k];
        if (r2 > R * R * (1.0 + 1e-12)) return 0.0;
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < ball_grid.size(); ++j) {
            double d = 0.0;
            for (int k = 0; k < n; ++k) {
                const double diff = x[k] - ball_grid.nodes[j][k];
                d += diff * diff;
            }
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        return f.values[best];
    };
    for (int i = 0; i < ball_grid.size(); ++i) {
        Point x{};
        for (int k = 0; k < n; ++k) x[k] = ball_grid.nodes[i][k] / lambda;
        out[i] = scale * eval_nearest(x);
    }
    return DensityField(std::move(out), p);
}

DensityField initial_field(const QuadratureGrid& grid, double t, bool random,
                           std::uint64_t seed) {
    std::vector<double> v(grid.size(), 1.0);
    if (random) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uni(0.1, 1.1);
        for (double& x : v) x = uni(rng);
    }
    DensityField f(std::move(v), t);
    const double nrm = lp_norm(grid, f, t);
    for (double& x : f.values) x /= nrm;
    return f;
}

void write_history_csv(const ExtremalResult& result, std::ostream& out) {
    out << "iteration,value,residual_f,residual_g\n";
    for (const IterationStat& s : result.stats) {
        out << s.iteration << "," << fmt_double(s.value) << "," << fmt_double(s.residual_f)
            << "," << fmt_double(s.residual_g) << "\n";
    }
}

} // namespace hls
