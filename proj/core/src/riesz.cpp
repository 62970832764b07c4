#include "hls/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hls/csv.hpp"
#include "hls/errors.hpp"
#include "hls/parallel.hpp"

namespace hls {

namespace {

double unit_ball_volume(int n) {
    switch (n) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 / 3.0 * std::numbers::pi;
    default: throw ConfigError("unsupported dimension");
    }
}

void check_field(const QuadratureGrid& grid, const DensityField& f) {
    if (f.size() != grid.size()) {
        throw UsageError("field length does not match grid node count");
    }
}

} // namespace

RieszKernel::RieszKernel(const ManifoldSpec& m, double a) : manifold(m), alpha(a) {
    const int n = m.dimension();
    if (!(alpha > 0.0) || !(alpha < n)) {
        throw ConfigError("alpha must lie strictly in (0, n); got alpha = " + fmt_double(alpha) +
                          ", n = " + std::to_string(n));
    }
}

DensityField::DensityField(std::vector<double> v, double exp)
    : values(std::move(v)), exponent(exp) {
    if (!(exponent > 1.0)) {
        throw UsageError("density exponent must exceed 1");
    }
    for (double x : values) {
        if (!(x >= 0.0)) throw UsageError("density values must be nonnegative");
    }
}

KernelMatrix KernelMatrix::assemble(const RieszKernel& kernel, const QuadratureGrid& grid,
                                    std::optional<double> split_radius) {
    if (!(grid.spec == kernel.manifold)) {
        throw UsageError("grid and kernel live on different manifolds");
    }
    if (split_radius) {
        if (!(*split_radius > 0.0) || !(*split_radius < grid.spec.diameter())) {
            throw ConfigError("split radius must lie in (0, diameter)");
        }
    }
    const int n = grid.size();
    const int dim = grid.spec.dimension();
    const double kexp = kernel.exponent();

    KernelMatrix K;
    K.n_ = n;
    K.geometric_ = true;
    K.kexp_ = kexp;
    K.split_radius_ = split_radius;
    K.entries_.assign(static_cast<size_t>(n) * n, 0.0);
    K.diag_.resize(n);

    // upper triangle once, mirrored: symmetry exact to the bit
    parallel_for(n, [&](int i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = geodesic_distance(grid.spec, grid.nodes[i], grid.nodes[j]);
            const double v = std::pow(d, kexp);
            K.entries_[static_cast<size_t>(i) * n + j] = v;
            K.entries_[static_cast<size_t>(j) * n + i] = v;
        }
    });

    // cell-averaged kernel over a geodesic disk of the cell's effective
    // radius h_i = (w_i/omega_n)^{1/n}: c_i = (n/alpha) h_i^{alpha-n}
    const double omega = unit_ball_volume(dim);
    for (int i = 0; i < n; ++i) {
        const double h = std::pow(grid.weights[i] / omega, 1.0 / dim);
        K.diag_[i] = (dim / kernel.alpha) * std::pow(h, kexp);
    }
    return K;
}

KernelMatrix KernelMatrix::from_dense(std::vector<double> entries, std::vector<double> diag) {
    const int n = static_cast<int>(diag.size());
    if (entries.size() != static_cast<size_t>(n) * n) {
        throw UsageError("entry matrix must be n x n");
    }
    for (int i = 0; i < n; ++i) {
        entries[static_cast<size_t>(i) * n + i] = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double v = entries[static_cast<size_t>(i) * n + j];
            if (v != entries[static_cast<size_t>(j) * n + i]) {
                throw UsageError("kernel entries must be symmetric");
            }
            if (!(v > 0.0)) throw UsageError("kernel entries must be positive");
        }
    }
    KernelMatrix K;
    K.n_ = n;
    K.geometric_ = false;
    K.entries_ = std::move(entries);
    K.diag_ = std::move(diag);
    return K;
}

double KernelMatrix::kernel_exponent() const {
    if (!geometric_) throw UsageError("synthetic kernel has no distance exponent");
    return kexp_;
}

bool KernelMatrix::near(int i, int j, double rho) const {
    if (i == j) return true;
    if (!geometric_) throw UsageError("synthetic kernel has no near/far split");
    // d_ij <= rho  <=>  d^kexp >= rho^kexp  (kexp < 0)
    return entry(i, j) >= std::pow(rho, kexp_);
}

Exponents critical_exponent(int n, double alpha, double p) {
    if (!(alpha > 0.0) || !(alpha < n)) {
        throw ExponentError("alpha must lie in (0, n)");
    }
    if (!(p > 1.0) || !(p < n / alpha)) {
        throw ExponentError("p must satisfy 1 < p < n/alpha = " + fmt_double(n / alpha) +
                            "; got p = " + fmt_double(p));
    }
    Exponents e;
    e.p = p;
    e.q = 1.0 / (1.0 / p - alpha / n);
    e.t = e.q / (e.q - 1.0);
    return e;
}

DensityField apply_ialpha(const KernelMatrix& K, const QuadratureGrid& grid,
                          const DensityField& f, KernelPart part, std::optional<double> rho) {
    check_field(grid, f);
    if (K.size() != grid.size()) {
        throw UsageError("kernel size does not match grid node count");
    }
    const int n = K.size();
    const double* entries = K.raw_entries().data();
    const double* w = grid.weights.data();
    const double* fv = f.values.data();

    std::vector<double> out(n, 0.0);
    if (part == KernelPart::Full) {
        parallel_for(n, [&](int i) {
            const double* row = entries + static_cast<size_t>(i) * n;
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += row[j] * w[j] * fv[j];
            out[i] = acc + K.diag_correction(i) * w[i] * fv[i];
        });
    } else {
        const double radius = rho ? *rho
                                  : (K.split_radius()
                                         ? *K.split_radius()
                                         : throw UsageError("kernel has no split radius"));
        if (!(radius > 0.0)) throw UsageError("split radius must be positive");
        const double thr = std::pow(radius, K.kernel_exponent());
        const bool want_near = part == KernelPart::Near;
        parallel_for(n, [&](int i) {
            const double* row = entries + static_cast<size_t>(i) * n;
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const bool is_near = row[j] >= thr;
                if (is_near == want_near) acc += row[j] * w[j] * fv[j];
            }
            if (want_near) acc += K.diag_correction(i) * w[i] * fv[i];
            out[i] = acc;
        });
    }
    return DensityField(std::move(out), f.exponent);
}

double lp_norm(const QuadratureGrid& grid, const std::vector<double>& values, double p) {
    if (static_cast<int>(values.size()) != grid.size()) {
        throw UsageError("field length does not match grid node count");
    }
    if (!(p >= 1.0)) throw UsageError("lp_norm requires p >= 1");
    double acc = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        acc += grid.weights[i] * std::pow(std::abs(values[i]), p);
    }
    return std::pow(acc, 1.0 / p);
}

double lp_norm(const QuadratureGrid& grid, const DensityField& f, double p) {
    return lp_norm(grid, f.values, p);
}

double bilinear_form(const KernelMatrix& K, const QuadratureGrid& grid,
                     const DensityField& f, const DensityField& g) {
    check_field(grid, f);
    const DensityField kg = apply_ialpha(K, grid, g);
    double acc = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        acc += grid.weights[i] * f.values[i] * kg.values[i];
    }
    return acc;
}

double tail_norm(const KernelMatrix& K, const QuadratureGrid& grid, double rho, double s) {
    if (K.size() != grid.size()) {
        throw UsageError("kernel size does not match grid node count");
    }
    const int dim = grid.spec.dimension();
    const double alpha = K.kernel_exponent() + dim;
    if (!(s >= 1.0) || !(s < dim / (dim - alpha))) {
        throw ExponentError("tail exponent must satisfy 1 <= s < n/(n-alpha)");
    }
    if (!(rho > 0.0)) throw UsageError("tail radius must be positive");

    const int n = K.size();
    const double thr = std::pow(rho, K.kernel_exponent());
    std::vector<double> rows(n, 0.0);
    parallel_for(n, [&](int i) {
        double acc = grid.weights[i] * std::pow(K.diag_correction(i), s);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double v = K.entry(i, j);
            if (v >= thr) acc += grid.weights[j] * std::pow(v, s);
        }
        rows[i] = acc;
    });
    return std::pow(*std::max_element(rows.begin(), rows.end()), 1.0 / s);
}

double young_check(const QuadratureGrid& grid, const KernelMatrix& K, const DensityField& g,
                   double p, double q, double r) {
    for (double e : {p, q, r}) {
        if (!(e > 1.0) || !std::isfinite(e)) {
            throw UsageError("young exponents must lie in (1, inf)");
        }
    }
    if (std::abs(1.0 + 1.0 / r - 1.0 / q - 1.0 / p) > 1e-12) {
        throw UsageError("young exponents must satisfy 1 + 1/r = 1/q + 1/p");
    }
    const double gq = lp_norm(grid, g, q);
    if (gq == 0.0) return 0.0;
    const DensityField conv = apply_ialpha(K, grid, g);
    const double hp = tail_norm(K, grid, grid.spec.diameter() * 2.0, p);
    return lp_norm(grid, conv, r) / (gq * hp);
}

void write_kernel_csv(const KernelMatrix& K, std::ostream& out) {
    out << "row,col,value\n";
    const int n = K.size();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = i == j ? K.diag_correction(i) : K.entry(i, j);
            out << i << "," << j << "," << fmt_double(v) << "\n";
        }
    }
}

} // namespace hls
