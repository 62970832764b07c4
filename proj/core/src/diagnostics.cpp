#include "hls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hls/csv.hpp"
#include "hls/errors.hpp"

namespace hls {

CutoffFamily::CutoffFamily(const ManifoldSpec& s, const Point& c, double sc)
    : spec(s), center(c), scale(sc) {
    if (!(scale > 0.0)) throw UsageError("cutoff scale must be positive");
}

double CutoffFamily::value_at(const Point& x) const {
    const double s = geodesic_distance(spec, center, x) / scale;
    if (s >= 1.0) return 0.0;
    const double b = 1.0 - s * s;
    return b * b;
}

std::vector<double> CutoffFamily::sample(const QuadratureGrid& grid) const {
    if (!(grid.spec == spec)) throw UsageError("cutoff and grid manifolds differ");
    std::vector<double> out(grid.size());
    for (int i = 0; i < grid.size(); ++i) out[i] = value_at(grid.nodes[i]);
    return out;
}

MeasurePair build_measures(std::shared_ptr<const QuadratureGrid> grid, const KernelMatrix& K,
                           const DensityField& f, double p, double q) {
    if (!grid) throw UsageError("build_measures requires a grid");
    if (!(p > 1.0) || !(q > 1.0)) throw ExponentError("measure exponents must exceed 1");
    const DensityField kf = apply_ialpha(K, *grid, f);

    MeasurePair mp;
    mp.mu.grid = grid;
    mp.nu.grid = grid;
    mp.mu.values.resize(grid->size());
    mp.nu.values.resize(grid->size());
    for (int i = 0; i < grid->size(); ++i) {
        mp.mu.values[i] = grid->weights[i] * std::pow(std::abs(f.values[i]), p);
        mp.nu.values[i] = grid->weights[i] * std::pow(std::abs(kf.values[i]), q);
    }
    mp.mu.total = std::accumulate(mp.mu.values.begin(), mp.mu.values.end(), 0.0);
    mp.nu.total = std::accumulate(mp.nu.values.begin(), mp.nu.values.end(), 0.0);
    return mp;
}

double local_mass(const DiscreteMeasure& measure, const Point& center, double r) {
    if (!measure.grid) throw UsageError("measure carries no grid");
    if (!(r > 0.0)) throw UsageError("local mass radius must be positive");
    const QuadratureGrid& grid = *measure.grid;
    double acc = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        if (geodesic_distance(grid.spec, center, grid.nodes[i]) <= r) {
            acc += measure.values[i];
        }
    }
    return acc;
}

std::vector<AtomReport> detect_atoms(const std::vector<MeasurePair>& sequence,
                                     const std::vector<double>& radius_schedule, double theta) {
    if (sequence.empty()) throw UsageError("empty measure sequence");
    if (radius_schedule.empty()) throw UsageError("empty radius schedule");
    for (size_t i = 1; i < radius_schedule.size(); ++i) {
        if (!(radius_schedule[i] < radius_schedule[i - 1])) {
            throw UsageError("radius schedule must decrease");
        }
    }
    if (!(theta > 0.0) || !(theta < 1.0)) throw UsageError("theta must lie in (0, 1)");
    const ManifoldSpec& spec = sequence.front().mu.grid->spec;
    for (const MeasurePair& mp : sequence) {
        if (!(mp.mu.grid->spec == spec)) {
            throw UsageError("measure sequence mixes different manifolds");
        }
    }

    const MeasurePair& last = sequence.back();
    const QuadratureGrid& grid = *last.mu.grid;
    const double r_min = radius_schedule.back();

    std::vector<double> mass(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        mass[i] = local_mass(last.mu, grid.nodes[i], r_min);
    }
    std::vector<int> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return mass[a] > mass[b]; });

    std::vector<AtomReport> atoms;
    for (int idx : order) {
        if (mass[idx] <= theta) break;
        bool separated = true;
        for (const AtomReport& a : atoms) {
            if (geodesic_distance(spec, grid.nodes[idx], a.location) < 2.0 * r_min) {
                separated = false;
                break;
            }
        }
        if (!separated) continue;
        AtomReport rep;
        rep.location = grid.nodes[idx];
        rep.node_index = idx;
        rep.mu_mass = mass[idx];
        rep.nu_mass = local_mass(last.nu, grid.nodes[idx], r_min);
        atoms.push_back(rep);
    }
    return atoms;
}

double check_atom_inequality(AtomReport& report, double n_proxy, double p, double q) {
    if (!(n_proxy > 0.0)) throw UsageError("proxy constant must be positive");
    const double lhs = n_proxy * std::pow(report.mu_mass, 1.0 / p);
    const double rhs = std::pow(report.nu_mass, 1.0 / q);
    report.slack = lhs - rhs;
    return report.slack;
}

double brezis_lieb_defect(const KernelMatrix& K, const QuadratureGrid& grid,
                          const DensityField& f_m, const DensityField& f, double q) {
    const DensityField km = apply_ialpha(K, grid, f_m);
    const DensityField kf = apply_ialpha(K, grid, f);
    double acc = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        const double a = std::abs(km.values[i]);
        const double d = std::abs(km.values[i] - kf.values[i]);
        const double b = std::abs(kf.values[i]);
        acc += grid.weights[i] * (std::pow(a, q) - std::pow(d, q) - std::pow(b, q));
    }
    return acc;
}

double commutator_norm(const KernelMatrix& K, const QuadratureGrid& grid,
                       const std::vector<double>& phi, const DensityField& f, double q) {
    if (static_cast<int>(phi.size()) != grid.size()) {
        throw UsageError("cutoff samples do not match grid");
    }
    const DensityField kf = apply_ialpha(K, grid, f);
    std::vector<double> pf(f.values);
    for (int i = 0; i < grid.size(); ++i) pf[i] *= phi[i];
    const DensityField kpf = apply_ialpha(K, grid, DensityField(std::move(pf), f.exponent));
    std::vector<double> com(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        com[i] = phi[i] * kf.values[i] - kpf.values[i];
    }
    return lp_norm(grid, com, q);
}

double commutator_norm(const KernelMatrix& K, const QuadratureGrid& grid,
                       const CutoffFamily& cutoff, const DensityField& f, double q) {
    return commutator_norm(K, grid, cutoff.sample(grid), f, q);
}

SplitTable compactness_split_check(const KernelMatrix& K, const QuadratureGrid& grid,
                                   const std::vector<DensityField>& sequence,
                                   const DensityField& f, const std::vector<double>& rhos,
                                   double r, double p) {
    if (sequence.empty()) throw UsageError("empty surrogate sequence");
    if (rhos.empty()) throw UsageError("empty rho schedule");
    const int n = grid.spec.dimension();
    const double alpha = K.kernel_exponent() + n;
    const Exponents e = critical_exponent(n, alpha, p);
    if (!(r >= 1.0) || !(r < e.q)) {
        throw ExponentError("split norm exponent must satisfy 1 <= r < q");
    }
    const double s = 1.0 / (1.0 / r + 1.0 - 1.0 / p);
    if (!(s >= 1.0) || !(s < n / (n - alpha))) {
        throw ExponentError("derived tail exponent s falls outside [1, n/(n-alpha))");
    }

    SplitTable table;
    table.rhos = rhos;
    table.s = s;
    table.expected_slope = (alpha - n) + n / s;

    const DensityField kf_ref = apply_ialpha(K, grid, f);
    for (double rho : rhos) {
        const DensityField far_ref = apply_ialpha(K, grid, f, KernelPart::Far, rho);
        std::vector<double> diffs;
        for (const DensityField& fm : sequence) {
            const DensityField far_m = apply_ialpha(K, grid, fm, KernelPart::Far, rho);
            std::vector<double> d(grid.size());
            for (int i = 0; i < grid.size(); ++i) d[i] = far_m.values[i] - far_ref.values[i];
            diffs.push_back(lp_norm(grid, d, r));
        }
        table.far_diffs.push_back(std::move(diffs));
        table.near_bounds.push_back(tail_norm(K, grid, rho, s));
    }

    // least-squares slope of log(near bound) against log(rho)
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const int m = static_cast<int>(rhos.size());
    for (int i = 0; i < m; ++i) {
        const double x = std::log(rhos[i]);
        const double y = std::log(table.near_bounds[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    table.slope = m < 2 ? 0.0 : (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return table;
}

double contradiction_chain_value(double n_manifold, double n_proxy, double q, double p,
                                 double f_mass, std::span<const double> atom_masses) {
    double acc = std::pow(n_manifold, q) * std::pow(f_mass, q / p);
    for (double mu : atom_masses) {
        acc += std::pow(n_proxy, q) * std::pow(mu, q / p);
    }
    return acc;
}

void write_split_csv(const SplitTable& table, std::ostream& out) {
    out << "rho,member,far_diff,near_bound\n";
    for (size_t i = 0; i < table.rhos.size(); ++i) {
        for (size_t m = 0; m < table.far_diffs[i].size(); ++m) {
            out << fmt_double(table.rhos[i]) << "," << m << ","
                << fmt_double(table.far_diffs[i][m]) << "," << fmt_double(table.near_bounds[i])
                << "\n";
        }
    }
}

void write_atoms_text(const std::vector<AtomReport>& atoms, std::ostream& out) {
    if (atoms.empty()) {
        out << "no atoms detected\n";
        return;
    }
    for (size_t j = 0; j < atoms.size(); ++j) {
        const AtomReport& a = atoms[j];
        out << "atom " << j + 1 << ": node " << a.node_index << " at (" << fmt_double(a.location[0])
            << ", " << fmt_double(a.location[1]) << ", " << fmt_double(a.location[2]) << ")"
            << " mu=" << fmt_double(a.mu_mass) << " nu=" << fmt_double(a.nu_mass)
            << " slack=" << fmt_double(a.slack) << "\n";
    }
}

} // namespace hls
