#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hls/transplant.hpp"

namespace hls {

/// Nonnegative node masses of a discrete measure on a grid.
struct DiscreteMeasure {
    std::shared_ptr<const QuadratureGrid> grid;
    std::vector<double> values;
    double total = 0.0;
};

/// mu = w_i |f_i|^p and nu = w_i |I_alpha f|_i^q, the measure pair tracked
/// along maximizing sequences.
struct MeasurePair {
    DiscreteMeasure mu, nu;
};

/// A detected concentration point with its localized masses. `slack` is
/// filled by check_atom_inequality.
struct AtomReport {
    Point location{};
    int node_index = -1;
    double mu_mass = 0.0;
    double nu_mass = 0.0;
    double slack = 0.0;
};

/// Polynomial bump (1 - (r/scale)^2)^2 centered at a manifold point:
/// value 1 at the center, support radius `scale`.
struct CutoffFamily {
    ManifoldSpec spec;
    Point center{};
    double scale = 0.0;

    CutoffFamily(const ManifoldSpec& s, const Point& c, double sc);
    double value_at(const Point& x) const;
    std::vector<double> sample(const QuadratureGrid& grid) const;
};

MeasurePair build_measures(std::shared_ptr<const QuadratureGrid> grid, const KernelMatrix& K,
                           const DensityField& f, double p, double q);

/// Mass within geodesic distance r of P; nondecreasing in r.
double local_mass(const DiscreteMeasure& measure, const Point& center, double r);

/// Scans the last measure pair of a family for nodes whose localized mass at
/// the smallest schedule radius exceeds theta. Detected atoms are separated
/// by at least twice that radius.
std::vector<AtomReport> detect_atoms(const std::vector<MeasurePair>& sequence,
                                     const std::vector<double>& radius_schedule, double theta);

/// slack = n_proxy * mu^(1/p) - nu^(1/q); negative means the localized pair
/// violates the atom inequality at this resolution.
double check_atom_inequality(AtomReport& report, double n_proxy, double p, double q);

/// integral of |I f_m|^q - |I(f_m - f)|^q - |I f|^q over the grid.
double brezis_lieb_defect(const KernelMatrix& K, const QuadratureGrid& grid,
                          const DensityField& f_m, const DensityField& f, double q);

/// q-norm of phi * (I_alpha f) - I_alpha(phi * f).
double commutator_norm(const KernelMatrix& K, const QuadratureGrid& grid,
                       const std::vector<double>& phi, const DensityField& f, double q);
double commutator_norm(const KernelMatrix& K, const QuadratureGrid& grid,
                       const CutoffFamily& cutoff, const DensityField& f, double q);

/// Far/near decomposition table over a rho schedule: far-part image
/// differences per sequence member, near-part row bounds, and the fitted
/// log-log slope of the near bound against rho.
struct SplitTable {
    std::vector<double> rhos;
    std::vector<std::vector<double>> far_diffs; // [rho][member]
    std::vector<double> near_bounds;            // [rho]
    double slope = 0.0;
    double expected_slope = 0.0; // (alpha - n) + n/s
    double s = 0.0;
};

SplitTable compactness_split_check(const KernelMatrix& K, const QuadratureGrid& grid,
                                   const std::vector<DensityField>& sequence,
                                   const DensityField& f, const std::vector<double>& rhos,
                                   double r, double p);

/// Value of the splitting chain
///   N_manifold^q * a0^(q/p) + sum_j n_proxy^q * mu_j^(q/p),
/// a0 the p-mass of the weak limit. Strictly below N_manifold^q whenever
/// a0 + sum mu_j = 1, some mu_j > 0, and n_proxy < N_manifold.
double contradiction_chain_value(double n_manifold, double n_proxy, double q, double p,
                                 double f_mass, std::span<const double> atom_masses);

void write_split_csv(const SplitTable& table, std::ostream& out);
void write_atoms_text(const std::vector<AtomReport>& atoms, std::ostream& out);

} // namespace hls
