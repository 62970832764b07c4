#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "hls/manifold.hpp"

namespace hls {

/// Riesz potential of order alpha on a catalog manifold: integration against
/// the kernel d_g(x, y)^(alpha - n), 0 < alpha < n.
struct RieszKernel {
    ManifoldSpec manifold;
    double alpha = 0.0;

    RieszKernel(const ManifoldSpec& m, double a);
    double exponent() const { return alpha - manifold.dimension(); }
};

/// Nonnegative node values with an associated Lebesgue exponent.
struct DensityField {
    std::vector<double> values;
    double exponent = 2.0;

    DensityField() = default;
    DensityField(std::vector<double> v, double exp);
    int size() const { return static_cast<int>(values.size()); }
};

enum class KernelPart { Full, Near, Far };

/// Dense discretization of the Riesz kernel on a grid. Off-diagonal entries
/// are d_g(x_i, x_j)^(alpha - n), stored symmetric to the bit; the diagonal
/// carries the cell-averaged singularity correction c_i. An optional split
/// radius partitions entries into a near part (d <= rho, diagonal included)
/// and a far part; the two reconstruct the full kernel entrywise.
class KernelMatrix {
public:
    static KernelMatrix assemble(const RieszKernel& kernel, const QuadratureGrid& grid,
                                 std::optional<double> split_radius);

    /// Symmetric positive matrix given directly (toy grids, synthetic tests).
    /// Split operations are unavailable since entries carry no distances.
    static KernelMatrix from_dense(std::vector<double> entries, std::vector<double> diag);

    int size() const { return n_; }
    double entry(int i, int j) const { return entries_[static_cast<size_t>(i) * n_ + j]; }
    double diag_correction(int i) const { return diag_[i]; }
    double kernel_exponent() const;
    std::optional<double> split_radius() const { return split_radius_; }
    bool has_geometry() const { return geometric_; }

    /// Near-part membership of entry (i, j) at radius rho. The diagonal is
    /// always near; off-diagonal entries compare d_ij <= rho through the
    /// monotone kernel value.
    bool near(int i, int j, double rho) const;

    const std::vector<double>& raw_entries() const { return entries_; }

private:
    int n_ = 0;
    bool geometric_ = false;
    double kexp_ = 0.0; // alpha - n
    std::optional<double> split_radius_;
    std::vector<double> entries_; // row-major, zero diagonal slots
    std::vector<double> diag_;    // c_i
};

/// Exponents of the critical relation 1/q = 1/p - alpha/n, with the dual
/// pairing exponent t = q/(q-1).
struct Exponents {
    double p = 0.0;
    double q = 0.0;
    double t = 0.0;
};

Exponents critical_exponent(int n, double alpha, double p);

/// (I_alpha f)_i = sum_j K_ij w_j f_j + c_i w_i f_i, restricted to the
/// requested kernel part. `rho` overrides the matrix split radius.
DensityField apply_ialpha(const KernelMatrix& K, const QuadratureGrid& grid,
                          const DensityField& f, KernelPart part = KernelPart::Full,
                          std::optional<double> rho = std::nullopt);

/// (sum_i w_i |f_i|^p)^(1/p)
double lp_norm(const QuadratureGrid& grid, const DensityField& f, double p);
double lp_norm(const QuadratureGrid& grid, const std::vector<double>& values, double p);

/// Discrete bilinear pairing sum_ij w_i f_i K_ij w_j g_j, diagonal included.
double bilinear_form(const KernelMatrix& K, const QuadratureGrid& grid,
                     const DensityField& f, const DensityField& g);

/// Worst-row near-part norm max_i (sum_{d_ij <= rho} w_j K_ij^s)^(1/s).
/// Decreases with rho; for rho at least the diameter it is the full kernel
/// row norm.
double tail_norm(const KernelMatrix& K, const QuadratureGrid& grid, double rho, double s);

/// Boundedness probe for the convolution with the radial kernel profile:
/// ||g * h||_r / (||g||_q ||h||_p), h the kernel profile itself. Exponents
/// must satisfy 1 + 1/r = 1/q + 1/p.
double young_check(const QuadratureGrid& grid, const KernelMatrix& K, const DensityField& g,
                   double p, double q, double r);

/// Debug export, one line per stored entry: row, col, value. Diagonal rows
/// carry the correction values.
void write_kernel_csv(const KernelMatrix& K, std::ostream& out);

} // namespace hls
