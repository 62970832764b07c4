#pragma once

#include <array>
#include <vector>

#include "hls/solver.hpp"

namespace hls {

/// One sweep point of the transplantation lower bound: a scaled Euclidean
/// extremal pair truncated to the tangent ball of radius delta, pushed onto
/// the manifold through a normal chart.
struct TransplantReport {
    double lambda = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    double quotient = 0.0; // manifold bilinear quotient of the pushed pair
    double n_proxy = 0.0;  // Euclidean sharp-constant proxy
    double term_I = 0.0;   // proxy-weighted p-mass of f outside the ball
    double term_II = 0.0;  // proxy-weighted t-mass of g outside the ball
    double term_III = 0.0; // bilinear form over both tails
    double certificate = 0.0;
};

/// Pushed pair: quadrature over exp(B_delta) with metric-volume weights,
/// plus the transplanted densities.
struct TransplantedPair {
    QuadratureGrid grid;
    DensityField u, v;
};

/// Piecewise-linear radial profile of a field on a ball grid; ring values
/// are weight-averaged. Evaluates to zero beyond the ball radius.
class RadialProfile {
public:
    RadialProfile() = default;
    static RadialProfile from_field(const QuadratureGrid& ball_grid, const DensityField& f);

    double operator()(double r) const;
    double support_radius() const { return support_; }

private:
    std::vector<double> radii_, values_;
    double support_ = 0.0;
};

/// Zero outside the centered ball of radius delta, unchanged inside.
DensityField truncate(const QuadratureGrid& ball_grid, const DensityField& f, double delta);

/// Correction terms of the truncated bilinear expansion:
///   I   = n_proxy * (p-mass of f outside B_delta)
///   II  = n_proxy * (t-mass of g outside B_delta)
///   III = bilinear form restricted to both tails.
std::array<double, 3> correction_terms(const RieszKernel& kernel, const QuadratureGrid& ball_grid,
                                       const DensityField& f_lambda, const DensityField& g_lambda,
                                       double delta, double n_proxy, double p, double t);

/// Pushes a truncated pair through the chart: nodes exp(u_k) for |u_k| inside
/// the chart ball, weights scaled by sqrt(det g).
TransplantedPair transplant(const NormalChart& chart, const QuadratureGrid& ball_grid,
                            const DensityField& f_truncated, const DensityField& g_truncated);

/// Full sweep over decreasing lambda at fixed chart radius. Each report's
/// certificate is the distortion prefactor times (n_proxy - I - II).
std::vector<TransplantReport> lower_bound_sweep(const ManifoldSpec& spec, const Point& center,
                                                double alpha, double p,
                                                const std::vector<double>& lambdas, double delta,
                                                int resolution, int max_iterations = 500,
                                                double tolerance = 1e-10);

/// Ball grid scaled by lambda: nodes lambda*u, weights lambda^n * w. Exact
/// sampling of the rescaled extremal pair lives on this grid.
QuadratureGrid scale_ball_grid(const QuadratureGrid& ball_grid, double lambda);

/// (1-eps)^n / (1+eps)^(n/2*(1/p+1/t)+n-alpha)
double distortion_prefactor(double epsilon, int n, double alpha, double p, double t);

/// Concentrating bubble on a manifold grid: lambda^(-n/p) * profile(|u|/lambda)
/// in chart coordinates u, zero outside the chart. Not normalized.
DensityField chart_bubble(const NormalChart& chart, const QuadratureGrid& grid,
                          const RadialProfile& profile, double lambda, double p);

void write_sweep_csv(const std::vector<TransplantReport>& reports, std::ostream& out);

} // namespace hls
