#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hls/riesz.hpp"

namespace hls {

struct SolverConfig {
    double p = 0.0;
    double t = 0.0;
    double q = 0.0;
    int max_iterations = 500;
    double tolerance = 1e-10;
    std::uint64_t seed = 0;

    static SolverConfig from_exponents(const Exponents& e, int max_iterations = 500,
                                       double tolerance = 1e-10);
    void validate() const;
};

/// Per-sweep solver statistics. `value_half` is the bilinear value after the
/// f half-step, `value` after the completing g half-step.
struct IterationStat {
    int iteration = 0;
    double value_half = 0.0;
    double value = 0.0;
    double residual_f = 0.0;
    double residual_g = 0.0;
};

struct ExtremalResult {
    double n_estimate = 0.0;
    DensityField f, g;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history; // bilinear value after every half-step
    std::vector<IterationStat> stats;
    std::pair<double, double> el_residuals{0.0, 0.0};
};

/// Unit-p-norm maximizer of sum_i w_i f_i h_i: f = h^(p'-1)/||h^(p'-1)||_p.
/// The attained value is ||h||_{p'}.
DensityField dual_element(const QuadratureGrid& grid, const DensityField& h, double p);

/// Alternating sharp-Hoelder maximization of the bilinear form: the f step
/// maximizes against I_alpha(g) in L^p, the g step against I_alpha(f) in
/// L^t. Values never decrease; stops once the relative change stays below
/// tolerance on two consecutive sweeps.
ExtremalResult alternating_maximize(const KernelMatrix& K, const QuadratureGrid& grid,
                                    const SolverConfig& config, const DensityField& initial_g);

/// Relative weighted-L2 residuals of the extremal system
///   I_alpha g = N f^(p-1),   I_alpha f = N g^(t-1).
std::pair<double, double> el_residual(const KernelMatrix& K, const QuadratureGrid& grid,
                                      const DensityField& f, const DensityField& g,
                                      double n_value, double p, double t);

/// Sharp-constant proxy on the flat ball of radius `ball_radius` in R^n.
/// Ball grids scale linearly with the radius, so the estimate is invariant
/// under rescaling the domain.
ExtremalResult euclidean_baseline(int n, double alpha, double p, double ball_radius,
                                  int resolution, int max_iterations = 500,
                                  double tolerance = 1e-10);

/// Norm-preserving rescaling x -> lambda^(-n/p) f(x/lambda) sampled on the
/// same ball grid. Point evaluation interpolates linearly in 1-D and by
/// nearest node otherwise.
DensityField scaling_family(const QuadratureGrid& ball_grid, const DensityField& f,
                            double lambda, double p);

/// Constant field normalized to unit t-norm, or a seeded positive random
/// field. Default solver start.
DensityField initial_field(const QuadratureGrid& grid, double t, bool random,
                           std::uint64_t seed);

void write_history_csv(const ExtremalResult& result, std::ostream& out);

} // namespace hls
