#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hls/errors.hpp"
#include "hls/riesz.hpp"
#include "test_util.hpp"

using namespace hls;

namespace {

constexpr double kPi = std::numbers::pi;

// Trigonometric field with seeded coefficients: the same function can be
// sampled on any torus-1 grid, which makes refinement comparisons meaningful.
DensityField smooth_torus_field(const QuadratureGrid& grid, std::uint64_t seed, double exponent) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-0.3, 0.3);
    double a[4], b[4];
    for (int k = 0; k < 4; ++k) {
        a[k] = uni(rng);
        b[k] = uni(rng);
    }
    std::vector<double> v(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const double x = grid.nodes[i][0] / grid.spec.periods[0];
        double s = 1.3;
        for (int k = 0; k < 4; ++k) {
            s += a[k] * std::cos(2.0 * kPi * (k + 1) * x) + b[k] * std::sin(2.0 * kPi * (k + 1) * x);
        }
        v[i] = std::abs(s);
    }
    return DensityField(std::move(v), exponent);
}

} // namespace

TEST_CASE("kernel entries: antipodal sphere nodes give 1/pi") {
    const auto spec = ManifoldSpec::sphere2(1.0);
    QuadratureGrid grid;
    grid.spec = spec;
    grid.nodes = {{0, 0, 1}, {0, 0, -1}};
    grid.weights = {2.0 * kPi, 2.0 * kPi};
    grid.mesh_size = kPi;
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 1.0), grid, std::nullopt);
    CHECK(K.entry(0, 1) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
    CHECK(K.entry(1, 0) == K.entry(0, 1));
}

TEST_CASE("kernel entries: torus wraparound distance") {
    const auto spec = ManifoldSpec::torus1(1.0);
    QuadratureGrid grid;
    grid.spec = spec;
    grid.nodes = {{0.1, 0, 0}, {0.9, 0, 0}};
    grid.weights = {0.5, 0.5};
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 0.5), grid, std::nullopt);
    CHECK(K.entry(0, 1) == doctest::Approx(std::pow(0.2, -0.5)).epsilon(1e-14));
}

TEST_CASE("kernel symmetry is exact to the bit") {
    const auto spec = ManifoldSpec::sphere2(1.0);
    const auto grid = build_grid(spec, 300);
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 0.7), grid, std::nullopt);
    for (int i = 0; i < K.size(); ++i) {
        for (int j = i + 1; j < K.size(); ++j) {
            REQUIRE(K.entry(i, j) == K.entry(j, i));
            REQUIRE(K.entry(i, j) > 0.0);
        }
    }
}

TEST_CASE("alpha outside (0, n) is rejected") {
    CHECK_THROWS_AS(RieszKernel(ManifoldSpec::sphere2(1.0), 2.0), ConfigError);
    CHECK_THROWS_AS(RieszKernel(ManifoldSpec::sphere2(1.0), 0.0), ConfigError);
    CHECK_THROWS_AS(RieszKernel(ManifoldSpec::torus1(1.0), -0.5), ConfigError);
    CHECK_NOTHROW(RieszKernel(ManifoldSpec::torus1(1.0), 0.5));
}

TEST_CASE("apply: zero field maps to zero, linearity holds") {
    const auto spec = ManifoldSpec::torus1(1.0);
    const auto grid = build_grid(spec, 64);
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 0.5), grid, std::nullopt);

    const DensityField zero(std::vector<double>(grid.size(), 0.0), 1.5);
    const auto kz = apply_ialpha(K, grid, zero);
    for (double v : kz.values) CHECK(v == 0.0);

    const DensityField f = smooth_torus_field(grid, 1, 1.5);
    const DensityField g = smooth_torus_field(grid, 2, 1.5);
    std::vector<double> sum(grid.size());
    for (int i = 0; i < grid.size(); ++i) sum[i] = 2.0 * f.values[i] + g.values[i];
    const auto k_sum = apply_ialpha(K, grid, DensityField(sum, 1.5));
    const auto kf = apply_ialpha(K, grid, f);
    const auto kg = apply_ialpha(K, grid, g);
    for (int i = 0; i < grid.size(); ++i) {
        CHECK(k_sum.values[i] ==
              doctest::Approx(2.0 * kf.values[i] + kg.values[i]).epsilon(1e-12));
        CHECK(kf.values[i] >= 0.0);
    }
}

TEST_CASE("apply: discrete delta reproduces a kernel column plus the diagonal") {
    const auto spec = ManifoldSpec::torus1(1.0);
    const auto grid = build_grid(spec, 32);
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 0.4), grid, std::nullopt);
    const int j = 7;
    std::vector<double> v(grid.size(), 0.0);
    v[j] = 1.0 / grid.weights[j];
    const auto col = apply_ialpha(K, grid, DensityField(std::move(v), 2.0));
    for (int i = 0; i < grid.size(); ++i) {
        const double expected = i == j ? K.diag_correction(j) : K.entry(i, j);
        CHECK(col.values[i] == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("lp_norm basics") {
    QuadratureGrid grid;
    grid.spec = ManifoldSpec::ball(1, 10.0);
    grid.nodes = {{-1, 0, 0}, {1, 0, 0}};
    grid.weights = {1.0, 1.0};
    CHECK(lp_norm(grid, DensityField({3.0, 4.0}, 2.0), 2.0) == doctest::Approx(5.0));

    const auto torus = build_grid(ManifoldSpec::torus1(1.0), 50);
    const DensityField ones(std::vector<double>(torus.size(), 1.0), 2.0);
    for (double p : {1.0, 1.5, 2.0, 3.7}) {
        CHECK(lp_norm(torus, ones, p) == doctest::Approx(1.0).epsilon(1e-13));
    }

    const DensityField f = smooth_torus_field(torus, 3, 2.0);
    std::vector<double> scaled(f.values);
    for (double& x : scaled) x *= 2.5;
    CHECK(lp_norm(torus, DensityField(scaled, 2.0), 1.7) ==
          doctest::Approx(2.5 * lp_norm(torus, f, 1.7)).epsilon(1e-13));
}

TEST_CASE("critical exponent relation and admissibility") {
    const auto e1 = critical_exponent(4, 1.0, 2.0);
    CHECK(e1.q == doctest::Approx(4.0));
    CHECK(e1.t == doctest::Approx(4.0 / 3.0));
    const auto e2 = critical_exponent(2, 1.0, 1.5);
    CHECK(e2.q == doctest::Approx(6.0));
    CHECK(e2.t == doctest::Approx(6.0 / 5.0));
    CHECK_THROWS_AS(critical_exponent(2, 1.0, 2.0), ExponentError);
    CHECK_THROWS_AS(critical_exponent(2, 1.0, 1.0), ExponentError);
    CHECK_THROWS_AS(critical_exponent(2, 2.5, 1.5), ExponentError);
}

TEST_CASE("I_alpha(1) on the unit sphere approaches the 1-D oracle") {
    // oracle: 2*pi*integral_0^pi sin(t)/t dt, adaptive quadrature
    const double expected =
        2.0 * kPi * oracle::integrate([](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; },
                                      0.0, kPi);
    CHECK(expected == doctest::Approx(11.6360636748).epsilon(1e-9));

    const auto spec = ManifoldSpec::sphere2(1.0);
    const auto grid = build_grid(spec, 1500);
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 1.0), grid, std::nullopt);
    const DensityField ones(std::vector<double>(grid.size(), 1.0), 2.0);
    const auto k1 = apply_ialpha(K, grid, ones);
    const double mean = lp_norm(grid, k1, 1.0) / spec.volume();
    CHECK(mean == doctest::Approx(expected).epsilon(0.01));
    const auto [mn, mx] = std::minmax_element(k1.values.begin(), k1.values.end());
    CHECK((*mx - *mn) / mean < 5e-3);
}

TEST_CASE("bilinear form is symmetric under swapping the pair") {
    const auto spec = ManifoldSpec::torus2(1.0, 1.0);
    const auto grid = build_grid(spec, 12);
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 1.0), grid, std::nullopt);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> fv(grid.size()), gv(grid.size());
    for (auto& x : fv) x = uni(rng);
    for (auto& x : gv) x = uni(rng);
    const DensityField f(fv, 2.0), g(gv, 2.0);
    const double fg = bilinear_form(K, grid, f, g);
    const double gf = bilinear_form(K, grid, g, f);
    CHECK(fg == doctest::Approx(gf).epsilon(1e-10));
}

TEST_CASE("near/far split reconstructs the full application") {
    const auto spec = ManifoldSpec::sphere2(1.0);
    const auto grid = build_grid(spec, 400);
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 1.0), grid, 0.5);
    REQUIRE(K.split_radius().has_value());
    const DensityField f(std::vector<double>(grid.size(), 0.7), 1.5);
    const auto full = apply_ialpha(K, grid, f);
    const auto near = apply_ialpha(K, grid, f, KernelPart::Near);
    const auto far = apply_ialpha(K, grid, f, KernelPart::Far);
    for (int i = 0; i < grid.size(); ++i) {
        CHECK(near.values[i] + far.values[i] ==
              doctest::Approx(full.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("split masks partition every entry") {
    const auto spec = ManifoldSpec::torus2(1.0, 1.0);
    const auto grid = build_grid(spec, 8);
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 0.8), grid, 0.3);
    int near_cnt = 0, far_cnt = 0;
    for (int i = 0; i < K.size(); ++i) {
        for (int j = 0; j < K.size(); ++j) {
            K.near(i, j, 0.3) ? ++near_cnt : ++far_cnt;
        }
    }
    CHECK(near_cnt + far_cnt == K.size() * K.size());
    CHECK(near_cnt >= K.size()); // diagonal is always near
    CHECK(far_cnt > 0);
}

TEST_CASE("synthetic kernels reject split operations") {
    const auto K = KernelMatrix::from_dense({0, 1, 1, 0}, {1.0, 1.0});
    CHECK_THROWS_AS(K.kernel_exponent(), UsageError);
    CHECK_THROWS_AS((void)K.near(0, 1, 0.5), UsageError);
}

TEST_CASE("tail_norm: large rho equals the full row norm, small rho only the diagonal") {
    const auto spec = ManifoldSpec::torus1(1.0);
    const auto grid = build_grid(spec, 40);
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 0.5), grid, std::nullopt);
    const double s = 1.2; // admissible: s < 1/(1-alpha) = 2

    const double full = tail_norm(K, grid, 10.0, s);
    std::vector<double> row(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double acc = grid.weights[i] * std::pow(K.diag_correction(i), s);
        for (int j = 0; j < grid.size(); ++j) {
            if (j != i) acc += grid.weights[j] * std::pow(K.entry(i, j), s);
        }
        row[i] = std::pow(acc, 1.0 / s);
    }
    CHECK(full == doctest::Approx(*std::max_element(row.begin(), row.end())).epsilon(1e-13));

    const double tiny = tail_norm(K, grid, 0.5 / 40.0 * 0.9, s);
    double diag_only = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        diag_only = std::max(
            diag_only,
            std::pow(grid.weights[i] * std::pow(K.diag_correction(i), s), 1.0 / s));
    }
    CHECK(tiny == doctest::Approx(diag_only).epsilon(1e-13));

    double prev = full;
    for (double rho : {0.4, 0.2, 0.1, 0.05}) {
        const double cur = tail_norm(K, grid, rho, s);
        CHECK(cur <= prev * (1.0 + 1e-13));
        prev = cur;
    }
    CHECK_THROWS_AS(tail_norm(K, grid, 0.1, 3.0), ExponentError);
}

TEST_CASE("tail_norm log-log slope matches the small-ball exponent") {
    // closed form on the sphere for alpha=1, s=1: mass within rho is
    // 2*pi*integral_0^rho sin(t)/t * t dt-free comparison; the discrete sum
    // must scale like rho^((alpha-n)s+n) = rho
    const auto spec = ManifoldSpec::sphere2(1.0);
    const auto grid = build_grid(spec, 4000);
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 1.0), grid, std::nullopt);
    std::vector<double> rhos{0.4, 0.2, 0.1, 0.05};
    std::vector<double> tails;
    for (double rho : rhos) tails.push_back(tail_norm(K, grid, rho, 1.0));
    const double slope = oracle::loglog_slope(rhos, tails);
    CHECK(std::abs(slope - 1.0) < 0.1);

    // the values themselves track the closed form 2*pi*rho
    for (size_t i = 0; i < rhos.size(); ++i) {
        CHECK(tails[i] == doctest::Approx(2.0 * kPi * rhos[i]).epsilon(0.12));
    }
}

TEST_CASE("young_check: zero density, scale invariance, refinement stability") {
    const auto spec = ManifoldSpec::torus1(1.0);
    const double p = 1.4, q = 1.6;
    const double r = 1.0 / (1.0 / q + 1.0 / p - 1.0);

    const auto grid = build_grid(spec, 200);
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 0.5), grid, std::nullopt);

    const DensityField zero(std::vector<double>(grid.size(), 0.0), q);
    CHECK(young_check(grid, K, zero, p, q, r) == 0.0);

    const DensityField g = smooth_torus_field(grid, 11, q);
    const double ratio = young_check(grid, K, g, p, q, r);
    std::vector<double> scaled(g.values);
    for (double& x : scaled) x *= 37.0;
    CHECK(young_check(grid, K, DensityField(scaled, q), p, q, r) ==
          doctest::Approx(ratio).epsilon(1e-12));

    CHECK_THROWS_AS(young_check(grid, K, g, p, q, 2.0 * r), UsageError);

    double prev = ratio;
    for (int res : {400, 800}) {
        const auto fine = build_grid(spec, res);
        const auto Kf = KernelMatrix::assemble(RieszKernel(spec, 0.5), fine, std::nullopt);
        const double cur = young_check(fine, Kf, smooth_torus_field(fine, 11, q), p, q, r);
        CHECK(std::abs(cur - prev) / prev < 0.05);
        prev = cur;
    }
}

TEST_CASE("discrete quotient maximum stabilizes under refinement") {
    const auto spec = ManifoldSpec::torus1(1.0);
    const double alpha = 0.5, p = 1.5;
    const auto e = critical_exponent(1, alpha, p);

    const auto eval_max = [&](int res) {
        const auto grid = build_grid(spec, res);
        const auto K = KernelMatrix::assemble(RieszKernel(spec, alpha), grid, std::nullopt);
        double best = 0.0;
        for (int draw = 0; draw < 100; ++draw) {
            const DensityField f = smooth_torus_field(grid, 1000 + draw, p);
            const double ratio = lp_norm(grid, apply_ialpha(K, grid, f), e.q) / lp_norm(grid, f, p);
            best = std::max(best, ratio);
        }
        return best;
    };
    const double coarse = eval_max(200);
    const double fine = eval_max(400);
    CHECK(std::isfinite(coarse));
    CHECK(std::abs(fine - coarse) / coarse < 0.02);
}

TEST_CASE("kernel csv export") {
    const auto spec = ManifoldSpec::torus1(1.0);
    const auto grid = build_grid(spec, 4);
    const auto K = KernelMatrix::assemble(RieszKernel(spec, 0.5), grid, std::nullopt);
    std::ostringstream os;
    write_kernel_csv(K, os);
    const std::string text = os.str();
    CHECK(text.rfind("row,col,value\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 17);
}
