#include "hls/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hls/csv.hpp"
#include "hls/diagnostics.hpp"
#include "hls/errors.hpp"
#include "hls/solver.hpp"
#include "hls/transplant.hpp"
#include "hls/version.hpp"

namespace hls {

namespace {

namespace fs = std::filesystem;

Point canonical_center(const ManifoldSpec& spec) {
    switch (spec.kind) {
    case ManifoldKind::Sphere2: return {0.0, 0.0, spec.radius};
    default: return {0.0, 0.0, 0.0};
    }
}

struct RunContext {
    const JobConfig& cfg;
    ResultRecord& record;
    fs::path out_dir;

    void emit(const std::string& key, const std::string& value) {
        record.outputs.emplace_back(key, value);
    }
    void emit(const std::string& key, double value) { emit(key, fmt_double(value)); }

    void write_file(const std::string& name, const std::string& content) {
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) throw UsageError("cannot write " + (out_dir / name).string());
        f << content;
        record.files.push_back(name);
    }
};

double resolved_delta(const JobConfig& cfg) {
    return cfg.delta > 0.0 ? cfg.delta : cfg.manifold.injectivity_radius() / 2.0;
}

std::vector<double> resolved_lambdas(const JobConfig& cfg, double top) {
    if (!cfg.lambdas.empty()) return cfg.lambdas;
    std::vector<double> out;
    double v = top;
    for (int i = 0; i < 4; ++i) {
        out.push_back(v);
        v /= 2.0;
    }
    return out;
}

void maybe_export(RunContext& ctx, const QuadratureGrid& grid, const KernelMatrix* K) {
    if (ctx.cfg.export_grid) {
        std::ostringstream os;
        write_grid_csv(grid, os);
        ctx.write_file("grid.csv", os.str());
    }
    if (ctx.cfg.export_kernel && K) {
        std::ostringstream os;
        write_kernel_csv(*K, os);
        ctx.write_file("kernel.csv", os.str());
    }
}

void emit_solver_outputs(RunContext& ctx, const ExtremalResult& result, const Exponents& e) {
    ctx.emit("n_estimate", result.n_estimate);
    ctx.emit("iterations", std::to_string(result.iterations));
    ctx.emit("converged", result.converged ? "true" : "false");
    ctx.emit("residual_f", result.el_residuals.first);
    ctx.emit("residual_g", result.el_residuals.second);
    ctx.emit("q", e.q);
    ctx.emit("t", e.t);
    std::ostringstream os;
    write_history_csv(result, os);
    ctx.write_file("history.csv", os.str());
}

void run_solve(RunContext& ctx) {
    const JobConfig& cfg = ctx.cfg;
    const int n = cfg.manifold.dimension();
    const Exponents e = critical_exponent(n, cfg.alpha, cfg.p);
    const QuadratureGrid grid = build_grid(cfg.manifold, cfg.resolution);
    const KernelMatrix K =
        KernelMatrix::assemble(RieszKernel(cfg.manifold, cfg.alpha), grid, std::nullopt);
    const SolverConfig sc = SolverConfig::from_exponents(e, cfg.max_iters, cfg.tol);
    const DensityField g0 = initial_field(grid, e.t, cfg.random_init, cfg.seed);
    const ExtremalResult result = alternating_maximize(K, grid, sc, g0);
    emit_solver_outputs(ctx, result, e);
    maybe_export(ctx, grid, &K);
}

void run_baseline(RunContext& ctx) {
    const JobConfig& cfg = ctx.cfg;
    const int n = cfg.manifold.dimension();
    const Exponents e = critical_exponent(n, cfg.alpha, cfg.p);
    const ExtremalResult result = euclidean_baseline(n, cfg.alpha, cfg.p, cfg.manifold.radius,
                                                     cfg.resolution, cfg.max_iters, cfg.tol);
    emit_solver_outputs(ctx, result, e);
    if (ctx.cfg.export_grid) {
        const QuadratureGrid grid = build_grid(cfg.manifold, cfg.resolution);
        maybe_export(ctx, grid, nullptr);
    }
}

void run_transplant(RunContext& ctx) {
    const JobConfig& cfg = ctx.cfg;
    const double delta = resolved_delta(cfg);
    const std::vector<double> lambdas = resolved_lambdas(cfg, 0.8);
    const Point center = canonical_center(cfg.manifold);
    const auto reports = lower_bound_sweep(cfg.manifold, center, cfg.alpha, cfg.p, lambdas, delta,
                                           cfg.resolution, cfg.max_iters, cfg.tol);
    const TransplantReport& last = reports.back();
    ctx.emit("n_proxy", last.n_proxy);
    ctx.emit("epsilon", last.epsilon);
    ctx.emit("delta", delta);
    ctx.emit("certificate", last.certificate);
    ctx.emit("quotient", last.quotient);
    ctx.emit("sweep_points", std::to_string(reports.size()));
    std::ostringstream os;
    write_sweep_csv(reports, os);
    ctx.write_file("sweep.csv", os.str());
}

void run_cc_diagnose(RunContext& ctx) {
    const JobConfig& cfg = ctx.cfg;
    const int n = cfg.manifold.dimension();
    const Exponents e = critical_exponent(n, cfg.alpha, cfg.p);
    const double delta = resolved_delta(cfg);
    const std::vector<double> lambdas = resolved_lambdas(cfg, delta / 2.0);
    const Point center = canonical_center(cfg.manifold);

    const ExtremalResult base =
        euclidean_baseline(n, cfg.alpha, cfg.p, 1.0, cfg.resolution, cfg.max_iters, cfg.tol);
    const QuadratureGrid base_grid = build_grid(ManifoldSpec::ball(n, 1.0), cfg.resolution);
    const NormalChart chart = build_chart(cfg.manifold, center, delta);
    const RieszKernel kernel(cfg.manifold, cfg.alpha);

    std::vector<double> radii = cfg.atom_radii;
    if (radii.empty()) {
        const double inj = cfg.manifold.injectivity_radius();
        radii = {0.5 * inj, 0.375 * inj, 0.25 * inj};
    }

    std::vector<MeasurePair> family;
    std::ostringstream table;
    table << "lambda,mu_local,nu_local\n";
    for (double lambda : lambdas) {
        const QuadratureGrid g_lambda = scale_ball_grid(base_grid, lambda);
        std::vector<double> fv(base.f.values);
        const double fscale = std::pow(lambda, -static_cast<double>(n) / e.p);
        for (double& v : fv) v *= fscale;
        const DensityField f_l = truncate(g_lambda, DensityField(std::move(fv), e.p), delta);
        const TransplantedPair pair = transplant(chart, g_lambda, f_l, f_l);

        auto grid = std::make_shared<QuadratureGrid>(pair.grid);
        const KernelMatrix K = KernelMatrix::assemble(kernel, *grid, std::nullopt);
        DensityField u = pair.u;
        const double unorm = lp_norm(*grid, u, e.p);
        if (unorm == 0.0) throw DegenerateInputError("bubble vanished after truncation");
        for (double& v : u.values) v /= unorm;
        family.push_back(build_measures(grid, K, u, e.p, e.q));

        const MeasurePair& mp = family.back();
        table << fmt_double(lambda) << "," << fmt_double(local_mass(mp.mu, center, radii.back()))
              << "," << fmt_double(local_mass(mp.nu, center, radii.back())) << "\n";
    }
    ctx.write_file("concentration.csv", table.str());

    std::vector<AtomReport> atoms = detect_atoms(family, radii, cfg.theta);
    for (AtomReport& a : atoms) check_atom_inequality(a, base.n_estimate, e.p, e.q);
    std::ostringstream atext;
    write_atoms_text(atoms, atext);
    ctx.write_file("atoms.txt", atext.str());

    ctx.emit("n_proxy", base.n_estimate);
    ctx.emit("atom_count", std::to_string(atoms.size()));
    if (!atoms.empty()) {
        ctx.emit("mu_1", atoms.front().mu_mass);
        ctx.emit("nu_1", atoms.front().nu_mass);
        ctx.emit("slack_1", atoms.front().slack);
    }
}

void run_split_check(RunContext& ctx) {
    const JobConfig& cfg = ctx.cfg;
    const int n = cfg.manifold.dimension();
    const Exponents e = critical_exponent(n, cfg.alpha, cfg.p);
    const double r = cfg.split_r > 0.0 ? cfg.split_r : (e.q > 2.0 ? 2.0 : 0.5 * (1.0 + e.q));

    const QuadratureGrid grid = build_grid(cfg.manifold, cfg.resolution);
    const KernelMatrix K =
        KernelMatrix::assemble(RieszKernel(cfg.manifold, cfg.alpha), grid, std::nullopt);

    // oscillating surrogate around the weak limit f == 1: frequencies double
    // per member, amplitudes stay fixed
    const DensityField f(std::vector<double>(grid.size(), 1.0), e.p);
    std::vector<DensityField> seq;
    for (int m = 0; m < 4; ++m) {
        const double k = std::pow(2.0, m + 1);
        std::vector<double> v(grid.size());
        for (int i = 0; i < grid.size(); ++i) {
            double phase = 0.0;
            const Point& x = grid.nodes[i];
            switch (cfg.manifold.kind) {
            case ManifoldKind::Circle: phase = k * x[0]; break;
            case ManifoldKind::Torus1:
            case ManifoldKind::Torus2:
                phase = 2.0 * std::numbers::pi * k * x[0] / cfg.manifold.periods[0];
                break;
            case ManifoldKind::Sphere2:
                phase = k * std::acos(std::clamp(x[2] / cfg.manifold.radius, -1.0, 1.0));
                break;
            default: throw UsageError("split-check requires a compact manifold");
            }
            v[i] = 1.0 + 0.5 * std::cos(phase);
        }
        seq.emplace_back(std::move(v), e.p);
    }

    std::vector<double> rhos = cfg.rhos;
    if (rhos.empty()) {
        const double d = cfg.manifold.diameter();
        rhos = {0.25 * d, 0.175 * d, 0.125 * d, 0.09 * d};
    }
    const SplitTable table = compactness_split_check(K, grid, seq, f, rhos, r, cfg.p);
    std::ostringstream os;
    write_split_csv(table, os);
    ctx.write_file("split.csv", os.str());
    ctx.emit("r", r);
    ctx.emit("s", table.s);
    ctx.emit("slope", table.slope);
    ctx.emit("expected_slope", table.expected_slope);
    maybe_export(ctx, grid, &K);
}

std::string summary_text(const ResultRecord& record, bool deterministic) {
    std::ostringstream os;
    os << "version=" << record.version << "\n";
    os << "workflow=" << workflow_name(record.config.workflow) << "\n";
    char hex[20];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(record.config_hash));
    os << "config_hash=" << hex << "\n";
    std::istringstream cfg(record.config.canonical_text());
    std::string line;
    while (std::getline(cfg, line)) os << "config." << line << "\n";
    for (const auto& [k, v] : record.outputs) os << k << "=" << v << "\n";
    std::string files;
    for (const std::string& f : record.files) {
        if (!files.empty()) files += ",";
        files += f;
    }
    os << "files=" << files << "\n";
    if (!deterministic) os << "duration_seconds=" << fmt_double(record.duration_seconds) << "\n";
    os << "status=ok\n";
    return os.str();
}

} // namespace

ResultRecord run(const JobConfig& config) {
    const auto start = std::chrono::steady_clock::now();

    ResultRecord record;
    record.config = config;
    record.version = kVersion;
    record.config_hash = config.hash();

    RunContext ctx{config, record, fs::path(config.out_dir)};
    fs::create_directories(ctx.out_dir);

    try {
        switch (config.workflow) {
        case Workflow::Solve: run_solve(ctx); break;
        case Workflow::Baseline: run_baseline(ctx); break;
        case Workflow::Transplant: run_transplant(ctx); break;
        case Workflow::CcDiagnose: run_cc_diagnose(ctx); break;
        case Workflow::SplitCheck: run_split_check(ctx); break;
        }
    } catch (const std::exception& ex) {
        throw Error(workflow_name(config.workflow) + " workflow failed: " + ex.what());
    }

    record.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ofstream f(ctx.out_dir / "summary.txt", std::ios::binary);
    if (!f) throw UsageError("cannot write summary.txt");
    record.files.push_back("summary.txt");
    f << summary_text(record, config.deterministic);
    return record;
}

} // namespace hls
