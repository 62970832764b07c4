#include "hls/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "hls/csv.hpp"

namespace hls {

namespace {

const char* const kRequiredKeys[] = {"manifold", "alpha", "p", "resolution", "workflow"};

const char* const kKnownKeys[] = {
    "alpha",       "atom_radii", "delta",  "deterministic", "export_grid", "export_kernel",
    "init",        "lambdas",    "manifold", "max_iters",   "n",           "out",
    "p",           "periods",    "radius", "resolution",    "rhos",        "seed",
    "split_r",     "theta",      "tol",    "workflow"};

bool known_key(const std::string& k) {
    return std::find(std::begin(kKnownKeys), std::end(kKnownKeys), k) != std::end(kKnownKeys);
}

std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

std::optional<double> parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> parse_int(const std::string& s) {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') return std::nullopt;
    return v;
}

std::optional<bool> parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    return std::nullopt;
}

std::optional<std::vector<double>> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto v = parse_double(trim(item));
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    if (out.empty()) return std::nullopt;
    return out;
}

std::string list_text(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt_double(v[i]);
    }
    return s;
}

} // namespace

std::string workflow_name(Workflow w) {
    switch (w) {
    case Workflow::Solve: return "solve";
    case Workflow::Baseline: return "baseline";
    case Workflow::Transplant: return "transplant";
    case Workflow::CcDiagnose: return "cc-diagnose";
    case Workflow::SplitCheck: return "split-check";
    }
    return "?";
}

std::optional<Workflow> workflow_from_name(std::string_view name) {
    if (name == "solve") return Workflow::Solve;
    if (name == "baseline") return Workflow::Baseline;
    if (name == "transplant") return Workflow::Transplant;
    if (name == "cc-diagnose") return Workflow::CcDiagnose;
    if (name == "split-check") return Workflow::SplitCheck;
    return std::nullopt;
}

std::string JobConfig::canonical_text() const {
    std::map<std::string, std::string> kv;
    kv["manifold"] = manifold.name();
    kv["radius"] = fmt_double(manifold.radius);
    kv["periods"] = fmt_double(manifold.periods[0]) + "," + fmt_double(manifold.periods[1]);
    kv["alpha"] = fmt_double(alpha);
    kv["p"] = fmt_double(p);
    kv["resolution"] = std::to_string(resolution);
    kv["workflow"] = workflow_name(workflow);
    kv["max_iters"] = std::to_string(max_iters);
    kv["tol"] = fmt_double(tol);
    kv["seed"] = std::to_string(seed);
    kv["init"] = random_init ? "random" : "const";
    kv["out"] = out_dir;
    kv["deterministic"] = deterministic ? "true" : "false";
    kv["delta"] = delta > 0.0 ? fmt_double(delta) : "auto";
    kv["lambdas"] = lambdas.empty() ? "auto" : list_text(lambdas);
    kv["rhos"] = rhos.empty() ? "auto" : list_text(rhos);
    kv["atom_radii"] = atom_radii.empty() ? "auto" : list_text(atom_radii);
    kv["theta"] = fmt_double(theta);
    kv["split_r"] = split_r > 0.0 ? fmt_double(split_r) : "auto";
    kv["export_grid"] = export_grid ? "true" : "false";
    kv["export_kernel"] = export_kernel ? "true" : "false";

    std::string text;
    for (const auto& [k, v] : kv) {
        text += k;
        text += "=";
        text += v;
        text += "\n";
    }
    return text;
}

std::uint64_t JobConfig::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical_text()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

ParseOutcome parse_config(std::string_view text) {
    ParseOutcome out;
    std::map<std::string, std::string> kv;
    std::map<std::string, int> key_line;

    int lineno = 0;
    std::stringstream ss{std::string(text)};
    std::string line;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            out.issues.push_back({lineno, "expected key=value"});
            continue;
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty()) {
            out.issues.push_back({lineno, "expected key=value"});
            continue;
        }
        if (!known_key(key)) {
            out.issues.push_back({lineno, "unknown key '" + key + "'"});
            continue;
        }
        if (kv.count(key)) {
            out.issues.push_back({lineno, "duplicate key '" + key + "'"});
            continue;
        }
        kv[key] = value;
        key_line[key] = lineno;
    }

    for (const char* req : kRequiredKeys) {
        if (!kv.count(req)) {
            out.issues.push_back({0, std::string("missing required key '") + req + "'"});
        }
    }

    JobConfig cfg;
    auto fail = [&](const std::string& key, const std::string& msg) {
        out.issues.push_back({key_line.count(key) ? key_line[key] : 0, msg});
    };

    // manifold + scale parameters
    double radius = 1.0;
    std::vector<double> periods{1.0};
    if (kv.count("radius")) {
        if (auto v = parse_double(kv["radius"]); v && *v > 0.0) {
            radius = *v;
        } else {
            fail("radius", "radius must be a positive number");
        }
    }
    if (kv.count("periods")) {
        if (auto v = parse_list(kv["periods"]);
            v && std::all_of(v->begin(), v->end(), [](double x) { return x > 0.0; })) {
            periods = *v;
        } else {
            fail("periods", "periods must be positive numbers");
        }
    }
    bool have_manifold = false;
    if (kv.count("manifold")) {
        const std::string& m = kv["manifold"];
        try {
            if (m == "circle") {
                cfg.manifold = ManifoldSpec::circle(radius);
            } else if (m == "sphere2") {
                cfg.manifold = ManifoldSpec::sphere2(radius);
            } else if (m == "torus-1") {
                cfg.manifold = ManifoldSpec::torus1(periods[0]);
            } else if (m == "torus-2") {
                cfg.manifold = ManifoldSpec::torus2(periods[0],
                                                    periods.size() > 1 ? periods[1] : periods[0]);
            } else if (m == "ball-1" || m == "ball-2" || m == "ball-3") {
                cfg.manifold = ManifoldSpec::ball(m[5] - '0', radius);
            } else {
                fail("manifold",
                     "unknown manifold '" + m +
                         "' (circle, sphere2, torus-1, torus-2, ball-1, ball-2, ball-3)");
            }
            have_manifold = m == "circle" || m == "sphere2" || m == "torus-1" || m == "torus-2" ||
                            m == "ball-1" || m == "ball-2" || m == "ball-3";
        } catch (const std::exception& ex) {
            fail("manifold", ex.what());
        }
    }

    // dimension for admissibility checks: explicit n key cross-checks the catalog
    int n = have_manifold ? cfg.manifold.dimension() : 0;
    if (kv.count("n")) {
        if (auto v = parse_int(kv["n"]); v && *v >= 1 && *v <= 3) {
            if (have_manifold && *v != cfg.manifold.dimension()) {
                fail("n", "n does not match the manifold dimension");
            } else if (!have_manifold) {
                n = static_cast<int>(*v);
            }
        } else {
            fail("n", "n must be 1, 2, or 3");
        }
    }

    bool have_alpha = false, have_p = false;
    if (kv.count("alpha")) {
        if (auto v = parse_double(kv["alpha"])) {
            cfg.alpha = *v;
            have_alpha = true;
        } else {
            fail("alpha", "alpha must be a number");
        }
    }
    if (kv.count("p")) {
        if (auto v = parse_double(kv["p"])) {
            cfg.p = *v;
            have_p = true;
        } else {
            fail("p", "p must be a number");
        }
    }
    if (n > 0 && have_alpha) {
        if (!(cfg.alpha > 0.0) || !(cfg.alpha < n)) {
            fail("alpha", "alpha must satisfy 0 < alpha < n = " + std::to_string(n));
        } else if (have_p && (!(cfg.p > 1.0) || !(cfg.p < n / cfg.alpha))) {
            fail("p", "p must satisfy 1 < p < n/alpha = " + fmt_double(n / cfg.alpha));
        }
    }

    if (kv.count("resolution")) {
        if (auto v = parse_int(kv["resolution"]); v && *v >= 2) {
            cfg.resolution = static_cast<int>(*v);
        } else {
            fail("resolution", "resolution must be an integer >= 2");
        }
    }
    if (kv.count("workflow")) {
        if (auto w = workflow_from_name(kv["workflow"])) {
            cfg.workflow = *w;
        } else {
            fail("workflow",
                 "workflow must be one of solve, baseline, transplant, cc-diagnose, split-check");
        }
    }
    if (kv.count("max_iters")) {
        if (auto v = parse_int(kv["max_iters"]); v && *v >= 1) {
            cfg.max_iters = static_cast<int>(*v);
        } else {
            fail("max_iters", "max_iters must be a positive integer");
        }
    }
    if (kv.count("tol")) {
        if (auto v = parse_double(kv["tol"]); v && *v > 0.0) {
            cfg.tol = *v;
        } else {
            fail("tol", "tol must be positive");
        }
    }
    if (kv.count("seed")) {
        if (auto v = parse_int(kv["seed"]); v && *v >= 0) {
            cfg.seed = static_cast<std::uint64_t>(*v);
        } else {
            fail("seed", "seed must be a nonnegative integer");
        }
    }
    if (kv.count("init")) {
        if (kv["init"] == "random") {
            cfg.random_init = true;
        } else if (kv["init"] == "const") {
            cfg.random_init = false;
        } else {
            fail("init", "init must be 'const' or 'random'");
        }
    }
    if (kv.count("out")) cfg.out_dir = kv["out"];
    if (kv.count("deterministic")) {
        if (auto v = parse_bool(kv["deterministic"])) {
            cfg.deterministic = *v;
        } else {
            fail("deterministic", "deterministic must be true or false");
        }
    }
    if (kv.count("delta") && kv["delta"] != "auto") {
        if (auto v = parse_double(kv["delta"]); v && *v > 0.0) {
            cfg.delta = *v;
        } else {
            fail("delta", "delta must be positive or 'auto'");
        }
    }
    auto read_schedule = [&](const char* key, std::vector<double>& dst, bool decreasing) {
        if (!kv.count(key) || kv[key] == "auto") return;
        auto v = parse_list(kv[key]);
        if (!v || !std::all_of(v->begin(), v->end(), [](double x) { return x > 0.0; })) {
            fail(key, std::string(key) + " must be a comma-separated list of positive numbers");
            return;
        }
        if (decreasing) {
            for (size_t i = 1; i < v->size(); ++i) {
                if (!((*v)[i] < (*v)[i - 1])) {
                    fail(key, std::string(key) + " must strictly decrease");
                    return;
                }
            }
        }
        dst = *v;
    };
    read_schedule("lambdas", cfg.lambdas, true);
    read_schedule("rhos", cfg.rhos, true);
    read_schedule("atom_radii", cfg.atom_radii, true);
    if (kv.count("theta")) {
        if (auto v = parse_double(kv["theta"]); v && *v > 0.0 && *v < 1.0) {
            cfg.theta = *v;
        } else {
            fail("theta", "theta must lie in (0, 1)");
        }
    }
    if (kv.count("split_r") && kv["split_r"] != "auto") {
        if (auto v = parse_double(kv["split_r"]); v && *v >= 1.0) {
            cfg.split_r = *v;
        } else {
            fail("split_r", "split_r must be at least 1 or 'auto'");
        }
    }
    if (kv.count("export_grid")) {
        if (auto v = parse_bool(kv["export_grid"])) {
            cfg.export_grid = *v;
        } else {
            fail("export_grid", "export_grid must be true or false");
        }
    }
    if (kv.count("export_kernel")) {
        if (auto v = parse_bool(kv["export_kernel"])) {
            cfg.export_kernel = *v;
        } else {
            fail("export_kernel", "export_kernel must be true or false");
        }
    }

    // workflow/manifold compatibility
    if (have_manifold && kv.count("workflow") && workflow_from_name(kv["workflow"])) {
        const bool ball = cfg.manifold.is_ball();
        if (cfg.workflow == Workflow::Baseline && !ball) {
            fail("workflow", "baseline runs on euclidean balls; use manifold=ball-<n>");
        }
        if ((cfg.workflow == Workflow::Transplant || cfg.workflow == Workflow::CcDiagnose ||
             cfg.workflow == Workflow::SplitCheck) &&
            ball) {
            fail("workflow", workflow_name(cfg.workflow) + " requires a compact manifold");
        }
    }

    if (out.issues.empty()) out.config = cfg;
    return out;
}

} // namespace hls
