// fsl: batch front end for the weighted function-space library.
//
// Subcommands: build | norm | verify | decompose | apply | report.
// All file formats are UTF-8 JSON/CSV; reports are deterministic for a
// fixed seed modulo the timestamp field.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <memory>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fsl/suites.hpp"
#include "fsl/io.hpp"
#include "fsl/random.hpp"

using namespace fsl;

namespace {

std::string now_string() {
    std::time_t t = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
    return buf;
}

std::string default_baseline_path(const std::string& explicit_path) {
    if (!explicit_path.empty()) return explicit_path;
    if (const char* dir = std::getenv("FSL_BASELINE_DIR"))
        return std::string(dir) + "/baselines.json";
    return "baselines.json";
}

// The operator keeps a pointer to its space, so the fixture lives on the
// heap and never moves.
struct Fixture {
    Json space_cfg, op_cfg, weight_cfg;
    MetricMeasureSpace space;
    SelfAdjointOperator op;
    Weight weight;

    Fixture(Json scfg, Json ocfg, Json wcfg)
        : space_cfg(std::move(scfg)),
          op_cfg(std::move(ocfg)),
          weight_cfg(std::move(wcfg)),
          space(space_from_config(space_cfg)),
          op(operator_from_config(space, op_cfg)),
          weight(weight_from_config(space, weight_cfg)) {}
};

std::unique_ptr<Fixture> load_fixture(const std::string& space_path, const std::string& op_path,
                                      const std::string& weight_path) {
    Json scfg = load_json_file(space_path);
    Json ocfg = op_path.empty() ? Json{{"kind", "grid-laplacian"}} : load_json_file(op_path);
    Json wcfg = weight_path.empty() ? Json{{"type", "constant"}} : load_json_file(weight_path);
    return std::make_unique<Fixture>(std::move(scfg), std::move(ocfg), std::move(wcfg));
}

int cmd_build(const std::string& space_path, const std::string& op_path,
              const std::string& weight_path, const std::string& cubes_out,
              bool heat_report, const std::string& report_out) {
    const auto fxp = load_fixture(space_path, op_path, weight_path);
    Fixture& fx = *fxp;
    fx.space.check_invariants();
    const DoublingReport doubling = estimate_doubling(fx.space);
    const ApReport ap = critical_indices(fx.space, fx.weight);

    Json rep;
    rep["space"] = {{"points", fx.space.size()},
                    {"diameter", fx.space.diameter()},
                    {"min_distance", fx.space.min_positive_distance()},
                    {"total_mass", fx.space.total_mass()},
                    {"descriptor", fx.space.descriptor()}};
    rep["doubling"] = {{"n_exp", doubling.n_exp},
                       {"n_tilde", doubling.n_tilde},
                       {"c_doubling", doubling.c_doubling},
                       {"c_pure", doubling.c_pure}};
    rep["operator"] = {{"lambda_max", fx.op.lambda_max()},
                       {"lambda_min_positive", fx.op.lambda_min_positive()},
                       {"kernel_dim", fx.op.kernel_dim()}};
    rep["weight"] = {{"descriptor", fx.weight.descriptor},
                     {"qw_est", ap.qw_est},
                     {"rw_est", ap.rw_est}};
    Json curve = Json::array();
    for (auto [p, c] : ap.ap_curve) curve.push_back({{"p", p}, {"ap", c}});
    rep["weight"]["ap_curve"] = curve;

    if (heat_report) {
        const double h = fx.space.min_positive_distance();
        std::vector<double> t_grid;
        for (double t = 4.0 * h * h; t <= fx.space.diameter() * fx.space.diameter();
             t *= 4.0)
            t_grid.push_back(t);
        const auto hk = gaussian_bound_fit(fx.op, t_grid);
        rep["heat_kernel"] = {{"fit_ok", hk.fit_ok},
                              {"gauss_c", hk.gauss_c},
                              {"gauss_const", hk.gauss_const},
                              {"holder_delta0", hk.holder_delta0},
                              {"conservation_defect", hk.conservation_defect}};
        Json profile = Json::array();
        for (const auto& pt : wave_support_profile(fx.op, 8.0 * h))
            profile.push_back({{"rho_over_t", pt.rho_over_t}, {"max_abs", pt.max_abs}});
        rep["wave_profile"] = profile;
    }
    rep["timestamp"] = now_string();

    if (!cubes_out.empty()) {
        const ScaleGrid grid = ScaleGrid::for_operator(fx.op, 16);
        write_json_file(cubes_out, cube_tree_to_json(tree_covering_grid(fx.space, grid)));
    }
    if (report_out.empty()) std::cout << rep.dump(2) << "\n";
    else write_json_file(report_out, rep);
    return 0;
}

int cmd_norm(const std::string& space_path, const std::string& op_path,
             const std::string& weight_path, const std::string& input, const std::string& kind,
             double alpha, double p, double q, const std::string& flavor_str, double lambda,
             double aperture, double s_power, int per_octave, const std::string& out) {
    const auto fxp = load_fixture(space_path, op_path, weight_path);
    Fixture& fx = *fxp;
    const Vec f = read_csv_vector(input);
    if (f.size() != fx.space.size()) {
        std::cerr << "input length does not match the space\n";
        return 2;
    }

    const PartitionOfUnity pou = make_partition_of_unity();
    const ScaleGrid grid = ScaleGrid::for_operator(fx.op, per_octave, kind == "hardy" ? 4 : 0);

    double value = 0.0;
    if (kind == "besov" || kind == "triebel") {
        NormParams np;
        np.alpha = alpha;
        np.p = p;
        np.q = q;
        np.weight = &fx.weight;
        np.pou = &pou;
        np.grid = &grid;
        np.lambda_exp = lambda;
        np.aperture = aperture;
        np.flavor = norm_flavor_from_string(flavor_str);
        np.levels = level_range(fx.op);
        value = (kind == "besov") ? besov_norm(fx.op, f, np).value
                                  : triebel_norm(fx.op, f, np).value;
    } else if (kind == "f-infinity") {
        value = f_infinity_norm(fx.op, f, alpha, q, fx.weight,
                                norm_flavor_from_string(flavor_str), pou, &grid, lambda)
                    .value;
    } else if (kind == "bmo") {
        value = bmo_l_norm(fx.op, f, fx.weight);
    } else if (kind == "hardy") {
        value = hardy_norm(fx.op, f, p, fx.weight, grid);
    } else if (kind == "sobolev") {
        value = sobolev_norm(fx.op, f, s_power, p, fx.weight);
    } else {
        std::cerr << "unknown norm kind: " << kind << "\n";
        return 2;
    }

    Json rep{{"kind", kind},       {"value", value}, {"alpha", alpha}, {"p", p},
             {"q", q},             {"flavor", flavor_str}, {"input", input},
             {"timestamp", now_string()}};
    if (out.empty()) std::cout << rep.dump(2) << "\n";
    else write_json_file(out, rep);
    return 0;
}

int cmd_verify(const std::string& space_path, const std::string& op_path,
               const std::string& weight_path, const std::string& suite, int samples,
               std::uint64_t seed, int band_lo, int band_hi, int per_octave, int m_order,
               const std::string& report_out, const std::string& baseline_path, bool rebaseline) {
    const auto fxp = load_fixture(space_path, op_path, weight_path);
    Fixture& fx = *fxp;
    const DoublingReport doubling = estimate_doubling(fx.space);
    const ApReport ap = critical_indices(fx.space, fx.weight);

    SuiteContext ctx;
    ctx.op = &fx.op;
    ctx.weight = &fx.weight;
    ctx.weight_name = fx.weight.descriptor;
    ctx.samples = samples;
    ctx.seed = seed;
    ctx.band_lo = band_lo;
    ctx.band_hi = band_hi;
    ctx.per_octave = per_octave;
    ctx.n_exp = doubling.n_exp;
    ctx.q_w = ap.qw_est;

    static const std::vector<std::string> structural_suites = {
        "space", "calderon", "kernel-bounds", "atoms", "apps", "weights"};

    std::vector<std::string> checks;
    if (suite == "all") {
        checks = structural_suites;
        for (const auto& n : known_checks()) checks.push_back(n);
    } else {
        checks.push_back(suite);
    }

    const std::string bpath = default_baseline_path(baseline_path);
    BaselineStore store = BaselineStore::load(bpath);
    const std::string cfg_hash =
        config_hash(Json{{"space", fx.space_cfg}, {"op", fx.op_cfg}, {"weight", fx.weight_cfg}});

    Json reports = Json::array();
    bool all_pass = true;
    bool store_dirty = false;

    // Gate closure shared by the structural suites.
    auto gate = [&](const std::string& key, double lo, double hi, std::string* why) {
        const auto entry = store.find(key);
        if (!entry || rebaseline) {
            store.record(key, {lo, hi, 0.5 * (lo + hi), now_string(), cfg_hash}, true);
            store_dirty = true;
            return true;
        }
        const bool ok = store.within(key, lo, hi);
        if (!ok && why)
            *why += key + " [" + std::to_string(lo) + "," + std::to_string(hi) +
                    "] vs baseline [" + std::to_string(entry->lo) + "," +
                    std::to_string(entry->hi) + "]; ";
        return ok;
    };

    for (const auto& name : checks) {
        if (std::find(structural_suites.begin(), structural_suites.end(), name) !=
            structural_suites.end()) {
            SuiteOutcome res;
            if (name == "space") res = suite_space_sanity(fx.space, fx.op);
            else if (name == "calderon")
                res = suite_calderon(fx.op, samples, seed, band_lo, band_hi, per_octave);
            else if (name == "kernel-bounds")
                res = suite_kernel_bounds(fx.op, ctx.n_exp, gate);
            else if (name == "atoms") {
                AtomsSuiteParams params;
                params.M = m_order;
                params.samples = std::min(samples, 20);
                params.seed = seed;
                params.band_lo = band_lo;
                params.band_hi = std::min(band_hi, 8);
                params.per_octave = per_octave;
                res = suite_atoms(fx.op, fx.weight, params, ctx.n_exp, ctx.q_w, gate);
            } else if (name == "apps")
                res = suite_apps(ctx, gate);
            else
                res = suite_weights(fx.space, fx.weight, gate);
            if (!res.pass) all_pass = false;
            for (const auto& rep : res.reports) reports.push_back(report_to_json(rep));
            std::cout << (res.pass ? "[pass] " : "[FAIL] ") << name
                      << (res.detail.empty() ? "" : "  " + res.detail) << "\n";
            continue;
        }
        std::vector<EquivalenceReport> reps;
        try {
            reps = run_equivalence_check(name, ctx);
        } catch (const std::invalid_argument& e) {
            std::cerr << "usage error: " << e.what() << "\n";
            return 2;
        }
        for (auto& rep : reps) {
            const auto entry = store.find(rep.key);
            if (!entry) {
                store.record(rep.key,
                             {rep.ratio_min, rep.ratio_max, rep.ratio_median, now_string(),
                              cfg_hash},
                             rebaseline);
                store_dirty = true;
                rep.pass = true; // first run records the band
            } else if (rebaseline) {
                store.record(rep.key,
                             {rep.ratio_min, rep.ratio_max, rep.ratio_median, now_string(),
                              cfg_hash},
                             true);
                store_dirty = true;
                rep.pass = true;
            } else {
                rep.pass = store.within(rep.key, rep.ratio_min, rep.ratio_max);
            }
            if (rep.gating && !rep.pass) all_pass = false;
            Json j = report_to_json(rep);
            if (entry) j["baseline"] = {{"lo", entry->lo}, {"hi", entry->hi}};
            reports.push_back(j);
            std::cout << (rep.pass ? "[pass] " : (rep.gating ? "[FAIL] " : "[info] "))
                      << rep.key << "  ratio=[" << rep.ratio_min << ", " << rep.ratio_max
                      << "]\n";
        }
    }
    if (store_dirty) store.save(bpath);

    if (!report_out.empty())
        write_json_file(report_out, Json{{"suite", suite},
                                         {"samples", samples},
                                         {"seed", seed},
                                         {"config_hash", cfg_hash},
                                         {"reports", reports},
                                         {"timestamp", now_string()}});
    return all_pass ? 0 : 1;
}

int cmd_decompose(const std::string& space_path, const std::string& op_path,
                  const std::string& weight_path, const std::string& input, int M, double p,
                  double q, double alpha, double phi_half_width, int per_octave, bool dense_b,
                  const std::string& out) {
    const auto fxp = load_fixture(space_path, op_path, weight_path);
    Fixture& fx = *fxp;
    Vec f = read_csv_vector(input);
    if (f.size() != fx.space.size()) {
        std::cerr << "input length does not match the space\n";
        return 2;
    }
    f = fx.op.project_off_kernel(f);

    const PartitionOfUnity pou = make_partition_of_unity();
    const SpectralProfile phi = make_compact_phi(phi_half_width);
    const ScaleGrid grid = ScaleGrid::for_operator(fx.op, per_octave);
    const DyadicCubeTree tree = tree_covering_grid(fx.space, grid);

    const Decomposition dec =
        atomic_decompose(fx.op, f, M, p, fx.weight, pou, phi, tree, grid);
    const Reconstruction rec = reconstruct(fx.op, dec);
    const CoefficientNorms cn = coefficient_norms(fx.space, dec, alpha, p, q, fx.weight);

    Json atoms = Json::array();
    for (const auto& a : dec.atoms) {
        Json ja{{"level", a.level_nu},     {"cube_id", a.cube_id},
                {"s_Q", a.s_coeff},        {"support_eps", a.support_eps},
                {"size_const", a.size_const}, {"cancel_defect", a.cancel_defect}};
        if (dense_b) ja["b"] = a.b;
        atoms.push_back(ja);
    }
    Json rep{{"M", M},
             {"p", p},
             {"alpha", alpha},
             {"atom_count", dec.atoms.size()},
             {"skipped_cubes", dec.skipped_cubes},
             {"norm_const", dec.norm_const},
             {"residual", rec.residual},
             {"coefficient_norms", {{"besov", cn.besov}, {"triebel", cn.triebel}}},
             {"atoms", atoms},
             {"timestamp", now_string()}};
    if (out.empty()) std::cout << rep.dump(2) << "\n";
    else write_json_file(out, rep);
    return 0;
}

int cmd_apply(const std::string& space_path, const std::string& op_path,
              const std::string& weight_path, const std::string& input, const std::string& what,
              double s_power, const std::string& symbol_path, const std::string& out) {
    const auto fxp = load_fixture(space_path, op_path, weight_path);
    Fixture& fx = *fxp;
    const Vec f = read_csv_vector(input);
    if (f.size() != fx.space.size()) {
        std::cerr << "input length does not match the space\n";
        return 2;
    }

    Vec g;
    if (what == "fractional") {
        g = fractional_power(fx.op, fx.op.project_off_kernel(f), s_power);
    } else if (what == "multiplier") {
        if (symbol_path.empty()) {
            std::cerr << "multiplier needs --symbol\n";
            return 2;
        }
        g = laplace_type_multiplier(fx.op, symbol_from_config(load_json_file(symbol_path)), f);
    } else {
        std::cerr << "unknown operation: " << what << "\n";
        return 2;
    }
    if (out.empty()) {
        for (double v : g) std::cout << v << "\n";
    } else {
        write_csv_vector(out, g);
    }
    return 0;
}

int cmd_report(const std::string& in, const std::string& out) {
    const Json rep = load_json_file(in);
    const std::string csv = report_to_csv(rep);
    if (out.empty()) std::cout << csv;
    else {
        std::ofstream of(out);
        if (!of) throw std::runtime_error("cannot write " + out);
        of << csv;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted Besov/Triebel-Lizorkin machinery on finite spaces"};
    app.require_subcommand(1);

    std::string space_path, op_path, weight_path, input, out, report_out;
    std::string cubes_out, suite = "all", kind = "triebel", flavor = "dyadic";
    std::string symbol_path, baseline_path, apply_op = "fractional", report_in;
    double alpha = 0.0, p = 2.0, q = 2.0, lambda = 0.0, aperture = 1.0, s_power = 1.0;
    double phi_half_width = 1.0 / 2048.0;
    int samples = 100, band_lo = 1, band_hi = 16, per_octave = 16, m_order = 2;
    std::uint64_t seed = 7;
    bool rebaseline = false, dense_b = false, heat_report = false;

    auto add_fixture = [&](CLI::App* cmd, bool space_required = true) {
        auto* o = cmd->add_option("--space", space_path, "space config JSON");
        if (space_required) o->required();
        cmd->add_option("--operator", op_path, "operator config JSON");
        cmd->add_option("--weight", weight_path, "weight config JSON");
    };

    auto* build = app.add_subcommand("build", "construct a fixture and report diagnostics");
    add_fixture(build);
    build->add_option("--cubes", cubes_out, "write the dyadic cube tree JSON");
    build->add_flag("--heat-report", heat_report, "fit the heat-kernel bounds and wave profile");
    build->add_option("--out", report_out, "report JSON path (stdout otherwise)");

    auto* norm = app.add_subcommand("norm", "evaluate one norm of an input field");
    add_fixture(norm);
    norm->add_option("--input", input, "field CSV, one value per point")->required();
    norm->add_option("--kind", kind, "besov|triebel|f-infinity|bmo|hardy|sobolev");
    norm->add_option("--alpha", alpha, "smoothness");
    norm->add_option("--p", p, "integrability");
    norm->add_option("--q", q, "summability");
    norm->add_option("--flavor", flavor, "dyadic|continuous|peetre|g-function|lusin");
    norm->add_option("--lambda", lambda, "Peetre exponent");
    norm->add_option("--aperture", aperture, "Lusin aperture");
    norm->add_option("--s", s_power, "Sobolev smoothness");
    norm->add_option("--points-per-octave", per_octave, "scale grid resolution");
    norm->add_option("--out", out, "write JSON here");

    auto* verify = app.add_subcommand("verify", "run norm-equivalence suites against baselines");
    add_fixture(verify);
    verify->add_option("--suite", suite, "check name or 'all'");
    verify->add_option("--samples", samples, "random fields per check");
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_option("--band-lo", band_lo, "lowest eigen index in the random band");
    verify->add_option("--band-hi", band_hi, "highest eigen index in the random band");
    verify->add_option("--points-per-octave", per_octave, "scale grid resolution");
    verify->add_option("--M", m_order, "atom order for the atoms suite");
    verify->add_option("--report", report_out, "report JSON path");
    verify->add_option("--baseline", baseline_path, "baseline store (else $FSL_BASELINE_DIR)");
    verify->add_flag("--rebaseline", rebaseline, "record fresh baselines");

    auto* decompose = app.add_subcommand("decompose", "atomic decomposition of an input field");
    add_fixture(decompose);
    decompose->add_option("--input", input, "field CSV")->required();
    decompose->add_option("--M", m_order, "atom order");
    decompose->add_option("--p", p, "integrability for the coefficients");
    decompose->add_option("--alpha", alpha, "smoothness for the coefficient norms");
    decompose->add_option("--q", q, "summability for the coefficient norms");
    decompose->add_option("--phi-half-width", phi_half_width, "support half width of phi");
    decompose->add_option("--points-per-octave", per_octave, "scale grid resolution");
    decompose->add_flag("--dense-b", dense_b, "store dense b vectors in the JSON");
    decompose->add_option("--out", out, "decomposition JSON path");

    auto* apply = app.add_subcommand("apply", "apply a spectral operator to a field");
    add_fixture(apply);
    apply->add_option("--input", input, "field CSV")->required();
    apply->add_option("--op", apply_op, "fractional|multiplier");
    apply->add_option("--s", s_power, "fractional power");
    apply->add_option("--symbol", symbol_path, "multiplier symbol JSON");
    apply->add_option("--out", out, "output CSV path (stdout otherwise)");

    auto* report = app.add_subcommand("report", "emit CSV plot data from a report JSON");
    report->add_option("--in", report_in, "report JSON")->required();
    report->add_option("--out", out, "CSV path (stdout otherwise)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build->parsed())
            return cmd_build(space_path, op_path, weight_path, cubes_out, heat_report, report_out);
        if (norm->parsed())
            return cmd_norm(space_path, op_path, weight_path, input, kind, alpha, p, q, flavor,
                            lambda, aperture, s_power, per_octave, out);
        if (verify->parsed())
            return cmd_verify(space_path, op_path, weight_path, suite, samples, seed, band_lo,
                              band_hi, per_octave, m_order, report_out, baseline_path, rebaseline);
        if (decompose->parsed())
            return cmd_decompose(space_path, op_path, weight_path, input, m_order, p, q, alpha,
                                 phi_half_width, per_octave, dense_b, out);
        if (apply->parsed())
            return cmd_apply(space_path, op_path, weight_path, input, apply_op, s_power,
                             symbol_path, out);
        if (report->parsed()) return cmd_report(report_in, out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
