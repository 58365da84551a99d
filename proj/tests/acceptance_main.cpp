// Acceptance suite: runs every gating criterion on the desk-scale fixtures
// (1D periodic grid N=64, 2D periodic grid 16x16; unit-speed Laplacians;
// constant and power-1/2 weights) and prints one pass/fail line per
// criterion. Ratio bands gate against the recorded baseline store with a
// +-10% drift allowance. Exit status 0 iff everything passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fsl/io.hpp"
#include "fsl/random.hpp"
#include "fsl/suites.hpp"

using namespace fsl;

namespace {

struct Clock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

struct Harness {
    BaselineStore store;
    std::string store_path;
    bool rebaseline = false;
    bool store_dirty = false;
    bool all_ok = true;
    std::vector<std::string> failures;

    void criterion(int n, const std::string& name, bool ok, double seconds, double cap_seconds,
                   const std::string& detail) {
        const bool time_ok = seconds < cap_seconds;
        const bool pass = ok && time_ok;
        if (!pass) {
            all_ok = false;
            failures.push_back(name);
        }
        std::printf("[%s] criterion %d: %-38s (%.1fs/%.0fs) %s\n", pass ? "PASS" : "FAIL", n,
                    name.c_str(), seconds, cap_seconds, detail.c_str());
    }

    GateFn prefixed_gate(const std::string& prefix) {
        return [this, prefix](const std::string& key, double lo, double hi, std::string* why) {
            return gate(prefix + key, lo, hi, why);
        };
    }

    /// Record-or-compare an empirical band. Returns pass.
    bool gate(const std::string& key, double lo, double hi, std::string* why = nullptr) {
        const auto entry = store.find(key);
        if (!entry || rebaseline) {
            store.record(key, {lo, hi, 0.5 * (lo + hi), "", ""}, true);
            store_dirty = true;
            return true;
        }
        const bool ok = store.within(key, lo, hi, 1.10);
        if (!ok && why)
            *why += key + " [" + std::to_string(lo) + "," + std::to_string(hi) +
                    "] vs baseline [" + std::to_string(entry->lo) + "," +
                    std::to_string(entry->hi) + "]; ";
        return ok;
    }
};

struct Fixture {
    std::string name;
    std::unique_ptr<MetricMeasureSpace> space;
    std::unique_ptr<SelfAdjointOperator> op;
    Weight w_const;
    Weight w_power;
    DoublingReport doubling;
    double qw_const = 1.0;
    double qw_power = 1.0;
};

Fixture make_fixture(const std::string& name, int dim, int side, double spacing) {
    Fixture fx;
    fx.name = name;
    fx.space = std::make_unique<MetricMeasureSpace>(build_grid_space(dim, side, spacing));
    fx.op = std::make_unique<SelfAdjointOperator>(build_laplacian(*fx.space));
    fx.w_const = constant_weight(*fx.space);
    fx.w_power = power_weight(*fx.space, 0, 0.5);
    fx.doubling = estimate_doubling(*fx.space);
    fx.qw_const = critical_indices(*fx.space, fx.w_const).qw_est;
    fx.qw_power = critical_indices(*fx.space, fx.w_power).qw_est;
    return fx;
}

SuiteContext make_ctx(const Fixture& fx, bool power_weight, int samples, int band_hi = 16) {
    SuiteContext ctx;
    ctx.op = fx.op.get();
    ctx.weight = power_weight ? &fx.w_power : &fx.w_const;
    ctx.weight_name = fx.name + (power_weight ? "/wpow" : "/w1");
    ctx.samples = samples;
    ctx.seed = 7;
    ctx.band_lo = 1;
    ctx.band_hi = band_hi;
    ctx.per_octave = 32;
    ctx.n_exp = fx.doubling.n_exp;
    ctx.q_w = power_weight ? fx.qw_power : fx.qw_const;
    return ctx;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// --- criterion 1: partition telescoping ------------------------------------
void run_telescoping(Harness& h, const std::vector<Fixture>& fixtures) {
    Clock clock;
    double worst = 0.0;
    for (const auto& fx : fixtures)
        for (double shape : {1.0, 2.0}) {
            const auto pou = make_partition_of_unity(shape);
            const LevelRange lr = level_range(*fx.op, 2);
            for (double lam : fx.op->eigenvalues()) {
                if (lam <= 0.0) continue;
                double sum = 0.0;
                for (int j = lr.j_min; j <= lr.j_max; ++j)
                    sum += pou.at_level(j, std::sqrt(lam));
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        }
    h.criterion(1, "partition telescoping", worst <= 1e-10, clock.seconds(), 1.0,
                "max defect " + fmt(worst));
}

// --- criterion 2: Calderon reproducing formulas -----------------------------
void run_calderon(Harness& h, const std::vector<Fixture>& fixtures) {
    Clock clock;
    bool ok = true;
    std::string detail;
    for (const auto& fx : fixtures) {
        const auto res = suite_calderon(*fx.op, 100, 7, 1, 16, 32);
        if (!res.pass) {
            ok = false;
            detail += fx.name + ": " + res.detail + "; ";
        } else {
            detail += fx.name + " max " + fmt(res.reports.front().extra.at("residual_max")) + "; ";
        }
    }
    h.criterion(2, "Calderon reconstruction", ok, clock.seconds(), 10.0, detail);
}

// --- criterion 3: kernel bounds ---------------------------------------------
void run_kernel_bounds(Harness& h, std::vector<Fixture>& fixtures) {
    Clock clock;
    bool ok = true;
    std::string why;
    for (const auto& fx : fixtures) {
        const auto res =
            suite_kernel_bounds(*fx.op, fx.doubling.n_exp, h.prefixed_gate(fx.name + "/"));
        if (!res.pass) {
            ok = false;
            why += fx.name + ": " + res.detail;
        }
    }
    h.criterion(3, "kernel decay bounds", ok, clock.seconds(), 60.0, why.empty() ? "stable" : why);
}

// --- criteria 4/5: norm equivalence suites ----------------------------------
void run_equivalences(Harness& h, std::vector<Fixture>& fixtures) {
    Clock clock4;
    bool ok4 = true;
    std::string why4;
    double parseval_checked = 0.0;

    auto run_and_gate = [&](const SuiteContext& ctx, const std::string& check, bool& ok,
                            std::string& why) {
        for (const auto& rep : run_equivalence_check(check, ctx)) {
            if (!rep.gating) continue;
            if (!h.gate(rep.key, rep.ratio_min, rep.ratio_max, &why)) ok = false;
            if (check == "lp-identity" && rep.params.at("p") == 2.0 &&
                ctx.weight_name.find("/w1") != std::string::npos) {
                const double lo = rep.extra.at("parseval_lo"), hi = rep.extra.at("parseval_hi");
                if (rep.ratio_min < lo - 1e-9 || rep.ratio_max > hi + 1e-9) {
                    ok = false;
                    why += "parseval band violated; ";
                }
                parseval_checked += 1.0;
            }
            if (check == "change-of-angle") {
                const double cap = rep.extra.at("growth_exponent_cap");
                const double slope = rep.extra.at("slope_2_to_4");
                if (slope > cap + 0.25) {
                    ok = false;
                    why += "angle growth slope " + fmt(slope) + " above cap " + fmt(cap) + "; ";
                }
                if (rep.ratio_min < 1.0 - 1e-12) {
                    ok = false;
                    why += "aperture monotonicity violated; ";
                }
            }
        }
    };

    const std::vector<std::string> crit4_checks = {
        "two-partitions", "dyadic-vs-continuous", "peetre-vs-plain",   "sm-characterization",
        "heat-characterization", "g-lusin",        "change-of-angle", "f-infinity-chars"};
    // 1D fixture: both weights, full set
    for (bool pw : {false, true}) {
        const SuiteContext ctx = make_ctx(fixtures[0], pw, 100);
        for (const auto& check : crit4_checks) run_and_gate(ctx, check, ok4, why4);
        run_and_gate(ctx, "lp-identity", ok4, why4); // carries the Parseval band
    }
    // 2D fixture: constant weight, lighter subset
    {
        const SuiteContext ctx = make_ctx(fixtures[1], false, 100, 12);
        for (const auto& check : {"two-partitions", "dyadic-vs-continuous", "lp-identity"})
            run_and_gate(ctx, check, ok4, why4);
    }
    if (parseval_checked == 0.0) {
        ok4 = false;
        why4 += "parseval band never checked; ";
    }
    h.criterion(4, "norm equivalence suites", ok4, clock4.seconds(), 300.0,
                why4.empty() ? "all bands within baselines" : why4);

    Clock clock5;
    bool ok5 = true;
    std::string why5;
    for (bool pw : {false, true}) {
        const SuiteContext ctx1 = make_ctx(fixtures[0], pw, 100);
        for (const auto& check :
             {"hardy-identity", "sobolev-identity", "bmo-identity", "hardy-sobolev-identity"})
            run_and_gate(ctx1, check, ok5, why5);
        if (pw) continue;
        const SuiteContext ctx2 = make_ctx(fixtures[1], false, 60, 12);
        for (const auto& check : {"hardy-identity", "sobolev-identity", "bmo-identity"})
            run_and_gate(ctx2, check, ok5, why5);
    }
    {
        // lp-identity across both weights on both fixtures
        for (std::size_t fi : {0u, 1u})
            for (bool pw : {false, true}) {
                const SuiteContext ctx = make_ctx(fixtures[fi], pw, fi == 0 ? 100 : 60, 12);
                run_and_gate(ctx, "lp-identity", ok5, why5);
            }
    }
    h.criterion(5, "space identifications", ok5, clock5.seconds(), 300.0,
                why5.empty() ? "all bands within baselines" : why5);
}

// --- criterion 6: atomic decomposition --------------------------------------
void run_atoms(Harness& h, std::vector<Fixture>& fixtures) {
    Clock clock;
    bool ok = true;
    std::string why;
    for (std::size_t fi : {0u, 1u}) {
        const Fixture& fx = fixtures[fi];
        AtomsSuiteParams params;
        params.M = (fi == 0) ? 2 : 1; // 2M grid-stencil steps must fit in 3B_Q
        params.samples = (fi == 0) ? 20 : 6;
        const auto res = suite_atoms(*fx.op, fx.w_const, params, fx.doubling.n_exp, fx.qw_const,
                                     h.prefixed_gate(fx.name + "/"));
        if (!res.pass) {
            ok = false;
            why += fx.name + ": " + res.detail;
        }
    }
    h.criterion(6, "atomic decomposition", ok, clock.seconds(), 120.0,
                why.empty() ? "residuals, atoms, bounds within gates" : why);
}

// --- criterion 7: applications ----------------------------------------------
void run_apps(Harness& h, std::vector<Fixture>& fixtures) {
    Clock clock;
    bool ok = true;
    std::string why;
    for (bool pw : {false, true}) {
        const SuiteContext ctx = make_ctx(fixtures[0], pw, 40);
        const auto res = suite_apps(ctx, h.prefixed_gate(""));
        if (!res.pass) {
            ok = false;
            why += res.detail;
        }
    }
    h.criterion(7, "fractional powers and multipliers", ok, clock.seconds(), 60.0,
                why.empty() ? "all identities within tolerance" : why);
}

// --- criterion 8: weighted infrastructure -----------------------------------
void run_weights(Harness& h, std::vector<Fixture>& fixtures) {
    Clock clock;
    bool ok = true;
    std::string why;
    for (const auto& fx : fixtures) {
        const auto res =
            suite_weights(*fx.space, fx.w_power, h.prefixed_gate(fx.name + "/"));
        if (!res.pass) {
            ok = false;
            why += fx.name + ": " + res.detail;
        }
    }
    h.criterion(8, "weighted infrastructure", ok, clock.seconds(), 120.0,
                why.empty() ? "exact unit constant, monotone, dual, stable" : why);
}

// --- criterion 9: determinism ------------------------------------------------
void run_determinism(Harness& h, std::vector<Fixture>& fixtures) {
    Clock clock;
    const SuiteContext ctx = make_ctx(fixtures[0], false, 20);
    auto snapshot = [&]() {
        Json arr = Json::array();
        for (const auto& name : {"two-partitions", "lp-identity"})
            for (const auto& rep : run_equivalence_check(name, ctx))
                arr.push_back(report_to_json(rep));
        return arr.dump();
    };
    const std::string a = snapshot();
    const std::string b = snapshot();
    h.criterion(9, "determinism", a == b, clock.seconds(), 120.0,
                a == b ? "byte-identical reports" : "reports differ between runs");
}

} // namespace

int main(int argc, char** argv) {
    std::string baseline_path = "baselines.json";
    bool rebaseline = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--baseline") == 0 && i + 1 < argc) baseline_path = argv[++i];
        else if (std::strcmp(argv[i], "--rebaseline") == 0) rebaseline = true;
    }

    Harness h;
    h.store_path = baseline_path;
    h.store = BaselineStore::load(baseline_path);
    h.rebaseline = rebaseline;
    if (rebaseline) std::printf("(recording fresh baselines into %s)\n", baseline_path.c_str());

    std::printf("building fixtures...\n");
    std::vector<Fixture> fixtures;
    fixtures.push_back(make_fixture("grid1d", 1, 64, 1.0 / 64.0));
    fixtures.push_back(make_fixture("grid2d", 2, 16, 1.0));

    run_telescoping(h, fixtures);
    run_calderon(h, fixtures);
    run_kernel_bounds(h, fixtures);
    run_equivalences(h, fixtures);
    run_atoms(h, fixtures);
    run_apps(h, fixtures);
    run_weights(h, fixtures);
    run_determinism(h, fixtures);

    if (h.store_dirty) h.store.save(h.store_path);

    if (h.all_ok) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: FAILURES:");
    for (const auto& f : h.failures) std::printf(" %s;", f.c_str());
    std::printf("\n");
    return 1;
}
