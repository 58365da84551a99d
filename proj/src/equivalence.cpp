#include "fsl/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "fsl/apps.hpp"
#include "fsl/random.hpp"

namespace fsl {

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

std::string make_key(const std::string& check, const std::string& wname,
                     const std::map<std::string, double>& params) {
    std::string key = check + "|" + wname;
    for (const auto& [k, v] : params) key += "|" + k + "=" + fmt_num(v);
    return key;
}

/// Core loop: ratio statistics of normA/normB over seeded random fields.
EquivalenceReport ratio_report(const SuiteContext& ctx, const std::string& check,
                               std::map<std::string, double> params,
                               const std::function<double(const Vec&)>& norm_a,
                               const std::function<double(const Vec&)>& norm_b) {
    EquivalenceReport rep;
    rep.check = check;
    rep.params = std::move(params);
    rep.key = make_key(check, ctx.weight_name, rep.params);
    rep.samples = ctx.samples;
    rep.seed = ctx.seed;

    Rng rng(ctx.seed);
    std::vector<double> ratios;
    ratios.reserve(static_cast<std::size_t>(ctx.samples));
    for (int i = 0; i < ctx.samples; ++i) {
        const Vec f = random_band_field(*ctx.op, ctx.band_lo, ctx.band_hi, rng);
        const double a = norm_a(f);
        const double b = norm_b(f);
        if (!(b > 0.0)) throw std::runtime_error(check + ": vanishing reference norm");
        ratios.push_back(a / b);
    }
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    rep.ratio_min = sorted.front();
    rep.ratio_max = sorted.back();
    rep.ratio_median = sorted[sorted.size() / 2];
    return rep;
}

NormParams base_params(const SuiteContext& ctx, const PartitionOfUnity& pou, double alpha,
                       double p, double q, NormFlavor flavor) {
    NormParams np;
    np.alpha = alpha;
    np.p = p;
    np.q = q;
    np.weight = ctx.weight;
    np.pou = &pou;
    np.flavor = flavor;
    np.levels = level_range(*ctx.op);
    return np;
}

double peetre_lambda(const SuiteContext& ctx, double p, double q) {
    return ctx.n_exp * std::max(1.0, ctx.q_w) / std::min(p, q) + ctx.n_exp + 1.0;
}

using CheckFn = std::function<std::vector<EquivalenceReport>(const SuiteContext&)>;

std::vector<EquivalenceReport> check_two_partitions(const SuiteContext& ctx) {
    const PartitionOfUnity pou1 = make_partition_of_unity(1.0);
    const PartitionOfUnity pou2 = make_partition_of_unity(2.0);
    const double alpha = 0.3, p = 2.0;
    std::vector<EquivalenceReport> out;
    for (bool triebel : {false, true}) {
        const double q = triebel ? 1.4 : 2.0; // p = q would collapse F onto B
        NormParams np1 = base_params(ctx, pou1, alpha, p, q, NormFlavor::Dyadic);
        NormParams np2 = base_params(ctx, pou2, alpha, p, q, NormFlavor::Dyadic);
        auto na = [&, np2](const Vec& f) {
            return triebel ? triebel_norm(*ctx.op, f, np2).value : besov_norm(*ctx.op, f, np2).value;
        };
        auto nb = [&, np1](const Vec& f) {
            return triebel ? triebel_norm(*ctx.op, f, np1).value : besov_norm(*ctx.op, f, np1).value;
        };
        out.push_back(ratio_report(ctx, std::string("two-partitions/") + (triebel ? "F" : "B"),
                                   {{"alpha", alpha}, {"p", p}, {"q", q}}, na, nb));
    }
    return out;
}

std::vector<EquivalenceReport> check_dyadic_vs_continuous(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    const ScaleGrid grid = ScaleGrid::for_operator(*ctx.op, ctx.per_octave, 0);
    const double alpha = 0.3, p = 2.0;
    std::vector<EquivalenceReport> out;
    for (bool triebel : {false, true}) {
        const double q = triebel ? 1.4 : 2.0;
        NormParams dy = base_params(ctx, pou, alpha, p, q, NormFlavor::Dyadic);
        NormParams co = base_params(ctx, pou, alpha, p, q, NormFlavor::Continuous);
        co.grid = &grid;
        auto na = [&, co](const Vec& f) {
            return triebel ? triebel_norm(*ctx.op, f, co).value : besov_norm(*ctx.op, f, co).value;
        };
        auto nb = [&, dy](const Vec& f) {
            return triebel ? triebel_norm(*ctx.op, f, dy).value : besov_norm(*ctx.op, f, dy).value;
        };
        out.push_back(ratio_report(ctx, std::string("dyadic-vs-continuous/") + (triebel ? "F" : "B"),
                                   {{"alpha", alpha}, {"p", p}, {"q", q}}, na, nb));
    }
    return out;
}

std::vector<EquivalenceReport> check_peetre_vs_plain(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    const double alpha = 0.3, p = 2.0;
    std::vector<EquivalenceReport> out;
    for (bool triebel : {false, true}) {
        const double q = triebel ? 1.4 : 2.0;
        const double lambda = peetre_lambda(ctx, p, q);
        NormParams plain = base_params(ctx, pou, alpha, p, q, NormFlavor::Dyadic);
        NormParams peetre = base_params(ctx, pou, alpha, p, q, NormFlavor::Peetre);
        peetre.lambda_exp = lambda;
        auto na = [&, peetre](const Vec& f) {
            return triebel ? triebel_norm(*ctx.op, f, peetre).value
                           : besov_norm(*ctx.op, f, peetre).value;
        };
        auto nb = [&, plain](const Vec& f) {
            return triebel ? triebel_norm(*ctx.op, f, plain).value
                           : besov_norm(*ctx.op, f, plain).value;
        };
        auto rep = ratio_report(ctx, std::string("peetre-vs-plain/") + (triebel ? "F" : "B"),
                                {{"alpha", alpha}, {"p", p}, {"q", q}, {"lambda", lambda}}, na, nb);
        rep.extra["lambda"] = lambda;
        out.push_back(rep);
    }
    return out;
}

std::vector<EquivalenceReport> check_profile_characterization(const SuiteContext& ctx,
                                                              const std::string& name, int m,
                                                              double alpha) {
    const PartitionOfUnity pou = make_partition_of_unity();
    const SpectralProfile prof = sm_profile(m);
    const ScaleGrid grid = ScaleGrid::for_operator(*ctx.op, ctx.per_octave, 4);
    const double p = 2.0;
    std::vector<EquivalenceReport> out;
    for (bool triebel : {false, true}) {
        const double q = triebel ? 1.4 : 2.0;
        NormParams dy = base_params(ctx, pou, alpha, p, q, NormFlavor::Dyadic);
        NormParams co = base_params(ctx, pou, alpha, p, q, NormFlavor::Continuous);
        co.profile = &prof;
        co.grid = &grid;
        // rho = kernel component: fields are already off ker L; project anyway.
        auto na = [&, co](const Vec& f) {
            const Vec g = ctx.op->project_off_kernel(f);
            return triebel ? triebel_norm(*ctx.op, g, co).value : besov_norm(*ctx.op, g, co).value;
        };
        auto nb = [&, dy](const Vec& f) {
            return triebel ? triebel_norm(*ctx.op, f, dy).value : besov_norm(*ctx.op, f, dy).value;
        };
        out.push_back(ratio_report(ctx, name + (triebel ? "/F" : "/B"),
                                   {{"alpha", alpha}, {"p", p}, {"q", q}, {"m", double(m)}}, na,
                                   nb));
    }
    return out;
}

std::vector<EquivalenceReport> check_lp_identity(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    std::vector<EquivalenceReport> out;
    for (double p : {1.5, 2.0, 3.0}) {
        NormParams np = base_params(ctx, pou, 0.0, p, 2.0, NormFlavor::Dyadic);
        auto na = [&, np](const Vec& f) { return triebel_norm(*ctx.op, f, np).value; };
        auto nb = [&, p](const Vec& f) {
            return weighted_lp_norm(ctx.op->space(), f, p, *ctx.weight);
        };
        auto rep = ratio_report(ctx, "lp-identity", {{"p", p}}, na, nb);
        if (p == 2.0) {
            // Parseval band from the partition alone: the p=q=2 unweighted
            // ratio must live inside [min sqrt(S), max sqrt(S)],
            // S(lambda) = sum_j psi_j(lambda)^2 over the positive spectrum.
            double smin = 1e300, smax = 0.0;
            const LevelRange lr = level_range(*ctx.op);
            for (double lam : ctx.op->eigenvalues()) {
                if (lam <= 0.0) continue;
                double ssum = 0.0;
                for (int j = lr.j_min; j <= lr.j_max; ++j) {
                    const double v = pou.at_level(j, std::sqrt(lam));
                    ssum += v * v;
                }
                smin = std::min(smin, ssum);
                smax = std::max(smax, ssum);
            }
            rep.extra["parseval_lo"] = std::sqrt(smin);
            rep.extra["parseval_hi"] = std::sqrt(smax);
        }
        out.push_back(rep);
    }
    return out;
}

std::vector<EquivalenceReport> check_hardy_identity(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    const ScaleGrid grid = ScaleGrid::for_operator(*ctx.op, ctx.per_octave, 4);
    std::vector<EquivalenceReport> out;
    for (double p : {0.7, 1.0}) {
        NormParams np = base_params(ctx, pou, 0.0, p, 2.0, NormFlavor::Dyadic);
        auto na = [&, p](const Vec& f) { return hardy_norm(*ctx.op, f, p, *ctx.weight, grid); };
        auto nb = [&, np](const Vec& f) { return triebel_norm(*ctx.op, f, np).value; };
        out.push_back(ratio_report(ctx, "hardy-identity", {{"p", p}}, na, nb));
    }
    return out;
}

std::vector<EquivalenceReport> check_bmo_identity(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    const Weight unw = constant_weight(ctx.op->space());
    auto na = [&](const Vec& f) { return bmo_l_norm(*ctx.op, f, unw); };
    auto nb = [&](const Vec& f) {
        return f_infinity_norm(*ctx.op, f, 0.0, 2.0, unw, NormFlavor::Dyadic, pou).value;
    };
    std::vector<EquivalenceReport> out;
    out.push_back(ratio_report(ctx, "bmo-identity", {{"q", 2.0}}, na, nb));

    // Informational: classical mean oscillation against the same scale
    // (the exact theorem is specific to the Euclidean Laplacian).
    auto na2 = [&](const Vec& f) {
        return bmo_classical_norm(ctx.op->space(), ctx.op->project_off_kernel(f), unw);
    };
    auto rep = ratio_report(ctx, "bmo-classical", {{"q", 2.0}}, na2, nb);
    rep.gating = false;
    out.push_back(rep);
    return out;
}

std::vector<EquivalenceReport> check_sobolev_identity(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    std::vector<EquivalenceReport> out;
    for (double s : {-1.0, 1.0, 2.0}) {
        const double p = 2.0;
        NormParams np = base_params(ctx, pou, s, p, 2.0, NormFlavor::Dyadic);
        auto na = [&, s, p](const Vec& f) {
            return sobolev_norm(*ctx.op, f, s, p, *ctx.weight);
        };
        auto nb = [&, np](const Vec& f) { return triebel_norm(*ctx.op, f, np).value; };
        out.push_back(ratio_report(ctx, "sobolev-identity", {{"s", s}, {"p", p}}, na, nb));
    }
    return out;
}

std::vector<EquivalenceReport> check_hardy_sobolev_identity(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    const ScaleGrid grid = ScaleGrid::for_operator(*ctx.op, ctx.per_octave, 4);
    std::vector<EquivalenceReport> out;
    const double s = 1.0;
    for (double p : {0.7, 1.0}) {
        NormParams np = base_params(ctx, pou, s, p, 2.0, NormFlavor::Dyadic);
        auto na = [&, s, p](const Vec& f) {
            const Vec g = fractional_power(*ctx.op, f, s);
            return hardy_norm(*ctx.op, g, p, *ctx.weight, grid);
        };
        auto nb = [&, np](const Vec& f) { return triebel_norm(*ctx.op, f, np).value; };
        out.push_back(ratio_report(ctx, "hardy-sobolev-identity", {{"s", s}, {"p", p}}, na, nb));
    }
    return out;
}

std::vector<EquivalenceReport> check_change_of_angle(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    const ScaleGrid grid = ScaleGrid::for_operator(*ctx.op, ctx.per_octave, 0);
    const double p = 2.0, q = 2.0, alpha = 0.0;
    std::vector<EquivalenceReport> out;
    std::map<double, double> median_by_a;
    for (double a : {2.0, 4.0}) {
        auto na = [&, a](const Vec& f) {
            NormParams np = base_params(ctx, pou, alpha, p, q, NormFlavor::Lusin);
            np.grid = &grid;
            np.aperture = a;
            return triebel_norm(*ctx.op, f, np).value;
        };
        auto nb = [&](const Vec& f) {
            NormParams np = base_params(ctx, pou, alpha, p, q, NormFlavor::Lusin);
            np.grid = &grid;
            np.aperture = 1.0;
            return triebel_norm(*ctx.op, f, np).value;
        };
        auto rep = ratio_report(ctx, "change-of-angle", {{"a", a}, {"p", p}, {"q", q}}, na, nb);
        const double cap = std::max(1.0, ctx.q_w) * ctx.n_exp / std::min(p, q);
        rep.extra["growth_exponent_cap"] = cap;
        median_by_a[a] = rep.ratio_median;
        out.push_back(rep);
    }
    // slope between a=2 and a=4 in log2: cancels the unknown constant
    const double slope = std::log2(median_by_a[4.0] / median_by_a[2.0]);
    for (auto& rep : out) rep.extra["slope_2_to_4"] = slope;
    return out;
}

std::vector<EquivalenceReport> check_f_infinity_chars(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    const ScaleGrid grid = ScaleGrid::for_operator(*ctx.op, ctx.per_octave, 0);
    const double alpha = 0.0, q = 2.0;
    const double lambda = peetre_lambda(ctx, 2.0, q) + 2.0 * ctx.n_exp; // F-infinity needs more decay
    auto dyadic = [&](const Vec& f) {
        return f_infinity_norm(*ctx.op, f, alpha, q, *ctx.weight, NormFlavor::Dyadic, pou).value;
    };
    std::vector<EquivalenceReport> out;
    {
        auto na = [&](const Vec& f) {
            return f_infinity_norm(*ctx.op, f, alpha, q, *ctx.weight, NormFlavor::Continuous, pou,
                                   &grid)
                .value;
        };
        out.push_back(
            ratio_report(ctx, "f-infinity-chars/continuous", {{"alpha", alpha}, {"q", q}}, na, dyadic));
    }
    {
        auto na = [&](const Vec& f) {
            return f_infinity_norm(*ctx.op, f, alpha, q, *ctx.weight, NormFlavor::Peetre, pou,
                                   &grid, lambda)
                .value;
        };
        auto rep = ratio_report(ctx, "f-infinity-chars/peetre",
                                {{"alpha", alpha}, {"q", q}, {"lambda", lambda}}, na, dyadic);
        out.push_back(rep);
    }
    return out;
}

std::vector<EquivalenceReport> check_g_lusin(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    const ScaleGrid grid = ScaleGrid::for_operator(*ctx.op, ctx.per_octave, 0);
    const double alpha = 0.3, p = 2.0, q = 2.0;
    const double lambda = peetre_lambda(ctx, p, q);
    NormParams dy = base_params(ctx, pou, alpha, p, q, NormFlavor::Dyadic);
    auto dyn = [&, dy](const Vec& f) { return triebel_norm(*ctx.op, f, dy).value; };
    std::vector<EquivalenceReport> out;
    for (bool lusin : {true, false}) {
        auto na = [&, lusin](const Vec& f) {
            NormParams np = base_params(ctx, pou, alpha, p, q,
                                        lusin ? NormFlavor::Lusin : NormFlavor::GFunction);
            np.grid = &grid;
            np.lambda_exp = lambda;
            np.aperture = 1.0;
            return triebel_norm(*ctx.op, f, np).value;
        };
        out.push_back(ratio_report(ctx, std::string("g-lusin/") + (lusin ? "lusin" : "g"),
                                   {{"alpha", alpha}, {"p", p}, {"q", q}, {"lambda", lambda}}, na,
                                   dyn));
    }
    return out;
}

std::vector<EquivalenceReport> check_fractional_boundedness(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    std::vector<EquivalenceReport> out;
    const double alpha = 0.0, p = 2.0, q = 2.0;
    for (double s : {0.0, 1.0}) {
        NormParams at_alpha = base_params(ctx, pou, alpha, p, q, NormFlavor::Dyadic);
        NormParams at_shift = base_params(ctx, pou, alpha + s, p, q, NormFlavor::Dyadic);
        auto na = [&, s, at_alpha](const Vec& f) {
            const Vec g = fractional_power(*ctx.op, f, s);
            return triebel_norm(*ctx.op, g, at_alpha).value;
        };
        auto nb = [&, at_shift](const Vec& f) { return triebel_norm(*ctx.op, f, at_shift).value; };
        out.push_back(
            ratio_report(ctx, "fractional-boundedness", {{"s", s}, {"alpha", alpha}, {"p", p}}, na, nb));
    }
    return out;
}

std::vector<EquivalenceReport> check_multiplier_boundedness(const SuiteContext& ctx) {
    const PartitionOfUnity pou = make_partition_of_unity();
    const double alpha = 0.0, p = 2.0, q = 2.0;
    NormParams np = base_params(ctx, pou, alpha, p, q, NormFlavor::Dyadic);
    std::vector<EquivalenceReport> out;
    {
        const MultiplierProfile sym = constant_symbol(1.0);
        auto na = [&, np](const Vec& f) {
            const Vec g = laplace_type_multiplier(*ctx.op, sym, f);
            return triebel_norm(*ctx.op, g, np).value;
        };
        auto nb = [&, np](const Vec& f) { return triebel_norm(*ctx.op, f, np).value; };
        auto rep = ratio_report(ctx, "multiplier-boundedness", {{"symbol", 1.0}}, na, nb);
        rep.extra["expected_ratio"] = 0.5;
        out.push_back(rep);
    }
    {
        const MultiplierProfile sym = exp_symbol(0.5);
        auto na = [&, np](const Vec& f) {
            const Vec g = laplace_type_multiplier(*ctx.op, sym, f);
            return triebel_norm(*ctx.op, g, np).value;
        };
        auto nb = [&, np](const Vec& f) { return triebel_norm(*ctx.op, f, np).value; };
        auto rep = ratio_report(ctx, "multiplier-boundedness", {{"symbol", 2.0}}, na, nb);
        rep.extra["symbol_bound"] = sym.bound;
        out.push_back(rep);
    }
    return out;
}

const std::map<std::string, CheckFn>& registry() {
    static const std::map<std::string, CheckFn> reg = {
        {"two-partitions", check_two_partitions},
        {"dyadic-vs-continuous", check_dyadic_vs_continuous},
        {"peetre-vs-plain", check_peetre_vs_plain},
        {"sm-characterization",
         [](const SuiteContext& c) { return check_profile_characterization(c, "sm-characterization", 1, 0.0); }},
        {"heat-characterization",
         [](const SuiteContext& c) {
             return check_profile_characterization(c, "heat-characterization", 2, 0.3);
         }},
        {"lp-identity", check_lp_identity},
        {"hardy-identity", check_hardy_identity},
        {"bmo-identity", check_bmo_identity},
        {"sobolev-identity", check_sobolev_identity},
        {"hardy-sobolev-identity", check_hardy_sobolev_identity},
        {"change-of-angle", check_change_of_angle},
        {"f-infinity-chars", check_f_infinity_chars},
        {"g-lusin", check_g_lusin},
        {"fractional-boundedness", check_fractional_boundedness},
        {"multiplier-boundedness", check_multiplier_boundedness},
    };
    return reg;
}

} // namespace

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : registry()) v.push_back(k);
        return v;
    }();
    return names;
}

std::vector<EquivalenceReport> run_equivalence_check(const std::string& name,
                                                     const SuiteContext& ctx) {
    if (!ctx.op || !ctx.weight) throw std::invalid_argument("equivalence: context incomplete");
    const auto it = registry().find(name);
    if (it == registry().end()) throw std::invalid_argument("unknown check: " + name);
    return it->second(ctx);
}

} // namespace fsl
