#include "fsl/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fsl/random.hpp"

namespace fsl {

namespace {

SpectralProfile negative_order_profile(const PartitionOfUnity& pou, int M) {
    SpectralProfile p;
    const auto psi = pou.psi.eval;
    p.eval = [psi, M](double xi) {
        if (!(xi > 0.0)) return 0.0;
        return std::pow(xi, -2.0 * M) * psi(xi);
    };
    p.compact_support = true;
    p.support_lo = pou.psi.support_lo;
    p.support_hi = pou.psi.support_hi;
    p.vanish_order = -M;
    p.name = "psi_M";
    return p;
}

std::vector<int> support_ball_members(const MetricMeasureSpace& s, int center, double radius) {
    std::vector<int> members;
    for (int y = 0; y < static_cast<int>(s.size()); ++y)
        if (s.d(center, y) <= radius + 1e-12) members.push_back(y);
    return members;
}

/// Fills a, support_eps, size_const, cancel_defect from b.
void measure_atom(const SelfAdjointOperator& op, Atom& atom, int M, double wq_pow) {
    const auto& s = op.space();
    std::vector<char> inside(s.size(), 0);
    for (int y : atom.support_ball) inside[static_cast<std::size_t>(y)] = 1;

    Vec cur = atom.b;
    atom.support_eps = 0.0;
    atom.size_const = 0.0;
    for (int k = 0; k <= 2 * M; ++k) {
        double max_all = 0.0, max_out = 0.0;
        for (std::size_t y = 0; y < s.size(); ++y) {
            const double v = std::abs(cur[y]);
            max_all = std::max(max_all, v);
            if (!inside[y]) max_out = std::max(max_out, v);
        }
        if (max_all > 0.0) {
            atom.support_eps = std::max(atom.support_eps, max_out / max_all);
            const double bound = std::pow(atom.ell, 2.0 * (M - k)) * wq_pow;
            atom.size_const = std::max(atom.size_const, max_all / bound);
        }
        if (k == M) atom.a = cur;
        if (k < 2 * M) cur = op.apply(cur);
    }

    double total = 0.0, l1 = 0.0;
    for (std::size_t y = 0; y < s.size(); ++y) {
        total += atom.a[y] * s.mu(static_cast<int>(y));
        l1 += std::abs(atom.a[y]) * s.mu(static_cast<int>(y));
    }
    atom.cancel_defect = (l1 > 0.0) ? std::abs(total) / l1 : 0.0;
}

} // namespace

DyadicCubeTree tree_covering_grid(const MetricMeasureSpace& s, const ScaleGrid& grid) {
    const int nu_min = std::min(
        static_cast<int>(std::floor(std::log2(2.0 / s.diameter()))), grid.nu_coarse());
    const int nu_max = std::max(
        static_cast<int>(std::ceil(std::log2(1.0 / s.min_positive_distance()))), grid.nu_fine());
    return build_dyadic_cubes(s, nu_min, nu_max);
}

Decomposition atomic_decompose(const SelfAdjointOperator& op, const Vec& f, int M, double p,
                               const Weight& w, const PartitionOfUnity& pou,
                               const SpectralProfile& phi, const DyadicCubeTree& tree,
                               const ScaleGrid& grid, const DecomposeOptions& opt) {
    if (M < 1) throw std::invalid_argument("atomic_decompose: need M >= 1");
    const double norm_integral = profile_log_integral(pou.psi, &phi);
    if (std::abs(norm_integral) <= opt.min_norm_integral)
        throw std::runtime_error("atomic_decompose: psi*Phi normalization degenerate");

    const auto& s = op.space();
    const Vec target = op.project_off_kernel(f);
    {
        Vec diff(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) diff[i] = f[i] - target[i];
        const double fn = norm2(f);
        if (fn > 0.0 && norm2(diff) / fn > 1e-10)
            throw std::invalid_argument("atomic_decompose: f has a kernel component; project first");
    }

    Decomposition dec;
    dec.norm_const = 1.0 / norm_integral;
    dec.M = M;
    dec.p = p;
    dec.target = target;

    const SpectralProfile psi_m = negative_order_profile(pou, M);
    const CoeffField field(op, target);

    // First pass: octave slices and the sup part of s_Q for every cube.
    // Cubes whose sup is floating-point dust relative to the global maximum
    // are skipped: an eigenvalue outside an octave contributes exact zeros
    // analytically, but round-off in the coefficients leaves ~1e-16 noise
    // that would otherwise mint meaningless atoms.
    struct LevelData {
        const CubeLevel* level;
        std::vector<Vec> slices;
        std::vector<double> ts, ws;
        std::vector<double> sups;
    };
    std::vector<LevelData> level_data;
    double global_sup = 0.0;
    for (const auto& level : tree.levels) {
        const auto [i0, i1] = grid.octave_span(level.nu);
        if (i0 == i1) continue; // level outside the scale window
        LevelData ld;
        ld.level = &level;
        for (int i = i0; i < i1; ++i) {
            ld.ts.push_back(grid.t()[static_cast<std::size_t>(i)]);
            ld.ws.push_back(grid.w()[static_cast<std::size_t>(i)]);
            ld.slices.push_back(field.at(psi_m, ld.ts.back()));
        }
        for (const auto& cube : level.cubes) {
            double sup = 0.0;
            for (int y : cube.members) {
                double acc = 0.0;
                for (std::size_t i = 0; i < ld.slices.size(); ++i)
                    acc += ld.ws[i] * std::abs(ld.slices[i][static_cast<std::size_t>(y)]);
                sup = std::max(sup, acc);
            }
            ld.sups.push_back(sup);
            global_sup = std::max(global_sup, sup);
        }
        level_data.push_back(std::move(ld));
    }
    const double dust = 1e-12 * global_sup;

    for (const auto& ld : level_data) {
        const auto& level = *ld.level;
        const auto& slices = ld.slices;
        const auto& ts = ld.ts;
        const auto& ws = ld.ws;
        // Phi(t_i sqrt(lambda)) tabulated once per scale point; the per-cube
        // application then reduces to two dense products.
        std::vector<Vec> phi_factors(ts.size(), Vec(op.size()));
        for (std::size_t i = 0; i < ts.size(); ++i)
            for (std::size_t k = 0; k < op.size(); ++k)
                phi_factors[i][k] = phi(ts[i] * std::sqrt(op.eigenvalues()[k]));
        for (std::size_t ci = 0; ci < level.cubes.size(); ++ci) {
            const auto& cube = level.cubes[ci];
            const double sup = ld.sups[ci];
            const double wq = w.set_mass(s, cube.members);
            const double wq_pow = std::pow(wq, -1.0 / p);
            const double s_q = std::pow(wq, 1.0 / p) * sup;
            if (sup <= dust) {
                ++dec.skipped_cubes;
                continue;
            }

            Vec b(s.size(), 0.0);
            for (std::size_t i = 0; i < slices.size(); ++i) {
                Vec masked(s.size(), 0.0);
                for (int y : cube.members)
                    masked[static_cast<std::size_t>(y)] = slices[i][static_cast<std::size_t>(y)];
                const Vec spread = op.apply_factors(phi_factors[i], masked);
                const double factor = ws[i] * std::pow(ts[i], 2.0 * M) / s_q;
                for (std::size_t y = 0; y < s.size(); ++y) b[y] += factor * spread[y];
            }

            Atom atom;
            atom.cube_id = cube.id;
            atom.level_nu = level.nu;
            atom.ell = level.scale;
            atom.center = cube.center;
            atom.s_coeff = s_q;
            atom.cube_members = cube.members;
            atom.support_ball =
                support_ball_members(s, cube.center, 3.0 * tree.kappa0 * level.scale);
            if (opt.truncate_to_ball) {
                std::vector<char> inside(s.size(), 0);
                for (int y : atom.support_ball) inside[static_cast<std::size_t>(y)] = 1;
                for (std::size_t y = 0; y < s.size(); ++y)
                    if (!inside[y]) b[y] = 0.0;
            }
            atom.b = std::move(b);
            measure_atom(op, atom, M, wq_pow);
            dec.atoms.push_back(std::move(atom));
        }
    }
    return dec;
}

Reconstruction reconstruct(const SelfAdjointOperator&, const Decomposition& dec) {
    Reconstruction rec;
    rec.f_hat.assign(dec.target.size(), 0.0);
    for (const auto& atom : dec.atoms)
        for (std::size_t y = 0; y < rec.f_hat.size(); ++y)
            rec.f_hat[y] += dec.norm_const * atom.s_coeff * atom.a[y];
    const double fn = norm2(dec.target);
    if (fn == 0.0) {
        rec.residual = 0.0;
        return rec;
    }
    Vec diff(dec.target.size());
    for (std::size_t y = 0; y < diff.size(); ++y) diff[y] = rec.f_hat[y] - dec.target[y];
    rec.residual = norm2(diff) / fn;
    return rec;
}

CoefficientNorms coefficient_norms(const MetricMeasureSpace& s, const Decomposition& dec,
                                   double alpha, double p, double q, const Weight& w) {
    CoefficientNorms out;
    const bool qinf = std::isinf(q);
    const bool pinf = std::isinf(p);

    std::map<int, std::vector<const Atom*>> by_level;
    for (const auto& a : dec.atoms) by_level[a.level_nu].push_back(&a);

    double besov_acc = 0.0, besov_sup = 0.0;
    Vec tl_acc(s.size(), 0.0);
    for (const auto& [nu, atoms] : by_level) {
        const double lvl = std::pow(2.0, nu * alpha);
        double inner = 0.0;
        Vec level_field(s.size(), 0.0); // sum_Q w(Q)^{-1/p} |s_Q| chi_Q
        for (const Atom* a : atoms) {
            inner = pinf ? std::max(inner, std::abs(a->s_coeff))
                         : inner + std::pow(std::abs(a->s_coeff), p);
            const double wq = w.set_mass(s, a->cube_members);
            const double v = (pinf ? 1.0 : std::pow(wq, -1.0 / p)) * std::abs(a->s_coeff);
            for (int y : a->cube_members) level_field[static_cast<std::size_t>(y)] += v;
        }
        const double term = lvl * (pinf ? inner : std::pow(inner, 1.0 / p));
        if (qinf) {
            besov_sup = std::max(besov_sup, term);
            for (std::size_t y = 0; y < s.size(); ++y)
                tl_acc[y] = std::max(tl_acc[y], lvl * level_field[y]);
        } else {
            besov_acc += std::pow(term, q);
            for (std::size_t y = 0; y < s.size(); ++y)
                tl_acc[y] += std::pow(lvl * level_field[y], q);
        }
    }
    out.besov = qinf ? besov_sup : std::pow(besov_acc, 1.0 / q);
    if (!qinf)
        for (double& v : tl_acc) v = std::pow(v, 1.0 / q);
    out.triebel = weighted_lp_norm(s, tl_acc, p, w);
    return out;
}

double synthesis_m_threshold(double n_exp, double q_w, double alpha, double p, double q) {
    const double denom = std::min({1.0, p, q});
    return 0.5 * n_exp + 0.5 * std::max(alpha, n_exp * q_w / denom - alpha);
}

Decomposition synthesize_random_decomposition(const SelfAdjointOperator& op,
                                              const DyadicCubeTree& tree, int M, double alpha,
                                              double p, double q, const Weight& w, double n_exp,
                                              double q_w, std::uint64_t seed) {
    const double threshold = synthesis_m_threshold(n_exp, q_w, alpha, p, q);
    if (!(M > threshold))
        throw std::invalid_argument(
            "synthesize_random_decomposition: M below the synthesis threshold");

    const auto& s = op.space();
    Rng rng(seed);

    Decomposition dec;
    dec.norm_const = 1.0;
    dec.M = M;
    dec.p = p;
    dec.target.assign(s.size(), 0.0);

    const double h = s.min_positive_distance();
    for (const auto& level : tree.levels) {
        // admissible atoms need room for the 2M-step operator stencil
        // between the cube and the boundary of 3B_Q
        if (2.0 * tree.kappa0 * level.scale < 2.0 * M * h) continue;
        for (const auto& cube : level.cubes) {
            if (rng.uniform() > 0.3) continue; // sparse selection

            Atom atom;
            atom.cube_id = cube.id;
            atom.level_nu = level.nu;
            atom.ell = level.scale;
            atom.center = cube.center;
            atom.cube_members = cube.members;
            atom.support_ball =
                support_ball_members(s, cube.center, 3.0 * tree.kappa0 * level.scale);

            // Smooth bump seeded inside Q, then rescaled so |L^k b| obeys the
            // size bound with constant 1 for every k = 0..2M.
            Vec b(s.size(), 0.0);
            const double width = std::max(tree.kappa0 * level.scale, 1e-12);
            for (int y : cube.members) {
                const double r = s.d(cube.center, y) / width;
                b[static_cast<std::size_t>(y)] = std::exp(-4.0 * r * r);
            }
            const double wq = w.set_mass(s, cube.members);
            const double wq_pow = std::pow(wq, -1.0 / p);
            double worst = 0.0;
            Vec cur = b;
            for (int k = 0; k <= 2 * M; ++k) {
                double mx = 0.0;
                for (double v : cur) mx = std::max(mx, std::abs(v));
                const double bound = std::pow(level.scale, 2.0 * (M - k)) * wq_pow;
                worst = std::max(worst, mx / bound);
                if (k < 2 * M) cur = op.apply(cur);
            }
            if (worst == 0.0) continue;
            for (double& v : b) v /= worst;

            atom.b = std::move(b);
            atom.s_coeff = std::abs(rng.normal());
            measure_atom(op, atom, M, wq_pow);
            dec.atoms.push_back(std::move(atom));
        }
    }

    // target = synthesized field (norm_const = 1, no Calderon factor here)
    for (const auto& atom : dec.atoms)
        for (std::size_t y = 0; y < s.size(); ++y)
            dec.target[y] += atom.s_coeff * atom.a[y];
    return dec;
}

ClassicalAtomReport classical_atom_check(const SelfAdjointOperator& op, const Atom& atom,
                                         double p, const Weight& w, double delta0,
                                         double conservation_defect) {
    ClassicalAtomReport rep;
    if (!(delta0 > 0.0) || conservation_defect > 1e-8) return rep; // prerequisites unmet
    rep.ran = true;

    const auto& s = op.space();
    std::vector<char> inside(s.size(), 0);
    for (int y : atom.support_ball) inside[static_cast<std::size_t>(y)] = 1;

    double wq = 0.0;
    for (int y : atom.cube_members) wq += w[y] * s.mu(y);
    const double scale = std::pow(wq, -1.0 / p);

    double max_all = 0.0, max_out = 0.0;
    for (std::size_t y = 0; y < s.size(); ++y) {
        const double v = std::abs(atom.a[y]);
        max_all = std::max(max_all, v);
        if (!inside[y]) max_out = std::max(max_out, v);
    }
    rep.support_eps = max_all > 0.0 ? max_out / max_all : 0.0;
    rep.sup_const = max_all / scale;

    for (int xi : atom.support_ball)
        for (int yi : atom.support_ball) {
            if (xi == yi) continue;
            const double dd = s.d(xi, yi);
            const double quotient =
                std::abs(atom.a[static_cast<std::size_t>(xi)] -
                         atom.a[static_cast<std::size_t>(yi)]) /
                (scale * std::pow(dd / atom.ell, delta0));
            rep.holder_const = std::max(rep.holder_const, quotient);
        }

    double total = 0.0, l1 = 0.0;
    for (std::size_t y = 0; y < s.size(); ++y) {
        total += atom.a[y] * s.mu(static_cast<int>(y));
        l1 += std::abs(atom.a[y]) * s.mu(static_cast<int>(y));
    }
    rep.cancel_defect = l1 > 0.0 ? std::abs(total) / l1 : 0.0;
    return rep;
}

} // namespace fsl
