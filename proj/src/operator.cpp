#include "fsl/operator.hpp"

#include <algorithm>
#include <cmath>

namespace fsl {

SelfAdjointOperator::SelfAdjointOperator(const MetricMeasureSpace& space, Mat matrix)
    : space_(&space), matrix_(std::move(matrix)) {
    const std::size_t n = space.size();
    if (matrix_.rows() != n || matrix_.cols() != n)
        throw std::invalid_argument("operator: matrix size mismatch");

    // mu A must be symmetric.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double lhs = space.mu(static_cast<int>(i)) * matrix_(i, j);
            const double rhs = space.mu(static_cast<int>(j)) * matrix_(j, i);
            if (std::abs(lhs - rhs) > 1e-10 * (1.0 + std::abs(lhs)))
                throw std::invalid_argument("operator: not mu-self-adjoint");
        }

    // Symmetrize with D^{1/2} A D^{-1/2}, eigensolve, map back.
    Vec musq(n), muisq(n);
    for (std::size_t i = 0; i < n; ++i) {
        musq[i] = std::sqrt(space.mu(static_cast<int>(i)));
        muisq[i] = 1.0 / musq[i];
    }
    Mat b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = musq[i] * matrix_(i, j) * muisq[j];
    SymEig eig = eig_symmetric(std::move(b));

    eigenvalues_ = std::move(eig.values);
    const double lmax = std::max(std::abs(eigenvalues_.front()), std::abs(eigenvalues_.back()));
    for (double& l : eigenvalues_) {
        if (l < -1e-10 * std::max(lmax, 1.0))
            throw std::invalid_argument("operator: negative eigenvalue beyond clamp tolerance");
        if (l < 0.0) l = 0.0;
    }
    kernel_dim_ = 0;
    for (double l : eigenvalues_)
        if (l <= 1e-12 * std::max(lmax, 1.0)) ++kernel_dim_;
    for (int k = 0; k < kernel_dim_; ++k) eigenvalues_[static_cast<std::size_t>(k)] = 0.0;

    eigenvectors_ = Mat(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) eigenvectors_(i, k) = muisq[i] * eig.vectors(i, k);

    synth_weighted_ = Mat(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            synth_weighted_(i, k) = eigenvectors_(i, k) * space.mu(static_cast<int>(i));
}

Vec SelfAdjointOperator::eigenvector(int k) const {
    Vec u(size());
    for (std::size_t i = 0; i < size(); ++i) u[i] = eigenvectors_(i, static_cast<std::size_t>(k));
    return u;
}

double SelfAdjointOperator::lambda_min_positive() const {
    for (double l : eigenvalues_)
        if (l > 0.0) return l;
    throw std::runtime_error("operator: spectrum has no positive eigenvalue");
}

Vec SelfAdjointOperator::apply(const Vec& f) const { return matvec(matrix_, f); }

Vec SelfAdjointOperator::apply_power(const Vec& f, int k) const {
    Vec g = f;
    for (int i = 0; i < k; ++i) g = apply(g);
    return g;
}

Vec SelfAdjointOperator::coefficients(const Vec& f) const {
    // c_k = sum_i U(i,k) mu(i) f(i)
    const std::size_t n = size();
    Vec c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double fi = f[i];
        if (fi == 0.0) continue;
        const double* row = synth_weighted_.data().data() + i * n;
        for (std::size_t k = 0; k < n; ++k) c[k] += row[k] * fi;
    }
    return c;
}

Vec SelfAdjointOperator::synthesize(const Vec& coeff) const {
    const std::size_t n = size();
    Vec f(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = eigenvectors_.data().data() + i * n;
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += row[k] * coeff[k];
        f[i] = s;
    }
    return f;
}

Vec SelfAdjointOperator::spectral_apply(const std::function<double(double)>& F,
                                        const Vec& f) const {
    Vec c = coefficients(f);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= F(eigenvalues_[k]);
    return synthesize(c);
}

Vec SelfAdjointOperator::apply_factors(const Vec& factors, const Vec& f) const {
    Vec c = coefficients(f);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= factors[k];
    return synthesize(c);
}

Mat SelfAdjointOperator::spectral_kernel(const std::function<double(double)>& F) const {
    const std::size_t n = size();
    Mat scaled(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            scaled(i, k) = eigenvectors_(i, k) * F(eigenvalues_[k]);
    return matmul(scaled, transpose(eigenvectors_));
}

Vec SelfAdjointOperator::project_off_kernel(const Vec& f) const {
    Vec c = coefficients(f);
    for (int k = 0; k < kernel_dim_; ++k) c[static_cast<std::size_t>(k)] = 0.0;
    return synthesize(c);
}

SelfAdjointOperator build_laplacian(const MetricMeasureSpace& s, LaplacianNormalization norm) {
    const std::size_t n = s.size();
    if (s.edges().empty() && n > 1)
        throw std::invalid_argument("build_laplacian: space records no edges");

    Mat a(n, n, 0.0);
    for (const auto& e : s.edges()) {
        const double scale = (norm == LaplacianNormalization::UnitSpeed) ? 1.0 / (e.len * e.len) : 1.0;
        // Conductance symmetric in mu: c_xy = scale * (mu_x + mu_y)/2, rows
        // divided by mu; on a uniform grid this is the h^{-2} stencil.
        const double c = scale * 0.5 * (s.mu(e.i) + s.mu(e.j));
        const auto i = static_cast<std::size_t>(e.i);
        const auto j = static_cast<std::size_t>(e.j);
        a(i, i) += c / s.mu(e.i);
        a(j, j) += c / s.mu(e.j);
        a(i, j) -= c / s.mu(e.i);
        a(j, i) -= c / s.mu(e.j);
    }
    return SelfAdjointOperator(s, std::move(a));
}

Mat heat_kernel(const SelfAdjointOperator& op, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: need t > 0");
    return op.spectral_kernel([t](double l) { return std::exp(-t * l); });
}

HeatKernelReport gaussian_bound_fit(const SelfAdjointOperator& op,
                                    const std::vector<double>& t_grid, double const_cap) {
    const auto& s = op.space();
    const int n = static_cast<int>(s.size());
    HeatKernelReport rep;
    rep.t_grid = t_grid;

    static const double c_candidates[] = {2.0, 4.0, 8.0, 16.0};
    Vec best_const(4, 0.0);
    double conservation = 0.0;
    Vec holder_num_max(21, 0.0); // per delta candidate 0.05 .. 1.0

    for (double t : t_grid) {
        const Mat p = heat_kernel(op, t);
        const double rt = std::sqrt(t);
        Vec vol(static_cast<std::size_t>(n));
        for (int x = 0; x < n; ++x) vol[static_cast<std::size_t>(x)] = s.volume(x, rt);

        for (int y = 0; y < n; ++y) {
            double row_sum = 0.0;
            for (int x = 0; x < n; ++x) {
                row_sum += p(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) * s.mu(x);
                const double d = s.d(x, y);
                const double pv = std::abs(p(static_cast<std::size_t>(x), static_cast<std::size_t>(y)));
                if (pv == 0.0) continue;
                for (int ci = 0; ci < 4; ++ci) {
                    const double bound_inv =
                        vol[static_cast<std::size_t>(x)] * std::exp(d * d / (c_candidates[ci] * t));
                    if (std::isfinite(bound_inv))
                        best_const[static_cast<std::size_t>(ci)] =
                            std::max(best_const[static_cast<std::size_t>(ci)], pv * bound_inv);
                }
            }
            conservation = std::max(conservation, std::abs(row_sum - 1.0));
        }

        // (H): |p_t(x,y) - p_t(xb,y)| vs (d(x,xb)/sqrt t)^delta V(x,sqrt t)^{-1} e^{-d^2/(c t)}
        for (int x = 0; x < n; ++x)
            for (int xb = 0; xb < n; ++xb) {
                const double dxx = s.d(x, xb);
                if (!(dxx > 0.0) || !(dxx < rt)) continue;
                for (int y = 0; y < n; ++y) {
                    const double diff =
                        std::abs(p(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) -
                                 p(static_cast<std::size_t>(xb), static_cast<std::size_t>(y)));
                    if (diff == 0.0) continue;
                    const double d = s.d(x, y);
                    const double envelope =
                        std::exp(-d * d / (8.0 * t)) / vol[static_cast<std::size_t>(x)];
                    for (int di = 0; di < 21; ++di) {
                        const double delta = 0.05 * (di);
                        const double ratio = diff / (std::pow(dxx / rt, delta) * envelope);
                        holder_num_max[static_cast<std::size_t>(di)] =
                            std::max(holder_num_max[static_cast<std::size_t>(di)], ratio);
                    }
                }
            }
    }

    int best = 0;
    for (int ci = 1; ci < 4; ++ci)
        if (best_const[static_cast<std::size_t>(ci)] < best_const[static_cast<std::size_t>(best)])
            best = ci;
    rep.gauss_c = c_candidates[best];
    rep.gauss_const = best_const[static_cast<std::size_t>(best)];
    rep.fit_ok = rep.gauss_const <= const_cap;
    rep.max_violation = rep.fit_ok ? 1.0 : rep.gauss_const / const_cap;
    rep.conservation_defect = conservation;

    // Largest delta whose constant stays within a fixed factor of the GE fit.
    const double holder_cap = std::max(10.0 * rep.gauss_const, 10.0);
    rep.holder_delta0 = 0.0;
    for (int di = 20; di >= 0; --di) {
        if (holder_num_max[static_cast<std::size_t>(di)] <= holder_cap &&
            holder_num_max[static_cast<std::size_t>(di)] > 0.0) {
            rep.holder_delta0 = 0.05 * di;
            rep.holder_const = holder_num_max[static_cast<std::size_t>(di)];
            break;
        }
    }
    return rep;
}

std::vector<WaveProfilePoint> wave_support_profile(const SelfAdjointOperator& op, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("wave_support_profile: need t > 0");
    const auto& s = op.space();
    const int n = static_cast<int>(s.size());
    const Mat k = op.spectral_kernel([t](double l) { return std::cos(t * std::sqrt(l)); });

    std::vector<double> rhos = {0.0};
    for (double d : s.distance_set()) rhos.push_back(d);

    std::vector<WaveProfilePoint> profile;
    for (double rho : rhos) {
        WaveProfilePoint pt;
        pt.rho = rho;
        pt.rho_over_t = rho / t;
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                if (s.d(x, y) > rho)
                    pt.max_abs = std::max(
                        pt.max_abs,
                        std::abs(k(static_cast<std::size_t>(x), static_cast<std::size_t>(y))));
        profile.push_back(pt);
    }
    return profile;
}

} // namespace fsl
