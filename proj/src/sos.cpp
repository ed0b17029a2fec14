#include "rlab/sos.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rlab {

namespace {

std::vector<Monomial> make_window(int max1, int max2) {
    std::vector<Monomial> w;
    for (int a = 0; a <= max1; ++a) {
        for (int b = 0; b <= max2; ++b) w.emplace_back(a, b);
    }
    if (max1 < 0 || max2 < 0) w.clear();
    return w;
}

}  // namespace

VectorXcd CoefficientSystem::pack(const MatrixXcd& G2, const MatrixXcd& G1) const {
    VectorXcd g(n2() * n2() + n1() * n1());
    g.head(n2() * n2()) = Eigen::Map<const VectorXcd>(G2.data(), n2() * n2());
    g.tail(n1() * n1()) = Eigen::Map<const VectorXcd>(G1.data(), n1() * n1());
    return g;
}

void CoefficientSystem::unpack(const VectorXcd& g, MatrixXcd& G2, MatrixXcd& G1) const {
    G2 = Eigen::Map<const MatrixXcd>(g.data(), n2(), n2());
    G1 = Eigen::Map<const MatrixXcd>(g.data() + n2() * n2(), n1(), n1());
}

double CoefficientSystem::residual(const MatrixXcd& G2, const MatrixXcd& G1) const {
    return (A * pack(G2, G1) - rhs).cwiseAbs().maxCoeff();
}

CoefficientSystem coefficient_system(const RationalInnerFunction& phi) {
    const auto [m1, m2] = phi.bidegree();
    CoefficientSystem sys;
    sys.m1 = m1;
    sys.m2 = m2;
    sys.window2 = make_window(m1 - 1, m2);
    sys.window1 = make_window(m1, m2 - 1);
    const int na = m1 + 1, nb = m2 + 1;
    const int neq = na * nb * na * nb;
    const int n2 = sys.n2(), n1 = sys.n1();
    auto tidx = [na, nb](int a, int b, int c, int d) {
        return ((a * nb + b) * na + c) * nb + d;
    };

    sys.rhs = VectorXcd::Zero(neq);
    const auto& pc = phi.p.coeffs();
    const auto& tc = phi.p_tilde.coeffs();
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b)
            for (int c = 0; c < na; ++c)
                for (int d = 0; d < nb; ++d)
                    sys.rhs[tidx(a, b, c, d)] =
                        pc(a, b) * std::conj(pc(c, d)) - tc(a, b) * std::conj(tc(c, d));

    sys.A = MatrixXcd::Zero(neq, n2 * n2 + n1 * n1);
    for (int s = 0; s < n2; ++s) {
        const auto [a, b] = sys.window2[s];
        for (int t = 0; t < n2; ++t) {
            const auto [c, d] = sys.window2[t];
            const int col = t * n2 + s;  // column-major G2(s, t)
            sys.A(tidx(a, b, c, d), col) += 1.0;
            sys.A(tidx(a + 1, b, c + 1, d), col) -= 1.0;
        }
    }
    const int off = n2 * n2;
    for (int s = 0; s < n1; ++s) {
        const auto [a, b] = sys.window1[s];
        for (int t = 0; t < n1; ++t) {
            const auto [c, d] = sys.window1[t];
            const int col = off + t * n1 + s;
            sys.A(tidx(a, b, c, d), col) += 1.0;
            sys.A(tidx(a, b + 1, c, d + 1), col) -= 1.0;
        }
    }
    return sys;
}

namespace {

// kept-direction preference inside near-degenerate eigengroups; block 0 is
// G2 (favor low z2-degree) and block 1 is G1 (favor high z1-degree)
VectorXd preference_weights(const std::vector<Monomial>& window, int block) {
    VectorXd w(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        const auto [a, b] = window[i];
        w[i] = (block == 0) ? -(b * 64.0 + a) : (a * 64.0 - b);
    }
    return w;
}

// PSD projection (eigenvalue clip); with cap >= 0 also truncates to the top
// `cap` directions. The preference rotation resolves eigenvalue ties toward
// the spec'd extreme; it is applied only when seeding the capped iteration,
// since re-rotating transient near-ties every step breaks convergence.
MatrixXcd project_psd(const MatrixXcd& G, int cap, const VectorXd* pref) {
    const MatrixXcd H = 0.5 * (G + G.adjoint());
    if (H.rows() == 0) return H;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    MatrixXcd V = es.eigenvectors();
    const int n = static_cast<int>(lam.size());

    if (cap >= 0 && cap < n) {
        // descending order, then rotate tied groups toward the preference
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = n - 1 - i;  // eigh is ascending
        const double tie = 1e-7 * std::max(1.0, lam.maxCoeff());
        int g0 = 0;
        MatrixXcd Vo(n, n);
        VectorXd lo(n);
        for (int i = 0; i < n; ++i) {
            Vo.col(i) = V.col(idx[i]);
            lo[i] = lam[idx[i]];
        }
        while (pref != nullptr && g0 < n) {
            int g1 = g0 + 1;
            while (g1 < n && std::abs(lo[g1] - lo[g0]) <= tie) ++g1;
            if (g1 - g0 > 1) {
                MatrixXcd Vg = Vo.middleCols(g0, g1 - g0);
                MatrixXcd M = Vg.adjoint() * pref->asDiagonal() * Vg;
                Eigen::SelfAdjointEigenSolver<MatrixXcd> gs(0.5 * (M + M.adjoint()));
                // descending preference within the group
                MatrixXcd W = gs.eigenvectors().rowwise().reverse();
                Vo.middleCols(g0, g1 - g0) = Vg * W;
            }
            g0 = g1;
        }
        MatrixXcd out = MatrixXcd::Zero(n, n);
        for (int i = 0; i < cap; ++i) {
            if (lo[i] <= 0.0) break;
            out += lo[i] * Vo.col(i) * Vo.col(i).adjoint();
        }
        return out;
    }
    return V * lam.asDiagonal() * V.adjoint();
}

struct Projector {
    const CoefficientSystem& sys;
    Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod;
    VectorXd pref2, pref1;

    explicit Projector(const CoefficientSystem& s)
        : sys(s),
          cod(s.A),
          pref2(preference_weights(s.window2, 0)),
          pref1(preference_weights(s.window1, 1)) {}

    VectorXcd affine(const VectorXcd& g) const { return g - cod.solve(sys.A * g - sys.rhs); }

    VectorXcd psd(const VectorXcd& g, int cap2, int cap1, bool use_pref = false) const {
        MatrixXcd G2, G1;
        sys.unpack(g, G2, G1);
        G2 = project_psd(G2, cap2, use_pref ? &pref2 : nullptr);
        G1 = project_psd(G1, cap1, use_pref ? &pref1 : nullptr);
        return sys.pack(G2, G1);
    }

    double residual(const VectorXcd& g) const {
        return (sys.A * g - sys.rhs).cwiseAbs().maxCoeff();
    }
};

int numerical_rank(const MatrixXcd& G, double tol) {
    if (G.rows() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (G + G.adjoint()), Eigen::EigenvaluesOnly);
    return static_cast<int>((es.eigenvalues().array() > tol).count());
}

// Dykstra for the two convex sets {affine solutions} and {PSD x PSD}
bool dykstra(const Projector& P, VectorXcd& x, int max_iter, double tol, double* aff_res,
             double* psd_defect) {
    VectorXcd p = VectorXcd::Zero(x.size());
    VectorXcd q = VectorXcd::Zero(x.size());
    *aff_res = P.residual(x);
    for (int it = 0; it < max_iter && *aff_res >= tol; ++it) {
        const VectorXcd y = P.affine(x + p);
        p = x + p - y;
        x = P.psd(y + q, -1, -1);
        q = y + q - x;
        *aff_res = P.residual(x);
        *psd_defect = (x - P.psd(x, -1, -1)).cwiseAbs().maxCoeff();
    }
    *psd_defect = 0.0;  // x is the PSD-projected iterate
    return *aff_res < tol;
}

// plain alternating projections with rank caps (nonconvex set, so no
// Dykstra corrections); stall detection via a windowed best-residual check
bool pocs_capped(const Projector& P, VectorXcd& x, int cap2, int cap1, int max_iter, double tol) {
    x = P.psd(x, cap2, cap1, /*use_pref=*/true);  // orientation chosen at the seed
    double best = std::numeric_limits<double>::infinity();
    double window_best = best;
    for (int it = 0; it < max_iter; ++it) {
        x = P.psd(P.affine(x), cap2, cap1);
        const double res = P.residual(x);
        if (res < tol) return true;
        best = std::min(best, res);
        if (it % 1000 == 999) {
            if (best > 0.9 * window_best) return false;  // stalled
            window_best = best;
        }
    }
    return false;
}

// Gauss-Newton/LM on the factored form G2 = F2^H F2, G1 = F1^H F1
double bm_polish(const CoefficientSystem& sys, MatrixXcd& F2, MatrixXcd& F1, int iters) {
    const int r2 = static_cast<int>(F2.rows()), n2 = static_cast<int>(F2.cols());
    const int r1 = static_cast<int>(F1.rows()), n1 = static_cast<int>(F1.cols());
    const int nparam = 2 * (r2 * n2 + r1 * n1);
    const int m = static_cast<int>(sys.rhs.size());

    auto gvec = [&](const MatrixXcd& A2, const MatrixXcd& A1) {
        return sys.pack(A2.adjoint() * A2, A1.adjoint() * A1);
    };
    auto resid = [&](const MatrixXcd& A2, const MatrixXcd& A1) -> VectorXcd {
        return sys.A * gvec(A2, A1) - sys.rhs;
    };

    VectorXcd r = resid(F2, F1);
    double cost = r.norm();
    double lam = 1e-3;
    MatrixXd Jr(2 * m, nparam);
    for (int it = 0; it < iters; ++it) {
        // columns of d(residual)/d(param) via dG = dF^H F + F^H dF
        int col = 0;
        auto fill_block = [&](const MatrixXcd& F, int rdim, int ndim, bool is2) {
            for (int k = 0; k < rdim; ++k) {
                for (int a = 0; a < ndim; ++a) {
                    for (int part = 0; part < 2; ++part) {
                        MatrixXcd dF = MatrixXcd::Zero(rdim, ndim);
                        dF(k, a) = (part == 0) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
                        const MatrixXcd dG = dF.adjoint() * F + F.adjoint() * dF;
                        VectorXcd dg = VectorXcd::Zero(sys.A.cols());
                        if (is2) {
                            dg.head(static_cast<Eigen::Index>(ndim) * ndim) =
                                Eigen::Map<const VectorXcd>(dG.data(), ndim * ndim);
                        } else {
                            dg.tail(static_cast<Eigen::Index>(ndim) * ndim) =
                                Eigen::Map<const VectorXcd>(dG.data(), ndim * ndim);
                        }
                        const VectorXcd Jc = sys.A * dg;
                        Jr.col(col).head(m) = Jc.real();
                        Jr.col(col).tail(m) = Jc.imag();
                        ++col;
                    }
                }
            }
        };
        fill_block(F2, r2, n2, true);
        fill_block(F1, r1, n1, false);

        VectorXd rr(2 * m);
        rr.head(m) = r.real();
        rr.tail(m) = r.imag();
        bool stepped = false;
        while (lam < 1e9) {
            MatrixXd M = Jr.transpose() * Jr + lam * MatrixXd::Identity(nparam, nparam);
            const VectorXd dx = M.llt().solve(-Jr.transpose() * rr);
            MatrixXcd F2n = F2, F1n = F1;
            int q = 0;
            for (int k = 0; k < r2; ++k)
                for (int a = 0; a < n2; ++a, q += 2) F2n(k, a) += cplx(dx[q], dx[q + 1]);
            for (int k = 0; k < r1; ++k)
                for (int a = 0; a < n1; ++a, q += 2) F1n(k, a) += cplx(dx[q], dx[q + 1]);
            const VectorXcd rn = resid(F2n, F1n);
            if (rn.norm() < cost) {
                F2 = F2n;
                F1 = F1n;
                r = rn;
                cost = rn.norm();
                lam = std::max(lam * 0.3, 1e-12);
                stepped = true;
                break;
            }
            lam *= 10.0;
        }
        if (!stepped || cost < 1e-14) break;
    }
    return r.cwiseAbs().maxCoeff();
}

MatrixXcd factors_to_matrix(const std::vector<VectorXcd>& vs, int n) {
    MatrixXcd F(vs.size(), n);
    for (std::size_t k = 0; k < vs.size(); ++k) F.row(k) = vs[k].adjoint();
    return F;  // F^H F = sum v v^H
}

}  // namespace

std::vector<VectorXcd> gram_factor(const MatrixXcd& G, double rank_tol) {
    if (G.rows() == 0) return {};
    const MatrixXcd H = 0.5 * (G + G.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    if (es.eigenvalues().minCoeff() < -rank_tol) {
        std::ostringstream os;
        os << "gram_factor: matrix is not PSD (min eigenvalue " << es.eigenvalues().minCoeff()
           << ")";
        throw Error(os.str());
    }
    std::vector<VectorXcd> out;
    for (int k = static_cast<int>(es.eigenvalues().size()) - 1; k >= 0; --k) {
        const double lam = es.eigenvalues()[k];
        if (lam <= rank_tol) continue;
        VectorXcd v = std::sqrt(lam) * es.eigenvectors().col(k);
        Eigen::Index jmax = 0;
        v.cwiseAbs().maxCoeff(&jmax);
        v *= std::polar(1.0, -std::arg(v[jmax]));  // deterministic phase
        out.push_back(std::move(v));
    }
    return out;
}

SosDecomposition solve_sos(const CoefficientSystem& sys, const SolveSosOptions& opts) {
    Projector P(sys);
    VectorXcd x = VectorXcd::Zero(sys.A.cols());
    double aff_res = 0.0, psd_defect = 0.0;
    if (!dykstra(P, x, opts.max_iter, opts.tol, &aff_res, &psd_defect)) {
        std::ostringstream os;
        os << "solve_sos: Dykstra did not converge after " << opts.max_iter
           << " iterations (affine residual " << aff_res << ", PSD defect " << psd_defect << ")";
        throw ConvergenceError(os.str());
    }

    MatrixXcd G2, G1;
    sys.unpack(x, G2, G1);
    int r2 = numerical_rank(G2, opts.rank_tol);
    int r1 = numerical_rank(G1, opts.rank_tol);

    // reduction: preferred caps (m1, m2) first, then greedy single steps
    const int want2 = std::min(r2, sys.m1), want1 = std::min(r1, sys.m2);
    if (want2 < r2 || want1 < r1) {
        VectorXcd y = x;
        if (pocs_capped(P, y, want2, want1, opts.max_iter, opts.tol)) {
            x = y;
            r2 = want2;
            r1 = want1;
        } else {
            bool improved = true;
            while (improved) {
                improved = false;
                for (int blk = 0; blk < 2 && !improved; ++blk) {
                    const int c2 = r2 - (blk == 0 ? 1 : 0), c1 = r1 - (blk == 1 ? 1 : 0);
                    if (c2 < 0 || c1 < 0) continue;
                    VectorXcd z = x;
                    if (pocs_capped(P, z, c2, c1, opts.max_iter / 2, opts.tol)) {
                        x = z;
                        r2 = c2;
                        r1 = c1;
                        improved = true;
                    }
                }
            }
        }
    }

    // polish the coefficient residual in factored form at the achieved ranks
    sys.unpack(x, G2, G1);
    {
        MatrixXcd F2 = factors_to_matrix(gram_factor(G2, opts.truncation_tol), sys.n2());
        MatrixXcd F1 = factors_to_matrix(gram_factor(G1, opts.truncation_tol), sys.n1());
        if (F2.rows() > 0 || F1.rows() > 0) {
            MatrixXcd B2 = F2, B1 = F1;
            const double polished = bm_polish(sys, B2, B1, 200);
            if (polished < P.residual(x)) {
                G2 = B2.adjoint() * B2;
                G1 = B1.adjoint() * B1;
                x = sys.pack(G2, G1);
            }
        }
    }

    SosDecomposition dec;
    sys.unpack(x, dec.G2, dec.G1);
    dec.G2 = 0.5 * (dec.G2 + dec.G2.adjoint()).eval();
    dec.G1 = 0.5 * (dec.G1 + dec.G1.adjoint()).eval();
    dec.window2 = sys.window2;
    dec.window1 = sys.window1;
    dec.residual = sys.residual(dec.G2, dec.G1);
    dec.rank2 = numerical_rank(dec.G2, opts.rank_tol);
    dec.rank1 = numerical_rank(dec.G1, opts.rank_tol);
    return dec;
}

SosDecomposition solve_sos(const RationalInnerFunction& phi, const SolveSosOptions& opts) {
    return solve_sos(coefficient_system(phi), opts);
}

cplx kernel_numerator(const MatrixXcd& G, const std::vector<Monomial>& window, cplx z1, cplx z2,
                      cplx w1, cplx w2) {
    const int n = static_cast<int>(window.size());
    VectorXcd mz(n), mw(n);
    for (int i = 0; i < n; ++i) {
        const auto [a, b] = window[i];
        mz[i] = std::pow(z1, a) * std::pow(z2, b);
        mw[i] = std::pow(w1, a) * std::pow(w2, b);
    }
    return (mz.transpose() * G * mw.conjugate()).value();
}

double model_residual(const RationalInnerFunction& phi, const SosDecomposition& dec, int samples,
                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw = [&]() {
        const double r = 0.95 * std::sqrt(unif(rng));
        return std::polar(r, 2.0 * kPi * unif(rng));
    };
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const cplx z1 = draw(), z2 = draw(), w1 = draw(), w2 = draw();
        const cplx pz = phi.p.evaluate(z1, z2), pw = phi.p.evaluate(w1, w2);
        const cplx k2 = kernel_numerator(dec.G2, dec.window2, z1, z2, w1, w2) / (pz * std::conj(pw));
        const cplx k1 = kernel_numerator(dec.G1, dec.window1, z1, z2, w1, w2) / (pz * std::conj(pw));
        const cplx lhs = 1.0 - evaluate_inner(phi, z1, z2) * std::conj(evaluate_inner(phi, w1, w2));
        const cplx rhs = (1.0 - z1 * std::conj(w1)) * k2 + (1.0 - z2 * std::conj(w2)) * k1;
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace rlab
