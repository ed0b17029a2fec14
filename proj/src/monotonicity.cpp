#include "rlab/monotonicity.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "rlab/boundary.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace rlab {

double CommutingTuple::commutation_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        for (std::size_t j = i + 1; j < matrices.size(); ++j) {
            worst = std::max(worst, (matrices[i] * matrices[j] - matrices[j] * matrices[i])
                                        .cwiseAbs()
                                        .maxCoeff());
        }
    }
    return worst;
}

double CommutingTuple::diagonalization_defect() const {
    double worst = 0.0;
    for (int j = 0; j < d; ++j) {
        const MatrixXcd rebuilt =
            Q * spectra.row(j).asDiagonal().toDenseMatrix().cast<cplx>() * Q.adjoint();
        worst = std::max(worst, (matrices[j] - rebuilt).cwiseAbs().maxCoeff());
    }
    return worst;
}

namespace {

MatrixXcd haar_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    MatrixXcd X(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) X(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<MatrixXcd> qr(X);
    MatrixXcd Q = qr.householderQ();
    const MatrixXcd Rm = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        const cplx r = Rm(i, i);
        Q.col(i) *= (std::abs(r) > 0) ? r / std::abs(r) : cplx(1.0);
    }
    return Q;
}

MatrixXcd hermitize(const MatrixXcd& M) { return 0.5 * (M + M.adjoint()); }

double min_eig_herm(const MatrixXcd& M) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(M), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

std::pair<CommutingTuple, CommutingTuple> random_commuting_pair(int n, int d, Interval box,
                                                                double gap, std::uint64_t seed) {
    if (gap < 0.0 || box.hi - box.lo <= gap) {
        throw Error("random_commuting_pair: box too small for the requested gap");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const MatrixXcd Q = haar_unitary(n, rng);

    CommutingTuple A, B;
    A.d = B.d = d;
    A.n = B.n = n;
    A.Q = B.Q = Q;
    A.spectra.resize(d, n);
    B.spectra.resize(d, n);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < n; ++i) {
            const double a = box.lo + unif(rng) * (box.hi - box.lo - gap);
            const double b = a + gap + unif(rng) * (box.hi - a - gap);
            A.spectra(j, i) = a;
            B.spectra(j, i) = b;
        }
    }
    for (int j = 0; j < d; ++j) {
        A.matrices.push_back(hermitize(
            Q * A.spectra.row(j).asDiagonal().toDenseMatrix().cast<cplx>() * Q.adjoint()));
        B.matrices.push_back(hermitize(
            Q * B.spectra.row(j).asDiagonal().toDenseMatrix().cast<cplx>() * Q.adjoint()));
    }
    return {A, B};
}

cplx PickEvaluator::eval_complex(cplx w1, cplx w2) const {
    const cplx z1 = inverse_cayley(w1), z2 = inverse_cayley(w2);
    const cplx v = evaluate_realization(*R_, z1, z2);
    if (std::abs(v - 1.0) < 1e-10) {
        throw SingularPointError("PickEvaluator: phi attains 1, alpha has a pole", w1, w2);
    }
    return cayley(v);
}

double PickEvaluator::eval_real(double x1, double x2) const {
    const cplx z1 = inverse_cayley(x1), z2 = inverse_cayley(x2);
    const cplx v = boundary_continuation(*R_, z1, z2);
    if (std::abs(v - 1.0) < 1e-10) {
        throw SingularPointError("PickEvaluator: phi attains 1 on the rectangle image", x1, x2);
    }
    const cplx f = cayley(v);
    if (std::abs(f.imag()) > 1e-8 * std::max(1.0, std::abs(f))) {
        std::ostringstream os;
        os << "PickEvaluator: non-real value " << f.imag() << " at a real point";
        throw Error(os.str());
    }
    return f.real();
}

PickEvaluator pick_from_inner(const Realization& R) { return PickEvaluator(R); }

RectCheck check_rectangle(const Realization& R, Interval box, int samples) {
    RectCheck out;
    out.min_abs_phi_minus_one = std::numeric_limits<double>::infinity();
    out.min_sigma = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double x1 = box.lo + (box.hi - box.lo) * i / (samples - 1.0);
        const cplx z1 = inverse_cayley(x1);
        for (int j = 0; j < samples; ++j) {
            const double x2 = box.lo + (box.hi - box.lo) * j / (samples - 1.0);
            const cplx z2 = inverse_cayley(x2);
            const MatrixXcd M = R.one_minus_ezd(z1, z2);
            double smin = 1.0;
            if (R.dim() > 0) {
                Eigen::JacobiSVD<MatrixXcd> svd(M);
                smin = svd.singularValues().minCoeff();
            }
            out.min_sigma = std::min(out.min_sigma, smin);
            if (smin > 1e-8) {
                const cplx v = boundary_continuation(R, z1, z2);
                out.min_abs_phi_minus_one = std::min(out.min_abs_phi_minus_one, std::abs(v - 1.0));
            }
        }
    }
    out.admissible = out.min_sigma > 1e-8 && out.min_abs_phi_minus_one > 1e-6;
    return out;
}

MatrixXcd evaluate_pick_matrix(const NevanlinnaData& N, const MatrixXcd& W1,
                               const MatrixXcd& W2) {
    const int n = static_cast<int>(W1.rows());
    if (W2.rows() != n || W1.cols() != n || W2.cols() != n) {
        throw Error("evaluate_pick_matrix: W1, W2 must be square of equal size");
    }
    const double im1 = min_eig_herm((W1 - W1.adjoint()) / cplx(0, 2));
    const double im2 = min_eig_herm((W2 - W2.adjoint()) / cplx(0, 2));
    const bool upper = im1 > 0.0 && im2 > 0.0;
    const bool positive = (W1 - W1.adjoint()).cwiseAbs().maxCoeff() < 1e-12 &&
                          (W2 - W2.adjoint()).cwiseAbs().maxCoeff() < 1e-12 &&
                          min_eig_herm(W1) > 0.0 && min_eig_herm(W2) > 0.0 &&
                          N.t22_min_eig >= -1e-9;
    if (!upper && !positive) {
        throw Error("evaluate_pick_matrix: inputs must both have positive-definite imaginary "
                    "part, or both be Hermitian positive definite with T22 PSD");
    }

    const int K = N.dim();
    if (K == 0) return N.T11 * MatrixXcd::Identity(n, n);
    const Eigen::Index nn = static_cast<Eigen::Index>(K) * n;
    MatrixXcd M = MatrixXcd::Zero(nn, nn);
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j < K; ++j) {
            M.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n, n) =
                N.T22(i, j) * MatrixXcd::Identity(n, n);
        }
        M.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(i) * n, n, n) +=
            (i < N.split1) ? W1 : W2;
    }
    MatrixXcd T21l = MatrixXcd::Zero(nn, n), T12l = MatrixXcd::Zero(n, nn);
    for (int i = 0; i < K; ++i) {
        T21l.block(static_cast<Eigen::Index>(i) * n, 0, n, n) =
            N.T21[i] * MatrixXcd::Identity(n, n);
        T12l.block(0, static_cast<Eigen::Index>(i) * n, n, n) =
            N.T12[i] * MatrixXcd::Identity(n, n);
    }
    Eigen::FullPivLU<MatrixXcd> lu(M);
    if (!lu.isInvertible()) {
        throw Error("evaluate_pick_matrix: lifted W + T22 resolvent is singular");
    }
    return N.T11 * MatrixXcd::Identity(n, n) - T12l * lu.solve(T21l);
}

MatrixXcd evaluate_pick_matrix_schur(const Realization& R, const MatrixXcd& W1,
                                     const MatrixXcd& W2) {
    const int n = static_cast<int>(W1.rows());
    const MatrixXcd In = MatrixXcd::Identity(n, n);
    auto cay_inv = [&](const MatrixXcd& W) {
        return (W - cplx(0, 1) * In) * (W + cplx(0, 1) * In).partialPivLu().solve(In).eval();
    };
    const MatrixXcd Z1 = cay_inv(W1), Z2 = cay_inv(W2);
    const int K = R.dim();
    if (K == 0) {
        const MatrixXcd Phi = R.A * In;
        return cplx(0, 1) * (In + Phi) * (In - Phi).partialPivLu().solve(In);
    }
    const Eigen::Index nn = static_cast<Eigen::Index>(K) * n;
    MatrixXcd EW = MatrixXcd::Zero(nn, nn);
    for (int i = 0; i < K; ++i) {
        EW.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(i) * n, n, n) =
            (i < R.split1) ? Z1 : Z2;
    }
    MatrixXcd Dl(nn, nn), Cl(nn, n), Bl(n, nn);
    for (int i = 0; i < K; ++i) {
        Cl.block(static_cast<Eigen::Index>(i) * n, 0, n, n) = R.C[i] * In;
        Bl.block(0, static_cast<Eigen::Index>(i) * n, n, n) = R.B[i] * In;
        for (int j = 0; j < K; ++j) {
            Dl.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n, n) =
                R.D(i, j) * In;
        }
    }
    const MatrixXcd Phi =
        R.A * In + Bl * (MatrixXcd::Identity(nn, nn) - EW * Dl).partialPivLu().solve(EW * Cl);
    const MatrixXcd one_minus = In - Phi;
    Eigen::FullPivLU<MatrixXcd> lu(one_minus);
    if (!lu.isInvertible()) {
        throw Error("evaluate_pick_matrix_schur: 1 - Phi(W) is singular (alpha pole)");
    }
    return cplx(0, 1) * (In + Phi) * lu.solve(In);
}

MatrixXcd evaluate_commuting(const std::function<double(const VectorXd&)>& f,
                             const CommutingTuple& t) {
    VectorXcd diag(t.n);
    for (int i = 0; i < t.n; ++i) diag[i] = f(t.spectra.col(i));
    return hermitize(t.Q * diag.asDiagonal() * t.Q.adjoint());
}

MonotonicityReport monotonicity_test(const ScalarFn& f, int d, const MonotonicityOptions& opts,
                                     const MatrixFn& matrix_path) {
    MonotonicityReport rep;
    rep.trials = opts.trials;
    rep.records.resize(opts.trials);
    std::vector<double> cross(opts.trials, -1.0);

    parallel_for(static_cast<std::size_t>(opts.trials), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t t = lo; t < hi; ++t) {
            const std::uint64_t tseed = mix_seed(opts.seed, t);
            const int n = 1 + static_cast<int>(t % opts.n_max);
            auto [A, B] = random_commuting_pair(n, d, opts.box, opts.gap, tseed);
            const MatrixXcd fA = evaluate_commuting(f, A);
            const MatrixXcd fB = evaluate_commuting(f, B);
            rep.records[t] = {n, tseed, min_eig_herm(fB - fA)};
            if (matrix_path && opts.crosscheck_stride > 0 &&
                t % static_cast<std::size_t>(opts.crosscheck_stride) == 0) {
                const MatrixXcd lifted = matrix_path(B.matrices);
                cross[t] = (hermitize(lifted) - fB).cwiseAbs().maxCoeff();
            }
        }
    });

    rep.global_min_eig = std::numeric_limits<double>::infinity();
    for (int t = 0; t < opts.trials; ++t) {
        rep.global_min_eig = std::min(rep.global_min_eig, rep.records[t].min_eig);
        if (rep.records[t].min_eig < -opts.tol) rep.failures.push_back(t);
        if (cross[t] >= 0.0) {
            ++rep.crosschecks;
            rep.crosscheck_max_diff = std::max(rep.crosscheck_max_diff, cross[t]);
        }
    }
    return rep;
}

void PerspectiveRep::validate(double tol) const {
    if (Ys.empty()) throw Error("PerspectiveRep: no Y blocks");
    MatrixXcd sum = MatrixXcd::Zero(r(), r());
    for (const auto& Y : Ys) {
        if (Y.rows() != r() || Y.cols() != r()) throw Error("PerspectiveRep: shape mismatch");
        if (min_eig_herm(Y) < -tol) throw Error("PerspectiveRep: Y block is not PSD");
        sum += Y;
    }
    if ((sum - MatrixXcd::Identity(r(), r())).cwiseAbs().maxCoeff() > tol) {
        throw Error("PerspectiveRep: Y blocks do not sum to the identity");
    }
}

PerspectiveRep random_perspective(int d, int r, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<MatrixXcd> raw;
    MatrixXcd total = MatrixXcd::Zero(r, r);
    for (int k = 0; k < d; ++k) {
        MatrixXcd X(r, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) X(i, j) = cplx(g(rng), g(rng));
        MatrixXcd G = X * X.adjoint() + 0.05 * MatrixXcd::Identity(r, r);
        raw.push_back(G);
        total += G;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(total);
    const MatrixXcd isqrt = es.operatorInverseSqrt();
    PerspectiveRep P;
    for (auto& G : raw) P.Ys.push_back(hermitize(isqrt * G * isqrt));
    P.nu.resize(r);
    for (int i = 0; i < r; ++i) P.nu[i] = cplx(g(rng), g(rng));
    P.nu /= P.nu.norm();
    P.validate(1e-10);
    return P;
}

cplx perspective_eval(const PerspectiveRep& P, const std::vector<cplx>& z) {
    if (static_cast<int>(z.size()) != P.d()) throw Error("perspective_eval: arity mismatch");
    MatrixXcd S = MatrixXcd::Zero(P.r(), P.r());
    for (int i = 0; i < P.d(); ++i) {
        if (std::abs(z[i]) < 1e-14 || z[i].real() <= 0.0 && z[i].imag() == 0.0) {
            throw Error("perspective_eval: z_i must be invertible with positive part");
        }
        S += P.Ys[i] / z[i];
    }
    Eigen::FullPivLU<MatrixXcd> lu(S);
    if (!lu.isInvertible()) throw Error("perspective_eval: sum z_i^{-1} Y_i is singular");
    return P.nu.adjoint() * lu.solve(P.nu);
}

MatrixXcd perspective_eval_matrix(const PerspectiveRep& P, const std::vector<MatrixXcd>& Z) {
    if (static_cast<int>(Z.size()) != P.d()) throw Error("perspective_eval_matrix: arity mismatch");
    const int n = static_cast<int>(Z[0].rows());
    const int r = P.r();
    const Eigen::Index rn = static_cast<Eigen::Index>(r) * n;
    MatrixXcd S = MatrixXcd::Zero(rn, rn);
    const MatrixXcd In = MatrixXcd::Identity(n, n);
    for (int k = 0; k < P.d(); ++k) {
        if (min_eig_herm(Z[k]) <= 0.0) {
            throw Error("perspective_eval_matrix: inputs must be positive definite");
        }
        const MatrixXcd Zinv = Z[k].partialPivLu().solve(In);
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < r; ++j) {
                S.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n,
                        n) += P.Ys[k](i, j) * Zinv;
            }
        }
    }
    MatrixXcd NuL = MatrixXcd::Zero(rn, n);
    for (int i = 0; i < r; ++i)
        NuL.block(static_cast<Eigen::Index>(i) * n, 0, n, n) = P.nu[i] * In;
    Eigen::FullPivLU<MatrixXcd> lu(S);
    if (!lu.isInvertible()) throw Error("perspective_eval_matrix: lifted sum is singular");
    return NuL.adjoint() * lu.solve(NuL);
}

}  // namespace rlab
