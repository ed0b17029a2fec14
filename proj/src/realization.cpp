#include "rlab/realization.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <random>
#include <sstream>

namespace rlab {

MatrixXcd Realization::U() const {
    MatrixXcd u(dim() + 1, dim() + 1);
    u(0, 0) = A;
    u.block(0, 1, 1, dim()) = B;
    u.block(1, 0, dim(), 1) = C;
    u.block(1, 1, dim(), dim()) = D;
    return u;
}

VectorXcd Realization::ez_diagonal(cplx z1, cplx z2) const {
    VectorXcd d(dim());
    d.head(split1).setConstant(z1);
    d.tail(split2).setConstant(z2);
    return d;
}

MatrixXcd Realization::one_minus_ezd(cplx z1, cplx z2) const {
    return MatrixXcd::Identity(dim(), dim()) - ez_diagonal(z1, z2).asDiagonal() * D;
}

Realization build_realization(const RationalInnerFunction& phi,
                              std::shared_ptr<const ModelBasis> basis, const BuildOptions& opts) {
    const int K = basis->dim();
    const int s1 = basis->dim1();

    Realization R;
    R.phi = phi;
    R.basis = basis;
    R.split1 = s1;
    R.split2 = basis->dim2();
    R.A = evaluate_inner(phi, 0.0, 0.0);
    R.B.resize(K);
    R.C.resize(K);
    R.D.resize(K, K);

    if (K > 0) {
        std::vector<ModelFn> fns;
        for (int i = 0; i < K; ++i) fns.push_back(ModelFn::plain(basis->numerator(i)));
        for (int i = 0; i < K; ++i) fns.push_back(ModelFn::shift1(basis->numerator(i)));
        for (int i = 0; i < K; ++i) fns.push_back(ModelFn::shift2(basis->numerator(i)));
        fns.push_back(ModelFn::shift1(phi.p_tilde.coeffs()));
        fns.push_back(ModelFn::shift2(phi.p_tilde.coeffs()));

        const EngineResult er = inner_products(phi.p, fns, K, opts.engine);
        R.quad_N = er.rect_N;
        R.adaptive_quadrature = er.adaptive;

        for (int i = 0; i < K; ++i) R.B[i] = basis->eval(i, 0.0, 0.0);
        for (int i = 0; i < K; ++i) {
            // C row block: P_{block} M*_{z1 or z2} phi against e_i
            R.C[i] = (i < s1) ? er.ip(3 * K, i) : er.ip(3 * K + 1, i);
            for (int j = 0; j < K; ++j) {
                R.D(i, j) = (i < s1) ? er.ip(K + j, i) : er.ip(2 * K + j, i);
            }
        }
    }

    const MatrixXcd u = R.U();
    R.coisometry_defect =
        (u * u.adjoint() - MatrixXcd::Identity(K + 1, K + 1)).cwiseAbs().maxCoeff();
    if (R.coisometry_defect > opts.coisometry_limit) {
        std::ostringstream os;
        os << "build_realization: coisometry defect " << R.coisometry_defect
           << " exceeds " << opts.coisometry_limit
           << " (bad decomposition or insufficient quadrature)";
        throw BuildError(os.str());
    }
    return R;
}

Realization build_realization(const RationalInnerFunction& phi, const SosDecomposition& dec,
                              const BuildOptions& opts) {
    return build_realization(phi, orthonormal_model_basis(phi, dec, opts.engine), opts);
}

cplx evaluate_realization(const Realization& R, cplx z1, cplx z2) {
    if (R.dim() == 0) return R.A;
    const MatrixXcd M = R.one_minus_ezd(z1, z2);
    Eigen::FullPivLU<MatrixXcd> lu(M);
    if (!lu.isInvertible()) {
        Eigen::JacobiSVD<MatrixXcd> svd(M);
        std::ostringstream os;
        os << "evaluate_realization: 1 - E_z D is singular (sigma_min "
           << svd.singularValues().minCoeff() << ")";
        throw SingularPointError(os.str(), z1, z2);
    }
    const VectorXcd x = lu.solve(R.ez_diagonal(z1, z2).asDiagonal() * R.C);
    return R.A + (R.B * x).value();
}

VectorXcd kernel_vector(const ModelBasis& basis, cplx w1, cplx w2) {
    if (std::abs(basis.phi.p.evaluate(w1, w2)) <= 1e-12 * basis.phi.p.coeff_scale()) {
        throw SingularPointError("kernel_vector: w is a zero of p", w1, w2);
    }
    VectorXcd k(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) k[i] = std::conj(basis.eval(i, w1, w2));
    return k;
}

VectorXcd kernel_vector_resolvent(const Realization& R, cplx w1, cplx w2) {
    const MatrixXcd M = MatrixXcd::Identity(R.dim(), R.dim()) -
                        R.D.adjoint() * R.ez_diagonal(std::conj(w1), std::conj(w2)).asDiagonal();
    return M.partialPivLu().solve(R.B.adjoint());
}

VectorXcd limit_kernel_vector(const Realization& R, const std::vector<double>& eps) {
    std::vector<VectorXcd> vals;
    vals.reserve(eps.size());
    for (double e : eps) vals.push_back(kernel_vector_resolvent(R, 1.0 - e, 1.0 - e));
    // Neville extrapolation to eps = 0
    std::vector<double> x(eps);
    for (std::size_t level = 1; level < vals.size(); ++level) {
        for (std::size_t i = vals.size() - 1; i >= level; --i) {
            const double w = x[i] / (x[i] - x[i - level]);
            vals[i] = vals[i] - w * (vals[i] - vals[i - 1]);
            if (i == level) break;
        }
    }
    return vals.back();
}

double dshift_residual(const Realization& R, cplx w1, cplx w2) {
    const VectorXcd k = R.basis ? kernel_vector(*R.basis, w1, w2)
                                : kernel_vector_resolvent(R, w1, w2);
    const VectorXcd lhs = R.D * k;
    const VectorXcd rhs = R.ez_diagonal(std::conj(w1), std::conj(w2)).asDiagonal() * k -
                          std::conj(evaluate_inner(R.phi, w1, w2)) * R.C;
    return (lhs - rhs).norm();
}

MatrixXcd lurking_isometry_build(const Realization& R, int samples, std::uint64_t seed) {
    if (!R.basis) throw Error("lurking_isometry_build: realization has no attached basis");
    const int K = R.dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    MatrixXcd X(K + 1, samples), Y(K + 1, samples);
    for (int s = 0; s < samples; ++s) {
        const double r1 = 0.9 * std::sqrt(unif(rng)), r2 = 0.9 * std::sqrt(unif(rng));
        const cplx w1 = std::polar(r1, 2.0 * kPi * unif(rng));
        const cplx w2 = std::polar(r2, 2.0 * kPi * unif(rng));
        const VectorXcd k = kernel_vector(*R.basis, w1, w2);
        X(0, s) = 1.0;
        X.col(s).tail(K) = R.ez_diagonal(std::conj(w1), std::conj(w2)).asDiagonal() * k;
        Y(0, s) = std::conj(evaluate_inner(R.phi, w1, w2));
        Y.col(s).tail(K) = k;
    }
    // V X = Y in least squares; U = V*
    const MatrixXcd V = X.transpose()
                            .completeOrthogonalDecomposition()
                            .solve(Y.transpose())
                            .transpose();
    return V.adjoint();
}

double lsq_build_agreement(const Realization& R, int samples, std::uint64_t seed) {
    const MatrixXcd diff = lurking_isometry_build(R, samples, seed) - R.U();
    Eigen::JacobiSVD<MatrixXcd> svd(diff);
    return svd.singularValues().maxCoeff();
}

}  // namespace rlab
