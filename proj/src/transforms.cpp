#include "rlab/transforms.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

#include "rlab/boundary.hpp"

namespace rlab {

namespace {

double sigma_min(const MatrixXcd& M) {
    if (M.rows() == 0 || M.cols() == 0) return std::numeric_limits<double>::infinity();
    Eigen::JacobiSVD<MatrixXcd> svd(M);
    return svd.singularValues().minCoeff();
}

}  // namespace

BlockMatrix block_inverse(const MatrixXcd& Q, const MatrixXcd& R, const MatrixXcd& S,
                          const MatrixXcd& V, BlockPivot pivot) {
    BlockMatrix out;
    if (pivot == BlockPivot::UpperLeft) {
        if (sigma_min(Q) <= 1e-12) throw Error("block_inverse: pivot block Q is singular");
        const MatrixXcd Qi = Q.partialPivLu().solve(MatrixXcd::Identity(Q.rows(), Q.cols()));
        const MatrixXcd schur = V - S * Qi * R;
        if (sigma_min(schur) <= 1e-12)
            throw Error("block_inverse: Schur complement of Q is singular");
        const MatrixXcd schur_i =
            schur.partialPivLu().solve(MatrixXcd::Identity(schur.rows(), schur.cols()));
        out.Q = Qi + Qi * R * schur_i * S * Qi;
        out.R = -Qi * R * schur_i;
        out.S = -schur_i * S * Qi;
        out.V = schur_i;
    } else {
        if (sigma_min(V) <= 1e-12) throw Error("block_inverse: pivot block V is singular");
        const MatrixXcd Vi = V.partialPivLu().solve(MatrixXcd::Identity(V.rows(), V.cols()));
        const MatrixXcd schur = Q - R * Vi * S;
        if (sigma_min(schur) <= 1e-12)
            throw Error("block_inverse: Schur complement of V is singular");
        const MatrixXcd schur_i =
            schur.partialPivLu().solve(MatrixXcd::Identity(schur.rows(), schur.cols()));
        out.Q = schur_i;
        out.R = -schur_i * R * Vi;
        out.S = -Vi * S * schur_i;
        out.V = Vi + Vi * S * schur_i * R * Vi;
    }
    return out;
}

cplx cayley(cplx z) {
    if (std::abs(z - 1.0) < 1e-14) throw Error("cayley: pole at z = 1");
    return cplx(0, 1) * (1.0 + z) / (1.0 - z);
}

cplx inverse_cayley(cplx w) {
    if (std::abs(w + cplx(0, 1)) < 1e-14) throw Error("inverse_cayley: pole at w = -i");
    return (w - cplx(0, 1)) / (w + cplx(0, 1));
}

cplx schur_to_herglotz(const Realization& R, cplx z1, cplx z2) {
    const cplx phi_val = evaluate_realization(R, z1, z2);
    if (std::abs(phi_val - 1.0) < 1e-10) {
        throw SingularPointError("schur_to_herglotz: Phi(z) = 1, Theta has a pole", z1, z2);
    }
    const int K = R.dim();
    MatrixXcd M(K + 1, K + 1);
    M(0, 0) = R.A;
    M.block(0, 1, 1, K) = R.B;
    const VectorXcd ez = R.ez_diagonal(z1, z2);
    M.block(1, 0, K, 1) = ez.asDiagonal() * R.C;
    M.block(1, 1, K, K) = ez.asDiagonal() * R.D;

    VectorXcd e0 = VectorXcd::Zero(K + 1);
    e0[0] = 1.0;
    const VectorXcd rhs = (MatrixXcd::Identity(K + 1, K + 1) + M) * e0;
    const VectorXcd y =
        (MatrixXcd::Identity(K + 1, K + 1) - M).partialPivLu().solve(rhs);
    const cplx theta = y[0];

    const cplx direct = (1.0 + phi_val) / (1.0 - phi_val);
    if (std::abs(theta - direct) > 1e-9 * std::max(1.0, std::abs(direct))) {
        std::ostringstream os;
        os << "schur_to_herglotz: bordered form and (1+Phi)/(1-Phi) disagree by "
           << std::abs(theta - direct);
        throw Error(os.str());
    }
    return theta;
}

MatrixXcd NevanlinnaData::T() const {
    MatrixXcd t(dim() + 1, dim() + 1);
    t(0, 0) = T11;
    t.block(0, 1, 1, dim()) = T12;
    t.block(1, 0, dim(), 1) = T21;
    t.block(1, 1, dim(), dim()) = T22;
    return t;
}

VectorXcd NevanlinnaData::w_diagonal(cplx w1, cplx w2) const {
    VectorXcd d(dim());
    d.head(split1).setConstant(w1);
    d.tail(split2).setConstant(w2);
    return d;
}

NevanlinnaData herglotz_to_nevanlinna(const Realization& R) {
    const int n = R.dim() + 1;
    const MatrixXcd U = R.U();
    const MatrixXcd I = MatrixXcd::Identity(n, n);

    // coisometric U with 1 - U invertible is unitary (von Neumann-Wold);
    // checked at runtime rather than assumed
    const double smin = sigma_min(I - U);
    if (smin <= 1e-10) {
        std::ostringstream os;
        os << "herglotz_to_nevanlinna: 1 - U is singular (sigma_min " << smin
           << "); the Cayley transform is undefined (phi(1,1)-type irregularity)";
        throw Error(os.str());
    }
    const double coiso_defect = (U * U.adjoint() - I).cwiseAbs().maxCoeff();
    const double unitary_defect = (U.adjoint() * U - I).cwiseAbs().maxCoeff();
    if (coiso_defect <= 1e-7 && unitary_defect > 1e-7) {
        std::ostringstream os;
        os << "herglotz_to_nevanlinna: coisometric U with 1 - U invertible must be unitary, "
              "but the isometry defect is "
           << unitary_defect;
        throw Error(os.str());
    }

    const MatrixXcd T = cplx(0, 1) * (I + U) * (I - U).partialPivLu().solve(I);
    NevanlinnaData N;
    N.split1 = R.split1;
    N.split2 = R.split2;
    N.T11 = T(0, 0);
    N.T12 = T.block(0, 1, 1, R.dim());
    N.T21 = T.block(1, 0, R.dim(), 1);
    N.T22 = T.block(1, 1, R.dim(), R.dim());
    N.selfadjoint_defect = (T - T.adjoint()).cwiseAbs().maxCoeff();
    if (R.dim() > 0) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (N.T22 + N.T22.adjoint()),
                                                    Eigen::EigenvaluesOnly);
        N.t22_min_eig = es.eigenvalues().minCoeff();
    }

    // closed-form payload when the realization extends to (1,1)
    try {
        const cplx phi11 = boundary_continuation(R, 1.0, 1.0);
        if (std::abs(phi11 - 1.0) >= 1e-8) {
            N.phi11 = phi11;
            N.k1 = limit_kernel_vector(R);
        }
    } catch (const SingularPointError&) {
        // irregular at (1,1); payload stays empty
    }
    return N;
}

cplx evaluate_nevanlinna(const NevanlinnaData& N, cplx w1, cplx w2) {
    if (N.dim() == 0) return N.T11;
    const MatrixXcd M = N.w_diagonal(w1, w2).asDiagonal().toDenseMatrix() + N.T22;
    const double smin = sigma_min(M);
    if (smin <= 1e-12) {
        std::ostringstream os;
        os << "evaluate_nevanlinna: W + T22 is singular (sigma_min " << smin << ")";
        throw SingularPointError(os.str(), w1, w2);
    }
    return N.T11 - (N.T12 * M.partialPivLu().solve(N.T21)).value();
}

ClosedBlocks nevanlinna_closed_blocks(const Realization& R, const VectorXcd& k1) {
    cplx phi11;
    try {
        phi11 = boundary_continuation(R, 1.0, 1.0);
    } catch (const SingularPointError& e) {
        throw Error(std::string("nevanlinna_closed_blocks: realization does not extend to "
                                "(1,1): ") +
                    e.what());
    }
    if (std::abs(phi11 - 1.0) < 1e-8) {
        throw Error("nevanlinna_closed_blocks: phi(1,1) = 1, the closed forms are undefined");
    }
    const cplx c1 = 1.0 / (1.0 - phi11);
    ClosedBlocks out;
    out.T11 = cplx(0, 1) * (1.0 + phi11) * c1;
    out.T21 = 2.0 * cplx(0, 1) * phi11 * c1 * k1;
    out.T12 = 2.0 * cplx(0, 1) * c1 * k1.conjugate().transpose();  // T12 f = 2i c1 f(1,1)
    return out;
}

double t22_partial_residual(const Realization& R, const NevanlinnaData& N, cplx w1, cplx w2) {
    if (!N.phi11 || !N.k1) {
        throw Error("t22_partial_residual: NevanlinnaData lacks the (1,1) payload");
    }
    if (R.dim() == 0) return 0.0;
    const cplx phi11 = *N.phi11;
    const VectorXcd& k1 = *N.k1;
    const VectorXcd kw = R.basis ? kernel_vector(*R.basis, w1, w2)
                                 : kernel_vector_resolvent(R, w1, w2);
    const MatrixXcd I = MatrixXcd::Identity(R.dim(), R.dim());
    const VectorXcd ewb = R.ez_diagonal(std::conj(w1), std::conj(w2));
    const VectorXcd arg = kw - ewb.asDiagonal() * kw;  // (1 - E_wbar) k_w
    const VectorXcd lhs =
        cplx(0, 1) * (I + R.D) * (I - R.D).partialPivLu().solve(arg);
    const VectorXcd rhs = cplx(0, 1) * (kw + ewb.asDiagonal() * kw) -
                          2.0 * cplx(0, 1) * std::conj(evaluate_inner(R.phi, w1, w2)) * phi11 *
                              k1;
    return (lhs - rhs).norm();
}

double t22_second_piece_residual(const Realization& R, const NevanlinnaData& N) {
    if (!N.phi11 || !N.k1) {
        throw Error("t22_second_piece_residual: NevanlinnaData lacks the (1,1) payload");
    }
    if (R.dim() == 0) return 0.0;
    const cplx phi11 = *N.phi11;
    const cplx c1 = 1.0 / (1.0 - phi11);
    const VectorXcd& k1 = *N.k1;
    const MatrixXcd I = MatrixXcd::Identity(R.dim(), R.dim());
    const auto lu = (I - R.D).partialPivLu();
    double worst = 0.0;
    for (int j = 0; j < R.dim(); ++j) {
        VectorXcd f = VectorXcd::Zero(R.dim());
        f[j] = 1.0;
        const cplx bval = (R.B * lu.solve(f)).value();  // B (1-D)^{-1} f = f(1,1)
        const VectorXcd lhs = 2.0 * cplx(0, 1) * c1 * lu.solve(R.C * bval);
        const cplx f11 = std::conj(k1[j]);
        const VectorXcd rhs = 2.0 * cplx(0, 1) * phi11 * f11 * c1 * k1;
        worst = std::max(worst, (lhs - rhs).norm());
    }
    return worst;
}

}  // namespace rlab
