#ifndef RLAB_TRANSFORMS_HPP
#define RLAB_TRANSFORMS_HPP

#include <optional>

#include "rlab/realization.hpp"

namespace rlab {

enum class BlockPivot { UpperLeft, LowerRight };

struct BlockMatrix {
    MatrixXcd Q, R, S, V;  // [[Q, R], [S, V]]
};

// classical 2x2 block inverse; the pivot block and its Schur complement must
// have sigma_min > 1e-12
BlockMatrix block_inverse(const MatrixXcd& Q, const MatrixXcd& R, const MatrixXcd& S,
                          const MatrixXcd& V, BlockPivot pivot);

cplx cayley(cplx z);          // alpha(z) = i (1+z)/(1-z)
cplx inverse_cayley(cplx w);  // alpha^{-1}(w) = (w-i)/(w+i)

// Theta(z) via the bordered-resolvent form, verified against (1+Phi)/(1-Phi)
cplx schur_to_herglotz(const Realization& R, cplx z1, cplx z2);

struct NevanlinnaData {
    cplx T11{};
    RowVectorXcd T12;
    VectorXcd T21;
    MatrixXcd T22;
    int split1 = 0;
    int split2 = 0;
    double selfadjoint_defect = 0.0;
    double t22_min_eig = 0.0;  // min eigenvalue of the Hermitian part
    std::optional<cplx> phi11;       // boundary value phi(1,1), when regular
    std::optional<VectorXcd> k1;     // limit kernel vector at (1,1)

    int dim() const { return split1 + split2; }
    MatrixXcd T() const;
    VectorXcd w_diagonal(cplx w1, cplx w2) const;
};

// T = i (1+U)(1-U)^{-1}, partitioned by the (1, dim) split; rejects when
// 1 - U is singular (e.g. phi = z1 z2, whose boundary value at (1,1) is 1)
NevanlinnaData herglotz_to_nevanlinna(const Realization& R);

// Psi(w) = T11 - T12 (W + T22)^{-1} T21 with W = diag(w1, w2) over the split
cplx evaluate_nevanlinna(const NevanlinnaData& N, cplx w1, cplx w2);

struct ClosedBlocks {
    cplx T11{};
    RowVectorXcd T12;
    VectorXcd T21;
};

// concrete (1,1)-boundary closed forms for T11, T21 and the T12 functional
ClosedBlocks nevanlinna_closed_blocks(const Realization& R, const VectorXcd& k1);

// residual of  i(1+D)(1-D)^{-1}(1 - E_wbar)k_w = i(1 + E_wbar)k_w
//                - 2i conj(phi(w)) phi(1,1) k_1   at one w
double t22_partial_residual(const Realization& R, const NevanlinnaData& N, cplx w1, cplx w2);

// residual of the second T22 piece on the coordinate basis vectors; note the
// phi(1,1) factor, which the cited display drops but its own derivation needs
double t22_second_piece_residual(const Realization& R, const NevanlinnaData& N);

}  // namespace rlab

#endif
