#ifndef RLAB_REALIZATION_HPP
#define RLAB_REALIZATION_HPP

#include "rlab/model_space.hpp"

namespace rlab {

// Coisometric transfer-function data: phi(z) = A + B (1 - E_z D)^{-1} E_z C
// with E_z = z1 on the first (H(K2^min)) block and z2 on the second.
struct Realization {
    cplx A{};
    RowVectorXcd B;
    VectorXcd C;
    MatrixXcd D;
    int split1 = 0;
    int split2 = 0;

    RationalInnerFunction phi;
    std::shared_ptr<const ModelBasis> basis;  // null when loaded from serialized data

    double coisometry_defect = 0.0;
    int quad_N = 0;
    bool adaptive_quadrature = false;

    int dim() const { return split1 + split2; }
    MatrixXcd U() const;
    VectorXcd ez_diagonal(cplx z1, cplx z2) const;  // diag of E_z
    MatrixXcd one_minus_ezd(cplx z1, cplx z2) const;
};

struct BuildOptions {
    EngineOptions engine;
    double coisometry_limit = 1e-6;  // build error beyond this
};

Realization build_realization(const RationalInnerFunction& phi,
                              std::shared_ptr<const ModelBasis> basis,
                              const BuildOptions& opts = {});
// decomposition route: orthonormal basis first, then the operator assembly
Realization build_realization(const RationalInnerFunction& phi, const SosDecomposition& dec,
                              const BuildOptions& opts = {});

cplx evaluate_realization(const Realization& R, cplx z1, cplx z2);

// reproducing-kernel coordinates: conj of basis evaluations at w
VectorXcd kernel_vector(const ModelBasis& basis, cplx w1, cplx w2);
// the same coordinates from realization data alone: (1 - D^H E_wbar)^{-1} B^H
VectorXcd kernel_vector_resolvent(const Realization& R, cplx w1, cplx w2);
// k1 = limit of k_w at (1,1), Richardson-extrapolated over (1-eps, 1-eps)
VectorXcd limit_kernel_vector(const Realization& R,
                              const std::vector<double>& eps = {1e-3, 5e-4, 2.5e-4});

// defect of  D k_w = E_wbar k_w - conj(phi(w)) F,  F = C
double dshift_residual(const Realization& R, cplx w1, cplx w2);

// lurking-isometry least-squares build from sampled kernel vectors; the
// operator-norm gap to the quadrature build is the cross-check value
MatrixXcd lurking_isometry_build(const Realization& R, int samples = 64,
                                 std::uint64_t seed = 7110ull);
double lsq_build_agreement(const Realization& R, int samples = 64, std::uint64_t seed = 7110ull);

}  // namespace rlab

#endif
