#ifndef RLAB_BOUNDARY_HPP
#define RLAB_BOUNDARY_HPP

#include "rlab/realization.hpp"

namespace rlab {

// grid realization of the boundary zero set of p (J_psi refinement)
std::vector<TorusPoint> singular_set(const BivariatePolynomial& p, int n_theta = 256,
                                     double tol = -1.0);

struct BoundaryScan {
    int n_theta = 0;
    MatrixXd sigma_min;                   // sigma_min(1 - E_tau D) on the offset grid
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> excluded;
    std::vector<TorusPoint> singular;
    double exclusion_radius = 0.0;
    double min_off_exclusion = 0.0;
    double theta(int k) const { return 2.0 * kPi * (k + 0.5) / n_theta; }
};

BoundaryScan invertibility_scan(const Realization& R, int n_theta = 256);

// realization value at a torus point; requires sigma_min(1 - E_tau D) > 1e-8,
// validates |value| = 1 within 1e-7 and agreement with p~/p where |p| > 1e-6
cplx boundary_continuation(const Realization& R, cplx tau1, cplx tau2);

// max deviation from the identity of the one-variable restriction Gram of
// the H(K2^min) basis at z2 = tau2 (Lemma-style isometry of f -> f(., tau2))
double restriction_isometry_check(const ModelBasis& basis, cplx tau2, int N = 4096);

}  // namespace rlab

#endif
