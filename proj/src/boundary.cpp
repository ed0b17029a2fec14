#include "rlab/boundary.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace rlab {

std::vector<TorusPoint> singular_set(const BivariatePolynomial& p, int n_theta, double tol) {
    return torus_zeros(p, n_theta, tol);
}

BoundaryScan invertibility_scan(const Realization& R, int n_theta) {
    BoundaryScan scan;
    scan.n_theta = n_theta;
    scan.singular = singular_set(R.phi.p, n_theta);
    scan.exclusion_radius = 10.0 / n_theta;
    scan.sigma_min.resize(n_theta, n_theta);
    scan.excluded.resize(n_theta, n_theta);

    const int K = R.dim();
    parallel_for(static_cast<std::size_t>(n_theta), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t a = lo; a < hi; ++a) {
            const double t1 = scan.theta(static_cast<int>(a));
            const cplx z1 = std::polar(1.0, t1);
            for (int b = 0; b < n_theta; ++b) {
                const double t2 = scan.theta(b);
                const MatrixXcd M = R.one_minus_ezd(z1, std::polar(1.0, t2));
                if (K == 0) {
                    scan.sigma_min(static_cast<int>(a), b) = 1.0;
                } else {
                    Eigen::JacobiSVD<MatrixXcd> svd(M);
                    scan.sigma_min(static_cast<int>(a), b) = svd.singularValues().minCoeff();
                }
                bool excl = false;
                for (const auto& q : scan.singular) {
                    const double d1 = std::remainder(t1 - q.theta1, 2.0 * kPi);
                    const double d2 = std::remainder(t2 - q.theta2, 2.0 * kPi);
                    if (std::hypot(d1, d2) < scan.exclusion_radius) {
                        excl = true;
                        break;
                    }
                }
                scan.excluded(static_cast<int>(a), b) = excl ? 1 : 0;
            }
        }
    });

    double mn = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_theta; ++a) {
        for (int b = 0; b < n_theta; ++b) {
            if (!scan.excluded(a, b)) mn = std::min(mn, scan.sigma_min(a, b));
        }
    }
    scan.min_off_exclusion = mn;
    return scan;
}

cplx boundary_continuation(const Realization& R, cplx tau1, cplx tau2) {
    const MatrixXcd M = R.one_minus_ezd(tau1, tau2);
    double smin = 1.0;
    if (R.dim() > 0) {
        Eigen::JacobiSVD<MatrixXcd> svd(M);
        smin = svd.singularValues().minCoeff();
    }
    if (smin <= 1e-8) {
        std::ostringstream os;
        os << "boundary_continuation: 1 - E_tau D nearly singular (sigma_min " << smin << ")";
        throw SingularPointError(os.str(), tau1, tau2);
    }
    cplx val = R.A;
    if (R.dim() > 0) {
        const VectorXcd x = M.partialPivLu().solve(R.ez_diagonal(tau1, tau2).asDiagonal() * R.C);
        val += (R.B * x).value();
    }
    if (std::abs(std::abs(val) - 1.0) > 1e-7) {
        std::ostringstream os;
        os << "boundary_continuation: |value| = " << std::abs(val) << " is not unimodular";
        throw SingularPointError(os.str(), tau1, tau2);
    }
    if (std::abs(R.phi.p.evaluate(tau1, tau2)) > 1e-6 * R.phi.p.coeff_scale()) {
        const cplx direct = evaluate_inner(R.phi, tau1, tau2, 1e-8);
        if (std::abs(val - direct) > 1e-6) {
            std::ostringstream os;
            os << "boundary_continuation: realization and rational values disagree by "
               << std::abs(val - direct);
            throw SingularPointError(os.str(), tau1, tau2);
        }
    }
    return val;
}

double restriction_isometry_check(const ModelBasis& basis, cplx tau2, int N) {
    const int n1 = basis.dim1();
    if (n1 == 0) return 0.0;
    const auto singular = singular_set(basis.phi.p);
    const double t2 = std::arg(tau2);
    for (const auto& q : singular) {
        if (std::abs(std::remainder(t2 - q.theta2, 2.0 * kPi)) < 10.0 / 256.0) {
            throw SingularPointError(
                "restriction_isometry_check: tau2 lies inside an exclusion disk", cplx(0.0),
                tau2);
        }
    }
    MatrixXcd gram = MatrixXcd::Zero(n1, n1);
    VectorXcd vals(n1);
    for (int j = 0; j < N; ++j) {
        const cplx z1 = std::polar(1.0, 2.0 * kPi * (j + 0.5) / N);
        for (int i = 0; i < n1; ++i) vals[i] = basis.eval(i, z1, tau2);
        gram.noalias() += vals * vals.adjoint();
    }
    gram /= static_cast<double>(N);
    return (gram - MatrixXcd::Identity(n1, n1)).cwiseAbs().maxCoeff();
}

}  // namespace rlab
