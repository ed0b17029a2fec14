#ifndef RLAB_SOS_HPP
#define RLAB_SOS_HPP

#include <vector>

#include "rlab/polynomial.hpp"

namespace rlab {

using Monomial = std::pair<int, int>;  // (z1 power, z2 power)

// Cleared-denominator coefficient identity
//   p(z) conj(p(w)) - p~(z) conj(p~(w))
//     = (1 - z1 conj(w1)) m2(z)^T G2 conj(m2(w)) + (1 - z2 conj(w2)) m1(z)^T G1 conj(m1(w))
// as one complex linear equation per monomial pair (a,b,c,d).
struct CoefficientSystem {
    MatrixXcd A;            // constraint map acting on vec(G2), vec(G1)
    VectorXcd rhs;          // coefficient bi-convolutions of p and p~
    std::vector<Monomial> window2;  // monomials of G2, bidegree <= (m1-1, m2)
    std::vector<Monomial> window1;  // monomials of G1, bidegree <= (m1, m2-1)
    int m1 = 0, m2 = 0;

    int n2() const { return static_cast<int>(window2.size()); }
    int n1() const { return static_cast<int>(window1.size()); }
    VectorXcd pack(const MatrixXcd& G2, const MatrixXcd& G1) const;
    void unpack(const VectorXcd& g, MatrixXcd& G2, MatrixXcd& G1) const;
    double residual(const MatrixXcd& G2, const MatrixXcd& G1) const;
};

CoefficientSystem coefficient_system(const RationalInnerFunction& phi);

struct SosDecomposition {
    MatrixXcd G2;  // PSD Gram over window2, paired with (1 - z1 conj(w1))
    MatrixXcd G1;  // PSD Gram over window1, paired with (1 - z2 conj(w2))
    std::vector<Monomial> window2;
    std::vector<Monomial> window1;
    double residual = 0.0;  // max coefficient mismatch of the cleared identity
    int rank2 = 0;
    int rank1 = 0;
};

struct SolveSosOptions {
    int max_iter = 20000;
    double tol = 1e-9;
    double rank_tol = 1e-7;        // numerical rank threshold on eigenvalues
    double truncation_tol = 1e-8;  // eigenvalues below this are dropped in reduction
    int polish_tries = 4;
};

// Dykstra alternating projections to a feasible point, then a rank-reduction
// pass (alternating projections with rank caps, preferred caps (m1, m2)
// first) and a factored Gauss-Newton polish of the coefficient residual.
SosDecomposition solve_sos(const CoefficientSystem& system, const SolveSosOptions& opts = {});
SosDecomposition solve_sos(const RationalInnerFunction& phi, const SolveSosOptions& opts = {});

// Eigendecomposition factor G = sum_k v_k v_k^H; returns the v_k (eigenvalue
// above rank_tol) as coefficient vectors over the window, largest first, each
// rotated so its dominant entry is positive real.
std::vector<VectorXcd> gram_factor(const MatrixXcd& G, double rank_tol = 1e-10);

// Max pointwise defect of the (uncleared) model equation over `samples`
// random pairs (z, w) in D^2 x D^2.
double model_residual(const RationalInnerFunction& phi, const SosDecomposition& dec,
                      int samples = 1000, std::uint64_t seed = 20240901ull);

// Gram quadratic form m(z)^T G conj(m(w)) over a monomial window
cplx kernel_numerator(const MatrixXcd& G, const std::vector<Monomial>& window, cplx z1, cplx z2,
                      cplx w1, cplx w2);

}  // namespace rlab

#endif
