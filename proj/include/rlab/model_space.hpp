#ifndef RLAB_MODEL_SPACE_HPP
#define RLAB_MODEL_SPACE_HPP

#include <memory>

#include "rlab/sos.hpp"

namespace rlab {

// zeros of p on the torus, as angle pairs (theta1, theta2)
struct TorusPoint {
    double theta1 = 0.0;
    double theta2 = 0.0;
    cplx tau1() const { return std::polar(1.0, theta1); }
    cplx tau2() const { return std::polar(1.0, theta2); }
};

// Coarse grid marking + Newton refinement of p = 0 restricted to T^2.
// mark_tol <= 0 selects a grid-spacing-proportional default.
std::vector<TorusPoint> torus_zeros(const BivariatePolynomial& p, int n_grid = 256,
                                    double mark_tol = -1.0);

BivariatePolynomial derivative_z1(const BivariatePolynomial& p);
BivariatePolynomial derivative_z2(const BivariatePolynomial& p);

// function num/p on the closed bidisk, or a backward shift of one
struct ModelFn {
    enum class Kind { Plain, BackshiftZ1, BackshiftZ2 };
    Kind kind = Kind::Plain;
    MatrixXcd num;

    static ModelFn plain(MatrixXcd q) { return {Kind::Plain, std::move(q)}; }
    static ModelFn shift1(MatrixXcd q) { return {Kind::BackshiftZ1, std::move(q)}; }
    static ModelFn shift2(MatrixXcd q) { return {Kind::BackshiftZ2, std::move(q)}; }
};

struct EngineOptions {
    int start_N = 512;
    int max_N = 4096;
    double rect_tol = 1e-12;      // ladder stop: max entry change between levels
    double adaptive_tol = 1e-12;  // absolute budget per outer piece
    int max_depth = 48;
    double corner_band = 1e-6;    // frozen band half-... width at singular angles
};

struct EngineResult {
    MatrixXcd ip;        // ip(i, j) = <F[i], F[j]>_{H^2(D^2)} for j < K
    int rect_N = 0;      // rectangle level that converged (0 if adaptive)
    bool adaptive = false;
    double ladder_diff = 0.0;  // last inter-level change observed
};

// H^2 inner products of num/p-type functions. The rectangle ladder is used
// when it converges (no torus zeros of p in practice); otherwise a nested
// adaptive Gauss-Kronrod scheme with the outer integral split at the
// singular z2-angles takes over.
EngineResult inner_products(const BivariatePolynomial& p, const std::vector<ModelFn>& fns,
                            int K, const EngineOptions& opts = {});

// general rational functions for the torus_gram operation
struct RationalFn {
    BivariatePolynomial num;
    BivariatePolynomial den;
};

// Plain N x N rectangle-rule Gram matrix on the torus (N a power of two,
// >= 128). Grid nodes are offset by half a cell if any denominator nearly
// vanishes on the unshifted grid; failing both, an error suggests a larger N.
MatrixXcd torus_gram(const std::vector<RationalFn>& fns, int N);

// Orthonormal rational bases of the two model-space blocks. Block 1 carries
// H(K2^min) (factor 1 - z1 conj(w1)), block 2 carries H(K1^max).
struct ModelBasis {
    RationalInnerFunction phi;
    std::vector<MatrixXcd> k2_numerators;  // block 1, divided by p
    std::vector<MatrixXcd> k1_numerators;  // block 2
    double gram_defect = 0.0;
    int quad_N = 0;
    bool adaptive = false;

    int dim1() const { return static_cast<int>(k2_numerators.size()); }
    int dim2() const { return static_cast<int>(k1_numerators.size()); }
    int dim() const { return dim1() + dim2(); }
    const MatrixXcd& numerator(int i) const {
        return i < dim1() ? k2_numerators[i] : k1_numerators[i - dim1()];
    }
    cplx eval(int i, cplx z1, cplx z2) const;
};

// gram_factor vectors divided by p, orthonormalized blockwise by Cholesky
// against the engine Gram
std::shared_ptr<const ModelBasis> orthonormal_model_basis(const RationalInnerFunction& phi,
                                                          const SosDecomposition& dec,
                                                          const EngineOptions& opts = {});

}  // namespace rlab

#endif
