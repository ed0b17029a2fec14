#ifndef RLAB_POLYNOMIAL_HPP
#define RLAB_POLYNOMIAL_HPP

#include <optional>
#include <utility>

#include "rlab/common.hpp"

namespace rlab {

// Dense bivariate polynomial p(z1,z2) = sum coeffs(i,j) z1^i z2^j.
// The grid shape is the declared bidegree; exactness (nonzero last row and
// column) is a checked property, not a construction invariant, since several
// inputs are deliberately padded (p = 1 declared (1,1) generates z1*z2).
class BivariatePolynomial {
   public:
    BivariatePolynomial() : coeffs_(MatrixXcd::Zero(1, 1)) {}
    explicit BivariatePolynomial(MatrixXcd coeffs);

    static BivariatePolynomial constant(cplx c) {
        MatrixXcd m(1, 1);
        m(0, 0) = c;
        return BivariatePolynomial(std::move(m));
    }

    const MatrixXcd& coeffs() const { return coeffs_; }
    int deg1() const { return static_cast<int>(coeffs_.rows()) - 1; }
    int deg2() const { return static_cast<int>(coeffs_.cols()) - 1; }
    std::pair<int, int> bidegree() const { return {deg1(), deg2()}; }

    cplx operator()(cplx z1, cplx z2) const { return evaluate(z1, z2); }
    cplx evaluate(cplx z1, cplx z2) const;

    // one-variable slices p(., z2) / p(z1, .) as coefficient vectors
    VectorXcd slice_z1(cplx z2) const;
    VectorXcd slice_z2(cplx z1) const;

    // sum of |coeffs|, the scale used by relative tolerances
    double coeff_scale() const { return coeffs_.cwiseAbs().sum(); }

    bool has_exact_bidegree(double tol = 0.0) const;
    BivariatePolynomial padded_to(int m1, int m2) const;
    // smallest grid containing the support (entries > tol * scale)
    BivariatePolynomial trimmed(double tol = 0.0) const;

    bool almost_equal(const BivariatePolynomial& other, double tol = 0.0) const;

   private:
    MatrixXcd coeffs_;
};

// p~(z) = z1^m1 z2^m2 conj(p)(1/z1, 1/z2), coefficientwise a conjugated flip
BivariatePolynomial reflect(const BivariatePolynomial& p);

struct StabilityVerdict {
    enum class Kind { Stable, UnstableWitness, Inconclusive };
    Kind kind = Kind::Inconclusive;
    std::array<cplx, 2> witness{};  // offending (z1, z2) when unstable
    std::string detail;

    bool stable() const { return kind == Kind::Stable; }
};

// Sampled sufficient check: companion-matrix roots of p(., z2) over a
// grid_n-circle x grid_n-angle grid filling the closed disk in z2. Stable
// when every root stays of modulus > 1 - tol.
StabilityVerdict is_stable(const BivariatePolynomial& p, int grid_n = 64, double tol = 1e-9);

// rational inner function phi = p~ / p with stable p
struct RationalInnerFunction {
    BivariatePolynomial p;
    BivariatePolynomial p_tilde;

    std::pair<int, int> bidegree() const { return p.bidegree(); }
};

struct InnerFromStableOptions {
    int stability_grid_n = 64;
    double stability_tol = 1e-9;
    bool check_common_factor = true;
    int common_factor_grid = 256;
};

// Packages phi = p~/p after the stability check and a numerical
// common-factor screen (shared zero *curves* on the torus; isolated shared
// boundary zeros are expected and pass).
RationalInnerFunction inner_from_stable(const BivariatePolynomial& p,
                                        const InnerFromStableOptions& opts = {});

// p~(z)/p(z); throws SingularPointError when |p(z)| <= tol * coeff scale
cplx evaluate_inner(const RationalInnerFunction& phi, cplx z1, cplx z2, double tol = 1e-12);

}  // namespace rlab

#endif
