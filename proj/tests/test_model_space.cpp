#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "rlab/model_space.hpp"

using namespace rlab;
using namespace rlab::testing;

TEST_CASE("torus_gram of monomials is the identity") {
    const std::vector<RationalFn> fns{
        {BivariatePolynomial::constant(1.0), BivariatePolynomial::constant(1.0)},
        {make_poly({{cplx(0)}, {cplx(1)}}), BivariatePolynomial::constant(1.0)}};
    const MatrixXcd g = torus_gram(fns, 128);
    CHECK((g - MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("torus_gram of the geometric-series function") {
    // ||1/(1 - z1/2)||^2 = sum 4^{-n} = 4/3
    const std::vector<RationalFn> fns{
        {BivariatePolynomial::constant(1.0), make_poly({{cplx(1)}, {cplx(-0.5)}})}};
    const MatrixXcd g = torus_gram(fns, 256);
    CHECK(std::abs(g(0, 0) - 4.0 / 3.0) < 1e-10);
}

TEST_CASE("torus_gram validates N") {
    const std::vector<RationalFn> fns{
        {BivariatePolynomial::constant(1.0), BivariatePolynomial::constant(1.0)}};
    CHECK_THROWS_AS(torus_gram(fns, 100), Error);
    CHECK_THROWS_AS(torus_gram(fns, 64), Error);
}

TEST_CASE("plain rectangle rule fails near a boundary zero; the engine does not") {
    // ||sqrt(2)(1 - z2)/(2 - z1 - z2)||^2 = 1.  The N x N rectangle rule does
    // not converge here (near-singular rows overshoot), which is exactly why
    // the engine switches to the adaptive path for boundary-zero p.
    const auto p = p_two_minus();
    MatrixXcd num = MatrixXcd::Zero(1, 2);
    num(0, 0) = std::sqrt(2.0);
    num(0, 1) = -std::sqrt(2.0);

    const MatrixXcd g = torus_gram({{BivariatePolynomial(num), p}}, 1024);
    CHECK(std::abs(g(0, 0) - 1.0) > 1e-3);  // documented limitation of the plain rule

    const EngineResult er = inner_products(p, {ModelFn::plain(num)}, 1);
    CHECK(er.adaptive);
    CHECK(std::abs(er.ip(0, 0) - 1.0) < 1e-9);

    // independent oracle: the tau1 slice integral is the Poisson kernel value
    // 1/(|2 - tau2|^2 - 1); reduce to one dimension and integrate by rectangle
    const int N = 8192;
    cplx oracle = 0.0;
    for (int k = 0; k < N; ++k) {
        const double psi = 2 * kPi * (k + 0.5) / N;
        const cplx t2 = std::polar(1.0, psi);
        const double c2 = std::norm(2.0 - t2);
        oracle += 2.0 * std::norm(1.0 - t2) / (c2 - 1.0);
    }
    oracle /= N;
    CHECK(std::abs(er.ip(0, 0) - oracle) < 1e-9);
}

TEST_CASE("engine uses the rectangle ladder away from boundary zeros") {
    const auto p = p_half_prod();
    MatrixXcd one = MatrixXcd::Identity(1, 1);
    const EngineResult er = inner_products(p, {ModelFn::plain(one)}, 1);
    CHECK_FALSE(er.adaptive);
    CHECK(er.rect_N <= 2048);
    // ||1/(1 - z1 z2 / 2)||^2 = sum 4^{-n} = 4/3
    CHECK(std::abs(er.ip(0, 0) - 4.0 / 3.0) < 1e-11);
}

TEST_CASE("torus_zeros finds and refines boundary zeros") {
    CHECK(torus_zeros(p_two_minus()).size() == 1);
    const auto z = torus_zeros(p_two_minus());
    CHECK(std::abs(z[0].theta1) < 1e-10);
    CHECK(std::abs(z[0].theta2) < 1e-10);

    CHECK(torus_zeros(BivariatePolynomial::constant(1.0)).empty());
    CHECK(torus_zeros(p_blaschke()).empty());

    // (2 - z1 - z2)(2 + z1 + z2) = 4 - (z1 + z2)^2 vanishes at (1,1), (-1,-1)
    const auto prod = make_poly({{4, 0, -1}, {0, -2, 0}, {-1, 0, 0}});
    const auto zz = torus_zeros(prod);
    REQUIRE(zz.size() == 2);
    for (const auto& q : zz) {
        const double d0 = std::hypot(q.theta1, q.theta2);
        const double dpi = std::hypot(std::abs(q.theta1) - kPi, std::abs(q.theta2) - kPi);
        CHECK(std::min(d0, dpi) < 1e-9);
    }
}

TEST_CASE("orthonormal model bases of the worked examples") {
    {
        const auto phi = inner_from_stable(p_one_11());
        const auto basis = orthonormal_model_basis(phi, solve_sos(phi));
        REQUIRE(basis->dim1() == 1);
        REQUIRE(basis->dim2() == 1);
        CHECK(std::abs(basis->eval(0, 0.3, -0.2) - 1.0) < 1e-9);        // basis2 = {1}
        CHECK(std::abs(basis->eval(1, 0.3, -0.2) - cplx(0.3)) < 1e-9);  // basis1 = {z1}
        CHECK(basis->gram_defect < 1e-10);
    }
    {
        const auto phi = inner_from_stable(p_z1());
        const auto basis = orthonormal_model_basis(phi, solve_sos(phi));
        CHECK(basis->dim1() == 1);
        CHECK(basis->dim2() == 0);
        CHECK(std::abs(basis->eval(0, 0.4, 0.1) - 1.0) < 1e-9);
    }
    {
        const auto phi = inner_from_stable(p_two_minus());
        const auto basis = orthonormal_model_basis(phi, solve_sos(phi));
        REQUIRE(basis->dim() == 2);
        CHECK(basis->gram_defect < 1e-8);
        // block-1 element is c (1 - z2) / p with quadrature norm one; c = sqrt(2)
        const cplx v = basis->eval(0, 0.2, 0.5);
        const cplx expect = std::sqrt(2.0) * (1.0 - 0.5) / p_two_minus().evaluate(0.2, 0.5);
        CHECK(std::abs(v - expect) < 1e-6);
    }
}

TEST_CASE("non-reduced decompositions produce non-orthogonal blocks") {
    const auto phi = inner_from_stable(p_one_11());
    // the feasible midpoint: PSD and affine-feasible but rank (2,2); the two
    // blocks then share the constant function and are no longer orthogonal
    SosDecomposition dec = solve_sos(phi);
    dec.G2 = 0.5 * MatrixXcd::Identity(2, 2);
    dec.G1 = 0.5 * MatrixXcd::Identity(2, 2);
    const auto basis = orthonormal_model_basis(phi, dec);
    CHECK(basis->dim() == 4);
    CHECK(basis->gram_defect > 0.1);  // cross-block mass; the build must reject this
}
