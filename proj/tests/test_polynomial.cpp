#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace rlab;
using namespace rlab::testing;

TEST_CASE("evaluate_poly on 2 - z1 - z2") {
    const auto p = p_two_minus();
    CHECK(std::abs(p.evaluate(0.0, 0.0) - 2.0) < 1e-15);
    CHECK(std::abs(p.evaluate(1.0, 1.0)) < 1e-15);
    CHECK(std::abs(p.evaluate(cplx(0, 1), cplx(0, -1)) - 2.0) < 1e-15);
}

TEST_CASE("reflection of the worked examples") {
    const auto pt = reflect(p_two_minus());
    CHECK(pt.almost_equal(make_poly({{0, -1}, {-1, 2}}), 1e-15));  // 2 z1 z2 - z1 - z2

    const auto zz = reflect(p_one_11());
    CHECK(zz.almost_equal(make_poly({{0, 0}, {0, 1}}), 1e-15));  // z1 z2

    const auto hp = reflect(p_half_prod());
    CHECK(hp.almost_equal(make_poly({{-0.5, 0}, {0, 1}}), 1e-15));  // z1 z2 - 1/2
}

TEST_CASE("reflection is an involution on random grids") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 25; ++trial) {
        const int m1 = 1 + static_cast<int>(rng() % 4), m2 = 1 + static_cast<int>(rng() % 4);
        MatrixXcd c(m1 + 1, m2 + 1);
        for (Eigen::Index i = 0; i <= m1; ++i)
            for (Eigen::Index j = 0; j <= m2; ++j) c(i, j) = cplx(g(rng), g(rng));
        const BivariatePolynomial p(c);
        CHECK(reflect(reflect(p)).almost_equal(p, 0.0));  // exact
    }
}

TEST_CASE("is_stable verdicts") {
    CHECK(is_stable(p_two_minus()).stable());
    CHECK(is_stable(BivariatePolynomial::constant(1.0)).stable());

    // p = z1 - 1/2 has an interior zero sheet near z1 = 1/2
    const auto unstable = make_poly({{cplx(-0.5)}, {cplx(1.0)}});
    const auto v = is_stable(unstable);
    REQUIRE(v.kind == StabilityVerdict::Kind::UnstableWitness);
    CHECK(std::abs(v.witness[0] - 0.5) < 1e-9);

    CHECK_THROWS_AS(is_stable(p_two_minus(), 8), Error);
}

TEST_CASE("inner_from_stable packages and rejects") {
    const auto phi = inner_from_stable(p_one_11());
    CHECK(phi.p_tilde.almost_equal(make_poly({{0, 0}, {0, 1}}), 1e-15));

    const auto phi2 = inner_from_stable(p_half_prod());
    CHECK(phi2.p_tilde.almost_equal(make_poly({{-0.5, 0}, {0, 1}}), 1e-15));

    CHECK_THROWS_AS(inner_from_stable(make_poly({{cplx(-0.5)}, {cplx(1.0)}})),
                    SingularPointError);
}

TEST_CASE("common factor screen: shared zero curve rejected, isolated zero passes") {
    // (1 + z1 z2)(2 - z1 - z2): 1 + z1 z2 is self-reflective, zeros cover a torus curve
    const auto with_factor =
        make_poly({{2, -1, 0}, {-1, 2, -1}, {0, -1, 0}});
    CHECK(std::abs(with_factor.evaluate(cplx(0, 1), cplx(0, 1)) -
                   (1.0 + cplx(0, 1) * cplx(0, 1)) * (2.0 - 2.0 * cplx(0, 1))) < 1e-14);
    CHECK_THROWS_AS(inner_from_stable(with_factor), Error);

    CHECK_NOTHROW(inner_from_stable(p_two_minus()));  // isolated boundary zero at (1,1)
}

TEST_CASE("evaluate_inner values and singular point") {
    const auto phi = inner_from_stable(p_two_minus());
    CHECK(std::abs(evaluate_inner(phi, 0.5, 0.5) - cplx(-0.5)) < 1e-14);
    CHECK_THROWS_AS(evaluate_inner(phi, 1.0, 1.0), SingularPointError);

    const auto zz = inner_from_stable(p_one_11());
    CHECK(std::abs(evaluate_inner(zz, cplx(0, 1), cplx(0, 1)) - cplx(-1.0)) < 1e-15);
}

TEST_CASE("inner functions are unimodular on the torus and contractive inside") {
    std::mt19937_64 rng(3);
    for (const auto& p : {p_one_11(), p_two_minus(), p_half_prod(), p_blaschke()}) {
        const auto phi = inner_from_stable(p);
        for (int k = 0; k < 1000; ++k) {
            const cplx t1 = random_torus_point(rng), t2 = random_torus_point(rng);
            if (std::abs(phi.p.evaluate(t1, t2)) <= 1e-6) continue;
            CHECK(std::abs(std::abs(evaluate_inner(phi, t1, t2)) - 1.0) < 1e-10);
        }
        for (int k = 0; k < 1000; ++k) {
            const cplx z1 = random_disk_point(rng, 0.999), z2 = random_disk_point(rng, 0.999);
            if (std::abs(phi.p.evaluate(z1, z2)) <= 1e-6) continue;
            CHECK(std::abs(evaluate_inner(phi, z1, z2)) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("padding and exact-degree bookkeeping") {
    const auto one = BivariatePolynomial::constant(1.0).padded_to(1, 1);
    CHECK(one.bidegree() == std::pair<int, int>{1, 1});
    CHECK_FALSE(one.has_exact_bidegree());
    CHECK(p_two_minus().has_exact_bidegree());
    CHECK(one.trimmed().bidegree() == std::pair<int, int>{0, 0});
}
