#include <doctest.h>

#include "helpers.hpp"
#include "rlab/monotonicity.hpp"

using namespace rlab;
using namespace rlab::testing;

TEST_CASE("random commuting pairs") {
    auto [A, B] = random_commuting_pair(4, 2, {1.0, 2.0}, 0.05, 42);
    CHECK(A.commutation_defect() < 1e-10);
    CHECK(B.commutation_defect() < 1e-10);
    CHECK(A.diagonalization_defect() < 1e-10);
    for (int j = 0; j < 2; ++j) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(B.matrices[j] - A.matrices[j]);
        CHECK(es.eigenvalues().minCoeff() > 0.05 - 1e-12);
        CHECK(A.spectra.row(j).minCoeff() >= 1.0);
        CHECK(B.spectra.row(j).maxCoeff() <= 2.0);
    }

    // determinism: same seed, bit-identical draws
    auto [A2, B2] = random_commuting_pair(4, 2, {1.0, 2.0}, 0.05, 42);
    CHECK((A.matrices[0] - A2.matrices[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((B.matrices[1] - B2.matrices[1]).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(random_commuting_pair(2, 2, {1.0, 1.01}, 0.5, 1), Error);

    // n = 1, d = 2 reduces to ordered scalar pairs
    auto [a, b] = random_commuting_pair(1, 2, {1.0, 2.0}, 0.0, 7);
    CHECK(a.spectra(0, 0) <= b.spectra(0, 0));
    CHECK(a.spectra(1, 0) <= b.spectra(1, 0));
}

TEST_CASE("pick_from_inner values") {
    const auto& neg = realize_cached("neg_z1z2", p_i_11());
    const PickEvaluator f = pick_from_inner(neg);
    // alpha^{-1}(i) = 0, phi(0,0) = 0, alpha(0) = i
    CHECK(std::abs(f.eval_complex(cplx(0, 1), cplx(0, 1)) - cplx(0, 1)) < 1e-10);

    const auto& tm = realize_cached("two_minus", p_two_minus());
    const PickEvaluator g = pick_from_inner(tm);
    for (double x : {1.0, 1.3, 1.7, 2.0}) {
        CHECK(std::isfinite(g.eval_real(x, x)));  // real on the admissible rectangle
    }

    // phi == -1 gives the constant Pick function alpha(-1) = 0
    Realization C;
    C.A = -1.0;
    C.B = RowVectorXcd(0);
    C.C = VectorXcd(0);
    C.D = MatrixXcd(0, 0);
    C.phi.p = BivariatePolynomial::constant(1.0);
    C.phi.p_tilde = BivariatePolynomial::constant(-1.0);
    const PickEvaluator h = pick_from_inner(C);
    CHECK(std::abs(h.eval_real(1.5, 1.5)) < 1e-12);
}

TEST_CASE("rectangle admissibility") {
    const auto& tm = realize_cached("two_minus", p_two_minus());
    CHECK(check_rectangle(tm, {1.0, 2.0}).admissible);
    // phi = 1 on the curve tau1 tau2 = 1, whose alpha-image meets {x1 = -x2};
    // a rectangle straddling zero picks that up
    CHECK_FALSE(check_rectangle(tm, {-1.0, 1.0}).admissible);
}

TEST_CASE("evaluate_commuting basics") {
    auto [A, B] = random_commuting_pair(3, 2, {1.0, 2.0}, 0.1, 5);
    const auto sum = evaluate_commuting([](const VectorXd& x) { return x[0] + x[1]; }, A);
    CHECK((sum - (A.matrices[0] + A.matrices[1])).cwiseAbs().maxCoeff() < 1e-10);

    auto [a, b] = random_commuting_pair(1, 2, {1.0, 2.0}, 0.1, 6);
    const auto fa = evaluate_commuting([](const VectorXd& x) { return x[0] * x[1]; }, a);
    CHECK(std::abs(fa(0, 0).real() - a.spectra(0, 0) * a.spectra(1, 0)) < 1e-12);
}

TEST_CASE("pick-matrix lifts agree with the functional calculus") {
    // Hermitian-positive branch through NevanlinnaData requires T22 PSD:
    // the Blaschke example has it
    const auto& bl = realize_cached("blaschke", p_blaschke());
    const NevanlinnaData N = herglotz_to_nevanlinna(bl);
    REQUIRE(N.t22_min_eig > -1e-9);
    const PickEvaluator f = pick_from_inner(bl);

    auto [A, B] = random_commuting_pair(3, 2, {1.0, 2.0}, 0.05, 11);
    const MatrixXcd lift = evaluate_pick_matrix(N, B.matrices[0], B.matrices[1]);
    const MatrixXcd fc =
        evaluate_commuting([&](const VectorXd& x) { return f.eval_real(x[0], x[1]); }, B);
    CHECK((0.5 * (lift + lift.adjoint()) - fc).cwiseAbs().maxCoeff() < 1e-8);

    // n = 1 reduces to evaluate_nevanlinna
    MatrixXcd w1(1, 1), w2(1, 1);
    w1 << cplx(0.3, 0.9);
    w2 << cplx(-0.2, 1.4);
    const MatrixXcd scalar = evaluate_pick_matrix(N, w1, w2);
    CHECK(std::abs(scalar(0, 0) - evaluate_nevanlinna(N, w1(0, 0), w2(0, 0))) < 1e-12);

    // commuting diagonal inputs give diagonal outputs with entries Psi(w1_i, w2_i)
    MatrixXcd D1 = MatrixXcd::Zero(2, 2), D2 = MatrixXcd::Zero(2, 2);
    D1.diagonal() << 1.2, 1.8;
    D2.diagonal() << 1.5, 1.1;
    const MatrixXcd diag = evaluate_pick_matrix(N, D1, D2);
    CHECK(std::abs(diag(0, 1)) < 1e-10);
    CHECK(std::abs(diag(0, 0) - evaluate_nevanlinna(N, 1.2, 1.5)) < 1e-9);
    CHECK(std::abs(diag(1, 1) - evaluate_nevanlinna(N, 1.8, 1.1)) < 1e-9);

    // the Schur-side lift agrees too (and works without NevanlinnaData)
    const MatrixXcd schur = evaluate_pick_matrix_schur(bl, B.matrices[0], B.matrices[1]);
    CHECK((0.5 * (schur + schur.adjoint()) - fc).cwiseAbs().maxCoeff() < 1e-8);

    const auto& tm = realize_cached("two_minus", p_two_minus());
    const PickEvaluator g = pick_from_inner(tm);
    const MatrixXcd schur_tm = evaluate_pick_matrix_schur(tm, B.matrices[0], B.matrices[1]);
    const MatrixXcd fc_tm =
        evaluate_commuting([&](const VectorXd& x) { return g.eval_real(x[0], x[1]); }, B);
    CHECK((0.5 * (schur_tm + schur_tm.adjoint()) - fc_tm).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("evaluate_pick_matrix precondition gate") {
    const auto& neg = realize_cached("neg_z1z2", p_i_11());
    const NevanlinnaData N = herglotz_to_nevanlinna(neg);
    REQUIRE(N.t22_min_eig < -0.5);  // not PSD for this example
    MatrixXcd I1 = MatrixXcd::Identity(1, 1);
    CHECK_THROWS_AS(evaluate_pick_matrix(N, I1, I1), Error);  // Hermitian branch refused
    MatrixXcd up = cplx(0, 1) * I1;
    CHECK_NOTHROW(evaluate_pick_matrix(N, up, up));  // upper-half branch fine
}

TEST_CASE("monotonicity_test on closed-form functions") {
    MonotonicityOptions opts;
    opts.trials = 100;
    opts.box = {1.0, 2.0};
    opts.gap = 0.05;
    opts.seed = 12345;

    const auto lin = monotonicity_test([](const VectorXd& x) { return x[0] + x[1]; }, 2, opts);
    CHECK(lin.failures.empty());
    CHECK(lin.global_min_eig >= 2 * opts.gap - 1e-12);

    const auto inv =
        monotonicity_test([](const VectorXd& x) { return -1.0 / (x[0] + x[1]); }, 2, opts);
    CHECK(inv.failures.empty());
    CHECK(inv.global_min_eig >= -opts.tol);

    // the detector has power: (x - 3)^2 is not matrix monotone on [1, 5]
    MonotonicityOptions wide = opts;
    wide.box = {1.0, 5.0};
    const auto bad = monotonicity_test(
        [](const VectorXd& x) { return (x[0] - 3.0) * (x[0] - 3.0); }, 2, wide);
    CHECK_FALSE(bad.failures.empty());
}

TEST_CASE("monotonicity of the rational inner example on an admissible rectangle") {
    const auto& tm = realize_cached("two_minus", p_two_minus());
    const PickEvaluator f = pick_from_inner(tm);
    MonotonicityOptions opts;
    opts.trials = 60;
    opts.n_max = 4;
    opts.box = {1.0, 2.0};
    opts.gap = 0.02;
    opts.seed = 777;
    const auto rep = monotonicity_test(
        [&](const VectorXd& x) { return f.eval_real(x[0], x[1]); }, 2, opts,
        [&](const std::vector<MatrixXcd>& Z) {
            return evaluate_pick_matrix_schur(tm, Z[0], Z[1]);
        });
    CHECK(rep.failures.empty());
    CHECK(rep.global_min_eig > -opts.tol);
    CHECK(rep.crosschecks > 0);
    CHECK(rep.crosscheck_max_diff < 1e-8);
}

TEST_CASE("monotone path consistency") {
    const auto& tm = realize_cached("two_minus", p_two_minus());
    const PickEvaluator f = pick_from_inner(tm);
    auto [A, B] = random_commuting_pair(4, 2, {1.0, 2.0}, 0.05, 2024);
    MatrixXcd prev;
    for (int step = 0; step <= 4; ++step) {
        const double t = step / 4.0;
        CommutingTuple At = A;
        At.spectra = (1 - t) * A.spectra + t * B.spectra;
        At.matrices.clear();
        for (int j = 0; j < 2; ++j) {
            At.matrices.push_back(
                At.Q * At.spectra.row(j).asDiagonal().toDenseMatrix().cast<cplx>() *
                At.Q.adjoint());
        }
        const MatrixXcd ft =
            evaluate_commuting([&](const VectorXd& x) { return f.eval_real(x[0], x[1]); }, At);
        if (step > 0) {
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(ft - prev, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() > -1e-8);
        }
        prev = ft;
    }
}

TEST_CASE("perspective representation: harmonic mean and homogeneity") {
    PerspectiveRep P;
    P.Ys = {0.5 * MatrixXcd::Identity(1, 1), 0.5 * MatrixXcd::Identity(1, 1)};
    P.nu = VectorXcd::Ones(1);
    P.validate();

    CHECK(std::abs(perspective_eval(P, {1.0, 1.0}) - 1.0) < 1e-14);  // harmonic mean at (1,1)
    CHECK(std::abs(perspective_eval(P, {2.0, 2.0}) - 2.0) < 1e-14);
    CHECK(std::abs(perspective_eval(P, {1.0, 3.0}) - 1.5) < 1e-14);  // 2xy/(x+y)

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unif(0.5, 5.0);
    for (double t : {2.0, 10.0, 100.0}) {
        const std::vector<cplx> z{unif(rng), unif(rng)};
        const cplx f1 = perspective_eval(P, z);
        const cplx ft = perspective_eval(P, {t * z[0], t * z[1]});
        CHECK(std::abs(ft - t * f1) <= 1e-10 * t * std::abs(f1));
    }

    // matrix path vs functional calculus on commuting inputs
    auto [A, B] = random_commuting_pair(3, 2, {1.0, 10.0}, 0.1, 31);
    const MatrixXcd lift = perspective_eval_matrix(P, B.matrices);
    const MatrixXcd fc = evaluate_commuting(
        [&](const VectorXd& x) {
            return perspective_eval(P, {x[0], x[1]}).real();
        },
        B);
    CHECK((0.5 * (lift + lift.adjoint()) - fc).cwiseAbs().maxCoeff() < 1e-9);

    MonotonicityOptions opts;
    opts.trials = 100;
    opts.box = {1.0, 10.0};
    opts.gap = 0.05;
    opts.seed = 99;
    const auto rep = monotonicity_test(
        [&](const VectorXd& x) { return perspective_eval(P, {x[0], x[1]}).real(); }, 2, opts,
        [&](const std::vector<MatrixXcd>& Z) { return perspective_eval_matrix(P, Z); });
    CHECK(rep.failures.empty());
    CHECK(rep.crosscheck_max_diff < 1e-8);
}

TEST_CASE("random perspective representations") {
    const PerspectiveRep P = random_perspective(3, 2, 404);
    P.validate();
    CHECK(P.d() == 3);
    CHECK(P.r() == 2);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(1.0, 10.0);
    for (double t : {2.0, 10.0}) {
        const std::vector<cplx> z{unif(rng), unif(rng), unif(rng)};
        const cplx f1 = perspective_eval(P, z);
        const cplx ft = perspective_eval(P, {t * z[0], t * z[1], t * z[2]});
        CHECK(std::abs(ft - t * f1) <= 1e-10 * t * std::abs(f1));
    }

    MonotonicityOptions opts;
    opts.trials = 60;
    opts.n_max = 3;
    opts.box = {1.0, 10.0};
    opts.gap = 0.05;
    opts.seed = 17;
    const auto rep = monotonicity_test(
        [&](const VectorXd& x) {
            return perspective_eval(P, {x[0], x[1], x[2]}).real();
        },
        3, opts, [&](const std::vector<MatrixXcd>& Z) { return perspective_eval_matrix(P, Z); });
    CHECK(rep.failures.empty());
    CHECK(rep.crosscheck_max_diff < 1e-8);
}
