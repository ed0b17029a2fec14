#ifndef RLAB_MONOTONICITY_HPP
#define RLAB_MONOTONICITY_HPP

#include <functional>

#include "rlab/transforms.hpp"

namespace rlab {

// d-tuple of commuting Hermitian matrices sharing a diagonalizer
struct CommutingTuple {
    int d = 0;
    int n = 0;
    std::vector<MatrixXcd> matrices;
    MatrixXcd Q;        // shared unitary diagonalizer
    MatrixXd spectra;   // d x n; joint spectrum points are the columns

    double commutation_defect() const;
    double diagonalization_defect() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

// Seeded pair with A_j <= B_j exactly (shared Q, per-eigenvalue gaps >= gap)
std::pair<CommutingTuple, CommutingTuple> random_commuting_pair(int n, int d, Interval box,
                                                                double gap, std::uint64_t seed);

// scalar Pick function f = alpha o phi o alpha^{-1}
class PickEvaluator {
   public:
    explicit PickEvaluator(const Realization& R) : R_(&R) {}

    // w in the open poly-upper-half-plane
    cplx eval_complex(cplx w1, cplx w2) const;
    // real rectangle points map to the torus; goes through the boundary
    // continuation and throws when phi attains 1 there (pole of alpha)
    double eval_real(double x1, double x2) const;

    const Realization& realization() const { return *R_; }

   private:
    const Realization* R_;
};

PickEvaluator pick_from_inner(const Realization& R);

// rectangle admissibility: phi must omit 1 on alpha^{-1}(box^2) and the
// realization must continue there
struct RectCheck {
    double min_abs_phi_minus_one = 0.0;
    double min_sigma = 0.0;
    bool admissible = false;
};
RectCheck check_rectangle(const Realization& R, Interval box, int samples = 64);

// Nevanlinna tensor lift: Psi(W) = T11 x I - (T12 x I)(T22 x I + lift(W))^{-1}(T21 x I)
MatrixXcd evaluate_pick_matrix(const NevanlinnaData& N, const MatrixXcd& W1, const MatrixXcd& W2);

// the same lift on the Schur side (matrix Cayley into the realization); used
// as the cross-check when 1 - U is singular and NevanlinnaData is unavailable
MatrixXcd evaluate_pick_matrix_schur(const Realization& R, const MatrixXcd& W1,
                                     const MatrixXcd& W2);

// functional calculus on a commuting tuple: Q diag f(joint spectrum) Q^H
MatrixXcd evaluate_commuting(const std::function<double(const VectorXd&)>& f,
                             const CommutingTuple& t);

struct TrialRecord {
    int n = 0;
    std::uint64_t seed = 0;
    double min_eig = 0.0;
};

struct MonotonicityReport {
    int trials = 0;
    double global_min_eig = 0.0;
    std::vector<TrialRecord> records;
    std::vector<int> failures;       // trial indices below -tol
    int crosschecks = 0;
    double crosscheck_max_diff = 0.0;
};

struct MonotonicityOptions {
    int trials = 200;
    int n_max = 5;
    Interval box{1.0, 2.0};
    double gap = 0.02;
    double tol = 1e-8;
    std::uint64_t seed = 1ull;
    int crosscheck_stride = 10;  // 0 disables matrix-path cross-checks
};

using ScalarFn = std::function<double(const VectorXd&)>;
using MatrixFn = std::function<MatrixXcd(const std::vector<MatrixXcd>&)>;

// lambda_min(f(B) - f(A)) over seeded trials; `matrix_path`, when given, is
// cross-checked against the functional-calculus value on a trial subsample
MonotonicityReport monotonicity_test(const ScalarFn& f, int d, const MonotonicityOptions& opts,
                                     const MatrixFn& matrix_path = nullptr);

// perspective representation f(z) = < (sum z_i^{-1} Y_i)^{-1} nu, nu >
struct PerspectiveRep {
    std::vector<MatrixXcd> Ys;
    VectorXcd nu;

    int d() const { return static_cast<int>(Ys.size()); }
    int r() const { return static_cast<int>(nu.size()); }
    void validate(double tol = 1e-10) const;
};

PerspectiveRep random_perspective(int d, int r, std::uint64_t seed);

cplx perspective_eval(const PerspectiveRep& P, const std::vector<cplx>& z);
MatrixXcd perspective_eval_matrix(const PerspectiveRep& P, const std::vector<MatrixXcd>& Z);

}  // namespace rlab

#endif
