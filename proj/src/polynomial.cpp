#include "rlab/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rlab {

BivariatePolynomial::BivariatePolynomial(MatrixXcd coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() < 1 || coeffs_.cols() < 1) {
        throw Error("BivariatePolynomial: empty coefficient grid");
    }
}

cplx BivariatePolynomial::evaluate(cplx z1, cplx z2) const {
    cplx acc = 0.0;
    for (Eigen::Index i = coeffs_.rows() - 1; i >= 0; --i) {
        cplx row = 0.0;
        for (Eigen::Index j = coeffs_.cols() - 1; j >= 0; --j) {
            row = row * z2 + coeffs_(i, j);
        }
        acc = acc * z1 + row;
    }
    return acc;
}

VectorXcd BivariatePolynomial::slice_z1(cplx z2) const {
    VectorXcd c(coeffs_.rows());
    for (Eigen::Index i = 0; i < coeffs_.rows(); ++i) {
        cplx row = 0.0;
        for (Eigen::Index j = coeffs_.cols() - 1; j >= 0; --j) {
            row = row * z2 + coeffs_(i, j);
        }
        c[i] = row;
    }
    return c;
}

VectorXcd BivariatePolynomial::slice_z2(cplx z1) const {
    VectorXcd c(coeffs_.cols());
    for (Eigen::Index j = 0; j < coeffs_.cols(); ++j) {
        cplx col = 0.0;
        for (Eigen::Index i = coeffs_.rows() - 1; i >= 0; --i) {
            col = col * z1 + coeffs_(i, j);
        }
        c[j] = col;
    }
    return c;
}

bool BivariatePolynomial::has_exact_bidegree(double tol) const {
    const double thr = tol * coeff_scale();
    bool row_ok = false, col_ok = false;
    for (Eigen::Index j = 0; j < coeffs_.cols(); ++j) {
        if (std::abs(coeffs_(coeffs_.rows() - 1, j)) > thr) row_ok = true;
    }
    for (Eigen::Index i = 0; i < coeffs_.rows(); ++i) {
        if (std::abs(coeffs_(i, coeffs_.cols() - 1)) > thr) col_ok = true;
    }
    return row_ok && col_ok;
}

BivariatePolynomial BivariatePolynomial::padded_to(int m1, int m2) const {
    if (m1 < deg1() || m2 < deg2()) throw Error("padded_to: target bidegree below current grid");
    MatrixXcd out = MatrixXcd::Zero(m1 + 1, m2 + 1);
    out.topLeftCorner(coeffs_.rows(), coeffs_.cols()) = coeffs_;
    return BivariatePolynomial(std::move(out));
}

BivariatePolynomial BivariatePolynomial::trimmed(double tol) const {
    const double thr = tol * coeff_scale();
    Eigen::Index r = 0, c = 0;
    for (Eigen::Index i = 0; i < coeffs_.rows(); ++i) {
        for (Eigen::Index j = 0; j < coeffs_.cols(); ++j) {
            if (std::abs(coeffs_(i, j)) > thr) {
                r = std::max(r, i);
                c = std::max(c, j);
            }
        }
    }
    return BivariatePolynomial(coeffs_.topLeftCorner(r + 1, c + 1).eval());
}

bool BivariatePolynomial::almost_equal(const BivariatePolynomial& other, double tol) const {
    if (coeffs_.rows() != other.coeffs_.rows() || coeffs_.cols() != other.coeffs_.cols())
        return false;
    return (coeffs_ - other.coeffs_).cwiseAbs().maxCoeff() <= tol;
}

BivariatePolynomial reflect(const BivariatePolynomial& p) {
    const auto& c = p.coeffs();
    MatrixXcd out(c.rows(), c.cols());
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            out(i, j) = std::conj(c(c.rows() - 1 - i, c.cols() - 1 - j));
        }
    }
    return BivariatePolynomial(std::move(out));
}

namespace {

// roots of a dense univariate polynomial via the companion matrix; the
// leading coefficient is trimmed against `lead_thr`
std::vector<cplx> poly_roots(const VectorXcd& coeff, double lead_thr, bool* degenerate) {
    Eigen::Index deg = coeff.size() - 1;
    while (deg >= 0 && std::abs(coeff[deg]) <= lead_thr) --deg;
    *degenerate = false;
    if (deg < 0) {
        *degenerate = true;
        return {};
    }
    if (deg == 0) return {};
    MatrixXcd comp = MatrixXcd::Zero(deg, deg);
    for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -coeff[i] / coeff[deg];
    Eigen::ComplexEigenSolver<MatrixXcd> es(comp, false);
    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
    return roots;
}

}  // namespace

StabilityVerdict is_stable(const BivariatePolynomial& p, int grid_n, double tol) {
    if (grid_n < 16) throw Error("is_stable: grid_n must be >= 16");
    const double scale = p.coeff_scale();
    if (scale == 0.0) {
        StabilityVerdict v;
        v.kind = StabilityVerdict::Kind::UnstableWitness;
        v.detail = "zero polynomial";
        return v;
    }
    const double lead_thr = 1e-13 * scale;
    bool borderline = false;

    StabilityVerdict v;
    for (int k = 0; k < grid_n; ++k) {
        const double r = static_cast<double>(k) / (grid_n - 1);
        const int n_ang = (k == 0) ? 1 : grid_n;
        for (int a = 0; a < n_ang; ++a) {
            const cplx z2 = r * std::polar(1.0, 2.0 * kPi * a / n_ang);
            const VectorXcd c = p.slice_z1(z2);
            bool degenerate = false;
            std::vector<cplx> roots = poly_roots(c, lead_thr, &degenerate);
            if (degenerate) {
                v.kind = StabilityVerdict::Kind::UnstableWitness;
                v.witness = {cplx(0.0), z2};
                v.detail = "p(., z2) vanishes identically at a grid node";
                return v;
            }
            Eigen::Index deg = c.size() - 1;
            while (deg >= 0 && std::abs(c[deg]) <= lead_thr) --deg;
            if (deg >= 1 && std::abs(c[deg]) < 10.0 * lead_thr) borderline = true;
            for (const cplx& root : roots) {
                if (std::abs(root) <= 1.0 - tol) {
                    v.kind = StabilityVerdict::Kind::UnstableWitness;
                    v.witness = {root, z2};
                    std::ostringstream os;
                    os << "root of modulus " << std::abs(root) << " at z2 = (" << z2.real()
                       << ", " << z2.imag() << ")";
                    v.detail = os.str();
                    return v;
                }
            }
        }
    }
    v.kind = borderline ? StabilityVerdict::Kind::Inconclusive : StabilityVerdict::Kind::Stable;
    if (borderline) v.detail = "leading coefficient nearly vanished at some node";
    return v;
}

namespace {

// Shared small values of |p| and |p~| on the torus form a curve exactly when
// p and p~ have a common factor; isolated boundary zeros mark O(1) cells.
void common_factor_screen(const BivariatePolynomial& p, const BivariatePolynomial& pt, int n) {
    const double thr_p = 1e-3 * p.coeff_scale();
    const double thr_t = 1e-3 * pt.coeff_scale();
    std::vector<std::uint8_t> mark(static_cast<std::size_t>(n) * n, 0);
    std::size_t marked = 0;
    for (int a = 0; a < n; ++a) {
        const cplx z1 = std::polar(1.0, 2.0 * kPi * (a + 0.5) / n);
        for (int b = 0; b < n; ++b) {
            const cplx z2 = std::polar(1.0, 2.0 * kPi * (b + 0.5) / n);
            if (std::abs(p.evaluate(z1, z2)) < thr_p && std::abs(pt.evaluate(z1, z2)) < thr_t) {
                mark[static_cast<std::size_t>(a) * n + b] = 1;
                ++marked;
            }
        }
    }
    if (marked == 0) return;

    // flood fill with torus wraparound; a large component means a shared curve
    const std::size_t component_limit = static_cast<std::size_t>(std::max(16, n / 8));
    std::vector<std::uint8_t> seen(mark.size(), 0);
    std::size_t components = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < mark.size(); ++s) {
        if (!mark[s] || seen[s]) continue;
        ++components;
        std::size_t size = 0;
        stack.assign(1, s);
        seen[s] = 1;
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            ++size;
            const int a = static_cast<int>(cur / n), b = static_cast<int>(cur % n);
            for (int da = -1; da <= 1; ++da) {
                for (int db = -1; db <= 1; ++db) {
                    const int na = (a + da + n) % n, nb = (b + db + n) % n;
                    const std::size_t idx = static_cast<std::size_t>(na) * n + nb;
                    if (mark[idx] && !seen[idx]) {
                        seen[idx] = 1;
                        stack.push_back(idx);
                    }
                }
            }
        }
        if (size > component_limit) {
            throw Error("inner_from_stable: p and p~ appear to share a polynomial factor "
                        "(shared zero curve on the torus)");
        }
    }
    const auto [m1, m2] = p.bidegree();
    if (components > static_cast<std::size_t>(std::max(1, m1 * m2)) + 2) {
        throw Error("inner_from_stable: p and p~ share too many torus zeros; "
                    "apparent common factor");
    }
}

}  // namespace

RationalInnerFunction inner_from_stable(const BivariatePolynomial& p,
                                        const InnerFromStableOptions& opts) {
    StabilityVerdict v = is_stable(p, opts.stability_grid_n, opts.stability_tol);
    if (v.kind == StabilityVerdict::Kind::UnstableWitness) {
        std::ostringstream os;
        os << "inner_from_stable: p is not stable (" << v.detail << ")";
        throw SingularPointError(os.str(), v.witness[0], v.witness[1]);
    }
    if (v.kind == StabilityVerdict::Kind::Inconclusive) {
        throw Error("inner_from_stable: stability check inconclusive: " + v.detail);
    }
    BivariatePolynomial pt = reflect(p);
    if (opts.check_common_factor) common_factor_screen(p, pt, opts.common_factor_grid);
    return RationalInnerFunction{p, std::move(pt)};
}

cplx evaluate_inner(const RationalInnerFunction& phi, cplx z1, cplx z2, double tol) {
    const cplx den = phi.p.evaluate(z1, z2);
    if (std::abs(den) <= tol * phi.p.coeff_scale()) {
        throw SingularPointError("evaluate_inner: p vanishes at the requested point", z1, z2);
    }
    return phi.p_tilde.evaluate(z1, z2) / den;
}

}  // namespace rlab
