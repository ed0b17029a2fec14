#include "rlab/model_space.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rlab {

BivariatePolynomial derivative_z1(const BivariatePolynomial& p) {
    const auto& c = p.coeffs();
    if (c.rows() == 1) return BivariatePolynomial(MatrixXcd::Zero(1, c.cols()));
    MatrixXcd d(c.rows() - 1, c.cols());
    for (Eigen::Index i = 1; i < c.rows(); ++i) d.row(i - 1) = static_cast<double>(i) * c.row(i);
    return BivariatePolynomial(std::move(d));
}

BivariatePolynomial derivative_z2(const BivariatePolynomial& p) {
    const auto& c = p.coeffs();
    if (c.cols() == 1) return BivariatePolynomial(MatrixXcd::Zero(c.rows(), 1));
    MatrixXcd d(c.rows(), c.cols() - 1);
    for (Eigen::Index j = 1; j < c.cols(); ++j) d.col(j - 1) = static_cast<double>(j) * c.col(j);
    return BivariatePolynomial(std::move(d));
}

std::vector<TorusPoint> torus_zeros(const BivariatePolynomial& p, int n_grid, double mark_tol) {
    const double scale = p.coeff_scale();
    if (scale == 0.0) throw Error("torus_zeros: zero polynomial");
    if (mark_tol <= 0.0) mark_tol = 0.5 * scale * (2.0 * kPi / n_grid);
    const BivariatePolynomial d1 = derivative_z1(p), d2 = derivative_z2(p);

    std::vector<TorusPoint> found;
    auto try_newton = [&](double t1, double t2) {
        for (int it = 0; it < 40; ++it) {
            const cplx z1 = std::polar(1.0, t1), z2 = std::polar(1.0, t2);
            const cplx v = p.evaluate(z1, z2);
            if (std::abs(v) < 1e-12 * scale) {
                // dedupe against previously refined points
                for (const auto& q : found) {
                    const double w1 = std::abs(std::remainder(q.theta1 - t1, 2.0 * kPi));
                    const double w2 = std::abs(std::remainder(q.theta2 - t2, 2.0 * kPi));
                    if (std::hypot(w1, w2) < 4.0 * kPi / n_grid) return;
                }
                found.push_back({std::remainder(t1, 2.0 * kPi), std::remainder(t2, 2.0 * kPi)});
                return;
            }
            // Newton on (Re p, Im p)(theta1, theta2); d p / d theta_k = i z_k dp/dz_k
            const cplx g1 = cplx(0, 1) * z1 * d1.evaluate(z1, z2);
            const cplx g2 = cplx(0, 1) * z2 * d2.evaluate(z1, z2);
            Eigen::Matrix2d J;
            J << g1.real(), g2.real(), g1.imag(), g2.imag();
            if (std::abs(J.determinant()) < 1e-14 * scale * scale) return;
            const Eigen::Vector2d step = J.partialPivLu().solve(Eigen::Vector2d(v.real(), v.imag()));
            t1 -= step[0];
            t2 -= step[1];
            if (step.norm() > 1.0) return;  // ran away from the cell
        }
    };

    for (int a = 0; a < n_grid; ++a) {
        const double t1 = 2.0 * kPi * a / n_grid;
        const cplx z1 = std::polar(1.0, t1);
        for (int b = 0; b < n_grid; ++b) {
            const double t2 = 2.0 * kPi * b / n_grid;
            if (std::abs(p.evaluate(z1, std::polar(1.0, t2))) < mark_tol) try_newton(t1, t2);
        }
    }
    std::sort(found.begin(), found.end(), [](const TorusPoint& a, const TorusPoint& b) {
        return std::make_pair(a.theta2, a.theta1) < std::make_pair(b.theta2, b.theta1);
    });
    return found;
}

namespace {

// per-row (fixed z2) evaluation cache for one ModelFn
struct RowEval {
    const ModelFn* fn;
    VectorXcd slice;      // z1-coefficients of num(., z2)
    cplx num_at_0_z2;     // num(0, z2)
    VectorXcd axis_vals;  // Kind::BackshiftZ2 only: num(z1,0)/p(z1,0) over the z1 nodes

    cplx value(int j, const VectorXcd& z1pow, cplx pval, cplx p0_z2, cplx z1, cplx z2) const {
        cplx q = 0.0;
        for (Eigen::Index i = slice.size() - 1; i >= 0; --i) q = q * z1 + slice[i];
        const cplx base = q / pval;
        switch (fn->kind) {
            case ModelFn::Kind::Plain:
                return base;
            case ModelFn::Kind::BackshiftZ1:
                return (base - num_at_0_z2 / p0_z2) / z1;
            case ModelFn::Kind::BackshiftZ2:
                return (base - axis_vals[j]) / z2;
        }
        return base;
    }
};

MatrixXcd rect_pass(const BivariatePolynomial& p, const std::vector<ModelFn>& fns, int K, int N) {
    const int M = static_cast<int>(fns.size());
    VectorXcd nodes(N);
    for (int j = 0; j < N; ++j) nodes[j] = std::polar(1.0, 2.0 * kPi * (j + 0.5) / N);

    // z2-independent caches for backward shifts in z2
    std::vector<VectorXcd> axis_cache(M);
    for (int i = 0; i < M; ++i) {
        if (fns[i].kind != ModelFn::Kind::BackshiftZ2) continue;
        axis_cache[i].resize(N);
        const BivariatePolynomial q(fns[i].num);
        for (int j = 0; j < N; ++j) {
            axis_cache[i][j] = q.evaluate(nodes[j], 0.0) / p.evaluate(nodes[j], 0.0);
        }
    }

    MatrixXcd acc = MatrixXcd::Zero(M, K);
    std::vector<MatrixXcd> partial(worker_count(), acc);
    std::vector<MatrixXcd> vals_buf(worker_count(), MatrixXcd(M, N));

    parallel_for(static_cast<std::size_t>(N), [&](std::size_t lo, std::size_t hi) {
        // identify the worker slot by scanning; lo uniquely determines it
        const std::size_t chunk = (N + worker_count() - 1) / worker_count();
        const std::size_t slot = std::min<std::size_t>(lo / std::max<std::size_t>(chunk, 1),
                                                       worker_count() - 1);
        MatrixXcd& vals = vals_buf[slot];
        for (std::size_t k = lo; k < hi; ++k) {
            const cplx z2 = nodes[static_cast<int>(k)];
            const VectorXcd pslice = p.slice_z1(z2);
            const cplx p0_z2 = pslice[0];
            std::vector<RowEval> rows(M);
            for (int i = 0; i < M; ++i) {
                rows[i].fn = &fns[i];
                rows[i].slice = BivariatePolynomial(fns[i].num).slice_z1(z2);
                rows[i].num_at_0_z2 = rows[i].slice[0];
                if (fns[i].kind == ModelFn::Kind::BackshiftZ2) rows[i].axis_vals = axis_cache[i];
            }
            for (int j = 0; j < N; ++j) {
                const cplx z1 = nodes[j];
                cplx pv = 0.0;
                for (Eigen::Index i = pslice.size() - 1; i >= 0; --i) pv = pv * z1 + pslice[i];
                for (int i = 0; i < M; ++i) {
                    vals(i, j) = rows[i].value(j, VectorXcd(), pv, p0_z2, z1, z2);
                }
            }
            partial[slot].noalias() += vals * vals.topRows(K).adjoint();
        }
    });
    for (const auto& m : partial) acc += m;
    return acc / (static_cast<double>(N) * N);
}

// scalar-point evaluation used by the adaptive path
cplx eval_fn(const BivariatePolynomial& p, const ModelFn& f, cplx z1, cplx z2) {
    const BivariatePolynomial q(f.num);
    const cplx base = q.evaluate(z1, z2) / p.evaluate(z1, z2);
    switch (f.kind) {
        case ModelFn::Kind::Plain:
            return base;
        case ModelFn::Kind::BackshiftZ1:
            return (base - q.evaluate(0.0, z2) / p.evaluate(0.0, z2)) / z1;
        case ModelFn::Kind::BackshiftZ2:
            return (base - q.evaluate(z1, 0.0) / p.evaluate(z1, 0.0)) / z2;
    }
    return base;
}

// Gauss-Kronrod 15(7) nodes and weights (positive half)
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                            0.741531185599394, 0.586087235467691, 0.405845151377397,
                            0.207784955007898, 0.0};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                            0.140653259715525, 0.169004726639267, 0.190350578064785,
                            0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

struct Segment {
    double a, b;
    int depth;
};

// One quadrature sample: values plus a pointwise round-off estimate in the
// same units (evaluation near a zero of p amplifies noise by scale/|p|).
struct Sample {
    VectorXcd v;
    double noise = 0.0;
};

struct GkResult {
    VectorXcd value;
    double noise = 0.0;  // integrated noise estimate of the accepted segments
};

// Adaptive vector-valued Gauss-Kronrod. A segment is accepted when the
// K15-G7 gap is inside its share of the tolerance or indistinguishable from
// the integrand's own floating-point noise, which near the boundary zeros of
// p is the binding constraint.
GkResult adaptive_gk(const std::function<Sample(double)>& f, double a, double b, double tol,
                     int max_depth) {
    GkResult out;
    std::vector<Segment> stack{{a, b, 0}};
    const double span = b - a;
    long segments = 0;
    constexpr long kSegmentCap = 60000;
    while (!stack.empty()) {
        const Segment s = stack.back();
        stack.pop_back();
        ++segments;
        const double mid = 0.5 * (s.a + s.b), half = 0.5 * (s.b - s.a);
        VectorXcd k15, g7;
        double noise15 = 0.0;
        auto add = [&](double x, double wk, double wg) {
            const Sample smp = f(x);
            if (k15.size() == 0) {
                k15 = VectorXcd::Zero(smp.v.size());
                g7 = VectorXcd::Zero(smp.v.size());
            }
            k15 += wk * smp.v;
            if (wg != 0.0) g7 += wg * smp.v;
            noise15 += wk * (smp.noise + 1e-14 * smp.v.cwiseAbs().maxCoeff());
        };
        for (int i = 0; i < 7; ++i) {
            const double wg = (i % 2 == 1) ? kWg[i / 2] : 0.0;
            add(mid + half * kXgk[i], kWgk[i], wg);
            add(mid - half * kXgk[i], kWgk[i], wg);
        }
        add(mid, kWgk[7], kWg[3]);
        k15 *= half;
        g7 *= half;
        noise15 *= half;
        const double err = (k15 - g7).cwiseAbs().maxCoeff();
        const double budget = std::max(tol * ((s.b - s.a) / span), 4.0 * noise15);
        if (err <= budget || s.depth >= max_depth || segments > kSegmentCap) {
            if (out.value.size() == 0) out.value = VectorXcd::Zero(k15.size());
            out.value += k15;
            out.noise += noise15 + std::min(err, budget);
        } else {
            stack.push_back({s.a, mid, s.depth + 1});
            stack.push_back({mid, s.b, s.depth + 1});
        }
    }
    return out;
}

MatrixXcd adaptive_pass(const BivariatePolynomial& p, const std::vector<ModelFn>& fns, int K,
                        const std::vector<double>& singular_theta2, const EngineOptions& opts) {
    const int M = static_cast<int>(fns.size());
    const double pscale = p.coeff_scale();
    auto pair_vec = [&](double th1, double th2) -> Sample {
        const cplx z1 = std::polar(1.0, th1), z2 = std::polar(1.0, th2);
        const cplx pv = p.evaluate(z1, z2);
        // cancellation amplification of 1/p dominates every other source
        const double rel = 2.2e-16 * (4.0 + 2.0 * pscale / std::abs(pv));
        VectorXcd vals(M);
        for (int i = 0; i < M; ++i) vals[i] = eval_fn(p, fns[i], z1, z2);
        Sample smp;
        smp.v.resize(static_cast<Eigen::Index>(M) * K);
        for (int j = 0; j < K; ++j) smp.v.segment(static_cast<Eigen::Index>(j) * M, M) =
            vals * std::conj(vals[j]);
        smp.noise = 2.0 * rel * smp.v.cwiseAbs().maxCoeff();
        return smp;
    };
    auto inner = [&](double th2) -> GkResult {
        GkResult r = adaptive_gk([&](double th1) { return pair_vec(th1, th2); }, 0.0, 2.0 * kPi,
                                 opts.adaptive_tol, opts.max_depth);
        r.value /= 2.0 * kPi;
        r.noise /= 2.0 * kPi;
        return r;
    };

    std::vector<std::pair<double, double>> pieces;
    bool singular_endpoints = !singular_theta2.empty();
    if (!singular_endpoints) {
        pieces.emplace_back(0.0, 2.0 * kPi);
    } else {
        std::vector<double> angs(singular_theta2);
        for (double& a : angs) a = std::fmod(a + 4.0 * kPi, 2.0 * kPi);
        std::sort(angs.begin(), angs.end());
        angs.erase(std::unique(angs.begin(), angs.end(),
                               [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                   angs.end());
        for (std::size_t i = 0; i < angs.size(); ++i) {
            const double a = angs[i];
            const double b = (i + 1 < angs.size()) ? angs[i + 1] : angs[0] + 2.0 * kPi;
            pieces.emplace_back(a, b);
        }
    }

    // A singular angle makes the rows just inside it unresolvable (the inner
    // peaks have width ~ psi^2), but the slice value h(psi) stays continuous,
    // so a frozen band of width eps0 at each end costs only O(eps0^2). The
    // rest is integrated in log coordinates toward each endpoint.
    const double eps0 = opts.corner_band;
    VectorXcd total = VectorXcd::Zero(static_cast<Eigen::Index>(M) * K);
    std::vector<VectorXcd> parts(pieces.size());
    parallel_for(pieces.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const auto [a, b] = pieces[idx];
            if (!singular_endpoints) {
                parts[idx] = adaptive_gk([&](double th2) -> Sample {
                                 const GkResult r = inner(th2);
                                 return {r.value, r.noise};
                             },
                                         a, b, opts.adaptive_tol, opts.max_depth)
                                 .value;
                continue;
            }
            const double mid = 0.5 * (a + b);
            VectorXcd acc = eps0 * inner(a + 0.5 * eps0).value;  // frozen corner bands
            acc += eps0 * inner(b - 0.5 * eps0).value;
            // psi = a + e^u (and mirrored), u in [log eps0, log (half-width)]
            auto left = [&](double u) -> Sample {
                const GkResult r = inner(a + std::exp(u));
                return {std::exp(u) * r.value, std::exp(u) * r.noise};
            };
            auto right = [&](double u) -> Sample {
                const GkResult r = inner(b - std::exp(u));
                return {std::exp(u) * r.value, std::exp(u) * r.noise};
            };
            acc += adaptive_gk(left, std::log(eps0), std::log(mid - a), opts.adaptive_tol,
                               opts.max_depth)
                       .value;
            acc += adaptive_gk(right, std::log(eps0), std::log(b - mid), opts.adaptive_tol,
                               opts.max_depth)
                       .value;
            parts[idx] = acc;
        }
    });
    for (const auto& v : parts) total += v;
    total /= 2.0 * kPi;
    return Eigen::Map<const MatrixXcd>(total.data(), M, K);
}

}  // namespace

EngineResult inner_products(const BivariatePolynomial& p, const std::vector<ModelFn>& fns, int K,
                            const EngineOptions& opts) {
    EngineResult res;
    const std::vector<TorusPoint> zeros = torus_zeros(p);
    if (zeros.empty()) {
        MatrixXcd prev = rect_pass(p, fns, K, opts.start_N);
        for (int N = 2 * opts.start_N; N <= opts.max_N; N *= 2) {
            MatrixXcd cur = rect_pass(p, fns, K, N);
            res.ladder_diff = (cur - prev).cwiseAbs().maxCoeff();
            prev.swap(cur);
            if (res.ladder_diff < opts.rect_tol) {
                res.ip = std::move(prev);
                res.rect_N = N;
                return res;
            }
        }
        // no torus zeros yet slow: fall through to the adaptive scheme
    }
    std::vector<double> angles;
    angles.reserve(zeros.size());
    for (const auto& q : zeros) angles.push_back(q.theta2);
    res.ip = adaptive_pass(p, fns, K, angles, opts);
    res.adaptive = true;
    return res;
}

MatrixXcd torus_gram(const std::vector<RationalFn>& fns, int N) {
    if (N < 128 || (N & (N - 1)) != 0) throw Error("torus_gram: N must be a power of two >= 128");
    const int M = static_cast<int>(fns.size());
    for (double offset : {0.0, 0.5}) {
        bool clean = true;
        for (int a = 0; a < N && clean; ++a) {
            const cplx z1 = std::polar(1.0, 2.0 * kPi * (a + offset) / N);
            for (int b = 0; b < N && clean; ++b) {
                const cplx z2 = std::polar(1.0, 2.0 * kPi * (b + offset) / N);
                for (const auto& f : fns) {
                    if (std::abs(f.den.evaluate(z1, z2)) < 1e-8 * f.den.coeff_scale()) {
                        clean = false;
                        break;
                    }
                }
            }
        }
        if (!clean) continue;
        MatrixXcd acc = MatrixXcd::Zero(M, M);
        MatrixXcd vals(M, N);
        for (int b = 0; b < N; ++b) {
            const cplx z2 = std::polar(1.0, 2.0 * kPi * (b + offset) / N);
            for (int a = 0; a < N; ++a) {
                const cplx z1 = std::polar(1.0, 2.0 * kPi * (a + offset) / N);
                for (int i = 0; i < M; ++i)
                    vals(i, a) = fns[i].num.evaluate(z1, z2) / fns[i].den.evaluate(z1, z2);
            }
            acc.noalias() += vals * vals.adjoint();
        }
        return acc / (static_cast<double>(N) * N);
    }
    throw Error("torus_gram: grid node within 1e-8 of a denominator zero even after the "
                "half-cell offset; increase N");
}

cplx ModelBasis::eval(int i, cplx z1, cplx z2) const {
    return BivariatePolynomial(numerator(i)).evaluate(z1, z2) / phi.p.evaluate(z1, z2);
}

std::shared_ptr<const ModelBasis> orthonormal_model_basis(const RationalInnerFunction& phi,
                                                          const SosDecomposition& dec,
                                                          const EngineOptions& opts) {
    auto numerator_grid = [](const VectorXcd& v, const std::vector<Monomial>& window) {
        int m1 = 0, m2 = 0;
        for (const auto& [a, b] : window) {
            m1 = std::max(m1, a);
            m2 = std::max(m2, b);
        }
        MatrixXcd q = MatrixXcd::Zero(m1 + 1, m2 + 1);
        for (std::size_t i = 0; i < window.size(); ++i) q(window[i].first, window[i].second) = v[i];
        return q;
    };

    const std::vector<VectorXcd> f2 = gram_factor(dec.G2, 1e-8);
    const std::vector<VectorXcd> f1 = gram_factor(dec.G1, 1e-8);
    std::vector<ModelFn> fns;
    for (const auto& v : f2) fns.push_back(ModelFn::plain(numerator_grid(v, dec.window2)));
    for (const auto& v : f1) fns.push_back(ModelFn::plain(numerator_grid(v, dec.window1)));
    const int K = static_cast<int>(fns.size());
    if (K == 0) {
        auto basis = std::make_shared<ModelBasis>();
        basis->phi = phi;
        return basis;
    }

    EngineResult er = inner_products(phi.p, fns, K, opts);
    const MatrixXcd gram = 0.5 * (er.ip + er.ip.adjoint());
    const int s1 = static_cast<int>(f2.size());

    // blockwise Cholesky; e = L^{-1} f has Gram L^{-1} G L^{-H}
    MatrixXcd Ainv = MatrixXcd::Zero(K, K);
    auto block_chol = [&](int off, int n) {
        if (n == 0) return;
        Eigen::LLT<MatrixXcd> llt(gram.block(off, off, n, n));
        if (llt.info() != Eigen::Success) {
            throw Error("orthonormal_model_basis: block Gram matrix is numerically singular; "
                        "the decomposition was not rank-reduced");
        }
        Ainv.block(off, off, n, n) =
            llt.matrixL().solve(MatrixXcd::Identity(n, n));
    };
    block_chol(0, s1);
    block_chol(s1, K - s1);

    const double defect = (Ainv * gram * Ainv.adjoint() - MatrixXcd::Identity(K, K))
                              .cwiseAbs()
                              .maxCoeff();

    auto basis = std::make_shared<ModelBasis>();
    basis->phi = phi;
    basis->gram_defect = defect;
    basis->quad_N = er.rect_N;
    basis->adaptive = er.adaptive;
    for (int i = 0; i < K; ++i) {
        MatrixXcd q;
        for (int j = 0; j < K; ++j) {
            if (Ainv(i, j) == cplx(0.0)) continue;
            MatrixXcd term = Ainv(i, j) * fns[j].num;
            if (q.size() == 0) {
                q = term;
            } else {
                const Eigen::Index r = std::max(q.rows(), term.rows());
                const Eigen::Index c = std::max(q.cols(), term.cols());
                MatrixXcd grown = MatrixXcd::Zero(r, c);
                grown.topLeftCorner(q.rows(), q.cols()) = q;
                grown.topLeftCorner(term.rows(), term.cols()) += term;
                q = std::move(grown);
            }
        }
        if (i < s1) {
            basis->k2_numerators.push_back(std::move(q));
        } else {
            basis->k1_numerators.push_back(std::move(q));
        }
    }
    return basis;
}

}  // namespace rlab
