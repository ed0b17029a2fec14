#ifndef RLAB_TEST_HELPERS_HPP
#define RLAB_TEST_HELPERS_HPP

#include <map>
#include <random>
#include <string>

#include "rlab/realization.hpp"

namespace rlab::testing {

inline BivariatePolynomial make_poly(std::initializer_list<std::initializer_list<cplx>> rows) {
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows.begin()->size());
    MatrixXcd m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (const cplx& v : row) m(i, j++) = v;
        ++i;
    }
    return BivariatePolynomial(m);
}

// phi = z1 z2
inline BivariatePolynomial p_one_11() { return make_poly({{1, 0}, {0, 0}}); }
// phi = -z1 z2
inline BivariatePolynomial p_i_11() { return make_poly({{cplx(0, 1), 0}, {0, 0}}); }
// phi = (2 z1 z2 - z1 - z2) / (2 - z1 - z2)
inline BivariatePolynomial p_two_minus() { return make_poly({{2, -1}, {-1, 0}}); }
// phi = (z1 z2 - 1/2) / (1 - z1 z2 / 2)
inline BivariatePolynomial p_half_prod() { return make_poly({{1, 0}, {0, -0.5}}); }
// phi = z2 (z1 + i/2) / (1 - (i/2) z1), a Blaschke factor times z2
inline BivariatePolynomial p_blaschke() { return make_poly({{1, 0}, {cplx(0, -0.5), 0}}); }
// phi = z1
inline BivariatePolynomial p_z1() { return make_poly({{cplx(1)}, {cplx(0)}}); }

// product of two random bilinear stable factors c - a z1 - b z2, |c| > |a|+|b|
inline BivariatePolynomial random_stable_22(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    MatrixXcd acc = MatrixXcd::Zero(1, 1);
    acc(0, 0) = 1.0;
    for (int f = 0; f < 2; ++f) {
        const cplx a = std::polar(0.2 + 0.4 * unif(rng), 2 * kPi * unif(rng));
        const cplx b = std::polar(0.2 + 0.4 * unif(rng), 2 * kPi * unif(rng));
        const cplx c = (std::abs(a) + std::abs(b)) * (1.15 + 0.45 * unif(rng));
        MatrixXcd fac = MatrixXcd::Zero(2, 2);
        fac(0, 0) = c;
        fac(1, 0) = -a;
        fac(0, 1) = -b;
        MatrixXcd grown = MatrixXcd::Zero(acc.rows() + 1, acc.cols() + 1);
        for (Eigen::Index i = 0; i < 2; ++i)
            for (Eigen::Index j = 0; j < 2; ++j)
                grown.block(i, j, acc.rows(), acc.cols()) += fac(i, j) * acc;
        acc = std::move(grown);
    }
    return BivariatePolynomial(acc);
}

// realization cache shared across test cases in one binary
inline const Realization& realize_cached(const std::string& key, const BivariatePolynomial& p) {
    static std::map<std::string, Realization> cache;
    auto it = cache.find(key);
    if (it == cache.end()) {
        const RationalInnerFunction phi = inner_from_stable(p);
        const SosDecomposition dec = solve_sos(phi);
        it = cache.emplace(key, build_realization(phi, dec)).first;
    }
    return it->second;
}

inline cplx random_disk_point(std::mt19937_64& rng, double radius = 0.95) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return std::polar(radius * std::sqrt(unif(rng)), 2 * kPi * unif(rng));
}

inline cplx random_torus_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return std::polar(1.0, 2 * kPi * unif(rng));
}

}  // namespace rlab::testing

#endif
