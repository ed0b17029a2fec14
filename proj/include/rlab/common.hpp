#ifndef RLAB_COMMON_HPP
#define RLAB_COMMON_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace rlab {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::RowVectorXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// evaluation at (or too close to) a zero of the denominator polynomial
struct SingularPointError : Error {
    SingularPointError(const std::string& msg, cplx z1, cplx z2)
        : Error(msg), point{z1, z2} {}
    std::array<cplx, 2> point;
};

struct ConvergenceError : Error {
    using Error::Error;
};

struct BuildError : Error {
    using Error::Error;
};

// worker cap from REALIZATION_LAB_THREADS (>=1); hardware concurrency otherwise
unsigned worker_count();

// index-chunked parallel map; runs inline when nthreads == 1 or n is small
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// splitmix64, used to derive independent per-trial seeds
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace rlab

#endif
