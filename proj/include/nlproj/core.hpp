#pragma once

/// @file core.hpp Shared scalar utilities: error types, infinity sentinel,
/// and the deterministic RNG used everywhere randomness is needed.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace nlproj {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Sentinel for absent box bounds. The box projection clamps against it
/// directly; IEEE semantics make the clamp a no-op.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularKktError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when an exhaustive search would exceed its enumeration budget.
struct TooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoProgressError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cone data outside its admissible region (indefinite block, direction
/// outside the range, negative squared radius over the parameter box).
struct ConeDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AdjointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const char* what) {
  if (!cond) throw DimensionError(what);
}

inline void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw NonFiniteError(std::string("non-finite values in ") + what);
}

/// Deterministic RNG. mt19937_64 supplies the bit stream; the uniform and
/// normal draws are implemented here instead of via std distributions so the
/// produced doubles are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform draw in [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64 in every
    // call site, so the bias is far below anything observable.
    return engine_() % n;
  }

  /// Standard normal via Box-Muller, one spare cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vec uniform_vec(Eigen::Index n, double lo, double hi) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Vec normal_vec(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Mat normal_mat(Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    // Row-major fill order so that reshaping the generator does not silently
    // reorder draws.
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Splits a user seed into independent stream seeds (splitmix64 step).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace nlproj
