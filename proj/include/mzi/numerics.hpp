#pragma once

// Special functions, one-dimensional root finding and minimization, quadrature
// and reproducible random streams.

#include <cstdint>
#include <functional>
#include <random>

namespace mzi::numerics {

using ScalarFunction = std::function<double(double)>;

/// Closed interval [lo, hi] with lo < hi.
class Interval {
public:
    Interval(double lo, double hi);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return hi_ - lo_; }
    double midpoint() const { return 0.5 * (lo_ + hi_); }
    bool contains(double x) const { return x >= lo_ && x <= hi_; }

private:
    double lo_;
    double hi_;
};

/// Error function. Rational Chebyshev approximations (Cody 1969); absolute
/// error below 1e-15 in double precision. erf(-x) == -erf(x) exactly.
double erf(double x);

/// Complementary error function 1 - erf(x), accurate in the far right tail.
double erfc(double x);

/// erf(y) - erf(x). Uses erfc differences when both arguments lie in the same
/// tail so that nearby large arguments do not cancel to zero.
double erf_diff(double x, double y);

/// Root of f on a bracket with f(lo)*f(hi) <= 0 (Brent's method with a
/// bisection safeguard). Stops when the bracket is narrower than tol.
/// Throws NoSignChange when the bracket does not straddle a root.
double find_root(const ScalarFunction& f, const Interval& bracket, double tol = 1e-12);

struct Minimum {
    double x;
    double value;
};

/// Global minimum over the bracket up to grid resolution: scans grid_points
/// equally spaced abscissae, then refines the best cell by golden-section
/// search down to width tol. NaN values are treated as +infinity.
Minimum minimize_scalar(const ScalarFunction& f, const Interval& bracket, double tol = 1e-10,
                        int grid_points = 512);

/// Symmetric difference quotient (f(x+h) - f(x-h)) / (2h).
double central_diff(const ScalarFunction& f, double x, double h);

/// Adaptive 7/15-point Gauss-Kronrod quadrature of f over a finite interval.
double integrate(const ScalarFunction& f, const Interval& range, double abs_tol = 1e-14,
                 double rel_tol = 1e-13);

/// Deterministic uniform stream keyed by (master_seed, stream_index).
///
/// Backed by std::mt19937_64 seeded through std::seed_seq with the two 32-bit
/// halves of the seed and of the index; both algorithms are fixed by the C++
/// standard, and doubles are formed from the top 53 bits, so sequences are
/// bit-identical across platforms and independent of evaluation order.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index);

    /// Next variate in [0, 1).
    double uniform();

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 engine_;
};

/// Advances the stream and returns a variate in [0, 1).
inline double uniform_sample(RandomStream& stream) { return stream.uniform(); }

/// Mixes a seed with a label into a new 64-bit seed (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t label);

}  // namespace mzi::numerics
