#include "mzi/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "mzi/error.hpp"

namespace mzi::numerics {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi)) {
        std::ostringstream msg;
        msg << "interval requires lo < hi, got [" << lo << ", " << hi << "]";
        throw InvalidInterval(msg.str());
    }
}

// ---------------------------------------------------------------------------
// Error function
//
// W. J. Cody, "Rational Chebyshev approximations for the error function",
// Math. Comp. 23 (1969) 631-638, as packaged in the SPECFUN routine CALERF.
// Three regions: |x| <= 0.46875 (erf directly), 0.46875 < |x| <= 4 and
// |x| > 4 (erfc, with exp(-x^2) split into two factors to keep the argument
// exact).
namespace {

constexpr double kThresh = 0.46875;
constexpr double kXSmall = 1.11e-16;
constexpr double kXBig = 26.543;
constexpr double kSqrtPiInv = 0.56418958354775628695;

constexpr std::array<double, 5> kA = {3.16112374387056560e00, 1.13864154151050156e02,
                                      3.77485237685302021e02, 3.20937758913846947e03,
                                      1.85777706184603153e-1};
constexpr std::array<double, 4> kB = {2.36012909523441209e01, 2.44024637934444173e02,
                                      1.28261652607737228e03, 2.84423683343917062e03};
constexpr std::array<double, 9> kC = {5.64188496988670089e-1, 8.88314979438837594e00,
                                      6.61191906371416295e01, 2.98635138197400131e02,
                                      8.81952221241769090e02, 1.71204761263407058e03,
                                      2.05107837782607147e03, 1.23033935479799725e03,
                                      2.15311535474403846e-8};
constexpr std::array<double, 8> kD = {1.57449261107098347e01, 1.17693950891312499e02,
                                      5.37181101862009858e02, 1.62138957456669019e03,
                                      3.29079923573345963e03, 4.36261909014324716e03,
                                      3.43936767414372164e03, 1.23033935480374942e03};
constexpr std::array<double, 6> kP = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                      1.25781726111229246e-1, 1.60837851487422766e-2,
                                      6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr std::array<double, 5> kQ = {2.56852019228982242e00, 1.87295284992346047e00,
                                      5.27905102951428412e-1, 6.05183413124413191e-2,
                                      2.33520497626869185e-3};

// erf(y) for 0 <= y <= kThresh.
double erf_small(double y) {
    const double ysq = y > kXSmall ? y * y : 0.0;
    double num = kA[4] * ysq;
    double den = ysq;
    for (int i = 0; i < 3; ++i) {
        num = (num + kA[i]) * ysq;
        den = (den + kB[i]) * ysq;
    }
    return y * (num + kA[3]) / (den + kB[3]);
}

// exp(-y*y) with the square split as y = ysq + (y - ysq), ysq a multiple of 1/16.
double exp_neg_square(double y) {
    const double ysq = std::trunc(y * 16.0) / 16.0;
    const double del = (y - ysq) * (y + ysq);
    return std::exp(-ysq * ysq) * std::exp(-del);
}

// erfc(y) for y > kThresh.
double erfc_positive(double y) {
    if (y <= 4.0) {
        double num = kC[8] * y;
        double den = y;
        for (int i = 0; i < 7; ++i) {
            num = (num + kC[i]) * y;
            den = (den + kD[i]) * y;
        }
        return exp_neg_square(y) * (num + kC[7]) / (den + kD[7]);
    }
    if (y >= kXBig) {
        return 0.0;
    }
    const double ysq = 1.0 / (y * y);
    double num = kP[5] * ysq;
    double den = ysq;
    for (int i = 0; i < 4; ++i) {
        num = (num + kP[i]) * ysq;
        den = (den + kQ[i]) * ysq;
    }
    double result = ysq * (num + kP[4]) / (den + kQ[4]);
    result = (kSqrtPiInv - result) / y;
    return exp_neg_square(y) * result;
}

}  // namespace

double erf(double x) {
    const double y = std::fabs(x);
    double result;
    if (y <= kThresh) {
        result = erf_small(y);
    } else {
        result = (0.5 - erfc_positive(y)) + 0.5;
    }
    return x < 0.0 ? -result : result;
}

double erfc(double x) {
    const double y = std::fabs(x);
    if (y <= kThresh) {
        const double e = erf_small(y);
        return x < 0.0 ? 1.0 + e : 1.0 - e;
    }
    const double tail = erfc_positive(y);
    return x < 0.0 ? 2.0 - tail : tail;
}

double erf_diff(double x, double y) {
    if (x == y) {
        return 0.0;
    }
    if (x > y) {
        return -erf_diff(y, x);
    }
    // x < y from here on.
    if (x >= 0.5) {
        return erfc(x) - erfc(y);
    }
    if (y <= -0.5) {
        return erfc(-y) - erfc(-x);
    }
    return erf(y) - erf(x);
}

// ---------------------------------------------------------------------------
// Root finding

double find_root(const ScalarFunction& f, const Interval& bracket, double tol) {
    double a = bracket.lo();
    double b = bracket.hi();
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) {
        return a;
    }
    if (fb == 0.0) {
        return b;
    }
    if (!(fa * fb < 0.0)) {
        std::ostringstream msg;
        msg << "no sign change on [" << a << ", " << b << "]: f(lo)=" << fa << ", f(hi)=" << fb;
        throw NoSignChange(msg.str());
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;

    for (int iter = 0; iter < 400; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::fabs(b) + 0.5 * tol;
        const double m = 0.5 * (c - b);
        if (std::fabs(m) <= tol1 || fb == 0.0) {
            return b;
        }
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            // Secant or inverse quadratic interpolation.
            double p;
            double q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) {
                q = -q;
            } else {
                p = -p;
            }
            if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::fabs(d) > tol1 ? d : (m > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }

    // Interpolation stalled; finish with plain bisection on [b, c].
    double lo = std::min(b, c);
    double hi = std::max(b, c);
    double flo = f(lo);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) {
            return mid;
        }
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Minimization

namespace {

double finite_or_inf(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

}  // namespace

Minimum minimize_scalar(const ScalarFunction& f, const Interval& bracket, double tol,
                        int grid_points) {
    grid_points = std::max(grid_points, 512);
    const double step = bracket.width() / (grid_points - 1);

    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_points; ++i) {
        const double x = bracket.lo() + i * step;
        const double v = finite_or_inf(f(x));
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }

    double a = bracket.lo() + std::max(best - 1, 0) * step;
    double b = bracket.lo() + std::min(best + 1, grid_points - 1) * step;
    Minimum result{bracket.lo() + best * step, best_value};

    constexpr double inv_phi = 0.6180339887498948482;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = finite_or_inf(f(x1));
    double f2 = finite_or_inf(f(x2));
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = finite_or_inf(f(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = finite_or_inf(f(x2));
        }
    }
    const double x = 0.5 * (a + b);
    const double fx = finite_or_inf(f(x));
    if (fx <= result.value) {
        result = {x, fx};
    }
    return result;
}

double central_diff(const ScalarFunction& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the Kronrod nodes with odd index (1, 3, 5, 7).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double integral;
    double error;
};

Panel gauss_kronrod(const ScalarFunction& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[i] * sum;
        if (i % 2 == 1) {
            gauss += kGaussWeights[i / 2] * sum;
        }
    }
    return {kronrod * half, std::fabs((kronrod - gauss) * half)};
}

double integrate_recursive(const ScalarFunction& f, double a, double b, double abs_tol,
                           double rel_tol, Panel whole, int depth) {
    if (depth >= 40 || whole.error <= std::max(abs_tol, rel_tol * std::fabs(whole.integral))) {
        return whole.integral;
    }
    const double mid = 0.5 * (a + b);
    const Panel left = gauss_kronrod(f, a, mid);
    const Panel right = gauss_kronrod(f, mid, b);
    return integrate_recursive(f, a, mid, 0.5 * abs_tol, rel_tol, left, depth + 1) +
           integrate_recursive(f, mid, b, 0.5 * abs_tol, rel_tol, right, depth + 1);
}

}  // namespace

double integrate(const ScalarFunction& f, const Interval& range, double abs_tol, double rel_tol) {
    rel_tol = std::max(rel_tol, 50.0 * std::numeric_limits<double>::epsilon());
    const Panel whole = gauss_kronrod(f, range.lo(), range.hi());
    return integrate_recursive(f, range.lo(), range.hi(), abs_tol, rel_tol, whole, 0);
}

// ---------------------------------------------------------------------------
// Random streams

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed), stream_index_(stream_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream_index & 0xffffffffu),
                      static_cast<std::uint32_t>(stream_index >> 32)};
    engine_.seed(seq);
}

double RandomStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t label) {
    std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ULL * (label + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace mzi::numerics
