#include "trialgame/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace trialgame::numerics {

namespace {

// Rational Chebyshev approximations for erf/erfc after W. J. Cody,
// "Rational Chebyshev approximation for the error function",
// Math. Comp. 23 (1969) 631-638 (netlib specfun CALERF, IEEE constants).
// Relative error below ~6e-19 per branch before rounding.

constexpr double kErfA[5] = {3.16112374387056560e0, 1.13864154151050156e2,
                             3.77485237685302021e2, 3.20937758913846947e3,
                             1.85777706184603153e-1};
constexpr double kErfB[4] = {2.36012909523441209e1, 2.44024637934444173e2,
                             1.28261652607737228e3, 2.84423683343917062e3};
constexpr double kErfcC[9] = {5.64188496988670089e-1, 8.88314979438837594e0,
                              6.61191906371416295e1, 2.98635138197400131e2,
                              8.81952221241769090e2, 1.71204761263407058e3,
                              2.05107837782607147e3, 1.23033935479799725e3,
                              2.15311535474403846e-8};
constexpr double kErfcD[8] = {1.57449261107098347e1, 1.17693950891312499e2,
                              5.37181101862009858e2, 1.62138957456669019e3,
                              3.29079923573345963e3, 4.36261909014324716e3,
                              3.43936767414372164e3, 1.23033935480374942e3};
constexpr double kErfcP[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                              1.25781726111229246e-1, 1.60837851487422766e-2,
                              6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr double kErfcQ[5] = {2.56852019228982242e0, 1.87295284992346047e0,
                              5.27905102951428412e-1, 6.05183413124413191e-2,
                              2.33520497626869185e-3};

constexpr double kInvSqrtPi = 0.56418958354775628695;
constexpr double kErfThresh = 0.46875;
constexpr double kErfcXBig = 26.543; // erfc underflows to 0 beyond this
constexpr double kXSmall = 1.11e-16;

// exp(-y*y) split into an exact-product part and a small correction,
// which keeps erfc's relative accuracy in the far tail.
double exp_neg_square(double y) {
    const double ysq = std::trunc(y * 16.0) / 16.0;
    const double del = (y - ysq) * (y + ysq);
    return std::exp(-ysq * ysq) * std::exp(-del);
}

double erf_small(double x) {
    double ysq = 0.0;
    if (std::fabs(x) > kXSmall) ysq = x * x;
    double num = kErfA[4] * ysq;
    double den = ysq;
    for (int i = 0; i < 3; ++i) {
        num = (num + kErfA[i]) * ysq;
        den = (den + kErfB[i]) * ysq;
    }
    return x * (num + kErfA[3]) / (den + kErfB[3]);
}

// erfc(y) for 0.46875 <= y <= 4.
double erfc_mid(double y) {
    double num = kErfcC[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
        num = (num + kErfcC[i]) * y;
        den = (den + kErfcD[i]) * y;
    }
    return exp_neg_square(y) * (num + kErfcC[7]) / (den + kErfcD[7]);
}

// erfc(y) for y > 4.
double erfc_far(double y) {
    if (y >= kErfcXBig) return 0.0;
    const double ysq = 1.0 / (y * y);
    double num = kErfcP[5] * ysq;
    double den = ysq;
    for (int i = 0; i < 4; ++i) {
        num = (num + kErfcP[i]) * ysq;
        den = (den + kErfcQ[i]) * ysq;
    }
    const double r = ysq * (num + kErfcP[4]) / (den + kErfcQ[4]);
    return exp_neg_square(y) * (kInvSqrtPi - r) / y;
}

double erfc_cody(double x) {
    const double y = std::fabs(x);
    double result;
    if (y <= kErfThresh) {
        return 1.0 - erf_small(x);
    } else if (y <= 4.0) {
        result = erfc_mid(y);
    } else {
        result = erfc_far(y);
    }
    return x < 0.0 ? 2.0 - result : result;
}

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Initial guess for the quantile: P. Acklam's rational approximation
// (|relative error| < 1.15e-9 on all of (0,1)). Newton polishing against
// the CDF below brings it to machine precision.
double quantile_guess(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double std_normal_pdf(double x) noexcept {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

Probability std_normal_cdf(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("std_normal_cdf: input must be finite");
    }
    // Phi(x) = erfc(-x / sqrt(2)) / 2; erfc's sign symmetry makes
    // Phi(x) + Phi(-x) == 1 up to a single rounding.
    return Probability(0.5 * erfc_cody(-x * kInvSqrt2));
}

namespace {

// Solve Phi(x) = p for p in (0, 0.5); the root lies in [-40, 0).
// Bracketed Newton: the bracket shrinks monotonically and any Newton step
// that escapes it degrades to a bisection step, so the iteration cannot
// diverge regardless of the initial guess.
double quantile_lower_tail(double p) {
    double lo = -40.0;
    double hi = 0.0;
    double x = quantile_guess(p);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    for (int i = 0; i < 64; ++i) {
        const double err = std_normal_cdf(x).value() - p;
        if (err < 0.0) {
            lo = std::max(lo, x);
        } else {
            hi = std::min(hi, x);
        }
        const double density = std_normal_pdf(x);
        double next = density > 0.0 ? x - err / density : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::fabs(next - x);
        x = next;
        if (step <= 1e-15 * std::max(1.0, std::fabs(x))) break;
    }
    return x;
}

} // namespace

double std_normal_quantile(Probability p) {
    const double target = p.value();
    if (target <= 0.0 || target >= 1.0) {
        throw std::domain_error("std_normal_quantile: p must lie strictly in (0,1)");
    }
    if (target == 0.5) return 0.0;
    // Work only where the CDF keeps full relative precision (the lower
    // tail) and reflect: 1 - p is exact for p >= 0.5, so the upper tail
    // loses nothing beyond p's own rounding.
    if (target > 0.5) return -quantile_lower_tail(1.0 - target);
    return quantile_lower_tail(target);
}

double find_root_increasing(const std::function<double(double)>& f,
                            double lo, double hi, double tol) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("find_root_increasing: tol must be > 0");
    }
    if (!(lo <= hi)) {
        throw bracket_error("find_root_increasing: requires lo <= hi");
    }
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (!(f_lo <= 0.0) || !(f_hi >= 0.0)) {
        throw bracket_error("find_root_increasing: requires f(lo) <= 0 <= f(hi)");
    }
    if (f_lo >= 0.0) return lo; // f(lo) == 0: lo is already the smallest crossing

    // Invariant: f(lo) < 0 <= f(hi).
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (!(mid > lo && mid < hi)) break; // bracket exhausted in FP
        if (f(mid) >= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

} // namespace trialgame::numerics
