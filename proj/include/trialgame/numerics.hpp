#pragma once

#include <compare>
#include <functional>
#include <stdexcept>

namespace trialgame::numerics {

// A real number constrained to [0,1]. Construction rejects anything else,
// including NaN, so downstream code can treat the range as an invariant.
class Probability {
public:
    Probability() = default;

    explicit Probability(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw std::domain_error("Probability: value must lie in [0,1]");
        }
    }

    double value() const noexcept { return value_; }
    explicit operator double() const noexcept { return value_; }

    friend auto operator<=>(const Probability&, const Probability&) = default;

private:
    double value_ = 0.0;
};

// Standard normal density.
double std_normal_pdf(double x) noexcept;

// Standard normal CDF, accurate to ~1e-16 relative error (rational
// Chebyshev approximations to erf/erfc; no libm special functions).
// Rejects non-finite input.
Probability std_normal_cdf(double x);

// Inverse standard normal CDF. Rejects p in {0,1} (infinite quantile).
// Guarantees |std_normal_cdf(result) - p| <= 1e-10 (in practice near
// machine precision): bisection to a tight bracket, then safeguarded
// Newton polish against std_normal_cdf itself.
double std_normal_quantile(Probability p);

// Raised when find_root_increasing's bracket precondition fails,
// as opposed to a bad tolerance (std::invalid_argument).
struct bracket_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Smallest x in [lo,hi] (to within tol) with f(x) >= 0, for f monotone
// nondecreasing with f(lo) <= 0 <= f(hi). The returned point always
// satisfies f(x) >= 0; the true crossing is at most tol below it.
double find_root_increasing(const std::function<double(double)>& f,
                            double lo, double hi, double tol);

} // namespace trialgame::numerics
