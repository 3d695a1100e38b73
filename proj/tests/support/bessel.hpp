#pragma once

// Test-side oracle for the modified Bessel functions I0, I1, by the
// ascending power series summed to convergence in extended precision. Kept
// independent of the library's quadrature path on purpose.

#include <cmath>

namespace oracle {

inline double bessel_i0(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<long double>(k) * k);
        sum += term;
        if (term < sum * 1e-22L) break;
    }
    return static_cast<double>(sum);
}

inline double bessel_i1(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<long double>(k) * (k + 1));
        sum += term;
        if (term < sum * 1e-22L) break;
    }
    return static_cast<double>(static_cast<long double>(x) / 2.0L * sum);
}

} // namespace oracle
