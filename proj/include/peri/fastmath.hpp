#pragma once

#include <bit>
#include <cstdint>

namespace peri {

//----------------------------------------------------------------------------
// Branch-free exp(-x) for x >= 0, max relative error ~3e-10 vs libm.
// Every operation maps to a SIMD instruction, so the bond-force loop
// vectorizes; libm's exp blocks auto-vectorization and is ~40% slower
// in the kernel. Inputs above 700 clamp (exp(-700) ~ 1e-304, i.e. 0).
//----------------------------------------------------------------------------
inline double exp_neg(double x) {
    constexpr double log2e = 1.4426950408889634074;
    constexpr double ln2hi = 6.93147180369123816490e-01;
    constexpr double ln2lo = 1.90821492927058770002e-10;
    constexpr double shifter = 6755399441055744.0; // 1.5 * 2^52

    const double xc = x < 700.0 ? x : 700.0;
    const double t = -xc * log2e;
    const double ks = t + shifter; // round-to-nearest into the mantissa
    const double k = ks - shifter;
    const auto ki = static_cast<int32_t>(std::bit_cast<int64_t>(ks) & 0xFFFFFFFF);

    const double r = (-xc - k * ln2hi) - k * ln2lo;
    double p = 2.47868649899248148e-05;
    p = p * r + 1.98419454016969096e-04;
    p = p * r + 1.38888949086377719e-03;
    p = p * r + 8.33333334987383506e-03;
    p = p * r + 4.16666666662260795e-02;
    p = p * r + 1.66666666666684880e-01;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;

    // 2^ki split into two halves so each exponent stays in range.
    const int64_t k1 = ki >> 1;
    const int64_t k2 = ki - k1;
    const double s1 = std::bit_cast<double>((k1 + 1023) << 52);
    const double s2 = std::bit_cast<double>((k2 + 1023) << 52);
    return p * s1 * s2;
}

} // namespace peri
