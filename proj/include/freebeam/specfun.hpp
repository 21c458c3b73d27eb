#pragma once

// Self-contained Bessel functions: integer-order J_l and modified I0, I1, K0, K1.
// J: Miller downward recurrence normalized with J0 + 2*sum J_{2k} = 1.
// I: ascending series (x < 18), asymptotic expansion beyond.
// K: ascending series (x < 2), trapezoidal quadrature of
//    e^x K_n(x) = int_0^inf e^{-x(cosh t - 1)} cosh(nt) dt  (2 <= x < 16),
//    asymptotic expansion beyond.  The pure series/asymptotic split cannot
//    reach 1e-10 in doubles near x ~ 7-12 (series cancellation ~ e^{2x} eps,
//    asymptotic floor ~ 2e-9), hence the quadrature midrange.

#include <cmath>
#include <cstdlib>
#include <vector>

#include "errors.hpp"

namespace freebeam::specfun {

struct BesselPair {
    double n0; // order-0 value
    double n1; // order-1 value
};

namespace detail {

inline constexpr double euler_gamma = 0.57721566490153286061;

// J_0..J_lmax at x > 0, Miller downward recurrence.
inline std::vector<double> bessel_j_seq_pos(int lmax, double x) {
    int base = std::max(lmax, (int)std::ceil(x));
    int m = base + (int)std::ceil(12.0 * std::cbrt(std::max(x, 1.0)))
                 + (int)std::ceil(10.0 + 2.0 * std::sqrt((double)lmax + x));
    m += (m & 1);
    std::vector<double> out(lmax + 1, 0.0);
    double jp = 0.0, jc = 1e-30, norm = 0.0;
    for (int k = m; k >= 1; --k) {
        double jm = (2.0 * k / x) * jc - jp;
        jp = jc;
        jc = jm;
        int kk = k - 1;
        if (kk <= lmax) out[kk] = jc;
        if (kk > 0 && (kk & 1) == 0) norm += 2.0 * jc;
        if (std::abs(jc) > 1e250) {
            jc *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for (double& v : out) v *= 1e-250;
        }
    }
    norm += jc; // J_0
    for (double& v : out) v /= norm;
    return out;
}

// I0 and I1 ascending series (all terms positive, no cancellation).
inline BesselPair bessel_i_series(double x) {
    double q = x * x / 4.0;
    double t0 = 1.0, s0 = 1.0, t1 = 1.0, s1 = 1.0;
    for (int k = 1; k < 200; ++k) {
        t0 *= q / ((double)k * k);
        s0 += t0;
        t1 *= q / ((double)k * (k + 1));
        s1 += t1;
        if (t0 < 1e-18 * s0 && t1 < 1e-18 * s1) break;
    }
    return {s0, (x / 2.0) * s1};
}

// Asymptotic sum: u_k = u_{k-1}(mu-(2k-1)^2)/(8xk); I uses (-1)^k u_k, K uses u_k.
inline double ik_asym_sum(double x, double mu, bool alternate) {
    double u = 1.0, s = 1.0, prev = 1.0;
    for (int k = 1; k < 60; ++k) {
        u *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
        if (std::abs(u) > prev) break; // divergent tail reached
        prev = std::abs(u);
        s += alternate && (k & 1) ? -u : u;
        if (std::abs(u) < 1e-18 * std::abs(s)) break;
    }
    return s;
}

// e^x K0, e^x K1 for x < 2 (ascending series).
inline BesselPair bessel_k_series_scaled(double x) {
    BesselPair i = bessel_i_series(x);
    double lg = std::log(x / 2.0);
    double q = x * x / 4.0;
    double t = 1.0, h = 0.0, s = 0.0;
    for (int k = 1; k < 60; ++k) {
        t *= q / ((double)k * k);
        h += 1.0 / k;
        s += t * h;
        if (t * h < 1e-18 * std::max(s, 1e-300)) break;
    }
    double k0 = -(lg + euler_gamma) * i.n0 + s;
    t = 1.0;
    double pk1 = -euler_gamma, pk2 = 1.0 - euler_gamma;
    s = pk1 + pk2;
    for (int k = 1; k < 60; ++k) {
        t *= q / ((double)k * (k + 1));
        pk1 += 1.0 / k;
        pk2 += 1.0 / (k + 1);
        double term = (pk1 + pk2) * t;
        s += term;
        if (std::abs(term) < 1e-18 * std::abs(s)) break;
    }
    double k1 = 1.0 / x + lg * i.n1 - (x / 4.0) * s;
    double ex = std::exp(x);
    return {k0 * ex, k1 * ex};
}

// e^x K0, e^x K1 for 2 <= x < 16 (trapezoid, geometric convergence).
inline BesselPair bessel_k_trap_scaled(double x) {
    double T = std::acosh(1.0 + 48.0 / x);
    double h0 = x <= 6.0 ? 0.25 : 0.6 / std::sqrt(x);
    int n = (int)std::ceil(T / h0);
    double h = T / n;
    double s0 = 0.5, s1 = 0.5;
    for (int j = 1; j <= n; ++j) {
        double t = j * h;
        double ch = std::cosh(t);
        double w = std::exp(-x * (ch - 1.0));
        s0 += w;
        s1 += w * ch;
    }
    return {h * s0, h * s1};
}

inline BesselPair bessel_k_scaled(double x) {
    if (x < 2.0) return bessel_k_series_scaled(x);
    if (x < 16.0) return bessel_k_trap_scaled(x);
    double pref = std::sqrt(3.14159265358979323846 / (2.0 * x));
    return {pref * ik_asym_sum(x, 0.0, false), pref * ik_asym_sum(x, 4.0, false)};
}

} // namespace detail

// J_l(x), integer l with |l| <= 1e6, any finite x.
// Absolute error <= 1e-12 for |x| <= 50, |l| <= 200.
inline double bessel_j(long l, double x) {
    if (std::abs(l) > 1000000) throw contract_error("bessel_j: |l| > 1e6");
    double sign = 1.0;
    if (x < 0) {
        x = -x;
        if (l & 1) sign = -sign; // J_l(-x) = (-1)^l J_l(x)
    }
    if (l < 0) {
        l = -l;
        if (l & 1) sign = -sign; // J_{-l} = (-1)^l J_l
    }
    if (x == 0.0) return l == 0 ? 1.0 : 0.0;
    if (x < 1e-6) {
        // two-term ascending series, via logs to dodge under/overflow
        double lt = l * std::log(x / 2.0) - std::lgamma((double)l + 1.0);
        if (lt < -745.0) return 0.0;
        return sign * std::exp(lt) * (1.0 - x * x / (4.0 * (l + 1.0)));
    }
    return sign * detail::bessel_j_seq_pos((int)l, x)[l];
}

// J_0(x) .. J_lmax(x) in one Miller pass (x may be negative; parity applied).
inline std::vector<double> bessel_j_sequence(int lmax, double x) {
    if (lmax < 0) throw contract_error("bessel_j_sequence: lmax < 0");
    bool neg = x < 0;
    if (neg) x = -x;
    std::vector<double> out;
    if (x == 0.0) {
        out.assign(lmax + 1, 0.0);
        out[0] = 1.0;
    } else if (x < 1e-6) {
        out.assign(lmax + 1, 0.0);
        for (int l = 0; l <= lmax; ++l) out[l] = bessel_j(l, x);
    } else {
        out = detail::bessel_j_seq_pos(lmax, x);
    }
    if (neg)
        for (int l = 1; l <= lmax; l += 2) out[l] = -out[l];
    return out;
}

// K0(x), K1(x); relative error <= 1e-10 over x in [1e-6, 700].
inline BesselPair modified_bessel_k(double x) {
    if (!(x > 0.0)) throw domain_error("modified_bessel_k: requires x > 0");
    BesselPair s = detail::bessel_k_scaled(x);
    double ex = std::exp(-x);
    return {s.n0 * ex, s.n1 * ex};
}

// e^x K0(x), e^x K1(x) (overflow-safe for large x).
inline BesselPair modified_bessel_k_scaled(double x) {
    if (!(x > 0.0)) throw domain_error("modified_bessel_k_scaled: requires x > 0");
    return detail::bessel_k_scaled(x);
}

// I0(x), I1(x); relative error <= 1e-10 over x in [0, 700].
inline BesselPair modified_bessel_i(double x) {
    if (x < 0.0) throw domain_error("modified_bessel_i: requires x >= 0");
    if (x < 18.0) return detail::bessel_i_series(x);
    double pref = std::exp(x) / std::sqrt(2.0 * 3.14159265358979323846 * x);
    return {pref * detail::ik_asym_sum(x, 0.0, true), pref * detail::ik_asym_sum(x, 4.0, true)};
}

// e^{-x} I0(x), e^{-x} I1(x).
inline BesselPair modified_bessel_i_scaled(double x) {
    if (x < 0.0) throw domain_error("modified_bessel_i_scaled: requires x >= 0");
    double ex = std::exp(-x);
    if (x < 18.0) {
        BesselPair s = detail::bessel_i_series(x);
        return {s.n0 * ex, s.n1 * ex};
    }
    double pref = 1.0 / std::sqrt(2.0 * 3.14159265358979323846 * x);
    return {pref * detail::ik_asym_sum(x, 0.0, true), pref * detail::ik_asym_sum(x, 4.0, true)};
}

} // namespace freebeam::specfun
