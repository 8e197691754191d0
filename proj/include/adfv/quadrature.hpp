#pragma once

#include <functional>

namespace adfv {

// Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr double kGauss3Nodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
inline constexpr double kGauss3Weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

inline constexpr double kGauss5Nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                           0.5384693101056831, 0.9061798459386640};
inline constexpr double kGauss5Weights[5] = {0.2369268850561891, 0.4786286704993665,
                                             0.5688888888888889, 0.4786286704993665,
                                             0.2369268850561891};

/// 5-node Gauss-Legendre integral of f over [a, b]; exact for degree <= 9.
template <typename F>
double gauss5(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int q = 0; q < 5; ++q) s += kGauss5Weights[q] * f(mid + half * kGauss5Nodes[q]);
    return s * half;
}

/// 3-node Gauss-Legendre integral; exact for degree <= 5.
template <typename F>
double gauss3(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int q = 0; q < 3; ++q) s += kGauss3Weights[q] * f(mid + half * kGauss3Nodes[q]);
    return s * half;
}

}  // namespace adfv
