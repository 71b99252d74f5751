#pragma once

// Textbook numerics used to cross-check library results.

#include <cmath>
#include <functional>
#include <optional>
#include <utility>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t intervals) {
    if (intervals % 2 == 1) {
        ++intervals;
    }
    const double h = (b - a) / static_cast<double>(intervals);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < intervals; ++i) {
        s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

// Where w1 N(m1, s1) = w2 N(m2, s2), restricted to (m1, m2): roots of a quadratic.
inline std::optional<double> two_gaussian_crossing(double w1, double m1, double s1, double w2, double m2, double s2) {
    const double a = 1.0 / (2 * s2 * s2) - 1.0 / (2 * s1 * s1);
    const double b = m1 / (s1 * s1) - m2 / (s2 * s2);
    const double c = m2 * m2 / (2 * s2 * s2) - m1 * m1 / (2 * s1 * s1) + std::log((w1 * s2) / (w2 * s1));
    if (a == 0.0) {
        const double x = -c / b;
        return x > m1 && x < m2 ? std::optional<double>(x) : std::nullopt;
    }
    const double disc = b * b - 4 * a * c;
    if (disc < 0) {
        return std::nullopt;
    }
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    for (double x : {q / a, c / q}) {
        if (x > m1 && x < m2) {
            return x;
        }
    }
    return std::nullopt;
}

// Upper regularised incomplete gamma Q(a, x) via series / continued fraction.
inline double gamma_q(double a, double x) {
    if (x <= 0) {
        return 1.0;
    }
    const double lg = std::lgamma(a);
    if (x < a + 1) {
        double sum = 1.0 / a;
        double term = sum;
        for (int n = 1; n < 10000; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) {
                break;
            }
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
    }
    double b = x + 1 - a;
    double c = 1e300;
    double d = 1 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < 1e-300) {
            d = 1e-300;
        }
        c = b + an / c;
        if (std::abs(c) < 1e-300) {
            c = 1e-300;
        }
        d = 1 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1) < 1e-16) {
            break;
        }
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

} // namespace oracle
