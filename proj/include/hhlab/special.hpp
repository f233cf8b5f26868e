#pragma once

#include <cmath>
#include <numbers>

namespace hhlab {

// std::tgamma/lgamma are accurate to a few ulp on glibc, well inside 1e-13.

/// Surface area of the unit sphere S^{n-1} in R^n.
inline double unit_sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the ball of radius R in R^n.
inline double ball_volume(int n, double R) {
    return unit_sphere_area(n) * std::pow(R, n) / n;
}

/// \int_0^\pi sin^{n-2}(theta) dtheta, the polar weight of a sphere average.
inline double polar_weight_integral(int n) {
    return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (n - 1)) / std::tgamma(0.5 * n);
}

/// First positive zero of the Bessel function J_nu (nu >= 0), by a coarse
/// sign scan followed by bisection to full precision.
inline double bessel_first_zero(double nu) {
    double lo = nu + 1e-3, step = 0.05;
    double flo = std::cyl_bessel_j(nu, lo);
    for (double hi = lo + step;; lo = hi, hi += step) {
        const double fhi = std::cyl_bessel_j(nu, hi);
        if ((flo > 0) != (fhi > 0)) {
            for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = std::cyl_bessel_j(nu, mid);
                if ((fm > 0) == (flo > 0)) { lo = mid; flo = fm; } else { hi = mid; }
            }
            return 0.5 * (lo + hi);
        }
        flo = fhi;
    }
}

/// First Navier eigenvalue of (-Delta)^m on the ball of radius R in R^n:
/// (j_{n/2-1,1} / R)^{2m}.
inline double navier_eigenvalue_oracle(int n, int m, double R) {
    return std::pow(bessel_first_zero(0.5 * n - 1.0) / R, 2.0 * m);
}

}  // namespace hhlab
