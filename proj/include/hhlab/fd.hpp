#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hhlab {

/// Fornberg's recursion: weights c[k][j] so that
///   f^{(k)}(z) ~ sum_j c[k][j] f(x_j),  k = 0..max_derivative,
/// for arbitrary distinct stencil nodes x_j.
inline std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> x, int max_derivative) {
    const std::size_t n = x.size();
    const std::size_t m = static_cast<std::size_t>(max_derivative);
    std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0, c4 = x[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

}  // namespace hhlab
