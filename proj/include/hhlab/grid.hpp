#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hhlab/errors.hpp"

namespace hhlab {

enum class Grading { uniform, geometric, custom };

/// Strictly increasing radial nodes r_0 < ... < r_N, r_0 >= 0.
class RadialGrid {
public:
    static constexpr std::size_t min_nodes = 32;

    RadialGrid() = default;

    explicit RadialGrid(std::vector<double> nodes, Grading grading = Grading::custom)
        : nodes_(std::move(nodes)), grading_(grading) {
        if (nodes_.size() < 2) throw GridTooCoarse("RadialGrid: need at least two nodes");
        if (!(nodes_.front() >= 0.0)) throw DomainError("RadialGrid: first node must be >= 0");
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            if (!(nodes_[i] > nodes_[i - 1])) throw DomainError("RadialGrid: nodes must be strictly increasing");
    }

    /// `count` equally spaced nodes on [lo, hi].
    static RadialGrid uniform(double lo, double hi, std::size_t count) {
        check_count(count);
        std::vector<double> r(count);
        const double h = (hi - lo) / static_cast<double>(count - 1);
        for (std::size_t i = 0; i < count; ++i) r[i] = lo + h * static_cast<double>(i);
        r.back() = hi;
        return RadialGrid(std::move(r), Grading::uniform);
    }

    /// Spacing grows geometrically (factor `ratio`) away from both ends and
    /// is capped in the middle, so consecutive spacings differ by at most
    /// `ratio`. The cap is chosen so the middle holds about half the cells.
    static RadialGrid geometric(double lo, double hi, std::size_t count, double ratio = 1.05) {
        check_count(count);
        if (!(ratio >= 1.0)) throw DomainError("RadialGrid::geometric: ratio must be >= 1");
        const std::size_t cells = count - 1;
        const double cap_steps = std::min<double>(static_cast<double>(cells) / 4.0, std::log(50.0) / std::log(ratio));
        std::vector<double> w(cells);
        double total = 0.0;
        for (std::size_t k = 0; k < cells; ++k) {
            const double from_end = static_cast<double>(std::min(k, cells - 1 - k));
            w[k] = std::pow(ratio, std::min(from_end, cap_steps));
            total += w[k];
        }
        std::vector<double> r(count);
        r[0] = lo;
        double acc = 0.0;
        for (std::size_t k = 0; k < cells; ++k) {
            acc += w[k];
            r[k + 1] = lo + (hi - lo) * acc / total;
        }
        r.back() = hi;
        return RadialGrid(std::move(r), Grading::geometric);
    }

    std::size_t size() const { return nodes_.size(); }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double front() const { return nodes_.front(); }
    double back() const { return nodes_.back(); }
    const std::vector<double>& nodes() const { return nodes_; }
    Grading grading() const { return grading_; }

    /// Largest spacing.
    double max_step() const {
        double h = 0.0;
        for (std::size_t i = 1; i < nodes_.size(); ++i) h = std::max(h, nodes_[i] - nodes_[i - 1]);
        return h;
    }

    /// Index i with r_i <= r < r_{i+1}, clamped to the last cell.
    std::size_t locate(double r) const {
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
        std::size_t i = (it == nodes_.begin()) ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
        return std::min(i, nodes_.size() - 2);
    }

    /// Grid with every node multiplied by `factor` (> 0).
    RadialGrid scaled(double factor) const {
        std::vector<double> r(nodes_);
        for (double& v : r) v *= factor;
        return RadialGrid(std::move(r), grading_);
    }

private:
    static void check_count(std::size_t count) {
        if (count < min_nodes)
            throw GridTooCoarse("RadialGrid: need at least " + std::to_string(min_nodes) + " nodes, got " +
                                std::to_string(count));
    }

    std::vector<double> nodes_;
    Grading grading_ = Grading::custom;
};

/// Values of a radial profile sampled on a RadialGrid.
class RadialField {
public:
    RadialField() = default;

    RadialField(RadialGrid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size()) throw DomainError("RadialField: value count does not match grid");
        for (double v : values_)
            if (!std::isfinite(v)) throw DomainError("RadialField: non-finite value");
    }

    template <class F>
    static RadialField sample(const RadialGrid& grid, F&& f) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
        return RadialField(grid, std::move(v));
    }

    const RadialGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double r(std::size_t i) const { return grid_[i]; }

    double sup_norm() const {
        double s = 0.0;
        for (double v : values_) s = std::max(s, std::abs(v));
        return s;
    }
    double min() const { return *std::min_element(values_.begin(), values_.end()); }

    /// Pointwise map, keeping the grid.
    template <class F>
    RadialField map(F&& f) const {
        std::vector<double> v(values_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(values_[i]);
        return RadialField(grid_, std::move(v));
    }

private:
    RadialGrid grid_;
    std::vector<double> values_;
};

inline RadialField operator+(const RadialField& a, const RadialField& b) {
    if (a.size() != b.size()) throw DomainError("RadialField +: size mismatch");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
    return RadialField(a.grid(), std::move(v));
}

inline RadialField operator*(double s, const RadialField& a) {
    return a.map([s](double v) { return s * v; });
}

namespace detail {

inline std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        d[0] = d[1] = delta[0];
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1], w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) s = 0.0;
        else if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0)) s = 3.0 * d0;
        return s;
    };
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
}

}  // namespace detail

/// Monotone cubic (Fritsch-Carlson) interpolant of a RadialField. Holds its
/// own copy of the data; throws ExtrapolationError outside [r_0, r_N] beyond
/// a relative slack of 1e-12.
class MonotoneCubic {
public:
    explicit MonotoneCubic(const RadialField& f)
        : grid_(f.grid()), values_(f.values()), slopes_(detail::pchip_slopes(grid_.nodes(), values_)) {}

    double lo() const { return grid_.front(); }
    double hi() const { return grid_.back(); }

    double operator()(double r) const {
        const double lo = grid_.front(), hi = grid_.back();
        const double slack = 1e-12 * std::max(1.0, std::abs(hi));
        if (r < lo - slack || r > hi + slack) {
            std::ostringstream os;
            os << "interpolation at r=" << r << " outside [" << lo << ", " << hi << "]";
            throw ExtrapolationError(os.str());
        }
        r = std::clamp(r, lo, hi);
        const std::size_t i = grid_.locate(r);
        const double h = grid_[i + 1] - grid_[i];
        const double t = (r - grid_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
               (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
    }

private:
    RadialGrid grid_;
    std::vector<double> values_;
    std::vector<double> slopes_;
};

/// Two-column CSV: a header "r,<label>" and one row per node, 17 significant digits.
inline void write_csv(std::ostream& os, const RadialField& f, const std::string& label) {
    os << "r," << label << '\n';
    os << std::setprecision(17);
    for (std::size_t i = 0; i < f.size(); ++i) os << f.r(i) << ',' << f[i] << '\n';
}

/// Reads the format written by write_csv; returns the field and the header label.
inline std::pair<RadialField, std::string> read_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("r,", 0) != 0) throw DomainError("read_csv: missing 'r,' header");
    std::vector<double> r, v;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DomainError("read_csv: malformed row '" + line + "'");
        r.push_back(std::stod(line.substr(0, comma)));
        v.push_back(std::stod(line.substr(comma + 1)));
    }
    return {RadialField(RadialGrid(std::move(r)), std::move(v)), header.substr(2)};
}

}  // namespace hhlab
