#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "freeconv/ncpart.hpp"
#include "freeconv/series.hpp"

// Test-side oracles, kept independent of the library code paths they check.

namespace oracles {

/// every set partition of {1..n}, generated through restricted growth strings
inline std::vector<freeconv::ncpart::Partition> all_set_partitions(int n) {
    std::vector<freeconv::ncpart::Partition> out;
    std::vector<int> rgs(static_cast<size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int i, int maxb) {
        if (i == n) {
            std::vector<std::vector<int>> blocks(static_cast<size_t>(maxb));
            for (int e = 0; e < n; ++e) blocks[static_cast<size_t>(rgs[static_cast<size_t>(e)])].push_back(e + 1);
            out.emplace_back(n, std::move(blocks));
            return;
        }
        for (int b = 0; b <= maxb; ++b) {
            rgs[static_cast<size_t>(i)] = b;
            rec(i + 1, std::max(maxb, b + 1));
        }
    };
    rec(0, 0);
    return out;
}

/// direct quadruple scan of the crossing condition: i<j<k<l with i,k in one
/// block and j,l in another
inline bool noncrossing_by_quadruples(const freeconv::ncpart::Partition& p) {
    const auto id = p.block_ids();
    const int n = p.n;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            for (int k = j + 1; k <= n; ++k)
                for (int l = k + 1; l <= n; ++l)
                    if (id[i - 1] == id[k - 1] && id[j - 1] == id[l - 1] && id[i - 1] != id[j - 1]) return true;
    return false;
}

/// n! / (k! (n-k)!) over exact integers
inline long long factorial(int n) {
    long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// random rational with numerator in [-num_max, num_max] and denominator in
/// [1, den_max]
inline freeconv::series::Rational random_rational(std::mt19937_64& gen, int num_max = 8, int den_max = 6) {
    std::uniform_int_distribution<int> num(-num_max, num_max);
    std::uniform_int_distribution<int> den(1, den_max);
    return freeconv::series::Rational(num(gen), den(gen));
}

/// composite trapezoid of f over [a,b] with n panels
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) acc += f(a + h * i);
    return acc * h;
}

/// moments of the arcsine density 1/(pi sqrt(x(2-x))) on [0,2] by the smooth
/// substitution x = 1 - cos(theta): (1/pi) int_0^pi (1-cos theta)^n dtheta
inline double arcsine02_moment(int n, int panels = 200000) {
    return trapezoid([n](double th) { return std::pow(1.0 - std::cos(th), n); }, 0.0,
                     std::acos(-1.0), panels) /
           std::acos(-1.0);
}

}  // namespace oracles
