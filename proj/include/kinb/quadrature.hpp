#pragma once

#include <vector>

namespace kinb {

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule on [a,b].
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

} // namespace kinb
