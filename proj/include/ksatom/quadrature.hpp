#pragma once

#include <functional>
#include <vector>

namespace ksatom {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
QuadratureRule gauss_legendre(int n);

/// n-point Gauss-Laguerre rule for the weight e^{-x} on [0, inf).
QuadratureRule gauss_laguerre(int n);

/// Composite Gauss-Legendre integral of f over [a, b].
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order = 8);

}  // namespace ksatom
