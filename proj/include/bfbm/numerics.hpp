#pragma once

#include <functional>
#include <vector>

#include "bfbm/errors.hpp"

namespace bfbm::numerics {

struct QuadNode {
    double x;
    double w;
};

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on P_n.
// Cached per order; thread-safe after first use for a given order.
const std::vector<QuadNode>& gauss_legendre(int n);

// Integral of f over [a, b] with a single n-node Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

// Integral of f over [a, b] split into panels of (at most) `panel_width`.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        double panel_width, int nodes_per_panel);

// log(e^a + e^b) without overflow; handles -inf inputs.
double log_sum_exp(double a, double b);

}  // namespace bfbm::numerics
