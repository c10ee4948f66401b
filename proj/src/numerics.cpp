#include "bfbm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace bfbm::numerics {

namespace {

std::vector<QuadNode> compute_gauss_legendre(int n) {
    std::vector<QuadNode> nodes(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th positive root.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Bonnet recurrence for P_n(x) and derivative.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                // one polishing step after convergence
                p0 = 1.0;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                break;
            }
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        nodes[i] = QuadNode{-x, w};
        nodes[n - 1 - i] = QuadNode{x, w};
    }
    if (n % 2 == 1) nodes[n / 2].x = 0.0;
    return nodes;
}

}  // namespace

const std::vector<QuadNode>& gauss_legendre(int n) {
    if (n < 1 || n > 10000) throw DomainError("gauss_legendre: order out of range");
    static std::map<int, std::vector<QuadNode>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
    const auto& nodes = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (const auto& node : nodes) sum += node.w * f(mid + half * node.x);
    return half * sum;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        double panel_width, int nodes_per_panel) {
    if (!(panel_width > 0.0)) throw DomainError("integrate_panels: panel_width <= 0");
    if (b < a) throw DomainError("integrate_panels: b < a");
    const long n_panels = std::max(1L, static_cast<long>(std::ceil((b - a) / panel_width)));
    const double width = (b - a) / static_cast<double>(n_panels);
    double sum = 0.0;
    for (long i = 0; i < n_panels; ++i) {
        double lo = a + width * static_cast<double>(i);
        double hi = (i + 1 == n_panels) ? b : lo + width;
        sum += integrate_gl(f, lo, hi, nodes_per_panel);
    }
    return sum;
}

double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace bfbm::numerics
