#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace thermalrabi::numerics {

struct BrentResult {
  double x = 0.0;
  double f = 0.0;
  bool at_lower = false;
  bool at_upper = false;
  int iterations = 0;
};

// Derivative-free 1-D minimization on [a, b] combining golden-section
// steps with parabolic interpolation. rel_tol is on x.
BrentResult brent_minimize(const std::function<double(double)>& f, double a,
                           double b, double rel_tol, int max_iter = 200);

struct Quadrature {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule of order n, computed by Newton iteration on the
// Legendre recurrence and cached per order.
const Quadrature& gauss_legendre(int n);

// Vertex of the parabola through three points; returns x1 when the
// points are collinear (degenerate curvature).
double parabola_vertex(double x0, double y0, double x1, double y1, double x2,
                       double y2);

// Least-squares polynomial fit, coefficients in ascending powers of x.
// Solved in a shifted/scaled variable for conditioning.
std::vector<double> polyfit(std::span<const double> x,
                            std::span<const double> y, int degree);
double polyval(std::span<const double> coeffs, double x);

// Compensated (Neumaier) summation.
class KahanSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace thermalrabi::numerics
