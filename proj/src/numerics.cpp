#include "thermalrabi/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "thermalrabi/constants.hpp"
#include "thermalrabi/errors.hpp"

namespace thermalrabi::numerics {

BrentResult brent_minimize(const std::function<double(double)>& f, double a,
                           double b, double rel_tol, int max_iter) {
  if (!(a < b)) throw domain_error("brent_minimize: need a < b");
  if (!(rel_tol > 0.0)) throw domain_error("brent_minimize: rel_tol <= 0");

  constexpr double golden = 0.3819660112501051;
  const double a0 = a, b0 = b;
  double x = a + golden * (b - a);
  double w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;

  int it = 0;
  for (; it < max_iter; ++it) {
    double m = 0.5 * (a + b);
    double tol = rel_tol * std::abs(x) + 1e-300;
    double tol2 = 2.0 * tol;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;

    bool parabolic = false;
    if (std::abs(e) > tol) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      double e_old = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) &&
          p < q * (b - x)) {
        d = p / q;
        double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol : -tol;
        parabolic = true;
      }
    }
    if (!parabolic) {
      e = (x < m) ? b - x : a - x;
      d = golden * e;
    }

    double u = (std::abs(d) >= tol) ? x + d : x + ((d > 0.0) ? tol : -tol);
    double fu = f(u);
    if (fu <= fx) {
      if (u < x)
        b = x;
      else
        a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }

  BrentResult r;
  r.x = x;
  r.f = fx;
  r.iterations = it;
  double span_tol =
      std::max(8.0 * rel_tol * std::abs(x), 1e-8 * (b0 - a0));
  r.at_lower = (x - a0) <= span_tol;
  r.at_upper = (b0 - x) <= span_tol;
  return r;
}

namespace {

Quadrature compute_gauss_legendre(int n) {
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess for the i-th root of P_n.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    double wgt = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i] = wgt;
    q.weights[n - 1 - i] = wgt;
  }
  if (n % 2 == 1) q.nodes[n / 2] = 0.0;
  return q;
}

}  // namespace

const Quadrature& gauss_legendre(int n) {
  if (n < 2 || n > 1 << 16)
    throw domain_error("gauss_legendre: order out of range");
  static std::mutex mu;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

double parabola_vertex(double x0, double y0, double x1, double y1, double x2,
                       double y2) {
  double d01 = (y1 - y0) / (x1 - x0);
  double d12 = (y2 - y1) / (x2 - x1);
  double a = (d12 - d01) / (x2 - x0);
  if (a == 0.0 || !std::isfinite(a)) return x1;
  double v = 0.5 * (x0 + x1 - d01 / a);
  return v;
}

std::vector<double> polyfit(std::span<const double> x,
                            std::span<const double> y, int degree) {
  if (degree < 0 || degree > 8) throw domain_error("polyfit: bad degree");
  std::size_t n = x.size();
  if (n != y.size() || n < static_cast<std::size_t>(degree + 1))
    throw domain_error("polyfit: need at least degree+1 points");

  auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  double shift = 0.5 * (*mn + *mx);
  double scale = 0.5 * (*mx - *mn);
  if (scale == 0.0) scale = 1.0;

  int m = degree + 1;
  std::vector<double> ata(m * m, 0.0), atb(m, 0.0);
  std::vector<double> pw(m);
  for (std::size_t i = 0; i < n; ++i) {
    double u = (x[i] - shift) / scale;
    pw[0] = 1.0;
    for (int k = 1; k < m; ++k) pw[k] = pw[k - 1] * u;
    for (int r = 0; r < m; ++r) {
      atb[r] += pw[r] * y[i];
      for (int c = 0; c < m; ++c) ata[r * m + c] += pw[r] * pw[c];
    }
  }

  // Gaussian elimination with partial pivoting.
  std::vector<double> sol(atb);
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(ata[r * m + col]) > std::abs(ata[piv * m + col])) piv = r;
    if (std::abs(ata[piv * m + col]) < 1e-14)
      throw numeric_error("polyfit: singular normal equations");
    if (piv != col) {
      for (int c = 0; c < m; ++c) std::swap(ata[col * m + c], ata[piv * m + c]);
      std::swap(sol[col], sol[piv]);
    }
    for (int r = col + 1; r < m; ++r) {
      double f = ata[r * m + col] / ata[col * m + col];
      for (int c = col; c < m; ++c) ata[r * m + c] -= f * ata[col * m + c];
      sol[r] -= f * sol[col];
    }
  }
  for (int r = m - 1; r >= 0; --r) {
    for (int c = r + 1; c < m; ++c) sol[r] -= ata[r * m + c] * sol[c];
    sol[r] /= ata[r * m + r];
  }

  // Expand p(u), u = (x - shift)/scale, back to powers of x.
  std::vector<double> coeffs(m, 0.0);
  std::vector<double> base{1.0};  // (x - shift)^k / scale^k expanded
  for (int k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < base.size(); ++j) coeffs[j] += sol[k] * base[j];
    if (k + 1 < m) {
      std::vector<double> next(base.size() + 1, 0.0);
      for (std::size_t j = 0; j < base.size(); ++j) {
        next[j + 1] += base[j] / scale;
        next[j] -= base[j] * shift / scale;
      }
      base = std::move(next);
    }
  }
  return coeffs;
}

double polyval(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace thermalrabi::numerics
