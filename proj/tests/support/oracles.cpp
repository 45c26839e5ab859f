#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hvib::oracle {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

Matrix random_spd(std::mt19937_64& rng, std::size_t n, double shift) {
  const Matrix g = random_matrix(rng, n, n);
  Matrix s = g.transpose() * g;
  for (std::size_t i = 0; i < n; ++i) s(i, i) += shift;
  return s;
}

Matrix random_hurwitz(std::mt19937_64& rng, std::size_t n, double margin) {
  Matrix a = random_matrix(rng, n, n);
  double max_re = -std::numeric_limits<double>::infinity();
  for (const Complex& z : polynomial_eigenvalues(a)) max_re = std::max(max_re, z.real());
  const double shift = max_re + margin;
  for (std::size_t i = 0; i < n; ++i) a(i, i) -= shift;
  return a;
}

Matrix taylor_exp(const Matrix& m) {
  const std::size_t n = m.rows();
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) norm = std::max(norm, std::abs(m(i, j)) * n);
  int s = 0;
  while (norm > 0.25) {
    norm /= 2.0;
    ++s;
  }
  Matrix x(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) x(i, j) = m(i, j) / std::ldexp(1.0, s);
  Matrix sum(n, n), term(n, n);
  for (std::size_t i = 0; i < n; ++i) sum(i, i) = term(i, i) = 1.0;
  for (int k = 1; k < 40; ++k) {
    Matrix next(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l) acc += term(i, l) * x(l, j);
        next(i, j) = acc / k;
      }
    term = next;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sum(i, j) += term(i, j);
  }
  for (int k = 0; k < s; ++k) {
    Matrix sq(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l) acc += sum(i, l) * sum(l, j);
        sq(i, j) = acc;
      }
    sum = sq;
  }
  return sum;
}

std::vector<Complex> polynomial_eigenvalues(const Matrix& a) {
  const std::size_t n = a.rows();
  // Faddeev-LeVerrier: coefficients of det(lambda I - A), monic.
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  std::vector<std::vector<double>> mk(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + c_{n-k+1} I, with M_0 = 0
    std::vector<std::vector<double>> next(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l) acc += a(i, l) * mk[l][j];
        next[i][j] = acc + (i == j ? c[n - k + 1] : 0.0);
      }
    mk = next;
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) tr += a(i, l) * mk[l][i];
    c[n - k] = -tr / static_cast<double>(k);
  }
  // Durand-Kerner.
  double bound = 0.0;
  for (std::size_t k = 0; k < n; ++k) bound = std::max(bound, std::abs(c[k]));
  bound += 1.0;
  std::vector<Complex> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = bound * std::pow(Complex(0.4, 0.9), double(k));
  auto p = [&](Complex x) {
    Complex acc = 1.0;
    for (std::size_t k = n; k-- > 0;) acc = acc * x + c[k];
    return acc;
  };
  for (int it = 0; it < 5000; ++it) {
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      Complex den = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) den *= (z[k] - z[j]);
      const Complex dz = p(z[k]) / den;
      z[k] -= dz;
      change = std::max(change, std::abs(dz));
    }
    if (change < 1e-15 * bound) break;
  }
  // Newton polish on the polynomial.
  for (Complex& x : z) {
    for (int it = 0; it < 3; ++it) {
      Complex v = 1.0, dv = 0.0;
      for (std::size_t k = n; k-- > 0;) {
        dv = dv * x + v;
        v = v * x + c[k];
      }
      if (std::abs(dv) > 0) x -= v / dv;
    }
  }
  return z;
}

double spectrum_distance(std::vector<Complex> a, std::vector<Complex> b) {
  double worst = 0.0;
  for (const Complex& x : a) {
    std::size_t best = 0;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (std::abs(x - b[j]) < d) {
        d = std::abs(x - b[j]);
        best = j;
      }
    }
    worst = std::max(worst, d);
    b.erase(b.begin() + static_cast<long>(best));
  }
  return worst;
}

namespace {

// Solve (i w I - A) X = B by complex Gaussian elimination with partial pivoting.
CMatrix resolvent_times(const Matrix& a, const Matrix& b, double w) {
  const std::size_t n = a.rows(), q = b.cols();
  CMatrix m(n, std::vector<Complex>(n + q));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = Complex(0.0, i == j ? w : 0.0) - a(i, j);
    for (std::size_t j = 0; j < q; ++j) m[i][n + j] = b(i, j);
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
    std::swap(m[k], m[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = m[i][k] / m[k][k];
      for (std::size_t j = k; j < n + q; ++j) m[i][j] -= f * m[k][j];
    }
  }
  CMatrix x(n, std::vector<Complex>(q));
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t i = n; i-- > 0;) {
      Complex acc = m[i][n + j];
      for (std::size_t l = i + 1; l < n; ++l) acc -= m[i][l] * x[l][j];
      x[i][j] = acc / m[i][i];
    }
  return x;
}

double sigma_max_at(const Matrix& a, const Matrix& b, const Matrix& l, double w) {
  const CMatrix x = resolvent_times(a, b, w);
  const std::size_t p = l.rows(), q = b.cols(), n = a.rows();
  CMatrix g(p, std::vector<Complex>(q));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = 0; k < n; ++k) g[i][j] += l(i, k) * x[k][j];
  // Power iteration on G^H G.
  std::vector<Complex> v(q, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<Complex> gv(p), ghgv(q);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < q; ++j) gv[i] += g[i][j] * v[j];
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t i = 0; i < p; ++i) ghgv[j] += std::conj(g[i][j]) * gv[i];
    double norm = 0.0;
    for (const Complex& c : ghgv) norm += std::norm(c);
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (std::size_t j = 0; j < q; ++j) v[j] = ghgv[j] / norm;
    if (std::abs(norm - lambda) <= 1e-15 * norm) {
      lambda = norm;
      break;
    }
    lambda = norm;
  }
  return std::sqrt(lambda);
}

}  // namespace

double hinf_norm_sweep(const Matrix& a, const Matrix& b, const Matrix& l) {
  double best_w = 0.0;
  double best = sigma_max_at(a, b, l, 0.0);
  const int points = 2000;
  std::vector<double> ws(points);
  for (int i = 0; i < points; ++i) ws[i] = std::pow(10.0, -4.0 + 8.0 * i / (points - 1));
  std::size_t best_i = 0;
  bool interior = false;
  for (int i = 0; i < points; ++i) {
    const double s = sigma_max_at(a, b, l, ws[i]);
    if (s > best) {
      best = s;
      best_w = ws[i];
      best_i = static_cast<std::size_t>(i);
      interior = true;
    }
  }
  if (interior) {
    double lo = best_i > 0 ? ws[best_i - 1] : 0.0;
    double hi = best_i + 1 < ws.size() ? ws[best_i + 1] : ws[best_i];
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = sigma_max_at(a, b, l, x1), f2 = sigma_max_at(a, b, l, x2);
    for (int it = 0; it < 100; ++it) {
      if (f1 > f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = sigma_max_at(a, b, l, x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = sigma_max_at(a, b, l, x2);
      }
    }
    best = std::max({best, f1, f2});
  }
  (void)best_w;
  return best;
}

Matrix cholesky(const Matrix& s) {
  const std::size_t n = s.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double acc = s(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
      l(i, j) = acc / l(j, j);
    }
  }
  return l;
}

double scalar_are(double a, double d, double c) {
  if (d == 0.0) return -c / (2.0 * a);
  // Stabilizing: a - d r = -sqrt(a^2 + d c).
  return (a + std::sqrt(a * a + d * c)) / d;
}

double scalar_gamma_star(double a, double b1, double b2, double l) {
  return std::abs(b2 * l) / std::sqrt(a * a + b1 * b1 * l * l);
}

double bessel_i0(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= (x / 2.0) * (x / 2.0) / (double(k) * double(k));
    sum += term;
  }
  return sum;
}

}  // namespace hvib::oracle
