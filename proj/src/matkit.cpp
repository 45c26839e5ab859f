#include "hvib/matkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hvib/error.hpp"
#include "hvib/kernels.hpp"

namespace hvib {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const Matrix& m, const char* op) {
  if (!m.is_square()) {
    fail(ErrorKind::dimension, std::string(op) + ": matrix is " +
                                   std::to_string(m.rows()) + "x" +
                                   std::to_string(m.cols()) + ", not square");
  }
}

double sign_of(double magnitude, double sign_source) {
  return sign_source >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Row/column scaling by powers of the radix so that row and column norms are
// comparable. Similarity transform, so the spectrum is unchanged.
void balance(Matrix& a) {
  const std::size_t n = a.rows();
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        const double inv = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

void reduce_to_hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (a(k + 1, k) > 0.0) alpha = -alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a(i, k);
      if (i == k + 1) v[i] -= alpha;
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
      s *= beta;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= beta;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
    }
    a(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr layout).
std::vector<Complex> hessenberg_qr(Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<Complex> w(static_cast<std::size_t>(n));
  auto at = [&a](int i, int j) -> double& {
    return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(at(i, j));

  constexpr int kMaxIterations = 60;
  int nn = n - 1;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, x = 0.0, y = 0.0, z = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::abs(at(l - 1, l - 1)) + std::abs(at(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(at(l, l - 1)) <= kEps * s) {
          at(l, l - 1) = 0.0;
          break;
        }
      }
      x = at(nn, nn);
      if (l == nn) {
        w[static_cast<std::size_t>(nn)] = Complex(x + t, 0.0);
        --nn;
      } else {
        y = at(nn - 1, nn - 1);
        double wv = at(nn, nn - 1) * at(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + wv;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            const double hi = x + z;
            const double lo = z != 0.0 ? x - wv / z : hi;
            w[static_cast<std::size_t>(nn - 1)] = Complex(hi, 0.0);
            w[static_cast<std::size_t>(nn)] = Complex(lo, 0.0);
          } else {
            w[static_cast<std::size_t>(nn)] = Complex(x + p, -z);
            w[static_cast<std::size_t>(nn - 1)] = Complex(x + p, z);
          }
          nn -= 2;
        } else {
          if (its == kMaxIterations) {
            fail(ErrorKind::numerical_failure,
                 "eigenvalues: QR iteration did not converge");
          }
          if (its > 0 && its % 10 == 0) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) at(i, i) -= x;
            s = std::abs(at(nn, nn - 1)) + std::abs(at(nn - 1, nn - 2));
            y = x = 0.75 * s;
            wv = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = at(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - wv) / at(m + 1, m) + at(m, m + 1);
            q = at(m + 1, m + 1) - z - r - s;
            r = at(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(at(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(at(m - 1, m - 1)) +
                                            std::abs(z) +
                                            std::abs(at(m + 1, m + 1)));
            if (u <= kEps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            at(i + 2, i) = 0.0;
            if (i != m) at(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = at(k, k - 1);
              q = at(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = at(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) at(k, k - 1) = -at(k, k - 1);
            } else {
              at(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = at(k, j) + q * at(k + 1, j);
              if (k + 1 != nn) {
                p += r * at(k + 2, j);
                at(k + 2, j) -= p * z;
              }
              at(k + 1, j) -= p * y;
              at(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * at(i, k) + y * at(i, k + 1);
              if (k + 1 != nn) {
                p += z * at(i, k + 2);
                at(i, k + 2) -= p * r;
              }
              at(i, k + 1) -= p * q;
              at(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return w;
}

// Complex LU with partial pivoting; tiny pivots are lifted to `floor` so that
// inverse iteration at an exact eigenvalue stays finite.
struct ComplexLu {
  std::size_t n = 0;
  std::vector<Complex> lu;
  std::vector<std::size_t> perm;

  ComplexLu(const Matrix& m, Complex shift, double floor) : n(m.rows()) {
    lu.resize(n * n);
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      perm[i] = i;
      for (std::size_t j = 0; j < n; ++j)
        lu[i * n + j] = Complex(m(i, j), 0.0) - (i == j ? shift : Complex{});
    }
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      double best = std::abs(lu[k * n + k]);
      for (std::size_t i = k + 1; i < n; ++i) {
        if (std::abs(lu[i * n + k]) > best) {
          best = std::abs(lu[i * n + k]);
          piv = i;
        }
      }
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j)
          std::swap(lu[k * n + j], lu[piv * n + j]);
        std::swap(perm[k], perm[piv]);
      }
      if (std::abs(lu[k * n + k]) < floor) lu[k * n + k] = Complex(floor, 0.0);
      const Complex d = lu[k * n + k];
      for (std::size_t i = k + 1; i < n; ++i) {
        const Complex l = lu[i * n + k] / d;
        lu[i * n + k] = l;
        for (std::size_t j = k + 1; j < n; ++j) lu[i * n + j] -= l * lu[k * n + j];
      }
    }
  }

  std::vector<Complex> solve(const std::vector<Complex>& b) const {
    std::vector<Complex> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu[i * n + j] * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
      for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu[ii * n + j] * x[j];
      x[ii] /= lu[ii * n + ii];
    }
    return x;
  }
};

void normalize(std::vector<Complex>& v) {
  double s = 0.0;
  for (const Complex& c : v) s += std::norm(c);
  s = std::sqrt(s);
  if (s == 0.0) return;
  for (Complex& c : v) c /= s;
}

}  // namespace

const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::positive_definite: return "positive_definite";
    case Definiteness::positive_semidefinite: return "positive_semidefinite";
    case Definiteness::indefinite: return "indefinite";
  }
  return "unknown";
}

LuFactorization::LuFactorization(Matrix a) : lu_(std::move(a)) {
  if (!lu_.is_square()) fail(ErrorKind::dimension, "LU: non-square matrix");
  const std::size_t n = lu_.rows();
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  const double scale = lu_.max_abs();
  const double tiny = static_cast<double>(std::max<std::size_t>(n, 1)) * kEps * scale;
  double umin = std::numeric_limits<double>::infinity();
  double umax = 0.0;
  if (scale == 0.0 && n > 0) {
    singular_ = true;
    return;
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        piv = i;
      }
    }
    if (best <= tiny) {
      singular_ = true;
      pivot_ratio_ = 0.0;
      return;
    }
    if (piv != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(piv).begin());
      std::swap(perm_[k], perm_[piv]);
    }
    const double d = lu_(k, k);
    umin = std::min(umin, std::abs(d));
    umax = std::max(umax, std::abs(d));
    const auto pivot_tail = lu_.row(k).subspan(k + 1);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = lu_(i, k) / d;
      lu_(i, k) = l;
      if (l != 0.0) kernels::axpy(-l, pivot_tail, lu_.row(i).subspan(k + 1));
    }
  }
  pivot_ratio_ = n == 0 ? 1.0 : umin / umax;
}

void LuFactorization::solve_in_place(std::vector<double>& b) const {
  if (singular_) fail(ErrorKind::no_unique_solution, "LU: singular matrix");
  const std::size_t n = lu_.rows();
  if (b.size() != n) fail(ErrorKind::dimension, "LU solve: rhs length");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 1; i < n; ++i) {
    x[i] -= kernels::dot(lu_.row(i).first(i), std::span<const double>(x).first(i));
  }
  for (std::size_t ii = n; ii-- > 0;) {
    const std::size_t tail = n - ii - 1;
    x[ii] -= kernels::dot(lu_.row(ii).subspan(ii + 1, tail),
                          std::span<const double>(x).subspan(ii + 1, tail));
    x[ii] /= lu_(ii, ii);
  }
  b.swap(x);
}

Matrix LuFactorization::solve(const Matrix& b) const {
  if (b.rows() != lu_.rows()) fail(ErrorKind::dimension, "LU solve: rhs rows");
  Matrix x(b.rows(), b.cols());
  std::vector<double> col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    solve_in_place(col);
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = col[i];
  }
  return x;
}

Matrix solve(const Matrix& a, const Matrix& b) {
  LuFactorization lu(a);
  if (lu.singular()) fail(ErrorKind::no_unique_solution, "solve: singular matrix");
  return lu.solve(b);
}

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

Matrix mat_exp(const Matrix& m) {
  require_square(m, "mat_exp");
  if (!m.all_finite()) fail(ErrorKind::precondition, "mat_exp: non-finite entries");
  const std::size_t n = m.rows();
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm = m.norm1();
  int squarings = 0;
  if (norm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  }
  const Matrix a = m * std::ldexp(1.0, -squarings);
  const Matrix ident = Matrix::identity(n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;

  Matrix inner_u = b[13] * a6;
  inner_u.add_scaled(b[11], a4).add_scaled(b[9], a2);
  Matrix u_poly = a6 * inner_u;
  u_poly.add_scaled(b[7], a6).add_scaled(b[5], a4).add_scaled(b[3], a2).add_scaled(b[1], ident);
  const Matrix u = a * u_poly;

  Matrix inner_v = b[12] * a6;
  inner_v.add_scaled(b[10], a4).add_scaled(b[8], a2);
  Matrix v = a6 * inner_v;
  v.add_scaled(b[6], a6).add_scaled(b[4], a4).add_scaled(b[2], a2).add_scaled(b[0], ident);

  Matrix result = solve(v - u, v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

SpectrumReport eigenvalues(const Matrix& m) {
  require_square(m, "eigenvalues");
  if (!m.all_finite()) fail(ErrorKind::numerical_failure, "eigenvalues: non-finite entries");
  Matrix work = m;
  balance(work);
  reduce_to_hessenberg(work);
  SpectrumReport report;
  report.eigenvalues = hessenberg_qr(work);
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](const Complex& x, const Complex& y) {
              if (x.real() != y.real()) return x.real() < y.real();
              return x.imag() < y.imag();
            });
  report.max_real_part = -std::numeric_limits<double>::infinity();
  for (const Complex& z : report.eigenvalues) {
    report.max_real_part = std::max(report.max_real_part, z.real());
    report.spectral_radius = std::max(report.spectral_radius, std::abs(z));
  }
  return report;
}

bool is_hurwitz(const Matrix& m, double margin) {
  if (m.rows() == 0) return true;
  return eigenvalues(m).max_real_part < -margin;
}

std::vector<Complex> eigenvector(const Matrix& m, Complex lambda,
                                 const std::vector<Complex>& start) {
  require_square(m, "eigenvector");
  const std::size_t n = m.rows();
  if (start.size() != n) fail(ErrorKind::dimension, "eigenvector: start length");
  const double floor = kEps * std::max(m.norm(), 1e-300);
  const ComplexLu lu(m, lambda, floor);
  std::vector<Complex> v = start;
  normalize(v);
  for (int it = 0; it < 3; ++it) {
    v = lu.solve(v);
    normalize(v);
  }
  return v;
}

Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& q) {
  require_square(a, "solve_sylvester(A)");
  require_square(b, "solve_sylvester(B)");
  const std::size_t n = a.rows();
  const std::size_t m = b.rows();
  if (q.rows() != n || q.cols() != m) {
    fail(ErrorKind::dimension, "solve_sylvester: Q must be n x m");
  }
  if (n > kMaxStateDimension || m > kMaxStateDimension) {
    fail(ErrorKind::dimension, "solve_sylvester: dimension above 32");
  }
  if (n == 0 || m == 0) return Matrix(n, m);
  // Row-major vec: unknown (i, j) sits at i * m + j.
  const std::size_t big = n * m;
  Matrix k(big, big);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t r = i * m + j;
      for (std::size_t l = 0; l < n; ++l) k(r, l * m + j) += a(i, l);
      for (std::size_t l = 0; l < m; ++l) k(r, i * m + l) += b(l, j);
    }
  std::vector<double> rhs(big);
  for (std::size_t idx = 0; idx < big; ++idx) rhs[idx] = -q.data()[idx];

  const LuFactorization lu(k);
  if (lu.singular()) {
    fail(ErrorKind::no_unique_solution,
         "solve_sylvester: spectra of A and -B intersect");
  }
  std::vector<double> x = rhs;
  lu.solve_in_place(x);
  // one step of iterative refinement
  std::vector<double> resid(big);
  for (std::size_t r = 0; r < big; ++r) {
    resid[r] = rhs[r] - kernels::dot(k.row(r), x);
  }
  lu.solve_in_place(resid);
  for (std::size_t r = 0; r < big; ++r) x[r] += resid[r];

  Matrix out(n, m);
  std::copy(x.begin(), x.end(), out.data().begin());
  return out;
}

Matrix enforce_symmetric(const Matrix& s, const char* what, double tol) {
  require_square(s, what);
  const double asym = asymmetry(s);
  if (asym > tol * s.norm()) {
    fail(ErrorKind::asymmetry, std::string(what) + ": matrix is not symmetric (||S-S^T|| = " +
                                   std::to_string(asym) + ")");
  }
  return symmetrize(s);
}

Definiteness definiteness(const Matrix& s) {
  Matrix w = enforce_symmetric(s, "definiteness");
  const std::size_t n = w.rows();
  const double tol = 1e-12 * w.norm();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (w(i, i) > w(piv, piv)) piv = i;
    if (w(piv, piv) <= tol) {
      for (std::size_t i = k; i < n; ++i) {
        if (w(i, i) < -tol) return Definiteness::indefinite;
        for (std::size_t j = k; j < n; ++j)
          if (i != j && std::abs(w(i, j)) > tol) return Definiteness::indefinite;
      }
      return Definiteness::positive_semidefinite;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(w(k, j), w(piv, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(w(i, k), w(i, piv));
    }
    const double d = std::sqrt(w(k, k));
    w(k, k) = d;
    for (std::size_t i = k + 1; i < n; ++i) w(i, k) /= d;
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j <= i; ++j) {
        w(i, j) -= w(i, k) * w(j, k);
        w(j, i) = w(i, j);
      }
  }
  return Definiteness::positive_definite;
}

}  // namespace hvib
