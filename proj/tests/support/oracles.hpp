#pragma once

// Reference computations used to check the library. None of them call into
// traderisk code paths they are meant to verify.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "traderisk/graph.hpp"
#include "traderisk/layer.hpp"

namespace oracle {

inline Eigen::MatrixXd dense(const traderisk::Layer& layer) {
  const auto n = static_cast<Eigen::Index>(layer.node_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : layer.edges()) {
    a(static_cast<Eigen::Index>(e.source), static_cast<Eigen::Index>(e.target)) = e.weight;
  }
  return a;
}

/// A^n == 0; exact for nonnegative matrices since products cannot cancel.
inline bool is_nilpotent(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (Eigen::Index k = 0; k < a.rows(); ++k) p = p * a;
  return (p.array() == 0.0).all();
}

using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

/// Largest eigenvalue modulus from a general dense eigensolver, in long
/// double. Zero eigenvalues of a nilpotent matrix are ill-conditioned
/// (errors of order eps^(1/n)), so that case is answered exactly.
inline long double spectral_radius_ld(const Eigen::MatrixXd& a) {
  if (a.rows() == 0 || is_nilpotent(a)) return 0.0L;
  Eigen::EigenSolver<MatrixXld> solver(a.cast<long double>(), false);
  long double rho = 0.0L;
  for (Eigen::Index i = 0; i < a.rows(); ++i) rho = std::max(rho, std::abs(solver.eigenvalues()[i]));
  return rho;
}

inline double spectral_radius(const Eigen::MatrixXd& a) {
  return static_cast<double>(spectral_radius_ld(a));
}

/// Characteristic polynomial coefficients c[0..n] (c[n] = 1) of an n x n
/// matrix via Faddeev-LeVerrier, in long double.
inline std::vector<long double> characteristic_polynomial(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  using M = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const M al = a.cast<long double>();
  std::vector<long double> c(static_cast<std::size_t>(n) + 1, 0.0L);
  c[static_cast<std::size_t>(n)] = 1.0L;
  M m = M::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = al * m + c[static_cast<std::size_t>(n - k + 1)] * M::Identity(n, n);
    c[static_cast<std::size_t>(n - k)] = -(al * m).trace() / static_cast<long double>(k);
  }
  return c;
}

/// All roots of a monic polynomial via Durand-Kerner iteration.
inline std::vector<std::complex<long double>> polynomial_roots(std::vector<long double> c) {
  using C = std::complex<long double>;
  // exact zero roots are split off; repeated roots slow the iteration down
  std::vector<C> zeros;
  while (c.size() > 1 && c.front() == 0.0L) {
    c.erase(c.begin());
    zeros.push_back(0.0L);
  }
  const std::size_t n = c.size() - 1;
  auto eval = [&](C x) {
    C v = 0.0L;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
  };
  long double bound = 1.0L;
  for (std::size_t k = 0; k < n; ++k) bound = std::max(bound, 1.0L + std::abs(c[k]));
  std::vector<C> z(n);
  const C seed(0.4L, 0.9L);
  for (std::size_t k = 0; k < n; ++k) z[k] = std::pow(seed, static_cast<long double>(k)) * bound * 0.5L;
  for (int iter = 0; iter < 2000; ++iter) {
    long double change = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      C denom = 1.0L;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      const C step = eval(z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change <= 64.0L * std::numeric_limits<long double>::epsilon() * bound) break;
  }
  // polish each root with Newton steps on the polynomial
  for (auto& r : z) {
    for (int k = 0; k < 8; ++k) {
      C p = 0.0L, dp = 0.0L;
      for (std::size_t j = c.size(); j-- > 0;) {
        dp = dp * r + p;
        p = p * r + c[j];
      }
      if (std::abs(dp) == 0.0L) break;
      r -= p / dp;
    }
  }
  z.insert(z.end(), zeros.begin(), zeros.end());
  return z;
}

/// Largest-modulus root of the characteristic polynomial (n <= 4 intended).
inline double characteristic_root(const Eigen::MatrixXd& a) {
  if (is_nilpotent(a)) return 0.0;
  if (a.rows() == 0) return 0.0;
  long double best = 0.0L;
  for (const auto& r : polynomial_roots(characteristic_polynomial(a))) best = std::max(best, std::abs(r));
  return static_cast<double>(best);
}

/// Solves the PageRank fixed point as a linear system:
///   (I - alpha W) x = (1 - alpha) 1,
/// W_ij = V_ji / kout_j (downstream) or V_ij / kout_j (upstream, kout_j > 0).
inline Eigen::VectorXd pagerank_solve(const traderisk::Layer& v, double alpha_factor,
                                      traderisk::graph::PageRankFlow flow) {
  const MatrixXld a = dense(v).cast<long double>();
  const Eigen::Index n = a.rows();
  const long double lambda = spectral_radius_ld(dense(v));
  const long double alpha = alpha_factor / lambda;
  VectorXld kout = VectorXld::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) kout(i) += a(i, j) > 0.0L ? 1.0L : 0.0L;
  }
  MatrixXld w = MatrixXld::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (kout(j) == 0.0L) continue;
      w(i, j) = (flow == traderisk::graph::PageRankFlow::downstream ? a(j, i) : a(i, j)) / kout(j);
    }
  }
  const MatrixXld system = MatrixXld::Identity(n, n) - alpha * w;
  const VectorXld x = system.fullPivLu().solve(VectorXld::Constant(n, 1.0L - alpha));
  return x.cast<double>();
}

/// Largest SCC fraction from the transitive closure (Floyd-Warshall).
inline double scc_fraction_bruteforce(std::size_t n, const std::vector<std::vector<bool>>& adj) {
  auto reach = adj;
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t size = 0;
    for (std::size_t j = 0; j < n; ++j) size += reach[i][j] && reach[j][i];
    best = std::max(best, size);
  }
  return static_cast<double>(best) / static_cast<double>(n);
}

/// Pearson correlation in long double.
inline long double pearson(const std::vector<long double>& x, const std::vector<long double>& y) {
  const auto n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Residuals of an ordinary least-squares fit of y on (1, z).
inline std::vector<long double> residuals(const std::vector<double>& y, const std::vector<double>& z) {
  const auto n = static_cast<long double>(y.size());
  long double my = 0, mz = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    my += y[i];
    mz += z[i];
  }
  my /= n;
  mz /= n;
  long double szy = 0, szz = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    szy += (z[i] - mz) * (y[i] - my);
    szz += (z[i] - mz) * (z[i] - mz);
  }
  const long double slope = szy / szz;
  std::vector<long double> r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - my - slope * (z[i] - mz);
  return r;
}

/// Partial correlation as the correlation of regression residuals.
inline double partial_by_residuals(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<double>& z) {
  return static_cast<double>(pearson(residuals(x, z), residuals(y, z)));
}

/// Two-sided Student-t p-value for integer dof from the closed-form
/// trigonometric series of the t distribution function.
inline double student_t_two_sided_p(double t, int dof) {
  const long double theta = std::atan(std::abs(static_cast<long double>(t)) /
                                      std::sqrt(static_cast<long double>(dof)));
  const long double s = std::sin(theta), c = std::cos(theta), c2 = c * c;
  long double a;  // P(|T| <= |t|)
  if (dof % 2 == 1) {
    long double sum = 0.0L;
    if (dof > 1) {
      long double term = c;
      sum = term;
      for (int k = 3; k <= dof - 2; k += 2) {
        term *= c2 * static_cast<long double>(k - 1) / static_cast<long double>(k);
        sum += term;
      }
    }
    a = 2.0L / std::numbers::pi_v<long double> * (theta + s * sum);
  } else {
    long double term = 1.0L, sum = 1.0L;
    for (int k = 2; k <= dof - 2; k += 2) {
      term *= c2 * static_cast<long double>(k - 1) / static_cast<long double>(k);
      sum += term;
    }
    a = s * sum;
  }
  return static_cast<double>(1.0L - a);
}

}  // namespace oracle
