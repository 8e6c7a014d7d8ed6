#pragma once

// Independent reference implementations used only by the tests.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "nilconv/graded_group.hpp"

namespace oracle {

/// Strictly upper-triangular n x n matrices, basis E_ij (i < j) ordered by
/// weight j - i. A graded nilpotent algebra of step n - 1 with an exact
/// group law given by matrix exp and log.
struct UpperTriangular {
  int n;
  std::vector<std::pair<int, int>> basis;

  explicit UpperTriangular(int size) : n(size) {
    for (int w = 1; w < n; ++w)
      for (int i = 0; i + w < n; ++i) basis.push_back({i, i + w});
  }

  nilconv::GradedLieAlgebra algebra() const {
    std::vector<int> dims;
    for (int w = 1; w < n; ++w) dims.push_back(n - w);
    std::vector<nilconv::StructureConstant> c;
    auto index_of = [&](int i, int j) {
      for (std::size_t b = 0; b < basis.size(); ++b)
        if (basis[b].first == i && basis[b].second == j) return static_cast<int>(b);
      return -1;
    };
    for (std::size_t a = 0; a < basis.size(); ++a)
      for (std::size_t b = a + 1; b < basis.size(); ++b) {
        const auto [i, j] = basis[a];
        const auto [k, l] = basis[b];
        // [E_ij, E_kl] = delta_jk E_il - delta_li E_kj
        if (j == k) c.push_back({static_cast<int>(a), static_cast<int>(b), index_of(i, l), 1.0});
        if (l == i) c.push_back({static_cast<int>(a), static_cast<int>(b), index_of(k, j), -1.0});
      }
    return nilconv::GradedLieAlgebra(dims, c, "upper" + std::to_string(n));
  }

  Eigen::MatrixXd to_matrix(const std::vector<double>& x) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t b = 0; b < basis.size(); ++b) m(basis[b].first, basis[b].second) = x[b];
    return m;
  }

  std::vector<double> from_matrix(const Eigen::MatrixXd& m) const {
    std::vector<double> x;
    for (const auto& [i, j] : basis) x.push_back(m(i, j));
    return x;
  }

  static Eigen::MatrixXd expm(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(x.rows(), x.cols()), sum = term;
    for (int k = 1; k < x.rows(); ++k) {
      term = term * x / k;
      sum += term;
    }
    return sum;
  }

  static Eigen::MatrixXd logm(const Eigen::MatrixXd& g) {
    const Eigen::MatrixXd u = g - Eigen::MatrixXd::Identity(g.rows(), g.cols());
    Eigen::MatrixXd power = u, sum = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    for (int k = 1; k < g.rows(); ++k) {
      sum += ((k % 2) ? 1.0 : -1.0) * power / k;
      power = power * u;
    }
    return sum;
  }

  std::vector<double> multiply(const std::vector<double>& x, const std::vector<double>& y) const {
    return from_matrix(logm(expm(to_matrix(x)) * expm(to_matrix(y))));
  }
};

/// Dense matrix of a linear map on C^n, built column by column.
template <class F>
Eigen::MatrixXcd dense_matrix(std::size_t n, const F& apply) {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::complex<double>> e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    const std::vector<std::complex<double>> col = apply(e);
    for (std::size_t r = 0; r < n; ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
    e[c] = 0.0;
  }
  return m;
}

inline double largest_singular_value(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

inline double smallest_singular_value(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace oracle
