#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace nilconv {

/// Sparse real polynomial in a fixed number of variables.
class Polynomial {
 public:
  using Monomial = std::vector<std::uint8_t>;

  explicit Polynomial(std::size_t nvars = 0) : nvars_(nvars) {}
  static Polynomial constant(std::size_t nvars, double c);
  static Polynomial variable(std::size_t nvars, std::size_t i);

  std::size_t num_vars() const { return nvars_; }
  const std::map<Monomial, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Coefficient of a monomial, 0 if absent.
  double coefficient(const Monomial& m) const;
  void add_term(const Monomial& m, double c);

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double c) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  Polynomial derivative(std::size_t var) const;

  /// Keeps the terms that do not involve variables outside [begin, begin+count)
  /// and renumbers the kept variables from 0.
  Polynomial restrict_to(std::size_t begin, std::size_t count) const;

  double evaluate(std::span<const double> x) const;

  /// True if every term has weighted degree `degree` under `weights`.
  bool is_homogeneous(std::span<const int> weights, int degree) const;

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  void prune();
  std::size_t nvars_;
  std::map<Monomial, double> terms_;
};

}  // namespace nilconv
