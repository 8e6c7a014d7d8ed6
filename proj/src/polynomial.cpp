#include "nilconv/polynomial.hpp"

#include <cmath>
#include <sstream>

#include "nilconv/error.hpp"

namespace nilconv {

namespace {
constexpr double kDropBelow = 1e-15;
}

Polynomial Polynomial::constant(std::size_t nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Monomial(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t i) {
  Polynomial p(nvars);
  Monomial m(nvars, 0);
  m.at(i) = 1;
  p.add_term(m, 1.0);
  return p;
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double c) {
  require(m.size() == nvars_, "polynomial: monomial arity mismatch");
  if (c == 0.0) return;
  double& slot = terms_[m];
  slot += c;
  if (std::abs(slot) < kDropBelow) terms_.erase(m);
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  require(o.nvars_ == nvars_, "polynomial: arity mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  require(o.nvars_ == nvars_, "polynomial: arity mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double c) {
  for (auto& [m, v] : terms_) v *= c;
  prune();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  require(a.nvars_ == b.nvars_, "polynomial: arity mismatch");
  Polynomial out(a.nvars_);
  Polynomial::Monomial m(a.nvars_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<std::uint8_t>(ma[i] + mb[i]);
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) {
    if (m[var] == 0) continue;
    Monomial d = m;
    d[var] = static_cast<std::uint8_t>(d[var] - 1);
    out.add_term(d, c * m[var]);
  }
  return out;
}

Polynomial Polynomial::restrict_to(std::size_t begin, std::size_t count) const {
  Polynomial out(count);
  for (const auto& [m, c] : terms_) {
    bool outside = false;
    for (std::size_t i = 0; i < nvars_ && !outside; ++i)
      if ((i < begin || i >= begin + count) && m[i] != 0) outside = true;
    if (outside) continue;
    out.add_term(Monomial(m.begin() + static_cast<long>(begin), m.begin() + static_cast<long>(begin + count)), c);
  }
  return out;
}

double Polynomial::evaluate(std::span<const double> x) const {
  require(x.size() == nvars_, "polynomial: evaluation point arity mismatch");
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (std::size_t i = 0; i < nvars_; ++i)
      for (int e = 0; e < m[i]; ++e) t *= x[i];
    sum += t;
  }
  return sum;
}

bool Polynomial::is_homogeneous(std::span<const int> weights, int degree) const {
  for (const auto& [m, c] : terms_) {
    int d = 0;
    for (std::size_t i = 0; i < nvars_; ++i) d += weights[i] * m[i];
    if (d != degree) return false;
  }
  return true;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    const double a = std::abs(c);
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (m[i] == 0) continue;
      parts.push_back(names.at(i) + (m[i] > 1 ? "^" + std::to_string(int(m[i])) : ""));
    }
    if (a != 1.0 || parts.empty()) {
      std::ostringstream num;
      num << a;
      parts.insert(parts.begin(), num.str());
    }
    for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? "*" : "") << parts[i];
  }
  return os.str();
}

void Polynomial::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < kDropBelow) it = terms_.erase(it);
    else ++it;
  }
}

}  // namespace nilconv
