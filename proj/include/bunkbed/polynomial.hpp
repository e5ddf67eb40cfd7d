#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace bunkbed {

/// Dense univariate polynomial with exact rational coefficients, ascending
/// powers, normalized so the leading coefficient is nonzero.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static UniPoly constant(const Rational& c) { return UniPoly({c}); }
  static UniPoly variable() { return UniPoly({Rational(0), Rational(1)}); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  Rational coefficient(int power) const {
    if (power < 0 || power >= static_cast<int>(coeffs_.size())) return 0;
    return coeffs_[power];
  }
  Rational leading() const { return coeffs_.empty() ? Rational(0) : coeffs_.back(); }

  Rational eval(const Rational& x) const {
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  UniPoly derivative() const {
    if (coeffs_.size() <= 1) return UniPoly();
    std::vector<Rational> d(coeffs_.size() - 1);
    for (size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * Rational(static_cast<unsigned>(k));
    return UniPoly(std::move(d));
  }

  UniPoly operator-() const {
    UniPoly r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
    std::vector<Rational> s(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
    for (size_t k = 0; k < a.coeffs_.size(); ++k) s[k] += a.coeffs_[k];
    for (size_t k = 0; k < b.coeffs_.size(); ++k) s[k] += b.coeffs_[k];
    return UniPoly(std::move(s));
  }
  friend UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + (-b); }

  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return UniPoly();
    std::vector<Rational> prod(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
    for (size_t i = 0; i < a.coeffs_.size(); ++i)
      for (size_t j = 0; j < b.coeffs_.size(); ++j) prod[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return UniPoly(std::move(prod));
  }

  friend UniPoly operator*(const Rational& c, const UniPoly& p) {
    UniPoly r = p;
    for (auto& x : r.coeffs_) x *= c;
    r.trim();
    return r;
  }

  friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.coeffs_ == b.coeffs_; }

  /// Long division: returns {quotient, remainder} with a = q*b + r,
  /// deg r < deg b. Exact in rational arithmetic; b must be nonzero.
  static std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
    if (b.is_zero()) throw std::invalid_argument("polynomial division by zero");
    std::vector<Rational> rem = a.coeffs_;
    const int db = b.degree();
    if (a.degree() < db) return {UniPoly(), a};
    std::vector<Rational> quo(a.degree() - db + 1, Rational(0));
    for (int k = a.degree(); k >= db; --k) {
      if (rem[k] == 0) continue;
      Rational f = rem[k] / b.coeffs_.back();
      quo[k - db] = f;
      for (int j = 0; j <= db; ++j) rem[k - db + j] -= f * b.coeffs_[j];
    }
    return {UniPoly(std::move(quo)), UniPoly(std::move(rem))};
  }

  UniPoly monic() const {
    if (is_zero()) return UniPoly();
    return (Rational(1) / coeffs_.back()) * *this;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }
  std::vector<Rational> coeffs_;
};

inline UniPoly poly_gcd(UniPoly a, UniPoly b) {
  while (!b.is_zero()) {
    UniPoly r = UniPoly::divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// p with all repeated roots reduced to multiplicity one: p / gcd(p, p').
inline UniPoly square_free_part(const UniPoly& p) {
  if (p.is_zero()) return p;
  if (p.degree() == 0) return UniPoly::constant(1);
  UniPoly g = poly_gcd(p, p.derivative());
  if (g.degree() == 0) return p.monic();
  return UniPoly::divmod(p, g).first.monic();
}

/// One isolated real root. For exact == true the root is lo == hi exactly;
/// otherwise the (unique) root lies in the open interval (lo, hi) and
/// hi - lo <= the isolation tolerance. sign_left / sign_right give the sign
/// of the queried polynomial just left / right of the root within the
/// isolation domain (0 when the root sits on the domain boundary).
struct RootInterval {
  Rational lo;
  Rational hi;
  bool exact = false;
  int sign_left = 0;
  int sign_right = 0;

  Rational midpoint() const { return (lo + hi) / 2; }
  Rational width() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  double approx() const { return to_double(midpoint()); }
};

namespace detail {

inline std::vector<UniPoly> sturm_chain(const UniPoly& square_free) {
  std::vector<UniPoly> chain;
  chain.push_back(square_free);
  UniPoly d = square_free.derivative();
  while (!d.is_zero()) {
    chain.push_back(d);
    UniPoly r = -UniPoly::divmod(chain[chain.size() - 2], chain.back()).second;
    d = std::move(r);
  }
  return chain;
}

inline int sign_variations(const std::vector<UniPoly>& chain, const Rational& x) {
  int variations = 0;
  int last = 0;
  for (const auto& p : chain) {
    int s = sign_of(p.eval(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++variations;
    last = s;
  }
  return variations;
}

}  // namespace detail

/// Isolates every real root of p in [lo, hi] via a Sturm chain on the
/// square-free part, bisecting until each enclosure is narrower than tol or
/// pinned exactly. Roots are returned in increasing order with the signs of
/// p on either side. p must be nonzero.
inline std::vector<RootInterval> isolate_roots(const UniPoly& p, const Rational& lo,
                                               const Rational& hi, const Rational& tol) {
  if (p.is_zero()) throw std::invalid_argument("cannot isolate roots of the zero polynomial");
  if (!(lo < hi)) throw std::invalid_argument("empty root isolation interval");
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");

  std::vector<RootInterval> found;
  UniPoly sf = square_free_part(p);

  // Exact domain-endpoint roots are peeled off by deflation so the Sturm
  // half-open interval bookkeeping below never sits on a root.
  auto deflate_at = [&sf](const Rational& r) {
    UniPoly linear({-r, Rational(1)});
    sf = UniPoly::divmod(sf, linear).first;
  };
  if (sf.eval(lo) == 0) {
    found.push_back({lo, lo, true, 0, 0});
    deflate_at(lo);
  }
  if (sf.eval(hi) == 0) {
    found.push_back({hi, hi, true, 0, 0});
    deflate_at(hi);
  }

  if (sf.degree() >= 1) {
    std::vector<UniPoly> chain = detail::sturm_chain(sf);
    auto vars = [&chain](const Rational& x) { return detail::sign_variations(chain, x); };

    struct Span {
      Rational a, b;
      int count;
    };
    std::vector<Span> work;
    work.push_back({lo, hi, vars(lo) - vars(hi)});

    while (!work.empty()) {
      Span s = work.back();
      work.pop_back();
      if (s.count <= 0) continue;
      Rational mid = (s.a + s.b) / 2;
      if (sf.eval(mid) == 0) {
        found.push_back({mid, mid, true, 0, 0});
        deflate_at(mid);
        chain = detail::sturm_chain(sf);
        if (sf.degree() >= 1) {
          work.push_back({s.a, mid, vars(s.a) - vars(mid)});
          work.push_back({mid, s.b, vars(mid) - vars(s.b)});
        }
        continue;
      }
      if (s.count == 1) {
        Rational a = s.a, b = s.b;
        bool exact = false;
        while (b - a > tol) {
          Rational m = (a + b) / 2;
          if (sf.eval(m) == 0) {
            found.push_back({m, m, true, 0, 0});
            exact = true;
            break;
          }
          if (vars(a) - vars(m) == 1)
            b = m;
          else
            a = m;
        }
        if (!exact) found.push_back({a, b, false, 0, 0});
        continue;
      }
      int left = vars(s.a) - vars(mid);
      work.push_back({s.a, mid, left});
      work.push_back({mid, s.b, s.count - left});
    }
  }

  std::sort(found.begin(), found.end(),
            [](const RootInterval& x, const RootInterval& y) { return x.lo < y.lo; });

  // Signs of the original polynomial between consecutive enclosures. The
  // enclosure endpoints are never roots themselves (exact hits collapsed).
  for (size_t k = 0; k < found.size(); ++k) {
    RootInterval& r = found[k];
    if (r.exact && r.lo == lo)
      r.sign_left = 0;
    else {
      Rational left_bound = (k == 0) ? lo : found[k - 1].hi;
      Rational probe = r.exact ? (left_bound + r.lo) / 2 : r.lo;
      r.sign_left = sign_of(p.eval(probe));
    }
    if (r.exact && r.hi == hi)
      r.sign_right = 0;
    else {
      Rational right_bound = (k + 1 == found.size()) ? hi : found[k + 1].lo;
      Rational probe = r.exact ? (r.hi + right_bound) / 2 : r.hi;
      r.sign_right = sign_of(p.eval(probe));
    }
  }
  return found;
}

}  // namespace bunkbed
