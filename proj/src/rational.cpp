#include "quantsafe/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace quantsafe {

Rational Rational::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      mpz_class n(text);
      return Rational(n);
    }
    mpz_class num(text.substr(0, slash));
    mpz_class den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("bad rational literal '" + text + "'");
  }
}

std::string Rational::str() const {
  if (is_integer()) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::string Rational::decimal(int digits) const {
  mpz_class scale = 1;
  for (int i = 0; i < digits; i++) scale *= 10;
  mpz_class scaled_num = num() * scale;
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), scaled_num.get_mpz_t(), den().get_mpz_t());
  bool neg = q < 0 && !(r == 0 && q * den() == scaled_num);
  mpz_class whole, frac;
  mpz_fdiv_qr(whole.get_mpz_t(), frac.get_mpz_t(), q.get_mpz_t(), scale.get_mpz_t());
  std::string fs = frac.get_str();
  while ((int)fs.size() < digits) fs = "0" + fs;
  std::string out = whole.get_str();
  if (digits > 0) out += "." + fs;
  (void)neg;
  return out;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational Rational::pow(unsigned long e) const {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), num().get_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), den().get_mpz_t(), e);
  return Rational(n, d);
}

size_t Rational::hash() const {
  std::hash<std::string> h;
  return h(str());
}

Rational min(const Rational& a, const Rational& b) { return a <= b ? a : b; }
Rational max(const Rational& a, const Rational& b) { return a >= b ? a : b; }

}  // namespace quantsafe
