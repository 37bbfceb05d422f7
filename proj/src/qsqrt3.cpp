#include "calnet/qsqrt3.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "calnet/errors.hpp"

namespace calnet {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;

// Parses an unsigned rational "p", "p/q" or decimal "1.25" at the cursor.
mpq_class parse_rational(std::string_view text, std::size_t& pos) {
  std::size_t start = pos;
  while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) ++pos;
  std::string token(text.substr(start, pos - start));
  if (token.empty()) throw InvalidInput("expected a number in '" + std::string(text) + "'");
  mpq_class value;
  if (auto dot = token.find('.'); dot != std::string::npos) {
    std::string digits = token.substr(0, dot) + token.substr(dot + 1);
    if (digits.find('.') != std::string::npos) throw InvalidInput("malformed decimal '" + token + "'");
    mpz_class num(digits.empty() ? "0" : digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, token.size() - dot - 1);
    value = mpq_class(num, den);
  } else {
    value = mpq_class(mpz_class(token, 10));
  }
  if (pos < text.size() && text[pos] == '/' && pos + 1 < text.size() &&
      std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
    ++pos;
    std::size_t ds = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    mpz_class den(std::string(text.substr(ds, pos - ds)), 10);
    if (den == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
    value /= den;
  }
  value.canonicalize();
  return value;
}

bool consume(std::string_view text, std::size_t& pos, std::string_view word) {
  if (text.substr(pos, word.size()) == word) {
    pos += word.size();
    return true;
  }
  return false;
}

}  // namespace

QSqrt3 QSqrt3::from_double(double value) {
  if (!std::isfinite(value)) throw InvalidInput("non-finite coordinate");
  return {mpq_class(value), mpq_class(0)};
}

QSqrt3 QSqrt3::parse(std::string_view raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  if (text.empty()) throw InvalidInput("empty number");
  mpq_class a(0), b(0);
  std::size_t pos = 0;
  while (pos < text.size()) {
    int sign = 1;
    if (text[pos] == '+' || text[pos] == '-') {
      sign = text[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (pos != 0) {
      throw InvalidInput("malformed number '" + text + "'");
    }
    mpq_class coeff(1);
    bool has_coeff = false;
    if (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
      coeff = parse_rational(text, pos);
      has_coeff = true;
    }
    bool irrational = false;
    if (has_coeff && pos < text.size() && text[pos] == '*') {
      ++pos;
      if (!consume(text, pos, "sqrt3")) throw InvalidInput("expected sqrt3 in '" + text + "'");
      irrational = true;
    } else if (consume(text, pos, "sqrt3")) {
      irrational = true;
    } else if (!has_coeff) {
      throw InvalidInput("malformed number '" + text + "'");
    }
    if (irrational && pos < text.size() && text[pos] == '/') {
      ++pos;
      mpq_class den = parse_rational(text, pos);
      if (den == 0) throw InvalidInput("zero denominator in '" + text + "'");
      coeff /= den;
    }
    (irrational ? b : a) += sign * coeff;
  }
  return {a, b};
}

int QSqrt3::sign() const {
  const int sa = sgn(a_);
  const int sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: compare a^2 against 3 b^2 (never equal for nonzero rationals).
  mpq_class a2 = a_ * a_;
  mpq_class b2 = 3 * b_ * b_;
  return a2 > b2 ? sa : sb;
}

double QSqrt3::to_double() const { return a_.get_d() + b_.get_d() * kSqrt3; }

std::string QSqrt3::str() const {
  std::ostringstream out;
  if (sgn(b_) == 0) {
    out << a_.get_str();
  } else if (sgn(a_) == 0) {
    out << b_.get_str() << "*sqrt3";
  } else {
    out << a_.get_str() << (sgn(b_) > 0 ? "+" : "-") << mpq_class(abs(b_)).get_str() << "*sqrt3";
  }
  return out.str();
}

QSqrt3& QSqrt3::operator+=(const QSqrt3& o) {
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

QSqrt3& QSqrt3::operator-=(const QSqrt3& o) {
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

QSqrt3& QSqrt3::operator*=(const QSqrt3& o) {
  mpq_class a = a_ * o.a_ + 3 * b_ * o.b_;
  mpq_class b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  return *this;
}

QSqrt3& QSqrt3::operator/=(const QSqrt3& o) {
  mpq_class norm = o.a_ * o.a_ - 3 * o.b_ * o.b_;
  if (sgn(norm) == 0) throw std::domain_error("QSqrt3 division by zero");
  mpq_class a = (a_ * o.a_ - 3 * b_ * o.b_) / norm;
  mpq_class b = (b_ * o.a_ - a_ * o.b_) / norm;
  a_ = std::move(a);
  b_ = std::move(b);
  return *this;
}

}  // namespace calnet
