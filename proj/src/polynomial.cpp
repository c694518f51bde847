#include "linkfold/polynomial.hpp"

#include <charconv>
#include <cstdio>
#include <numeric>

namespace linkfold {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::InvalidLink: return "InvalidLink";
    case ErrorKind::NotOnLink: return "NotOnLink";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DimensionCollapse: return "DimensionCollapse";
    case ErrorKind::WrongDimension: return "WrongDimension";
    case ErrorKind::EmptyResult: return "EmptyResult";
    case ErrorKind::BifurcationSuspected: return "BifurcationSuspected";
    case ErrorKind::StepCollapse: return "StepCollapse";
    case ErrorKind::RankZero: return "RankZero";
    case ErrorKind::RankTwo: return "RankTwo";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Error";
}

namespace {

int total_degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

void check_dims(const ComplexPoly& p, const PointC& z) {
  if (z.size() != p.n_vars()) {
    throw Error(ErrorKind::DimensionMismatch,
                "point has " + std::to_string(z.size()) + " coordinates, polynomial has " +
                    std::to_string(p.n_vars()) + " variables");
  }
  if (!all_finite(z)) throw Error(ErrorKind::NonFinite, "point has non-finite coordinates");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Coefficient text and whether it was emitted with a leading minus that the
// caller may turn into a binary minus.
std::pair<std::string, bool> format_coefficient(Complex c) {
  if (c.imag() == 0.0) {
    if (c.real() < 0) return {format_double(-c.real()), true};
    return {format_double(c.real()), false};
  }
  if (c.real() == 0.0) {
    if (c.imag() < 0) return {format_double(-c.imag()) + "i", true};
    return {format_double(c.imag()) + "i", false};
  }
  std::string s = "(" + format_double(c.real());
  s += c.imag() < 0 ? "-" : "+";
  s += format_double(std::abs(c.imag())) + "i)";
  return {s, false};
}

class Parser {
 public:
  Parser(std::string_view text, int n_vars) : text_(text), n_vars_(n_vars) {}

  ComplexPoly parse() {
    ComplexPoly result = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return result;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ComplexPoly expr() {
    ComplexPoly acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  ComplexPoly term() {
    ComplexPoly acc = unary();
    while (accept('*')) acc = acc * unary();
    return acc;
  }

  ComplexPoly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  ComplexPoly power() {
    ComplexPoly base = atom();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected non-negative integer exponent");
      int e = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, e);
      if (ec != std::errc() || e > 256) {
        pos_ = start;
        fail("exponent out of range");
      }
      return base.pow(e);
    }
    return base;
  }

  ComplexPoly atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ComplexPoly inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (c == 'z') {
      std::size_t start = pos_++;
      std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (digits == pos_) fail("expected variable index after 'z'");
      int index = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, index);
      if (ec != std::errc() || index < 1 || index > n_vars_) {
        throw Error(ErrorKind::IndexOutOfRange,
                    "variable '" + std::string(text_.substr(start, pos_ - start)) +
                        "' out of range 1.." + std::to_string(n_vars_) + " at position " +
                        std::to_string(start));
      }
      return ComplexPoly::variable(n_vars_, index - 1);
    }
    if (c == 'i') {
      ++pos_;
      return ComplexPoly::constant(n_vars_, Complex(0.0, 1.0));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  ComplexPoly number() {
    std::size_t start = pos_;
    auto is_digit = [&](std::size_t k) {
      return k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]));
    };
    while (is_digit(pos_)) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (is_digit(pos_)) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
      if (is_digit(k)) {
        pos_ = k;
        while (is_digit(pos_)) ++pos_;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(value)) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && text_[pos_] == 'i') {
      ++pos_;
      return ComplexPoly::constant(n_vars_, Complex(0.0, value));
    }
    return ComplexPoly::constant(n_vars_, Complex(value, 0.0));
  }

  std::string_view text_;
  int n_vars_;
  std::size_t pos_ = 0;
};

}  // namespace

bool GradedLex::operator()(const Exponents& a, const Exponents& b) const {
  int da = total_degree(a);
  int db = total_degree(b);
  if (da != db) return da < db;
  return a < b;
}

ComplexPoly::ComplexPoly(int n_vars) : n_vars_(n_vars) {
  if (n_vars < 1) throw Error(ErrorKind::DimensionMismatch, "polynomial needs at least one variable");
}

ComplexPoly ComplexPoly::constant(int n_vars, Complex c) {
  ComplexPoly p(n_vars);
  p.add_term(Exponents(n_vars, 0), c);
  return p;
}

ComplexPoly ComplexPoly::variable(int n_vars, int index) {
  if (index < 0 || index >= n_vars) {
    throw Error(ErrorKind::IndexOutOfRange, "variable index " + std::to_string(index));
  }
  ComplexPoly p(n_vars);
  Exponents e(n_vars, 0);
  e[index] = 1;
  p.add_term(e, 1.0);
  return p;
}

void ComplexPoly::add_term(const Exponents& exps, Complex c) {
  if (static_cast<int>(exps.size()) != n_vars_) {
    throw Error(ErrorKind::DimensionMismatch, "exponent vector length");
  }
  for (int e : exps) {
    if (e < 0) throw Error(ErrorKind::IndexOutOfRange, "negative exponent");
  }
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
    throw Error(ErrorKind::NonFinite, "non-finite coefficient");
  }
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(exps, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Complex ComplexPoly::coefficient(const Exponents& exps) const {
  auto it = terms_.find(exps);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

ComplexPoly ComplexPoly::operator-() const {
  ComplexPoly out = *this;
  for (auto& [e, c] : out.terms_) c = -c;
  return out;
}

ComplexPoly& ComplexPoly::operator+=(const ComplexPoly& other) {
  if (other.n_vars_ != n_vars_) throw Error(ErrorKind::DimensionMismatch, "adding polynomials");
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

ComplexPoly& ComplexPoly::operator-=(const ComplexPoly& other) {
  if (other.n_vars_ != n_vars_) throw Error(ErrorKind::DimensionMismatch, "subtracting polynomials");
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

ComplexPoly& ComplexPoly::operator*=(Complex c) {
  if (c == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    it = it->second == 0.0 ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b) {
  if (a.n_vars_ != b.n_vars_) throw Error(ErrorKind::DimensionMismatch, "multiplying polynomials");
  ComplexPoly out(a.n_vars_);
  Exponents e(a.n_vars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (int j = 0; j < a.n_vars_; ++j) e[j] = ea[j] + eb[j];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

ComplexPoly ComplexPoly::pow(int exponent) const {
  if (exponent < 0) throw Error(ErrorKind::IndexOutOfRange, "negative power");
  ComplexPoly result = constant(n_vars_, 1.0);
  ComplexPoly base = *this;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

std::string ComplexPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [exps, c] = *it;
    bool is_const = total_degree(exps) == 0;
    auto [coef, negative] = format_coefficient(c);
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;

    std::string monomial;
    for (int j = 0; j < n_vars_; ++j) {
      if (exps[j] == 0) continue;
      if (!monomial.empty()) monomial += "*";
      monomial += "z" + std::to_string(j + 1);
      if (exps[j] > 1) monomial += "^" + std::to_string(exps[j]);
    }
    if (is_const) {
      out += coef;
    } else if (coef == "1") {
      out += monomial;
    } else {
      out += coef + "*" + monomial;
    }
  }
  return out;
}

ComplexPoly parse_poly(std::string_view text, int n_vars) {
  if (n_vars < 1) throw Error(ErrorKind::DimensionMismatch, "n_vars must be positive");
  return Parser(text, n_vars).parse();
}

Complex eval(const ComplexPoly& p, const PointC& z) {
  check_dims(p, z);
  int max_deg = 0;
  for (const auto& [e, c] : p.terms()) {
    for (int k : e) max_deg = std::max(max_deg, k);
  }
  const int n = p.n_vars();
  std::vector<Complex> powers(static_cast<std::size_t>(n) * (max_deg + 1));
  for (int j = 0; j < n; ++j) {
    Complex acc = 1.0;
    for (int k = 0; k <= max_deg; ++k) {
      powers[j * (max_deg + 1) + k] = acc;
      acc *= z[j];
    }
  }
  Complex sum = 0.0;
  for (const auto& [e, c] : p.terms()) {
    Complex term = c;
    for (int j = 0; j < n; ++j) {
      if (e[j] != 0) term *= powers[j * (max_deg + 1) + e[j]];
    }
    sum += term;
  }
  return sum;
}

ComplexPoly wirtinger_partial(const ComplexPoly& p, int index) {
  if (index < 0 || index >= p.n_vars()) {
    throw Error(ErrorKind::IndexOutOfRange,
                "partial index " + std::to_string(index) + " for " + std::to_string(p.n_vars()) +
                    " variables");
  }
  ComplexPoly out(p.n_vars());
  for (const auto& [e, c] : p.terms()) {
    if (e[index] == 0) continue;
    Exponents d = e;
    d[index] -= 1;
    out.add_term(d, c * static_cast<double>(e[index]));
  }
  return out;
}

PointC conj_gradient(const ComplexPoly& p, const PointC& z) {
  check_dims(p, z);
  PointC out(p.n_vars());
  for (int j = 0; j < p.n_vars(); ++j) out[j] = std::conj(eval(wirtinger_partial(p, j), z));
  return out;
}

std::optional<int> homogeneous_degree(const ComplexPoly& p) {
  std::optional<int> degree;
  for (const auto& [e, c] : p.terms()) {
    int d = total_degree(e);
    if (degree && *degree != d) return std::nullopt;
    degree = d;
  }
  // The zero polynomial has no well-defined degree.
  return degree;
}

PolyFunction::PolyFunction(ComplexPoly p) : poly_(std::move(p)) {
  const int n = poly_.n_vars();
  first_.reserve(n);
  for (int j = 0; j < n; ++j) first_.push_back(wirtinger_partial(poly_, j));
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) second_.push_back(wirtinger_partial(first_[j], k));
  }
}

Complex PolyFunction::value(const PointC& z) const { return eval(poly_, z); }

PointC PolyFunction::gradient(const PointC& z) const {
  check_dims(poly_, z);
  PointC out(n_vars());
  for (int j = 0; j < n_vars(); ++j) out[j] = eval(first_[j], z);
  return out;
}

PointC PolyFunction::conj_gradient(const PointC& z) const { return gradient(z).conjugate(); }

Eigen::MatrixXcd PolyFunction::hessian(const PointC& z) const {
  check_dims(poly_, z);
  const int n = n_vars();
  Eigen::MatrixXcd h(n, n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      h(i, j) = eval(second_[k++], z);
      h(j, i) = h(i, j);
    }
  }
  return h;
}

}  // namespace linkfold
