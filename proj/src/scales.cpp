#include "disco/scales.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace disco {

namespace {

long long checked_mul(long long a, long long b) {
  long long out;
  if (__builtin_mul_overflow(a, b, &out))
    throw std::invalid_argument("scale grammar: rational overflow");
  return out;
}

void reduce(long long* num, long long* den) {
  if (*den == 0) throw std::invalid_argument("scale grammar: zero denominator");
  if (*den < 0) {
    *num = -*num;
    *den = -*den;
  }
  const long long g = std::gcd(std::llabs(*num), *den);
  if (g > 1) {
    *num /= g;
    *den /= g;
  }
}

long long ipow(long long b, long long e) {
  long long out = 1;
  for (long long i = 0; i < e; ++i) out = checked_mul(out, b);
  return out;
}

// Folds integral radical powers into the rational part, reduces exponents and
// keeps the remaining exponent in (0, 1) so equal values compare equal.
void normalize(ScaleToken* t) {
  if (t->base <= 1 || t->pow_num == 0) {
    t->base = 1;
    t->pow_num = 0;
    t->pow_den = 1;
    reduce(&t->num, &t->den);
    return;
  }
  reduce(&t->pow_num, &t->pow_den);
  while (t->pow_num >= t->pow_den) {  // peel off whole powers of the base
    t->num = checked_mul(t->num, t->base);
    t->pow_num -= t->pow_den;
  }
  while (t->pow_num < 0) {
    t->den = checked_mul(t->den, t->base);
    t->pow_num += t->pow_den;
  }
  if (t->pow_num != 0) {
    // collapse perfect powers, e.g. 4^(1/2) -> 2
    const long long target = ipow(t->base, t->pow_num);
    const auto root = static_cast<long long>(
        std::llround(std::pow(static_cast<double>(target), 1.0 / t->pow_den)));
    for (long long r = std::max<long long>(root - 1, 1); r <= root + 1; ++r) {
      if (ipow(r, t->pow_den) == target) {
        t->num = checked_mul(t->num, r);
        t->pow_num = 0;
        break;
      }
    }
  }
  if (t->pow_num == 0) {
    t->base = 1;
    t->pow_den = 1;
  }
  reduce(&t->num, &t->den);
}

bool is_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

long long parse_int(const std::string& s) {
  if (!is_digits(s)) throw std::invalid_argument("scale grammar: expected integer in '" + s + "'");
  return std::stoll(s);
}

}  // namespace

double ScaleToken::value() const {
  double v = static_cast<double>(num) / den;
  if (base > 1 && pow_num != 0)
    v *= std::pow(static_cast<double>(base), static_cast<double>(pow_num) / pow_den);
  return v;
}

std::string ScaleToken::str() const {
  std::ostringstream out;
  if (base == 1 || pow_num == 0) {
    out << num;
    if (den != 1) out << "/" << den;
    return out.str();
  }
  if (num != 1 || den != 1) {
    out << num;
    if (den != 1) out << "/" << den;
    out << "*";
  }
  if (pow_num == 1 && pow_den == 2) {
    out << "sqrt" << base;
  } else {
    out << base << "^" << pow_num << "/" << pow_den;
  }
  return out.str();
}

bool ScaleToken::operator==(const ScaleToken& other) const {
  return num == other.num && den == other.den && base == other.base &&
         pow_num == other.pow_num && pow_den == other.pow_den;
}

ScaleToken ScaleToken::from_integer(long long v) {
  if (v <= 0) throw std::invalid_argument("scale grammar: scales must be positive");
  ScaleToken t;
  t.num = v;
  return t;
}

ScaleToken ScaleToken::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("scale grammar: empty token");
  ScaleToken t;
  const auto sqrt_pos = text.find("sqrt");
  const auto caret_pos = text.find('^');
  if (sqrt_pos != std::string::npos) {
    // [INT]sqrtINT
    if (sqrt_pos > 0) t.num = parse_int(text.substr(0, sqrt_pos));
    t.base = parse_int(text.substr(sqrt_pos + 4));
    t.pow_num = 1;
    t.pow_den = 2;
  } else if (caret_pos != std::string::npos) {
    // BASE^P/Q
    t.base = parse_int(text.substr(0, caret_pos));
    const std::string exp = text.substr(caret_pos + 1);
    const auto slash = exp.find('/');
    if (slash == std::string::npos) {
      t.pow_num = parse_int(exp);
      t.pow_den = 1;
    } else {
      t.pow_num = parse_int(exp.substr(0, slash));
      t.pow_den = parse_int(exp.substr(slash + 1));
    }
  } else if (text.find('.') != std::string::npos) {
    // decimal literal -> exact rational over a power of ten
    const auto dot = text.find('.');
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (!frac.empty() && !is_digits(frac))
      throw std::invalid_argument("scale grammar: bad decimal '" + text + "'");
    long long den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den = checked_mul(den, 10);
    t.num = (whole.empty() ? 0 : parse_int(whole)) * den + (frac.empty() ? 0 : parse_int(frac));
    t.den = den;
  } else {
    t.num = parse_int(text);
  }
  normalize(&t);
  if (t.value() <= 0.0) throw std::invalid_argument("scale grammar: scales must be positive");
  return t;
}

ScaleToken token_ratio(const ScaleToken& a, const ScaleToken& b) {
  ScaleToken r;
  r.num = checked_mul(a.num, b.den);
  r.den = checked_mul(a.den, b.num);
  if (a.base == b.base || a.pow_num == 0 || b.pow_num == 0) {
    r.base = a.pow_num != 0 ? a.base : b.base;
    if (a.base == b.base && a.pow_num != 0 && b.pow_num != 0) {
      r.pow_den = checked_mul(a.pow_den, b.pow_den);
      r.pow_num = checked_mul(a.pow_num, b.pow_den) - checked_mul(b.pow_num, a.pow_den);
    } else if (a.pow_num != 0) {
      r.pow_num = a.pow_num;
      r.pow_den = a.pow_den;
    } else {
      r.pow_num = -b.pow_num;
      r.pow_den = b.pow_den;
    }
  } else {
    throw std::invalid_argument("scale grammar: mixed radical bases are not supported");
  }
  normalize(&r);
  return r;
}

ScaleToken token_square(const ScaleToken& t) {
  ScaleToken unit = ScaleToken::from_integer(1);
  return token_ratio(t, token_ratio(unit, t));  // t / (1 / t)
}

std::optional<long long> token_integer(const ScaleToken& t) {
  if (t.base != 1 && t.pow_num != 0) return std::nullopt;
  if (t.num % t.den != 0) return std::nullopt;
  return t.num / t.den;
}

int make_odd(double x) {
  auto n = static_cast<int>(std::lround(x));
  if (n < 1) n = 1;
  return n % 2 == 0 ? n + 1 : n;
}

std::optional<int> ScaleSet::smallest_non_integer() const {
  for (int k = 0; k < count(); ++k)
    if (!entries[k].integer_ratio) return k;
  return std::nullopt;
}

ScaleSet make_scale_set(const std::vector<ScaleToken>& tokens, int smallest_kernel_size) {
  if (tokens.empty()) throw std::invalid_argument("scale set: at least one scale required");
  if (smallest_kernel_size < 1 || smallest_kernel_size % 2 == 0)
    throw std::invalid_argument("scale set: smallest kernel size must be odd and positive");

  ScaleSet set;
  set.smallest_kernel_size = smallest_kernel_size;
  for (const auto& t : tokens) {
    ScaleEntry e;
    e.token = t;
    e.value = t.value();
    set.entries.push_back(e);
  }
  for (size_t k = 1; k < set.entries.size(); ++k) {
    if (!(set.entries[k].value > set.entries[k - 1].value))
      throw std::invalid_argument("scale set: scales must be strictly increasing");
  }

  // constant geometric step
  if (set.entries.size() >= 2) {
    const ScaleToken step = token_ratio(set.entries[1].token, set.entries[0].token);
    for (size_t k = 2; k < set.entries.size(); ++k) {
      const ScaleToken r = token_ratio(set.entries[k].token, set.entries[k - 1].token);
      if (!(r == step))
        throw std::invalid_argument("scale set: scale step must be constant");
    }
    set.step = step.value();
    set.step_squared = token_square(step).value();
    set.step_token = step.str();
  } else {
    set.step = 1.0;
    set.step_squared = 1.0;
    set.step_token = "1";
  }

  const int w = smallest_kernel_size;
  for (auto& e : set.entries) {
    const ScaleToken r = token_ratio(e.token, set.entries[0].token);
    if (auto i = token_integer(r)) {
      e.integer_ratio = true;
      e.ratio_to_smallest = *i;
      e.kernel_size = static_cast<int>((w - 1) * *i + 1);
    }
  }
  // Non-integer scales: the smallest one sizes by rounding; later ones chain
  // by dilation from it whenever the ratio between them is an integer.
  std::optional<size_t> anchor;
  for (size_t k = 0; k < set.entries.size(); ++k) {
    auto& e = set.entries[k];
    if (e.integer_ratio) continue;
    const double ratio = e.value / set.entries[0].value;
    if (!anchor) {
      anchor = k;
      e.kernel_size = make_odd(w * ratio);
      continue;
    }
    const ScaleToken ra = token_ratio(e.token, set.entries[*anchor].token);
    if (auto m = token_integer(ra)) {
      e.kernel_size = static_cast<int>((set.entries[*anchor].kernel_size - 1) * *m + 1);
    } else {
      e.kernel_size = make_odd(w * ratio);
    }
  }
  for (size_t k = 1; k < set.entries.size(); ++k) {
    if (set.entries[k].kernel_size < set.entries[k - 1].kernel_size)
      set.entries[k].kernel_size = set.entries[k - 1].kernel_size;
  }
  return set;
}

ScaleSet make_scale_set(const std::string& grammar, int smallest_kernel_size) {
  std::vector<ScaleToken> tokens;
  std::string item;
  std::istringstream in(grammar);
  while (std::getline(in, item, ',')) {
    // trim spaces
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("scale grammar: empty token");
    tokens.push_back(ScaleToken::parse(item.substr(b, e - b + 1)));
  }
  return make_scale_set(tokens, smallest_kernel_size);
}

}  // namespace disco
