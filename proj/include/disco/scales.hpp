#pragma once

#include <optional>
#include <string>
#include <vector>

namespace disco {

/// Exact scale value (num/den) * base^(pow_num/pow_den). Integer-ratio flags
/// are decided on this symbolic form, never by floating comparison.
/// Accepted grammar: "2", "1.5", "sqrt2", "2sqrt2", "2^1/3".
struct ScaleToken {
  long long num = 1;
  long long den = 1;
  long long base = 1;  // radical base; 1 means no radical part
  long long pow_num = 0;
  long long pow_den = 1;

  double value() const;
  std::string str() const;
  bool operator==(const ScaleToken& other) const;

  static ScaleToken parse(const std::string& text);
  static ScaleToken from_integer(long long v);
};

/// a / b, exact. Throws if the radical bases are incompatible.
ScaleToken token_ratio(const ScaleToken& a, const ScaleToken& b);

/// t * t, exact (sqrt2 squares to the integer 2).
ScaleToken token_square(const ScaleToken& t);

/// Integer value of the token if it is one.
std::optional<long long> token_integer(const ScaleToken& t);

struct ScaleEntry {
  ScaleToken token;
  double value = 1.0;
  bool integer_ratio = false;      // s_k / s_0 is an integer
  long long ratio_to_smallest = 0; // that integer when integer_ratio
  int kernel_size = 1;             // odd
};

/// Geometric scale set s_0 * a^k with per-scale kernel sizes. Integer-ratio
/// scales size as dilations of the smallest kernel; non-integer scales round
/// smallest_kernel_size * ratio up to odd (or chain by dilation from the
/// smallest non-integer scale when the ratio to it is an integer).
struct ScaleSet {
  std::vector<ScaleEntry> entries;
  double step = 1.0;
  double step_squared = 1.0;  // from the symbolic step, exact for sqrt2
  std::string step_token;
  int smallest_kernel_size = 1;

  int count() const { return static_cast<int>(entries.size()); }
  double value(int k) const { return entries[k].value; }
  int kernel_size(int k) const { return entries[k].kernel_size; }
  /// Index of the smallest non-integer-ratio scale, if any.
  std::optional<int> smallest_non_integer() const;
};

ScaleSet make_scale_set(const std::vector<ScaleToken>& tokens, int smallest_kernel_size);

/// Parses a comma-separated scale list, e.g. "1,sqrt2,2,2sqrt2".
ScaleSet make_scale_set(const std::string& grammar, int smallest_kernel_size);

int make_odd(double x);

}  // namespace disco
