#include "amalgact/rational.hpp"

#include <charconv>

#include "amalgact/error.hpp"

namespace amalgact {

namespace {

std::int64_t parse_integer(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc{} || ptr != last) {
    throw Error("not a rational of the form p/q: '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
  auto num = parse_integer(text.substr(0, slash), text);
  auto den = parse_integer(text.substr(slash + 1), text);
  if (den == 0) throw Error("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace amalgact
