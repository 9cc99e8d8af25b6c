#include "hpmine/literal.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <limits>
#include <regex>

#include "hpmine/text.hpp"

namespace hpmine {

Literal Literal::integer(std::int64_t v, std::string raw) {
  if (raw.empty()) raw = std::to_string(v);
  return Literal{Kind::Number, v, std::move(raw)};
}

Literal Literal::real(double v, std::string raw) {
  Literal lit{Kind::Number, v, std::move(raw)};
  if (lit.raw.empty()) lit.raw = render_python(lit);
  return lit;
}

Literal Literal::string(std::string v, std::string raw) {
  Literal lit{Kind::String, std::move(v), std::move(raw)};
  if (lit.raw.empty()) lit.raw = render_python(lit);
  return lit;
}

Literal Literal::boolean(bool v, std::string raw) {
  if (raw.empty()) raw = v ? "True" : "False";
  return Literal{Kind::Boolean, v, std::move(raw)};
}

Literal Literal::none(std::string raw) { return Literal{Kind::None, std::monostate{}, std::move(raw)}; }

Literal Literal::other(std::string raw) { return Literal{Kind::Other, std::monostate{}, std::move(raw)}; }

double Literal::as_double() const {
  if (auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
  if (auto* d = std::get_if<double>(&value)) return *d;
  return std::numeric_limits<double>::quiet_NaN();
}

bool Literal::is_representable() const {
  if (kind == Kind::Other) return false;
  if (auto* d = std::get_if<double>(&value)) return std::isfinite(*d);
  return true;
}

namespace {

std::optional<double> non_finite_spelling(std::string_view t) {
  std::string s;
  for (char c : t) {
    if (c != ' ') s.push_back(c);
  }
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.erase(0, 1);
  }
  static const std::regex kNan(R"((np|numpy|math)\.(nan|NaN|NAN)|float\(['"](nan|NaN)['"]\))");
  static const std::regex kInf(R"((np|numpy|math)\.(inf|Inf|infty)|float\(['"](inf|Inf|infinity)['"]\))");
  if (std::regex_match(s, kNan)) return std::numeric_limits<double>::quiet_NaN();
  if (std::regex_match(s, kInf)) {
    double inf = std::numeric_limits<double>::infinity();
    return neg ? -inf : inf;
  }
  return std::nullopt;
}

std::optional<Literal> decode_number(std::string_view t) {
  static const std::regex kInt(R"([+-]?[0-9][0-9_]*)");
  static const std::regex kRadix(R"([+-]?0([xX][0-9a-fA-F_]+|[oO][0-7_]+|[bB][01_]+))");
  static const std::regex kFloat(
      R"([+-]?(([0-9][0-9_]*)?\.[0-9][0-9_]*([eE][+-]?[0-9]+)?|[0-9][0-9_]*\.?([eE][+-]?[0-9]+)?))");
  std::string s(t);
  std::string digits;
  for (char c : s) {
    if (c != '_') digits.push_back(c);
  }
  if (std::regex_match(s, kInt)) {
    std::int64_t v = 0;
    const char* b = digits.data();
    const char* e = digits.data() + digits.size();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec == std::errc() && ptr == e) return Literal::integer(v, s);
    return std::nullopt;
  }
  if (std::regex_match(s, kRadix)) {
    bool neg = digits[0] == '-';
    std::size_t off = (digits[0] == '-' || digits[0] == '+') ? 1 : 0;
    char kind = static_cast<char>(std::tolower(static_cast<unsigned char>(digits[off + 1])));
    int base = kind == 'x' ? 16 : kind == 'o' ? 8 : 2;
    std::int64_t v = 0;
    const char* b = digits.data() + off + 2;
    const char* e = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(b, e, v, base);
    if (ec == std::errc() && ptr == e) return Literal::integer(neg ? -v : v, s);
    return std::nullopt;
  }
  if (std::regex_match(s, kFloat)) {
    double v = 0;
    const char* b = digits.data();
    const char* e = digits.data() + digits.size();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec == std::errc() && ptr == e) return Literal::real(v, s);
  }
  return std::nullopt;
}

bool decode_escapes(std::string_view body, std::string& out) {
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c != '\\' || i + 1 >= body.size()) {
      out.push_back(c);
      continue;
    }
    char n = body[++i];
    switch (n) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case '0': out.push_back('\0'); break;
      case '\\': out.push_back('\\'); break;
      case '\'': out.push_back('\''); break;
      case '"': out.push_back('"'); break;
      case '\n': break;
      default:
        out.push_back('\\');
        out.push_back(n);
    }
  }
  return true;
}

std::optional<Literal> decode_string(std::string_view t) {
  std::size_t p = 0;
  std::string prefix;
  while (p < t.size() && p < 3 && std::isalpha(static_cast<unsigned char>(t[p]))) {
    prefix.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(t[p]))));
    ++p;
  }
  if (p >= t.size() || (t[p] != '\'' && t[p] != '"')) return std::nullopt;
  for (char c : prefix) {
    if (c != 'r' && c != 'u' && c != 'b' && c != 'f') return std::nullopt;
  }
  char q = t[p];
  bool triple = t.size() >= p + 6 && t[p + 1] == q && t[p + 2] == q;
  std::size_t open = triple ? 3 : 1;
  if (t.size() < p + 2 * open) return std::nullopt;
  std::string_view body = t.substr(p + open, t.size() - p - 2 * open);
  std::string_view close = t.substr(t.size() - open);
  for (char c : close) {
    if (c != q) return std::nullopt;
  }
  bool raw = prefix.find('r') != std::string::npos;
  // The body must not contain an unescaped closing delimiter; otherwise this
  // is an implicit concatenation or an expression such as 'a' + 'b'.
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\\') {
      ++i;
      continue;
    }
    if (!triple && body[i] == q) return std::nullopt;
    if (triple && body.substr(i, 3) == std::string(3, q)) return std::nullopt;
  }
  if (!body.empty() && body.back() == '\\') {
    std::size_t n = 0;
    for (auto it = body.rbegin(); it != body.rend() && *it == '\\'; ++it) ++n;
    if (n % 2 == 1) return std::nullopt;
  }
  if (prefix.find('b') != std::string::npos || prefix.find('f') != std::string::npos) {
    return Literal::other(std::string(t));
  }
  std::string value;
  if (raw) {
    value = std::string(body);
  } else {
    decode_escapes(body, value);
  }
  return Literal::string(std::move(value), std::string(t));
}

}  // namespace

Literal decode_python_literal(std::string_view text) {
  auto t = text::trim(text);
  if (t.empty()) return Literal::other(std::string(t));
  if (t == "None") return Literal::none();
  if (t == "True") return Literal::boolean(true);
  if (t == "False") return Literal::boolean(false);
  if (auto nf = non_finite_spelling(t)) return Literal::real(*nf, std::string(t));
  if (auto n = decode_number(t)) return *n;
  if (auto s = decode_string(t)) return *s;
  return Literal::other(std::string(t));
}

static std::string render_double(double d) {
  if (std::isnan(d)) return "float('nan')";
  if (std::isinf(d)) return d > 0 ? "float('inf')" : "-float('inf')";
  // Python repr: shortest round-trip digits, exponent form only outside
  // 1e-4 <= |d| < 1e16
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::scientific);
  std::string sci(buf, ptr);
  auto epos = sci.find('e');
  int exp = std::stoi(sci.substr(epos + 1));
  std::string mant = sci.substr(0, epos);
  bool neg = mant[0] == '-';
  if (neg) mant.erase(0, 1);
  std::string digits;
  for (char c : mant) {
    if (c != '.') digits.push_back(c);
  }
  std::string out;
  if (exp < -4 || exp >= 16) {
    out = digits.substr(0, 1);
    if (digits.size() > 1) out += "." + digits.substr(1);
    char e[16];
    std::snprintf(e, sizeof e, "e%c%02d", exp < 0 ? '-' : '+', exp < 0 ? -exp : exp);
    out += e;
  } else if (exp < 0) {
    out = "0." + std::string(static_cast<std::size_t>(-exp - 1), '0') + digits;
  } else {
    auto whole = static_cast<std::size_t>(exp + 1);
    if (digits.size() <= whole) {
      out = digits + std::string(whole - digits.size(), '0') + ".0";
    } else {
      out = digits.substr(0, whole) + "." + digits.substr(whole);
    }
  }
  return neg ? "-" + out : out;
}

std::string render_python(const Literal& lit) {
  switch (lit.kind) {
    case Literal::Kind::None: return "None";
    case Literal::Kind::Boolean: return std::get<bool>(lit.value) ? "True" : "False";
    case Literal::Kind::Number:
      if (lit.is_integer()) return std::to_string(std::get<std::int64_t>(lit.value));
      return render_double(std::get<double>(lit.value));
    case Literal::Kind::String: {
      std::string out = "'";
      for (char c : lit.as_string()) {
        switch (c) {
          case '\\': out += "\\\\"; break;
          case '\'': out += "\\'"; break;
          case '\n': out += "\\n"; break;
          case '\t': out += "\\t"; break;
          case '\r': out += "\\r"; break;
          case '\0': out += "\\0"; break;
          default: out.push_back(c);
        }
      }
      return out + "'";
    }
    case Literal::Kind::Other: return lit.raw;
  }
  return lit.raw;
}

std::optional<Json> to_json(const Literal& lit) {
  if (!lit.is_representable()) return std::nullopt;
  switch (lit.kind) {
    case Literal::Kind::None: return Json(nullptr);
    case Literal::Kind::Boolean: return Json(std::get<bool>(lit.value));
    case Literal::Kind::Number:
      if (lit.is_integer()) return Json(std::get<std::int64_t>(lit.value));
      return Json(std::get<double>(lit.value));
    case Literal::Kind::String: return Json(text::sanitize_utf8(lit.as_string()));
    case Literal::Kind::Other: break;
  }
  return std::nullopt;
}

Literal literal_from_json(const Json& j) {
  if (j.is_null()) return Literal::none();
  if (j.is_boolean()) return Literal::boolean(j.get<bool>());
  if (j.is_number_integer()) return Literal::integer(j.get<std::int64_t>());
  if (j.is_number_unsigned()) {
    auto u = j.get<std::uint64_t>();
    if (u <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      return Literal::integer(static_cast<std::int64_t>(u));
    return Literal::real(static_cast<double>(u));
  }
  if (j.is_number_float()) return Literal::real(j.get<double>());
  if (j.is_string()) return Literal::string(j.get<std::string>());
  if (j.is_object() && j.size() == 1 && j.contains("__float__") && j["__float__"].is_string()) {
    auto s = j["__float__"].get<std::string>();
    if (s == "nan") return Literal::real(std::numeric_limits<double>::quiet_NaN(), "float('nan')");
    if (s == "inf") return Literal::real(std::numeric_limits<double>::infinity(), "float('inf')");
    if (s == "-inf") return Literal::real(-std::numeric_limits<double>::infinity(), "-float('inf')");
  }
  return Literal::other(j.dump());
}

}  // namespace hpmine
