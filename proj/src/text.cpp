#include "hpmine/text.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace hpmine::text {

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n' || s[i] == '\r') {
      out.emplace_back(s.substr(start, i - start));
      if (s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
      start = i + 1;
    }
  }
  out.emplace_back(s.substr(start));
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

static bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim_left(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

std::string_view trim_right(std::string_view s) {
  std::size_t n = s.size();
  while (n > 0 && is_space(s[n - 1])) --n;
  return s.substr(0, n);
}

std::string_view trim(std::string_view s) { return trim_right(trim_left(s)); }

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

std::string expand_tabs(std::string_view line, int width) {
  std::string out;
  out.reserve(line.size());
  for (char c : line) {
    if (c == '\t') {
      std::size_t pad = static_cast<std::size_t>(width) - out.size() % static_cast<std::size_t>(width);
      out.append(pad, ' ');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::size_t indent_of(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && line[i] == ' ') ++i;
  return i;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

std::vector<std::string> dedent(const std::vector<std::string>& lines) {
  std::size_t common = std::numeric_limits<std::size_t>::max();
  for (const auto& l : lines) {
    if (is_blank(l)) continue;
    common = std::min(common, indent_of(l));
  }
  std::vector<std::string> out;
  out.reserve(lines.size());
  for (const auto& l : lines) {
    if (is_blank(l)) {
      out.emplace_back();
    } else {
      out.push_back(l.substr(common));
    }
  }
  return out;
}

std::string cleandoc(std::string_view doc, int tab_width) {
  auto lines = split_lines(doc);
  for (auto& l : lines) l = expand_tabs(l, tab_width);
  std::size_t margin = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    margin = std::min(margin, indent_of(lines[i]));
  }
  if (!lines.empty()) lines[0] = std::string(trim_left(lines[0]));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (is_blank(lines[i])) {
      lines[i].clear();
    } else if (margin != std::numeric_limits<std::size_t>::max()) {
      lines[i] = lines[i].substr(margin);
    }
    lines[i] = std::string(trim_right(lines[i]));
  }
  lines[0] = std::string(trim_right(lines[0]));
  while (!lines.empty() && lines.front().empty()) lines.erase(lines.begin());
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return join(lines, "\n");
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s[0]);
  if (!(std::isalpha(head) || head == '_' || head >= 0x80)) return false;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || u == '_' || u >= 0x80)) return false;
  }
  return true;
}

std::string sanitize_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (ok) {
      static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
      if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) ok = false;
    }
    if (ok) {
      out.append(s.substr(i, len));
      i += len;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace hpmine::text
