#include "hpmine/source_extractor.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "hpmine/text.hpp"

namespace hpmine {

const CtorParam* ClassDoc::param(std::string_view name) const {
  for (const auto& p : ctor_defaults) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

namespace {

constexpr int kPythonTabWidth = 8;

bool is_ident_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u == '_' || u >= 0x80;
}

bool is_newline(char c) { return c == '\n' || c == '\r'; }

struct StringSpan {
  std::size_t body_begin = 0;  // offsets into the source text
  std::size_t body_end = 0;
  std::size_t code_begin = 0;  // offsets into LogicalLine::code, prefix included
  std::size_t code_end = 0;
};

struct LogicalLine {
  std::size_t line_no = 0;
  std::size_t end_line_no = 0;
  std::size_t indent = 0;
  std::string code;  // comments removed, continuations folded
  std::vector<StringSpan> strings;
};

struct ScanError {
  std::size_t line;
  std::string message;
};

/// Splits Python text into logical lines, tracking brackets, strings,
/// comments and backslash continuations.
class LineScanner {
 public:
  explicit LineScanner(std::string_view text) : text_(text) {}

  void run() {
    std::size_t i = 0;
    std::size_t line_no = 1;
    const std::size_t n = text_.size();
    while (i < n) {
      std::size_t col = 0;
      std::size_t j = i;
      while (j < n && (text_[j] == ' ' || text_[j] == '\t' || text_[j] == '\f')) {
        if (text_[j] == '\t') {
          col = (col / kPythonTabWidth + 1) * kPythonTabWidth;
        } else if (text_[j] == '\f') {
          col = 0;
        } else {
          ++col;
        }
        ++j;
      }
      if (j >= n) break;
      if (is_newline(text_[j])) {
        i = skip_newline(j);
        ++line_no;
        continue;
      }
      if (text_[j] == '#') {
        while (j < n && !is_newline(text_[j])) ++j;
        i = j;
        continue;
      }
      std::vector<ScanError> errs;
      Logical result = scan_logical(j, line_no, /*flat=*/false, errs);
      if (result.unclosed) {
        errors_.push_back({line_no, "unclosed bracket"});
        errs.clear();
        result = scan_logical(j, line_no, /*flat=*/true, errs);
      }
      errors_.insert(errors_.end(), errs.begin(), errs.end());
      result.line.indent = col;
      lines_.push_back(std::move(result.line));
      i = result.next;
      line_no = result.next_line;
    }
  }

  std::vector<LogicalLine>& lines() { return lines_; }
  std::vector<ScanError>& errors() { return errors_; }

 private:
  struct Logical {
    LogicalLine line;
    std::size_t next = 0;
    std::size_t next_line = 0;
    bool unclosed = false;
  };

  std::size_t skip_newline(std::size_t k) const {
    if (text_[k] == '\r' && k + 1 < text_.size() && text_[k + 1] == '\n') return k + 2;
    return k + 1;
  }

  Logical scan_logical(std::size_t start, std::size_t line_no, bool flat, std::vector<ScanError>& errs) {
    Logical out;
    out.line.line_no = line_no;
    const std::size_t n = text_.size();
    std::size_t k = start;
    int depth = 0;
    std::string& code = out.line.code;
    while (k < n) {
      char c = text_[k];
      if (c == '#') {
        while (k < n && !is_newline(text_[k])) ++k;
        continue;
      }
      if (c == '\'' || c == '"') {
        k = scan_string(k, line_no, out.line, errs);
        continue;
      }
      if (c == '\\' && k + 1 < n && is_newline(text_[k + 1])) {
        code.push_back(' ');
        k = skip_newline(k + 1);
        ++line_no;
        continue;
      }
      if (is_newline(c)) {
        if (depth > 0 && !flat) {
          code.push_back('\n');
          k = skip_newline(k);
          ++line_no;
          continue;
        }
        out.line.end_line_no = line_no;
        out.next = skip_newline(k);
        out.next_line = line_no + 1;
        return out;
      }
      if (c == '(' || c == '[' || c == '{') {
        ++depth;
      } else if (c == ')' || c == ']' || c == '}') {
        if (depth == 0) {
          errs.push_back({line_no, "unbalanced closing bracket"});
        } else {
          --depth;
        }
      }
      code.push_back(c);
      ++k;
    }
    if (depth > 0 && !flat) {
      out.unclosed = true;
      return out;
    }
    out.line.end_line_no = line_no;
    out.next = n;
    out.next_line = line_no;
    return out;
  }

  /// Consumes a string literal whose opening quote is at k. Prefix letters
  /// have already been appended to the code buffer.
  std::size_t scan_string(std::size_t k, std::size_t& line_no, LogicalLine& line, std::vector<ScanError>& errs) {
    const std::size_t n = text_.size();
    std::string& code = line.code;
    std::size_t prefix = 0;
    while (prefix < code.size() && prefix < 2) {
      char p = code[code.size() - 1 - prefix];
      if (std::string_view("rRbBuUfF").find(p) == std::string_view::npos) break;
      ++prefix;
    }
    if (prefix > 0 && code.size() > prefix && is_ident_char(code[code.size() - 1 - prefix])) prefix = 0;

    StringSpan span;
    span.code_begin = code.size() - prefix;
    char q = text_[k];
    bool triple = k + 2 < n && text_[k + 1] == q && text_[k + 2] == q;
    std::size_t open = triple ? 3 : 1;
    span.body_begin = k + open;
    std::size_t m = k + open;
    std::size_t start_line = line_no;
    std::size_t lines_seen = 0;
    bool closed = false;
    while (m < n) {
      char c = text_[m];
      if (c == '\\' && m + 1 < n) {
        if (is_newline(text_[m + 1])) {
          m = skip_newline(m + 1);
          ++lines_seen;
        } else {
          m += 2;
        }
        continue;
      }
      if (triple) {
        if (c == q && m + 2 < n && text_[m + 1] == q && text_[m + 2] == q) {
          closed = true;
          break;
        }
        if (is_newline(c)) {
          m = skip_newline(m);
          ++lines_seen;
          continue;
        }
      } else {
        if (c == q) {
          closed = true;
          break;
        }
        if (is_newline(c)) break;
      }
      ++m;
    }
    if (!closed) {
      errs.push_back({start_line, "unterminated string literal"});
      // Recover by closing the literal at the end of its first line.
      std::size_t eol = k + open;
      while (eol < n && !is_newline(text_[eol])) ++eol;
      span.body_end = eol;
      code.append(text_.substr(k, eol - k));
      span.code_end = code.size();
      line.strings.push_back(span);
      return eol;
    }
    span.body_end = m;
    std::size_t end = m + open;
    code.append(text_.substr(k, end - k));
    span.code_end = code.size();
    line.strings.push_back(span);
    line_no += lines_seen;
    return end;
  }

  std::string_view text_;
  std::vector<LogicalLine> lines_;
  std::vector<ScanError> errors_;
};

/// Index just past the string literal starting at s[i] (a quote).
std::size_t skip_code_string(std::string_view s, std::size_t i) {
  char q = s[i];
  bool triple = i + 2 < s.size() && s[i + 1] == q && s[i + 2] == q;
  std::size_t m = i + (triple ? 3 : 1);
  while (m < s.size()) {
    if (s[m] == '\\') {
      m += 2;
      continue;
    }
    if (s[m] == q) {
      if (!triple) return m + 1;
      if (m + 2 < s.size() && s[m + 1] == q && s[m + 2] == q) return m + 3;
    }
    ++m;
  }
  return s.size();
}

/// Position of `target` at bracket depth zero, skipping strings.
std::size_t find_top_level(std::string_view s, std::size_t from, char target) {
  int depth = 0;
  for (std::size_t i = from; i < s.size();) {
    char c = s[i];
    if (c == '\'' || c == '"') {
      i = skip_code_string(s, i);
      continue;
    }
    if (depth == 0 && c == target) return i;
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') depth = std::max(0, depth - 1);
    ++i;
  }
  return std::string_view::npos;
}

std::size_t find_matching_close(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size();) {
    char c = s[i];
    if (c == '\'' || c == '"') {
      i = skip_code_string(s, i);
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') {
      if (--depth == 0) return i;
    }
    ++i;
  }
  return std::string_view::npos;
}

/// Reads `keyword` followed by whitespace and an identifier at the start of
/// `code`; returns the identifier and the index after it.
std::optional<std::pair<std::string, std::size_t>> keyword_name(std::string_view code, std::string_view keyword) {
  if (code.substr(0, keyword.size()) != keyword) return std::nullopt;
  std::size_t i = keyword.size();
  if (i >= code.size() || (code[i] != ' ' && code[i] != '\t' && code[i] != '\\')) return std::nullopt;
  while (i < code.size() && (code[i] == ' ' || code[i] == '\t')) ++i;
  std::size_t b = i;
  while (i < code.size() && is_ident_char(code[i])) ++i;
  std::string name(code.substr(b, i - b));
  if (!text::is_identifier(name)) return std::nullopt;
  return std::make_pair(name, i);
}

/// Docstring carried by a logical line consisting of exactly one string.
std::optional<std::string> docstring_of(const LogicalLine& line, std::size_t from, std::string_view text) {
  std::string_view code = line.code;
  std::size_t b = from;
  while (b < code.size() && (code[b] == ' ' || code[b] == '\t' || code[b] == '\n')) ++b;
  for (const auto& s : line.strings) {
    if (s.code_begin < b) continue;
    if (s.code_begin != b) return std::nullopt;
    auto rest = text::trim(code.substr(s.code_end));
    if (!rest.empty() && rest != ";") return std::nullopt;
    return text::cleandoc(text.substr(s.body_begin, s.body_end - s.body_begin), kPythonTabWidth);
  }
  return std::nullopt;
}

struct ClassSpan {
  std::size_t header = 0;
  std::size_t end = 0;  // one past the last body line
};

const std::set<std::string>& documented_methods() {
  static const std::set<std::string> kMethods = {"__init__", "fit", "predict", "transform"};
  return kMethods;
}

}  // namespace

SignatureParse parse_ctor_signature(std::string_view paren_list) {
  auto s = text::trim(paren_list);
  if (s.empty() || s.front() != '(') throw MalformedSignature("parameter list must start with '('");

  // Strip comments first so that a quote inside a comment cannot confuse
  // the splitter.
  std::string clean;
  for (std::size_t i = 0; i < s.size();) {
    char c = s[i];
    if (c == '\'' || c == '"') {
      std::size_t e = skip_code_string(s, i);
      if (e >= s.size() && (e - i < 2 || s[e - 1] != c)) throw MalformedSignature("unterminated string in signature");
      clean.append(s.substr(i, e - i));
      i = e;
      continue;
    }
    if (c == '#') {
      while (i < s.size() && !is_newline(s[i])) ++i;
      continue;
    }
    if (c == '\\' && i + 1 < s.size() && is_newline(s[i + 1])) {
      clean.push_back(' ');
      i += 2;
      continue;
    }
    clean.push_back(c);
    ++i;
  }

  std::size_t close = find_matching_close(clean, 0);
  if (close == std::string::npos) throw MalformedSignature("unbalanced brackets in signature");
  if (!text::trim(std::string_view(clean).substr(close + 1)).empty())
    throw MalformedSignature("unexpected text after parameter list");

  std::string_view inner = std::string_view(clean).substr(1, close - 1);
  std::vector<std::string_view> parts;
  std::size_t from = 0;
  while (true) {
    std::size_t comma = find_top_level(inner, from, ',');
    if (comma == std::string_view::npos) {
      parts.push_back(inner.substr(from));
      break;
    }
    parts.push_back(inner.substr(from, comma - from));
    from = comma + 1;
  }

  SignatureParse out;
  std::set<std::string> seen;
  bool first = true;
  for (auto raw : parts) {
    auto part = text::trim(raw);
    if (part.empty()) continue;
    bool was_first = first;
    first = false;
    if (part == "*" || part == "/") {
      out.diagnostics.push_back(std::string("skipped marker '") + std::string(part) + "'");
      continue;
    }
    if (part == "...") {
      out.diagnostics.push_back("skipped ellipsis placeholder");
      continue;
    }
    if (part.front() == '*') {
      out.diagnostics.push_back("skipped variadic parameter '" + std::string(part) + "'");
      continue;
    }
    std::string_view lhs = part;
    std::optional<std::string_view> rhs;
    for (std::size_t i = 0; i < part.size();) {
      char c = part[i];
      if (c == '\'' || c == '"') {
        i = skip_code_string(part, i);
        continue;
      }
      if (c == '=') {
        bool prev_op = i > 0 && std::string_view("=!<>").find(part[i - 1]) != std::string_view::npos;
        bool next_eq = i + 1 < part.size() && part[i + 1] == '=';
        if (!prev_op && !next_eq && find_top_level(part.substr(0, i + 1), 0, '=') == i) {
          lhs = part.substr(0, i);
          rhs = part.substr(i + 1);
          break;
        }
      }
      ++i;
    }
    std::size_t colon = find_top_level(lhs, 0, ':');
    std::string name(text::trim(colon == std::string_view::npos ? lhs : lhs.substr(0, colon)));
    if (was_first && name == "self") continue;
    if (!text::is_identifier(name)) {
      out.diagnostics.push_back("skipped unreadable parameter '" + std::string(part) + "'");
      continue;
    }
    if (!seen.insert(name).second) {
      out.diagnostics.push_back("duplicate parameter '" + name + "'");
      continue;
    }
    CtorParam p{name, std::nullopt};
    if (rhs) p.default_value = decode_python_literal(*rhs);
    out.params.push_back(std::move(p));
  }
  return out;
}

ScanResult scan_source(const SourceFile& src) {
  if (src.text.empty()) throw std::invalid_argument("empty source text: " + src.path.string());

  LineScanner scanner(src.text);
  scanner.run();
  auto& lines = scanner.lines();
  auto& scan_errors = scanner.errors();

  std::vector<ClassSpan> spans;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].indent != 0) continue;
    if (!keyword_name(lines[i].code, "class")) continue;
    ClassSpan span{i, i + 1};
    while (span.end < lines.size() && lines[span.end].indent != 0) ++span.end;
    spans.push_back(span);
  }

  ScanResult result;
  std::vector<bool> claimed(scan_errors.size(), false);

  for (const auto& span : spans) {
    const LogicalLine& header = lines[span.header];
    auto [name, after_name] = *keyword_name(header.code, "class");
    std::size_t first_line = header.line_no;
    std::size_t last_line = lines[span.end - 1].end_line_no;

    std::vector<std::string> problems;
    for (std::size_t e = 0; e < scan_errors.size(); ++e) {
      if (scan_errors[e].line >= first_line && scan_errors[e].line <= last_line) {
        claimed[e] = true;
        problems.push_back("line " + std::to_string(scan_errors[e].line) + ": " + scan_errors[e].message);
      }
    }

    ClassDoc doc;
    doc.class_name = name;
    doc.line = first_line;

    std::size_t colon = find_top_level(header.code, after_name, ':');
    if (colon == std::string::npos) {
      problems.push_back("line " + std::to_string(first_line) + ": class header without ':'");
    }

    // Indentation must follow a proper block structure.
    std::vector<std::size_t> stack;
    for (std::size_t i = span.header + 1; i < span.end && problems.empty(); ++i) {
      std::size_t ind = lines[i].indent;
      if (stack.empty() || ind > stack.back()) {
        stack.push_back(ind);
        continue;
      }
      while (!stack.empty() && ind < stack.back()) stack.pop_back();
      if (stack.empty() || stack.back() != ind) {
        problems.push_back("line " + std::to_string(lines[i].line_no) + ": inconsistent indentation");
      }
    }

    if (!problems.empty()) {
      for (auto& p : problems) result.errors.push_back({name, first_line, std::move(p)});
      continue;
    }

    if (span.end > span.header + 1) {
      doc.class_docstring = docstring_of(lines[span.header + 1], 0, src.text);
    } else {
      doc.class_docstring = docstring_of(header, colon + 1, src.text);
    }

    std::size_t body_indent = span.end > span.header + 1 ? lines[span.header + 1].indent : 0;
    for (std::size_t i = span.header + 1; i < span.end; ++i) {
      const LogicalLine& line = lines[i];
      if (line.indent != body_indent) continue;
      std::string_view code = line.code;
      if (code.substr(0, 6) == "async " || code.substr(0, 6) == "async\t") {
        code = text::trim_left(code.substr(6));
      }
      auto def = keyword_name(code, "def");
      if (!def) continue;
      auto [method, after] = *def;
      if (!documented_methods().count(method)) continue;

      std::size_t offset = static_cast<std::size_t>(code.data() - line.code.data());
      std::size_t open = find_top_level(line.code, offset + after, '(');
      std::size_t close = open == std::string::npos ? open : find_matching_close(line.code, open);
      if (close == std::string::npos) {
        problems.push_back("line " + std::to_string(line.line_no) + ": malformed def header for " + method);
        continue;
      }
      std::size_t def_colon = find_top_level(line.code, close + 1, ':');
      std::optional<std::string> docstring;
      if (i + 1 < span.end && lines[i + 1].indent > body_indent) {
        docstring = docstring_of(lines[i + 1], 0, src.text);
      } else if (def_colon != std::string::npos) {
        docstring = docstring_of(line, def_colon + 1, src.text);
      }
      doc.method_docstrings[method] = docstring;

      if (method == "__init__") {
        try {
          auto sig = parse_ctor_signature(std::string_view(line.code).substr(open, close - open + 1));
          doc.ctor_defaults = std::move(sig.params);
          doc.has_init = true;
          for (auto& d : sig.diagnostics) doc.notes.push_back("__init__: " + d);
        } catch (const MalformedSignature& e) {
          problems.push_back("line " + std::to_string(line.line_no) + ": " + e.what());
        }
      }
    }
    if (!problems.empty()) {
      for (auto& p : problems) result.errors.push_back({name, first_line, std::move(p)});
      continue;
    }
    result.classes.push_back(std::move(doc));
  }

  for (std::size_t e = 0; e < scan_errors.size(); ++e) {
    if (!claimed[e]) result.errors.push_back({"", scan_errors[e].line, scan_errors[e].message});
  }
  return result;
}

std::size_t count_top_level_classes(std::string_view text) {
  if (text.empty()) return 0;
  LineScanner scanner(text);
  scanner.run();
  std::size_t n = 0;
  for (const auto& line : scanner.lines()) {
    if (line.indent == 0 && keyword_name(line.code, "class")) ++n;
  }
  return n;
}

}  // namespace hpmine
