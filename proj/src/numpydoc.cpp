#include "hpmine/numpydoc.hpp"

#include <set>

#include "hpmine/text.hpp"

namespace hpmine {

namespace {

constexpr int kDocTabWidth = 4;

bool is_underline(std::string_view line) {
  auto t = text::trim(line);
  if (t.size() < 3) return false;
  for (char c : t) {
    if (c != '-') return false;
  }
  return true;
}

bool is_header_at(const std::vector<std::string>& lines, std::size_t i) {
  if (i + 1 >= lines.size()) return false;
  if (text::is_blank(lines[i]) || is_underline(lines[i])) return false;
  if (!is_underline(lines[i + 1])) return false;
  return text::indent_of(lines[i]) == text::indent_of(lines[i + 1]);
}

SectionKind classify(std::string_view heading) {
  if (heading == "Parameters") return SectionKind::Parameters;
  if (heading == "Returns") return SectionKind::Returns;
  if (heading == "Attributes") return SectionKind::Attributes;
  return SectionKind::Other;
}

bool valid_entry_name(std::string_view name) {
  if (name.substr(0, 2) == "**") {
    name.remove_prefix(2);
  } else if (name.substr(0, 1) == "*") {
    name.remove_prefix(1);
  }
  return text::is_identifier(name);
}

}  // namespace

std::string_view section_kind_name(SectionKind kind) {
  switch (kind) {
    case SectionKind::Parameters: return "Parameters";
    case SectionKind::Returns: return "Returns";
    case SectionKind::Attributes: return "Attributes";
    case SectionKind::Other: return "Other";
  }
  return "Other";
}

std::vector<Section> split_sections(std::string_view docstring) {
  auto lines = text::split_lines(docstring);
  for (auto& l : lines) l = text::expand_tabs(l, kDocTabWidth);

  std::vector<Section> out;
  out.push_back(Section{SectionKind::Other, "", {}});
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_header_at(lines, i)) {
      std::string heading(text::trim(lines[i]));
      out.push_back(Section{classify(heading), heading, {}});
      ++i;
      continue;
    }
    out.back().body.push_back(lines[i]);
  }
  // A docstring of a single empty line has one empty summary line; keep the
  // summary body empty instead so that "" maps to Other("").
  if (out.size() == 1 && out[0].body.size() == 1 && out[0].body[0].empty()) out[0].body.clear();
  return out;
}

const Section* find_section(const std::vector<Section>& sections, SectionKind kind) {
  for (const auto& s : sections) {
    if (s.kind == kind) return &s;
  }
  return nullptr;
}

ParameterList parse_parameters(const Section& section) {
  ParameterList out;
  const auto& body = section.body;
  std::size_t entry_indent = 0;
  bool found = false;
  for (const auto& l : body) {
    if (!text::is_blank(l)) {
      entry_indent = text::indent_of(l);
      found = true;
      break;
    }
  }
  if (!found) return out;

  std::set<std::string> seen;
  std::size_t i = 0;
  while (i < body.size()) {
    const auto& line = body[i];
    if (text::is_blank(line) || text::indent_of(line) > entry_indent) {
      ++i;  // stray block text before the first entry
      continue;
    }
    std::size_t header_line = i;
    std::string header(text::trim(line));
    ++i;
    while (!header.empty() && header.back() == '\\') {
      header.pop_back();
      header = std::string(text::trim_right(header));
      if (i < body.size() && !text::is_blank(body[i]) && text::indent_of(body[i]) > entry_indent) {
        header += ' ';
        header += text::trim(body[i]);
        ++i;
      } else {
        break;
      }
    }

    std::vector<std::string> block;
    while (i < body.size() && (text::is_blank(body[i]) || text::indent_of(body[i]) > entry_indent)) {
      block.push_back(body[i]);
      ++i;
    }
    block = text::dedent(block);
    while (!block.empty() && block.front().empty()) block.erase(block.begin());
    while (!block.empty() && block.back().empty()) block.pop_back();
    for (auto& b : block) b = std::string(text::trim_right(b));

    std::size_t colon = header.find(':');
    if (colon == std::string::npos) {
      out.errors.push_back({header_line, header, "missing ':' separator"});
      continue;
    }
    std::string names(text::trim(std::string_view(header).substr(0, colon)));
    std::string short_desc(text::trim(std::string_view(header).substr(colon + 1)));

    std::vector<std::string> parts;
    std::size_t from = 0;
    while (true) {
      std::size_t comma = names.find(',', from);
      parts.emplace_back(text::trim(std::string_view(names).substr(from, comma == std::string::npos ? std::string::npos : comma - from)));
      if (comma == std::string::npos) break;
      from = comma + 1;
    }
    bool ok = true;
    for (const auto& p : parts) {
      if (!valid_entry_name(p)) ok = false;
    }
    if (!ok) {
      out.errors.push_back({header_line, header, "entry name is not an identifier"});
      continue;
    }
    for (const auto& p : parts) {
      if (!seen.insert(p).second) {
        out.errors.push_back({header_line, header, "duplicate entry '" + p + "'"});
        continue;
      }
      out.args.push_back(ArgDoc{p, short_desc, text::join(block, "\n")});
    }
  }
  return out;
}

}  // namespace hpmine
