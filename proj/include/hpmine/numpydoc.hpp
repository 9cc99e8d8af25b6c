#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hpmine {

enum class SectionKind { Parameters, Returns, Attributes, Other };

struct Section {
  SectionKind kind = SectionKind::Other;
  /// Heading text as written; empty for the implicit summary section.
  std::string heading;
  /// Body lines verbatim (tab-expanded), header and underline excluded.
  std::vector<std::string> body;
};

/// One `name : short_desc` entry with the indented block beneath it.
struct ArgDoc {
  std::string name;
  std::string short_desc;
  std::string long_desc;
};

struct MalformedEntry {
  std::size_t line = 0;  // 0-based index into Section::body
  std::string text;
  std::string reason;
};

struct ParameterList {
  std::vector<ArgDoc> args;
  std::vector<MalformedEntry> errors;
};

std::vector<Section> split_sections(std::string_view docstring);

ParameterList parse_parameters(const Section& section);

/// First section of the given kind, or nullptr.
const Section* find_section(const std::vector<Section>& sections, SectionKind kind);

std::string_view section_kind_name(SectionKind kind);

}  // namespace hpmine
