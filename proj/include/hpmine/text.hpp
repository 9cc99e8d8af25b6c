#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hpmine::text {

std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string_view trim(std::string_view s);
std::string_view trim_left(std::string_view s);
std::string_view trim_right(std::string_view s);

std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// Replaces each tab with spaces up to the next multiple of `width`.
std::string expand_tabs(std::string_view line, int width);

/// Number of leading spaces. Lines are expected to be tab-expanded already.
std::size_t indent_of(std::string_view line);
bool is_blank(std::string_view line);

/// Same contract as Python's inspect.cleandoc: the first line is stripped,
/// the common indentation of the remaining lines is removed, and leading and
/// trailing blank lines are dropped. Tabs are expanded to `tab_width`.
std::string cleandoc(std::string_view doc, int tab_width = 8);

/// Removes the common leading indentation of all non-blank lines.
std::vector<std::string> dedent(const std::vector<std::string>& lines);

bool is_identifier(std::string_view s);

/// Drops bytes that would make the string invalid UTF-8 so it can be
/// serialized as JSON.
std::string sanitize_utf8(std::string_view s);

}  // namespace hpmine::text
