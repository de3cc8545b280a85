#pragma once

#include <map>
#include <string>
#include <vector>

namespace cgm {

/// Parses "key=value" lines; blank lines and lines starting with '#' are
/// skipped, whitespace around keys and values is trimmed. Duplicate keys and
/// lines without '=' raise ParseError with the 1-based line number.
std::map<std::string, std::string> parse_key_values(const std::string& text);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

double parse_double(const std::string& key, const std::string& value);
long parse_long(const std::string& key, const std::string& value);
std::vector<double> parse_doubles(const std::string& key, const std::string& value);

std::string read_text_file(const std::string& path);

} // namespace cgm
