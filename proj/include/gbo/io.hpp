#pragma once

#include <map>
#include <string>

namespace gbo {

// Shortest decimal form that round-trips a double exactly.
std::string format_double(double x);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a truncated file.
void write_text_atomic(const std::string& path, const std::string& content);

// Flat "key = value" text, '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> parse_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);

}  // namespace gbo
