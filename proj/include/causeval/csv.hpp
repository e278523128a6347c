#pragma once

#include <string>
#include <vector>

namespace causeval::csv {

// Minimal RFC-4180-style CSV: fields containing commas, quotes or newlines
// are quoted, embedded quotes are doubled. Raw model answers routinely
// contain all three.

std::string escape(const std::string& field);
std::string join_row(const std::vector<std::string>& fields);

// Parses a whole document; handles quoted fields spanning lines. The final
// newline is optional.
std::vector<std::vector<std::string>> parse(const std::string& text);

}  // namespace causeval::csv
