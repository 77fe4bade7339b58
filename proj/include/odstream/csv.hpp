#pragma once

#include <string>
#include <vector>

namespace odstream::csv {

// Reads an RFC-4180 file: comma separators, optional double-quoted fields
// with "" escapes, LF or CRLF row ends, newlines allowed inside quotes.
// A trailing newline does not produce an empty row.
std::vector<std::vector<std::string>> read_file(const std::string& path);

// Quotes a field if it contains a comma, quote or newline.
std::string escape(const std::string& field);

}  // namespace odstream::csv
