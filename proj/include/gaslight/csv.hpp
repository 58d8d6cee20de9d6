#pragma once
// Minimal CSV support for the report files: UTF-8, '.' decimal separator,
// one header row followed by data rows of the same width. Fields containing
// a comma, double quote, or newline are double-quoted with inner quotes
// doubled; the reader reverses the escaping. Everything the tool writes is
// readable back with csv::read (round-trip covered by tests).

#include <string>
#include <vector>

namespace gaslight::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each row as wide as header
};

// Writes header + rows to `path`. Throws Error{Io} when the file cannot be
// created and Error{Internal} when a row's width differs from the header's.
void write(const std::string& path, const Table& table);

// Parses a file written by write (or any conforming CSV). Throws Error{Io}
// when the file cannot be read and Error{Parse} on ragged rows, an empty
// file, or a quoting error.
Table read(const std::string& path);

}  // namespace gaslight::csv
