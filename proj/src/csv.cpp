#include "gaslight/csv.hpp"

#include <fstream>
#include <sstream>

#include "gaslight/lp.hpp"  // Error

namespace gaslight::csv {

namespace {

bool needs_quotes(const std::string& field) {
  return field.find_first_of(",\"\n\r") != std::string::npos;
}

void append_field(std::string& line, const std::string& field) {
  if (!needs_quotes(field)) {
    line += field;
    return;
  }
  line += '"';
  for (char c : field) {
    if (c == '"') line += '"';
    line += c;
  }
  line += '"';
}

std::string render_row(const std::vector<std::string>& row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ',';
    append_field(line, row[i]);
  }
  line += '\n';
  return line;
}

// Splits one logical record starting at `pos`. Quoted fields may span
// newlines, so the record boundary is found while scanning.
std::vector<std::string> parse_record(const std::string& text, std::size_t& pos,
                                      const std::string& path) {
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  while (pos < text.size()) {
    char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field += '"';
          pos += 2;
          continue;
        }
        quoted = false;
        ++pos;
        continue;
      }
      field += c;
      ++pos;
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      ++pos;
      continue;
    }
    if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      ++pos;
      continue;
    }
    if (c == '\n' || c == '\r') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      row.push_back(std::move(field));
      return row;
    }
    field += c;
    ++pos;
  }
  if (quoted) throw Error(Error::Kind::Parse, path + ": unterminated quoted field");
  row.push_back(std::move(field));
  return row;
}

}  // namespace

void write(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Error::Kind::Io, "cannot create '" + path + "'");
  out << render_row(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw Error(Error::Kind::Internal,
                  path + ": row width " + std::to_string(row.size()) +
                      " differs from header width " + std::to_string(table.header.size()));
    out << render_row(row);
  }
  if (!out) throw Error(Error::Kind::Io, "write to '" + path + "' failed");
}

Table read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Error::Kind::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.empty()) throw Error(Error::Kind::Parse, path + ": empty file");

  Table table;
  std::size_t pos = 0;
  table.header = parse_record(text, pos, path);
  while (pos < text.size()) {
    std::size_t mark = pos;
    std::vector<std::string> row = parse_record(text, pos, path);
    if (row.size() == 1 && row[0].empty() && pos >= text.size()) break;  // trailing newline
    if (row.size() != table.header.size())
      throw Error(Error::Kind::Parse,
                  path + ": record at byte " + std::to_string(mark) + " has " +
                      std::to_string(row.size()) + " fields, header has " +
                      std::to_string(table.header.size()));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace gaslight::csv
