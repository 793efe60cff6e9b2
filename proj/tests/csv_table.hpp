#pragma once

// Minimal RFC 4180 reader for checking CLI output in tests.

#include <cstddef>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;

  [[nodiscard]] double num(std::size_t row, const std::string& col) const {
    const std::string& text = rows.at(row).at(col);
    if (text.empty()) throw std::runtime_error("empty cell " + col);
    return std::stod(text);
  }
  [[nodiscard]] const std::string& text(std::size_t row, const std::string& col) const { return rows.at(row).at(col); }
};

inline std::vector<std::vector<std::string>> records(const std::string& data) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (quoted) {
      if (c == '"' && i + 1 < data.size() && data[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rec.push_back(field);
      field.clear();
    } else if (c == '\n') {
      rec.push_back(field);
      field.clear();
      out.push_back(rec);
      rec.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (!field.empty() || !rec.empty()) {
    rec.push_back(field);
    out.push_back(rec);
  }
  return out;
}

inline Table parse(const std::string& data) {
  Table t;
  auto recs = records(data);
  if (recs.empty()) return t;
  t.header = recs.front();
  for (std::size_t r = 1; r < recs.size(); ++r) {
    if (recs[r].size() != t.header.size()) throw std::runtime_error("ragged csv row");
    std::map<std::string, std::string> row;
    for (std::size_t c = 0; c < t.header.size(); ++c) row[t.header[c]] = recs[r][c];
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace csv
