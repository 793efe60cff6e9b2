#include "aloha/rows.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace aloha {
namespace {

std::string csv_quote(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

nlohmann::ordered_json to_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(x)) return nullptr;
          return x;
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          auto arr = nlohmann::ordered_json::array();
          for (double d : x) arr.push_back(std::isfinite(d) ? nlohmann::ordered_json(d) : nullptr);
          return arr;
        } else {
          return x;
        }
      },
      v);
}

class CsvWriter final : public RowWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> columns) : out_(out), columns_(std::move(columns)) {}

  void write(const Row& row) override {
    if (!header_written_) {
      if (columns_.empty()) {
        for (const auto& [key, _] : row.cells()) columns_.push_back(key);
      }
      for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_quote(columns_[i]);
      }
      out_ << '\n';
      header_written_ = true;
    }
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (i) out_ << ',';
      if (const Value* v = row.find(columns_[i])) out_ << csv_quote(cell_text(*v));
    }
    out_ << '\n';
    out_.flush();
  }

  void finish() override { out_.flush(); }

 private:
  std::ostream& out_;
  std::vector<std::string> columns_;
  bool header_written_ = false;
};

class JsonWriter final : public RowWriter {
 public:
  JsonWriter(std::ostream& out, std::vector<std::string> columns) : out_(out), columns_(std::move(columns)) {}

  void write(const Row& row) override {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& key : columns_) {
      const Value* v = row.find(key);
      obj[key] = v ? to_json(*v) : nullptr;
    }
    for (const auto& [key, value] : row.cells()) {
      if (!obj.contains(key)) obj[key] = to_json(value);
    }
    out_ << (first_ ? "[\n  " : ",\n  ") << obj.dump();
    first_ = false;
    out_.flush();
  }

  void finish() override {
    out_ << (first_ ? "[]\n" : "\n]\n");
    out_.flush();
  }

 private:
  std::ostream& out_;
  std::vector<std::string> columns_;
  bool first_ = true;
};

}  // namespace

Row& Row::set(const std::string& key, Value value) {
  for (auto& [k, v] : cells_) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  cells_.emplace_back(key, std::move(value));
  return *this;
}

const Value* Row::find(const std::string& key) const {
  for (const auto& [k, v] : cells_) {
    if (k == key) return &v;
  }
  return nullptr;
}

Row& Row::merge(const Row& other) {
  for (const auto& [k, v] : other.cells()) set(k, v);
  return *this;
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string cell_text(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          std::string s;
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) s += ';';
            s += format_double(x[i]);
          }
          return s;
        } else {
          return std::to_string(x);
        }
      },
      v);
}

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  throw std::invalid_argument("unknown output format '" + text + "'");
}

std::unique_ptr<RowWriter> make_csv_writer(std::ostream& out, std::vector<std::string> columns) {
  return std::make_unique<CsvWriter>(out, std::move(columns));
}

std::unique_ptr<RowWriter> make_json_writer(std::ostream& out, std::vector<std::string> columns) {
  return std::make_unique<JsonWriter>(out, std::move(columns));
}

std::unique_ptr<RowWriter> make_writer(Format format, std::ostream& out, std::vector<std::string> columns) {
  if (format == Format::kJson) return make_json_writer(out, std::move(columns));
  return make_csv_writer(out, std::move(columns));
}

}  // namespace aloha
