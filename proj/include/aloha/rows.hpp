#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace aloha {

/// Version tag written into the schema_version column of every row.
inline constexpr const char* kSchemaVersion = "aloha-rows/1";

/// Cell value. monostate renders as an empty CSV cell or JSON null; doubles
/// that are not finite render the same way. A vector<double> renders as a
/// JSON array, or as a ';'-joined CSV cell.
using Value = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string,
                           std::vector<double>>;

/// Ordered named cells; every row is self-describing.
class Row {
 public:
  Row& set(const std::string& key, Value value);
  [[nodiscard]] const Value* find(const std::string& key) const;
  [[nodiscard]] const std::vector<std::pair<std::string, Value>>& cells() const { return cells_; }
  /// Appends every cell of `other`, overwriting duplicates.
  Row& merge(const Row& other);

 private:
  std::vector<std::pair<std::string, Value>> cells_;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);
/// Text of a cell as written to CSV (without quoting).
std::string cell_text(const Value& v);

enum class Format { kCsv, kJson };
Format parse_format(const std::string& text);

/// Streams rows as they are produced, flushing after each one so partial
/// output survives an interrupted run.
class RowWriter {
 public:
  virtual ~RowWriter() = default;
  virtual void write(const Row& row) = 0;
  virtual void finish() = 0;
};

/// CSV with a one-line header; RFC 4180 quoting. Columns are fixed by the
/// first row unless given up front; cells missing from a row are left empty.
std::unique_ptr<RowWriter> make_csv_writer(std::ostream& out, std::vector<std::string> columns = {});
/// JSON array of row objects with the same field names as the CSV columns,
/// in column order; absent cells are null.
std::unique_ptr<RowWriter> make_json_writer(std::ostream& out, std::vector<std::string> columns = {});
std::unique_ptr<RowWriter> make_writer(Format format, std::ostream& out, std::vector<std::string> columns = {});

}  // namespace aloha
