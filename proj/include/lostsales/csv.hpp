#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lostsales {

/// Minimal RFC-4180 CSV writer: CRLF-free rows, fields quoted only when they
/// contain a comma, quote, or newline; numbers rendered with '.' decimal
/// separator regardless of locale and enough digits to round-trip a double.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void row(const std::vector<std::string>& fields);

  static std::string field(double value);
  static std::string field(std::int64_t value);
  static std::string field(int value) { return field(static_cast<std::int64_t>(value)); }

 private:
  static std::string quote_if_needed(const std::string& field);
  std::ostream& out_;
};

}  // namespace lostsales
