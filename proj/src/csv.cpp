#include "lostsales/csv.hpp"

#include <charconv>
#include <cstdint>
#include <system_error>

namespace lostsales {

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote_if_needed(fields[i]);
  }
  out_ << '\n';
}

std::string CsvWriter::field(double value) {
  // Shortest representation that round-trips; locale-independent by design.
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::string CsvWriter::field(std::int64_t value) { return std::to_string(value); }

std::string CsvWriter::quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace lostsales
