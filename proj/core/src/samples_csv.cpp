#include "drisk/samples_csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <string>

#include "drisk/errors.hpp"

namespace drisk {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
  });
}

[[noreturn]] void bad_line(std::size_t line_no, const std::string& what) {
  fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<double> read_numeric_column(std::istream& in, std::string_view column) {
  std::vector<double> values;
  std::optional<std::size_t> column_index;  // set once a header is seen
  bool layout_known = false;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_fields(line);

    if (!layout_known) {
      layout_known = true;
      if (fields.size() == 1 && parse_number(fields[0])) {
        values.push_back(*parse_number(fields[0]));
        continue;
      }
      const auto it = std::find_if(fields.begin(), fields.end(),
                                   [&](std::string_view f) { return iequals(f, column); });
      if (it == fields.end()) {
        bad_line(line_no, "expected a numeric value or a header with a '" +
                              std::string(column) + "' column");
      }
      column_index = static_cast<std::size_t>(it - fields.begin());
      continue;
    }

    if (column_index) {
      if (fields.size() <= *column_index) bad_line(line_no, "missing '" + std::string(column) + "' field");
      const auto v = parse_number(fields[*column_index]);
      if (!v) bad_line(line_no, "non-numeric value '" + std::string(fields[*column_index]) + "'");
      values.push_back(*v);
    } else {
      if (fields.size() != 1) bad_line(line_no, "expected exactly one value per line");
      const auto v = parse_number(fields[0]);
      if (!v) bad_line(line_no, "non-numeric value '" + std::string(fields[0]) + "'");
      values.push_back(*v);
    }
  }
  if (values.empty()) fail(ErrorCode::ParseError, "no numeric values found");
  return values;
}

std::vector<double> read_samples_csv(std::istream& in) { return read_numeric_column(in, "loss"); }

std::vector<double> read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open sample file " + path.string());
  return read_samples_csv(in);
}

std::vector<double> read_weights_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open weight file " + path.string());
  return read_numeric_column(in, "gamma");
}

}  // namespace drisk
