#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "rweld/beltrami_field.hpp"

namespace rweld::io {

/// Quotes a CSV field when it contains a comma, quote, CR or LF; embedded
/// quotes are doubled.
std::string csv_field(const std::string& value);

/// Fixed-width row writer. Throws ArgumentError if a row has the wrong arity.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// Splits one CSV record (no embedded newlines) honoring quotes.
std::vector<std::string> parse_csv_line(const std::string& line);

/// Flat key = value lines; '#' starts a comment; blank lines ignored. Later
/// keys override earlier ones. Throws ConfigError on a line without '=' or
/// with an empty key.
std::map<std::string, std::string> parse_config(const std::string& text);
std::map<std::string, std::string> load_config(const std::filesystem::path& path);

struct SvgStyle {
  std::string stroke = "#1f4e79";
  double stroke_width = 1.0;  // in pixels
};

/// Closed polylines scaled into a square viewport with a margin.
void write_svg(std::ostream& out, const std::vector<std::vector<cplx>>& curves,
               const std::vector<SvgStyle>& styles, double size = 600.0);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rweld::io
