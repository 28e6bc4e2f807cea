#pragma once

#include <filesystem>
#include <istream>
#include <string_view>
#include <vector>

namespace drisk {

/// Reads one numeric column from CSV text. Two layouts are accepted:
///   - no header, exactly one numeric value per line;
///   - a header row naming `column` (case-insensitive) among comma-separated
///     fields, with that field numeric on every following row.
/// Blank lines are skipped. Anything else throws ParseError naming the line.
std::vector<double> read_numeric_column(std::istream& in, std::string_view column);

/// Loss samples: column `loss`.
std::vector<double> read_samples_csv(std::istream& in);
std::vector<double> read_samples_csv(const std::filesystem::path& path);

/// Spectral weight tables: column `gamma` (or headerless).
std::vector<double> read_weights_csv(const std::filesystem::path& path);

}  // namespace drisk
