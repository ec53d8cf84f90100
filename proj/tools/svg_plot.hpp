#pragma once

#include <filesystem>

namespace splitring::cli {

/// Line plot of every column of a CSV against its first column. Non-finite
/// cells are skipped. Throws Error(Config) when the CSV cannot be read.
void write_svg_plot(const std::filesystem::path& csv_path,
                    const std::filesystem::path& svg_path);

}  // namespace splitring::cli
