#pragma once

#include <string>
#include <vector>

namespace splitring::csv {

/// Shortest-round-trip is not required; 17 significant digits keeps every
/// double exact and the text identical across runs.
std::string format(double v);

std::string join(const std::vector<std::string>& cells);

}  // namespace splitring::csv
