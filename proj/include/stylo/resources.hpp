#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stylo {

/// Raw bytes of a data file compiled into the library (e.g. "koppel512.txt").
/// Throws DataError for unknown names.
std::string_view resource(std::string_view name);

/// Non-empty, non-comment lines of a resource, trailing whitespace stripped.
/// Lines beginning with '#' are comments.
std::vector<std::string> resource_lines(std::string_view name);

/// Names of all embedded resources, sorted.
std::vector<std::string> resource_names();

/// Checks every embedded file against the bundled SHA256SUMS manifest and
/// returns the names that do not match (empty when the data is intact).
std::vector<std::string> verify_resources();

}  // namespace stylo
