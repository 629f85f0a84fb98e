#include "stylo/resources.hpp"

#include <map>
#include <sstream>

#include "stylo/digest.hpp"
#include "stylo/error.hpp"

namespace stylo {
namespace detail {
const std::map<std::string, std::string_view, std::less<>>& embedded_resources();
}

std::string_view resource(std::string_view name) {
  const auto& table = detail::embedded_resources();
  auto it = table.find(name);
  if (it == table.end()) throw DataError("unknown resource: " + std::string(name));
  return it->second;
}

std::vector<std::string> resource_lines(std::string_view name) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(resource(name))};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> resource_names() {
  std::vector<std::string> names;
  for (const auto& [name, bytes] : detail::embedded_resources()) names.push_back(name);
  return names;
}

std::vector<std::string> verify_resources() {
  std::vector<std::string> bad;
  std::istringstream in{std::string(resource("SHA256SUMS"))};
  std::string digest, name;
  while (in >> digest >> name) {
    const auto& table = detail::embedded_resources();
    auto it = table.find(name);
    if (it == table.end() || sha256_hex(it->second) != digest) bad.push_back(name);
  }
  return bad;
}

}  // namespace stylo
