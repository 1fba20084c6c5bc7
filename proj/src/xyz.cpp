#include "eelm/xyz.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace eelm::rdf {

namespace {

std::optional<double> toDouble(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::vector<std::string_view> splitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// key=value and key="quoted value" pairs; keys lower-cased.
std::map<std::string, std::string> parseComment(std::string_view line, std::size_t lineNo) {
  std::map<std::string, std::string> kv;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t keyStart = i;
    while (i < line.size() && line[i] != '=' && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::string key = lower(line.substr(keyStart, i - keyStart));
    if (i >= line.size() || line[i] != '=') continue;  // bare flag
    ++i;
    std::string value;
    if (i < line.size() && line[i] == '"') {
      const std::size_t close = line.find('"', i + 1);
      if (close == std::string_view::npos)
        throw ParseError(lineNo, fmt::format("unterminated quoted value for key '{}'", key));
      value = std::string(line.substr(i + 1, close - i - 1));
      i = close + 1;
    } else {
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      value = std::string(line.substr(start, i - start));
    }
    kv[key] = value;
  }
  return kv;
}

bool blank(std::string_view line) {
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

std::vector<CrystalStructure> parseExtendedXyz(std::istream& in) {
  std::vector<CrystalStructure> out;
  std::string line;
  std::size_t lineNo = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  while (next()) {
    if (blank(line)) continue;
    const auto countTokens = splitWhitespace(line);
    long long atoms = -1;
    if (countTokens.size() == 1) {
      auto [ptr, ec] = std::from_chars(countTokens[0].data(),
                                       countTokens[0].data() + countTokens[0].size(), atoms);
      if (ec != std::errc() || ptr != countTokens[0].data() + countTokens[0].size()) atoms = -1;
    }
    if (atoms < 1) throw ParseError(lineNo, fmt::format("expected a positive atom count, got '{}'", line));

    if (!next()) throw ParseError(lineNo + 1, "missing comment line with lattice");
    const std::size_t commentLine = lineNo;
    const auto kv = parseComment(line, lineNo);
    const auto lat = kv.find("lattice");
    if (lat == kv.end()) throw ParseError(lineNo, "missing lattice=\"...\" entry");
    const auto latTokens = splitWhitespace(lat->second);
    if (latTokens.size() != 9)
      throw ParseError(lineNo, fmt::format("malformed lattice: expected 9 numbers, got {}", latTokens.size()));
    Eigen::Matrix3d lattice;
    for (int k = 0; k < 9; ++k) {
      const auto v = toDouble(latTokens[static_cast<std::size_t>(k)]);
      if (!v) throw ParseError(lineNo, fmt::format("malformed lattice value '{}'", latTokens[static_cast<std::size_t>(k)]));
      lattice(k / 3, k % 3) = *v;
    }
    std::optional<double> energy;
    if (const auto e = kv.find("energy"); e != kv.end()) {
      energy = toDouble(e->second);
      if (!energy) throw ParseError(lineNo, fmt::format("malformed energy value '{}'", e->second));
    }

    std::vector<std::pair<std::string, Eigen::Vector3d>> sites;
    sites.reserve(static_cast<std::size_t>(atoms));
    for (long long a = 0; a < atoms; ++a) {
      if (!next()) throw ParseError(lineNo + 1, fmt::format("expected {} atom lines, file ended after {}", atoms, a));
      const auto tok = splitWhitespace(line);
      if (tok.size() < 4) throw ParseError(lineNo, "atom line needs: species x y z");
      Eigen::Vector3d r;
      for (int k = 0; k < 3; ++k) {
        const auto v = toDouble(tok[static_cast<std::size_t>(k + 1)]);
        if (!v) throw ParseError(lineNo, fmt::format("malformed coordinate '{}'", tok[static_cast<std::size_t>(k + 1)]));
        r(k) = *v;
      }
      sites.emplace_back(std::string(tok[0]), r);
    }
    try {
      out.push_back(CrystalStructure::fromCartesian(lattice, sites, energy));
    } catch (const ConfigError& e) {
      throw ParseError(commentLine, e.what());
    }
  }
  return out;
}

std::vector<CrystalStructure> readExtendedXyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open structure file '{}'", path.string()));
  return parseExtendedXyz(in);
}

void writeExtendedXyz(std::ostream& out, const std::vector<CrystalStructure>& structures) {
  for (const auto& s : structures) {
    out << s.sites().size() << '\n';
    const auto& l = s.lattice();
    out << fmt::format("lattice=\"{:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g}\"",
                       l(0, 0), l(0, 1), l(0, 2), l(1, 0), l(1, 1), l(1, 2), l(2, 0), l(2, 1), l(2, 2));
    if (s.totalEnergyPerAtom()) out << fmt::format(" energy={:.17g}", *s.totalEnergyPerAtom());
    out << '\n';
    for (std::size_t i = 0; i < s.sites().size(); ++i) {
      const auto r = s.cartesian(i);
      out << fmt::format("{} {:.17g} {:.17g} {:.17g}\n", s.sites()[i].species, r(0), r(1), r(2));
    }
  }
}

}  // namespace eelm::rdf
