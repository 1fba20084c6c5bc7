#include "eelm/rdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace eelm::rdf {

void RdfConfig::validate() const {
  if (!(cutoff > 0.0)) throw ConfigError("RDF cutoff must be > 0");
  if (!(gaussianWidth > 0.0)) throw ConfigError("Gaussian width must be > 0");
  if (!(renormExponent >= 0.0)) throw ConfigError("renormalization exponent must be >= 0");
  if (gridPoints < 2) throw ConfigError("RDF grid needs at least 2 points");
  if (!(gridMax > 0.0)) throw ConfigError("RDF grid maximum must be > 0");
  if (cutoff > gridMax) throw ConfigError("RDF cutoff must not exceed the grid maximum");
  if (speciesPairs.empty()) throw ConfigError("RDF needs at least one species pair");
}

double RdfConfig::gridValue(int m) const noexcept {
  return gridMax * static_cast<double>(m + 1) / static_cast<double>(gridPoints);
}

std::vector<SpeciesPair> RdfConfig::pairsFor(const std::vector<std::string>& species) {
  std::vector<SpeciesPair> pairs;
  for (std::size_t a = 0; a < species.size(); ++a)
    for (std::size_t b = a; b < species.size(); ++b) pairs.emplace_back(species[a], species[b]);
  return pairs;
}

std::vector<std::string> RdfConfig::columnNames() const {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(featureCount()));
  for (const auto& [a, b] : speciesPairs)
    for (int m = 0; m < gridPoints; ++m) names.push_back(fmt::format("{}-{}_{}", a, b, m));
  return names;
}

std::vector<double> enumerateNeighbors(const CrystalStructure& structure, const std::string& center,
                                       const std::string& neighbor, double cutoff) {
  if (!(cutoff > 0.0)) throw ConfigError("neighbor cutoff must be > 0");
  const auto& lat = structure.lattice();
  const Eigen::Vector3d spacing = structure.faceSpacings();
  // Fractional differences lie in (-1, 1), hence the extra image per axis.
  int reach[3];
  for (int k = 0; k < 3; ++k) reach[k] = static_cast<int>(std::ceil(cutoff / spacing(k))) + 1;

  const auto& sites = structure.sites();
  std::vector<Eigen::Vector3d> cart(sites.size());
  for (std::size_t s = 0; s < sites.size(); ++s) cart[s] = structure.cartesian(s);

  std::vector<double> out;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i].species != center) continue;
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (sites[j].species != neighbor) continue;
      for (int na = -reach[0]; na <= reach[0]; ++na)
        for (int nb = -reach[1]; nb <= reach[1]; ++nb)
          for (int nc = -reach[2]; nc <= reach[2]; ++nc) {
            const Eigen::Vector3d shift = na * lat.row(0).transpose() + nb * lat.row(1).transpose() +
                                          nc * lat.row(2).transpose();
            const double d = (cart[j] + shift - cart[i]).norm();
            if (d > 0.0 && d <= cutoff) out.push_back(d);
          }
    }
  }
  return out;
}

Vector partialRdf(const CrystalStructure& structure, const SpeciesPair& pair, const RdfConfig& config) {
  config.validate();
  Vector g = Vector::Zero(config.gridPoints);
  const Index centers = structure.count(pair.first);
  if (centers == 0) return g;
  auto distances = enumerateNeighbors(structure, pair.first, pair.second, config.cutoff);
  // Fixed summation order: independent of site order and image enumeration.
  std::sort(distances.begin(), distances.end());
  const double twoSigmaSq = 2.0 * config.gaussianWidth * config.gaussianWidth;
  for (int m = 0; m < config.gridPoints; ++m) {
    const double r = config.gridValue(m);
    const double prefactor = std::pow(r, -config.renormExponent);
    double sum = 0.0;
    for (double d : distances) sum += std::exp(-(r - d) * (r - d) / twoSigmaSq);
    g(m) = prefactor * sum / static_cast<double>(centers);
  }
  return g;
}

double formationEnergy(double totalEnergyPerAtom, double fractionA, double fractionB,
                       double pureEnergyA, double pureEnergyB) {
  if (fractionA < 0.0 || fractionB < 0.0) throw ConfigError("molar fractions must be >= 0");
  if (std::abs(fractionA + fractionB - 1.0) > 1e-12)
    throw ConfigError(fmt::format("molar fractions sum to {} instead of 1", fractionA + fractionB));
  return totalEnergyPerAtom - fractionA * pureEnergyA - fractionB * pureEnergyB;
}

FormationReference FormationReference::fromPureStructures(
    const std::vector<CrystalStructure>& structures, const std::string& speciesA,
    const std::string& speciesB) {
  constexpr double kNone = std::numeric_limits<double>::infinity();
  double ea = kNone, eb = kNone;
  for (const auto& s : structures) {
    if (!s.totalEnergyPerAtom() || s.sites().empty()) continue;
    const auto present = s.speciesPresent();
    if (present.size() != 1) continue;
    if (present[0] == speciesA) ea = std::min(ea, *s.totalEnergyPerAtom());
    if (present[0] == speciesB) eb = std::min(eb, *s.totalEnergyPerAtom());
  }
  if (ea == kNone || eb == kNone)
    throw ConfigError(fmt::format("no pure {} or pure {} structure with an energy to use as reference",
                                  speciesA, speciesB));
  return {speciesA, speciesB, ea, eb};
}

double FormationReference::of(const CrystalStructure& structure) const {
  if (!structure.totalEnergyPerAtom()) throw ConfigError("structure has no energy");
  for (const auto& sp : structure.speciesPresent())
    if (sp != speciesA && sp != speciesB)
      throw ConfigError(fmt::format("species '{}' is outside the {}-{} system", sp, speciesA, speciesB));
  return formationEnergy(*structure.totalEnergyPerAtom(), structure.molarFraction(speciesA),
                         structure.molarFraction(speciesB), energyA, energyB);
}

void FeatureDataset::writeCsv(std::ostream& out) const {
  for (std::size_t c = 0; c < columnNames.size(); ++c) out << (c ? "," : "") << columnNames[c];
  if (targets) out << (columnNames.empty() ? "" : ",") << "target";
  out << '\n';
  for (Index r = 0; r < features.rows(); ++r) {
    for (Index c = 0; c < features.cols(); ++c) out << (c ? "," : "") << fmt::format("{:.17g}", features(r, c));
    if (targets) out << (features.cols() ? "," : "") << fmt::format("{:.17g}", (*targets)(r));
    out << '\n';
  }
}

std::string hashRdfConfig(const RdfConfig& config) {
  std::string canon = fmt::format("cutoff={:.17g};width={:.17g};p={:.17g};grid={};max={:.17g}",
                                  config.cutoff, config.gaussianWidth, config.renormExponent,
                                  config.gridPoints, config.gridMax);
  for (const auto& [a, b] : config.speciesPairs) canon += fmt::format(";{}-{}", a, b);
  // FNV-1a, 64 bit
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

FeatureDataset featurize(const std::vector<CrystalStructure>& structures, const RdfConfig& config,
                         const std::optional<FormationReference>& reference, Execution exec) {
  config.validate();
  FeatureDataset ds;
  ds.columnNames = config.columnNames();
  ds.configHash = hashRdfConfig(config);
  for (const auto& [a, b] : config.speciesPairs) {
    for (const auto* sp : {&a, &b})
      if (std::find(ds.species.begin(), ds.species.end(), *sp) == ds.species.end()) ds.species.push_back(*sp);
  }
  const auto n = static_cast<Index>(structures.size());
  ds.features = Matrix::Zero(n, config.featureCount());
  if (reference) {
    ds.targets = Vector::Zero(n);
    for (Index s = 0; s < n; ++s) {
      if (!structures[static_cast<std::size_t>(s)].totalEnergyPerAtom())
        throw ConfigError(fmt::format("structure {} has no energy but targets were requested", s));
      (*ds.targets)(s) = reference->of(structures[static_cast<std::size_t>(s)]);
    }
  }

#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel && n > 1)
  for (Index s = 0; s < n; ++s) {
    const auto& structure = structures[static_cast<std::size_t>(s)];
    for (std::size_t p = 0; p < config.speciesPairs.size(); ++p) {
      const Vector g = partialRdf(structure, config.speciesPairs[p], config);
      ds.features.row(s).segment(static_cast<Index>(p) * config.gridPoints, config.gridPoints) = g.transpose();
    }
  }
  return ds;
}

}  // namespace eelm::rdf
