#pragma once

// Partial radial distribution features of periodic structures:
//
//   g_AB(r) = 1/N_A  sum_{i in A} sum_{j in B, images}  r^-p exp(-(r - d_ij)^2 / (2 sigma^2)) Theta(d_c - d_ij)
//
// sampled on an even grid r_m = gridMax * m / gridPoints, m = 1..gridPoints,
// plus the formation-energy target E_f = E_tot - x_A E_A - x_B E_B.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eelm/crystal.hpp"
#include "eelm/types.hpp"

namespace eelm::rdf {

using SpeciesPair = std::pair<std::string, std::string>;

struct RdfConfig {
  double cutoff = 8.0;          // d_c, Angstrom
  double gaussianWidth = 0.2;   // sigma_g, Angstrom
  double renormExponent = 2.0;  // p
  int gridPoints = 64;
  double gridMax = 10.0;  // Angstrom
  std::vector<SpeciesPair> speciesPairs;

  void validate() const;
  double gridValue(int m) const noexcept;  // m in [0, gridPoints)
  Index featureCount() const noexcept {
    return static_cast<Index>(speciesPairs.size()) * gridPoints;
  }
  /// (A, A), (A, B), (B, B) ... in the given order, A <= B by position.
  static std::vector<SpeciesPair> pairsFor(const std::vector<std::string>& species);
  std::vector<std::string> columnNames() const;
};

/// Distances 0 < d <= cutoff from every `center` atom in the cell to every
/// periodic image of every `neighbor` atom.
std::vector<double> enumerateNeighbors(const CrystalStructure& structure, const std::string& center,
                                       const std::string& neighbor, double cutoff);

/// Zero vector when the structure has no `pair.first` atoms.
Vector partialRdf(const CrystalStructure& structure, const SpeciesPair& pair, const RdfConfig& config);

/// Throws when the fractions are negative or do not sum to 1 within 1e-12.
double formationEnergy(double totalEnergyPerAtom, double fractionA, double fractionB,
                       double pureEnergyA, double pureEnergyB);

/// Pure-element reference energies for a binary A-B system.
struct FormationReference {
  std::string speciesA;
  std::string speciesB;
  double energyA = 0.0;  // eV/atom
  double energyB = 0.0;

  /// Lowest energy per atom among single-species structures of each element.
  static FormationReference fromPureStructures(const std::vector<CrystalStructure>& structures,
                                               const std::string& speciesA,
                                               const std::string& speciesB);
  double of(const CrystalStructure& structure) const;
};

struct FeatureDataset {
  Matrix features;                // structures x featureCount
  std::optional<Vector> targets;  // eV/atom
  std::vector<std::string> columnNames;
  std::string configHash;
  std::vector<std::string> species;
  std::string targetUnits = "eV/atom";

  Index rows() const noexcept { return features.rows(); }
  void writeCsv(std::ostream& out) const;
};

std::string hashRdfConfig(const RdfConfig& config);

/// Per-structure featurization, parallel over structures with order-preserving output.
FeatureDataset featurize(const std::vector<CrystalStructure>& structures, const RdfConfig& config,
                         const std::optional<FormationReference>& reference = std::nullopt,
                         Execution exec = Execution::parallel);

}  // namespace eelm::rdf
