#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eelm/types.hpp"

namespace eelm::rdf {

struct Site {
  std::string species;
  Eigen::Vector3d fractional;  // wrapped into [0, 1)
};

/// Periodic unit cell. Lattice vectors are the rows of `lattice` (Angstrom).
class CrystalStructure {
 public:
  CrystalStructure(const Eigen::Matrix3d& lattice, std::vector<Site> sites,
                   std::optional<double> totalEnergyPerAtom = std::nullopt);

  /// Sites given in Cartesian Angstrom; converted to wrapped fractional coordinates.
  static CrystalStructure fromCartesian(
      const Eigen::Matrix3d& lattice,
      const std::vector<std::pair<std::string, Eigen::Vector3d>>& cartesianSites,
      std::optional<double> totalEnergyPerAtom = std::nullopt);

  const Eigen::Matrix3d& lattice() const noexcept { return lattice_; }
  const std::vector<Site>& sites() const noexcept { return sites_; }
  std::optional<double> totalEnergyPerAtom() const noexcept { return energy_; }

  double volume() const noexcept;
  /// Perpendicular distance between opposite faces of the cell, per lattice vector.
  Eigen::Vector3d faceSpacings() const noexcept;
  Eigen::Vector3d cartesian(std::size_t site) const;
  Index count(const std::string& species) const noexcept;
  double molarFraction(const std::string& species) const;
  std::vector<std::string> speciesPresent() const;

  /// Rigid shift of every site by a fractional offset (re-wrapped).
  CrystalStructure translated(const Eigen::Vector3d& fractionalOffset) const;
  /// na x nb x nc repetition of the cell; energy per atom is carried over.
  CrystalStructure supercell(int na, int nb, int nc) const;
  CrystalStructure withSites(std::vector<Site> sites) const;

 private:
  Eigen::Matrix3d lattice_;
  std::vector<Site> sites_;
  std::optional<double> energy_;
};

/// Wraps each component into [0, 1).
Eigen::Vector3d wrapFractional(const Eigen::Vector3d& f) noexcept;

}  // namespace eelm::rdf
