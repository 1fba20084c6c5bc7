#include "eelm/crystal.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace eelm::rdf {

Eigen::Vector3d wrapFractional(const Eigen::Vector3d& f) noexcept {
  Eigen::Vector3d w;
  for (int k = 0; k < 3; ++k) {
    double v = f(k) - std::floor(f(k));
    if (v >= 1.0) v = 0.0;  // -tiny - floor(-tiny) rounds up to 1
    w(k) = v;
  }
  return w;
}

CrystalStructure::CrystalStructure(const Eigen::Matrix3d& lattice, std::vector<Site> sites,
                                   std::optional<double> totalEnergyPerAtom)
    : lattice_(lattice), sites_(std::move(sites)), energy_(totalEnergyPerAtom) {
  if (!lattice_.allFinite()) throw ConfigError("lattice contains non-finite entries");
  const double scale = lattice_.rowwise().norm().prod();
  if (!(std::abs(lattice_.determinant()) > 1e-10 * std::max(scale, 1e-300)))
    throw ConfigError("degenerate lattice: cell volume is zero");
  for (auto& s : sites_) {
    if (!s.fractional.allFinite()) throw ConfigError("site coordinates must be finite");
    s.fractional = wrapFractional(s.fractional);
  }
  if (energy_ && !std::isfinite(*energy_)) throw ConfigError("structure energy must be finite");
}

CrystalStructure CrystalStructure::fromCartesian(
    const Eigen::Matrix3d& lattice,
    const std::vector<std::pair<std::string, Eigen::Vector3d>>& cartesianSites,
    std::optional<double> totalEnergyPerAtom) {
  // r = f L  =>  f = r L^-1
  const Eigen::Matrix3d inverse = lattice.inverse();
  std::vector<Site> sites;
  sites.reserve(cartesianSites.size());
  for (const auto& [species, r] : cartesianSites)
    sites.push_back({species, (r.transpose() * inverse).transpose()});
  return CrystalStructure(lattice, std::move(sites), totalEnergyPerAtom);
}

double CrystalStructure::volume() const noexcept { return std::abs(lattice_.determinant()); }

Eigen::Vector3d CrystalStructure::faceSpacings() const noexcept {
  const Eigen::Vector3d a = lattice_.row(0), b = lattice_.row(1), c = lattice_.row(2);
  const double v = volume();
  return {v / b.cross(c).norm(), v / c.cross(a).norm(), v / a.cross(b).norm()};
}

Eigen::Vector3d CrystalStructure::cartesian(std::size_t site) const {
  return (sites_.at(site).fractional.transpose() * lattice_).transpose();
}

Index CrystalStructure::count(const std::string& species) const noexcept {
  return static_cast<Index>(std::count_if(sites_.begin(), sites_.end(),
                                          [&](const Site& s) { return s.species == species; }));
}

double CrystalStructure::molarFraction(const std::string& species) const {
  if (sites_.empty()) throw ConfigError("molar fraction of an empty structure");
  return static_cast<double>(count(species)) / static_cast<double>(sites_.size());
}

std::vector<std::string> CrystalStructure::speciesPresent() const {
  std::vector<std::string> out;
  for (const auto& s : sites_)
    if (std::find(out.begin(), out.end(), s.species) == out.end()) out.push_back(s.species);
  return out;
}

CrystalStructure CrystalStructure::translated(const Eigen::Vector3d& fractionalOffset) const {
  std::vector<Site> moved = sites_;
  for (auto& s : moved) s.fractional += fractionalOffset;
  return CrystalStructure(lattice_, std::move(moved), energy_);
}

CrystalStructure CrystalStructure::supercell(int na, int nb, int nc) const {
  if (na < 1 || nb < 1 || nc < 1) throw ConfigError("supercell multiples must be >= 1");
  Eigen::Matrix3d big = lattice_;
  big.row(0) *= na;
  big.row(1) *= nb;
  big.row(2) *= nc;
  const Eigen::Vector3d reps(na, nb, nc);
  std::vector<Site> out;
  out.reserve(sites_.size() * static_cast<std::size_t>(na * nb * nc));
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      for (int k = 0; k < nc; ++k)
        for (const auto& s : sites_)
          out.push_back({s.species, (s.fractional + Eigen::Vector3d(i, j, k)).cwiseQuotient(reps)});
  return CrystalStructure(big, std::move(out), energy_);
}

CrystalStructure CrystalStructure::withSites(std::vector<Site> sites) const {
  return CrystalStructure(lattice_, std::move(sites), energy_);
}

}  // namespace eelm::rdf
