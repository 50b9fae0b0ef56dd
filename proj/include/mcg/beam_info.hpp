#pragma once

#include <memory>
#include <string>
#include <vector>

namespace mcg {

/// Information value of casting one beam through a sequence of cells with
/// occupancy probabilities q (collapsed to 0 / 0.5 / 1 by the caller).
/// Pluggable so the planning objective can swap measures.
class BeamInformation {
 public:
  virtual ~BeamInformation() = default;
  virtual double beam_info(const std::vector<double>& q) const = 0;
};

/// Cauchy-Schwarz quadratic mutual information between the cells and the
/// beam's termination variable (first occupied cell or pass-through), in
/// closed form via prefix/suffix products.  Exactly zero on fully known
/// beams; grows as reachable unknown cells are added; cells behind a
/// certainly-occupied cell contribute nothing.
class CsqmiTermination : public BeamInformation {
 public:
  double beam_info(const std::vector<double>& q) const override;
};

/// Cheap alternative measure: the number of unknown cells the beam can reach
/// before a certainly-occupied cell.
class ReachableUnknownCount : public BeamInformation {
 public:
  double beam_info(const std::vector<double>& q) const override;
};

std::unique_ptr<BeamInformation> make_beam_information(const std::string& name);

}  // namespace mcg
