#pragma once

#include <vector>

#include "skewtorus/angles.hpp"
#include "skewtorus/skew.hpp"

namespace skewtorus {

struct Mode {
  TorusPoint point;
  double density = 0;
  /// ridge[s] is set when the density is constant along coordinate s, in
  /// which case point[s] carries no information.
  std::vector<bool> ridge;
};

struct ModeSearchOptions {
  int grid_n = 360;
  double refine_tol = 1e-8;
  double merge_radius = 1e-4;
};

/// Local maxima of a bivariate skewed density: grid scan with toroidal
/// neighbourhoods, Newton refinement, merge, sorted by density descending.
std::vector<Mode> find_modes(const SkewModel& model, const ModeSearchOptions& options = {});

}  // namespace skewtorus
