#pragma once

#include <span>
#include <string>

#include "vesselpose/pipeline.h"

namespace vesselpose {

// SVG overlay of one image: per annotation the 12 box edges (bottom quad in
// corner order, top quad, verticals) and the three object axes from the
// centroid. Coordinates are printed with two decimals.
std::string RenderSvg(std::span<const Annotation> annotations, int width, int height);

}  // namespace vesselpose
