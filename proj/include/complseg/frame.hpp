#pragma once

#include <map>
#include <string>
#include <vector>

#include "complseg/raster.hpp"

namespace complseg {

// One image plus binary masks for the subset of classes annotated in it.
// Positive regions of distinct masks must be pixel-disjoint.
struct AnnotationFrame {
    ImageU8 image;
    std::vector<std::string> annotated_classes;
    std::map<std::string, Mask> masks; // keyed by class name, one per annotated class
};

} // namespace complseg
