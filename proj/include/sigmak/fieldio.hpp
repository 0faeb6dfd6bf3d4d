#pragma once

#include <string>

#include "sigmak/grid.hpp"
#include "sigmak/sphere.hpp"

namespace sigmak {

// Field files come in pairs: <base>.json holds the header (schema_version,
// kind, n, grid spec), <base>.csv holds one node value per line ("%.17g"),
// row-major with the last axis fastest (theta index ascending for
// sphere_axisym fields).

void save_field(const GridField& f, const std::string& base);
GridField load_field(const std::string& base);

void save_axisym(const SphereAxisymField& f, const std::string& base);
SphereAxisymField load_axisym(const std::string& base);

std::string format_double(double v); // pinned "%.17g" formatting

} // namespace sigmak
