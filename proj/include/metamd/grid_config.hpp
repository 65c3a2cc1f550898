#pragma once

#include <metamd/simulation.hpp>

#include <iosfwd>
#include <string>

namespace metamd {

/// Parses a JSON grid config; unknown keys are rejected.
GridConfig read_grid_config(std::istream& in, const std::string& source_name = "<stream>");
GridConfig read_grid_config_file(const std::string& path);

}  // namespace metamd
