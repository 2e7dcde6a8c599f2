#pragma once

#include <string>

#include "actdiag/csv_codec.hpp"
#include "actdiag/dataset.hpp"

namespace testsupport {

inline std::string fixture_path(const std::string& name) { return std::string(ACTDIAG_FIXTURES) + "/" + name; }

inline std::string fixture_text(const std::string& name) { return actdiag::read_file(fixture_path(name)); }

inline actdiag::ActivityDiagram fixture(const std::string& name) { return actdiag::parse_csv(fixture_text(name)); }

}  // namespace testsupport
