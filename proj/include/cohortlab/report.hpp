#pragma once

#include <string>

#include "cohortlab/json_io.hpp"

namespace cohortlab {

// Assembles report.json from the artifact files present in `dir`,
// juxtaposing computed values against the published anchor numbers with a
// pass/fail verdict wherever an acceptance-style check is computable from
// the artifacts. Missing artifacts are listed as not computed; artifacts
// failing schema validation abort the report.
json build_report(const std::string& dir);

// Markdown rendering of the same content, tables shaped like the published
// ones (rows = treatments, columns = outcomes).
std::string report_markdown(const json& report);

}  // namespace cohortlab
