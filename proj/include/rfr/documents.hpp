#pragma once

#include "rfr/assemble.hpp"
#include "rfr/polytope.hpp"
#include "rfr/robust.hpp"
#include "rfr/validation.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rfr {

/// {"columns": [...], "G": [[...]], "g": [...], "labels": [{...}]}
std::string polytope_document(const Polytope& poly);

/// Accepts a polytope document, or a result document whose "rfr" member is one.
Polytope parse_polytope_document(std::string_view text);

/// RFR rows, nominal rows, iteration log (without timings) and worst-case
/// parameter vectors. Identical inputs give byte-identical documents.
std::string result_document(const RobustResult& result, const UncertaintyModel& unc);

std::string report_document(const ValidationReport& report);

/// One line per outer iteration: index, max objective, solutions, rows before/after pruning, elapsed ms.
std::string iteration_log_line(const IterationRecord& record);

/// Header with the two column names, then one vertex per line; the first vertex is repeated to close the ring.
std::string polygon_csv(const std::vector<Eigen::Vector2d>& vertices, const std::vector<std::string>& columns);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace rfr
