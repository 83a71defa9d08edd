#pragma once

#include <string>
#include <variant>
#include <vector>

#include "kobmetric/chains.hpp"
#include "kobmetric/domains.hpp"
#include "kobmetric/types.hpp"

namespace kobmetric {

// JSON domain descriptor:
//   {"kind": "ball"|"polydisc"|"egg"|"lempert"|"stretched_ball",
//    "n": int, "radii": [..], "exponents": [..], "epsilon": float, "N": float}
// Only the fields relevant to the kind are required; "n" is cross-checked
// against the vector fields when both appear. Unknown keys are rejected.
DomainSpec domain_from_json(const std::string& text);
std::string domain_to_json(const DomainSpec& domain);

// Budget descriptor {"max_iterations", "restarts", "degree", "seed"}; absent
// fields keep their defaults, unknown keys are rejected.
OptimizerBudget budget_from_json(const std::string& text);
std::string budget_to_json(const OptimizerBudget& budget);

// A report cell is a finite number or a string; the writers reject NaN/inf.
using Cell = std::variant<double, std::string>;

struct ResultRow {
    std::vector<Cell> cells;
};

// Column-ordered report table; every row must match the header width.
struct ReportTable {
    std::vector<std::string> columns;
    std::vector<ResultRow> rows;

    ResultRow& add_row();  // appends a row of 0.0 cells, one per column
};

// %.17g with '.' decimal separator (round-trips doubles exactly).
std::string format_number(double value);

// RFC-4180 quoting, header row, '\n' line endings, UTF-8 passthrough.
// Throws std::invalid_argument on empty tables, width mismatches, or
// non-finite numeric cells.
std::string to_csv(const ReportTable& table);

// JSON array of one object per row, keys in column order. Same validation
// as to_csv.
std::string to_json(const ReportTable& table);

// Chain as a JSON list of legs: endpoints, node, leg distance, and the disc
// coefficients as [re, im] pairs.
std::string chain_to_json(const ChainPath& chain);

}  // namespace kobmetric
