#include "kobmetric/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace kobmetric {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json parse_object(const std::string& text, const char* what) {
    json parsed;
    try {
        parsed = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::invalid_argument(std::string(what) + ": invalid JSON: " + err.what());
    }
    if (!parsed.is_object()) {
        throw std::invalid_argument(std::string(what) + ": expected a JSON object");
    }
    return parsed;
}

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed,
                         const char* what) {
    for (const auto& item : object.items()) {
        if (!allowed.count(item.key())) {
            throw std::invalid_argument(std::string(what) + ": unknown key \"" + item.key() +
                                        "\"");
        }
    }
}

void check_n(const json& object, std::size_t actual, const char* what) {
    if (object.contains("n") && object["n"].get<int>() != static_cast<int>(actual)) {
        throw std::invalid_argument(std::string(what) + ": \"n\" disagrees with the field sizes");
    }
}

json cplx_to_json(const cplx& c) { return json::array({c.real(), c.imag()}); }

json point_to_json(const Point& p) {
    json out = json::array();
    for (const cplx& c : p) out.push_back(cplx_to_json(c));
    return out;
}

}  // namespace

DomainSpec domain_from_json(const std::string& text) {
    const json descriptor = parse_object(text, "domain descriptor");
    reject_unknown_keys(descriptor, {"kind", "n", "radii", "exponents", "epsilon", "N"},
                        "domain descriptor");
    if (!descriptor.contains("kind")) {
        throw std::invalid_argument("domain descriptor: missing \"kind\"");
    }
    const std::string kind = descriptor["kind"].get<std::string>();
    try {
        if (kind == "ball") {
            if (!descriptor.contains("n")) {
                throw std::invalid_argument("ball descriptor needs \"n\"");
            }
            return DomainSpec::ball(descriptor["n"].get<int>());
        }
        if (kind == "polydisc") {
            if (!descriptor.contains("radii")) {
                throw std::invalid_argument("polydisc descriptor needs \"radii\"");
            }
            auto radii = descriptor["radii"].get<std::vector<double>>();
            check_n(descriptor, radii.size(), "polydisc descriptor");
            return DomainSpec::polydisc(std::move(radii));
        }
        if (kind == "egg") {
            if (!descriptor.contains("exponents")) {
                throw std::invalid_argument("egg descriptor needs \"exponents\"");
            }
            auto exponents = descriptor["exponents"].get<std::vector<int>>();
            check_n(descriptor, exponents.size(), "egg descriptor");
            return DomainSpec::egg(std::move(exponents));
        }
        if (kind == "lempert") {
            if (!descriptor.contains("epsilon")) {
                throw std::invalid_argument("lempert descriptor needs \"epsilon\"");
            }
            check_n(descriptor, 2, "lempert descriptor");
            return DomainSpec::lempert(descriptor["epsilon"].get<double>());
        }
        if (kind == "stretched_ball") {
            if (!descriptor.contains("N")) {
                throw std::invalid_argument("stretched_ball descriptor needs \"N\"");
            }
            check_n(descriptor, 2, "stretched_ball descriptor");
            return DomainSpec::stretched_ball(descriptor["N"].get<double>());
        }
    } catch (const json::exception& err) {
        throw std::invalid_argument(std::string("domain descriptor: ") + err.what());
    }
    throw std::invalid_argument("domain descriptor: unknown kind \"" + kind + "\"");
}

std::string domain_to_json(const DomainSpec& domain) {
    ordered_json out;
    switch (domain.kind()) {
        case DomainKind::Ball:
            out["kind"] = "ball";
            out["n"] = domain.dimension();
            break;
        case DomainKind::Polydisc:
            out["kind"] = "polydisc";
            out["n"] = domain.dimension();
            out["radii"] = domain.radii();
            break;
        case DomainKind::Egg:
            out["kind"] = "egg";
            out["n"] = domain.dimension();
            out["exponents"] = domain.exponents();
            break;
        case DomainKind::Lempert:
            out["kind"] = "lempert";
            out["n"] = 2;
            out["epsilon"] = domain.epsilon();
            break;
        case DomainKind::StretchedBall:
            out["kind"] = "stretched_ball";
            out["n"] = 2;
            out["N"] = domain.stretch();
            break;
    }
    return out.dump();
}

OptimizerBudget budget_from_json(const std::string& text) {
    const json descriptor = parse_object(text, "budget descriptor");
    reject_unknown_keys(descriptor, {"max_iterations", "restarts", "degree", "seed"},
                        "budget descriptor");
    OptimizerBudget budget;
    try {
        if (descriptor.contains("max_iterations")) {
            budget.max_iterations = descriptor["max_iterations"].get<int>();
        }
        if (descriptor.contains("restarts")) budget.restarts = descriptor["restarts"].get<int>();
        if (descriptor.contains("degree")) budget.degree = descriptor["degree"].get<int>();
        if (descriptor.contains("seed")) budget.seed = descriptor["seed"].get<std::uint64_t>();
    } catch (const json::exception& err) {
        throw std::invalid_argument(std::string("budget descriptor: ") + err.what());
    }
    if (budget.max_iterations < 1 || budget.restarts < 0 || budget.degree < 1) {
        throw std::invalid_argument(
            "budget descriptor: need max_iterations >= 1, restarts >= 0, degree >= 1");
    }
    return budget;
}

std::string budget_to_json(const OptimizerBudget& budget) {
    ordered_json out;
    out["max_iterations"] = budget.max_iterations;
    out["restarts"] = budget.restarts;
    out["degree"] = budget.degree;
    out["seed"] = budget.seed;
    return out.dump();
}

ResultRow& ReportTable::add_row() {
    ResultRow row;
    row.cells.assign(columns.size(), Cell(0.0));
    rows.push_back(std::move(row));
    return rows.back();
}

std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

void validate_table(const ReportTable& table) {
    if (table.columns.empty() || table.rows.empty()) {
        throw std::invalid_argument("report: empty table");
    }
    for (const ResultRow& row : table.rows) {
        if (row.cells.size() != table.columns.size()) {
            throw std::invalid_argument("report: row width does not match the header");
        }
        for (const Cell& cell : row.cells) {
            if (const double* value = std::get_if<double>(&cell); value && !std::isfinite(*value)) {
                throw std::invalid_argument("report: non-finite numeric cell");
            }
        }
    }
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        quoted += c;
        if (c == '"') quoted += '"';
    }
    quoted += '"';
    return quoted;
}

std::string cell_text(const Cell& cell) {
    if (const double* value = std::get_if<double>(&cell)) return format_number(*value);
    return std::get<std::string>(cell);
}

}  // namespace

std::string to_csv(const ReportTable& table) {
    validate_table(table);
    std::string out;
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        if (j) out += ',';
        out += csv_escape(table.columns[j]);
    }
    out += '\n';
    for (const ResultRow& row : table.rows) {
        for (std::size_t j = 0; j < row.cells.size(); ++j) {
            if (j) out += ',';
            out += csv_escape(cell_text(row.cells[j]));
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const ReportTable& table) {
    validate_table(table);
    ordered_json rows = ordered_json::array();
    for (const ResultRow& row : table.rows) {
        ordered_json object;
        for (std::size_t j = 0; j < row.cells.size(); ++j) {
            if (const double* value = std::get_if<double>(&row.cells[j])) {
                object[table.columns[j]] = *value;
            } else {
                object[table.columns[j]] = std::get<std::string>(row.cells[j]);
            }
        }
        rows.push_back(std::move(object));
    }
    return rows.dump(2) + "\n";
}

std::string chain_to_json(const ChainPath& chain) {
    json legs = json::array();
    for (const OneDiscResult& leg : chain.legs) {
        json entry;
        entry["start"] = point_to_json(leg.start());
        entry["end"] = point_to_json(leg.end());
        entry["node"] = cplx_to_json(leg.node.parameter);
        entry["distance"] = leg.distance_upper;
        entry["residuals"] = json::array({leg.residuals[0], leg.residuals[1]});
        json coeffs = json::array();
        for (const Point& a : leg.disc.coefficients()) coeffs.push_back(point_to_json(a));
        entry["coefficients"] = std::move(coeffs);
        legs.push_back(std::move(entry));
    }
    json out;
    out["total"] = chain.total;
    out["legs"] = std::move(legs);
    return out.dump();
}

}  // namespace kobmetric
