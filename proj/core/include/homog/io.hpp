#pragma once

#include <string>

#include <json.hpp>

#include "homog/cell.hpp"
#include "homog/fields.hpp"
#include "homog/grid.hpp"
#include "homog/rates.hpp"

namespace homog::io {

using json = nlohmann::json;

// Rejects keys outside the allowed set (strict config schemas).
void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context);

// Coefficient-field schema:
// {kind, structure, terms: [{type, component, ...}], alpha, beta, alpha0}.
json field_to_json(const fields::CoefficientField& f);
fields::CoefficientField field_from_json(const json& j);

// Bare term-list schema for sources: {terms: [...]}.
json expr_to_json(const fields::ScalarExpr& e);
fields::ScalarExpr expr_from_json(const json& j);

json cell_solution_to_json(const cell::CellSolution& sol);
json homogenized_to_json(const cell::HomogenizedCoefficients& c);
json meanvalue_to_json(const fields::MeanValueEstimate& est);
json rate_report_to_json(const rates::RateReport& report);

// FNV-1a 64-bit hex digest of a string (canonical config fingerprint).
std::string fnv1a_digest(const std::string& data);

// JSON header + flat binary array (row-major float64, little-endian).
// Writes <stem>.json and <stem>.f64 under dir.
void write_field_binary(const grid::DiscreteField& u, const std::string& dir,
                        const std::string& stem, const std::string& digest);
grid::DiscreteField read_field_binary(const std::string& header_path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace homog::io
