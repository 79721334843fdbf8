#pragma once

#include "ordstat/embedding.hpp"
#include "ordstat/map_family.hpp"
#include "ordstat/order_stats.hpp"
#include "ordstat/orlicz.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace ordstat::io {

using nlohmann::json;

// Malformed input files and specs.
class ParseError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path);
json read_json(const std::string& path);

// "affine:9", "sym:4", "product:3x4" (n = 3 into 4 atoms), "product:3" (3 x 3).
// A product family takes `codomain` when given.
MapFamily builtin_family(const std::string& spec,
                         const std::optional<WeightedSpace>& codomain = std::nullopt);

// {"n", "atoms", "weights", "maps", "map_weights"}; weights are numbers or
// "p/q" strings, and all-string weights are kept exact.
MapFamily family_from_json(const json& j);
json family_to_json(const MapFamily& family);

// JSON array of numbers or "p/q" strings.
WeightedSpace weights_from_json(const json& j);

// {"kind": "power"|"hinge"|"grid", "params": {...}, "grid": [[s, v], ...], "cap": s}
OrliczFunction orlicz_from_json(const json& j);
json orlicz_to_json(const OrliczFunction& m);

// Plain rows of decimals separated by commas or blanks; '#' starts a comment.
std::vector<std::vector<double>> parse_matrix_csv(const std::string& text);
std::vector<std::vector<double>> read_matrix_csv(const std::string& path);

// Comma separated list of numbers, e.g. "1,2,4".
std::vector<double> parse_number_list(const std::string& text);

json condition_report_to_json(const ConditionReport& r);
json bound_report_to_json(const BoundReport& r);
std::string bound_report_csv_header();
std::string bound_report_csv_row(const BoundReport& r);
json reduction_report_to_json(const ReductionReport& r);

json embedding_to_json(const EmbeddingSpec& spec);
EmbeddingSpec embedding_from_json(const json& j);

std::string distortion_csv_header();
std::string distortion_csv_row(const DistortionReport& r);

// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace ordstat::io
