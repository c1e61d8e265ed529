#pragma once

#include <string>

#include <json.hpp>

#include "qpstrip/operators.hpp"

namespace qps {

using json = nlohmann::json;

// Operator schema:
//   hopping:   [[k, re, im], ...]   every listed k is used as given
//   hopping_tail (optional): {amplitude, power, tol}
//   potential: {fourier: [[k, re, im], ...]}  (k may be an integer list for d > 1)
//           or {sequence: "path", first: n0}  (whitespace separated values)
//   alpha, theta: number or list; epsilon: number
// Missing alpha defaults to the golden mean.
OperatorSpec parse_operator(const json& j, const std::string& base_dir = ".");

// Strip schema: {C: matrix, V: [{k: [..], re: matrix, im: matrix}], alpha}
// A matrix is a list of rows of numbers. Alternatively {fold: <operator object>}.
StripSpec parse_strip(const json& j, const std::string& base_dir = ".");

json operator_to_json(const OperatorSpec& spec);

json load_json_file(const std::string& path);

// FNV-1a hash of a canonical dump, rendered as 16 hex digits
std::string config_hash(const json& j);

}  // namespace qps
