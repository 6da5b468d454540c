#pragma once

// JSON encodings shared by scenario files and reports.
//
//   matrix    [[[re, im], ...], ...]                     row-major
//   superop   {"d": n, "convention": "col-stack-blocks-Eij", "choi": matrix}
//   generator {"kind": "gksl", "H": matrix, "jumps": [{"op": matrix, "rate": r}]}
//             {"kind": "choi", "super": superop}

#include "json.hpp"

#include "ucpext/cpmaps.hpp"
#include "ucpext/dynamics.hpp"

namespace ucpext::io {

using nlohmann::json;

inline constexpr const char* kChoiConvention = "col-stack-blocks-Eij";

json to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

json to_json(const SuperOp& s);
SuperOp superop_from_json(const json& j);

// Parses either generator encoding; certificates are recomputed.
Generator generator_from_json(const json& j);

}  // namespace ucpext::io
