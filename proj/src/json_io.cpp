#include "ucpext/json_io.hpp"

#include <string>

#include "ucpext/errors.hpp"

namespace ucpext::io {

json to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix: expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw InputError("matrix: rows must be non-empty arrays");
  const std::size_t cols = j[0].size();
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw InputError("matrix: ragged rows");
    for (std::size_t k = 0; k < cols; ++k) {
      const json& e = j[i][k];
      if (e.is_number()) {
        m(i, k) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = cplx{e[0].get<double>(), e[1].get<double>()};
      } else {
        throw InputError("matrix: entries must be [re, im] pairs");
      }
    }
  }
  if (!m.all_finite()) throw InputError("matrix: non-finite entry");
  return m;
}

json to_json(const SuperOp& s) {
  return json{{"d", s.d()}, {"convention", kChoiConvention}, {"choi", to_json(s.choi())}};
}

SuperOp superop_from_json(const json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("choi"))
    throw InputError("superop: expected {\"d\": n, \"choi\": matrix}");
  if (j.contains("convention") && j["convention"] != kChoiConvention)
    throw InputError(std::string("superop: unsupported Choi convention, expected ") + kChoiConvention);
  if (!j["d"].is_number_unsigned() || j["d"].get<std::size_t>() == 0)
    throw InputError("superop: d must be a positive integer");
  return SuperOp(j["d"].get<std::size_t>(), matrix_from_json(j["choi"]));
}

Generator generator_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw InputError("generator: missing \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "choi") {
    if (!j.contains("super")) throw InputError("generator: kind \"choi\" requires \"super\"");
    return Generator(superop_from_json(j["super"]));
  }
  if (kind == "gksl") {
    if (!j.contains("H")) throw InputError("generator: kind \"gksl\" requires \"H\"");
    const CMatrix h = matrix_from_json(j["H"]);
    std::vector<Jump> jumps;
    if (j.contains("jumps")) {
      for (const auto& e : j["jumps"]) {
        if (!e.contains("op") || !e.contains("rate") || !e["rate"].is_number())
          throw InputError("generator: each jump needs \"op\" and numeric \"rate\"");
        jumps.push_back({matrix_from_json(e["op"]), e["rate"].get<double>()});
      }
    }
    return gksl_generator(h.rows(), HermMatrix(h), jumps);
  }
  throw InputError("generator: unknown kind \"" + kind + "\"");
}

}  // namespace ucpext::io
