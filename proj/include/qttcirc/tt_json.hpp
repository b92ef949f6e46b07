#pragma once

// JSON form of a QTT:
//   {"L": int, "kind": "vector"|"matrix", "cores": [...]}
// Each core is a row-major nested array, r_{k-1} x 2 x r_k for vectors and
// r_{k-1} x 2 x 2 x r_k for matrices, with leaves [re, im].

#include <nlohmann/json.hpp>

#include <string>
#include <variant>

#include "qttcirc/tt_core.hpp"

namespace qttcirc {

namespace detail {

inline nlohmann::json complex_to_json(cd v) { return nlohmann::json::array({v.real(), v.imag()}); }

inline cd complex_from_json(const nlohmann::json& j) {
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(), "core entry must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <std::size_t Mode>
nlohmann::json core_to_json(const Core& c) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t a = 0; a < c.left; ++a) {
    nlohmann::json ra = nlohmann::json::array();
    for (std::size_t i = 0; i < 2; ++i) {
      if constexpr (Mode == 2) {
        nlohmann::json ri = nlohmann::json::array();
        for (std::size_t b = 0; b < c.right; ++b) ri.push_back(complex_to_json(c(a, i, b)));
        ra.push_back(std::move(ri));
      } else {
        nlohmann::json ri = nlohmann::json::array();
        for (std::size_t j = 0; j < 2; ++j) {
          nlohmann::json rj = nlohmann::json::array();
          for (std::size_t b = 0; b < c.right; ++b) rj.push_back(complex_to_json(c(a, i, j, b)));
          ri.push_back(std::move(rj));
        }
        ra.push_back(std::move(ri));
      }
    }
    out.push_back(std::move(ra));
  }
  return out;
}

template <std::size_t Mode>
Core core_from_json(const nlohmann::json& j) {
  require(j.is_array() && !j.empty(), "core must be a non-empty array");
  const std::size_t left = j.size();
  require(j[0].is_array() && j[0].size() == 2, "core mode dimension must be 2");
  const nlohmann::json& probe = Mode == 2 ? j[0][0] : j[0][0][0];
  require(probe.is_array() && !probe.empty(), "core right rank must be positive");
  const std::size_t right = probe.size();
  Core c(left, Mode, right);
  for (std::size_t a = 0; a < left; ++a) {
    require(j[a].is_array() && j[a].size() == 2, "core mode dimension must be 2");
    for (std::size_t i = 0; i < 2; ++i) {
      if constexpr (Mode == 2) {
        require(j[a][i].is_array() && j[a][i].size() == right, "ragged core");
        for (std::size_t b = 0; b < right; ++b) c(a, i, b) = complex_from_json(j[a][i][b]);
      } else {
        require(j[a][i].is_array() && j[a][i].size() == 2, "matrix core needs two column modes");
        for (std::size_t jj = 0; jj < 2; ++jj) {
          require(j[a][i][jj].is_array() && j[a][i][jj].size() == right, "ragged core");
          for (std::size_t b = 0; b < right; ++b) c(a, i, jj, b) = complex_from_json(j[a][i][jj][b]);
        }
      }
    }
  }
  return c;
}

template <std::size_t Mode>
nlohmann::json tt_to_json(const TensorTrain<Mode>& x) {
  nlohmann::json out;
  out["L"] = x.levels();
  out["kind"] = Mode == 2 ? "vector" : "matrix";
  nlohmann::json cores = nlohmann::json::array();
  for (const Core& c : x.cores()) cores.push_back(core_to_json<Mode>(c));
  out["cores"] = std::move(cores);
  return out;
}

template <std::size_t Mode>
TensorTrain<Mode> tt_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("L") && j.contains("cores"), "QTT JSON needs L and cores");
  require(j.at("L").is_number_unsigned(), "QTT JSON: L must be a non-negative integer");
  const auto L = j.at("L").get<std::size_t>();
  const auto& arr = j.at("cores");
  require(arr.is_array() && arr.size() == L, "QTT JSON: cores length differs from L");
  std::vector<Core> cores;
  for (const auto& c : arr) cores.push_back(core_from_json<Mode>(c));
  return TensorTrain<Mode>(std::move(cores));
}

}  // namespace detail

inline nlohmann::json to_json(const QttVector& x) { return detail::tt_to_json(x); }
inline nlohmann::json to_json(const QttMatrix& x) { return detail::tt_to_json(x); }

using AnyQtt = std::variant<QttVector, QttMatrix>;

/// Parses either kind, dispatching on the "kind" field.
inline AnyQtt qtt_from_json(const nlohmann::json& j) {
  detail::require(j.is_object() && j.contains("kind") && j["kind"].is_string(), "QTT JSON needs a kind");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "vector") return detail::tt_from_json<2>(j);
  if (kind == "matrix") return detail::tt_from_json<4>(j);
  throw ValidationError("QTT JSON: unknown kind '" + kind + "'");
}

inline AnyQtt qtt_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("QTT JSON parse error: ") + e.what());
  }
  return qtt_from_json(j);
}

}  // namespace qttcirc
