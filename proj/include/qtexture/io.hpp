#ifndef QTEXTURE_IO_HPP
#define QTEXTURE_IO_HPP

// JSON state / unitary files and the record formatter shared by the CLI.
//
// State file:    {"dims": [2, 2], "kind": "pure",  "re": [...], "im": [...]}
//                {"dims": [2],    "kind": "mixed", "re": [[...], ...], "im": [[...], ...]}
// Unitary file:  {"re": [[...], ...], "im": [[...], ...]}

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "convex_roof.hpp"
#include "random.hpp"
#include "state.hpp"

namespace qtex {

using json = nlohmann::json;

namespace detail {

inline std::vector<double> read_real_list(const json& j, const char* field, std::size_t expected) {
  if (!j.is_array()) throw invalid_state_error(std::string("field '") + field + "' must be a list of numbers");
  std::vector<double> out;
  for (const json& x : j) {
    if (!x.is_number()) throw invalid_state_error(std::string("field '") + field + "' must contain only numbers");
    out.push_back(x.get<double>());
  }
  if (out.size() != expected) {
    std::ostringstream os;
    os << "field '" << field << "' has " << out.size() << " entries, expected " << expected;
    throw invalid_state_error(os.str());
  }
  return out;
}

/// A square matrix given either as a list of rows or as one flat row-major list.
inline std::vector<double> read_real_matrix(const json& j, const char* field, std::size_t d) {
  if (j.is_array() && !j.empty() && j.front().is_array()) {
    if (j.size() != d) {
      std::ostringstream os;
      os << "field '" << field << "' has " << j.size() << " rows, expected " << d;
      throw invalid_state_error(os.str());
    }
    std::vector<double> out;
    for (const json& row : j) {
      const std::vector<double> r = read_real_list(row, field, d);
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }
  return read_real_list(j, field, d * d);
}

inline const json& require(const json& doc, const char* field) {
  if (!doc.is_object() || !doc.contains(field)) throw invalid_state_error(std::string("missing field '") + field + "'");
  return doc.at(field);
}

inline json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_state_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw invalid_state_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline json real_rows(const ComplexMatrix& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(imag ? m(i, k).imag() : m(i, k).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json real_list(const ComplexVector& v, bool imag) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(imag ? v(i).imag() : v(i).real());
  return out;
}

}  // namespace detail

inline AnyState parse_state(const json& doc) {
  const json& dims_j = detail::require(doc, "dims");
  if (!dims_j.is_array() || dims_j.empty()) throw invalid_state_error("field 'dims' must be a non-empty list");
  Dims dims;
  for (const json& x : dims_j) {
    if (!x.is_number_integer() || x.get<long long>() < 1 || x.get<long long>() > 1'000'000)
      throw invalid_state_error("field 'dims' must hold positive integers");
    dims.push_back(x.get<int>());
  }
  const long long total = detail::dims_product(dims);
  if (total > 1 << 24) throw invalid_state_error("state dimension too large");
  const auto d = static_cast<std::size_t>(total);

  const json& kind_j = detail::require(doc, "kind");
  if (!kind_j.is_string()) throw invalid_state_error("field 'kind' must be \"pure\" or \"mixed\"");
  const std::string kind = kind_j.get<std::string>();
  const json& re_j = detail::require(doc, "re");
  const json& im_j = detail::require(doc, "im");
  if (kind == "pure") {
    const std::vector<double> re = detail::read_real_list(re_j, "re", d);
    const std::vector<double> im = detail::read_real_list(im_j, "im", d);
    ComplexVector v(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) v(static_cast<Eigen::Index>(i)) = cplx(re[i], im[i]);
    return PureState(std::move(v), std::move(dims));
  }
  if (kind == "mixed") {
    const std::vector<double> re = detail::read_real_matrix(re_j, "re", d);
    const std::vector<double> im = detail::read_real_matrix(im_j, "im", d);
    ComplexMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = cplx(re[i * d + k], im[i * d + k]);
    return DensityMatrix(std::move(m), std::move(dims));
  }
  throw invalid_state_error("field 'kind' must be \"pure\" or \"mixed\", got \"" + kind + "\"");
}

inline AnyState load_state(const std::string& path) {
  const json doc = detail::parse_json_file(path);
  try {
    return parse_state(doc);
  } catch (const json::exception& e) {
    throw invalid_state_error("'" + path + "': " + e.what());
  } catch (const error& e) {
    throw invalid_state_error("'" + path + "': " + e.what());
  }
}

inline json state_to_json(const PureState& psi) {
  return {{"dims", psi.has_dims() ? psi.dims() : Dims{psi.dim()}},
          {"kind", "pure"},
          {"re", detail::real_list(psi.amplitudes(), false)},
          {"im", detail::real_list(psi.amplitudes(), true)}};
}

inline json state_to_json(const DensityMatrix& rho) {
  return {{"dims", rho.has_dims() ? rho.dims() : Dims{rho.dim()}},
          {"kind", "mixed"},
          {"re", detail::real_rows(rho.matrix(), false)},
          {"im", detail::real_rows(rho.matrix(), true)}};
}

inline DensityMatrix as_density_matrix(const AnyState& s) {
  if (const auto* psi = std::get_if<PureState>(&s)) return DensityMatrix::from_pure(*psi);
  return std::get<DensityMatrix>(s);
}

inline ComplexMatrix load_unitary(const std::string& path) {
  const json doc = detail::parse_json_file(path);
  try {
    const json& re_j = detail::require(doc, "re");
    if (!re_j.is_array() || re_j.empty()) throw invalid_state_error("field 're' must be a non-empty matrix");
    const std::size_t d = re_j.front().is_array() ? re_j.size()
                                                  : static_cast<std::size_t>(std::llround(std::sqrt(re_j.size())));
    const std::vector<double> re = detail::read_real_matrix(re_j, "re", d);
    const std::vector<double> im = detail::read_real_matrix(detail::require(doc, "im"), "im", d);
    ComplexMatrix u(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k)
        u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = cplx(re[i * d + k], im[i * d + k]);
    return u;
  } catch (const json::exception& e) {
    throw invalid_state_error("'" + path + "': " + e.what());
  }
}

/// Decomposition as {"kind": "decomposition", "states": [{"probability": p, <state fields>}, ...]}.
inline json decomposition_to_json(const std::vector<WeightedState>& parts) {
  json states = json::array();
  for (const WeightedState& w : parts) {
    json s = state_to_json(w.state);
    s["probability"] = w.probability;
    states.push_back(std::move(s));
  }
  return {{"kind", "decomposition"}, {"states", std::move(states)}};
}

// ---------------------------------------------------------------------------
// Output records

enum class OutputFormat { human, structured, csv };

/// 12 significant digits; inf and nan spelled out so they parse back with strtod.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

/// Ordered key/value pairs printed in one of the three output formats.
class Record {
public:
  Record& add(std::string key, double value) { return add_text(std::move(key), format_number(value)); }
  Record& add(std::string key, int value) { return add_text(std::move(key), std::to_string(value)); }
  Record& add(std::string key, bool value) { return add_text(std::move(key), value ? "true" : "false"); }
  Record& add(std::string key, const char* value) { return add_text(std::move(key), value); }
  Record& add(std::string key, std::string value) { return add_text(std::move(key), std::move(value)); }

  Record& add(std::string key, const std::vector<double>& values) {
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) joined += (i ? "," : "") + format_number(values[i]);
    return add_text(std::move(key), joined);
  }

  const std::vector<std::pair<std::string, std::string>>& fields() const { return fields_; }

  void write(std::ostream& out, OutputFormat format) const {
    switch (format) {
      case OutputFormat::structured:
        for (const auto& [k, v] : fields_) out << k << ": " << v << '\n';
        break;
      case OutputFormat::csv: {
        for (std::size_t i = 0; i < fields_.size(); ++i) out << (i ? "," : "") << fields_[i].first;
        out << '\n';
        for (std::size_t i = 0; i < fields_.size(); ++i) out << (i ? "," : "") << csv_quote(fields_[i].second);
        out << '\n';
        break;
      }
      case OutputFormat::human: {
        std::size_t width = 0;
        for (const auto& f : fields_) width = std::max(width, f.first.size());
        for (const auto& [k, v] : fields_) {
          std::string label = k;
          std::replace(label.begin(), label.end(), '_', ' ');
          out << std::left << std::setw(static_cast<int>(width) + 2) << label << v << '\n';
        }
        break;
      }
    }
  }

private:
  Record& add_text(std::string key, std::string value) {
    fields_.emplace_back(std::move(key), std::move(value));
    return *this;
  }

  static std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }

  std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace qtex

#endif
