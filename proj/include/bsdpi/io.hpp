#ifndef BSDPI_IO_HPP
#define BSDPI_IO_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "bsdpi/bounds.hpp"
#include "bsdpi/channels.hpp"
#include "bsdpi/matcore.hpp"
#include "bsdpi/recovery.hpp"
#include "bsdpi/states.hpp"

namespace bsdpi::io {

using nlohmann::json;

/// Shortest decimal string that reads back to the same double; '.' decimal
/// point regardless of locale.
inline std::string format_double(double x)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Matrices: {"rows", "cols", "entries": [[re, im], ...]} row-major. Square
// matrices (states) use {"dim", "entries"}.

inline json entries_to_json(const Matrix& m)
{
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      entries.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
  }
  return entries;
}

inline json matrix_to_json(const Matrix& m)
{
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries_to_json(m)}};
}

inline json state_to_json(const Matrix& m) { return json{{"dim", m.rows()}, {"entries", entries_to_json(m)}}; }

inline json state_to_json(const DensityMatrix& rho) { return state_to_json(rho.mat()); }

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what)
{
  throw Error(ErrorKind::ParseError, where + ": " + what);
}

inline int read_dim(const json& j, const char* key, const std::string& where)
{
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 1) {
    fail(where, std::string("field '") + key + "' must be a positive integer");
  }
  return static_cast<int>(j.at(key).get<long long>());
}

inline Matrix read_entries(const json& j, int rows, int cols, const std::string& where)
{
  if (!j.contains("entries") || !j.at("entries").is_array()) {
    fail(where, "field 'entries' must be an array");
  }
  const json& e = j.at("entries");
  if (e.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    fail(where, "expected " + std::to_string(rows * cols) + " entries, found " + std::to_string(e.size()));
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (int i = 0; i < rows; ++i) {
    for (int c = 0; c < cols; ++c, ++k) {
      const json& z = e.at(k);
      if (!z.is_array() || z.size() != 2 || !z.at(0).is_number() || !z.at(1).is_number()) {
        fail(where, "entry " + std::to_string(k) + " must be [re, im]");
      }
      m(i, c) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
    }
  }
  return m;
}

} // namespace detail

inline Matrix matrix_from_json(const json& j, const std::string& where = "matrix")
{
  if (!j.is_object()) {
    detail::fail(where, "expected an object");
  }
  if (j.contains("dim")) {
    const int d = detail::read_dim(j, "dim", where);
    return detail::read_entries(j, d, d, where);
  }
  const int rows = detail::read_dim(j, "rows", where);
  const int cols = detail::read_dim(j, "cols", where);
  return detail::read_entries(j, rows, cols, where);
}

inline Matrix state_matrix_from_json(const json& j, const std::string& where = "state")
{
  const Matrix m = matrix_from_json(j, where);
  if (m.rows() != m.cols()) {
    detail::fail(where, "state must be square");
  }
  return m;
}

inline DensityMatrix state_from_json(const json& j, const std::string& where = "state")
{
  return DensityMatrix::from_matrix(state_matrix_from_json(j, where));
}

inline json channel_to_json(const KrausChannel& t)
{
  json kraus = json::array();
  for (const auto& k : t.kraus()) {
    kraus.push_back(matrix_to_json(k));
  }
  return json{{"d_in", t.d_in()}, {"d_out", t.d_out()}, {"kraus", kraus}};
}

inline KrausChannel channel_from_json(const json& j, const std::string& where = "channel")
{
  if (!j.is_object()) {
    detail::fail(where, "expected an object");
  }
  const int d_in = detail::read_dim(j, "d_in", where);
  const int d_out = detail::read_dim(j, "d_out", where);
  if (!j.contains("kraus") || !j.at("kraus").is_array() || j.at("kraus").empty()) {
    detail::fail(where, "field 'kraus' must be a non-empty array");
  }
  std::vector<Matrix> ops;
  for (std::size_t a = 0; a < j.at("kraus").size(); ++a) {
    const std::string w = where + ".kraus[" + std::to_string(a) + "]";
    const json& k = j.at("kraus").at(a);
    Matrix m = k.is_object() && k.contains("dim") ? matrix_from_json(k, w)
                                                   : detail::read_entries(k, d_out, d_in, w);
    if (m.rows() != d_out || m.cols() != d_in) {
      detail::fail(w, "Kraus operator is not d_out x d_in");
    }
    ops.push_back(std::move(m));
  }
  return KrausChannel(std::move(ops));
}

/// Parses text, mapping syntax errors to ParseError with line and column.
inline json parse_text(const std::string& text, const std::string& where)
{
  try {
    return json::parse(text);
  } catch (const json::parse_error& err) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(err.byte == 0 ? 0 : err.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError,
                where + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline json read_json_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::ParseError, path + ": cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

inline void write_text_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::ConfigError, path + ": cannot open for writing");
  }
  out << text;
}

// ---------------------------------------------------------------------------
// Reports

inline std::string hex64(std::uint64_t h)
{
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json report_to_json(const RecoveryReport& r)
{
  return json{{"gap_bs", r.gap_bs},
              {"residual_eq2", r.residual_eq2},
              {"residual_eq3", r.residual_eq3},
              {"residual_bs_recovery", r.residual_bs_recovery},
              {"residual_petz", r.residual_petz},
              {"renyi2_gap", r.renyi2_gap},
              {"gamma_sup", r.gamma_sup},
              {"equality_threshold", r.equality_threshold()},
              {"inputs", {{"sigma", hex64(r.sigma_hash)}, {"rho", hex64(r.rho_hash)}, {"channel", hex64(r.channel_hash)}}}};
}

inline json report_to_json(const BoundReport& r)
{
  return json{{"gap", r.gap},
              {"rhs", r.rhs},
              {"rhs_k", r.rhs_k},
              {"rhs_l", r.rhs_l},
              {"residual_k", r.residual_k},
              {"residual_l", r.residual_l},
              {"slack", r.slack},
              {"precondition_ok", r.precondition_ok},
              {"regularized", r.regularized},
              {"gap_increment", r.gap_increment},
              {"constants",
               {{"gamma_sup", r.constants.gamma_sup},
                {"sigma_inv_sup", r.constants.sigma_inv_sup},
                {"C", r.constants.C},
                {"alpha", r.constants.alpha},
                {"K", r.constants.K},
                {"L", r.constants.L}}}};
}

// ---------------------------------------------------------------------------
// Campaign CSV

inline constexpr const char* csv_header = "seed,d,family,gap,rhs_k,rhs_l,precondition_ok,slack";

struct CsvRow {
  std::uint64_t seed = 0;
  int d = 0;
  std::string family;
  double gap = 0.0;
  double rhs_k = 0.0;
  double rhs_l = 0.0;
  bool precondition_ok = true;
  double slack = 0.0;
};

inline std::string csv_line(const CsvRow& r)
{
  return std::to_string(r.seed) + "," + std::to_string(r.d) + "," + r.family + "," + format_double(r.gap) + "," +
         format_double(r.rhs_k) + "," + format_double(r.rhs_l) + "," + (r.precondition_ok ? "1" : "0") + "," +
         format_double(r.slack);
}

inline std::string csv_document(const std::vector<CsvRow>& rows)
{
  std::string out = std::string(csv_header) + "\n";
  for (const auto& r : rows) {
    out += csv_line(r);
    out += "\n";
  }
  return out;
}

} // namespace bsdpi::io

#endif // BSDPI_IO_HPP
