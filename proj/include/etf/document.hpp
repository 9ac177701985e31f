#pragma once

// JSON documents exchanged by the command-line tool. One object per file,
// discriminated by "kind":
//   {"kind": "matrix", "dim": n, "data": [[row-major reals]]}
//   {"kind": "frame" | "decomposition", "dim": n, "vectors": [[...], ...]}
//   {"kind": "axes", "coeffs": [...], "basis": [[axis vector], ...]}   (basis optional)
//   {"kind": "diag", "entries": [...], "alpha": x}
// An optional "meta" object records the producing tool and tolerances.

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "etf/diag_stream.hpp"
#include "etf/ellipsoid.hpp"
#include "etf/frame.hpp"
#include "etf/operator.hpp"

namespace etf::io {

using json = nlohmann::json;

inline constexpr std::string_view kToolName = "etfkit";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Malformed or unreadable document.
class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DocKind { Matrix, Axes, Frame, Decomposition, Diag };

constexpr std::string_view to_string(DocKind k) {
  switch (k) {
    case DocKind::Matrix: return "matrix";
    case DocKind::Axes: return "axes";
    case DocKind::Frame: return "frame";
    case DocKind::Decomposition: return "decomposition";
    case DocKind::Diag: return "diag";
  }
  return "unknown";
}

struct Metadata {
  std::string tool{kToolName};
  std::string version{kToolVersion};
  std::optional<ToleranceConfig> tolerances;
};

struct AxesPayload {
  Vector coeffs;
  Matrix basis;  // columns are the axis directions
};

struct Document {
  DocKind kind = DocKind::Matrix;
  std::variant<SymmetricOperator, AxesPayload, Frame, DiagSpec> payload;
  Metadata meta;

  const SymmetricOperator& matrix() const { return get<SymmetricOperator>("matrix"); }
  const AxesPayload& axes() const { return get<AxesPayload>("axes"); }
  const Frame& frame() const { return get<Frame>("frame"); }
  const DiagSpec& diag() const { return get<DiagSpec>("diag"); }

 private:
  template <class T>
  const T& get(const char* want) const {
    if (const T* p = std::get_if<T>(&payload)) return *p;
    throw DocumentError(std::string("expected a ") + want + " document, got " + std::string(to_string(kind)));
  }
};

inline Document matrix_document(const SymmetricOperator& m) { return {DocKind::Matrix, m, {}}; }
inline Document frame_document(const Frame& f) { return {DocKind::Frame, f, {}}; }
inline Document decomposition_document(const Frame& f) { return {DocKind::Decomposition, f, {}}; }
inline Document axes_document(const Vector& coeffs) {
  return {DocKind::Axes, AxesPayload{coeffs, Matrix::Identity(coeffs.size(), coeffs.size())}, {}};
}
inline Document diag_document(const DiagSpec& d) { return {DocKind::Diag, d, {}}; }

inline Ellipsoid to_ellipsoid(const AxesPayload& ax, const ToleranceConfig& cfg = {}) {
  return Ellipsoid::from_axes(ax.coeffs, ax.basis, cfg);
}

namespace detail {

inline json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline double number(const json& j, const char* what) {
  if (!j.is_number()) throw DocumentError(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw DocumentError(std::string(what) + " must be finite");
  return v;
}

inline Vector vector_from(const json& j, const char* what) {
  if (!j.is_array()) throw DocumentError(std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
  return v;
}

inline const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DocumentError(std::string("missing field \"") + key + "\"");
  return *it;
}

inline std::size_t dim_field(const json& j) {
  const json& d = field(j, "dim");
  if (!d.is_number_integer() || d.get<long long>() < 1) throw DocumentError("\"dim\" must be a positive integer");
  return d.get<std::size_t>();
}

inline json tolerances_json(const ToleranceConfig& c) {
  return json{{"tol_rank", c.tol_rank},
              {"tol_psd", c.tol_psd},
              {"tol_recon", c.tol_recon},
              {"tol_orth", c.tol_orth},
              {"tol_bisect", c.tol_bisect}};
}

}  // namespace detail

inline json to_json(const Document& doc) {
  json j;
  j["kind"] = std::string(to_string(doc.kind));
  switch (doc.kind) {
    case DocKind::Matrix: {
      const Matrix& m = doc.matrix().matrix();
      j["dim"] = m.rows();
      json rows = json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(detail::vector_json(m.row(r).transpose()));
      j["data"] = std::move(rows);
      break;
    }
    case DocKind::Frame:
    case DocKind::Decomposition: {
      const Frame& f = doc.frame();
      j["dim"] = f.dim;
      json vecs = json::array();
      for (const Vector& v : f.vectors) vecs.push_back(detail::vector_json(v));
      j["vectors"] = std::move(vecs);
      if (!f.label.empty()) j["label"] = f.label;
      break;
    }
    case DocKind::Axes: {
      const AxesPayload& ax = doc.axes();
      j["coeffs"] = detail::vector_json(ax.coeffs);
      if (!ax.basis.isIdentity(0.0)) {
        json basis = json::array();
        for (Eigen::Index c = 0; c < ax.basis.cols(); ++c) basis.push_back(detail::vector_json(ax.basis.col(c)));
        j["basis"] = std::move(basis);
      }
      break;
    }
    case DocKind::Diag: {
      const DiagSpec& d = doc.diag();
      j["entries"] = d.entries;
      j["alpha"] = d.alpha;
      break;
    }
  }
  json meta{{"tool", doc.meta.tool}, {"version", doc.meta.version}};
  if (doc.meta.tolerances) meta["tolerances"] = detail::tolerances_json(*doc.meta.tolerances);
  j["meta"] = std::move(meta);
  return j;
}

inline Document from_json(const json& j, const ToleranceConfig& cfg = {}) {
  if (!j.is_object()) throw DocumentError("document must be a JSON object");
  const json& kind_field = detail::field(j, "kind");
  if (!kind_field.is_string()) throw DocumentError("\"kind\" must be a string");
  const std::string kind = kind_field.get<std::string>();

  Document doc;
  if (auto it = j.find("meta"); it != j.end() && it->is_object()) {
    doc.meta.tool = it->value("tool", std::string{});
    doc.meta.version = it->value("version", std::string{});
    if (auto t = it->find("tolerances"); t != it->end() && t->is_object()) {
      ToleranceConfig c;
      c.tol_rank = t->value("tol_rank", c.tol_rank);
      c.tol_psd = t->value("tol_psd", c.tol_psd);
      c.tol_recon = t->value("tol_recon", c.tol_recon);
      c.tol_orth = t->value("tol_orth", c.tol_orth);
      c.tol_bisect = t->value("tol_bisect", c.tol_bisect);
      doc.meta.tolerances = c;
    }
  }

  if (kind == "matrix") {
    const std::size_t n = detail::dim_field(j);
    const json& data = detail::field(j, "data");
    if (!data.is_array() || data.size() != n) throw DocumentError("\"data\" must hold dim rows");
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      const Vector row = detail::vector_from(data[r], "matrix row");
      if (static_cast<std::size_t>(row.size()) != n) throw DocumentError("matrix row has the wrong length");
      m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > cfg.tol_recon * scale) {
      throw DocumentError("matrix is not symmetric");
    }
    doc.kind = DocKind::Matrix;
    doc.payload = SymmetricOperator(m);
  } else if (kind == "frame" || kind == "decomposition") {
    Frame f;
    f.dim = detail::dim_field(j);
    const json& vecs = detail::field(j, "vectors");
    if (!vecs.is_array() || vecs.empty()) throw DocumentError("\"vectors\" must be a non-empty array");
    for (const json& v : vecs) {
      Vector x = detail::vector_from(v, "frame vector");
      if (static_cast<std::size_t>(x.size()) != f.dim) throw DocumentError("frame vector has the wrong length");
      f.vectors.push_back(std::move(x));
    }
    f.label = j.value("label", std::string{});
    doc.kind = kind == "frame" ? DocKind::Frame : DocKind::Decomposition;
    doc.payload = std::move(f);
  } else if (kind == "axes") {
    AxesPayload ax;
    ax.coeffs = detail::vector_from(detail::field(j, "coeffs"), "axis coefficient");
    const auto n = ax.coeffs.size();
    if (n == 0) throw DocumentError("\"coeffs\" must be non-empty");
    ax.basis = Matrix::Identity(n, n);
    if (auto it = j.find("basis"); it != j.end()) {
      if (!it->is_array() || static_cast<Eigen::Index>(it->size()) != n) throw DocumentError("\"basis\" must hold one vector per axis");
      for (Eigen::Index c = 0; c < n; ++c) {
        Vector b = detail::vector_from((*it)[static_cast<std::size_t>(c)], "basis vector");
        if (b.size() != n) throw DocumentError("basis vector has the wrong length");
        ax.basis.col(c) = b;
      }
    }
    doc.kind = DocKind::Axes;
    doc.payload = std::move(ax);
  } else if (kind == "diag") {
    DiagSpec d;
    const Vector e = detail::vector_from(detail::field(j, "entries"), "diagonal entry");
    if (e.size() == 0) throw DocumentError("\"entries\" must be non-empty");
    d.entries.assign(e.data(), e.data() + e.size());
    if (auto it = j.find("alpha"); it != j.end()) {
      d.alpha = detail::number(*it, "alpha");
    } else {
      d.alpha = std::nan("");
    }
    doc.kind = DocKind::Diag;
    doc.payload = std::move(d);
  } else {
    throw DocumentError("unknown document kind \"" + kind + "\"");
  }
  return doc;
}

inline std::string dump(const Document& doc) { return to_json(doc).dump(2) + "\n"; }

inline Document parse(std::string_view text, const ToleranceConfig& cfg = {}) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DocumentError(std::string("invalid JSON: ") + e.what());
  }
  try {
    return from_json(j, cfg);
  } catch (const json::exception& e) {
    throw DocumentError(std::string("invalid document: ") + e.what());
  }
}

inline Document read_document(const std::string& path, const ToleranceConfig& cfg = {}) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), cfg);
}

inline void write_document(const std::string& path, const Document& doc) {
  std::ofstream out(path);
  if (!out) throw DocumentError("cannot write " + path);
  out << dump(doc);
  if (!out) throw DocumentError("failed writing " + path);
}

}  // namespace etf::io
