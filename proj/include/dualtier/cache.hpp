#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "dualtier/encoding.hpp"
#include "dualtier/io.hpp"
#include "dualtier/matrix.hpp"
#include "dualtier/normalize.hpp"

namespace dualtier {

/// Encoded dataset ready for experiments: the numeric matrix plus everything
/// needed to reproduce or invert the preparation. Values are stored encoded
/// but NOT normalized; min-max params are refit on each training split at run
/// time (the sidecar copy, fit on the whole file, is for deployment use).
struct PreparedDataset {
  FeatureMatrix matrix;
  std::vector<std::string> feature_names;
  std::string label_column;
  EncodingMap encoding;
  NormalizationParams full_file_norm;
  std::vector<std::string> dropped_columns;
};

namespace cache_format {
constexpr char kMagic[5] = "DTID";
constexpr std::uint32_t kVersion = 1;
}  // namespace cache_format

/// Binary cache: magic "DTID", version, n_rows, n_cols, label flag, row-major
/// 64-bit floats, then per-row class ids when labeled.
inline void write_dataset_cache(const std::filesystem::path& path,
                                const FeatureMatrix& m) {
  BlobWriter w;
  w.magic(cache_format::kMagic);
  w.u32(cache_format::kVersion);
  w.u64(m.n_rows);
  w.u64(m.n_cols);
  w.u8(m.has_labels() ? 1 : 0);
  for (double v : m.values) w.f64(v);
  if (m.has_labels()) {
    for (int id : m.labels) w.i32(id);
  }
  atomic_write_file(path, w.buffer());
}

/// Reads the matrix block; class names come from the sidecar.
inline FeatureMatrix read_dataset_cache(const std::filesystem::path& path) {
  BlobReader r(read_file_bytes(path));
  r.magic(cache_format::kMagic);
  const std::uint32_t version = r.u32();
  if (version != cache_format::kVersion) {
    throw DataError(path.string() + ": unsupported cache version " +
                    std::to_string(version));
  }
  FeatureMatrix m;
  m.n_rows = r.u64();
  m.n_cols = r.u64();
  const bool labeled = r.u8() != 0;
  m.values.resize(m.n_rows * m.n_cols);
  for (auto& v : m.values) v = r.f64();
  if (labeled) {
    m.labels.resize(m.n_rows);
    for (auto& id : m.labels) id = r.i32();
  }
  return m;
}

namespace detail {

// Sidecar values are percent-escaped so '=', newlines and leading/trailing
// spaces in category names survive the round trip.
inline std::string kv_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '%' || ch == '=' || ch == '\n' || ch == '\r') {
      static const char hex[] = "0123456789abcdef";
      out += '%';
      out += hex[(static_cast<unsigned char>(ch) >> 4) & 0xf];
      out += hex[static_cast<unsigned char>(ch) & 0xf];
    } else {
      out += ch;
    }
  }
  return out;
}

inline std::string kv_unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

inline std::string f64_repr(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

/// Human-readable key-value sidecar: class names, encodings, normalization.
inline std::string render_sidecar(const PreparedDataset& d) {
  std::ostringstream out;
  out << "format = dualtier-dataset-meta/1\n";
  out << "label_column = " << detail::kv_escape(d.label_column) << "\n";
  out << "n_rows = " << d.matrix.n_rows << "\n";
  out << "n_cols = " << d.matrix.n_cols << "\n";
  for (std::size_t i = 0; i < d.feature_names.size(); ++i) {
    out << "feature." << i << " = " << detail::kv_escape(d.feature_names[i]) << "\n";
  }
  for (std::size_t i = 0; i < d.matrix.class_names.size(); ++i) {
    out << "class." << i << " = " << detail::kv_escape(d.matrix.class_names[i])
        << "\n";
  }
  for (const auto& name : d.dropped_columns) {
    out << "dropped = " << detail::kv_escape(name) << "\n";
  }
  for (const auto& [column, codes] : d.encoding.columns) {
    for (std::size_t code = 0; code < codes.categories.size(); ++code) {
      out << "encoding." << detail::kv_escape(column) << "." << code << " = "
          << detail::kv_escape(codes.categories[code]) << "\n";
    }
  }
  for (std::size_t c = 0; c < d.full_file_norm.n_cols(); ++c) {
    out << "norm." << c << " = " << detail::f64_repr(d.full_file_norm.x_min[c])
        << " " << detail::f64_repr(d.full_file_norm.x_max[c]) << "\n";
  }
  return out.str();
}

inline void save_prepared(const PreparedDataset& d,
                          const std::filesystem::path& cache_path,
                          const std::filesystem::path& sidecar_path) {
  write_dataset_cache(cache_path, d.matrix);
  atomic_write_file(sidecar_path, render_sidecar(d));
}

inline PreparedDataset load_prepared(const std::filesystem::path& cache_path,
                                     const std::filesystem::path& sidecar_path) {
  PreparedDataset d;
  d.matrix = read_dataset_cache(cache_path);

  std::ifstream in(sidecar_path);
  if (!in) throw DataError("cannot open sidecar: " + sidecar_path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) {
      throw DataError(sidecar_path.string() + ": line " +
                      std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = detail::kv_unescape(line.substr(eq + 3));
    if (key == "format" || key == "n_rows" || key == "n_cols") {
      continue;
    } else if (key == "label_column") {
      d.label_column = value;
    } else if (key.rfind("feature.", 0) == 0) {
      d.feature_names.push_back(value);
    } else if (key.rfind("class.", 0) == 0) {
      d.matrix.class_names.push_back(value);
    } else if (key == "dropped") {
      d.dropped_columns.push_back(value);
    } else if (key.rfind("encoding.", 0) == 0) {
      const std::string rest = key.substr(9);
      const auto dot = rest.rfind('.');
      const std::string column = detail::kv_unescape(rest.substr(0, dot));
      auto& codes = d.encoding.columns[column];
      codes.code_of.emplace(value, static_cast<int>(codes.categories.size()));
      codes.categories.push_back(value);
    } else if (key.rfind("norm.", 0) == 0) {
      std::istringstream vs(value);
      double lo = 0, hi = 0;
      vs >> lo >> hi;
      d.full_file_norm.x_min.push_back(lo);
      d.full_file_norm.x_max.push_back(hi);
    } else {
      throw DataError(sidecar_path.string() + ": line " +
                      std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (d.matrix.has_labels() &&
      d.matrix.class_names.empty()) {
    throw DataError(sidecar_path.string() + ": labeled cache but no classes");
  }
  return d;
}

}  // namespace dualtier
