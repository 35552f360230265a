#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dualtier/detector.hpp"
#include "dualtier/forest.hpp"
#include "dualtier/io.hpp"
#include "dualtier/matrix.hpp"
#include "dualtier/pipeline.hpp"

namespace dualtier {

/// Versioned binary envelope for fitted models ("DTMB") and pipeline
/// checkpoints ("DTCK"). All numbers little-endian; doubles bit-exact, so a
/// reloaded model reproduces identical scores.
namespace blob_format {
constexpr char kModelMagic[5] = "DTMB";
constexpr char kCheckpointMagic[5] = "DTCK";
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kKindIForest = 0;
constexpr std::uint32_t kKindLof = 1;
constexpr std::uint32_t kKindExternal = 2;
constexpr std::uint32_t kKindRandomForest = 3;
}  // namespace blob_format

namespace blob_detail {

inline void write_matrix(BlobWriter& w, const FeatureMatrix& m) {
  w.u64(m.n_rows);
  w.u64(m.n_cols);
  w.f64_vec(m.values);
  w.u8(m.has_labels() ? 1 : 0);
  if (m.has_labels()) w.i32_vec(m.labels);
  w.str_vec(m.class_names);
}

inline FeatureMatrix read_matrix(BlobReader& r) {
  FeatureMatrix m;
  m.n_rows = r.u64();
  m.n_cols = r.u64();
  m.values = r.f64_vec();
  if (r.u8() != 0) m.labels = r.i32_vec();
  m.class_names = r.str_vec();
  return m;
}

inline void write_index_vec(BlobWriter& w, const std::vector<std::size_t>& v) {
  w.u64(v.size());
  for (std::size_t x : v) w.u64(x);
}

inline std::vector<std::size_t> read_index_vec(BlobReader& r) {
  std::vector<std::size_t> v(r.u64());
  for (auto& x : v) x = static_cast<std::size_t>(r.u64());
  return v;
}

inline void write_spec(BlobWriter& w, const DetectorSpec& spec) {
  w.u32(static_cast<std::uint32_t>(spec.kind));
  w.u64(spec.n_trees);
  w.u64(spec.subsample_size);
  w.u64(spec.k_neighbors);
  w.u64(spec.seed);
  w.str(spec.external_name);
}

inline DetectorSpec read_spec(BlobReader& r) {
  DetectorSpec spec;
  spec.kind = static_cast<DetectorKind>(r.u32());
  spec.n_trees = r.u64();
  spec.subsample_size = r.u64();
  spec.k_neighbors = r.u64();
  spec.seed = r.u64();
  spec.external_name = r.str();
  return spec;
}

}  // namespace blob_detail

inline void write_occ_model(BlobWriter& w, const OccModel& model) {
  w.magic(blob_format::kModelMagic);
  w.u32(blob_format::kVersion);
  std::uint32_t kind = blob_format::kKindExternal;
  if (std::holds_alternative<IForestModel>(model.impl)) kind = blob_format::kKindIForest;
  if (std::holds_alternative<LofModel>(model.impl)) kind = blob_format::kKindLof;
  w.u32(kind);
  blob_detail::write_spec(w, model.spec);
  w.u64(model.n_features);
  w.f64(model.threshold.mean);
  w.f64(model.threshold.std_dev);
  w.f64(model.threshold.th);

  if (kind == blob_format::kKindIForest) {
    const auto& f = std::get<IForestModel>(model.impl);
    w.u64(f.subsample);
    w.u64(f.trees.size());
    for (const auto& tree : f.trees) {
      w.u64(tree.nodes.size());
      for (const auto& n : tree.nodes) {
        w.i32(n.feature);
        w.f64(n.split);
        w.i32(n.left);
        w.i32(n.right);
        w.u32(n.size);
      }
    }
  } else if (kind == blob_format::kKindLof) {
    const auto& l = std::get<LofModel>(model.impl);
    w.u64(l.k);
    blob_detail::write_matrix(w, l.train);
    w.f64_vec(l.k_dist);
    w.f64_vec(l.lrd);
  } else {
    // external payloads live in the plug-in; only the identity is stored
    w.str(std::get<ExternalModel>(model.impl).name);
  }
}

inline OccModel read_occ_model(BlobReader& r) {
  r.magic(blob_format::kModelMagic);
  if (r.u32() != blob_format::kVersion) {
    throw DataError("unsupported model blob version");
  }
  const std::uint32_t kind = r.u32();
  OccModel model;
  model.spec = blob_detail::read_spec(r);
  model.n_features = r.u64();
  model.threshold.mean = r.f64();
  model.threshold.std_dev = r.f64();
  model.threshold.th = r.f64();

  if (kind == blob_format::kKindIForest) {
    IForestModel f;
    f.n_features = model.n_features;
    f.subsample = r.u64();
    f.trees.resize(r.u64());
    for (auto& tree : f.trees) {
      tree.nodes.resize(r.u64());
      for (auto& n : tree.nodes) {
        n.feature = r.i32();
        n.split = r.f64();
        n.left = r.i32();
        n.right = r.i32();
        n.size = r.u32();
      }
    }
    model.impl = std::move(f);
  } else if (kind == blob_format::kKindLof) {
    LofModel l;
    l.n_features = model.n_features;
    l.k = r.u64();
    l.train = blob_detail::read_matrix(r);
    l.k_dist = r.f64_vec();
    l.lrd = r.f64_vec();
    model.impl = std::move(l);
  } else {
    const std::string name = r.str();
    throw DataError("cannot reload external detector '" + name +
                    "': plug-in scorers are not serializable");
  }
  return model;
}

inline void write_forest_model(BlobWriter& w, const ForestModel& model) {
  w.magic(blob_format::kModelMagic);
  w.u32(blob_format::kVersion);
  w.u32(blob_format::kKindRandomForest);
  w.u64(model.params.n_trees);
  w.u64(model.params.mtry);
  w.u64(model.params.max_depth);
  w.u64(model.params.min_samples_leaf);
  w.u64(model.params.seed);
  w.str_vec(model.class_names);
  w.u64(model.n_features);
  w.u64(model.trees.size());
  for (const auto& tree : model.trees) {
    w.u64(tree.nodes.size());
    for (const auto& n : tree.nodes) {
      w.i32(n.feature);
      w.f64(n.threshold);
      w.i32(n.left);
      w.i32(n.right);
      w.f64_vec(n.counts);
    }
  }
}

inline ForestModel read_forest_model(BlobReader& r) {
  r.magic(blob_format::kModelMagic);
  if (r.u32() != blob_format::kVersion) {
    throw DataError("unsupported model blob version");
  }
  if (r.u32() != blob_format::kKindRandomForest) {
    throw DataError("blob is not a random forest");
  }
  ForestModel model;
  model.params.n_trees = r.u64();
  model.params.mtry = r.u64();
  model.params.max_depth = r.u64();
  model.params.min_samples_leaf = r.u64();
  model.params.seed = r.u64();
  model.class_names = r.str_vec();
  model.n_features = r.u64();
  model.trees.resize(r.u64());
  for (auto& tree : model.trees) {
    tree.nodes.resize(r.u64());
    for (auto& n : tree.nodes) {
      n.feature = r.i32();
      n.threshold = r.f64();
      n.left = r.i32();
      n.right = r.i32();
      n.counts = r.f64_vec();
    }
  }
  return model;
}

/// Full pipeline checkpoint: a manifest (version, known classes) followed by
/// the three model blobs, retained training matrices, and the bucket.
inline void save_checkpoint(const std::filesystem::path& path,
                            const PipelineState& state) {
  BlobWriter w;
  w.magic(blob_format::kCheckpointMagic);
  w.u32(blob_format::kVersion);
  w.u64(state.version);
  w.str_vec(state.known_classes);
  write_occ_model(w, state.tier1);
  write_occ_model(w, state.tier2);
  write_forest_model(w, state.family_model);
  blob_detail::write_matrix(w, state.tier2_train);
  blob_detail::write_matrix(w, state.family_train);
  blob_detail::write_matrix(w, state.bucket.rows);
  w.str_vec(state.bucket.true_labels);
  w.u64(state.bucket.capacity);
  blob_detail::write_index_vec(w, state.tier1_fit_rows);
  blob_detail::write_index_vec(w, state.tier2_fit_rows);
  atomic_write_file(path, w.buffer());
}

inline PipelineState load_checkpoint(const std::filesystem::path& path) {
  BlobReader r(read_file_bytes(path));
  r.magic(blob_format::kCheckpointMagic);
  if (r.u32() != blob_format::kVersion) {
    throw DataError(path.string() + ": unsupported checkpoint version");
  }
  PipelineState state;
  state.version = r.u64();
  state.known_classes = r.str_vec();
  state.tier1 = read_occ_model(r);
  state.tier2 = read_occ_model(r);
  state.family_model = read_forest_model(r);
  state.tier2_train = blob_detail::read_matrix(r);
  state.family_train = blob_detail::read_matrix(r);
  state.bucket.rows = blob_detail::read_matrix(r);
  state.bucket.true_labels = r.str_vec();
  state.bucket.capacity = r.u64();
  state.tier1_fit_rows = blob_detail::read_index_vec(r);
  state.tier2_fit_rows = blob_detail::read_index_vec(r);
  return state;
}

inline void save_occ_model(const std::filesystem::path& path, const OccModel& m) {
  BlobWriter w;
  write_occ_model(w, m);
  atomic_write_file(path, w.buffer());
}

inline OccModel load_occ_model(const std::filesystem::path& path) {
  BlobReader r(read_file_bytes(path));
  return read_occ_model(r);
}

inline void save_forest_model(const std::filesystem::path& path,
                              const ForestModel& m) {
  BlobWriter w;
  write_forest_model(w, m);
  atomic_write_file(path, w.buffer());
}

inline ForestModel load_forest_model(const std::filesystem::path& path) {
  BlobReader r(read_file_bytes(path));
  return read_forest_model(r);
}

}  // namespace dualtier
