#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mem3d/metrics.hpp"
#include "mem3d/retrieval.hpp"

namespace mem3d {

enum class Split { train, test, gen };

const char* split_name(Split s);
Split parse_split(const std::string& s);

struct ManifestRecord {
    std::string shape_id;
    std::string mesh_path; // relative to the manifest directory
    Split split = Split::train;
    std::string prompt; // optional
    std::string label;  // optional
};

// CSV manifest with header shape_id,mesh_path,split,prompt,label.
struct Manifest {
    std::filesystem::path base_dir;
    std::vector<ManifestRecord> records;

    std::vector<ManifestRecord> split(Split s) const;
    std::string resolve_path(const ManifestRecord& r) const;
    std::vector<ShapeRef> shape_refs(const std::vector<ManifestRecord>& records) const;
};

Manifest load_manifest(const std::string& path);

// LFD1 descriptor cache: magic "LFD1", u32 count, u32 views=10,
// u32 features=45, then per row u32 id length, id bytes, 450 f32. All
// little-endian; write -> read -> write is byte-identical.
void save_cache(const DescriptorCache& cache, const std::string& path);
DescriptorCache load_cache(const std::string& path);

// EMB1 embedding file: magic "EMB1", u32 count, u32 dim, count*dim f32
// payload, plus a newline-delimited id sidecar at <path>.ids. Values are
// stored raw; metric/FD consumers re-normalize on ingestion.
void save_embeddings(const EmbeddingSet& set, const std::string& path);
EmbeddingSet load_embeddings(const std::string& path);

inline std::string embedding_ids_path(const std::string& path) { return path + ".ids"; }

} // namespace mem3d
