#include "mem3d/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "mem3d/errors.hpp"

namespace mem3d {

const char* split_name(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::test: return "test";
    default: return "gen";
    }
}

Split parse_split(const std::string& s) {
    if (s == "train")
        return Split::train;
    if (s == "test")
        return Split::test;
    if (s == "gen")
        return Split::gen;
    throw DataError("manifest: invalid split tag '" + s + "' (expected train|test|gen)");
}

namespace {

// One CSV line -> fields; double quotes per RFC 4180, no embedded newlines.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted)
        throw DataError("manifest: unterminated quote on line " + std::to_string(line_no));
    fields.push_back(std::move(cur));
    return fields;
}

} // namespace

std::vector<ManifestRecord> Manifest::split(Split s) const {
    std::vector<ManifestRecord> out;
    for (const auto& r : records)
        if (r.split == s)
            out.push_back(r);
    return out;
}

std::string Manifest::resolve_path(const ManifestRecord& r) const {
    const std::filesystem::path p(r.mesh_path);
    if (p.is_absolute())
        return p.string();
    return (base_dir / p).string();
}

std::vector<ShapeRef> Manifest::shape_refs(const std::vector<ManifestRecord>& recs) const {
    std::vector<ShapeRef> refs;
    refs.reserve(recs.size());
    for (const auto& r : recs)
        refs.push_back({r.shape_id, resolve_path(r)});
    return refs;
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("manifest: cannot open " + path);

    Manifest manifest;
    manifest.base_dir = std::filesystem::path(path).parent_path();

    std::string line;
    if (!std::getline(in, line))
        throw DataError("manifest: empty file " + path);
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "shape_id,mesh_path,split,prompt,label")
        throw DataError("manifest: bad header in " + path +
                        " (expected shape_id,mesh_path,split,prompt,label)");

    std::set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto fields = split_csv_line(line, line_no);
        if (fields.size() != 5)
            throw DataError("manifest: line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected 5");
        ManifestRecord rec;
        rec.shape_id = fields[0];
        rec.mesh_path = fields[1];
        rec.split = parse_split(fields[2]);
        rec.prompt = fields[3];
        rec.label = fields[4];
        if (rec.shape_id.empty())
            throw DataError("manifest: empty shape_id on line " + std::to_string(line_no));
        if (!seen.insert(rec.shape_id).second)
            throw DataError("manifest: duplicate shape_id '" + rec.shape_id + "'");
        manifest.records.push_back(std::move(rec));
    }
    if (manifest.records.empty())
        throw DataError("manifest: no records in " + path);
    return manifest;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; serialization assumes an LE host");

void put_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), 4))
        throw DataError("truncated file " + path);
    return v;
}

} // namespace

void save_cache(const DescriptorCache& cache, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("save_cache: cannot open " + path);
    out.write("LFD1", 4);
    put_u32(out, static_cast<std::uint32_t>(cache.size()));
    put_u32(out, kViewCount);
    put_u32(out, kViewFeatureCount);
    for (std::size_t i = 0; i < cache.size(); ++i) {
        const std::string& id = cache.id(i);
        put_u32(out, static_cast<std::uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
        out.write(reinterpret_cast<const char*>(cache.row(i)), kCacheRowFloats * 4);
    }
    if (!out)
        throw DataError("save_cache: write failed for " + path);
}

DescriptorCache load_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("load_cache: cannot open " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "LFD1", 4) != 0)
        throw DataError("load_cache: bad magic in " + path + " (expected LFD1)");
    const std::uint32_t count = get_u32(in, path);
    const std::uint32_t views = get_u32(in, path);
    const std::uint32_t features = get_u32(in, path);
    if (views != kViewCount || features != kViewFeatureCount)
        throw DataError("load_cache: unsupported layout " + std::to_string(views) + "x" +
                        std::to_string(features) + " in " + path);

    DescriptorCache cache;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t len = get_u32(in, path);
        std::string id(len, '\0');
        if (!in.read(id.data(), len))
            throw DataError("load_cache: truncated id in " + path);
        float row[kCacheRowFloats];
        if (!in.read(reinterpret_cast<char*>(row), kCacheRowFloats * 4))
            throw DataError("load_cache: truncated row in " + path);
        cache.append(id, row);
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw DataError("load_cache: trailing bytes in " + path);
    return cache;
}

void save_embeddings(const EmbeddingSet& set, const std::string& path) {
    if (set.entries.empty())
        throw DataError("save_embeddings: empty set");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("save_embeddings: cannot open " + path);
    out.write("EMB1", 4);
    put_u32(out, static_cast<std::uint32_t>(set.entries.size()));
    put_u32(out, static_cast<std::uint32_t>(set.dim));
    std::vector<float> row(set.dim);
    for (const auto& [id, vec] : set.entries) {
        if (vec.values.size() != set.dim)
            throw DataError("save_embeddings: row dimension mismatch for '" + id + "'");
        for (std::size_t i = 0; i < set.dim; ++i)
            row[i] = static_cast<float>(vec.values[i]);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(set.dim * 4));
    }
    if (!out)
        throw DataError("save_embeddings: write failed for " + path);

    std::ofstream ids(embedding_ids_path(path), std::ios::binary);
    if (!ids)
        throw DataError("save_embeddings: cannot open " + embedding_ids_path(path));
    for (const auto& [id, vec] : set.entries)
        ids << id << "\n";
    if (!ids)
        throw DataError("save_embeddings: write failed for " + embedding_ids_path(path));
}

EmbeddingSet load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("load_embeddings: cannot open " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "EMB1", 4) != 0)
        throw DataError("load_embeddings: bad magic in " + path + " (expected EMB1)");
    const std::uint32_t count = get_u32(in, path);
    const std::uint32_t dim = get_u32(in, path);
    if (count == 0 || dim == 0)
        throw DataError("load_embeddings: empty header in " + path);

    const auto expected =
        static_cast<std::uintmax_t>(12) + static_cast<std::uintmax_t>(count) * dim * 4;
    if (std::filesystem::file_size(path) != expected)
        throw DataError("load_embeddings: payload size mismatch in " + path);

    std::ifstream ids_in(embedding_ids_path(path));
    if (!ids_in)
        throw DataError("load_embeddings: missing id sidecar " + embedding_ids_path(path));
    std::vector<std::string> ids;
    std::string id_line;
    std::set<std::string> seen;
    while (std::getline(ids_in, id_line)) {
        if (!id_line.empty() && id_line.back() == '\r')
            id_line.pop_back();
        if (!seen.insert(id_line).second)
            throw DataError("load_embeddings: duplicate id '" + id_line + "' in sidecar");
        ids.push_back(id_line);
    }
    if (ids.size() != count)
        throw DataError("load_embeddings: sidecar has " + std::to_string(ids.size()) +
                        " ids, file has " + std::to_string(count) + " rows");

    EmbeddingSet set;
    set.dim = dim;
    std::vector<float> row(dim);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(dim) * 4))
            throw DataError("load_embeddings: truncated payload in " + path);
        EmbeddingVector vec;
        vec.values.assign(row.begin(), row.end());
        set.entries.emplace_back(ids[i], std::move(vec));
    }
    return set;
}

} // namespace mem3d
