#ifndef RTE_ARTIFACT_IO_HPP
#define RTE_ARTIFACT_IO_HPP

#include "rte/tar.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rte {

/// A named row-major array of doubles.
struct Tensor {
    std::string name;
    std::vector<std::uint64_t> dims;
    std::vector<double> data;
};

/// Binary file layout: magic "TARROM1\0", a version byte, a u64 tensor count, then per tensor
/// a u32 name length, the name, a u8 rank, u64 dims and the values, all little-endian.
/// A u64 byte count and UTF-8 "key=value" lines close the file.
struct TensorArchive {
    std::vector<Tensor> tensors;
    std::vector<std::pair<std::string, std::string>> metadata;

    void put(std::string name, const Matrix& m);
    void put(std::string name, const Vector& v);
    void put_meta(std::string key, std::string value);

    const Tensor* find(const std::string& name) const;
    /// Throws FormatError when the tensor is missing or has a different rank.
    Matrix matrix(const std::string& name) const;
    Vector vector(const std::string& name) const;
    const std::string& meta(const std::string& key) const;
    bool has_meta(const std::string& key) const;
};

inline constexpr std::uint8_t archive_version = 1;

void write_archive(const TensorArchive& archive, const std::string& path);
/// Throws FormatError on a bad magic or version, truncation, or trailing bytes.
TensorArchive read_archive(const std::string& path);

/// Offline products persisted together; absent members are simply not stored.
struct OfflineBundle {
    std::shared_ptr<const ReducedBasis> ig;  // solution basis, shared with the TAR artifacts
    std::optional<TarArtifact> tar_si;
    std::optional<TarArtifact> tar_fgmres;
    std::shared_ptr<const ReducedBasis> romsad;
    RomsadConfig romsad_config;
    std::vector<std::pair<std::string, std::string>> metadata;
};

void save_artifact(const TarArtifact& artifact, const std::string& path);
/// Throws FormatError on malformed files or bases inconsistent with their metadata.
TarArtifact load_artifact(const std::string& path);

void save_bundle(const OfflineBundle& bundle, const std::string& path);
OfflineBundle load_bundle(const std::string& path);

/// Exact text form of a double, hexadecimal, for metadata.
std::string exact_text(double x);
double parse_exact(const std::string& text);

} // namespace rte

#endif
