#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "osteo/network.hpp"

namespace osteo::nn {

inline constexpr std::uint8_t kCheckpointVersion = 1;

struct TrainingMetadata {
    std::uint64_t seed = 0;
    std::uint32_t epochs = 0;
    double final_loss = 0.0;
    /// Free-form key=value lines (model kind, input mode, preprocessing).
    std::string notes;

    friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

/// Serialized network: architecture plus 32-bit weights.
///
/// On-disk layout, all integers and floats little-endian:
///   "OSTEO-NN" | u8 version
///   u32 input rank | u32 dims...
///   u32 layer count | per layer: u32 record length, u8 kind, u32 units
///   u32 tensor count | per tensor: u32 element count, f32 values...
///   u64 seed | u32 epochs | f64 final loss | u32 notes length | notes bytes
struct NetworkCheckpoint {
    std::uint8_t format_version = kCheckpointVersion;
    std::vector<std::uint32_t> input_shape;
    std::vector<LayerSpec> architecture;
    std::vector<std::vector<float>> weights;
    TrainingMetadata metadata;

    friend bool operator==(const NetworkCheckpoint&, const NetworkCheckpoint&) = default;
};

/// Narrows the network's weights to float; this is the only lossy step.
NetworkCheckpoint make_checkpoint(const Network& network, TrainingMetadata metadata);
Network network_from_checkpoint(const NetworkCheckpoint& checkpoint);

std::vector<std::uint8_t> save_checkpoint(const NetworkCheckpoint& checkpoint);
/// Throws DataError on a bad magic, unknown version, truncation or trailing bytes.
NetworkCheckpoint load_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint_file(const std::filesystem::path& path, const NetworkCheckpoint& checkpoint);
NetworkCheckpoint load_checkpoint_file(const std::filesystem::path& path);

}  // namespace osteo::nn
