#pragma once

// Persistence: IDX datasets, the binary forest file and the per-tree text
// memory dumps. Every parse failure throws FormatError naming the byte
// offset or line; nothing partially parsed is returned.
//
// Forest file layout, little-endian throughout:
//   "RFHW" | version u8 (=1) | T u32 | K u32 | p u32 | l u32
//   T times: coord memory, addresses 1 .. 2^l - 1, u16 each
//            value memory, addresses 1 .. 2^(l+1) - 1, u8 each
//
// Memory dump directory:
//   forest.txt           "trees T", "classes K", "features p", "levels l"
//   tree_NNNN.mem        one line per address 1 .. 2^(l+1) - 1:
//                        "<addr hex> <coord decimal or -> <value decimal>"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rfhw/dataset.hpp"
#include "rfhw/errors.hpp"
#include "rfhw/forest_engine.hpp"

namespace rfhw {

inline constexpr std::uint8_t kForestFormatVersion = 1;
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Reads an IDX image file (u8, 3 dims) and label file (u8, 1 dim). Each image
// is flattened row-major into p = rows * cols features. K is set to
// max label + 1.
Dataset load_idx(const std::filesystem::path& image_path,
                 const std::filesystem::path& label_path);

// In-memory variants; `source` names the buffer in error messages.
std::vector<std::uint8_t> parse_idx_images(std::span<const std::uint8_t> bytes,
                                           const std::string& source,
                                           std::uint32_t& rows, std::uint32_t& cols,
                                           std::uint32_t& count);
std::vector<ClassLabel> parse_idx_labels(std::span<const std::uint8_t> bytes,
                                         const std::string& source);

// Writes IDX files; used to build fixtures and subsets.
void save_idx(const Dataset& data, std::uint32_t rows, std::uint32_t cols,
              const std::filesystem::path& image_path,
              const std::filesystem::path& label_path);

std::vector<std::uint8_t> serialize_forest(const ForestModel& forest);
ForestModel parse_forest(std::span<const std::uint8_t> bytes, const std::string& source);
std::uint64_t forest_file_size(std::uint32_t num_trees, std::uint32_t levels);

void save_forest(const ForestModel& forest, const std::filesystem::path& path);
ForestModel load_forest(const std::filesystem::path& path);

std::string format_memory_image(const TreeMemoryImage& tree);
TreeMemoryImage parse_memory_image(const std::string& text, std::uint32_t levels,
                                   const std::string& source);

void export_mem(const ForestModel& forest, const std::filesystem::path& dir);
ForestModel import_mem(const std::filesystem::path& dir);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace rfhw
