#include "rfhw/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <string_view>

namespace rfhw {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrc::open_failed, path.string(), 0, "cannot open for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatErrc::open_failed, path.string(), 0, "cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatErrc::write_failed, path.string(), 0, "short write");
}

namespace {

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, const std::string& source)
      : bytes_(bytes), source_(source) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw FormatError(FormatErrc::truncated, source_, pos_,
                        std::string(what) + ": expected " + std::to_string(pos_ + n) +
                            " bytes, file has " + std::to_string(bytes_.size()));
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }
  std::uint16_t u16le(const char* what) {
    need(2, what);
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32le(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }
  std::uint32_t u32be(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  void expect_end() const {
    if (remaining() != 0) {
      throw FormatError(FormatErrc::trailing_bytes, source_, pos_,
                        std::to_string(remaining()) + " unexpected bytes after payload");
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  const std::string& source_;
  std::size_t pos_ = 0;
};

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

std::vector<std::uint8_t> parse_idx_images(std::span<const std::uint8_t> bytes,
                                           const std::string& source, std::uint32_t& rows,
                                           std::uint32_t& cols, std::uint32_t& count) {
  ByteReader r(bytes, source);
  const std::uint32_t magic = r.u32be("magic");
  if (magic != kIdxImageMagic) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", magic);
    throw FormatError(FormatErrc::bad_magic, source, 0,
                      std::string("image magic ") + buf + ", expected 0x00000803");
  }
  count = r.u32be("image count");
  rows = r.u32be("row count");
  cols = r.u32be("column count");
  const std::uint64_t payload = std::uint64_t{count} * rows * cols;
  const auto data = r.take(static_cast<std::size_t>(payload), "image payload");
  r.expect_end();
  return {data.begin(), data.end()};
}

std::vector<ClassLabel> parse_idx_labels(std::span<const std::uint8_t> bytes,
                                         const std::string& source) {
  ByteReader r(bytes, source);
  const std::uint32_t magic = r.u32be("magic");
  if (magic != kIdxLabelMagic) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", magic);
    throw FormatError(FormatErrc::bad_magic, source, 0,
                      std::string("label magic ") + buf + ", expected 0x00000801");
  }
  const std::uint32_t count = r.u32be("label count");
  const auto data = r.take(count, "label payload");
  r.expect_end();
  return {data.begin(), data.end()};
}

Dataset load_idx(const fs::path& image_path, const fs::path& label_path) {
  std::uint32_t rows = 0, cols = 0, count = 0;
  Dataset d;
  d.features = parse_idx_images(read_file(image_path), image_path.string(), rows, cols, count);
  d.labels = parse_idx_labels(read_file(label_path), label_path.string());
  if (d.labels.size() != count) {
    throw FormatError(FormatErrc::dimension_mismatch, label_path.string(), 4,
                      std::to_string(d.labels.size()) + " labels for " +
                          std::to_string(count) + " images");
  }
  d.num_features = rows * cols;
  ClassLabel max_label = 0;
  for (auto l : d.labels) max_label = std::max(max_label, l);
  d.num_classes = d.labels.empty() ? 0 : max_label + 1;
  return d;
}

void save_idx(const Dataset& data, std::uint32_t rows, std::uint32_t cols,
              const fs::path& image_path, const fs::path& label_path) {
  if (std::uint64_t{rows} * cols != data.num_features) {
    throw std::invalid_argument("save_idx: rows * cols must equal p");
  }
  std::vector<std::uint8_t> img;
  img.reserve(16 + data.features.size());
  put_u32be(img, kIdxImageMagic);
  put_u32be(img, static_cast<std::uint32_t>(data.size()));
  put_u32be(img, rows);
  put_u32be(img, cols);
  img.insert(img.end(), data.features.begin(), data.features.end());
  write_file(image_path, img);

  std::vector<std::uint8_t> lab;
  put_u32be(lab, kIdxLabelMagic);
  put_u32be(lab, static_cast<std::uint32_t>(data.size()));
  for (auto l : data.labels) lab.push_back(static_cast<std::uint8_t>(l));
  write_file(label_path, lab);
}

std::uint64_t forest_file_size(std::uint32_t num_trees, std::uint32_t levels) {
  const std::uint64_t coords = (std::uint64_t{1} << levels) - 1;
  const std::uint64_t values = (std::uint64_t{2} << levels) - 1;
  return 4 + 1 + 4 * 4 + std::uint64_t{num_trees} * (coords * 2 + values);
}

std::vector<std::uint8_t> serialize_forest(const ForestModel& forest) {
  forest.validate();
  std::vector<std::uint8_t> out;
  out.reserve(forest_file_size(forest.num_trees(), forest.levels));
  for (char c : std::string_view("RFHW")) out.push_back(static_cast<std::uint8_t>(c));
  out.push_back(kForestFormatVersion);
  put_u32le(out, forest.num_trees());
  put_u32le(out, forest.num_classes);
  put_u32le(out, forest.num_features);
  put_u32le(out, forest.levels);
  for (const auto& tree : forest.trees) {
    for (std::uint32_t a = 1; a < tree.first_leaf(); ++a) {
      const std::uint16_t c = tree.coord_mem()[a];
      out.push_back(static_cast<std::uint8_t>(c & 0xFF));
      out.push_back(static_cast<std::uint8_t>(c >> 8));
    }
    for (std::uint32_t a = 1; a < tree.end_address(); ++a) out.push_back(tree.value_mem()[a]);
  }
  return out;
}

ForestModel parse_forest(std::span<const std::uint8_t> bytes, const std::string& source) {
  ByteReader r(bytes, source);
  const auto magic = r.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), std::string_view("RFHW").begin())) {
    throw FormatError(FormatErrc::bad_magic, source, 0, "expected \"RFHW\"");
  }
  const std::uint8_t version = r.u8("version");
  if (version != kForestFormatVersion) {
    throw FormatError(FormatErrc::bad_version, source, 4,
                      "version " + std::to_string(version) + ", supported " +
                          std::to_string(kForestFormatVersion));
  }
  ForestModel f;
  const std::uint32_t t = r.u32le("tree count");
  f.num_classes = r.u32le("class count");
  f.num_features = r.u32le("feature count");
  f.levels = r.u32le("level count");
  if (t < 2) throw FormatError(FormatErrc::out_of_range, source, 5, "T must be >= 2");
  if (f.num_classes < 2 || f.num_classes > 256) {
    throw FormatError(FormatErrc::out_of_range, source, 9, "K must be in [2, 256]");
  }
  if (f.num_features < 1 || f.num_features > 65536) {
    throw FormatError(FormatErrc::out_of_range, source, 13, "p must be in [1, 65536]");
  }
  if (f.levels < 1 || f.levels > 24) {
    throw FormatError(FormatErrc::out_of_range, source, 17, "l must be in [1, 24]");
  }
  const std::uint64_t expected = forest_file_size(t, f.levels);
  if (bytes.size() < expected) {
    throw FormatError(FormatErrc::truncated, source, bytes.size(),
                      "expected " + std::to_string(expected) + " bytes, file has " +
                          std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw FormatError(FormatErrc::trailing_bytes, source, expected,
                      std::to_string(bytes.size() - expected) + " bytes past declared size");
  }
  f.trees.reserve(t);
  for (std::uint32_t i = 0; i < t; ++i) {
    TreeMemoryImage mem(f.levels);
    for (std::uint32_t a = 1; a < mem.first_leaf(); ++a) {
      const std::size_t at = r.offset();
      const std::uint16_t c = r.u16le("coordinate");
      if (c >= f.num_features) {
        throw FormatError(FormatErrc::out_of_range, source, at,
                          "coordinate " + std::to_string(c) + " >= p");
      }
      mem.set_coord(a, c);
    }
    for (std::uint32_t a = 1; a < mem.end_address(); ++a) {
      const std::size_t at = r.offset();
      const std::uint8_t v = r.u8("value");
      if (a >= mem.first_leaf() && v >= f.num_classes) {
        throw FormatError(FormatErrc::out_of_range, source, at,
                          "leaf label " + std::to_string(v) + " >= K");
      }
      mem.set_value(a, v);
    }
    f.trees.push_back(std::move(mem));
  }
  r.expect_end();
  return f;
}

void save_forest(const ForestModel& forest, const fs::path& path) {
  write_file(path, serialize_forest(forest));
}

ForestModel load_forest(const fs::path& path) {
  return parse_forest(read_file(path), path.string());
}

std::string format_memory_image(const TreeMemoryImage& tree) {
  std::ostringstream os;
  const int hex_digits = static_cast<int>((tree.levels() + 1 + 3) / 4);
  for (std::uint32_t a = 1; a < tree.end_address(); ++a) {
    os << "0x" << std::hex << std::uppercase << std::setw(hex_digits) << std::setfill('0')
       << a << std::dec << ' ';
    if (a < tree.first_leaf()) {
      os << tree.coord_mem()[a];
    } else {
      os << '-';
    }
    os << ' ' << static_cast<unsigned>(tree.value_mem()[a]) << '\n';
  }
  return os.str();
}

namespace {

template <typename T>
bool parse_number(std::string_view s, T& out, int base = 10) {
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out, base);
  return ec == std::errc{} && p == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) parts.push_back(line.substr(start, i - start));
  }
  return parts;
}

}  // namespace

TreeMemoryImage parse_memory_image(const std::string& text, std::uint32_t levels,
                                   const std::string& source) {
  TreeMemoryImage mem(levels);
  std::istringstream in(text);
  std::string line;
  std::uint64_t line_no = 0;
  std::uint32_t expected = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto parts = split_ws(line);
    if (parts.empty()) continue;
    if (parts.size() != 3 || parts[0].size() < 3 || parts[0].substr(0, 2) != "0x") {
      throw FormatError(FormatErrc::malformed_line, source, line_no,
                        "expected \"<0xADDR> <coord|-> <value>\"");
    }
    std::uint32_t addr = 0;
    if (!parse_number(parts[0].substr(2), addr, 16)) {
      throw FormatError(FormatErrc::malformed_line, source, line_no, "bad address");
    }
    if (addr != expected) {
      throw FormatError(FormatErrc::address_gap, source, line_no,
                        "address " + std::to_string(addr) + ", expected " +
                            std::to_string(expected));
    }
    if (addr >= mem.end_address()) {
      throw FormatError(FormatErrc::out_of_range, source, line_no,
                        "address beyond the last leaf");
    }
    unsigned value = 0;
    if (!parse_number(parts[2], value) || value > 0xFF) {
      throw FormatError(FormatErrc::out_of_range, source, line_no, "value must be 0..255");
    }
    if (addr < mem.first_leaf()) {
      unsigned coord = 0;
      if (!parse_number(parts[1], coord) || coord > 0xFFFF) {
        throw FormatError(FormatErrc::malformed_line, source, line_no,
                          "decision address needs a 16-bit coordinate");
      }
      mem.set_coord(addr, static_cast<std::uint16_t>(coord));
    } else if (parts[1] != "-") {
      throw FormatError(FormatErrc::malformed_line, source, line_no,
                        "leaf address must have '-' as coordinate");
    }
    mem.set_value(addr, static_cast<std::uint8_t>(value));
    ++expected;
  }
  if (expected != mem.end_address()) {
    throw FormatError(FormatErrc::truncated, source, line_no,
                      "image ends at address " + std::to_string(expected - 1) + " of " +
                          std::to_string(mem.end_address() - 1));
  }
  return mem;
}

namespace {

std::string tree_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "tree_%04zu.mem", i);
  return buf;
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

}  // namespace

void export_mem(const ForestModel& forest, const fs::path& dir) {
  forest.validate();
  fs::create_directories(dir);
  std::ostringstream hdr;
  hdr << "trees " << forest.num_trees() << "\nclasses " << forest.num_classes
      << "\nfeatures " << forest.num_features << "\nlevels " << forest.levels << '\n';
  const std::string h = hdr.str();
  write_file(dir / "forest.txt",
             std::span(reinterpret_cast<const std::uint8_t*>(h.data()), h.size()));
  for (std::size_t i = 0; i < forest.trees.size(); ++i) {
    const std::string body = format_memory_image(forest.trees[i]);
    write_file(dir / tree_file_name(i),
               std::span(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
  }
}

ForestModel import_mem(const fs::path& dir) {
  const fs::path hdr_path = dir / "forest.txt";
  std::istringstream hdr(read_text(hdr_path));
  std::uint32_t t = 0;
  ForestModel f;
  std::string line;
  std::uint64_t line_no = 0;
  int seen = 0;
  while (std::getline(hdr, line)) {
    ++line_no;
    const auto parts = split_ws(line);
    if (parts.empty()) continue;
    std::uint32_t v = 0;
    if (parts.size() != 2 || !parse_number(parts[1], v)) {
      throw FormatError(FormatErrc::malformed_line, hdr_path.string(), line_no,
                        "expected \"<key> <number>\"");
    }
    if (parts[0] == "trees") {
      t = v;
    } else if (parts[0] == "classes") {
      f.num_classes = v;
    } else if (parts[0] == "features") {
      f.num_features = v;
    } else if (parts[0] == "levels") {
      f.levels = v;
    } else {
      throw FormatError(FormatErrc::malformed_line, hdr_path.string(), line_no,
                        "unknown key " + std::string(parts[0]));
    }
    ++seen;
  }
  if (seen != 4) {
    throw FormatError(FormatErrc::truncated, hdr_path.string(), line_no,
                      "need trees, classes, features and levels");
  }
  if (f.levels < 1 || f.levels > 24) {
    throw FormatError(FormatErrc::out_of_range, hdr_path.string(), line_no,
                      "levels must be in [1, 24]");
  }
  for (std::uint32_t i = 0; i < t; ++i) {
    const fs::path p = dir / tree_file_name(i);
    f.trees.push_back(parse_memory_image(read_text(p), f.levels, p.string()));
  }
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(FormatErrc::out_of_range, dir.string(), 0, e.what());
  }
  return f;
}

}  // namespace rfhw
