#include "qrob/idx.hpp"

#include <fstream>
#include <stdexcept>

namespace qrob {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const char* what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error(std::string("idx: truncated header while reading ") + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

IdxImages read_idx_images(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("idx: cannot open " + path.string());
    const std::uint32_t magic = read_be32(in, "magic");
    if (magic != kImagesMagic)
        throw std::runtime_error("idx: bad image magic in " + path.string());
    IdxImages out;
    out.count = read_be32(in, "count");
    out.rows = read_be32(in, "rows");
    out.cols = read_be32(in, "cols");
    const std::size_t n = std::size_t(out.count) * out.rows * out.cols;
    out.pixels.resize(n);
    in.read(reinterpret_cast<char*>(out.pixels.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw std::runtime_error("idx: truncated image payload in " + path.string());
    return out;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("idx: cannot open " + path.string());
    const std::uint32_t magic = read_be32(in, "magic");
    if (magic != kLabelsMagic)
        throw std::runtime_error("idx: bad label magic in " + path.string());
    const std::uint32_t count = read_be32(in, "count");
    std::vector<std::uint8_t> labels(count);
    in.read(reinterpret_cast<char*>(labels.data()), count);
    if (static_cast<std::size_t>(in.gcount()) != count)
        throw std::runtime_error("idx: truncated label payload in " + path.string());
    return labels;
}

void write_idx_images(const std::filesystem::path& path, const IdxImages& imgs) {
    if (imgs.pixels.size() != std::size_t(imgs.count) * imgs.rows * imgs.cols)
        throw std::invalid_argument("idx: pixel buffer size does not match header");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("idx: cannot write " + path.string());
    write_be32(out, kImagesMagic);
    write_be32(out, imgs.count);
    write_be32(out, imgs.rows);
    write_be32(out, imgs.cols);
    out.write(reinterpret_cast<const char*>(imgs.pixels.data()),
              static_cast<std::streamsize>(imgs.pixels.size()));
}

void write_idx_labels(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& labels) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("idx: cannot write " + path.string());
    write_be32(out, kLabelsMagic);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
}

}  // namespace qrob
