#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace qrob {

// IDX ubyte containers (the MNIST/EMNIST on-disk format). All header words
// are big-endian 32-bit. Images: magic 0x00000803, count, rows, cols, then
// row-major bytes. Labels: magic 0x00000801, count, then bytes.
struct IdxImages {
    std::uint32_t count = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::uint8_t> pixels;  // count * rows * cols

    const std::uint8_t* image(std::size_t i) const {
        return pixels.data() + i * rows * cols;
    }
};

IdxImages read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);

void write_idx_images(const std::filesystem::path& path, const IdxImages& imgs);
void write_idx_labels(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& labels);

}  // namespace qrob
