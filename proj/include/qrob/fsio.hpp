#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace qrob {

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& contents);

// FNV-1a over the raw bytes, hex-encoded. Used in manifests and to compare
// artifacts across reruns.
std::string file_digest(const std::filesystem::path& p);

}  // namespace qrob
