#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace attn {

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);

// Creates dir (and parents); throws IoError when it cannot be created or
// is not writable.
void ensure_directory(const std::filesystem::path& dir);

// Shortest round-trip decimal representation; identical across runs.
std::string format_double(double value);

// Lower-case hex SHA-256 of a file's bytes.
std::string file_digest(const std::filesystem::path& path);

}  // namespace attn
