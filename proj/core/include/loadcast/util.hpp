#pragma once

#include <cstdint>
#include <string>

namespace loadcast {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex_of_file(const std::string& path);

void ensure_directory(const std::string& path);

}  // namespace loadcast
