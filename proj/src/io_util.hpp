#pragma once

#include "camsearch/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace camsearch::detail {

inline std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << content;
    if (!out)
        throw DataError("write failed for " + path.string());
}

} // namespace camsearch::detail
