#include "dslt/fbm.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace dslt {

namespace {

template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw std::runtime_error("path file truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace

void write_path(std::ostream& os, const FbmPath& path) {
    os.write("FBMP", 4);
    put_le<std::uint16_t>(os, kPathFileVersion);
    put_le<std::uint16_t>(os, static_cast<std::uint16_t>(path.model.d));
    put_le<std::uint64_t>(os, path.grid.n);
    put_le<double>(os, path.model.H);
    put_le<double>(os, path.grid.t);
    put_le<std::uint64_t>(os, path.seed);
    put_le<std::uint8_t>(os, static_cast<std::uint8_t>(path.method));
    for (double v : path.values) put_le<double>(os, v);
    if (!os) throw std::runtime_error("failed writing path data");
}

FbmPath read_path(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "FBMP", 4) != 0)
        throw std::runtime_error("not an FBMP path file");
    const auto version = get_le<std::uint16_t>(is);
    if (version != kPathFileVersion) throw std::runtime_error("unsupported FBMP version");
    const auto d = get_le<std::uint16_t>(is);
    const auto n = get_le<std::uint64_t>(is);
    const auto H = get_le<double>(is);
    const auto t = get_le<double>(is);
    const auto seed = get_le<std::uint64_t>(is);
    const auto method = get_le<std::uint8_t>(is);
    if (method > 1) throw std::runtime_error("unknown path method tag");

    FbmPath path;
    path.model = HurstModel::make(H, d, t);
    path.grid = TimeGrid(n, t);
    path.seed = seed;
    path.method = static_cast<PathMethod>(method);
    path.values.resize(static_cast<std::size_t>(d) * (n + 1));
    for (double& v : path.values) v = get_le<double>(is);
    return path;
}

void write_path_file(const std::string& filename, const FbmPath& path) {
    std::ofstream os(filename, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + filename + " for writing");
    write_path(os, path);
}

FbmPath read_path_file(const std::string& filename) {
    std::ifstream is(filename, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + filename);
    return read_path(is);
}

}  // namespace dslt
