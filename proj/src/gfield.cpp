#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evolv/fundsol.hpp"

namespace evolv {

namespace {

constexpr char kMagic[8] = {'G', 'F', 'I', 'E', 'L', 'D', '0', '1'};

static_assert(std::endian::native == std::endian::little, ".gfield I/O assumes a little-endian host");

std::uint64_t fnv1a64(const unsigned char* p, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string window_name(Window w) { return w == Window::none ? "none" : "raised_cosine"; }

Window window_from(const std::string& s) {
    if (s == "none") return Window::none;
    if (s == "raised_cosine") return Window::raised_cosine;
    throw std::runtime_error("unknown window '" + s + "'");
}

}  // namespace

void write_gfield(const std::string& path, const GridField& f) {
    if (f.values.size() != f.spec.size()) throw std::invalid_argument("field size does not match its grid");
    const auto* bytes = reinterpret_cast<const unsigned char*>(f.values.data());
    const std::size_t nbytes = f.values.size() * sizeof(Complex);
    nlohmann::ordered_json h;
    h["format"] = "gfield";
    h["version"] = 1;
    h["role"] = to_string(f.role);
    h["spec"] = {{"n", f.spec.n},          {"freq_extent", f.spec.freq_extent}, {"points", f.spec.points},
                 {"sigma", f.spec.sigma}, {"window", window_name(f.spec.window)}, {"taper", f.spec.taper}};
    h["endianness"] = "little";
    h["count"] = f.values.size();
    h["reliable_extent"] = f.spec.reliable_extent();
    h["min_modulus"] = f.min_modulus;
    h["checksum"] = "fnv1a64:" + hex16(fnv1a64(bytes, nbytes));
    const std::string header = h.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(kMagic, sizeof kMagic);
    const std::uint64_t len = header.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(bytes), static_cast<std::streamsize>(nbytes));
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

GridField read_gfield(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    char magic[8];
    std::uint64_t len = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw std::runtime_error("not a .gfield file");
    if (len > (1u << 20)) throw std::runtime_error("implausible .gfield header length");
    std::string header(len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(len));
    const auto h = nlohmann::json::parse(header);
    if (h.at("format") != "gfield" || h.at("version") != 1) throw std::runtime_error("unsupported .gfield version");
    if (h.at("endianness") != "little") throw std::runtime_error("unsupported .gfield endianness");

    GridField f;
    const auto& s = h.at("spec");
    f.spec.n = s.at("n");
    f.spec.freq_extent = s.at("freq_extent");
    f.spec.points = s.at("points");
    f.spec.sigma = s.at("sigma");
    f.spec.window = window_from(s.at("window"));
    f.spec.taper = s.at("taper");
    f.spec.validate();
    f.role = field_role_from_string(h.at("role"));
    f.min_modulus = h.value("min_modulus", 0.0);
    const std::size_t count = h.at("count");
    if (count != f.spec.size()) throw std::runtime_error(".gfield count does not match its grid");
    f.values.resize(count);
    in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(count * sizeof(Complex)));
    if (!in) throw std::runtime_error("truncated .gfield data");
    const std::string sum = "fnv1a64:" + hex16(fnv1a64(reinterpret_cast<const unsigned char*>(f.values.data()), count * sizeof(Complex)));
    if (h.at("checksum") != sum) throw std::runtime_error(".gfield checksum mismatch");
    return f;
}

}  // namespace evolv
