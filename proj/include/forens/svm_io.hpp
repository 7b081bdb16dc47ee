#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "forens/errors.hpp"
#include "forens/svm.hpp"

namespace forens {

namespace detail {

inline void le_put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void le_put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void le_put_f64(std::string& out, double v) {
    le_put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct ByteReader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos = 0;

    std::uint32_t u32() {
        if (pos + 4 > size) throw CorruptStream("model file truncated");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        if (pos + 8 > size) throw CorruptStream("model file truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t len = u32();
        if (pos + len > size) throw CorruptStream("model file truncated");
        std::string s(reinterpret_cast<const char*>(data + pos), len);
        pos += len;
        return s;
    }
};

} // namespace detail

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Versioned binary model: header (version, method id, kernel spec, C, seed),
// scaler vectors, support vectors, dual coefficients; all numeric payloads
// little-endian 64-bit floats.
inline std::string serialize_model(const SvmModel& m) {
    using namespace detail;
    std::string out;
    out += "FSVM";
    le_put_u32(out, kModelFormatVersion);
    le_put_u32(out, static_cast<std::uint32_t>(m.method_id.size()));
    out += m.method_id;
    le_put_u32(out, m.kernel.kind == KernelKind::RBF ? 0u : 1u);
    le_put_f64(out, m.kernel.gamma);
    le_put_u32(out, static_cast<std::uint32_t>(m.kernel.degree));
    le_put_f64(out, m.kernel.coef0);
    le_put_f64(out, m.c);
    le_put_u64(out, m.seed);
    le_put_u64(out, m.dims());
    le_put_u64(out, m.support_vectors.size());
    for (double v : m.scaler.mean) le_put_f64(out, v);
    for (double v : m.scaler.scale) le_put_f64(out, v);
    for (const auto& sv : m.support_vectors)
        for (double v : sv) le_put_f64(out, v);
    for (double v : m.dual_coeffs) le_put_f64(out, v);
    le_put_f64(out, m.bias);
    return out;
}

inline SvmModel deserialize_model(const std::uint8_t* data, std::size_t size) {
    using namespace detail;
    if (size < 8 || std::memcmp(data, "FSVM", 4) != 0)
        throw CorruptStream("not a model file (bad magic)");
    ByteReader r{data, size, 4};
    const std::uint32_t version = r.u32();
    if (version != kModelFormatVersion)
        throw UnsupportedFormat("unsupported model format version");
    SvmModel m;
    const std::uint32_t name_len = r.u32();
    if (r.pos + name_len > r.size) throw CorruptStream("model file truncated");
    m.method_id.assign(reinterpret_cast<const char*>(data + r.pos), name_len);
    r.pos += name_len;
    m.kernel.kind = r.u32() == 0 ? KernelKind::RBF : KernelKind::POLY;
    m.kernel.gamma = r.f64();
    m.kernel.degree = static_cast<int>(r.u32());
    m.kernel.coef0 = r.f64();
    m.c = r.f64();
    m.seed = r.u64();
    const std::uint64_t dims = r.u64();
    const std::uint64_t n_sv = r.u64();
    m.scaler.mean.resize(dims);
    m.scaler.scale.resize(dims);
    for (auto& v : m.scaler.mean) v = r.f64();
    for (auto& v : m.scaler.scale) v = r.f64();
    m.support_vectors.assign(n_sv, std::vector<double>(dims));
    for (auto& sv : m.support_vectors)
        for (auto& v : sv) v = r.f64();
    m.dual_coeffs.resize(n_sv);
    for (auto& v : m.dual_coeffs) v = r.f64();
    m.bias = r.f64();
    return m;
}

inline void save_model(const SvmModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file: " + path.string());
    const std::string bytes = serialize_model(m);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline SvmModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound("model file not found: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
}

// Text mirror of the binary format, for diffing frozen models.
inline std::string model_text_export(const SvmModel& m) {
    char buf[64];
    std::string out;
    auto kv = [&](const char* key, const std::string& value) {
        out += key;
        out += ": ";
        out += value;
        out += "\n";
    };
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    kv("format_version", std::to_string(kModelFormatVersion));
    kv("method", m.method_id);
    kv("kernel", kernel_kind_name(m.kernel.kind));
    kv("gamma", num(m.kernel.gamma));
    kv("degree", std::to_string(m.kernel.degree));
    kv("coef0", num(m.kernel.coef0));
    kv("C", num(m.c));
    kv("seed", std::to_string(m.seed));
    kv("dims", std::to_string(m.dims()));
    kv("n_support_vectors", std::to_string(m.support_vectors.size()));
    kv("bias", num(m.bias));
    auto vec_line = [&](const char* key, const std::vector<double>& v) {
        out += key;
        out += ":";
        for (double x : v) {
            out += " ";
            out += num(x);
        }
        out += "\n";
    };
    vec_line("scaler_mean", m.scaler.mean);
    vec_line("scaler_scale", m.scaler.scale);
    for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "sv_%zu", i);
        vec_line(buf, m.support_vectors[i]);
    }
    vec_line("dual_coeffs", m.dual_coeffs);
    return out;
}

} // namespace forens
