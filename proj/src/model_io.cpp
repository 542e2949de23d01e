#include "skinbench/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace skinbench {
namespace {

class Writer {
public:
    void u32(std::uint32_t v) { put(v); }
    void u64(std::uint64_t v) { put(v); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
    void raw(const char* s, std::size_t n) { out_.insert(out_.end(), s, s + n); }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    template <class U>
    void put(U v) {
        for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
    std::uint32_t u32() { return get<std::uint32_t>(); }
    std::uint64_t u64() { return get<std::uint64_t>(); }
    double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw FormatError("model file is truncated");
    }
    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    bool at_end() const noexcept { return pos_ == in_.size(); }

private:
    template <class U>
    U get() {
        need(sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(in_[pos_ + i]) << (8 * i);
        pos_ += sizeof(U);
        return v;
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

void write_mixture(Writer& w, const Mixture& m) {
    w.u32(static_cast<std::uint32_t>(m.components.size()));
    for (const auto& c : m.components) {
        w.f64(c.weight);
        for (double v : c.mean) w.f64(v);
        for (double v : c.variance) w.f64(v);
    }
}

Mixture read_mixture(Reader& r) {
    const std::uint32_t k = r.u32();
    r.need(static_cast<std::size_t>(k) * 7 * 8);
    Mixture m;
    m.components.resize(k);
    for (auto& c : m.components) {
        c.weight = r.f64();
        for (double& v : c.mean) v = r.f64();
        for (double& v : c.variance) v = r.f64();
    }
    return m;
}

}  // namespace

ModelType model_type(const AnyModel& m) noexcept { return static_cast<ModelType>(m.index() + 1); }

std::string model_type_name(ModelType t) {
    switch (t) {
        case ModelType::Histogram: return "histogram";
        case ModelType::Gmm: return "gmm";
        case ModelType::Cheddad: return "cheddad";
        case ModelType::Lda: return "lda";
    }
    return "unknown";
}

std::vector<std::uint8_t> save_model(const AnyModel& model) {
    Writer w;
    w.raw("SKND", 4);
    w.u32(kModelFormatVersion);
    w.u32(static_cast<std::uint32_t>(model_type(model)));
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, HistogramModel>) {
                w.u32(static_cast<std::uint32_t>(m.bins()));
                for (auto v : m.skin_counts()) w.u64(v);
                for (auto v : m.nonskin_counts()) w.u64(v);
            } else if constexpr (std::is_same_v<T, GmmModel>) {
                w.f64(m.skin_prior);
                write_mixture(w, m.skin);
                write_mixture(w, m.nonskin);
            } else if constexpr (std::is_same_v<T, CheddadModel>) {
                w.f64(m.e_lo);
                w.f64(m.e_hi);
                w.f64(m.e_mean);
                w.f64(m.e_std);
            } else {
                w.u32(static_cast<std::uint32_t>(m.weights.size()));
                for (double v : m.weights) w.f64(v);
                w.f64(m.offset);
                w.f64(m.scale);
            }
        },
        model);
    return w.take();
}

AnyModel load_model(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "SKND", 4) != 0) throw FormatError("not a model file (bad magic)");
    r.bytes(4);
    const std::uint32_t version = r.u32();
    if (version != kModelFormatVersion)
        throw VersionError("unsupported model format version " + std::to_string(version));
    const std::uint32_t tag = r.u32();

    AnyModel out;
    switch (static_cast<ModelType>(tag)) {
        case ModelType::Histogram: {
            const std::uint32_t bins = r.u32();
            if (bins < 1 || bins > 256 || !std::has_single_bit(bins)) throw FormatError("invalid histogram bin count");
            const std::size_t n = std::size_t(bins) * bins * bins;
            r.need(n * 16);
            std::vector<std::uint64_t> skin(n), nonskin(n);
            for (auto& v : skin) v = r.u64();
            for (auto& v : nonskin) v = r.u64();
            out = HistogramModel(static_cast<int>(bins), std::move(skin), std::move(nonskin));
            break;
        }
        case ModelType::Gmm: {
            GmmModel m;
            m.skin_prior = r.f64();
            m.skin = read_mixture(r);
            m.nonskin = read_mixture(r);
            out = std::move(m);
            break;
        }
        case ModelType::Cheddad: {
            CheddadModel m;
            m.e_lo = r.f64();
            m.e_hi = r.f64();
            m.e_mean = r.f64();
            m.e_std = r.f64();
            out = m;
            break;
        }
        case ModelType::Lda: {
            LdaModel m;
            const std::uint32_t dims = r.u32();
            r.need(static_cast<std::size_t>(dims) * 8);
            m.weights.resize(dims);
            for (double& v : m.weights) v = r.f64();
            m.offset = r.f64();
            m.scale = r.f64();
            out = std::move(m);
            break;
        }
        default:
            throw FormatError("unknown model type tag " + std::to_string(tag));
    }
    if (!r.at_end()) throw FormatError("trailing bytes after model parameters");
    return out;
}

void save_model_file(const AnyModel& m, const std::filesystem::path& path) {
    const auto bytes = save_model(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

AnyModel load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_model(bytes);
}

}  // namespace skinbench
