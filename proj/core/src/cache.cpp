#include "boltzfact/cache.hpp"

#include "boltzfact/error.hpp"

#include <boost/crc.hpp>
#include <boost/endian/conversion.hpp>

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace boltzfact {

namespace {

constexpr std::array<unsigned char, 4> kMagic{'B', 'F', 'C', 'T'};
// magic + version + k + l + gamma + 9 grid + N_T + N_G + flags + payload size + crc
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 8 + 9 * 4 + 8 + 8 + 4 + 8 + 4;

class Writer {
public:
    explicit Writer(std::vector<unsigned char>& out) : out_(out) {}
    void u32(std::uint32_t v) { put(boost::endian::native_to_little(v)); }
    void u64(std::uint64_t v) { put(boost::endian::native_to_little(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }

private:
    template <class T>
    void put(T v) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        out_.insert(out_.end(), b, b + sizeof(T));
    }
    std::vector<unsigned char>& out_;
};

class Reader {
public:
    Reader(const std::vector<unsigned char>& in, std::size_t pos) : in_(in), pos_(pos) {}
    std::uint32_t u32() { return boost::endian::little_to_native(get<std::uint32_t>()); }
    std::uint64_t u64() { return boost::endian::little_to_native(get<std::uint64_t>()); }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::size_t pos() const { return pos_; }

private:
    template <class T>
    T get() {
        if (pos_ + sizeof(T) > in_.size()) throw IntegrityError("operator cache truncated");
        T v;
        std::memcpy(&v, in_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    const std::vector<unsigned char>& in_;
    std::size_t pos_;
};

std::uint32_t flag_bits(const RTensorFlags& f) {
    return (f.conservation ? 1u : 0u) | (f.detailed_balance ? 2u : 0u) | (f.symmetrized ? 4u : 0u);
}

RTensorFlags flags_from(std::uint32_t bits) {
    if (bits & ~7u) throw IntegrityError("operator cache: unknown flag bits");
    return {(bits & 1u) != 0, (bits & 2u) != 0, (bits & 4u) != 0};
}

std::uint32_t crc_of(const unsigned char* p, std::size_t n) {
    boost::crc_32_type crc;
    crc.process_bytes(p, n);
    return crc.checksum();
}

std::uint64_t expected_payload(std::uint64_t n_k, std::uint64_t n_t, std::uint64_t n_g) {
    return n_t * 12 + n_g * 24 + n_k * n_k * n_k * n_t * 8;
}

CacheHeader parse_header(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < kHeaderBytes) throw IntegrityError("operator cache truncated: header incomplete");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
        throw IntegrityError("not an operator cache (bad magic)");
    Reader rd(bytes, 4);
    CacheHeader h;
    h.version = rd.u32();
    if (h.version != kCacheVersion)
        throw IntegrityError("operator cache format version " + std::to_string(h.version) +
                             " is not supported (expected " + std::to_string(kCacheVersion) + ")");
    h.k_max = rd.u32();
    h.l_max = rd.u32();
    h.gamma = rd.f64();
    GridSpec& g = h.grid;
    for (int* f : {&g.n_E, &g.n_rho1, &g.n_t1, &g.n_h2, &g.n_t2, &g.n_chi, &g.n_eps, &g.pad_rad, &g.pad_ang})
        *f = static_cast<int>(rd.u32());
    h.n_t = rd.u64();
    h.n_g = rd.u64();
    h.flags = flags_from(rd.u32());
    h.payload_bytes = rd.u64();
    h.crc32 = rd.u32();

    if (h.k_max > 256 || h.l_max > 256) throw IntegrityError("operator cache: implausible truncation");
    if (h.payload_bytes != expected_payload(h.k_max + 1, h.n_t, h.n_g))
        throw IntegrityError("operator cache: payload size inconsistent with header counts");
    if (bytes.size() != kHeaderBytes + h.payload_bytes)
        throw IntegrityError("operator cache truncated or padded: expected " +
                             std::to_string(kHeaderBytes + h.payload_bytes) + " bytes, found " +
                             std::to_string(bytes.size()));
    if (crc_of(bytes.data() + kHeaderBytes, h.payload_bytes) != h.crc32)
        throw IntegrityError("operator cache checksum mismatch");
    return h;
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for " + path.string());
    return bytes;
}

}  // namespace

std::vector<unsigned char> serialize_operator(const FactorizedOperator& op) {
    const SpectralConfig& cfg = op.config();
    const RTensor& r = op.r();
    std::vector<unsigned char> payload;
    payload.reserve(expected_payload(cfg.n_k(), op.channels().size(), op.coo().size()));
    Writer pw(payload);
    for (const Channel& ch : op.channels().channels()) {
        pw.u32(static_cast<std::uint32_t>(ch.l1));
        pw.u32(static_cast<std::uint32_t>(ch.l2));
        pw.u32(static_cast<std::uint32_t>(ch.l3));
    }
    for (const GauntEntry& e : op.coo().rows()) {
        pw.u32(e.q1);
        pw.u32(e.q2);
        pw.u32(e.q3);
        pw.u32(e.tau);
        pw.f64(e.g);
    }
    for (double v : r.values()) pw.f64(v);

    std::vector<unsigned char> out(kMagic.begin(), kMagic.end());
    out.reserve(kHeaderBytes + payload.size());
    Writer w(out);
    w.u32(kCacheVersion);
    w.u32(static_cast<std::uint32_t>(cfg.k_max()));
    w.u32(static_cast<std::uint32_t>(cfg.l_max()));
    w.f64(cfg.gamma());
    const GridSpec& g = r.grid();
    for (int f : {g.n_E, g.n_rho1, g.n_t1, g.n_h2, g.n_t2, g.n_chi, g.n_eps, g.pad_rad, g.pad_ang})
        w.u32(static_cast<std::uint32_t>(f));
    w.u64(op.channels().size());
    w.u64(op.coo().size());
    w.u32(flag_bits(r.flags()));
    w.u64(payload.size());
    w.u32(crc_of(payload.data(), payload.size()));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

FactorizedOperator deserialize_operator(const std::vector<unsigned char>& bytes) {
    const CacheHeader h = parse_header(bytes);
    const SpectralConfig cfg(static_cast<int>(h.k_max), static_cast<int>(h.l_max), h.gamma);
    ChannelTable channels(cfg.l_max());
    if (static_cast<std::uint64_t>(channels.size()) != h.n_t)
        throw IntegrityError("operator cache: channel count does not match l_max");

    Reader rd(bytes, kHeaderBytes);
    for (int tau = 0; tau < channels.size(); ++tau) {
        Channel ch;
        ch.l1 = static_cast<int>(rd.u32());
        ch.l2 = static_cast<int>(rd.u32());
        ch.l3 = static_cast<int>(rd.u32());
        if (!(ch == channels[tau])) throw IntegrityError("operator cache: channel table out of order");
    }
    std::vector<GauntEntry> rows(h.n_g);
    for (GauntEntry& e : rows) {
        e.q1 = rd.u32();
        e.q2 = rd.u32();
        e.q3 = rd.u32();
        e.tau = rd.u32();
        e.g = rd.f64();
    }
    RTensor r(cfg.n_k(), channels.size(), h.gamma, h.grid);
    for (double& v : r.values()) v = rd.f64();
    r.flags() = h.flags;
    try {
        return FactorizedOperator(cfg, std::move(channels), GauntCOO(cfg.l_max(), std::move(rows)), std::move(r));
    } catch (const std::logic_error& e) {
        throw IntegrityError(std::string("operator cache: inconsistent tables: ") + e.what());
    }
}

void save_operator(const FactorizedOperator& op, const std::filesystem::path& path) {
    const std::vector<unsigned char> bytes = serialize_operator(op);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoError("write failed for " + path.string());
}

FactorizedOperator load_operator(const std::filesystem::path& path) {
    return deserialize_operator(read_file(path));
}

CacheHeader read_cache_header(const std::filesystem::path& path) {
    return parse_header(read_file(path));
}

}  // namespace boltzfact
