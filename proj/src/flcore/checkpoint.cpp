#include "dcfl/flcore/checkpoint.hpp"

#include "dcfl/errors.hpp"

#include <bit>
#include <fstream>
#include <iterator>

namespace dcfl::flcore {

namespace {

constexpr char kMagic[8] = {'D', 'C', 'F', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
    void vec(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) u64(std::bit_cast<std::uint64_t>(x));
    }
    void raw(const char* data, std::size_t n) { out_.append(data, n); }
    std::string take() { return std::move(out_); }

private:
    void put(std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    std::string out_;
};

class Reader {
public:
    explicit Reader(const std::string& in) : in_(in) {}
    std::uint32_t u32(const char* field) { return static_cast<std::uint32_t>(get(4, field)); }
    std::uint64_t u64(const char* field) { return get(8, field); }
    std::int32_t i32(const char* field) { return static_cast<std::int32_t>(u32(field)); }
    std::vector<double> vec(const char* field) {
        const auto n = u64(field);
        if (n > (in_.size() - pos_) / 8) throw FormatError(std::string("checkpoint: ") + field + " length exceeds file");
        std::vector<double> v(n);
        for (auto& x : v) x = std::bit_cast<double>(u64(field));
        return v;
    }
    void expect_magic() {
        if (in_.size() < sizeof kMagic || in_.compare(0, sizeof kMagic, kMagic, sizeof kMagic) != 0) {
            throw FormatError("checkpoint: bad magic");
        }
        pos_ = sizeof kMagic;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    std::uint64_t get(int bytes, const char* field) {
        if (pos_ + static_cast<std::size_t>(bytes) > in_.size()) {
            throw FormatError(std::string("checkpoint: truncated at ") + field);
        }
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= std::uint64_t{static_cast<unsigned char>(in_[pos_ + i])} << (8 * i);
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }
    const std::string& in_;
    std::size_t pos_ = 0;
};

} // namespace

Checkpoint make_checkpoint(const ExperimentConfig& config, const ExperimentResult& result) {
    Checkpoint ck;
    ck.config_digest = config_digest(config);
    ck.round = result.final_state.round;
    ck.global_params = result.final_state.global_params.values();
    for (const auto& c : result.clients) {
        ClientCheckpoint cc;
        cc.target_params = c.target_params.values();
        if (c.diffusion_params) cc.diffusion_params = c.diffusion_params->values();
        cc.replay_cache = c.replay_cache;
        ck.clients.push_back(std::move(cc));
    }
    return ck;
}

std::string encode_checkpoint(const Checkpoint& ck) {
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kVersion);
    w.u64(ck.config_digest);
    w.i32(ck.round);
    w.vec(ck.global_params);
    w.u32(static_cast<std::uint32_t>(ck.clients.size()));
    for (const auto& c : ck.clients) {
        w.vec(c.target_params);
        w.vec(c.diffusion_params);
        w.u64(c.replay_cache.size());
        for (const auto& ex : c.replay_cache) {
            w.i32(ex.label);
            w.i32(ex.domain);
            w.vec(ex.features);
        }
    }
    return w.take();
}

Checkpoint decode_checkpoint(const std::string& bytes, std::optional<std::uint64_t> expected_digest) {
    Reader r(bytes);
    r.expect_magic();
    if (r.u32("version") != kVersion) throw FormatError("checkpoint: unsupported version");
    Checkpoint ck;
    ck.config_digest = r.u64("config_digest");
    if (expected_digest && *expected_digest != ck.config_digest) {
        throw ConfigError("config_digest", "checkpoint was written under a different configuration");
    }
    ck.round = r.i32("round");
    ck.global_params = r.vec("global_params");
    const auto n_clients = r.u32("client_count");
    for (std::uint32_t k = 0; k < n_clients; ++k) {
        ClientCheckpoint c;
        c.target_params = r.vec("target_params");
        c.diffusion_params = r.vec("diffusion_params");
        const auto n_cache = r.u64("replay_cache");
        for (std::uint64_t i = 0; i < n_cache; ++i) {
            data::Example ex;
            ex.label = r.i32("replay_cache.label");
            ex.domain = r.i32("replay_cache.domain");
            ex.features = r.vec("replay_cache.features");
            c.replay_cache.push_back(std::move(ex));
        }
        ck.clients.push_back(std::move(c));
    }
    if (!r.done()) throw FormatError("checkpoint: trailing bytes");
    return ck;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
    const auto bytes = encode_checkpoint(checkpoint);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::optional<std::uint64_t> expected_digest) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("load_checkpoint: cannot open " + path.string());
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return decode_checkpoint(bytes, expected_digest);
}

} // namespace dcfl::flcore
