#include "semra/agents/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <sstream>
#include <vector>

#include "semra/common/errors.hpp"
#include "semra/common/io.hpp"

namespace semra::agents {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

template <typename P>
auto arrays(P& p) {
    std::vector<decltype(&p.sac.temperature.log_alpha)> out;
    auto add = [&](auto& m) {
        for (auto* t : m.tensors()) out.push_back(t);
    };
    add(p.sac.actor.params);
    add(p.sac.critic1.params);
    add(p.sac.critic2.params);
    add(p.sac.target1);
    add(p.sac.target2);
    out.push_back(&p.sac.temperature.log_alpha);
    add(p.dsac.actor.params);
    add(p.dsac.critic1.params);
    add(p.dsac.critic2.params);
    add(p.dsac.target1);
    add(p.dsac.target2);
    out.push_back(&p.dsac.temperature.log_alpha);
    add(p.compensator);
    return out;
}

void put_u64(std::string& s, std::uint64_t v) {
    char b[8];
    std::memcpy(b, &v, 8);
    s.append(b, 8);
}

struct Reader {
    const std::string& data;
    std::size_t pos = 0;

    std::uint64_t u64() {
        if (pos + 8 > data.size()) throw FramingError("checkpoint: truncated file");
        std::uint64_t v;
        std::memcpy(&v, data.data() + pos, 8);
        pos += 8;
        return v;
    }
    void doubles(double* out, std::size_t n) {
        if (n > (data.size() - pos) / 8) throw FramingError("checkpoint: truncated array payload");
        std::memcpy(out, data.data() + pos, n * 8);
        pos += n * 8;
    }
};

std::uint64_t read_header(Reader& r) {
    const std::size_t m = sizeof(kCheckpointMagic) - 1;
    if (r.data.size() < m || r.data.compare(0, m, kCheckpointMagic) != 0)
        throw FramingError("checkpoint: missing SEMRA1 magic");
    r.pos = m;
    return r.u64();
}

}  // namespace

std::string serialize_checkpoint(const TrainedPolicy& p, std::uint64_t config_hash) {
    const auto list = arrays(p);
    std::string s(kCheckpointMagic, sizeof(kCheckpointMagic) - 1);
    put_u64(s, config_hash);
    put_u64(s, list.size());
    for (const ad::Array* a : list) {
        put_u64(s, a->rows());
        put_u64(s, a->cols());
        s.append(reinterpret_cast<const char*>(a->data().data()), a->size() * sizeof(double));
    }
    return s;
}

void save_checkpoint(const std::filesystem::path& path, const TrainedPolicy& p, std::uint64_t config_hash) {
    io::write_atomic(path, serialize_checkpoint(p, config_hash));
}

std::uint64_t checkpoint_hash(const std::filesystem::path& path) {
    const std::string data = io::read_file(path);
    Reader r{data};
    return read_header(r);
}

void load_checkpoint(const std::filesystem::path& path, TrainedPolicy& into, std::uint64_t expected_hash, bool force) {
    const std::string data = io::read_file(path);
    Reader r{data};
    const std::uint64_t hash = read_header(r);
    if (hash != expected_hash && !force) {
        std::ostringstream msg;
        msg << "checkpoint config hash " << std::hex << hash << " does not match " << expected_hash
            << " (use --force to load anyway)";
        throw ConfigError("checkpoint", msg.str());
    }
    auto list = arrays(into);
    if (r.u64() != list.size()) throw FramingError("checkpoint: array count does not match the configuration");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto rows = r.u64();
        const auto cols = r.u64();
        if (rows != list[i]->rows() || cols != list[i]->cols())
            throw FramingError("checkpoint: array " + std::to_string(i) + " has shape " + std::to_string(rows) + "x" +
                               std::to_string(cols) + ", expected " + std::to_string(list[i]->rows()) + "x" +
                               std::to_string(list[i]->cols()));
        r.doubles(list[i]->values().data(), list[i]->size());
    }
    if (r.pos != data.size()) throw FramingError("checkpoint: trailing bytes");
}

}  // namespace semra::agents
