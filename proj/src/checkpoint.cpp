#include "opweight/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "opweight/error.hpp"

namespace opweight {
namespace {

constexpr char kMagic[4] = {'O', 'P', 'M', 'S'};

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

template <typename T>
void put(std::string& out, T v) {
    v = to_little(v);
    const auto* p = reinterpret_cast<const char*>(&v);
    out.append(p, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw invalid_input("checkpoint: truncated file");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return to_little(v);
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* suffix) {
    return std::filesystem::path(base.string() + suffix);
}

}  // namespace

void write_checkpoint(const std::filesystem::path& base, const OperatorMps& state, const nlohmann::json& metadata) {
    state.validate();
    std::string blob(kMagic, 4);
    put<std::uint32_t>(blob, kCheckpointVersion);
    put<std::uint32_t>(blob, static_cast<std::uint32_t>(state.length()));
    put<std::uint32_t>(blob, static_cast<std::uint32_t>(state.frame));
    for (const auto& s : state.sites) {
        put<std::uint32_t>(blob, static_cast<std::uint32_t>(s.left));
        put<std::uint32_t>(blob, static_cast<std::uint32_t>(s.right));
    }
    for (const auto& s : state.sites)
        for (double x : s.data) put<std::uint64_t>(blob, std::bit_cast<std::uint64_t>(x));

    nlohmann::json side;
    side["format"] = "OPMS";
    side["version"] = kCheckpointVersion;
    side["time"] = state.time;
    side["center"] = state.center ? nlohmann::json(*state.center) : nlohmann::json(nullptr);
    if (state.frame_angles) {
        side["frame_angles"] = {{"theta", state.frame_angles->theta}, {"phi", state.frame_angles->phi}};
    }
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : state.ledger.per_step) events.push_back({e.time, e.bond, e.weight});
    side["ledger"] = {{"epsilon", state.ledger.epsilon}, {"per_step", std::move(events)}};
    side["metadata"] = metadata;

    // Write to temporaries and rename, so an interrupted run keeps the
    // previous checkpoint intact.
    const auto bin = with_suffix(base, ".opms");
    const auto js = with_suffix(base, ".json");
    {
        std::ofstream f(with_suffix(base, ".opms.tmp"), std::ios::binary | std::ios::trunc);
        f.write(blob.data(), std::streamsize(blob.size()));
        if (!f) throw invalid_input("checkpoint: cannot write " + bin.string());
    }
    {
        std::ofstream f(with_suffix(base, ".json.tmp"), std::ios::trunc);
        f << side.dump(1) << '\n';
        if (!f) throw invalid_input("checkpoint: cannot write " + js.string());
    }
    std::filesystem::rename(with_suffix(base, ".opms.tmp"), bin);
    std::filesystem::rename(with_suffix(base, ".json.tmp"), js);
}

OperatorMps read_checkpoint(const std::filesystem::path& base, nlohmann::json& metadata) {
    std::ifstream f(with_suffix(base, ".opms"), std::ios::binary);
    if (!f) throw invalid_input("checkpoint: cannot open " + with_suffix(base, ".opms").string());
    const std::string blob((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (blob.size() < 4 || std::memcmp(blob.data(), kMagic, 4) != 0) throw invalid_input("checkpoint: bad magic");
    std::size_t pos = 4;
    const auto version = get<std::uint32_t>(blob, pos);
    if (version != kCheckpointVersion) throw invalid_input("checkpoint: unsupported version " + std::to_string(version));
    const auto L = get<std::uint32_t>(blob, pos);
    const auto frame = get<std::uint32_t>(blob, pos);
    if (frame > 1) throw invalid_input("checkpoint: unknown frame tag");

    OperatorMps state;
    state.frame = static_cast<Frame>(frame);
    state.sites.reserve(L);
    for (std::uint32_t j = 0; j < L; ++j) {
        const auto l = get<std::uint32_t>(blob, pos);
        const auto r = get<std::uint32_t>(blob, pos);
        state.sites.emplace_back(l, r);
    }
    for (auto& s : state.sites)
        for (double& x : s.data) x = std::bit_cast<double>(get<std::uint64_t>(blob, pos));
    if (pos != blob.size()) throw invalid_input("checkpoint: trailing bytes");

    std::ifstream jf(with_suffix(base, ".json"));
    if (!jf) throw invalid_input("checkpoint: missing JSON sidecar");
    nlohmann::json side;
    try {
        side = nlohmann::json::parse(jf);
        state.time = side.at("time").get<double>();
        if (!side.at("center").is_null()) state.center = side["center"].get<std::size_t>();
        if (side.contains("frame_angles")) {
            state.frame_angles = BlochAngles{side["frame_angles"].at("theta").get<double>(),
                                             side["frame_angles"].at("phi").get<double>()};
        }
        state.ledger.epsilon = side.at("ledger").at("epsilon").get<double>();
        for (const auto& e : side["ledger"].at("per_step")) {
            state.ledger.per_step.push_back({e.at(0).get<double>(), e.at(1).get<std::size_t>(), e.at(2).get<double>()});
        }
        metadata = side.value("metadata", nlohmann::json::object());
    } catch (const nlohmann::json::exception& e) {
        throw invalid_input(std::string("checkpoint: malformed sidecar: ") + e.what());
    }
    state.validate();
    return state;
}

}  // namespace opweight
