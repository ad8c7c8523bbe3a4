#include "carsr/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "carsr/errors.hpp"

namespace carsr::model {
namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

std::vector<std::int64_t> shape_of(const torch::Tensor& t) { return {t.sizes().begin(), t.sizes().end()}; }

}  // namespace

void check_compatible(const ParameterStore& params, const ModelConfig& cfg) {
    const auto inventory = layer_inventory(cfg);
    if (inventory.size() != params.size()) {
        throw IncompatibleCheckpoint("model config expects " + std::to_string(inventory.size()) +
                                     " layers, checkpoint has " + std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < inventory.size(); ++i) {
        const ConvSpec& want = inventory[i];
        const ConvLayer& have = params.layers()[i];
        if (have.spec.name != want.name) {
            throw IncompatibleCheckpoint("layer " + std::to_string(i) + ": expected " + want.name + ", found " +
                                         have.spec.name);
        }
        if (shape_of(have.weight) != want.weight_shape() || have.bias.numel() != want.out_channels) {
            throw IncompatibleCheckpoint("layer " + want.name + ": shape does not match the model config");
        }
    }
}

void save_checkpoint(const fs::path& path, const Checkpoint& ckpt) {
    std::vector<std::pair<std::string, torch::Tensor>> blobs;
    for (const auto& l : ckpt.params.layers()) {
        blobs.emplace_back(l.spec.name + ".weight", l.weight);
        blobs.emplace_back(l.spec.name + ".bias", l.bias);
    }
    for (const auto& e : ckpt.extra) blobs.push_back(e);

    json tensors = json::array();
    std::uint64_t offset = 0;
    std::vector<torch::Tensor> packed;
    for (const auto& [name, t] : blobs) {
        auto f32 = t.detach().to(torch::kFloat32).contiguous();
        const std::uint64_t nbytes = static_cast<std::uint64_t>(f32.numel()) * sizeof(float);
        tensors.push_back({{"name", name}, {"shape", shape_of(f32)}, {"dtype", "f32le"}, {"offset", offset},
                           {"nbytes", nbytes}});
        offset += nbytes;
        packed.push_back(std::move(f32));
    }
    json header = {{"iteration", ckpt.iteration},
                   {"model_config", ckpt.model},
                   {"train_state", ckpt.train_state},
                   {"tensors", std::move(tensors)}};
    const std::string text = header.dump();

    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
        put<std::uint32_t>(out, kCheckpointVersion);
        put<std::uint32_t>(out, 0);
        put<std::uint64_t>(out, text.size());
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        for (const auto& t : packed) {
            out.write(reinterpret_cast<const char*>(t.data_ptr<float>()),
                      static_cast<std::streamsize>(t.numel() * sizeof(float)));
        }
        if (!out) throw IoError("failed writing checkpoint " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
}

Checkpoint load_checkpoint(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw IncompatibleCheckpoint(path.string() + " is not a checkpoint file");
    }
    const auto version = get<std::uint32_t>(in);
    get<std::uint32_t>(in);
    if (version != kCheckpointVersion) {
        throw IncompatibleCheckpoint("unsupported checkpoint version " + std::to_string(version));
    }
    const auto header_len = get<std::uint64_t>(in);
    std::string text(header_len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw IoError("truncated checkpoint header in " + path.string());
    const std::streamoff blob_start = in.tellg();

    Checkpoint ckpt;
    json header;
    try {
        header = json::parse(text);
        ckpt.iteration = header.at("iteration").get<std::int64_t>();
        ckpt.model = header.at("model_config").get<ModelConfig>();
        ckpt.train_state = header.at("train_state");
    } catch (const json::exception& e) {
        throw IncompatibleCheckpoint("malformed checkpoint header: " + std::string(e.what()));
    }

    const auto inventory = layer_inventory(ckpt.model);
    std::map<std::string, torch::Tensor> loaded;
    std::vector<std::string> order;
    for (const auto& rec : header.at("tensors")) {
        const auto name = rec.at("name").get<std::string>();
        const auto shape = rec.at("shape").get<std::vector<std::int64_t>>();
        const auto offset = rec.at("offset").get<std::uint64_t>();
        const auto nbytes = rec.at("nbytes").get<std::uint64_t>();
        if (rec.at("dtype").get<std::string>() != "f32le") throw IncompatibleCheckpoint(name + ": unsupported dtype");
        auto t = torch::empty(shape, torch::kFloat32);
        if (static_cast<std::uint64_t>(t.numel()) * sizeof(float) != nbytes) {
            throw IncompatibleCheckpoint(name + ": byte count does not match shape");
        }
        in.seekg(blob_start + static_cast<std::streamoff>(offset));
        in.read(reinterpret_cast<char*>(t.data_ptr<float>()), static_cast<std::streamsize>(nbytes));
        if (!in) throw IoError("truncated tensor " + name + " in " + path.string());
        loaded.emplace(name, std::move(t));
        order.push_back(name);
    }

    for (const ConvSpec& spec : inventory) {
        const auto w = loaded.find(spec.name + ".weight");
        const auto b = loaded.find(spec.name + ".bias");
        if (w == loaded.end() || b == loaded.end()) {
            throw IncompatibleCheckpoint("checkpoint lacks layer " + spec.name);
        }
        ckpt.params.add({spec, w->second, b->second});
        loaded.erase(w);
        loaded.erase(b);
    }
    check_compatible(ckpt.params, ckpt.model);
    for (const auto& name : order) {
        const auto it = loaded.find(name);
        if (it != loaded.end()) ckpt.extra.emplace_back(name, it->second);
    }
    return ckpt;
}

}  // namespace carsr::model
