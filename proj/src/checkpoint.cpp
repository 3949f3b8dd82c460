#include "polarmin/errors.hpp"
#include "polarmin/model.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string_view>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is written as little-endian doubles");

namespace polarmin {

namespace {

constexpr char kMagic[8] = {'P', 'M', 'C', 'K', 'P', 'T', '0', '1'};

struct TensorRef {
    std::string name;
    const Tensor* tensor;
};

// Params first, then Adam first/second moments when present; the header
// directory mirrors this order exactly.
std::vector<TensorRef> directory(const Checkpoint& ckpt) {
    std::vector<TensorRef> refs;
    ckpt.params.tensors.forEach([&](const char* name, const Tensor& t) {
        refs.push_back({name, &t});
    });
    if (ckpt.hasAdamState) {
        ckpt.adam.m.forEach([&](const char* name, const Tensor& t) {
            refs.push_back({std::string("adam_m.") + name, &t});
        });
        ckpt.adam.v.forEach([&](const char* name, const Tensor& t) {
            refs.push_back({std::string("adam_v.") + name, &t});
        });
    }
    return refs;
}

Tensor* tensorByName(TensorSet& set, std::string_view name) {
    Tensor* found = nullptr;
    set.forEach([&](const char* n, Tensor& t) {
        if (name == n) found = &t;
    });
    return found;
}

} // namespace

void saveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
    const auto refs = directory(ckpt);

    nlohmann::json header;
    header["format_version"] = 1;
    header["model_config"] = ckpt.params.config.toJson();
    header["master_seed"] = ckpt.masterSeed;
    header["has_adam"] = ckpt.hasAdamState;
    header["adam_step"] = ckpt.hasAdamState ? ckpt.adam.step : 0;
    header["vocab"] = ckpt.vocab.toJson();
    header["meta"] = ckpt.meta.is_null() ? nlohmann::json::object() : ckpt.meta;
    nlohmann::json dir = nlohmann::json::array();
    for (const auto& ref : refs) {
        dir.push_back({{"name", ref.name}, {"rows", ref.tensor->rows}, {"cols", ref.tensor->cols}});
    }
    header["tensors"] = dir;
    const std::string headerBytes = header.dump();

    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("checkpoint: cannot open for writing: " + path);
    out.write(kMagic, sizeof(kMagic));
    const std::uint64_t len = headerBytes.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(headerBytes.data(), static_cast<std::streamsize>(headerBytes.size()));
    for (const auto& ref : refs) {
        out.write(reinterpret_cast<const char*>(ref.tensor->data.data()),
                  static_cast<std::streamsize>(ref.tensor->data.size() * sizeof(double)));
    }
    out.flush();
    if (!out) throw DataError("checkpoint: write failed: " + path);
}

Checkpoint loadCheckpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("checkpoint: cannot open: " + path);

    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw DataError("checkpoint: bad magic in " + path);
    }
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in) throw DataError("checkpoint: truncated header in " + path);
    std::string headerBytes(len, '\0');
    in.read(headerBytes.data(), static_cast<std::streamsize>(len));
    if (!in) throw DataError("checkpoint: truncated header in " + path);

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(headerBytes);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint: bad header json in " + path + ": " + e.what());
    }
    if (header.value("format_version", 0) != 1) {
        throw DataError("checkpoint: unsupported format version in " + path);
    }

    Checkpoint ckpt;
    try {
        ckpt.params.config = ModelConfig::fromJson(header.at("model_config"));
        ckpt.masterSeed = header.at("master_seed").get<std::uint64_t>();
        ckpt.hasAdamState = header.at("has_adam").get<bool>();
        ckpt.vocab = Vocab::fromJson(header.at("vocab"));
        ckpt.meta = header.value("meta", nlohmann::json::object());
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint: bad header field in " + path + ": " + e.what());
    }
    if (ckpt.vocab.size() != ckpt.params.config.vocabSize) {
        throw DataError("checkpoint: vocab size disagrees with model config in " + path);
    }

    ModelParams fresh;
    fresh.config = ckpt.params.config;
    {
        Rng dummy(0, "shape-only");
        fresh = initModel(ckpt.params.config, dummy);
    }
    ckpt.params = std::move(fresh);
    if (ckpt.hasAdamState) {
        ckpt.adam = makeAdamState(ckpt.params.tensors);
        ckpt.adam.step = header.at("adam_step").get<std::uint64_t>();
    }

    for (const auto& entry : header.at("tensors")) {
        const std::string name = entry.at("name").get<std::string>();
        const std::size_t rows = entry.at("rows").get<std::size_t>();
        const std::size_t cols = entry.at("cols").get<std::size_t>();
        Tensor* dst = nullptr;
        if (name.starts_with("adam_m.")) {
            if (!ckpt.hasAdamState) throw DataError("checkpoint: unexpected adam tensor in " + path);
            dst = tensorByName(ckpt.adam.m, name.substr(7));
        } else if (name.starts_with("adam_v.")) {
            if (!ckpt.hasAdamState) throw DataError("checkpoint: unexpected adam tensor in " + path);
            dst = tensorByName(ckpt.adam.v, name.substr(7));
        } else {
            dst = tensorByName(ckpt.params.tensors, name);
        }
        if (dst == nullptr) throw DataError("checkpoint: unknown tensor " + name + " in " + path);
        if (dst->rows != rows || dst->cols != cols) {
            throw DataError("checkpoint: shape mismatch for tensor " + name + " in " + path);
        }
        in.read(reinterpret_cast<char*>(dst->data.data()),
                static_cast<std::streamsize>(dst->data.size() * sizeof(double)));
        if (!in) throw DataError("checkpoint: truncated tensor data in " + path);
    }
    return ckpt;
}

} // namespace polarmin
