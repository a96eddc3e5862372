#include "osteo/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace osteo::nn {

namespace {

constexpr char kMagic[8] = {'O', 'S', 'T', 'E', 'O', '-', 'N', 'N'};
constexpr std::uint32_t kLayerRecordLength = 5;

class Writer {
public:
    void bytes(const void* src, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(src);
        out_.insert(out_.end(), p, p + n);
    }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    void need(std::size_t n, const char* what) const {
        if (in_.size() - pos_ < n) throw DataError(std::string("checkpoint truncated in ") + what);
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return in_[pos_++];
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
    double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        need(n, what);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return in_.size() - pos_; }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

NetworkCheckpoint make_checkpoint(const Network& network, TrainingMetadata metadata) {
    NetworkCheckpoint c;
    for (std::size_t d : network.input_shape()) c.input_shape.push_back(static_cast<std::uint32_t>(d));
    c.architecture = network.layers();
    for (const Tensor& p : network.parameters()) {
        std::vector<float> w(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) w[i] = static_cast<float>(p[i]);
        c.weights.push_back(std::move(w));
    }
    c.metadata = std::move(metadata);
    return c;
}

Network network_from_checkpoint(const NetworkCheckpoint& c) {
    if (c.format_version != kCheckpointVersion) throw DataError("unsupported checkpoint version");
    std::vector<std::size_t> input(c.input_shape.begin(), c.input_shape.end());
    // Build once with a fixed seed to learn the parameter shapes, then replace them.
    Network shape_probe = Network::build(input, c.architecture, 0);
    const auto& probe = shape_probe.parameters();
    if (probe.size() != c.weights.size()) throw DataError("checkpoint weight count does not match its architecture");
    std::vector<Tensor> params;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        if (c.weights[i].size() != probe[i].size()) {
            throw DataError("checkpoint tensor " + std::to_string(i) + " has the wrong length");
        }
        params.emplace_back(probe[i].shape(), std::vector<double>(c.weights[i].begin(), c.weights[i].end()));
    }
    return Network(std::move(input), c.architecture, std::move(params));
}

std::vector<std::uint8_t> save_checkpoint(const NetworkCheckpoint& c) {
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u8(c.format_version);
    w.u32(static_cast<std::uint32_t>(c.input_shape.size()));
    for (auto d : c.input_shape) w.u32(d);
    w.u32(static_cast<std::uint32_t>(c.architecture.size()));
    for (const auto& layer : c.architecture) {
        w.u32(kLayerRecordLength);
        w.u8(static_cast<std::uint8_t>(layer.kind));
        w.u32(layer.units);
    }
    w.u32(static_cast<std::uint32_t>(c.weights.size()));
    for (const auto& t : c.weights) {
        w.u32(static_cast<std::uint32_t>(t.size()));
        for (float v : t) w.f32(v);
    }
    w.u64(c.metadata.seed);
    w.u32(c.metadata.epochs);
    w.f64(c.metadata.final_loss);
    w.u32(static_cast<std::uint32_t>(c.metadata.notes.size()));
    w.bytes(c.metadata.notes.data(), c.metadata.notes.size());
    return w.take();
}

NetworkCheckpoint load_checkpoint(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const auto magic = r.take(sizeof kMagic, "magic");
    if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) throw DataError("not an OSTEO-NN checkpoint");
    NetworkCheckpoint c;
    c.format_version = r.u8("version");
    if (c.format_version != kCheckpointVersion) {
        throw DataError("unsupported checkpoint version " + std::to_string(c.format_version));
    }

    const std::uint32_t rank = r.u32("input shape");
    r.need(static_cast<std::size_t>(rank) * 4, "input shape");
    for (std::uint32_t i = 0; i < rank; ++i) c.input_shape.push_back(r.u32("input shape"));

    const std::uint32_t layers = r.u32("architecture");
    r.need(static_cast<std::size_t>(layers) * (4 + kLayerRecordLength), "architecture");
    for (std::uint32_t i = 0; i < layers; ++i) {
        const std::uint32_t len = r.u32("layer record");
        if (len != kLayerRecordLength) throw DataError("checkpoint layer record has unexpected length");
        const std::uint8_t kind = r.u8("layer record");
        if (kind < static_cast<std::uint8_t>(LayerKind::Conv2d) || kind > static_cast<std::uint8_t>(LayerKind::Softmax)) {
            throw DataError("checkpoint has unknown layer kind " + std::to_string(kind));
        }
        c.architecture.push_back({static_cast<LayerKind>(kind), r.u32("layer record")});
    }

    const std::uint32_t tensors = r.u32("weights");
    for (std::uint32_t t = 0; t < tensors; ++t) {
        const std::uint32_t n = r.u32("weights");
        r.need(static_cast<std::size_t>(n) * 4, "weights");
        std::vector<float> w(n);
        for (auto& v : w) v = r.f32("weights");
        c.weights.push_back(std::move(w));
    }

    c.metadata.seed = r.u64("metadata");
    c.metadata.epochs = r.u32("metadata");
    c.metadata.final_loss = r.f64("metadata");
    const std::uint32_t notes = r.u32("metadata");
    const auto text = r.take(notes, "metadata");
    c.metadata.notes.assign(text.begin(), text.end());
    if (r.remaining() != 0) throw DataError("checkpoint has trailing bytes");
    return c;
}

void save_checkpoint_file(const std::filesystem::path& path, const NetworkCheckpoint& checkpoint) {
    const auto bytes = save_checkpoint(checkpoint);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

NetworkCheckpoint load_checkpoint_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_checkpoint(bytes);
}

}  // namespace osteo::nn
