#include <cmath>
#include <random>

#include "doctest.h"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "osteo/checkpoint.hpp"
#include "osteo/network.hpp"
#include "osteo/train.hpp"

using namespace osteo;
using namespace osteo::nn;
using gradcheck::random_tensor;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Small two-class dataset of flat vectors: class 1 has a larger first half.
std::vector<LabeledExample> toy_dataset(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<LabeledExample> out;
    for (std::size_t i = 0; i < n; ++i) {
        const Label l = i % 2 ? Label::Osteoporotic : Label::Normal;
        Tensor x = random_tensor({6}, gen, 0.0, 0.5);
        if (l == Label::Osteoporotic)
            for (std::size_t j = 0; j < 3; ++j) x[j] += 0.5;
        out.push_back({x, l});
    }
    return out;
}

Network toy_network(std::uint64_t seed) {
    return Network::build({6}, {LayerSpec::dense(5), LayerSpec::relu(), LayerSpec::dense(2), LayerSpec::softmax()},
                          seed);
}

}  // namespace

TEST_CASE("conv2d forward") {
    std::mt19937_64 gen(1);
    const Tensor x = random_tensor({1, 5, 5}, gen);

    Tensor delta({1, 1, 3, 3});
    delta[4] = 1.0;
    const Tensor cropped = conv2d_forward(x, delta, Tensor({1}));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(cropped.at(0, i, j) == x.at(0, i + 1, j + 1));

    const Tensor k = random_tensor({2, 1, 3, 3}, gen);
    const Tensor b = random_tensor({2}, gen);
    const Tensor zero_out = conv2d_forward(Tensor({1, 5, 5}), k, b);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < 9; ++i) CHECK(zero_out[c * 9 + i] == b[c]);

    const Tensor out = conv2d_forward(x, k, b);
    CHECK(out.shape() == std::vector<std::size_t>{2, 3, 3});
    CHECK(max_abs_diff(out.values(), oracle::conv_valid(x.values(), 1, 5, 5, k.values(), 2, b.values())) <= 1e-12);

    const Tensor x3 = random_tensor({3, 7, 6}, gen);
    const Tensor k3 = random_tensor({4, 3, 3, 3}, gen);
    const Tensor b3 = random_tensor({4}, gen);
    CHECK(max_abs_diff(conv2d_forward(x3, k3, b3).values(),
                       oracle::conv_valid(x3.values(), 3, 7, 6, k3.values(), 4, b3.values())) <= 1e-12);

    CHECK_THROWS_AS(conv2d_forward(Tensor({1, 2, 5}), k, b), ShapeError);
    CHECK_THROWS_AS(conv2d_forward(Tensor({2, 5, 5}), k, b), ShapeError);
}

TEST_CASE("maxpool forward") {
    const PoolResult one = maxpool2d_forward(Tensor({1, 2, 2}, {1, 2, 3, 4}));
    CHECK(one.output[0] == 4);
    CHECK(one.argmax[0] == 3);

    const PoolResult c = maxpool2d_forward(Tensor({1, 4, 6}, 0.3));
    CHECK(c.output.shape() == std::vector<std::size_t>{1, 2, 3});
    for (double v : c.output.values()) CHECK(v == 0.3);

    std::mt19937_64 gen(2);
    const Tensor x = random_tensor({2, 6, 6}, gen);
    CHECK(maxpool2d_forward(x).output.values() == oracle::window_max(x.values(), 2, 6, 6));

    // Odd trailing row and column are dropped.
    const Tensor odd = random_tensor({1, 5, 7}, gen);
    CHECK(maxpool2d_forward(odd).output.values() == oracle::window_max(odd.values(), 1, 5, 7));
    CHECK_THROWS_AS(maxpool2d_forward(Tensor({1, 1, 4})), ShapeError);
}

TEST_CASE("dense forward") {
    const Tensor x({3}, {0.5, -1.0, 2.0});
    Tensor eye({3, 3});
    for (std::size_t i = 0; i < 3; ++i) eye[i * 4] = 1.0;
    CHECK(dense_forward(x, eye, Tensor({3})).values() == x.values());

    std::mt19937_64 gen(3);
    const Tensor w = random_tensor({3, 4}, gen);
    const Tensor b = random_tensor({3}, gen);
    CHECK(dense_forward(Tensor({4}), w, b).values() == b.values());

    const Tensor x4 = random_tensor({4}, gen);
    const Tensor out = dense_forward(x4, w, b);
    for (std::size_t i = 0; i < 3; ++i) {
        double s = b[i];
        for (std::size_t j = 0; j < 4; ++j) s += w[i * 4 + j] * x4[j];
        CHECK(std::abs(out[i] - s) <= 1e-12);
    }
}

TEST_CASE("dense weight gradient is the outer product of delta and input") {
    const Tensor x({2}, {3.0, -2.0});
    const Tensor w({2, 2}, {1.0, 2.0, 3.0, 4.0});
    const Tensor up({2}, {0.5, -1.5});
    const DenseGrads g = dense_backward(x, w, up);
    CHECK(g.weights.values() == std::vector<double>{1.5, -1.0, -4.5, 3.0});
    CHECK(g.bias.values() == up.values());
    CHECK(g.input.values() == std::vector<double>{0.5 - 4.5, 1.0 - 6.0});
}

TEST_CASE("softmax") {
    const Tensor u = softmax(Tensor({4}, 1.7));
    for (double v : u.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Tensor z = random_tensor({5}, gen, -10.0, 10.0);
        Tensor shifted = z;
        for (auto& v : shifted.data()) v += 123.0;
        const Tensor p = softmax(z);
        double sum = 0.0;
        for (double v : p.values()) {
            CHECK(v > 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        CHECK(max_abs_diff(p.values(), softmax(shifted).values()) <= 1e-12);
    }

    const Tensor big = softmax(Tensor({2}, {1000.0, 0.0}));
    CHECK(std::isfinite(big[0]));
    CHECK(big[0] == doctest::Approx(1.0));
    CHECK(big[1] < 1e-300);
    CHECK(softmax_cross_entropy(Tensor({2}, {1000.0, 0.0}), 1) == doctest::Approx(1000.0));
}

TEST_CASE("finite-difference agreement for every layer kind") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CAPTURE(seed);
        CHECK(gradcheck::conv(seed) <= 1e-4);
        CHECK(gradcheck::pool(seed) <= 1e-4);
        CHECK(gradcheck::dense(seed) <= 1e-4);
        CHECK(gradcheck::activations(seed) <= 1e-4);
        CHECK(gradcheck::softmax_ce(seed) <= 1e-4);
        CHECK(gradcheck::network(seed) <= 1e-4);
    }
}

TEST_CASE("output-layer gradients vanish at an exact fit") {
    // One-hot output reached exactly: softmax of [0, -inf-ish] is not exact in
    // floating point, so use a target whose probability rounds to exactly 1.
    Network net({3}, {LayerSpec::dense(2), LayerSpec::softmax()},
                {Tensor({2, 3}), Tensor({2}, {800.0, 0.0})});
    const Gradients g = net.backward(net.forward_trace(Tensor({3}, {0.2, 0.4, 0.6})), Label::Normal);
    for (const auto& p : g.parameters)
        for (double v : p.values()) CHECK(std::abs(v) <= 1e-9);
    CHECK(g.loss <= 1e-9);
}

TEST_CASE("backward preconditions") {
    const Network net = toy_network(1);
    CHECK_THROWS_AS(net.backward(ForwardTrace{}, Label::Normal), Error);
    const Network no_softmax = Network::build({3}, {LayerSpec::dense(2)}, 0);
    CHECK_THROWS_AS(no_softmax.backward(no_softmax.forward_trace(Tensor({3})), Label::Normal), Error);
    CHECK_THROWS_AS(net.forward(Tensor({5})), ShapeError);
    CHECK_THROWS_AS(Network::build({4}, {LayerSpec::softmax(), LayerSpec::dense(2)}, 0), ShapeError);
    CHECK_THROWS_AS(Network::build({4}, {LayerSpec::conv2d(2)}, 0), ShapeError);
}

TEST_CASE("CNN architecture") {
    const Network a = build_cnn(11);
    const Network b = build_cnn(11);
    CHECK(a.output_shape() == std::vector<std::size_t>{2});
    CHECK(a.parameters() == b.parameters());
    CHECK(a.parameters() != build_cnn(12).parameters());
    CHECK(a.parameter_count() == (8 * 9 + 8) + (16 * 8 * 9 + 16) + (32 * 16 * 14 * 14 + 32) + (2 * 32 + 2));

    for (const auto& p : a.parameters()) {
        const double fan_in = p.rank() == 1 ? 0.0 : static_cast<double>(p.size() / p.dim(0));
        for (double v : p.values()) {
            if (p.rank() == 1) CHECK(v == 0.0);
            else CHECK(std::abs(v) <= std::sqrt(6.0 / fan_in));
        }
    }

    // Zero image, propagated by hand with non-zero biases.
    Network net = build_cnn(5);
    std::mt19937_64 gen(8);
    for (std::size_t i = 1; i < net.parameters().size(); i += 2)
        for (auto& v : net.parameters()[i].data()) v = std::uniform_real_distribution<double>(-0.5, 0.5)(gen);
    const auto& P = net.parameters();
    std::vector<double> h1(8);
    for (std::size_t c = 0; c < 8; ++c) h1[c] = std::max(0.0, P[1][c]);
    std::vector<double> h2(16);
    for (std::size_t k = 0; k < 16; ++k) {
        double s = P[3][k];
        for (std::size_t c = 0; c < 8; ++c)
            for (std::size_t t = 0; t < 9; ++t) s += h1[c] * P[2][(k * 8 + c) * 9 + t];
        h2[k] = std::max(0.0, s);
    }
    std::vector<double> h3(32);
    for (std::size_t u = 0; u < 32; ++u) {
        double s = P[5][u];
        for (std::size_t k = 0; k < 16; ++k)
            for (std::size_t pix = 0; pix < 14 * 14; ++pix) s += P[4][u * 3136 + k * 196 + pix] * h2[k];
        h3[u] = std::max(0.0, s);
    }
    double z[2];
    for (std::size_t o = 0; o < 2; ++o) {
        z[o] = P[7][o];
        for (std::size_t u = 0; u < 32; ++u) z[o] += P[6][o * 32 + u] * h3[u];
    }
    const double p1 = 1.0 / (1.0 + std::exp(z[0] - z[1]));
    const Tensor out = net.forward(Tensor({1, 64, 64}));
    CHECK(out[1] == doctest::Approx(p1).epsilon(1e-9));
    CHECK(out[0] == doctest::Approx(1.0 - p1).epsilon(1e-9));
}

TEST_CASE("FNN architecture") {
    for (std::size_t n : {1u, 23u, 256u}) {
        const Network net = build_fnn(n, 3);
        CHECK(net.output_shape() == std::vector<std::size_t>{2});
        CHECK(net.parameter_count() == 64 * n + 64 + 16 * 64 + 16 + 2 * 16 + 2);
    }
    Network net = build_fnn(4, 9);
    std::mt19937_64 gen(10);
    for (std::size_t i = 1; i < 6; i += 2)
        for (auto& v : net.parameters()[i].data()) v = std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
    const auto& P = net.parameters();
    std::vector<double> a(64), b(16);
    for (std::size_t i = 0; i < 64; ++i) a[i] = std::max(0.0, P[1][i]);
    for (std::size_t i = 0; i < 16; ++i) {
        double s = P[3][i];
        for (std::size_t j = 0; j < 64; ++j) s += P[2][i * 64 + j] * a[j];
        b[i] = std::max(0.0, s);
    }
    double z[2];
    for (std::size_t o = 0; o < 2; ++o) {
        z[o] = P[5][o];
        for (std::size_t j = 0; j < 16; ++j) z[o] += P[4][o * 16 + j] * b[j];
    }
    const Tensor out = net.forward(Tensor({4}));
    CHECK(out[0] == doctest::Approx(1.0 / (1.0 + std::exp(z[1] - z[0]))).epsilon(1e-12));
}

TEST_CASE("predict and tie rule") {
    CHECK(decide(Tensor({2}, {0.9, 0.1})).label == Label::Normal);
    CHECK(decide(Tensor({2}, {0.9, 0.1})).confidence == 0.9);
    const Prediction tie = decide(Tensor({2}, {0.5, 0.5}));
    CHECK(tie.label == Label::Normal);
    CHECK(tie.confidence == 0.5);
    CHECK(decide(Tensor({2}, {0.2, 0.8})).label == Label::Osteoporotic);

    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        const Tensor z = random_tensor({2}, gen, -5.0, 5.0);
        const double lambda = std::uniform_real_distribution<double>(0.01, 50.0)(gen);
        Tensor scaled = z;
        for (auto& v : scaled.data()) v *= lambda;
        CHECK(decide(softmax(z)).label == decide(softmax(scaled)).label);
    }
}

TEST_CASE("zero learning rate leaves weights unchanged") {
    const auto data = toy_dataset(12, 1);
    const Network start = toy_network(2);
    const TrainResult r = train(start, data, {.learning_rate = 0.0, .momentum = 0.9, .batch_size = 4, .epochs = 5});
    CHECK(r.network.parameters() == start.parameters());
    CHECK(r.curve.size() == 5);
}

TEST_CASE("training is deterministic and reduces loss") {
    const auto data = toy_dataset(20, 3);
    const TrainConfig cfg{.learning_rate = 1e-3, .momentum = 0.0, .batch_size = 4, .epochs = 30, .seed = 4};
    const TrainResult a = train(toy_network(6), data, cfg);
    const TrainResult b = train(toy_network(6), data, cfg);
    CHECK(a.network.parameters() == b.network.parameters());
    CHECK(save_checkpoint(make_checkpoint(a.network, {})) == save_checkpoint(make_checkpoint(b.network, {})));
    CHECK(a.curve.back().loss < a.curve.front().loss);

    const TrainResult fast = train(toy_network(6), data, {.learning_rate = 0.1, .epochs = 200, .seed = 1});
    CHECK(fast.curve.back().accuracy == 1.0);
    const TrainResult early = train(toy_network(6), data, {.learning_rate = 0.1, .epochs = 200, .seed = 1, .stop_loss = 0.05});
    CHECK(early.curve.back().loss < 0.05);
    CHECK(early.curve.size() < 200);
}

TEST_CASE("training input errors") {
    auto data = toy_dataset(6, 1);
    for (auto& ex : data) ex.label = Label::Normal;
    CHECK_THROWS_AS(train(toy_network(1), data, {}), DataError);
    CHECK_THROWS_AS(train(toy_network(1), std::vector<LabeledExample>{}, {}), DataError);
    const auto ok = toy_dataset(6, 1);
    CHECK_THROWS_AS(train(toy_network(1), ok, {.learning_rate = -1.0}), DataError);
    CHECK_THROWS_AS(train(toy_network(1), ok, {.momentum = 1.0}), DataError);
    CHECK_THROWS_AS(train(toy_network(1), ok, {.batch_size = 0}), DataError);
    CHECK_THROWS_AS(train(toy_network(1), ok, {.epochs = 0}), DataError);

    auto blowup = toy_dataset(6, 1);
    blowup[0].input[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(train(toy_network(1), blowup, {}), NumericError);
}

TEST_CASE("checkpoint round trip") {
    const Network net = build_cnn(21, 16);
    const TrainingMetadata meta{99, 15, 0.125, "model=cnn\n"};
    const NetworkCheckpoint c = make_checkpoint(net, meta);
    const auto bytes = save_checkpoint(c);
    CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "OSTEO-NN");
    const NetworkCheckpoint back = load_checkpoint(bytes);
    CHECK(back == c);
    CHECK(save_checkpoint(back) == bytes);

    const Network restored = network_from_checkpoint(back);
    std::mt19937_64 gen(3);
    const Tensor x = random_tensor({1, 16, 16}, gen, 0.0, 1.0);
    const Network direct = network_from_checkpoint(c);
    CHECK(restored.forward(x).values() == direct.forward(x).values());
    // Only float narrowing separates the restored network from the original.
    CHECK(max_abs_diff(restored.forward(x).values(), net.forward(x).values()) < 1e-5);
    // A network already at float precision survives unchanged.
    CHECK(network_from_checkpoint(make_checkpoint(restored, meta)).parameters() == restored.parameters());
}

TEST_CASE("checkpoint decoding errors") {
    const auto bytes = save_checkpoint(make_checkpoint(build_fnn(3, 1), {}));
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(load_checkpoint(bad_magic), DataError);
    auto bad_version = bytes;
    bad_version[8] = 2;
    CHECK_THROWS_AS(load_checkpoint(bad_version), DataError);
    CHECK_THROWS_AS(load_checkpoint(std::span(bytes).first(bytes.size() - 1)), DataError);
    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(load_checkpoint(trailing), DataError);

    NetworkCheckpoint c = make_checkpoint(build_fnn(3, 1), {});
    c.weights[0].pop_back();
    CHECK_THROWS_AS(network_from_checkpoint(c), DataError);
}
