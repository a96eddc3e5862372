#include "osteo/train.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "osteo/random.hpp"

namespace osteo::nn {

void TrainConfig::validate() const {
    if (!std::isfinite(learning_rate) || learning_rate < 0.0) throw DataError("learning_rate must be >= 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw DataError("momentum must lie in [0, 1)");
    if (batch_size < 1) throw DataError("batch_size must be at least 1");
    if (epochs < 1) throw DataError("epochs must be at least 1");
    if (!std::isfinite(stop_loss) || stop_loss < 0.0) throw DataError("stop_loss must be >= 0");
}

TrainResult train(Network network, std::span<const LabeledExample> data, const TrainConfig& config) {
    config.validate();
    if (data.empty()) throw DataError("training set is empty");
    bool seen[2] = {false, false};
    for (const auto& ex : data) seen[static_cast<int>(ex.label)] = true;
    if (!seen[0] || !seen[1]) throw DataError("training set must contain both classes");

    auto& params = network.parameters();
    std::vector<Tensor> velocity;
    std::vector<Tensor> batch_grad;
    for (const auto& p : params) {
        velocity.emplace_back(p.shape());
        batch_grad.emplace_back(p.shape());
    }

    Rng rng(config.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }

        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            for (auto& g : batch_grad) std::fill(g.data().begin(), g.data().end(), 0.0);

            for (std::size_t b = start; b < end; ++b) {
                const LabeledExample& ex = data[order[b]];
                const ForwardTrace trace = network.forward_trace(ex.input);
                const Gradients g = network.backward(trace, ex.label);
                if (!std::isfinite(g.loss)) {
                    std::ostringstream msg;
                    msg << "non-finite loss at epoch " << epoch << ", example " << order[b];
                    throw NumericError(msg.str());
                }
                loss_sum += g.loss;
                if (decide(trace.output()).label == ex.label) ++correct;
                for (std::size_t p = 0; p < params.size(); ++p) {
                    auto dst = batch_grad[p].data();
                    auto src = g.parameters[p].data();
                    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
                }
            }

            const double scale = config.learning_rate / static_cast<double>(end - start);
            for (std::size_t p = 0; p < params.size(); ++p) {
                auto w = params[p].data();
                auto v = velocity[p].data();
                auto g = batch_grad[p].data();
                for (std::size_t j = 0; j < w.size(); ++j) {
                    v[j] = config.momentum * v[j] - scale * g[j];
                    w[j] += v[j];
                }
            }
        }

        const double mean_loss = loss_sum / static_cast<double>(data.size());
        result.curve.push_back({epoch, mean_loss, static_cast<double>(correct) / static_cast<double>(data.size())});
        if (config.stop_loss > 0.0 && mean_loss < config.stop_loss) break;
    }
    result.network = std::move(network);
    return result;
}

Prediction decide(const Tensor& probabilities) {
    if (probabilities.rank() != 1 || probabilities.size() != 2) {
        throw ShapeError("decide expects a two-class probability vector");
    }
    if (probabilities[1] > probabilities[0]) return {Label::Osteoporotic, probabilities[1]};
    return {Label::Normal, probabilities[0]};
}

Prediction predict(const Network& network, const Tensor& input) {
    return decide(network.forward(input));
}

}  // namespace osteo::nn
