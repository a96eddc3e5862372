#include "osteo/app/config.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>

#include "osteo/csv.hpp"

namespace osteo::app {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw DataError("not a boolean: '" + std::string(v) + "'");
}

std::uint64_t parse_count(std::string_view v) {
    const long long x = parse_int(v);
    if (x < 0) throw DataError("expected a non-negative integer, got '" + std::string(v) + "'");
    return static_cast<std::uint64_t>(x);
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"preprocess.sigma_spatial", [](RunConfig& c, std::string_view v) { c.preprocess.bilateral.sigma_spatial = parse_double(v); }},
        {"preprocess.sigma_range", [](RunConfig& c, std::string_view v) { c.preprocess.bilateral.sigma_range = parse_double(v); }},
        {"preprocess.radius", [](RunConfig& c, std::string_view v) { c.preprocess.bilateral.radius = static_cast<int>(parse_int(v)); }},
        {"preprocess.filter", [](RunConfig& c, std::string_view v) { c.preprocess.filter = parse_bool(v); }},
        {"preprocess.input_size", [](RunConfig& c, std::string_view v) { c.preprocess.input_size = static_cast<int>(parse_int(v)); }},
        {"model.kind", [](RunConfig& c, std::string_view v) { c.model = parse_model(v); }},
        {"model.fnn_input", [](RunConfig& c, std::string_view v) { c.fnn_input = parse_fnn_input(v); }},
        {"train.learning_rate", [](RunConfig& c, std::string_view v) { c.learning_rate = parse_double(v); }},
        {"train.momentum", [](RunConfig& c, std::string_view v) { c.momentum = parse_double(v); }},
        {"train.batch_size", [](RunConfig& c, std::string_view v) { c.batch_size = parse_count(v); }},
        {"train.epochs", [](RunConfig& c, std::string_view v) { c.epochs = static_cast<int>(parse_int(v)); }},
        {"train.seed", [](RunConfig& c, std::string_view v) { c.train_seed = parse_count(v); }},
        {"train.validation_fraction", [](RunConfig& c, std::string_view v) { c.validation_fraction = parse_double(v); }},
        {"data.dataset", [](RunConfig& c, std::string_view v) { c.dataset = std::string(v); }},
        {"data.output", [](RunConfig& c, std::string_view v) { c.output = std::string(v); }},
        {"data.n", [](RunConfig& c, std::string_view v) { c.n = parse_count(v); }},
        {"data.seed", [](RunConfig& c, std::string_view v) { c.data_seed = parse_count(v); }},
        {"data.noise_sigma", [](RunConfig& c, std::string_view v) { c.noise_sigma = parse_double(v); }},
    };
    return table;
}

}  // namespace

std::string_view model_name(ModelKind m) { return m == ModelKind::Cnn ? "cnn" : "fnn"; }

ModelKind parse_model(std::string_view s) {
    if (s == "cnn") return ModelKind::Cnn;
    if (s == "fnn") return ModelKind::Fnn;
    throw UsageError("unknown model '" + std::string(s) + "' (expected cnn or fnn)");
}

nn::TrainConfig default_train_config(ModelKind m) {
    nn::TrainConfig c;
    if (m == ModelKind::Cnn) {
        c.learning_rate = 0.01;
        c.momentum = 0.9;
        c.batch_size = 8;
        c.epochs = 15;
    } else {
        c.learning_rate = 0.05;
        c.momentum = 0.9;
        c.batch_size = 16;
        c.epochs = 150;
    }
    return c;
}

nn::TrainConfig RunConfig::train_config(ModelKind m) const {
    nn::TrainConfig c = default_train_config(m);
    if (learning_rate) c.learning_rate = *learning_rate;
    if (momentum) c.momentum = *momentum;
    if (batch_size) c.batch_size = *batch_size;
    if (epochs) c.epochs = *epochs;
    c.seed = train_seed;
    return c;
}

RunConfig parse_run_config(std::string_view text) {
    RunConfig config;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = "config line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw UsageError(where + "malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw UsageError(where + "expected key = value");
        const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw UsageError(where + "unknown key '" + key + "'");
        try {
            it->second(config, value);
        } catch (const DataError& e) {
            throw UsageError(where + key + ": " + e.what());
        }
    }
    return config;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(read_text_file(path));
}

std::string default_config_text() {
    const RunConfig c;
    const auto cnn = default_train_config(ModelKind::Cnn);
    const auto fnn = default_train_config(ModelKind::Fnn);
    std::string s;
    s += "[preprocess]\n";
    s += "sigma_spatial = " + format_double(c.preprocess.bilateral.sigma_spatial) + "\n";
    s += "sigma_range = " + format_double(c.preprocess.bilateral.sigma_range) + "\n";
    s += "radius = " + std::to_string(c.preprocess.bilateral.radius) + "\n";
    s += "filter = true\n";
    s += "input_size = " + std::to_string(c.preprocess.input_size) + "\n";
    s += "\n[model]\nkind = cnn\nfnn_input = features\n";
    s += "\n[train]\n";
    s += "# unset keys default per model: cnn lr " + format_double(cnn.learning_rate) + ", batch " +
         std::to_string(cnn.batch_size) + ", epochs " + std::to_string(cnn.epochs) + "; fnn lr " +
         format_double(fnn.learning_rate) + ", batch " + std::to_string(fnn.batch_size) + ", epochs " +
         std::to_string(fnn.epochs) + "; momentum " + format_double(cnn.momentum) + "\n";
    s += "seed = " + std::to_string(c.train_seed) + "\n";
    s += "validation_fraction = " + format_double(c.validation_fraction) + "\n";
    s += "\n[data]\n";
    s += "dataset = " + c.dataset + "\noutput = " + c.output + "\n";
    s += "n = " + std::to_string(c.n) + "\nseed = " + std::to_string(c.data_seed) + "\n";
    s += "noise_sigma = " + format_double(c.noise_sigma) + "\n";
    return s;
}

}  // namespace osteo::app
