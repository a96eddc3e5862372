#include "osteo/app/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "osteo/colorspace.hpp"
#include "osteo/csv.hpp"
#include "osteo/imageio.hpp"
#include "osteo/quantify.hpp"
#include "osteo/random.hpp"
#include "osteo/segmentation.hpp"
#include "osteo/synthgen.hpp"

namespace osteo::app {

namespace fs = std::filesystem;

namespace {

// Stream ids for seeds derived from the run seed.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kShuffleStream = 3;

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

void require_empty_or_forced(const fs::path& dir, bool force) {
    if (!force && fs::exists(dir) && (!fs::is_directory(dir) || !fs::is_empty(dir))) {
        throw UsageError("output directory " + dir.string() + " is not empty (use --force to overwrite)");
    }
}

std::vector<nn::LabeledExample> load_examples(const fs::path& dir, const std::vector<ManifestEntry>& entries,
                                              const ModelSettings& settings) {
    std::vector<nn::LabeledExample> examples;
    examples.reserve(entries.size());
    for (const auto& e : entries) {
        examples.push_back({model_input(read_pnm_file(dir / e.filename), settings), e.label});
    }
    return examples;
}

// ---------------------------------------------------------------------------
// Stages shared by the individual commands and `pipeline`.

struct GenDataArgs {
    std::size_t n = 200;
    std::uint64_t seed = 7;
    fs::path out;
    bool force = false;
    double noise_sigma = 0.05;
    int size = 64;
};

void do_gen_data(const GenDataArgs& a, std::ostream& out) {
    if (a.n < 2) throw UsageError("--n must be at least 2 so both classes are present");
    require_empty_or_forced(a.out, a.force);

    DatasetRecipe recipe;
    for (ClassRecipe* c : {&recipe.normal, &recipe.osteoporotic}) {
        c->base.noise_sigma = a.noise_sigma;
        c->base.size = a.size;
    }
    const PhantomDataset ds = generate_dataset(a.n, recipe, a.seed);

    ensure_directory(a.out);
    std::size_t normal = 0;
    for (const auto& r : ds.records) {
        write_pnm_file(a.out / r.filename, denormalize(r.phantom.image));
        if (r.spec.label == Label::Normal) ++normal;
    }
    write_text_file(a.out / "manifest.csv", ds.manifest_csv());
    out << "gen-data: wrote " << ds.records.size() << " phantoms (" << normal << " Normal, "
        << ds.records.size() - normal << " Osteoporotic) to " << a.out.string() << "\n";
}

struct TrainArgs {
    RunConfig config;
    fs::path data;
    fs::path out;
};

void do_train(const TrainArgs& a, std::ostream& out) {
    const RunConfig& cfg = a.config;
    const ModelSettings settings{cfg.model, cfg.fnn_input, cfg.preprocess};
    settings.preprocess.bilateral.validate();
    if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
        throw UsageError("validation_fraction must lie in (0, 1)");
    }
    nn::TrainConfig tc = cfg.train_config(cfg.model);
    tc.seed = derive_seed(cfg.train_seed, kShuffleStream);
    tc.validate();

    const auto entries = load_manifest(a.data);
    if (entries.size() < 2) throw DataError("training needs at least 2 manifest entries");
    const auto examples = load_examples(a.data, entries, settings);
    const auto mask = validation_mask(entries.size(), cfg.validation_fraction, derive_seed(cfg.train_seed, kSplitStream));

    std::vector<nn::LabeledExample> train_set;
    std::vector<nn::LabeledExample> val_set;
    std::string split_csv = "filename,subset\n";
    for (std::size_t i = 0; i < examples.size(); ++i) {
        (mask[i] ? val_set : train_set).push_back(examples[i]);
        split_csv += entries[i].filename + (mask[i] ? ",validation\n" : ",train\n");
    }

    nn::Network net = initial_network(settings, derive_seed(cfg.train_seed, kInitStream));
    const nn::TrainResult result = nn::train(std::move(net), train_set, tc);

    const auto& last = result.curve.back();
    const nn::NetworkCheckpoint ckpt = nn::make_checkpoint(
        result.network, {cfg.train_seed, static_cast<std::uint32_t>(last.epoch), last.loss, settings.to_notes()});
    // Report accuracy for the weights as stored, which is what eval will see.
    const nn::Network stored = nn::network_from_checkpoint(ckpt);
    const Evaluation train_eval = evaluate(stored, train_set);
    const Evaluation val_eval = evaluate(stored, val_set);

    std::string curve_csv = "epoch,loss,accuracy\n";
    for (const auto& row : result.curve) {
        curve_csv += std::to_string(row.epoch) + "," + format_double(row.loss) + "," + format_double(row.accuracy) + "\n";
    }
    const std::string model(model_name(cfg.model));
    std::string summary = "key,value\n";
    summary += "model," + model + "\n";
    summary += "parameters," + std::to_string(stored.parameter_count()) + "\n";
    summary += "epochs_run," + std::to_string(last.epoch) + "\n";
    summary += "final_loss," + format_double(last.loss) + "\n";
    summary += "train_examples," + std::to_string(train_set.size()) + "\n";
    summary += "validation_examples," + std::to_string(val_set.size()) + "\n";
    summary += "train_accuracy," + format_double(*train_eval.report.accuracy) + "\n";
    summary += "validation_accuracy," + format_double(*val_eval.report.accuracy) + "\n";

    ensure_directory(a.out);
    nn::save_checkpoint_file(a.out / (model + ".ckpt"), ckpt);
    write_text_file(a.out / (model + "_curve.csv"), curve_csv);
    write_text_file(a.out / (model + "_split.csv"), split_csv);
    write_text_file(a.out / (model + "_summary.csv"), summary);
    out << "train " << model << ": " << last.epoch << " epochs, final loss " << format_fixed(last.loss, 6)
        << ", train accuracy " << format_percent(train_eval.report.accuracy) << "%, validation accuracy "
        << format_percent(val_eval.report.accuracy) << "%\n";
}

struct EvalArgs {
    fs::path checkpoint;
    fs::path data;
    fs::path split;
    fs::path out;
    fs::path predictions;
};

void do_eval(const EvalArgs& a, std::ostream& out) {
    const nn::NetworkCheckpoint ckpt = nn::load_checkpoint_file(a.checkpoint);
    const ModelSettings settings = ModelSettings::from_notes(ckpt.metadata.notes);
    const nn::Network net = nn::network_from_checkpoint(ckpt);

    auto entries = load_manifest(a.data);
    if (!a.split.empty()) {
        const CsvTable split = read_csv_file(a.split);
        const std::size_t fcol = split.column("filename");
        const std::size_t scol = split.column("subset");
        std::map<std::string, bool> held_out;
        for (const auto& row : split.rows) held_out[row[fcol]] = row[scol] == "validation";
        std::vector<ManifestEntry> kept;
        for (const auto& e : entries) {
            const auto it = held_out.find(e.filename);
            if (it == held_out.end()) throw DataError("split file does not list " + e.filename);
            if (it->second) kept.push_back(e);
        }
        entries = std::move(kept);
    }
    if (entries.empty()) throw DataError("no examples to evaluate");

    const auto examples = load_examples(a.data, entries, settings);
    const Evaluation ev = evaluate(net, examples);
    const std::string csv = metrics_csv(model_name(settings.model), ev);

    std::string preds = "filename,truth,prediction,confidence\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        preds += entries[i].filename + "," + std::string(label_name(entries[i].label)) + "," +
                 std::string(label_name(ev.predictions[i].label)) + "," + format_double(ev.predictions[i].confidence) +
                 "\n";
    }
    if (!a.out.empty()) write_text_file(a.out, csv);
    if (!a.predictions.empty()) write_text_file(a.predictions, preds);
    out << csv;
}

struct CompareArgs {
    fs::path cnn;
    fs::path fnn;
    fs::path out;
    fs::path text;
};

void do_compare(const CompareArgs& a, std::ostream& out) {
    const ComparisonTable table = compare_report(read_metrics_csv(a.cnn), read_metrics_csv(a.fnn));
    if (!a.out.empty()) write_text_file(a.out, table.to_csv());
    if (!a.text.empty()) write_text_file(a.text, table.to_text());
    out << table.to_text();
}

// ---------------------------------------------------------------------------
// Single-image stages.

struct FilterArgs {
    double sigma_s = 3.0;
    double sigma_r = 0.1;
    int radius = 6;

    BilateralParams params() const {
        BilateralParams p{sigma_s, sigma_r, radius};
        p.validate();
        return p;
    }
};

void add_filter_options(CLI::App* cmd, FilterArgs& f) {
    cmd->add_option("--sigma-s", f.sigma_s, "Bilateral spatial sigma in pixels");
    cmd->add_option("--sigma-r", f.sigma_r, "Bilateral range sigma in normalized intensity");
    cmd->add_option("--radius", f.radius, "Bilateral window radius in pixels");
}

void do_preprocess(const std::string& input, const fs::path& output, const FilterArgs& f, bool ascii,
                   std::ostream& out) {
    const BilateralParams params = f.params();
    const FloatImage img = normalize(to_gray(read_pnm_file(input)));
    const RawImage filtered = denormalize(bilateral_filter(img, params));
    write_pnm_file(output, filtered, !ascii);
    out << "preprocess: wrote " << output.string() << "\n";
}

void do_porosity(const std::vector<std::string>& inputs, const std::string& threshold, bool raw, const FilterArgs& f,
                 const fs::path& output, std::ostream& out) {
    std::optional<double> fixed;
    if (threshold != "auto") {
        try {
            fixed = parse_double(threshold);
        } catch (const DataError&) {
            throw UsageError("--threshold must be 'auto' or a number, got '" + threshold + "'");
        }
    }
    const BilateralParams params = f.params();
    std::string csv = "file,black_pixels,total_pixels,threshold,porosity\n";
    for (const auto& path : inputs) {
        FloatImage img = normalize(to_gray(read_pnm_file(path)));
        if (!raw) img = bilateral_filter(img, params);
        const PorosityResult r = porosity(img, fixed);
        csv += path + "," + std::to_string(r.black_pixels) + "," + std::to_string(r.total_pixels) + "," +
               format_double(r.threshold_used) + "," + format_double(r.porosity) + "\n";
    }
    if (!output.empty()) write_text_file(output, csv);
    out << csv;
}

void do_channels(const std::string& input, const std::string& prefix, std::ostream& out) {
    const ChannelPlanes planes = split_channels(read_pnm_file(input));
    write_pnm_file(prefix + "_R.pgm", planes.red);
    write_pnm_file(prefix + "_G.pgm", planes.green);
    write_pnm_file(prefix + "_B.pgm", planes.blue);
    out << "channels: wrote " << prefix << "_{R,G,B}.pgm\n";
}

void do_lab(const std::string& input, const std::string& prefix, std::ostream& out) {
    const LabPlanes planes = lab_channels(rgb_to_lab(read_pnm_file(input)));
    const RawImage L = denormalize(planes.L);
    const RawImage a = denormalize(planes.a);
    const RawImage b = denormalize(planes.b);
    write_pnm_file(prefix + "_L.pgm", L);
    write_pnm_file(prefix + "_a.pgm", a);
    write_pnm_file(prefix + "_b.pgm", b);
    out << "lab: wrote " << prefix << "_{L,a,b}.pgm\n";
}

void do_segment(const std::string& input, const KMeansParams& params, bool force_gray, const std::string& prefix,
                std::ostream& out) {
    const RawImage raw = read_pnm_file(input);
    const bool use_lab = raw.channels == 3 && !force_gray;
    FeatureMatrix features;
    Segmentation seg;
    std::vector<std::string> columns;
    if (use_lab) {
        const LabImage lab = rgb_to_lab(raw);
        features = lab_features(lab);
        seg = segment_image(lab, params);
        columns = {"L", "a_over_128", "b_over_128"};
    } else {
        const FloatImage img = normalize(to_gray(raw));
        features = intensity_features(img);
        seg = segment_image(img, params);
        columns = {"intensity"};
    }

    std::vector<std::size_t> pixels(seg.model.k, 0);
    std::vector<double> cluster_inertia(seg.model.k, 0.0);
    for (std::size_t i = 0; i < seg.labels.size(); ++i) {
        const auto c = seg.labels[i];
        ++pixels[c];
        const auto row = features.row(i);
        const auto centroid = seg.model.centroid(c);
        for (std::size_t d = 0; d < row.size(); ++d) cluster_inertia[c] += (row[d] - centroid[d]) * (row[d] - centroid[d]);
    }
    std::string csv = "cluster,pixels";
    for (const auto& c : columns) csv += "," + c;
    csv += ",inertia\n";
    for (std::size_t c = 0; c < seg.model.k; ++c) {
        csv += std::to_string(c) + "," + std::to_string(pixels[c]);
        for (double v : seg.model.centroid(c)) csv += "," + format_double(v);
        csv += "," + format_double(cluster_inertia[c]) + "\n";
    }

    write_pnm_file(prefix + "_labels.pgm", label_image(seg));
    write_text_file(prefix + "_centroids.csv", csv);
    out << "segment: k=" << seg.model.k << ", " << seg.model.iterations_run << " iterations, inertia "
        << format_double(seg.model.inertia) << "\n";
}

void do_pipeline(const RunConfig& cfg, const fs::path& out_dir, bool force, std::ostream& out) {
    require_empty_or_forced(out_dir, force);
    const fs::path data = out_dir / "data";
    do_gen_data({cfg.n, cfg.data_seed, data, force, cfg.noise_sigma, cfg.preprocess.input_size}, out);
    for (ModelKind m : {ModelKind::Cnn, ModelKind::Fnn}) {
        RunConfig c = cfg;
        c.model = m;
        do_train({c, data, out_dir}, out);
        const std::string name(model_name(m));
        do_eval({out_dir / (name + ".ckpt"), data, out_dir / (name + "_split.csv"), out_dir / (name + "_metrics.csv"),
                 out_dir / (name + "_predictions.csv")},
                out);
    }
    do_compare({out_dir / "cnn_metrics.csv", out_dir / "fnn_metrics.csv", out_dir / "comparison.csv",
                out_dir / "comparison.txt"},
               out);
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<ManifestEntry> load_manifest(const fs::path& dir) {
    const fs::path path = dir / "manifest.csv";
    if (!fs::exists(path)) throw DataError("missing manifest " + path.string());
    const CsvTable table = read_csv_file(path);
    const std::size_t fcol = table.column("filename");
    const std::size_t lcol = table.column("label");
    std::vector<ManifestEntry> entries;
    for (const auto& row : table.rows) {
        const auto label = parse_label(row[lcol]);
        if (!label) throw DataError("manifest has unknown label '" + row[lcol] + "'");
        entries.push_back({row[fcol], *label});
    }
    return entries;
}

std::vector<bool> validation_mask(std::size_t n, double fraction, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    auto held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (n >= 2) held = std::clamp<std::size_t>(held, 1, n - 1);
    std::vector<bool> mask(n, false);
    for (std::size_t i = 0; i < held && i < n; ++i) mask[order[i]] = true;
    return mask;
}

std::string ModelSettings::to_notes() const {
    const auto& b = preprocess.bilateral;
    return "model=" + std::string(model_name(model)) + "\n" + "fnn_input=" + std::string(fnn_input_name(fnn_input)) +
           "\n" + "sigma_spatial=" + format_double(b.sigma_spatial) + "\n" + "sigma_range=" +
           format_double(b.sigma_range) + "\n" + "radius=" + std::to_string(b.radius) + "\n" +
           "filter=" + (preprocess.filter ? "1" : "0") + "\n" + "input_size=" + std::to_string(preprocess.input_size) +
           "\n";
}

ModelSettings ModelSettings::from_notes(const std::string& notes) {
    ModelSettings s;
    std::map<std::string, std::string> kv;
    std::size_t pos = 0;
    while (pos < notes.size()) {
        std::size_t end = notes.find('\n', pos);
        if (end == std::string::npos) end = notes.size();
        const std::string line = notes.substr(pos, end - pos);
        pos = end + 1;
        const auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto need = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw DataError(std::string("checkpoint notes lack '") + key + "'");
        return it->second;
    };
    try {
        s.model = parse_model(need("model"));
    } catch (const UsageError& e) {
        throw DataError(e.what());
    }
    s.fnn_input = parse_fnn_input(need("fnn_input"));
    s.preprocess.bilateral.sigma_spatial = parse_double(need("sigma_spatial"));
    s.preprocess.bilateral.sigma_range = parse_double(need("sigma_range"));
    s.preprocess.bilateral.radius = static_cast<int>(parse_int(need("radius")));
    s.preprocess.filter = need("filter") == "1";
    s.preprocess.input_size = static_cast<int>(parse_int(need("input_size")));
    return s;
}

nn::Tensor model_input(const RawImage& raw, const ModelSettings& settings) {
    const FloatImage img = prepare_image(raw, settings.preprocess);
    return settings.model == ModelKind::Cnn ? cnn_input(img) : fnn_input(img, settings.fnn_input);
}

nn::Network initial_network(const ModelSettings& settings, std::uint64_t seed) {
    if (settings.model == ModelKind::Cnn) {
        return nn::build_cnn(seed, static_cast<std::size_t>(settings.preprocess.input_size));
    }
    return nn::build_fnn(fnn_feature_dim(settings.fnn_input), seed);
}

Evaluation evaluate(const nn::Network& network, std::span<const nn::LabeledExample> examples) {
    Evaluation ev;
    std::vector<Label> predicted;
    std::vector<Label> truth;
    for (const auto& ex : examples) {
        ev.predictions.push_back(nn::predict(network, ex.input));
        predicted.push_back(ev.predictions.back().label);
        truth.push_back(ex.label);
    }
    ev.counts = confusion(predicted, truth);
    ev.report = MetricsReport::from_counts(ev.counts);
    return ev;
}

std::string metrics_csv(std::string_view model, const Evaluation& eval) {
    const auto& c = eval.counts;
    return "model,sensitivity,specificity,accuracy,tp,fp,tn,fn\n" + std::string(model) + "," +
           format_percent(eval.report.sensitivity) + "," + format_percent(eval.report.specificity) + "," +
           format_percent(eval.report.accuracy) + "," + std::to_string(c.tp) + "," + std::to_string(c.fp) + "," +
           std::to_string(c.tn) + "," + std::to_string(c.fn) + "\n";
}

MetricsReport read_metrics_csv(const fs::path& path) {
    const CsvTable t = read_csv_file(path);
    if (t.rows.size() != 1) throw DataError(path.string() + ": expected exactly one metrics row");
    const auto& row = t.rows[0];
    const auto has = [&](const char* name) {
        return std::find(t.header.begin(), t.header.end(), name) != t.header.end();
    };
    if (has("tp") && has("fp") && has("tn") && has("fn")) {
        auto count = [&](const char* name) {
            const long long v = parse_int(row[t.column(name)]);
            if (v < 0) throw DataError(path.string() + ": negative count in column " + name);
            return static_cast<std::uint64_t>(v);
        };
        return MetricsReport::from_counts({count("tp"), count("fp"), count("tn"), count("fn")});
    }
    auto percent = [&](const char* name) -> std::optional<double> {
        const std::string& cell = row[t.column(name)];
        if (cell == "NA") return std::nullopt;
        return parse_double(cell) / 100.0;
    };
    return {percent("sensitivity"), percent("specificity"), percent("accuracy")};
}

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Osteoporosis detection pipeline on bone-densitometry images", "osteo"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    GenDataArgs gen;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a labeled synthetic phantom dataset");
    gen_cmd->add_option("--n", gen.n, "Number of phantoms (half per class)");
    gen_cmd->add_option("--seed", gen.seed, "Dataset seed");
    gen_cmd->add_option("--out", gen_out, "Output directory")->required();
    gen_cmd->add_option("--noise-sigma", gen.noise_sigma, "Gaussian noise sigma");
    gen_cmd->add_option("--size", gen.size, "Phantom width and height in pixels");
    gen_cmd->add_flag("--force", gen.force, "Write into a non-empty output directory");

    std::string pre_in, pre_out;
    FilterArgs pre_filter;
    bool pre_ascii = false;
    auto* pre_cmd = app.add_subcommand("preprocess", "Bilateral-filter an image to a gray PNM");
    pre_cmd->add_option("input", pre_in, "Input PNM")->required();
    pre_cmd->add_option("--out", pre_out, "Output PGM")->required();
    add_filter_options(pre_cmd, pre_filter);
    pre_cmd->add_flag("--ascii", pre_ascii, "Write plain (P2) output");

    std::vector<std::string> por_in;
    std::string por_threshold = "auto", por_out;
    bool por_raw = false;
    FilterArgs por_filter;
    auto* por_cmd = app.add_subcommand("porosity", "Black-pixel fraction of each image as CSV");
    por_cmd->add_option("inputs", por_in, "Input PNM files")->required();
    por_cmd->add_option("--threshold", por_threshold, "Black threshold in [0,1] or 'auto' (Otsu)");
    por_cmd->add_flag("--raw", por_raw, "Measure the unfiltered image");
    add_filter_options(por_cmd, por_filter);
    por_cmd->add_option("--out", por_out, "Also write the CSV to this file");

    std::string ch_in, ch_prefix;
    auto* ch_cmd = app.add_subcommand("channels", "Split an RGB image into R, G, B planes");
    ch_cmd->add_option("input", ch_in, "Input PPM")->required();
    ch_cmd->add_option("--out-prefix", ch_prefix, "Output path prefix")->required();

    std::string lab_in, lab_prefix;
    auto* lab_cmd = app.add_subcommand("lab", "Write the L, a, b planes of an RGB image");
    lab_cmd->add_option("input", lab_in, "Input PPM")->required();
    lab_cmd->add_option("--out-prefix", lab_prefix, "Output path prefix")->required();

    std::string seg_in, seg_prefix;
    KMeansParams seg_params;
    bool seg_gray = false;
    auto* seg_cmd = app.add_subcommand("segment", "K-means segmentation to a label image and centroid CSV");
    seg_cmd->add_option("input", seg_in, "Input PNM")->required();
    seg_cmd->add_option("--k", seg_params.k, "Cluster count");
    seg_cmd->add_option("--seed", seg_params.seed, "Seeding PRNG seed");
    seg_cmd->add_option("--max-iter", seg_params.max_iter, "Maximum Lloyd iterations");
    seg_cmd->add_option("--tol", seg_params.tol, "Stop when no centroid moves this far");
    seg_cmd->add_flag("--gray", seg_gray, "Cluster gray intensity even for RGB input");
    seg_cmd->add_option("--out-prefix", seg_prefix, "Output path prefix")->required();

    std::string train_config, train_model, train_data, train_out;
    int train_epochs = 0;
    auto* train_cmd = app.add_subcommand("train", "Train a CNN or FNN on a generated dataset");
    train_cmd->add_option("--config", train_config, "Run configuration file (empty: defaults)");
    train_cmd->add_option("--model", train_model, "cnn or fnn (overrides the config)");
    train_cmd->add_option("--data", train_data, "Dataset directory (overrides the config)");
    train_cmd->add_option("--out", train_out, "Output directory (overrides the config)");
    train_cmd->add_option("--epochs", train_epochs, "Epoch count (overrides the config; 0 keeps it)");

    EvalArgs ev;
    std::string ev_ckpt, ev_data, ev_split, ev_out, ev_preds;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint; prints metrics CSV");
    eval_cmd->add_option("--checkpoint", ev_ckpt, "Checkpoint file")->required();
    eval_cmd->add_option("--data", ev_data, "Dataset directory")->required();
    eval_cmd->add_option("--split", ev_split, "Split CSV from train; only validation rows are used");
    eval_cmd->add_option("--out", ev_out, "Also write the metrics CSV here");
    eval_cmd->add_option("--predictions", ev_preds, "Write per-example predictions CSV here");

    std::string cmp_cnn, cmp_fnn, cmp_out, cmp_text;
    auto* cmp_cmd = app.add_subcommand("compare", "Compare CNN and FNN metrics CSVs");
    cmp_cmd->add_option("--cnn", cmp_cnn, "CNN metrics CSV")->required();
    cmp_cmd->add_option("--fnn", cmp_fnn, "FNN metrics CSV")->required();
    cmp_cmd->add_option("--out", cmp_out, "Write the comparison CSV here");
    cmp_cmd->add_option("--text", cmp_text, "Write the text table here");

    std::string pipe_config, pipe_out;
    bool pipe_force = false;
    auto* pipe_cmd = app.add_subcommand("pipeline", "gen-data, train both models, eval, and compare");
    pipe_cmd->add_option("--config", pipe_config, "Run configuration file (empty: defaults)");
    pipe_cmd->add_option("--out", pipe_out, "Output directory (overrides the config)");
    pipe_cmd->add_flag("--force", pipe_force, "Write into a non-empty output directory");

    std::string ts_value;
    auto* ts_cmd = app.add_subcommand("tscore", "Classify a T-score");
    ts_cmd->add_option("value", ts_value, "T-score")->required()->allow_extra_args(false);

    auto* cfg_cmd = app.add_subcommand("default-config", "Print the default run configuration");

    std::vector<const char*> argv{"osteo"};
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "osteo: usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (*gen_cmd) {
            gen.out = gen_out;
            do_gen_data(gen, out);
        } else if (*pre_cmd) {
            do_preprocess(pre_in, pre_out, pre_filter, pre_ascii, out);
        } else if (*por_cmd) {
            do_porosity(por_in, por_threshold, por_raw, por_filter, por_out, out);
        } else if (*ch_cmd) {
            do_channels(ch_in, ch_prefix, out);
        } else if (*lab_cmd) {
            do_lab(lab_in, lab_prefix, out);
        } else if (*seg_cmd) {
            do_segment(seg_in, seg_params, seg_gray, seg_prefix, out);
        } else if (*train_cmd) {
            TrainArgs ta;
            ta.config = train_config.empty() ? RunConfig{} : load_run_config(train_config);
            if (!train_model.empty()) ta.config.model = parse_model(train_model);
            if (train_epochs < 0) throw UsageError("--epochs must be positive");
            if (train_epochs > 0) ta.config.epochs = train_epochs;
            ta.data = train_data.empty() ? ta.config.dataset : train_data;
            ta.out = train_out.empty() ? ta.config.output : train_out;
            do_train(ta, out);
        } else if (*eval_cmd) {
            do_eval({ev_ckpt, ev_data, ev_split, ev_out, ev_preds}, out);
        } else if (*cmp_cmd) {
            do_compare({cmp_cnn, cmp_fnn, cmp_out, cmp_text}, out);
        } else if (*pipe_cmd) {
            const RunConfig cfg = pipe_config.empty() ? RunConfig{} : load_run_config(pipe_config);
            do_pipeline(cfg, pipe_out.empty() ? fs::path(cfg.output) : fs::path(pipe_out), pipe_force, out);
        } else if (*ts_cmd) {
            double t = 0.0;
            try {
                t = parse_double(ts_value);
            } catch (const DataError&) {
                throw UsageError("T-score must be a number, got '" + ts_value + "'");
            }
            const TScoreClassification c = classify_tscore(t);
            out << "tscore,category\n" << format_double(c.tscore) << "," << category_name(c.category) << "\n";
        } else if (*cfg_cmd) {
            out << default_config_text();
        }
    } catch (const UsageError& e) {
        err << "osteo " << command << ": usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericError& e) {
        err << "osteo " << command << ": numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "osteo " << command << ": error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

}  // namespace osteo::app
