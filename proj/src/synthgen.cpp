#include "osteo/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "osteo/csv.hpp"
#include "osteo/random.hpp"

namespace osteo {

namespace {

constexpr int kAttemptBudget = 200000;

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::string phantom_filename(std::size_t index, std::size_t n) {
    std::string digits = std::to_string(index);
    const std::size_t width = std::max<std::size_t>(4, std::to_string(n == 0 ? 0 : n - 1).size());
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return "phantom_" + digits + ".pgm";
}

}  // namespace

void PhantomSpec::validate() const {
    if (size < 4) throw DataError("phantom size must be at least 4");
    if (!in_unit(pore_fraction)) throw DataError("pore_fraction must lie in [0, 1]");
    if (radius_min < 1 || radius_max < radius_min) throw DataError("pore radius range must satisfy 1 <= min <= max");
    if (!in_unit(background_intensity) || !in_unit(bone_intensity)) {
        throw DataError("phantom intensities must lie in [0, 1]");
    }
    if (bone_intensity - background_intensity < 0.2) {
        throw DataError("bone intensity must exceed background intensity by at least 0.2");
    }
    if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) throw DataError("noise_sigma must be >= 0");
}

Phantom generate_phantom(const PhantomSpec& spec) {
    spec.validate();
    const int size = spec.size;
    const std::size_t total = static_cast<std::size_t>(size) * size;
    std::vector<std::uint8_t> dark(total, 0);
    std::size_t dark_count = 0;

    const auto target = static_cast<std::size_t>(std::ceil(spec.pore_fraction * static_cast<double>(total) - 1e-9));
    const auto ceiling = std::min(
        total, static_cast<std::size_t>(std::floor((spec.pore_fraction + kPoreOvershoot) * static_cast<double>(total))));

    Rng rng(spec.seed);
    if (target >= total) {
        std::fill(dark.begin(), dark.end(), 1);
        dark_count = total;
    }
    int attempts = 0;
    while (dark_count < target) {
        if (++attempts > kAttemptBudget) {
            throw DataError("pore_fraction " + format_double(spec.pore_fraction) +
                            " is unreachable with radii " + std::to_string(spec.radius_min) + ".." +
                            std::to_string(spec.radius_max));
        }
        const int cx = static_cast<int>(rng.below(static_cast<std::uint64_t>(size)));
        const int cy = static_cast<int>(rng.below(static_cast<std::uint64_t>(size)));
        const int r = spec.radius_min +
                      static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.radius_max - spec.radius_min + 1)));
        const int x0 = std::max(0, cx - r), x1 = std::min(size - 1, cx + r);
        const int y0 = std::max(0, cy - r), y1 = std::min(size - 1, cy + r);

        std::size_t fresh = 0;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r && !dark[y * size + x]) ++fresh;
            }
        }
        if (fresh == 0 || dark_count + fresh > ceiling) continue;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) dark[y * size + x] = 1;
            }
        }
        dark_count += fresh;
    }

    Phantom out;
    out.image = FloatImage(size, size, 1);
    for (std::size_t i = 0; i < total; ++i) {
        double v = dark[i] ? spec.background_intensity : spec.bone_intensity;
        if (spec.noise_sigma > 0.0) v = std::clamp(v + spec.noise_sigma * rng.normal(), 0.0, 1.0);
        out.image.pixels[i] = v;
    }
    out.ground_truth_porosity = static_cast<double>(dark_count) / static_cast<double>(total);
    return out;
}

void DatasetRecipe::validate() const {
    for (const ClassRecipe* c : {&normal, &osteoporotic}) {
        if (!in_unit(c->pore_min) || !in_unit(c->pore_max) || c->pore_min > c->pore_max) {
            throw DataError("class pore range must satisfy 0 <= min <= max <= 1");
        }
        c->base.validate();
    }
    if (normal.pore_max >= osteoporotic.pore_min && osteoporotic.pore_max >= normal.pore_min) {
        throw DataError("Normal and Osteoporotic pore ranges overlap");
    }
}

PhantomDataset generate_dataset(std::size_t n, const DatasetRecipe& recipe, std::uint64_t seed) {
    if (n < 2) throw DataError("a dataset needs at least 2 examples (one per class)");
    recipe.validate();

    const std::size_t normal_count = n - n / 2;
    PhantomDataset ds;
    ds.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool is_normal = i < normal_count;
        const ClassRecipe& cls = is_normal ? recipe.normal : recipe.osteoporotic;
        Rng draw(derive_seed(seed, 2 * i));
        const double hi = std::max(cls.pore_min, cls.pore_max - kPoreOvershoot);

        PhantomRecord rec;
        rec.filename = phantom_filename(i, n);
        rec.spec = cls.base;
        rec.spec.label = is_normal ? Label::Normal : Label::Osteoporotic;
        rec.spec.pore_fraction = draw.uniform(cls.pore_min, hi);
        rec.spec.seed = derive_seed(seed, 2 * i + 1);
        rec.phantom = generate_phantom(rec.spec);
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

std::string PhantomDataset::manifest_csv() const {
    std::string out = "filename,label,pore_fraction,ground_truth_porosity,seed\n";
    for (const auto& r : records) {
        out += r.filename + "," + std::string(label_name(r.spec.label)) + "," + format_double(r.spec.pore_fraction) +
               "," + format_double(r.phantom.ground_truth_porosity) + "," + std::to_string(r.spec.seed) + "\n";
    }
    return out;
}

}  // namespace osteo
