#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osteo/imageio.hpp"
#include "osteo/label.hpp"

namespace osteo {

/// Parameters of one synthetic trabecular-bone phantom.
struct PhantomSpec {
    int size = 64;
    double pore_fraction = 0.0;
    int radius_min = 2;
    int radius_max = 6;
    double background_intensity = 0.2;
    double bone_intensity = 0.8;
    double noise_sigma = 0.05;
    std::uint64_t seed = 0;
    Label label = Label::Normal;

    void validate() const;
};

/// Generated discs may overshoot the target pore fraction by at most this much.
inline constexpr double kPoreOvershoot = 0.005;

struct Phantom {
    FloatImage image;
    /// Dark-pixel fraction before noise, as an exact count ratio.
    double ground_truth_porosity = 0.0;
};

/// Bone-intensity canvas with dark discs placed by seeded rejection sampling
/// until the dark fraction lies in [pore_fraction, pore_fraction + kPoreOvershoot];
/// then additive Gaussian noise, clamped to [0, 1]. Throws DataError when the
/// target cannot be reached within the attempt budget.
Phantom generate_phantom(const PhantomSpec& spec);

struct ClassRecipe {
    PhantomSpec base;
    double pore_min = 0.0;
    double pore_max = 0.0;
};

struct DatasetRecipe {
    ClassRecipe normal{PhantomSpec{.label = Label::Normal}, 0.05, 0.15};
    ClassRecipe osteoporotic{PhantomSpec{.label = Label::Osteoporotic}, 0.30, 0.50};

    /// Rejects out-of-range or overlapping class pore ranges.
    void validate() const;
};

struct PhantomRecord {
    std::string filename;
    PhantomSpec spec;
    Phantom phantom;
};

struct PhantomDataset {
    std::vector<PhantomRecord> records;

    /// filename,label,pore_fraction,ground_truth_porosity,seed
    std::string manifest_csv() const;
};

/// n - n/2 Normal phantoms followed by n/2 Osteoporotic ones. Each example
/// draws its target pore fraction from its class range and gets its own
/// derived seed, so the result depends only on (n, recipe, seed).
PhantomDataset generate_dataset(std::size_t n, const DatasetRecipe& recipe, std::uint64_t seed);

}  // namespace osteo
