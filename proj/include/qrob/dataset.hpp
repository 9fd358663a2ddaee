#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qrob/idx.hpp"
#include "qrob/model.hpp"

namespace qrob {

struct Sample {
    int id = 0;      // stable across splits and reruns with the same seed
    int label = 0;   // 0 = 'Q' / non-excited, 1 = 'T' / excited
    std::vector<double> features;    // model input (EMNIST: window pixels in
                                     // [0, pi]; LCEI: per-qubit alpha)
    std::vector<double> raw_pixels;  // EMNIST only: full resized image in [0, 1]
};

struct Dataset {
    std::string task;     // "emnist" or "lcei"
    std::string profile;  // "desk-12q" / "full-20q"
    std::string source;   // "idx", "synthetic" or "adversarial"
    std::uint64_t seed = 0;
    double x_min = 0.0;   // feature range used for perturbation-strength
    double x_max = 0.0;   // normalization (eps_hat = eps / (x_max - x_min))
    std::vector<Sample> train;
    std::vector<Sample> test;
    std::map<std::string, std::string> meta;

    double width() const { return x_max - x_min; }
};

// Cluster-state excitation dataset: per class `per_class` samples; one alpha
// drawn uniformly from [0, 3pi/8] (non-excited) or [5pi/8, pi] (excited) and
// replicated across the register. per_qubit_alpha draws each qubit's angle
// independently instead (exploratory variant, off by default). The feature
// range is the full Rx domain [-pi, pi].
Dataset make_lcei_dataset(const LceiProfile& profile, std::uint64_t seed,
                          int per_class = 150, int test_total = 100,
                          bool per_qubit_alpha = false);

// Letter pair Q (label 0) vs T (label 1) from EMNIST-letters IDX files,
// where Q and T carry the official letter codes 17 and 20. Takes the first
// `per_class` occurrences of each class in file order, undoes the EMNIST
// transpose, resizes 28x28 to the profile's image size (bicubic, clamped to
// [0, 1]), keeps the central window scaled to [0, pi] as features and the
// whole resized image as raw_pixels, then splits off `test_total` samples
// with the data-split substream.
Dataset load_emnist_dataset(const std::filesystem::path& images_path,
                            const std::filesystem::path& labels_path,
                            const EmnistProfile& profile, std::uint64_t seed,
                            int per_class = 300, int test_total = 100);

// Hermetic stand-in for the EMNIST download: renders Q-like and T-like
// glyphs with jittered geometry and pixel noise into the same 28x28
// transposed IDX layout, then runs the exact loader pipeline above.
Dataset make_synthetic_emnist_dataset(const EmnistProfile& profile,
                                      std::uint64_t seed, int per_class = 300,
                                      int test_total = 100);

// The raw 28x28 synthetic corpus, in EMNIST's transposed orientation, for
// writing IDX files.
void render_synthetic_letters(std::uint64_t seed, int per_class, IdxImages& images,
                              std::vector<std::uint8_t>& labels);

// Coarse ASCII art of a sample's raw pixels, one row per line. Rendering
// sanity check for orientation and class identity.
std::string ascii_art(const std::vector<double>& pixels, int size);

void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace qrob
