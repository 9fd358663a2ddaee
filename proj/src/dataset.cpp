#include "qrob/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qrob/fsio.hpp"
#include "qrob/image.hpp"
#include "qrob/rng.hpp"

namespace qrob {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint8_t kLetterQ = 17;  // EMNIST-letters code for 'Q'
constexpr std::uint8_t kLetterT = 20;  // EMNIST-letters code for 'T'

void shuffle_split(std::vector<Sample>& all, std::uint64_t seed, int test_total,
                   Dataset& out) {
    if (test_total <= 0 || test_total >= static_cast<int>(all.size()))
        throw std::invalid_argument("dataset split: bad test_total");
    std::vector<int> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng rng = Rng::substream(seed, "data-split");
    rng.shuffle(order);
    const int train_total = static_cast<int>(all.size()) - test_total;
    out.train.reserve(train_total);
    out.test.reserve(test_total);
    for (int i = 0; i < train_total; ++i) out.train.push_back(std::move(all[order[i]]));
    for (int i = train_total; i < static_cast<int>(all.size()); ++i)
        out.test.push_back(std::move(all[order[i]]));
}

std::vector<double> transpose_square(const std::vector<double>& img, int size) {
    std::vector<double> out(img.size());
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            out[std::size_t(y) * size + x] = img[std::size_t(x) * size + y];
    return out;
}

Dataset emnist_pipeline(const IdxImages& images, const std::vector<std::uint8_t>& labels,
                        const EmnistProfile& profile, std::uint64_t seed,
                        int per_class, int test_total, const std::string& source) {
    if (images.count != labels.size())
        throw std::runtime_error("emnist: image/label count mismatch");
    if (images.rows != images.cols)
        throw std::runtime_error("emnist: expected square images");
    const int src = static_cast<int>(images.rows);

    // First per_class occurrences of each letter, in file order.
    std::vector<std::size_t> q_idx, t_idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == kLetterQ && static_cast<int>(q_idx.size()) < per_class)
            q_idx.push_back(i);
        else if (labels[i] == kLetterT && static_cast<int>(t_idx.size()) < per_class)
            t_idx.push_back(i);
    }
    if (static_cast<int>(q_idx.size()) < per_class ||
        static_cast<int>(t_idx.size()) < per_class)
        throw std::runtime_error("emnist: fewer than requested samples per class");

    Dataset ds;
    ds.task = "emnist";
    ds.profile = profile.name;
    ds.source = source;
    ds.seed = seed;
    ds.x_min = 0.0;
    ds.x_max = kPi;

    std::vector<Sample> all;
    all.reserve(2 * per_class);
    int next_id = 0;
    auto push = [&](std::size_t img_index, int label) {
        const std::uint8_t* raw = images.image(img_index);
        std::vector<double> unit(std::size_t(src) * src);
        for (std::size_t k = 0; k < unit.size(); ++k) unit[k] = raw[k] / 255.0;
        // EMNIST stores images transposed; undo that before any geometry.
        const std::vector<double> upright = transpose_square(unit, src);
        std::vector<double> resized =
            resize_bicubic(upright, src, src, profile.image_size, profile.image_size);
        for (double& v : resized) v = std::clamp(v, 0.0, 1.0);
        Sample s;
        s.id = next_id++;
        s.label = label;
        s.raw_pixels = resized;
        s.features = central_window(resized, profile.image_size, profile.window);
        for (double& v : s.features) v *= kPi;
        all.push_back(std::move(s));
    };
    for (std::size_t i : q_idx) push(i, 0);
    for (std::size_t i : t_idx) push(i, 1);

    shuffle_split(all, seed, test_total, ds);
    return ds;
}

// --- synthetic letter rendering -------------------------------------------

void draw_segment(std::vector<double>& img, int size, double x0, double y0,
                  double x1, double y1, double thick, double intensity) {
    const double dx = x1 - x0, dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double px = x - x0, py = y - y0;
            double t = len2 > 0 ? (px * dx + py * dy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double ex = px - t * dx, ey = py - t * dy;
            const double d = std::sqrt(ex * ex + ey * ey);
            const double cov = std::clamp(thick / 2.0 + 0.6 - d, 0.0, 1.0) * intensity;
            double& cell = img[std::size_t(y) * size + x];
            cell = std::max(cell, cov);
        }
    }
}

void draw_ring(std::vector<double>& img, int size, double cx, double cy, double r,
               double thick, double intensity) {
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double d = std::abs(std::hypot(x - cx, y - cy) - r);
            const double cov = std::clamp(thick / 2.0 + 0.6 - d, 0.0, 1.0) * intensity;
            double& cell = img[std::size_t(y) * size + x];
            cell = std::max(cell, cov);
        }
    }
}

}  // namespace

void render_synthetic_letters(std::uint64_t seed, int per_class, IdxImages& images,
                              std::vector<std::uint8_t>& labels) {
    const int size = 28;
    Rng rng = Rng::substream(seed, "synthetic-render");
    images.count = static_cast<std::uint32_t>(2 * per_class);
    images.rows = images.cols = size;
    images.pixels.assign(std::size_t(images.count) * size * size, 0);
    labels.assign(images.count, 0);

    for (int i = 0; i < 2 * per_class; ++i) {
        const int label = i % 2;  // interleave Q, T in file order
        std::vector<double> img(std::size_t(size) * size, 0.0);
        const double thick = 2.2 + rng.uniform(-0.5, 0.7);
        const double bright = 0.75 + 0.25 * rng.uniform();
        if (label == 0) {
            // 'Q': ring plus a tail through the lower-right rim.
            const double cx = 13.5 + rng.uniform(-1.4, 1.4);
            const double cy = 12.5 + rng.uniform(-1.4, 1.4);
            const double r = 6.3 + rng.uniform(-1.0, 1.2);
            draw_ring(img, size, cx, cy, r, thick, bright);
            const double tx = cx + r * 0.55, ty = cy + r * 0.55;
            draw_segment(img, size, tx, ty, tx + 4.5 + rng.uniform(-1, 1.5),
                         ty + 4.5 + rng.uniform(-1, 1.5), thick, bright);
        } else {
            // 'T': top bar plus stem.
            const double bar_y = 6.5 + rng.uniform(-1.2, 1.2);
            const double left = 6.0 + rng.uniform(-1.2, 1.2);
            const double right = 21.5 + rng.uniform(-1.2, 1.2);
            const double stem_x = (left + right) / 2 + rng.uniform(-1.0, 1.0);
            draw_segment(img, size, left, bar_y, right, bar_y, thick, bright);
            draw_segment(img, size, stem_x, bar_y, stem_x + rng.uniform(-1, 1),
                         21.5 + rng.uniform(-1.2, 1.5), thick, bright);
        }
        for (double& v : img) {
            v += 0.03 * rng.normal();
            v = std::clamp(v, 0.0, 1.0);
        }
        // Store transposed, matching the real corpus layout.
        std::uint8_t* dst = images.pixels.data() + std::size_t(i) * size * size;
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                dst[std::size_t(y) * size + x] =
                    static_cast<std::uint8_t>(std::lround(img[std::size_t(x) * size + y] * 255.0));
        labels[i] = label == 0 ? kLetterQ : kLetterT;
    }
}

Dataset make_lcei_dataset(const LceiProfile& profile, std::uint64_t seed,
                          int per_class, int test_total, bool per_qubit_alpha) {
    const int n = profile.num_qubits;
    Dataset ds;
    ds.task = "lcei";
    ds.profile = profile.name;
    ds.source = "synthetic";
    ds.seed = seed;
    ds.x_min = -kPi;
    ds.x_max = kPi;
    if (per_qubit_alpha) ds.meta["per_qubit_alpha"] = "1";

    Rng rng = Rng::substream(seed, "data-split");
    std::vector<Sample> all;
    all.reserve(2 * per_class);
    auto gen = [&](int label, int id) {
        const double lo = label == 0 ? 0.0 : 5.0 * kPi / 8.0;
        const double hi = label == 0 ? 3.0 * kPi / 8.0 : kPi;
        Sample s;
        s.id = id;
        s.label = label;
        s.features.resize(n);
        if (per_qubit_alpha) {
            for (double& a : s.features) a = rng.uniform(lo, hi);
        } else {
            const double alpha = rng.uniform(lo, hi);
            std::fill(s.features.begin(), s.features.end(), alpha);
        }
        return s;
    };
    for (int i = 0; i < per_class; ++i) all.push_back(gen(0, i));
    for (int i = 0; i < per_class; ++i) all.push_back(gen(1, per_class + i));

    shuffle_split(all, seed, test_total, ds);
    return ds;
}

Dataset load_emnist_dataset(const std::filesystem::path& images_path,
                            const std::filesystem::path& labels_path,
                            const EmnistProfile& profile, std::uint64_t seed,
                            int per_class, int test_total) {
    const IdxImages images = read_idx_images(images_path);
    const std::vector<std::uint8_t> labels = read_idx_labels(labels_path);
    return emnist_pipeline(images, labels, profile, seed, per_class, test_total, "idx");
}

Dataset make_synthetic_emnist_dataset(const EmnistProfile& profile,
                                      std::uint64_t seed, int per_class,
                                      int test_total) {
    IdxImages images;
    std::vector<std::uint8_t> labels;
    render_synthetic_letters(seed, per_class, images, labels);
    return emnist_pipeline(images, labels, profile, seed, per_class, test_total,
                           "synthetic");
}

std::string ascii_art(const std::vector<double>& pixels, int size) {
    static const char* levels = " .:-=+*#%@";
    std::string out;
    out.reserve(std::size_t(size) * (size + 1));
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double v = std::clamp(pixels[std::size_t(y) * size + x], 0.0, 1.0);
            out += levels[static_cast<int>(v * 9.999)];
        }
        out += '\n';
    }
    return out;
}

namespace {

nlohmann::ordered_json sample_to_json(const Sample& s) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["label"] = s.label;
    j["features"] = s.features;
    if (!s.raw_pixels.empty()) j["raw_pixels"] = s.raw_pixels;
    return j;
}

Sample sample_from_json(const nlohmann::json& j) {
    Sample s;
    s.id = j.at("id").get<int>();
    s.label = j.at("label").get<int>();
    s.features = j.at("features").get<std::vector<double>>();
    if (j.contains("raw_pixels"))
        s.raw_pixels = j.at("raw_pixels").get<std::vector<double>>();
    return s;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["task"] = ds.task;
    j["profile"] = ds.profile;
    j["source"] = ds.source;
    j["seed"] = ds.seed;
    j["x_min"] = ds.x_min;
    j["x_max"] = ds.x_max;
    j["meta"] = ds.meta;
    auto dump = [](const std::vector<Sample>& v) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const Sample& s : v) arr.push_back(sample_to_json(s));
        return arr;
    };
    j["train"] = dump(ds.train);
    j["test"] = dump(ds.test);
    write_file(path, j.dump(1));
}

Dataset load_dataset(const std::filesystem::path& path) {
    const nlohmann::json j = nlohmann::json::parse(read_file(path));
    Dataset ds;
    ds.task = j.at("task").get<std::string>();
    ds.profile = j.at("profile").get<std::string>();
    ds.source = j.at("source").get<std::string>();
    ds.seed = j.at("seed").get<std::uint64_t>();
    ds.x_min = j.at("x_min").get<double>();
    ds.x_max = j.at("x_max").get<double>();
    if (ds.x_max <= ds.x_min) throw std::runtime_error("dataset: empty feature range");
    ds.meta = j.at("meta").get<std::map<std::string, std::string>>();
    for (const auto& s : j.at("train")) ds.train.push_back(sample_from_json(s));
    for (const auto& s : j.at("test")) ds.test.push_back(sample_from_json(s));
    return ds;
}

}  // namespace qrob
