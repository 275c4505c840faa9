#pragma once
// Feature vectors, the SNOWFEAT feature store, raster images and the
// built-in baseline extractor.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "snow/binary_io.hpp"

namespace snow {

// Fixed-dimension vector of finite values. Stored as f32 to match the store format.
class FeatureVector {
public:
    FeatureVector() = default;
    explicit FeatureVector(std::vector<float> values);

    std::size_t dim() const { return values_.size(); }
    std::span<const float> values() const { return values_; }
    float operator[](std::size_t i) const { return values_[i]; }

    bool operator==(const FeatureVector&) const = default;

private:
    std::vector<float> values_;
};

struct FeatureRecord {
    std::uint32_t id = 0;
    std::uint8_t class_code = 0;
    FeatureVector vector;

    bool operator==(const FeatureRecord&) const = default;
};

struct FeatureStore {
    std::string source_tag;
    std::uint32_t dim = 0;
    std::vector<FeatureRecord> records;

    bool operator==(const FeatureStore&) const = default;
};

inline constexpr std::uint8_t kStoreVersion = 1;

// Throws DataError on dim mismatch (naming the record id), duplicate ids or bad class codes.
void validate(const FeatureStore& store);

io::Bytes write_store(const FeatureStore& store);
FeatureStore read_store(std::span<const std::uint8_t> bytes);

void save_store(const std::string& path, const FeatureStore& store);
FeatureStore load_store(const std::string& path);

// 8-bit RGB, row-major, interleaved.
class RasterImage {
public:
    RasterImage(int width, int height, std::vector<std::uint8_t> rgb);
    RasterImage(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    int width() const { return width_; }
    int height() const { return height_; }
    std::span<const std::uint8_t> rgb() const { return rgb_; }
    const std::uint8_t* pixel(int x, int y) const { return &rgb_[3 * (static_cast<std::size_t>(y) * width_ + x)]; }
    std::uint8_t* pixel(int x, int y) { return &rgb_[3 * (static_cast<std::size_t>(y) * width_ + x)]; }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> rgb_;
};

struct NormalizedImage {
    int width = 0;
    int height = 0;
    std::vector<double> rgb; // interleaved, each value in [0, 1]
};

NormalizedImage normalize_intensity(const RasterImage& img);

inline constexpr int kBaselineGrid = 8;
inline constexpr int kBaselineBins = 16;
inline constexpr std::size_t kBaselineDim = kBaselineGrid * kBaselineGrid + 3 * kBaselineBins; // 112
inline constexpr const char* kBaselineTag = "baseline112";

// 8x8 mean-luminance grid followed by three 16-bin per-channel histograms.
FeatureVector baseline_extract(const RasterImage& img);

// Binary or ASCII PPM/PGM always; PNG/JPEG and friends when built with OpenCV.
RasterImage load_image(const std::string& path);
void save_ppm(const std::string& path, const RasterImage& img);

} // namespace snow
