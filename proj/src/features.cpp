#include "snow/features.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "snow/domain.hpp"
#include "snow/error.hpp"

#ifdef SNOW_WITH_OPENCV
#include <opencv2/imgcodecs.hpp>
#endif

namespace snow {

namespace {
constexpr std::string_view kStoreMagic = "SNOWFEAT";
}

FeatureVector::FeatureVector(std::vector<float> values) : values_(std::move(values)) {
    if (values_.empty()) throw DataError("feature vector must have positive dimension");
    for (float v : values_)
        if (!std::isfinite(v)) throw DataError("feature vector contains a non-finite value");
}

void validate(const FeatureStore& store) {
    if (store.dim == 0) throw DataError("feature store: dim must be positive");
    std::set<std::uint32_t> ids;
    for (const auto& r : store.records) {
        if (r.vector.dim() != store.dim)
            throw DataError("feature store: record " + std::to_string(r.id) + " has length " +
                            std::to_string(r.vector.dim()) + ", store dim is " + std::to_string(store.dim));
        if (!is_valid_class_code(r.class_code))
            throw DataError("feature store: record " + std::to_string(r.id) + " has unknown class code " +
                            std::to_string(r.class_code));
        if (!ids.insert(r.id).second)
            throw DataError("feature store: duplicate record id " + std::to_string(r.id));
    }
}

io::Bytes write_store(const FeatureStore& store) {
    validate(store);
    io::ByteWriter w;
    w.raw(kStoreMagic);
    w.u8(kStoreVersion);
    w.str16(store.source_tag);
    w.u32(store.dim);
    w.u32(static_cast<std::uint32_t>(store.records.size()));
    for (const auto& r : store.records) {
        w.u32(r.id);
        w.u8(r.class_code);
        for (float v : r.vector.values()) w.f32(v);
    }
    return std::move(w).take();
}

FeatureStore read_store(std::span<const std::uint8_t> bytes) {
    io::ByteReader r(bytes, "feature store");
    r.expect_magic(kStoreMagic);
    auto version = r.u8();
    if (version != kStoreVersion)
        throw DataError("feature store: unsupported version " + std::to_string(version));
    FeatureStore store;
    store.source_tag = r.str16();
    store.dim = r.u32();
    if (store.dim == 0) throw DataError("feature store: dim must be positive");
    auto n = r.u32();
    // Reject absurd counts before reserving.
    const std::size_t record_bytes = 5 + 4 * static_cast<std::size_t>(store.dim);
    if (r.remaining() / record_bytes < n) throw DataError("feature store: truncated payload");
    store.records.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        FeatureRecord rec;
        rec.id = r.u32();
        rec.class_code = r.u8();
        std::vector<float> vals(store.dim);
        for (auto& v : vals) v = r.f32();
        try {
            rec.vector = FeatureVector(std::move(vals));
        } catch (const DataError& e) {
            throw DataError("feature store: record " + std::to_string(rec.id) + ": " + e.what());
        }
        store.records.push_back(std::move(rec));
    }
    r.expect_end();
    validate(store);
    return store;
}

void save_store(const std::string& path, const FeatureStore& store) { io::write_file(path, write_store(store)); }

FeatureStore load_store(const std::string& path) {
    auto bytes = io::read_file(path);
    return read_store(bytes);
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), rgb_(std::move(rgb)) {
    if (width <= 0 || height <= 0) throw DataError("image dimensions must be positive");
    if (rgb_.size() != 3 * static_cast<std::size_t>(width) * height)
        throw DataError("image pixel count does not match width*height");
}

RasterImage::RasterImage(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw DataError("image dimensions must be positive");
    rgb_.resize(3 * static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < rgb_.size(); i += 3) {
        rgb_[i] = r;
        rgb_[i + 1] = g;
        rgb_[i + 2] = b;
    }
}

NormalizedImage normalize_intensity(const RasterImage& img) {
    NormalizedImage out{img.width(), img.height(), {}};
    out.rgb.reserve(img.rgb().size());
    for (auto v : img.rgb()) out.rgb.push_back(v / 255.0);
    return out;
}

FeatureVector baseline_extract(const RasterImage& img) {
    if (img.width() < kBaselineGrid || img.height() < kBaselineGrid)
        throw DataError("baseline extractor needs an image of at least 8x8 pixels");

    const auto norm = normalize_intensity(img);
    const int w = img.width();
    const int h = img.height();

    std::vector<double> grid(kBaselineGrid * kBaselineGrid, 0.0);
    std::vector<std::size_t> cell_count(grid.size(), 0);
    std::vector<double> hist(3 * kBaselineBins, 0.0);

    for (int y = 0; y < h; ++y) {
        const int cy = y * kBaselineGrid / h;
        for (int x = 0; x < w; ++x) {
            const int cx = x * kBaselineGrid / w;
            const std::size_t p = 3 * (static_cast<std::size_t>(y) * w + x);
            const double lum = (norm.rgb[p] + norm.rgb[p + 1] + norm.rgb[p + 2]) / 3.0;
            grid[cy * kBaselineGrid + cx] += lum;
            ++cell_count[cy * kBaselineGrid + cx];
            const auto* px = img.pixel(x, y);
            for (int c = 0; c < 3; ++c) hist[c * kBaselineBins + (px[c] * kBaselineBins) / 256] += 1.0;
        }
    }

    std::vector<float> out;
    out.reserve(kBaselineDim);
    for (std::size_t i = 0; i < grid.size(); ++i) out.push_back(static_cast<float>(grid[i] / cell_count[i]));
    const double n = static_cast<double>(w) * h;
    for (double v : hist) out.push_back(static_cast<float>(v / n));
    return FeatureVector(std::move(out));
}

namespace {

// Netpbm token reader: skips whitespace and '#' comments.
class PnmTokens {
public:
    explicit PnmTokens(const io::Bytes& b) : b_(b) {}

    int next_int() {
        skip();
        int v = 0;
        bool any = false;
        while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
            v = v * 10 + (b_[pos_++] - '0');
            any = true;
            if (v > (1 << 24)) throw DataError("image: header value too large");
        }
        if (!any) throw DataError("image: malformed netpbm header");
        return v;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }

private:
    void skip() {
        while (pos_ < b_.size()) {
            if (b_[pos_] == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
            } else if (std::isspace(b_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const io::Bytes& b_;
    std::size_t pos_ = 0;
};

RasterImage load_pnm(const io::Bytes& b, const std::string& path) {
    const char kind = static_cast<char>(b[1]);
    const bool binary = kind == '5' || kind == '6';
    const int channels = (kind == '3' || kind == '6') ? 3 : 1;
    PnmTokens tok(b);
    tok.advance(2);
    const int w = tok.next_int();
    const int h = tok.next_int();
    const int maxval = tok.next_int();
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw DataError("image '" + path + "': unsupported netpbm geometry or depth");

    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<std::uint8_t> rgb(3 * n);
    auto scale = [maxval](int v) { return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval); };
    if (binary) {
        tok.advance(1); // single whitespace after maxval
        if (b.size() < tok.pos() + n * channels) throw DataError("image '" + path + "': truncated pixel data");
        const auto* src = b.data() + tok.pos();
        for (std::size_t i = 0; i < n; ++i)
            for (int c = 0; c < 3; ++c) rgb[3 * i + c] = scale(src[i * channels + (channels == 3 ? c : 0)]);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (channels == 3) {
                for (int c = 0; c < 3; ++c) rgb[3 * i + c] = scale(tok.next_int());
            } else {
                auto v = scale(tok.next_int());
                rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = v;
            }
        }
    }
    return RasterImage(w, h, std::move(rgb));
}

} // namespace

RasterImage load_image(const std::string& path) {
    auto bytes = io::read_file(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' || bytes[1] == '6'))
        return load_pnm(bytes, path);
#ifdef SNOW_WITH_OPENCV
    cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);
    if (m.empty()) throw DataError("image '" + path + "': cannot decode");
    std::vector<std::uint8_t> rgb(3 * static_cast<std::size_t>(m.cols) * m.rows);
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) {
            const auto& bgr = m.at<cv::Vec3b>(y, x);
            auto* dst = &rgb[3 * (static_cast<std::size_t>(y) * m.cols + x)];
            dst[0] = bgr[2];
            dst[1] = bgr[1];
            dst[2] = bgr[0];
        }
    return RasterImage(m.cols, m.rows, std::move(rgb));
#else
    throw DataError("image '" + path + "': unsupported format (only PPM/PGM without OpenCV)");
#endif
}

void save_ppm(const std::string& path, const RasterImage& img) {
    io::ByteWriter w;
    w.raw("P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n");
    w.raw(img.rgb());
    io::write_file(path, w.bytes());
}

} // namespace snow
