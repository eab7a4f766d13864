#include "psoattack/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <png.h>

namespace psoattack {

namespace {

struct RawRow {
    long label = 0;
    std::vector<double> pixels;
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    return fields;
}

std::vector<SampleRecord> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open dataset: " + path);

    std::vector<RawRow> rows;
    double max_pixel = 0.0;
    std::string line;
    std::size_t line_number = 0;
    std::size_t expected_dim = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() < 2)
            throw LoadError(path + " row " + std::to_string(line_number) +
                            ": need a label and at least one pixel");
        RawRow row;
        try {
            row.label = std::stol(fields[0]);
        } catch (const std::exception&) {
            throw LoadError(path + " row " + std::to_string(line_number) +
                            ": unreadable label '" + fields[0] + "'");
        }
        if (row.label < 0)
            throw LoadError(path + " row " + std::to_string(line_number) + ": negative label");
        row.pixels.reserve(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            double value = 0.0;
            try {
                value = std::stod(fields[i]);
            } catch (const std::exception&) {
                throw LoadError(path + " row " + std::to_string(line_number) +
                                ": unreadable pixel '" + fields[i] + "'");
            }
            if (value < 0.0 || value > 255.0)
                throw LoadError(path + " row " + std::to_string(line_number) +
                                ": pixel value " + fields[i] + " outside [0,255]");
            max_pixel = std::max(max_pixel, value);
            row.pixels.push_back(value);
        }
        if (expected_dim == 0)
            expected_dim = row.pixels.size();
        else if (row.pixels.size() != expected_dim)
            throw LoadError(path + " row " + std::to_string(line_number) + ": has " +
                            std::to_string(row.pixels.size()) + " pixels, expected " +
                            std::to_string(expected_dim));
        rows.push_back(std::move(row));
    }

    const double scale = max_pixel > 1.0 ? 1.0 / 255.0 : 1.0;
    std::vector<SampleRecord> samples;
    samples.reserve(rows.size());
    ImageShape shape = infer_shape(expected_dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto& row = rows[r];
        for (double& v : row.pixels) v *= scale;
        samples.push_back({std::to_string(r),
                           ImageVector(std::move(row.pixels), shape),
                           static_cast<std::size_t>(row.label)});
    }
    return samples;
}

struct PngImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<double> pixels; // row-major, [0,1]
};

PngImage read_png(const std::string& path) {
    FILE* file = std::fopen(path.c_str(), "rb");
    if (!file) throw LoadError("cannot open image: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(file);
        throw LoadError("libpng setup failed for " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(file);
        throw LoadError("corrupt PNG: " + path);
    }

    png_init_io(png, file);
    png_read_info(png, info);

    png_uint_32 width = png_get_image_width(png, info);
    png_uint_32 height = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    // normalize palettes and sub-byte depths to plain 8-bit gray/RGB
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    color_type = png_get_color_type(png, info);
    std::size_t channels = color_type == PNG_COLOR_TYPE_GRAY ? 1 : 3;
    if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(file);
        throw LoadError("unsupported PNG color type in " + path);
    }

    std::vector<png_byte> row(png_get_rowbytes(png, info));
    PngImage image{height, width, channels, {}};
    image.pixels.reserve(static_cast<std::size_t>(height) * width * channels);
    for (png_uint_32 y = 0; y < height; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (std::size_t x = 0; x < static_cast<std::size_t>(width) * channels; ++x)
            image.pixels.push_back(row[x] / 255.0);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(file);
    return image;
}

std::vector<SampleRecord> load_png_dir(const std::string& path) {
    namespace fs = std::filesystem;
    fs::path dir(path);
    fs::path manifest = dir / "manifest.csv";
    std::ifstream in(manifest);
    if (!in) throw LoadError("png-dir dataset needs a manifest: " + manifest.string());

    std::vector<SampleRecord> samples;
    ImageShape shape{};
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 2)
            throw LoadError(manifest.string() + " line " + std::to_string(line_number) +
                            ": expected 'filename,label'");
        long label = 0;
        try {
            label = std::stol(fields[1]);
        } catch (const std::exception&) {
            throw LoadError(manifest.string() + " line " + std::to_string(line_number) +
                            ": unreadable label '" + fields[1] + "'");
        }
        if (label < 0)
            throw LoadError(manifest.string() + " line " + std::to_string(line_number) +
                            ": negative label");
        PngImage png = read_png((dir / fields[0]).string());
        ImageShape this_shape{png.height, png.width, png.channels};
        if (samples.empty())
            shape = this_shape;
        else if (!(this_shape == shape))
            throw LoadError(fields[0] + ": image shape differs from the rest of the dataset");
        samples.push_back({fields[0], ImageVector(std::move(png.pixels), this_shape),
                           static_cast<std::size_t>(label)});
    }
    return samples;
}

} // namespace

DatasetFormat dataset_format_from_name(const std::string& name) {
    if (name == "csv-flat") return DatasetFormat::CsvFlat;
    if (name == "png-dir") return DatasetFormat::PngDir;
    throw std::invalid_argument("unknown dataset format: " + name);
}

std::vector<SampleRecord> load_dataset(const std::string& path, DatasetFormat format) {
    return format == DatasetFormat::CsvFlat ? load_csv(path) : load_png_dir(path);
}

void save_dataset_csv(const std::string& path, const std::vector<SampleRecord>& samples) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write dataset: " + path);
    out.precision(17);
    for (const auto& sample : samples) {
        out << sample.true_label;
        for (double v : sample.image.data) out << ',' << v;
        out << '\n';
    }
}

} // namespace psoattack
