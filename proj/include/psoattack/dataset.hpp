#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "psoattack/image.hpp"

namespace psoattack {

struct SampleRecord {
    std::string id;
    ImageVector image;
    std::size_t true_label = 0;
};

enum class DatasetFormat { CsvFlat, PngDir };

DatasetFormat dataset_format_from_name(const std::string& name);

struct LoadError : std::runtime_error {
    explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

// csv-flat: one sample per line, label then pixels. Pixel scale ([0,1] or
// [0,255]) is auto-detected from the file-wide maximum.
// png-dir: a directory with manifest.csv lines "filename,label"; 8-bit
// grayscale or RGB images, all the same shape.
std::vector<SampleRecord> load_dataset(const std::string& path, DatasetFormat format);

// pixels written in [0,1]; load(save(x)) == x within 1e-12
void save_dataset_csv(const std::string& path, const std::vector<SampleRecord>& samples);

} // namespace psoattack
