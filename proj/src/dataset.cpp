#include "evoattack/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <stdexcept>

namespace evoattack {

namespace {

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
constexpr std::size_t kCifarRecordSize = 3073;  // 1 label byte + 32*32*3 pixels

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

std::uint32_t read_u32_be(const std::vector<std::uint8_t>& buf, std::size_t off,
                          const std::string& path) {
  if (off + 4 > buf.size()) {
    throw std::runtime_error(path + ": truncated header at byte offset " +
                             std::to_string(buf.size()) + ", need " +
                             std::to_string(off + 4) + " bytes");
  }
  return (std::uint32_t(buf[off]) << 24) | (std::uint32_t(buf[off + 1]) << 16) |
         (std::uint32_t(buf[off + 2]) << 8) | std::uint32_t(buf[off + 3]);
}

void write_u32_be(std::ofstream& out, std::uint32_t v) {
  const char bytes[4] = {char((v >> 24) & 0xff), char((v >> 16) & 0xff),
                         char((v >> 8) & 0xff), char(v & 0xff)};
  out.write(bytes, 4);
}

}  // namespace

double byte_to_pixel(std::uint8_t b) { return b / 255.0; }

std::uint8_t pixel_to_byte(double p) {
  const long v = std::lround(p * 255.0);
  return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  const auto ibuf = read_file(images_path);
  const auto lbuf = read_file(labels_path);

  const std::uint32_t imagic = read_u32_be(ibuf, 0, images_path);
  if (imagic != kIdxImageMagic) {
    throw std::runtime_error(images_path + ": bad magic at byte offset 0 (expected 0x00000803)");
  }
  const std::uint32_t lmagic = read_u32_be(lbuf, 0, labels_path);
  if (lmagic != kIdxLabelMagic) {
    throw std::runtime_error(labels_path + ": bad magic at byte offset 0 (expected 0x00000801)");
  }

  const std::uint32_t icount = read_u32_be(ibuf, 4, images_path);
  const std::uint32_t rows = read_u32_be(ibuf, 8, images_path);
  const std::uint32_t cols = read_u32_be(ibuf, 12, images_path);
  const std::uint32_t lcount = read_u32_be(lbuf, 4, labels_path);

  if (icount != lcount) {
    throw std::runtime_error(images_path + ": image count " + std::to_string(icount) +
                             " (byte offset 4) does not match label count " +
                             std::to_string(lcount) + " in " + labels_path);
  }

  const std::size_t n = std::size_t(rows) * cols;
  const std::size_t need_pixels = 16 + std::size_t(icount) * n;
  if (ibuf.size() < need_pixels) {
    throw std::runtime_error(images_path + ": truncated payload, file ends at byte offset " +
                             std::to_string(ibuf.size()) + " but " +
                             std::to_string(need_pixels) + " bytes are required");
  }
  const std::size_t need_labels = 8 + std::size_t(lcount);
  if (lbuf.size() < need_labels) {
    throw std::runtime_error(labels_path + ": truncated payload, file ends at byte offset " +
                             std::to_string(lbuf.size()) + " but " +
                             std::to_string(need_labels) + " bytes are required");
  }

  Dataset data;
  data.images.reserve(icount);
  data.labels.reserve(icount);
  const Shape shape{rows, cols, 1};
  for (std::uint32_t i = 0; i < icount; ++i) {
    Image img;
    img.shape = shape;
    img.pixels.resize(n);
    const std::size_t base = 16 + std::size_t(i) * n;
    for (std::size_t j = 0; j < n; ++j) img.pixels[j] = byte_to_pixel(ibuf[base + j]);
    data.images.push_back(std::move(img));
    data.labels.push_back(int(lbuf[8 + i]));
  }
  const int max_label =
      data.labels.empty() ? -1 : *std::max_element(data.labels.begin(), data.labels.end());
  data.num_classes = max_label + 1;
  return data;
}

void save_idx(const Dataset& data, const std::string& images_path,
              const std::string& labels_path) {
  Shape shape{0, 0, 1};
  if (!data.images.empty()) shape = data.images.front().shape;
  if (shape.channels != 1) {
    throw std::invalid_argument("save_idx: only single-channel images fit the IDX3 layout");
  }
  for (const auto& img : data.images) {
    if (!(img.shape == shape)) throw std::invalid_argument("save_idx: mixed image shapes");
  }
  if (data.images.size() != data.labels.size()) {
    throw std::invalid_argument("save_idx: image/label count mismatch");
  }

  std::ofstream iout(images_path, std::ios::binary);
  if (!iout) throw std::runtime_error(images_path + ": cannot open for writing");
  write_u32_be(iout, kIdxImageMagic);
  write_u32_be(iout, std::uint32_t(data.images.size()));
  write_u32_be(iout, std::uint32_t(shape.height));
  write_u32_be(iout, std::uint32_t(shape.width));
  for (const auto& img : data.images) {
    for (double p : img.pixels) {
      const char b = char(pixel_to_byte(p));
      iout.write(&b, 1);
    }
  }
  if (!iout) throw std::runtime_error(images_path + ": write failed");

  std::ofstream lout(labels_path, std::ios::binary);
  if (!lout) throw std::runtime_error(labels_path + ": cannot open for writing");
  write_u32_be(lout, kIdxLabelMagic);
  write_u32_be(lout, std::uint32_t(data.labels.size()));
  for (int label : data.labels) {
    const char b = char(std::uint8_t(label));
    lout.write(&b, 1);
  }
  if (!lout) throw std::runtime_error(labels_path + ": write failed");
}

Dataset load_cifar10(const std::vector<std::string>& batch_paths) {
  Dataset data;
  data.num_classes = 10;
  const Shape shape{32, 32, 3};
  for (const auto& path : batch_paths) {
    const auto buf = read_file(path);
    if (buf.size() % kCifarRecordSize != 0) {
      const std::size_t whole = buf.size() / kCifarRecordSize;
      throw std::runtime_error(path + ": truncated record, file length " +
                               std::to_string(buf.size()) + " is not a multiple of 3073 (record " +
                               std::to_string(whole) + " starts at byte offset " +
                               std::to_string(whole * kCifarRecordSize) + ")");
    }
    const std::size_t records = buf.size() / kCifarRecordSize;
    data.images.reserve(data.images.size() + records);
    for (std::size_t r = 0; r < records; ++r) {
      const std::size_t base = r * kCifarRecordSize;
      const std::uint8_t label = buf[base];
      if (label >= 10) {
        throw std::runtime_error(path + ": label byte " + std::to_string(int(label)) +
                                 " out of range at byte offset " + std::to_string(base));
      }
      Image img;
      img.shape = shape;
      img.pixels.resize(shape.size());
      // channel-planar R,G,B -> interleaved (h, w, c)
      for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < 32; ++i) {
          for (std::size_t j = 0; j < 32; ++j) {
            img.pixels[(i * 32 + j) * 3 + c] = byte_to_pixel(buf[base + 1 + c * 1024 + i * 32 + j]);
          }
        }
      }
      data.images.push_back(std::move(img));
      data.labels.push_back(int(label));
    }
  }
  return data;
}

namespace {

// One distinct 8x8 template per class: four two-row horizontal bars, four
// two-column vertical bars, then the two thick diagonals.
double synthetic_template(int cls, std::size_t i, std::size_t j) {
  constexpr double kBar = 0.9;
  if (cls < 4) return (i == std::size_t(2 * cls) || i == std::size_t(2 * cls + 1)) ? kBar : 0.0;
  if (cls < 8) {
    const std::size_t col = std::size_t(2 * (cls - 4));
    return (j == col || j == col + 1) ? kBar : 0.0;
  }
  if (cls == 8) return (i == j || i + 1 == j || j + 1 == i) ? kBar : 0.0;
  return (i + j == 6 || i + j == 7 || i + j == 8) ? kBar : 0.0;
}

}  // namespace

Dataset make_synthetic(int num_classes, int per_class, std::uint64_t seed) {
  if (num_classes < 2) throw std::invalid_argument("make_synthetic: need at least 2 classes");
  if (num_classes > 10) {
    throw std::invalid_argument("make_synthetic: distinct 8x8 templates exist for at most 10 classes");
  }
  if (per_class < 0) throw std::invalid_argument("make_synthetic: negative per-class count");

  const Shape shape{8, 8, 1};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-0.1, 0.1);

  Dataset data;
  data.num_classes = num_classes;
  data.images.reserve(std::size_t(num_classes) * per_class);
  for (int rep = 0; rep < per_class; ++rep) {
    for (int cls = 0; cls < num_classes; ++cls) {
      Image img;
      img.shape = shape;
      img.pixels.resize(shape.size());
      for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
          img.pixels[i * 8 + j] =
              std::clamp(synthetic_template(cls, i, j) + noise(rng), 0.0, 1.0);
        }
      }
      data.images.push_back(std::move(img));
      data.labels.push_back(cls);
    }
  }
  return data;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split: train_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t train_n = std::size_t(std::floor(double(data.size()) * train_fraction));
  Dataset train, test;
  train.num_classes = test.num_classes = data.num_classes;
  train.images.reserve(train_n);
  test.images.reserve(data.size() - train_n);
  for (std::size_t k = 0; k < order.size(); ++k) {
    Dataset& dst = (k < train_n) ? train : test;
    dst.images.push_back(data.images[order[k]]);
    dst.labels.push_back(data.labels[order[k]]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace evoattack
