#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace evoattack {

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;

  std::size_t size() const { return height * width * channels; }
  bool operator==(const Shape&) const = default;
};

/// Flat real-valued pixel vector in [0,1], stored interleaved (height, width, channel).
struct Image {
  std::vector<double> pixels;
  Shape shape;
};

struct Dataset {
  std::vector<Image> images;
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return images.size(); }
};

// Byte <-> [0,1] conversion happens only at I/O boundaries; everything
// downstream works on real-valued pixels.
double byte_to_pixel(std::uint8_t b);
std::uint8_t pixel_to_byte(double p);

// IDX (big-endian magic + dims + raw bytes). Image files carry magic
// 0x00000803, label files 0x00000801. Malformed input is reported with the
// byte offset where parsing failed.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Writes a single-channel dataset back out in the same IDX layout, pixels
// quantized to bytes with pixel_to_byte.
void save_idx(const Dataset& data, const std::string& images_path,
              const std::string& labels_path);

// CIFAR-10 binary batches: 3073-byte records (1 label byte + 3072 pixel
// bytes, channel-planar R,G,B). The planar layout is converted to the
// interleaved (32,32,3) layout used everywhere else.
Dataset load_cifar10(const std::vector<std::string>& batch_paths);

// Deterministic 8x8x1 desk-scale dataset: one distinct bar/diagonal template
// per class plus seeded uniform noise of amplitude 0.1, clamped to [0,1].
// Supports 2..10 classes.
Dataset make_synthetic(int num_classes, int per_class, std::uint64_t seed);

// Seeded shuffle, then partition into sizes floor(N*f) and N - floor(N*f).
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed);

}  // namespace evoattack
