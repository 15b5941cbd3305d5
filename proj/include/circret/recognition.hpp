#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "circret/circuit.hpp"
#include "circret/image.hpp"

namespace circret {

struct BBox {
  int x_min = 0, y_min = 0, x_max = 0, y_max = 0;  // inclusive pixel bounds

  bool contains(int x, int y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Detection {
  std::string label;
  BBox bbox;
  double score = 1.0;
};

// Throws ValidationError on out-of-taxonomy labels, inverted boxes, boxes
// outside `width` x `height` (when given), or scores outside [0, 1].
void validate_detections(const std::vector<Detection>& dets,
                         std::optional<std::pair<int, int>> image_size = std::nullopt);
// JSON array [{"label", "bbox": [x_min, y_min, x_max, y_max], "score"}].
std::vector<Detection> parse_detections(std::string_view json_text);
std::string serialize_detections(const std::vector<Detection>& dets);

// GRAY = 0.299 R + 0.587 G + 0.114 B, rounded half up.
std::uint8_t gray_level(Rgb px);
GrayImage to_grayscale(const RgbImage& img);

struct ThresholdDiagnostics {
  std::array<std::size_t, 256> histogram{};
  int threshold = 0;
  // Otsu: inter-class variance for every candidate t (pixels <= t form
  // class 1). Triangle: distance of every bin to the peak-tail chord.
  std::array<double, 256> curve{};
  ThresholdMethod method = ThresholdMethod::kOtsu;
};

std::array<std::size_t, 256> histogram(const GrayImage& g);

// Throws DegenerateInputError for images with a single gray level.
ThresholdDiagnostics otsu_threshold(const GrayImage& g);
ThresholdDiagnostics otsu_threshold(const std::array<std::size_t, 256>& hist);
ThresholdDiagnostics triangle_threshold(const GrayImage& g);
ThresholdDiagnostics triangle_threshold(const std::array<std::size_t, 256>& hist);

enum class PolarityMode { kAuto, kLight, kDark };

// Mean gray > 127 selects the light-background path (Otsu, ink <= t);
// otherwise the dark-background path (triangle, ink > t).
BinaryImage binarize(const GrayImage& g, PolarityMode mode = PolarityMode::kAuto);

struct Component {
  std::vector<std::pair<int, int>> pixels;  // raster order
};

// 8-connected foreground components ordered by their first pixel in raster
// order.
std::vector<Component> connected_components(const Raster<std::uint8_t>& mask);

enum class SizeReference {
  kImageArea,         // ratio x width x height
  kLargestComponent,  // ratio x largest component size
};

BinaryImage filter_stage1(const BinaryImage& b, double ratio = 0.10,
                          SizeReference ref = SizeReference::kImageArea);

struct Contact {
  std::size_t detection = 0;
  double cx = 0.0;  // centroid of the region's pixels inside the box
  double cy = 0.0;
};

struct NetRegion {
  std::size_t region_id = 0;
  std::vector<std::pair<int, int>> pixels;
  // One entry per connected patch of the region inside a box.
  std::vector<Contact> touched;
};

inline constexpr int kDefaultEraseMargin = 2;

// Erases ink strictly inside each box shrunk by `margin`, then keeps the
// 8-connected components with at least one pixel inside some box.
std::vector<NetRegion> filter_stage2(const BinaryImage& b,
                                     const std::vector<Detection>& dets,
                                     int margin = kDefaultEraseMargin);

// One device per detection (id = label + per-label ordinal), one net per
// region. Contacts are assigned to pin roles in reading order.
Circuit extract_topology(const std::vector<NetRegion>& regions,
                         const std::vector<Detection>& dets,
                         std::string circuit_id = "recognized");

struct RecognitionParams {
  double stage1_ratio = 0.10;
  SizeReference stage1_reference = SizeReference::kImageArea;
  int erase_margin = kDefaultEraseMargin;
  PolarityMode polarity = PolarityMode::kAuto;
};

Circuit recognize(const RgbImage& img, const std::vector<Detection>& dets,
                  const RecognitionParams& params = {},
                  std::string circuit_id = "recognized");

// POSTs PNG bytes to an HTTP detector ("http://host:port/path") and parses
// the detections it returns. Throws TransportError on connection failures
// and non-200 responses.
std::vector<Detection> fetch_detections(const std::string& endpoint,
                                        const std::vector<std::uint8_t>& png);

}  // namespace circret
