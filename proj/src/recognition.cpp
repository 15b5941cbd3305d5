#include "circret/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "circret/errors.hpp"
#include "circret/taxonomy.hpp"
#include "json.hpp"

namespace circret {

void validate_detections(const std::vector<Detection>& dets,
                         std::optional<std::pair<int, int>> image_size) {
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Detection& d = dets[i];
    const std::string where = "detection " + std::to_string(i) + ": ";
    if (find_category(d.label) == nullptr) {
      throw UnknownCategoryError(d.label);
    }
    if (d.bbox.x_min >= d.bbox.x_max || d.bbox.y_min >= d.bbox.y_max) {
      throw ValidationError(where + "bounding box is empty or inverted");
    }
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw ValidationError(where + "score outside [0, 1]");
    }
    if (image_size) {
      const auto [w, h] = *image_size;
      if (d.bbox.x_min < 0 || d.bbox.y_min < 0 || d.bbox.x_max >= w ||
          d.bbox.y_max >= h) {
        throw ValidationError(where + "bounding box outside the image");
      }
    }
  }
}

std::vector<Detection> parse_detections(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed detections: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("detections must be a JSON array");
  std::vector<Detection> out;
  for (const auto& j : doc) {
    if (!j.is_object() || !j.contains("label") || !j["label"].is_string() ||
        !j.contains("bbox") || !j["bbox"].is_array() || j["bbox"].size() != 4) {
      throw ParseError("detection needs a string label and a 4-element bbox");
    }
    Detection d;
    d.label = j["label"].get<std::string>();
    std::array<int, 4> v{};
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& c = j["bbox"][k];
      if (!c.is_number_integer()) throw ParseError("bbox coordinates must be integers");
      v[k] = c.get<int>();
    }
    d.bbox = BBox{v[0], v[1], v[2], v[3]};
    if (j.contains("score")) {
      if (!j["score"].is_number()) throw ParseError("detection score must be a number");
      d.score = j["score"].get<double>();
    }
    out.push_back(std::move(d));
  }
  validate_detections(out);
  for (auto& d : out) d.label = canonical_label(d.label);
  return out;
}

std::string serialize_detections(const std::vector<Detection>& dets) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& d : dets) {
    nlohmann::ordered_json j;
    j["label"] = d.label;
    j["bbox"] = {d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max};
    j["score"] = d.score;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::uint8_t gray_level(Rgb px) {
  // Exact in thousandths, so the half-up rounding has no float error.
  const unsigned v = 299u * px.r + 587u * px.g + 114u * px.b;
  return static_cast<std::uint8_t>((v + 500u) / 1000u);
}

GrayImage to_grayscale(const RgbImage& img) {
  GrayImage g(img.width(), img.height());
  auto src = img.pixels();
  auto dst = g.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = gray_level(src[i]);
  return g;
}

std::array<std::size_t, 256> histogram(const GrayImage& g) {
  std::array<std::size_t, 256> h{};
  for (auto p : g.pixels()) ++h[p];
  return h;
}

ThresholdDiagnostics otsu_threshold(const std::array<std::size_t, 256>& hist) {
  ThresholdDiagnostics d;
  d.method = ThresholdMethod::kOtsu;
  d.histogram = hist;
  double total = 0, total_sum = 0;
  int levels = 0;
  for (int i = 0; i < 256; ++i) {
    total += static_cast<double>(hist[i]);
    total_sum += static_cast<double>(hist[i]) * i;
    levels += hist[i] > 0;
  }
  if (levels < 2) {
    throw DegenerateInputError("Otsu threshold needs at least two gray levels");
  }
  double n1 = 0, s1 = 0;
  double best = -1.0;
  for (int t = 0; t < 256; ++t) {
    n1 += static_cast<double>(hist[t]);
    s1 += static_cast<double>(hist[t]) * t;
    const double n2 = total - n1;
    double sigma2 = 0.0;
    if (n1 > 0 && n2 > 0) {
      const double p1 = n1 / total;
      const double p2 = n2 / total;
      const double m1 = s1 / n1;
      const double m2 = (total_sum - s1) / n2;
      sigma2 = p1 * p2 * (m1 - m2) * (m1 - m2);
    }
    d.curve[t] = sigma2;
    if (sigma2 > best) {
      best = sigma2;
      d.threshold = t;
    }
  }
  return d;
}

ThresholdDiagnostics otsu_threshold(const GrayImage& g) {
  return otsu_threshold(histogram(g));
}

ThresholdDiagnostics triangle_threshold(const std::array<std::size_t, 256>& hist) {
  ThresholdDiagnostics d;
  d.method = ThresholdMethod::kTriangle;
  d.histogram = hist;
  int lo = -1, hi = -1, peak = 0, levels = 0;
  for (int i = 0; i < 256; ++i) {
    if (hist[i] == 0) continue;
    ++levels;
    if (lo < 0) lo = i;
    hi = i;
    if (hist[i] > hist[peak]) peak = i;
  }
  if (levels < 2) {
    throw DegenerateInputError("triangle threshold needs at least two occupied bins");
  }
  const int tail = (peak - lo) > (hi - peak) ? lo : hi;
  const double px = peak, py = static_cast<double>(hist[peak]);
  const double tx = tail, ty = static_cast<double>(hist[tail]);
  const double norm = std::hypot(ty - py, tx - px);
  const int step = tail > peak ? 1 : -1;
  double best = -1.0;
  for (int b = peak;; b += step) {
    const double dist =
        std::abs((ty - py) * (b - px) - (tx - px) * (static_cast<double>(hist[b]) - py)) /
        norm;
    d.curve[b] = dist;
    if (dist > best) {
      best = dist;
      d.threshold = b;
    }
    if (b == tail) break;
  }
  return d;
}

ThresholdDiagnostics triangle_threshold(const GrayImage& g) {
  return triangle_threshold(histogram(g));
}

BinaryImage binarize(const GrayImage& g, PolarityMode mode) {
  BinaryImage out;
  const auto hist = histogram(g);
  bool light = false;
  if (mode == PolarityMode::kAuto) {
    double sum = 0;
    for (int i = 0; i < 256; ++i) sum += static_cast<double>(hist[i]) * i;
    light = g.size() > 0 && sum / static_cast<double>(g.size()) > 127.0;
  } else {
    light = mode == PolarityMode::kLight;
  }
  out.mask = Raster<std::uint8_t>(g.width(), g.height(), 0);
  auto src = g.pixels();
  auto dst = out.mask.pixels();
  if (light) {
    const auto t = otsu_threshold(hist);
    out.polarity = Polarity::kLightBackground;
    out.method = ThresholdMethod::kOtsu;
    out.threshold = t.threshold;
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] <= t.threshold;
  } else {
    const auto t = triangle_threshold(hist);
    out.polarity = Polarity::kDarkBackground;
    out.method = ThresholdMethod::kTriangle;
    out.threshold = t.threshold;
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > t.threshold;
  }
  return out;
}

std::vector<Component> connected_components(const Raster<std::uint8_t>& mask) {
  std::vector<Component> comps;
  Raster<std::uint8_t> seen(mask.width(), mask.height(), 0);
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y) == 0 || seen.at(x, y) != 0) continue;
      Component c;
      seen.at(x, y) = 1;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        c.pixels.emplace_back(cx, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if ((dx != 0 || dy != 0) && mask.contains(nx, ny) &&
                mask.at(nx, ny) != 0 && seen.at(nx, ny) == 0) {
              seen.at(nx, ny) = 1;
              queue.emplace_back(nx, ny);
            }
          }
        }
      }
      std::sort(c.pixels.begin(), c.pixels.end(),
                [](const auto& a, const auto& b) {
                  return std::tie(a.second, a.first) < std::tie(b.second, b.first);
                });
      comps.push_back(std::move(c));
    }
  }
  return comps;
}

BinaryImage filter_stage1(const BinaryImage& b, double ratio, SizeReference ref) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError("stage-1 ratio must lie in (0, 1)");
  }
  BinaryImage out = b;
  const auto comps = connected_components(b.mask);
  double reference = static_cast<double>(b.mask.size());
  if (ref == SizeReference::kLargestComponent) {
    reference = 0;
    for (const auto& c : comps) {
      reference = std::max(reference, static_cast<double>(c.pixels.size()));
    }
  }
  const double min_size = ratio * reference;
  for (const auto& c : comps) {
    if (static_cast<double>(c.pixels.size()) < min_size) {
      for (auto [x, y] : c.pixels) out.mask.at(x, y) = 0;
    }
  }
  return out;
}

namespace {

// 8-connected patches of a pixel subset.
std::vector<std::vector<std::pair<int, int>>> patches(
    const std::vector<std::pair<int, int>>& pts) {
  std::set<std::pair<int, int>> left(pts.begin(), pts.end());
  std::vector<std::vector<std::pair<int, int>>> out;
  for (const auto& start : pts) {
    if (left.erase(start) == 0) continue;
    std::vector<std::pair<int, int>> patch{start};
    for (std::size_t i = 0; i < patch.size(); ++i) {
      auto [x, y] = patch[i];
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          auto it = left.find({x + dx, y + dy});
          if (it != left.end()) {
            patch.push_back(*it);
            left.erase(it);
          }
        }
      }
    }
    out.push_back(std::move(patch));
  }
  return out;
}

}  // namespace

std::vector<NetRegion> filter_stage2(const BinaryImage& b,
                                     const std::vector<Detection>& dets, int margin) {
  Raster<std::uint8_t> mask = b.mask;
  for (const auto& d : dets) {
    for (int y = std::max(0, d.bbox.y_min + margin + 1);
         y <= std::min(mask.height() - 1, d.bbox.y_max - margin - 1); ++y) {
      for (int x = std::max(0, d.bbox.x_min + margin + 1);
           x <= std::min(mask.width() - 1, d.bbox.x_max - margin - 1); ++x) {
        mask.at(x, y) = 0;
      }
    }
  }
  std::vector<NetRegion> regions;
  for (auto& comp : connected_components(mask)) {
    NetRegion r;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      std::vector<std::pair<int, int>> inside;
      for (const auto& p : comp.pixels) {
        if (dets[i].bbox.contains(p.first, p.second)) inside.push_back(p);
      }
      for (const auto& patch : patches(inside)) {
        double sx = 0, sy = 0;
        for (auto [x, y] : patch) {
          sx += x;
          sy += y;
        }
        const double n = static_cast<double>(patch.size());
        r.touched.push_back(Contact{i, sx / n, sy / n});
      }
    }
    if (r.touched.empty()) continue;
    r.region_id = regions.size();
    r.pixels = std::move(comp.pixels);
    regions.push_back(std::move(r));
  }
  return regions;
}

Circuit extract_topology(const std::vector<NetRegion>& regions,
                         const std::vector<Detection>& dets,
                         std::string circuit_id) {
  struct Hit {
    double x, y;
    std::string net;
  };
  std::vector<std::vector<Hit>> hits(dets.size());
  for (const auto& r : regions) {
    const std::string net = "N" + std::to_string(r.region_id + 1);
    for (const auto& c : r.touched) {
      if (c.detection >= dets.size()) {
        throw ValidationError("region references unknown detection");
      }
      hits[c.detection].push_back(Hit{c.cx, c.cy, net});
    }
  }
  std::map<std::string, int> ordinals;
  std::vector<Device> devices;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const DeviceCategory& cat = category(dets[i].label);
    Device dev;
    dev.category = std::string(cat.label);
    dev.id = dev.category + std::to_string(++ordinals[dev.category]);

    // Reading order: columns left to right (contacts within a quarter of
    // the box width share a column), top to bottom inside a column.
    auto& hs = hits[i];
    std::sort(hs.begin(), hs.end(), [](const Hit& a, const Hit& b) {
      return std::tie(a.x, a.y) < std::tie(b.x, b.y);
    });
    const double tol = 0.25 * dets[i].bbox.width();
    std::vector<Hit> ordered;
    for (std::size_t s = 0; s < hs.size();) {
      std::size_t e = s + 1;
      while (e < hs.size() && hs[e].x - hs[e - 1].x <= tol) ++e;
      std::vector<Hit> column(hs.begin() + static_cast<long>(s),
                              hs.begin() + static_cast<long>(e));
      std::stable_sort(column.begin(), column.end(),
                       [](const Hit& a, const Hit& b) { return a.y < b.y; });
      ordered.insert(ordered.end(), column.begin(), column.end());
      s = e;
    }
    if (cat.arity == Arity::kFixed && ordered.size() > cat.pin_roles.size()) {
      throw ArityOverflowError(dev.id, ordered.size(), cat.pin_roles.size());
    }
    for (std::size_t k = 0; k < ordered.size(); ++k) {
      const std::string role =
          cat.arity == Arity::kFixed ? cat.pin_roles[k] : variable_role(k);
      dev.pins.push_back(PinBinding{role, ordered[k].net});
    }
    devices.push_back(std::move(dev));
  }
  return Circuit(std::move(circuit_id), std::move(devices), {});
}

Circuit recognize(const RgbImage& img, const std::vector<Detection>& dets,
                  const RecognitionParams& params, std::string circuit_id) {
  validate_detections(dets, std::pair{img.width(), img.height()});
  const GrayImage gray = to_grayscale(img);
  BinaryImage bin;
  try {
    bin = binarize(gray, params.polarity);
  } catch (const DegenerateInputError&) {
    // A single gray level carries no strokes.
    bin.mask = Raster<std::uint8_t>(img.width(), img.height(), 0);
  }
  const BinaryImage body =
      filter_stage1(bin, params.stage1_ratio, params.stage1_reference);
  const auto regions = filter_stage2(body, dets, params.erase_margin);
  return extract_topology(regions, dets, std::move(circuit_id));
}

}  // namespace circret
