#include <doctest.h>

#include <cmath>

#include "circret/errors.hpp"
#include "circret/image.hpp"
#include "circret/recognition.hpp"
#include "circret/synth.hpp"
#include "support/draw.hpp"
#include "support/oracles.hpp"

using namespace circret;

namespace {

GrayImage from_histogram(const std::array<std::size_t, 256>& h) {
  std::size_t n = 0;
  for (auto c : h) n += c;
  GrayImage g(static_cast<int>(n), 1);
  int x = 0;
  for (int level = 0; level < 256; ++level) {
    for (std::size_t i = 0; i < h[level]; ++i) g.at(x++, 0) = static_cast<std::uint8_t>(level);
  }
  return g;
}

Circuit rc_expected() {
  const Circuit c = load_netlist((oracle::data_dir() / "rc_lp.json").string());
  auto devs = c.devices();
  devs[0].id = "DCPower1";
  devs[1].id = "Res11";
  devs[2].id = "Cap11";
  devs[3].id = "AGND1";
  return Circuit("rc", devs, {});
}

}  // namespace

TEST_CASE("grayscale formula") {
  CHECK(gray_level({255, 255, 255}) == 255);
  CHECK(gray_level({0, 0, 0}) == 0);
  CHECK(gray_level({255, 0, 0}) == 76);
  CHECK(gray_level({10, 10, 10}) == 10);
  // 0.587 * 1 + 0.114 * ... half-up cases: 0.5 exactly rounds up
  CHECK(gray_level({0, 0, 0}) == 0);
  // exhaustive over a 16-level-per-channel grid against exact decimal
  // evaluation: round-half-up of (299R + 587G + 114B) / 1000
  for (int r = 0; r < 256; r += 17) {
    for (int g = 0; g < 256; g += 17) {
      for (int b = 0; b < 256; b += 17) {
        const long num = 299L * r + 587L * g + 114L * b;
        const long want = num / 1000 + ((num % 1000) >= 500 ? 1 : 0);
        CHECK(gray_level({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                          static_cast<std::uint8_t>(b)}) == want);
      }
    }
  }
  RgbImage img(2, 1, {255, 0, 0});
  img.at(1, 0) = {0, 255, 0};
  const GrayImage gi = to_grayscale(img);
  CHECK(gi.at(0, 0) == 76);
  CHECK(gi.at(1, 0) == 150);
}

TEST_CASE("otsu on constructed histograms") {
  std::array<std::size_t, 256> h{};
  h[10] = 500;
  h[200] = 500;
  const auto d = otsu_threshold(h);
  CHECK(d.threshold == 10);
  CHECK(d.method == ThresholdMethod::kOtsu);
  CHECK(d.curve[10] == doctest::Approx(d.curve[199]));
  CHECK(d.curve[10] == doctest::Approx(0.25 * 190.0 * 190.0));

  std::array<std::size_t, 256> three{};
  three[50] = 1000;
  three[100] = 1000;
  three[200] = 1000;
  CHECK(otsu_threshold(from_histogram(three)).threshold == oracle::otsu_scan(three));

  std::array<std::size_t, 256> constant{};
  constant[90] = 10;
  CHECK_THROWS_AS(otsu_threshold(constant), DegenerateInputError);
}

TEST_CASE("otsu matches the exhaustive scan on random histograms") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    oracle::Rng rng(seed);
    std::array<std::size_t, 256> h{};
    const int modes = rng.uniform(2, 4);
    for (int m = 0; m < modes; ++m) {
      const int c = rng.uniform(0, 255), w = rng.uniform(1, 30);
      const int n = rng.uniform(50, 2000);
      for (int i = 0; i < n; ++i) {
        const int v = std::clamp(c + rng.uniform(-w, w), 0, 255);
        ++h[v];
      }
    }
    const auto d = otsu_threshold(h);
    CHECK(d.threshold == oracle::otsu_scan(h));
    for (int t = 0; t < 256; ++t) CHECK(d.curve[t] <= d.curve[d.threshold] * (1 + 1e-12));
  }
}

TEST_CASE("triangle threshold") {
  std::array<std::size_t, 256> lin{};
  for (int i = 20; i <= 220; ++i) lin[i] = static_cast<std::size_t>(1000 - 5 * (i - 20));
  CHECK(triangle_threshold(lin).threshold == oracle::triangle_scan(lin));

  std::array<std::size_t, 256> convex{};
  for (int i = 20; i <= 220; ++i) {
    convex[i] = static_cast<std::size_t>(std::lround(1000.0 * std::pow((220.0 - i) / 200.0, 2)));
  }
  convex[5] = 3;
  const auto d = triangle_threshold(convex);
  CHECK(d.method == ThresholdMethod::kTriangle);
  CHECK(d.threshold == oracle::triangle_scan(convex));
  CHECK(d.threshold > 20);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    oracle::Rng rng(seed + 40);
    std::array<std::size_t, 256> h{};
    const int peak = rng.uniform(0, 255);
    for (int i = 0; i < 256; ++i) {
      const double dist = std::abs(i - peak);
      h[i] = static_cast<std::size_t>(std::lround(5000.0 * std::exp(-dist / rng.uniform(3, 40))));
    }
    CHECK(triangle_threshold(h).threshold == oracle::triangle_scan(h));
  }

  std::array<std::size_t, 256> one{};
  one[77] = 100;
  CHECK_THROWS_AS(triangle_threshold(one), DegenerateInputError);

  std::array<std::size_t, 256> two{};
  two[77] = 100;
  two[78] = 40;
  const int t = triangle_threshold(two).threshold;
  CHECK((t == 77 || t == 78));
}

TEST_CASE("binarize picks the method by background") {
  RgbImage page(60, 40, {245, 245, 245});
  draw::rect(page, 10, 18, 50, 21);
  draw::rect(page, 10, 5, 13, 35);
  const BinaryImage light = binarize(to_grayscale(page));
  CHECK(light.polarity == Polarity::kLightBackground);
  CHECK(light.method == ThresholdMethod::kOtsu);
  CHECK(light.mask.at(11, 19) == 1);
  CHECK(light.mask.at(30, 30) == 0);
  CHECK(light.ink_count() == 41 * 4 + 31 * 4 - 4 * 4);

  const BinaryImage dark = binarize(to_grayscale(draw::invert(page)));
  CHECK(dark.polarity == Polarity::kDarkBackground);
  CHECK(dark.method == ThresholdMethod::kTriangle);
  CHECK(dark.mask == light.mask);

  // mean exactly 127 takes the dark branch
  GrayImage g(2, 1);
  g.at(0, 0) = 0;
  g.at(1, 0) = 254;
  CHECK(binarize(g).polarity == Polarity::kDarkBackground);
  g.at(1, 0) = 255;  // mean 127.5
  CHECK(binarize(g).polarity == Polarity::kLightBackground);
  CHECK(binarize(g, PolarityMode::kDark).polarity == Polarity::kDarkBackground);
}

TEST_CASE("connected components use 8-connectivity") {
  Raster<std::uint8_t> m(5, 5);
  m.at(0, 0) = 1;
  m.at(1, 1) = 1;
  m.at(3, 3) = 1;
  m.at(4, 0) = 1;
  const auto comps = connected_components(m);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0].pixels.size() == 2);
  CHECK(comps[1].pixels == std::vector<std::pair<int, int>>{{4, 0}});
}

TEST_CASE("stage-1 filter") {
  Raster<std::uint8_t> m(100, 100);
  draw::rect(m, 0, 0, 39, 49);   // 2000 px
  draw::rect(m, 80, 80, 89, 84);  // 50 px
  const BinaryImage out = filter_stage1(draw::binary(m), 0.10);
  CHECK(out.ink_count() == 2000);
  CHECK(out.mask.at(85, 82) == 0);

  Raster<std::uint8_t> exact(100, 100);
  draw::rect(exact, 0, 0, 9, 99);  // exactly 1000 px
  CHECK(filter_stage1(draw::binary(exact), 0.10).ink_count() == 1000);

  CHECK(filter_stage1(draw::binary(Raster<std::uint8_t>(10, 10)), 0.1).ink_count() == 0);
  CHECK_THROWS_AS(filter_stage1(draw::binary(m), 0.0), ValidationError);
  CHECK_THROWS_AS(filter_stage1(draw::binary(m), 1.0), ValidationError);

  // largest-component reference keeps the speck at a small ratio
  CHECK(filter_stage1(draw::binary(m), 0.02, SizeReference::kLargestComponent).ink_count() ==
        2050);
}

TEST_CASE("stage-1 filter on random masks") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    oracle::Rng rng(seed);
    Raster<std::uint8_t> m(40, 30);
    for (auto& p : m.pixels()) p = rng.real() < 0.45 ? 1 : 0;
    const double ratio = 0.002 + rng.real() * 0.05;
    const BinaryImage out = filter_stage1(draw::binary(m), ratio);
    const double limit = ratio * 40 * 30;
    for (const auto& c : connected_components(m)) {
      const bool keep = static_cast<double>(c.pixels.size()) >= limit;
      for (const auto& [x, y] : c.pixels) CHECK(out.mask.at(x, y) == (keep ? 1 : 0));
    }
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 40; ++x) {
        if (m.at(x, y) == 0) CHECK(out.mask.at(x, y) == 0);
      }
    }
  }
}

TEST_CASE("stage-2 filter") {
  // two boxes joined by one wire
  Raster<std::uint8_t> m(80, 30);
  draw::rect(m, 5, 5, 25, 25);
  draw::rect(m, 55, 5, 75, 25);
  draw::rect(m, 20, 14, 60, 16);
  draw::rect(m, 0, 0, 1, 1);  // blob touching no box
  const std::vector<Detection> two{{"Res1", {4, 4, 26, 26}, 1}, {"Res1", {54, 4, 76, 26}, 1}};
  auto regions = filter_stage2(draw::binary(m), two);
  REQUIRE(regions.size() == 1);
  REQUIRE(regions[0].touched.size() == 2);
  CHECK(regions[0].touched[0].detection == 0);
  CHECK(regions[0].touched[1].detection == 1);
  for (const auto& [x, y] : regions[0].pixels) {
    CHECK(m.at(x, y) == 1);
    CHECK_FALSE((x > 6 && x < 24 && y > 6 && y < 24));  // erased interior
  }

  // H-shaped wiring over three boxes: two nets
  Raster<std::uint8_t> h(100, 60);
  const std::vector<Detection> three{{"Res1", {5, 20, 25, 40}, 1},
                                     {"Res1", {40, 20, 60, 40}, 1},
                                     {"Res1", {75, 20, 95, 40}, 1}};
  draw::rect(h, 15, 5, 85, 7);   // top bar: box 0 and box 2
  draw::rect(h, 15, 5, 17, 22);
  draw::rect(h, 85, 5, 87, 22);
  draw::rect(h, 50, 38, 52, 55);  // bottom: box 1 and box 2
  draw::rect(h, 50, 53, 88, 55);
  draw::rect(h, 86, 38, 88, 55);
  const auto hr = filter_stage2(draw::binary(h), three);
  REQUIRE(hr.size() == 2);
  std::set<std::set<std::size_t>> touched;
  for (const auto& r : hr) {
    std::set<std::size_t> s;
    for (const auto& c : r.touched) s.insert(c.detection);
    touched.insert(s);
  }
  CHECK(touched == std::set<std::set<std::size_t>>{{0, 2}, {1, 2}});
}

TEST_CASE("topology extraction edge cases") {
  const std::vector<Detection> one{{"Res1", {5, 5, 20, 20}, 1}};
  const Circuit c = extract_topology({}, one);
  CHECK(c.devices().size() == 1);
  CHECK(c.devices()[0].id == "Res11");
  CHECK(c.nets().empty());

  std::vector<NetRegion> regs(3);
  for (std::size_t i = 0; i < 3; ++i) {
    regs[i].region_id = i;
    regs[i].touched = {{0, 5.0 + 5.0 * static_cast<double>(i), 5.0}};
  }
  CHECK_THROWS_AS(extract_topology(regs, one), ArityOverflowError);
}

TEST_CASE("hand-drawn rc low-pass is recovered") {
  const auto d = draw::rc_lp_drawing();
  const Circuit got = recognize(d.image, d.detections);
  CHECK(oracle::topology(got) == oracle::topology(rc_expected()));
  CHECK(validate_circuit(got).warnings.empty());
  const Circuit inv = recognize(draw::invert(d.image), d.detections);
  CHECK(oracle::topology(inv) == oracle::topology(rc_expected()));
  // device ids follow detection order
  CHECK(got.devices()[0].id == "DCPower1");
  CHECK(got.devices()[3].id == "AGND1");
}

TEST_CASE("blank image with no detections") {
  const Circuit c = recognize(RgbImage(30, 20, {255, 255, 255}), {});
  CHECK(c.devices().empty());
  CHECK(c.nets().empty());
}

TEST_CASE("rendered schematics round-trip") {
  int exact = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    synth::SchematicOptions opt;
    opt.dark_background = seed % 4 == 0;
    const auto s = synth::render_schematic(seed, opt);
    const Circuit got = recognize(s.image, s.detections);
    exact += oracle::topology(got) == oracle::topology(s.truth);
  }
  CHECK(exact == 20);
}

TEST_CASE("detections json") {
  const auto dets = parse_detections(
      R"([{"label":"Res1","bbox":[1,2,30,40],"score":0.5},{"label":"DeviceO","bbox":[0,0,5,5]}])");
  REQUIRE(dets.size() == 2);
  CHECK(dets[0].bbox == BBox{1, 2, 30, 40});
  CHECK(dets[1].label == "DeviceOsc");
  CHECK(dets[1].score == 1.0);
  CHECK(parse_detections(serialize_detections(dets))[0].bbox == dets[0].bbox);
  CHECK_THROWS_AS(parse_detections(R"([{"label":"Resistor","bbox":[1,2,3,4]}])"),
                  UnknownCategoryError);
  CHECK_THROWS_AS(parse_detections(R"([{"label":"Res1","bbox":[5,2,3,4]}])"), ValidationError);
  CHECK_THROWS_AS(parse_detections(R"([{"label":"Res1","bbox":[1,2]}])"), ParseError);
  CHECK_THROWS_AS(parse_detections("{}"), ParseError);
  CHECK_THROWS_AS(validate_detections(dets, std::make_pair(20, 20)), ValidationError);
}

TEST_CASE("png round trip") {
  RgbImage img(7, 5, {1, 2, 3});
  img.at(6, 4) = {250, 128, 0};
  const auto bytes = encode_png(img);
  CHECK(decode_png(bytes) == img);
  const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK_THROWS_AS(decode_png(junk), ParseError);
  CHECK_THROWS_AS(read_png("/nonexistent.png"), IoError);
}
