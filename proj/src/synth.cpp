#include "circret/synth.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>

#include "circret/errors.hpp"
#include "circret/graph.hpp"
#include "circret/taxonomy.hpp"

namespace circret::synth {
namespace {

// Portable draws: std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  int uniform(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(int percent) { return uniform(0, 99) < percent; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(uniform(0, static_cast<int>(i) - 1))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

const std::vector<std::string> kVerticalParts{
    "Res1", "Res2", "Cap1", "Cap2", "Inductance", "Diode",
    "Battery", "DCPower", "Lamp", "Switch", "Crystal"};
const std::vector<std::string> kGrounds{"AGND", "DGND", "PGND"};

// ---------------------------------------------------------------------------
// Rendering

class Canvas {
 public:
  Canvas(int w, int h, Rgb bg, Rgb ink) : img_(w, h, bg), ink_(ink) {}

  void rect(int x0, int y0, int x1, int y1) {
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    for (int y = std::max(0, y0); y <= std::min(img_.height() - 1, y1); ++y) {
      for (int x = std::max(0, x0); x <= std::min(img_.width() - 1, x1); ++x) {
        img_.at(x, y) = ink_;
      }
    }
  }
  void disc(int cx, int cy, int r) {
    for (int y = cy - r; y <= cy + r; ++y) {
      for (int x = cx - r; x <= cx + r; ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r && img_.contains(x, y)) {
          img_.at(x, y) = ink_;
        }
      }
    }
  }
  RgbImage take() { return std::move(img_); }

 private:
  RgbImage img_;
  Rgb ink_;
};

// Solid body strictly inside `box` (inset keeps the erase margin clear).
void draw_body(Canvas& c, const std::string& label, const BBox& box) {
  const int inset = 5;
  const int x0 = box.x_min + inset, x1 = box.x_max - inset;
  const int y0 = box.y_min + inset, y1 = box.y_max - inset;
  const int cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
  if (label == "Cap1" || label == "Cap2") {
    const int gap = std::max(1, (y1 - y0) / 6);
    c.rect(x0, y0, x1, cy - gap);
    c.rect(x0, cy + gap, x1, y1);
    c.rect(cx - 1, cy - gap, cx + 1, cy + gap);
  } else if (label == "Lamp" || label == "DCPower" || label == "ACPower") {
    c.disc(cx, cy, std::min(x1 - x0, y1 - y0) / 2);
    c.rect(cx - 1, y0, cx + 1, y1);
  } else {
    c.rect(x0, y0, x1, y1);
  }
}

struct Rail {
  int y = 0;
  std::vector<int> xs;  // attachment columns
  std::vector<std::pair<std::size_t, std::string>> pins;
};

}  // namespace

namespace {

// Drawings sparser than this lose their main body to the stage-1 filter's
// literal 10%-of-area rule, so the renderer redraws them.
constexpr double kMinInkFraction = 0.11;

std::optional<Schematic> render_once(Rng& rng, std::uint64_t seed, const SchematicOptions& opt) {
  const int slot_w = 40;
  const int band_h = 52;
  const int margin = 6;
  const int stroke = std::max(2, opt.stroke);
  const int half = stroke / 2;

  struct Cell {
    enum Kind { kVertical, kTransistor, kGround } kind;
    std::string part;   // vertical part or transistor category
    std::string gate;   // gate resistor category
    bool gate_up = true;
    int band = 0;
    int slot = 0;       // first slot
  };

  std::vector<Cell> cells;
  int rails = 0;
  std::vector<int> band_slots;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 10000) throw Error("schematic generator failed to converge");
    cells.clear();
    rails = rng.uniform(2, 3);
    band_slots.assign(rails - 1, 0);
    int components = 0;
    const int target = rng.uniform(opt.min_components, opt.max_components);
    for (int b = 0; b < rails - 1; ++b) {
      // every band carries at least one part so the rails stay connected
      const int parts = rng.uniform(1, 3);
      for (int i = 0; i < parts; ++i) {
        Cell c;
        c.band = b;
        c.slot = band_slots[b];
        if (rng.chance(30)) {
          c.kind = Cell::kTransistor;
          c.part = rng.chance(50) ? "Mos" : "Triode";
          c.gate = rng.chance(50) ? "Res1" : "Res2";
          c.gate_up = rng.chance(50);
          band_slots[b] += 2;
          components += 2;
        } else {
          c.kind = Cell::kVertical;
          c.part = rng.pick(kVerticalParts);
          band_slots[b] += 1;
          components += 1;
        }
        cells.push_back(c);
      }
    }
    int grounds = rng.uniform(0, 2);
    for (int g = 0; g < grounds; ++g) {
      Cell c;
      c.kind = Cell::kGround;
      c.part = rng.pick(kGrounds);
      c.band = rails - 1;
      c.slot = g;
      cells.push_back(c);
      components += 1;
    }
    if (components < opt.min_components || components > opt.max_components ||
        components != target) {
      continue;
    }
    // Each rail needs at least two attachments.
    std::vector<int> attach(rails, 0);
    for (const auto& c : cells) {
      if (c.kind == Cell::kGround) {
        ++attach[rails - 1];
      } else {
        ++attach[c.band];
        ++attach[c.band + 1];
        if (c.kind == Cell::kTransistor) ++attach[c.gate_up ? c.band : c.band + 1];
      }
    }
    if (std::all_of(attach.begin(), attach.end(), [](int a) { return a >= 2; })) break;
  }

  int max_slots = 0;
  for (int s : band_slots) max_slots = std::max(max_slots, s);
  int ground_slots = 0;
  for (const auto& c : cells) {
    if (c.kind == Cell::kGround) ground_slots = std::max(ground_slots, c.slot + 1);
  }
  max_slots = std::max(max_slots, ground_slots);
  const int width = 2 * margin + max_slots * slot_w;
  const int top = margin + 4;
  const int height = top + (rails - 1) * band_h + (ground_slots > 0 ? 36 : 0) + margin;

  Rgb bg{255, 255, 255};
  Rgb ink = rng.chance(50) ? Rgb{0, 0, 0} : Rgb{20, 30, 110};
  if (opt.dark_background) {
    bg = Rgb{0, 0, 0};
    ink = rng.chance(50) ? Rgb{255, 255, 255} : Rgb{230, 230, 120};
  }
  Canvas canvas(width, height, bg, ink);

  std::vector<Rail> rail(rails);
  for (int r = 0; r < rails; ++r) rail[r].y = top + r * band_h;

  Schematic out;
  std::vector<Device> devices;
  std::map<std::string, int> ordinals;
  auto new_device = [&](const std::string& label, const BBox& box) {
    Detection d;
    d.label = label;
    d.bbox = box;
    d.score = 0.9;
    out.detections.push_back(d);
    Device dev;
    dev.category = label;
    dev.id = label + std::to_string(++ordinals[label]);
    devices.push_back(dev);
    draw_body(canvas, label, box);
    return devices.size() - 1;
  };
  auto vline = [&](int x, int y0, int y1) { canvas.rect(x - half, y0, x - half + stroke - 1, y1); };
  auto hline = [&](int y, int x0, int x1) { canvas.rect(x0, y - half, x1, y - half + stroke - 1); };
  auto attach = [&](int r, int x, std::size_t dev, const std::string& role) {
    rail[r].xs.push_back(x);
    rail[r].pins.emplace_back(dev, role);
  };

  std::vector<std::pair<BBox, int>> label_spots;  // free space right of parts
  std::vector<std::tuple<std::size_t, std::string, std::string>> private_nets;

  for (const auto& c : cells) {
    const int slot_x = margin + c.slot * slot_w;
    if (c.kind == Cell::kGround) {
      const int cx = slot_x + slot_w / 2;
      const int y_rail = rail[rails - 1].y;
      BBox box{cx - 10, y_rail + 14, cx + 10, y_rail + 34};
      std::size_t d = new_device(c.part, box);
      vline(cx, y_rail, box.y_min + 5);
      attach(rails - 1, cx, d, "t");
      devices[d].pins.push_back({"t", ""});
      label_spots.push_back({box, 0});
      continue;
    }
    const int y_top = rail[c.band].y;
    const int y_bot = rail[c.band + 1].y;
    const int mid = (y_top + y_bot) / 2;
    if (c.kind == Cell::kVertical) {
      const int cx = slot_x + slot_w / 2;
      BBox box{cx - 10, mid - 16, cx + 10, mid + 16};
      std::size_t d = new_device(c.part, box);
      vline(cx, y_top, box.y_min + 5);
      vline(cx, box.y_max - 5, y_bot);
      devices[d].pins = {{"p1", ""}, {"p2", ""}};
      attach(c.band, cx, d, "p1");
      attach(c.band + 1, cx, d, "p2");
      label_spots.push_back({box, 0});
      continue;
    }
    // transistor cell: gate resistor in the first slot, transistor in the second
    const int rx = slot_x + slot_w / 2;
    BBox rbox{rx - 16, mid - 8, rx + 16, mid + 8};
    const int tx = slot_x + slot_w + slot_w / 2;
    BBox tbox{tx - 14, mid - 18, tx + 14, mid + 18};
    std::size_t res = new_device(c.gate, rbox);
    std::size_t tr = new_device(c.part, tbox);
    const bool mos = c.part == "Mos";
    const int lead_x = tx + 6;
    vline(lead_x, y_top, tbox.y_min + 5);
    vline(lead_x, tbox.y_max - 5, y_bot);
    hline(mid, rbox.x_max - 5, tbox.x_min + 5);
    // resistor's free end goes out left, then to a rail
    const int wire_x = rbox.x_min - 4;
    hline(mid, wire_x - half, rbox.x_min + 5);
    if (c.gate_up) {
      vline(wire_x, y_top, mid);
    } else {
      vline(wire_x, mid, y_bot);
    }
    devices[res].pins = {{"p1", ""}, {"p2", ""}};
    devices[tr].pins = {{mos ? "g" : "b", ""}, {mos ? "d" : "c", ""}, {mos ? "s" : "e", ""}};
    attach(c.gate_up ? c.band : c.band + 1, wire_x, res, "p1");
    attach(c.band, lead_x, tr, mos ? "d" : "c");
    attach(c.band + 1, lead_x, tr, mos ? "s" : "e");
    private_nets.emplace_back(res, "p2", "");
    private_nets.emplace_back(tr, mos ? "g" : "b", "");
    label_spots.push_back({tbox, 0});
  }

  // Rails span their attachment columns.
  std::map<std::pair<std::size_t, std::string>, std::string> net_of;
  for (int r = 0; r < rails; ++r) {
    auto [lo, hi] = std::minmax_element(rail[r].xs.begin(), rail[r].xs.end());
    hline(rail[r].y, *lo - half, *hi - half + stroke - 1);
    for (const auto& p : rail[r].pins) net_of[p] = "rail" + std::to_string(r);
  }
  for (std::size_t i = 0; i < private_nets.size(); i += 2) {
    const std::string net = "gate" + std::to_string(i / 2 + 1);
    net_of[{std::get<0>(private_nets[i]), std::get<1>(private_nets[i])}] = net;
    net_of[{std::get<0>(private_nets[i + 1]), std::get<1>(private_nets[i + 1])}] = net;
  }
  for (std::size_t d = 0; d < devices.size(); ++d) {
    for (auto& p : devices[d].pins) p.net = net_of.at({d, p.role});
  }

  if (opt.text_noise) {
    // Reference-designator-like specks to the right of parts.
    for (const auto& [box, unused] : label_spots) {
      if (!rng.chance(70)) continue;
      const int x0 = box.x_max + 3;
      const int y0 = (box.y_min + box.y_max) / 2 - 4;
      const int glyphs = rng.uniform(1, 2);
      for (int gi = 0; gi < glyphs; ++gi) {
        const int gx = x0 + gi * 3;
        if (gx + 1 >= width) break;
        canvas.rect(gx, y0, gx + 1, y0 + rng.uniform(3, 7));
      }
    }
  }

  out.image = canvas.take();
  std::size_t inked = 0;
  for (const Rgb& px : out.image.pixels()) inked += px == bg ? 0 : 1;
  if (static_cast<double>(inked) < kMinInkFraction * static_cast<double>(out.image.size())) {
    return std::nullopt;
  }
  out.truth = Circuit("schematic-" + std::to_string(seed), std::move(devices), {});
  return out;
}

}  // namespace

Schematic render_schematic(std::uint64_t seed, const SchematicOptions& opt) {
  Rng rng(seed ^ 0x5eed5c4e3a71cULL);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    if (auto s = render_once(rng, seed, opt)) return std::move(*s);
  }
  throw Error("schematic generator failed to converge");
}

// ---------------------------------------------------------------------------
// Corpus generation

namespace {

const std::vector<std::string> kTwoTerminal{
    "Res1", "Res2", "Cap1", "Cap2", "Inductance", "Diode", "DCPower", "Battery", "Switch"};
const std::vector<std::string> kThreeTerminal{"Mos", "Triode", "Amplifier"};
const std::vector<std::string> kOneTerminal{"AGND", "notCon"};

std::string draw_category(Rng& rng) {
  const int r = rng.uniform(0, 99);
  if (r < 60) return rng.pick(kTwoTerminal);
  if (r < 85) return rng.pick(kThreeTerminal);
  return rng.pick(kOneTerminal);
}

std::size_t c4_nodes(const std::vector<Device>& devs) {
  std::size_t n = 0;
  for (const auto& d : devs) n += 1 + d.pins.size();
  return n;
}

// Every net has >= 2 pins, C1 is connected, no device has all pins on one net.
bool well_formed(const std::vector<Device>& devs) {
  if (devs.empty()) return false;
  std::map<std::string, std::vector<std::size_t>> nets;
  for (std::size_t i = 0; i < devs.size(); ++i) {
    std::set<std::string> own;
    for (const auto& p : devs[i].pins) {
      nets[p.net].push_back(i);
      own.insert(p.net);
    }
    if (devs[i].pins.size() >= 2 && own.size() == 1) return false;
  }
  std::vector<std::size_t> parent(devs.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [net, members] : nets) {
    if (members.size() < 2) return false;
    for (std::size_t m : members) parent[find(m)] = find(members.front());
  }
  for (std::size_t i = 0; i < devs.size(); ++i) {
    if (find(i) != find(0)) return false;
  }
  return true;
}

std::vector<Device> random_devices(Rng& rng, int count) {
  std::vector<Device> devs;
  std::map<std::string, int> ordinals;
  for (int i = 0; i < count; ++i) {
    Device d;
    d.category = draw_category(rng);
    d.id = d.category + std::to_string(++ordinals[d.category]);
    for (const auto& role : pin_roles_for(d.category)) d.pins.push_back({role, ""});
    devs.push_back(std::move(d));
  }
  return devs;
}

bool wire(Rng& rng, std::vector<Device>& devs) {
  std::vector<PinBinding*> pins;
  for (auto& d : devs) {
    for (auto& p : d.pins) pins.push_back(&p);
  }
  const int total = static_cast<int>(pins.size());
  if (total < 2) return false;
  const int nets = rng.uniform(std::max(1, (total + 3) / 4), total / 2);
  for (int attempt = 0; attempt < 200; ++attempt) {
    rng.shuffle(pins);
    for (int i = 0; i < total; ++i) {
      const int net = i < 2 * nets ? i / 2 : rng.uniform(0, nets - 1);
      pins[i]->net = "n" + std::to_string(net + 1);
    }
    if (well_formed(devs)) return true;
  }
  return false;
}

std::set<std::string> pick_ports(Rng& rng, const std::vector<Device>& devs) {
  std::set<std::string> nets;
  for (const auto& d : devs) {
    for (const auto& p : d.pins) nets.insert(p.net);
  }
  std::vector<std::string> all(nets.begin(), nets.end());
  std::set<std::string> ports;
  const int n = rng.uniform(1, std::min<int>(2, static_cast<int>(all.size())));
  while (static_cast<int>(ports.size()) < n) ports.insert(rng.pick(all));
  return ports;
}

std::map<std::string, int> net_sizes(const std::vector<Device>& devs) {
  std::map<std::string, int> sizes;
  for (const auto& d : devs) {
    for (const auto& p : d.pins) ++sizes[p.net];
  }
  return sizes;
}

// One random edit; returns false when the drawn edit does not apply.
bool perturb(Rng& rng, std::vector<Device>& devs, std::set<std::string>& ports,
             const CorpusOptions& opt, int& fresh) {
  const int kind = rng.uniform(0, 3);
  auto sizes = net_sizes(devs);
  std::vector<std::string> nets;
  for (const auto& [n, s] : sizes) nets.push_back(n);
  if (kind == 0) {  // relabel a two-terminal part
    std::vector<std::size_t> cands;
    for (std::size_t i = 0; i < devs.size(); ++i) {
      if (devs[i].pins.size() == 2 && category(devs[i].category).pin_roles[0] == "p1") {
        cands.push_back(i);
      }
    }
    if (cands.empty()) return false;
    Device& d = devs[rng.pick(cands)];
    std::string next = rng.pick(kTwoTerminal);
    if (next == d.category) return false;
    d.category = next;
    return true;
  }
  if (kind == 1) {  // move one pin to another net
    std::vector<std::pair<std::size_t, std::size_t>> cands;
    for (std::size_t i = 0; i < devs.size(); ++i) {
      for (std::size_t j = 0; j < devs[i].pins.size(); ++j) {
        if (sizes[devs[i].pins[j].net] >= 3) cands.emplace_back(i, j);
      }
    }
    if (cands.empty() || nets.size() < 2) return false;
    auto [i, j] = rng.pick(cands);
    std::string target = rng.pick(nets);
    if (target == devs[i].pins[j].net) return false;
    devs[i].pins[j].net = target;
    return true;
  }
  if (kind == 2) {  // add a two-terminal part across two nets
    if (static_cast<int>(devs.size()) >= opt.max_devices ||
        static_cast<int>(c4_nodes(devs)) + 3 > opt.max_c4_nodes || nets.size() < 2) {
      return false;
    }
    std::string a = rng.pick(nets), b = rng.pick(nets);
    if (a == b) return false;
    Device d;
    d.category = rng.pick(kTwoTerminal);
    d.id = "X" + std::to_string(++fresh);
    d.pins = {{"p1", a}, {"p2", b}};
    devs.push_back(std::move(d));
    return true;
  }
  // remove a part whose nets stay populated
  if (static_cast<int>(devs.size()) <= opt.min_devices) return false;
  std::vector<std::size_t> cands;
  for (std::size_t i = 0; i < devs.size(); ++i) {
    if (std::all_of(devs[i].pins.begin(), devs[i].pins.end(),
                    [&](const PinBinding& p) { return sizes[p.net] >= 3; })) {
      cands.push_back(i);
    }
  }
  if (cands.empty()) return false;
  devs.erase(devs.begin() + static_cast<long>(rng.pick(cands)));
  for (auto it = ports.begin(); it != ports.end();) {
    if (net_sizes(devs).count(*it) == 0) {
      it = ports.erase(it);
    } else {
      ++it;
    }
  }
  return true;
}

}  // namespace

Circuit random_circuit(std::uint64_t seed, int devices, const std::string& id) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    auto devs = random_devices(rng, devices);
    if (!wire(rng, devs)) continue;
    auto ports = pick_ports(rng, devs);
    return Circuit(id, std::move(devs), std::move(ports));
  }
  throw Error("random circuit generator failed to converge");
}

std::vector<CorpusInput> generate_corpus(std::uint64_t seed, const CorpusOptions& opt) {
  Rng rng(seed);
  std::vector<CorpusInput> out;
  for (int f = 0; f < opt.families; ++f) {
    std::vector<Device> base;
    std::set<std::string> base_ports;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 100000) throw Error("corpus generator failed to converge");
      const int n = rng.uniform(opt.min_devices, opt.max_devices);
      auto devs = random_devices(rng, n);
      const int c4 = static_cast<int>(c4_nodes(devs));
      if (c4 < opt.min_c4_nodes || c4 > opt.max_c4_nodes) continue;
      if (!wire(rng, devs)) continue;
      base = std::move(devs);
      base_ports = pick_ports(rng, base);
      break;
    }
    const std::string type = "family-" + std::to_string(f + 1);
    for (int v = 0; v < opt.variants_per_family; ++v) {
      std::vector<Device> devs;
      std::set<std::string> ports;
      int fresh = 0;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 100000) throw Error("corpus perturbation failed to converge");
        devs = base;
        ports = base_ports;
        fresh = 0;
        const int edits = rng.uniform(1, 2);
        int applied = 0;
        for (int tries = 0; applied < edits && tries < 50; ++tries) {
          if (perturb(rng, devs, ports, opt, fresh)) ++applied;
        }
        const int c4 = static_cast<int>(c4_nodes(devs));
        if (applied == edits && well_formed(devs) && c4 >= opt.min_c4_nodes &&
            c4 <= opt.max_c4_nodes && !ports.empty()) {
          break;
        }
      }
      CorpusInput in;
      in.entry_id = "f" + std::to_string(f + 1) + "-v" + std::to_string(v + 1);
      in.type_label = type;
      in.circuit = Circuit(in.entry_id, std::move(devs), std::move(ports));
      out.push_back(std::move(in));
    }
  }
  return out;
}

}  // namespace circret::synth
