// Copyright 2026 The clickseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clickseg/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "clickseg/imageio.hpp"
#include "json.hpp"

namespace clickseg {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* to_string(SourceTag tag) {
  return tag == SourceTag::kFine ? "fine" : "general";
}

SourceTag parse_source_tag(const std::string& s) {
  if (s == "general") return SourceTag::kGeneral;
  if (s == "fine") return SourceTag::kFine;
  throw DatasetError("unknown source tag '" + s + "'");
}

const ImageEntry* Dataset::find_image(const std::string& id) const {
  auto it = std::lower_bound(
      images.begin(), images.end(), id,
      [](const ImageEntry& e, const std::string& key) { return e.id < key; });
  return it != images.end() && it->id == id ? &*it : nullptr;
}

// ---------------------------------------------------------------------------
// index.json
// ---------------------------------------------------------------------------

namespace {

void sort_dataset(Dataset& ds) {
  std::sort(ds.images.begin(), ds.images.end(),
            [](const ImageEntry& a, const ImageEntry& b) { return a.id < b.id; });
  std::stable_sort(ds.instances.begin(), ds.instances.end(),
                   [](const InstanceRecord& a, const InstanceRecord& b) {
                     return a.instance_id < b.instance_id;
                   });
}

std::string json_id(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw DatasetError(where + ": missing '" + key + "'");
  const json& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw DatasetError(where + ": '" + key + "' must be a string or integer");
}

}  // namespace

Dataset load_dataset(const fs::path& dir) {
  const fs::path index_path = dir / "index.json";
  std::ifstream in(index_path);
  if (!in) throw DatasetError("missing " + index_path.string());
  json index;
  try {
    in >> index;
  } catch (const json::exception& e) {
    throw DatasetError(index_path.string() + ": " + e.what());
  }

  Dataset ds;
  std::set<std::string> image_ids;
  for (const json& j : index.value("images", json::array())) {
    ImageEntry e;
    e.id = json_id(j, "id", "image");
    const std::string where = "image '" + e.id + "'";
    if (!image_ids.insert(e.id).second) throw DatasetError(where + ": duplicate id");
    if (!j.contains("file")) throw DatasetError(where + ": missing 'file'");
    e.file = fs::absolute(dir / j.at("file").get<std::string>());
    e.height = j.value("height", -1);
    e.width = j.value("width", -1);
    RgbImage pixels;
    try {
      pixels = read_rgb(e.file);
    } catch (const Error& err) {
      throw DatasetError(where + ": " + err.what());
    }
    if ((e.height >= 0 && pixels.height() != e.height) ||
        (e.width >= 0 && pixels.width() != e.width)) {
      throw DatasetError(where + ": file is " + std::to_string(pixels.height()) +
                         "x" + std::to_string(pixels.width()) +
                         ", index declares " + std::to_string(e.height) + "x" +
                         std::to_string(e.width));
    }
    e.height = pixels.height();
    e.width = pixels.width();
    e.pixels = std::make_shared<const RgbImage>(std::move(pixels));
    ds.images.push_back(std::move(e));
  }
  sort_dataset(ds);

  std::set<std::string> instance_ids;
  for (const json& j : index.value("instances", json::array())) {
    InstanceRecord rec;
    rec.instance_id = json_id(j, "id", "instance");
    const std::string where = "instance '" + rec.instance_id + "'";
    if (!instance_ids.insert(rec.instance_id).second) {
      throw DatasetError(where + ": duplicate id");
    }
    rec.image_id = json_id(j, "image_id", where);
    const ImageEntry* img = ds.find_image(rec.image_id);
    if (!img) throw DatasetError(where + ": unknown image '" + rec.image_id + "'");
    rec.image = img->pixels;
    try {
      rec.source = parse_source_tag(j.value("source", std::string("general")));
    } catch (const DatasetError& e) {
      throw DatasetError(where + ": " + e.what());
    }
    if (j.contains("category") && !j.at("category").is_null()) {
      rec.category = j.at("category").get<std::string>();
    }

    const bool has_file = j.contains("mask_file");
    const bool has_poly = j.contains("polygon");
    if (has_file == has_poly) {
      throw DatasetError(where + ": needs exactly one of 'mask_file' or 'polygon'");
    }
    try {
      if (has_file) {
        rec.mask = read_mask(dir / j.at("mask_file").get<std::string>());
      } else {
        std::vector<Point2> pts;
        for (const json& p : j.at("polygon")) {
          if (!p.is_array() || p.size() != 2) {
            throw DatasetError("polygon vertices must be [x, y] pairs");
          }
          pts.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        rec.mask = rasterize_polygon(pts, img->height, img->width);
      }
    } catch (const DatasetError& e) {
      throw DatasetError(where + ": " + e.what());
    } catch (const Error& e) {
      throw DatasetError(where + ": " + e.what());
    } catch (const json::exception& e) {
      throw DatasetError(where + ": " + e.what());
    }
    if (rec.mask.height() != img->height || rec.mask.width() != img->width) {
      throw DatasetError(where + ": mask " + std::to_string(rec.mask.height()) +
                         "x" + std::to_string(rec.mask.width()) +
                         " does not match image " + std::to_string(img->height) +
                         "x" + std::to_string(img->width));
    }
    if (rec.mask.none()) throw DatasetError(where + ": mask is empty");
    ds.instances.push_back(std::move(rec));
  }
  sort_dataset(ds);
  return ds;
}

void save_dataset(const Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "masks");
  json index;
  index["images"] = json::array();
  index["instances"] = json::array();
  for (const ImageEntry& e : ds.images) {
    if (!e.pixels) throw DatasetError("image '" + e.id + "' has no pixels to save");
    const std::string rel = "images/" + e.id + ".png";
    write_png(dir / rel, *e.pixels);
    index["images"].push_back(
        {{"id", e.id}, {"file", rel}, {"height", e.height}, {"width", e.width}});
  }
  for (const InstanceRecord& r : ds.instances) {
    const std::string rel = "masks/" + r.instance_id + ".png";
    write_png(dir / rel, r.mask);
    json j = {{"id", r.instance_id},
              {"image_id", r.image_id},
              {"source", to_string(r.source)},
              {"mask_file", rel}};
    if (r.category) j["category"] = *r.category;
    index["instances"].push_back(std::move(j));
  }
  std::ofstream out(dir / "index.json", std::ios::trunc);
  if (!out) throw DatasetError("cannot write " + (dir / "index.json").string());
  out << index.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Merge
// ---------------------------------------------------------------------------

void MergeConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw PreconditionError("merge IoU threshold must lie in (0,1)");
  }
}

std::vector<InstanceRecord> merge_sources(
    const std::vector<InstanceRecord>& general,
    const std::vector<InstanceRecord>& fine, const MergeConfig& cfg) {
  cfg.validate();
  std::map<std::string, std::vector<const InstanceRecord*>> fine_by_image;
  for (const InstanceRecord& f : fine) fine_by_image[f.image_id].push_back(&f);

  std::vector<InstanceRecord> out;
  out.reserve(general.size() + fine.size());
  for (const InstanceRecord& f : fine) {
    out.push_back(f);
    out.back().source = SourceTag::kFine;
  }
  for (const InstanceRecord& g : general) {
    bool duplicated = false;
    if (auto it = fine_by_image.find(g.image_id); it != fine_by_image.end()) {
      for (const InstanceRecord* f : it->second) {
        if (!f->mask.same_shape(g.mask)) {
          throw ShapeError("merge: image '" + g.image_id +
                           "' has masks of different sizes");
        }
        if (iou(g.mask, f->mask) > cfg.iou_threshold) {
          duplicated = true;
          break;
        }
      }
    }
    if (!duplicated) {
      out.push_back(g);
      out.back().source = SourceTag::kGeneral;
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const InstanceRecord& a, const InstanceRecord& b) {
                     return a.instance_id < b.instance_id;
                   });
  return out;
}

Dataset merge_datasets(const Dataset& general, const Dataset& fine,
                       const MergeConfig& cfg) {
  Dataset out;
  std::map<std::string, ImageEntry> images;
  for (const ImageEntry& e : general.images) images.emplace(e.id, e);
  for (const ImageEntry& e : fine.images) {
    auto [it, inserted] = images.emplace(e.id, e);
    if (!inserted && (it->second.height != e.height || it->second.width != e.width)) {
      throw DatasetError("image '" + e.id + "' differs in size between sources");
    }
  }
  for (auto& [id, e] : images) out.images.push_back(e);
  out.instances = merge_sources(general.instances, fine.instances, cfg);
  sort_dataset(out);
  return out;
}

Dataset union_instances_per_image(const Dataset& ds) {
  Dataset out;
  out.images = ds.images;
  std::map<std::string, InstanceRecord> merged;
  for (const InstanceRecord& r : ds.instances) {
    auto [it, inserted] = merged.try_emplace(r.image_id, r);
    if (inserted) {
      it->second.instance_id = r.image_id;
      it->second.category.reset();
      continue;
    }
    BinaryMask& m = it->second.mask;
    require_same_shape(m, r.mask, "instance union");
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = (m[i] || r.mask[i]) ? 1 : 0;
  }
  for (auto& [id, rec] : merged) out.instances.push_back(std::move(rec));
  sort_dataset(out);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic suites
// ---------------------------------------------------------------------------

SuiteKind parse_suite_kind(const std::string& s) {
  if (s == "two_color_shapes") return SuiteKind::kTwoColorShapes;
  if (s == "textured_shapes") return SuiteKind::kTexturedShapes;
  throw PreconditionError("unknown suite kind '" + s + "'");
}

const char* to_string(SuiteKind kind) {
  return kind == SuiteKind::kTwoColorShapes ? "two_color_shapes"
                                            : "textured_shapes";
}

namespace {

using Color = std::array<double, 3>;

double color_distance(const Color& a, const Color& b) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

Color random_color(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {u(rng), u(rng), u(rng)};
}

// Two colors at least `min_gap` apart.
std::pair<Color, Color> contrasting_pair(std::mt19937_64& rng, double min_gap) {
  for (;;) {
    Color a = random_color(rng);
    Color b = random_color(rng);
    if (color_distance(a, b) >= min_gap) return {a, b};
  }
}

Color mix(const Color& a, const Color& b, double t) {
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]),
          a[2] + t * (b[2] - a[2])};
}

std::vector<Point2> star_convex_blob(std::mt19937_64& rng, int height, int width) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r0 = 10.0 + 16.0 * u(rng);
  const bool convex = u(rng) < 0.5;
  // Harmonic perturbation of the radius; convex blobs keep it small.
  std::array<double, 4> amp{};
  std::array<double, 4> phase{};
  for (int k = 0; k < 4; ++k) {
    const double limit = convex ? 0.04 : 0.22 / (k + 1);
    amp[k] = limit * u(rng);
    phase[k] = 2.0 * std::numbers::pi * u(rng);
  }
  const double stretch = convex ? 0.75 + 0.5 * u(rng) : 1.0;
  const double extent = r0 * 1.6;
  const double cy = extent + 2 + (height - 2 * (extent + 2)) * u(rng);
  const double cx = extent + 2 + (width - 2 * (extent + 2)) * u(rng);
  std::vector<Point2> pts;
  constexpr int kVertices = 72;
  for (int i = 0; i < kVertices; ++i) {
    const double t = 2.0 * std::numbers::pi * i / kVertices;
    double r = 1.0;
    for (int k = 0; k < 4; ++k) r += amp[k] * std::cos((k + 2) * t + phase[k]);
    r *= r0;
    pts.push_back({cx + stretch * r * std::cos(t), cy + r * std::sin(t) / stretch});
  }
  return pts;
}

}  // namespace

Dataset make_synthetic_suite(SuiteKind kind, int n, std::uint64_t seed,
                             const SuiteOptions& opts) {
  if (n < 1) throw PreconditionError("synthetic suite needs n >= 1");
  if (opts.height < 64 || opts.width < 64) {
    throw PreconditionError("synthetic suite images must be at least 64x64");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, opts.noise_sigma);
  std::uniform_int_distribution<int> period(3, 8);
  Dataset ds;
  for (int i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d", i);
    const std::string image_id = std::string("img_") + buf;

    BinaryMask mask;
    do {
      mask = rasterize_polygon(star_convex_blob(rng, opts.height, opts.width),
                               opts.height, opts.width);
    } while (mask.none());

    // Foreground/background appearance: two colors, or two two-tone textures
    // whose mean colors stay apart.
    Color fg_a, fg_b, bg_a, bg_b;
    int fg_period = 1, bg_period = 1;
    auto [fg, bg] = contrasting_pair(rng, 0.45);
    if (kind == SuiteKind::kTwoColorShapes) {
      fg_a = fg_b = fg;
      bg_a = bg_b = bg;
    } else {
      fg_a = fg;
      fg_b = mix(fg, random_color(rng), 0.35);
      bg_a = bg;
      bg_b = mix(bg, random_color(rng), 0.35);
      fg_period = period(rng);
      bg_period = period(rng);
    }

    RgbImage img(opts.height, opts.width);
    for (int r = 0; r < opts.height; ++r) {
      for (int c = 0; c < opts.width; ++c) {
        Color col;
        if (mask.at(r, c)) {
          const bool alt = ((r / fg_period) + (c / fg_period)) % 2 == 1;  // checker
          col = alt ? fg_b : fg_a;
        } else {
          const bool alt = ((r + c) / bg_period) % 2 == 1;  // diagonal stripes
          col = alt ? bg_b : bg_a;
        }
        std::uint8_t* px = img.pixel(r, c);
        for (int k = 0; k < 3; ++k) {
          const double v = std::clamp(col[k] + noise(rng), 0.0, 1.0);
          px[k] = static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
      }
    }

    auto pixels = std::make_shared<const RgbImage>(std::move(img));
    ds.images.push_back({image_id, fs::path(image_id + ".png"), opts.height,
                         opts.width, pixels});
    ds.instances.push_back({std::string("inst_") + buf, image_id, pixels,
                            std::move(mask), SourceTag::kGeneral,
                            std::string(to_string(kind))});
  }
  sort_dataset(ds);
  return ds;
}

}  // namespace clickseg
