// Copyright 2026 The ephyspack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <functional>
#include <set>

#include "model_internal.h"

namespace ephyspack {

using namespace detail;

namespace {

constexpr std::pair<SourceKind, std::string_view> kSourceKinds[] = {
    {SourceKind::kElectrode, "Electrode"},   {SourceKind::kElectrodeArray, "ElectrodeArray"},
    {SourceKind::kAmplifier, "Amplifier"},   {SourceKind::kSubject, "Subject"},
    {SourceKind::kBrainRegion, "BrainRegion"}, {SourceKind::kMua, "MUA"},
    {SourceKind::kNeuron, "Neuron"},         {SourceKind::kRoi, "ROI"},
};

std::vector<double> flatten(const std::vector<Point2>& pts) {
  std::vector<double> out;
  out.reserve(pts.size() * 2);
  for (const auto& p : pts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<Point2> points(const std::vector<double>& flat, std::size_t begin, std::size_t count) {
  std::vector<Point2> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = {flat[begin + 2 * i], flat[begin + 2 * i + 1]};
  }
  return out;
}

}  // namespace

std::string_view source_kind_name(SourceKind kind) {
  for (const auto& [k, n] : kSourceKinds) {
    if (k == kind) return n;
  }
  return "?";
}

std::optional<SourceKind> parse_source_kind(std::string_view name) {
  for (const auto& [k, n] : kSourceKinds) {
    if (n == name) return k;
  }
  return std::nullopt;
}

void check_source(const SignalSource& src, const ModelIndex& index, const std::string& path,
                  Reporter& out) {
  if (src.parent) {
    if (*src.parent == src.source_id) {
      out.report("S003", path, "source is its own parent");
    } else if (!index.has_source(*src.parent)) {
      out.report("S002", path, "parent '" + *src.parent + "' does not exist");
    } else {
      std::set<std::string> seen{src.source_id};
      std::string cur = *src.parent;
      while (true) {
        if (!seen.insert(cur).second) {
          out.report("S003", path, "parent chain returns to '" + cur + "'");
          break;
        }
        auto it = index.source_parents.find(cur);
        if (it == index.source_parents.end()) break;
        cur = it->second;
      }
    }
  }
  if (src.kind == SourceKind::kRoi) {
    out.report("S006", path, "ROI source kind is an extension of the required source types");
  }
  if (src.roi && src.kind != SourceKind::kRoi) {
    out.report("S004", path, "ROI geometry on a " + std::string(source_kind_name(src.kind)) +
                                 " source");
  }
  if (src.position) {
    for (double v : *src.position) {
      if (!finite(v)) {
        out.report("S007", path, "position has a non-finite coordinate");
        break;
      }
    }
  }
  if (!src.roi) return;
  const RoiGeometry& roi = *src.roi;
  if (roi.vertices.size() < 3) {
    out.report("S008", path, "ROI outline needs at least 3 vertices, has " +
                                 std::to_string(roi.vertices.size()));
  }
  auto all_finite = [](const std::vector<Point2>& pts) {
    return std::all_of(pts.begin(), pts.end(),
                       [](const Point2& p) { return finite(p[0]) && finite(p[1]); });
  };
  if (!all_finite(roi.vertices)) out.report("S008", path, "ROI vertex is not finite");
  if (roi.track.size() != roi.times.size()) {
    out.report("S005", path, "ROI track has " + std::to_string(roi.track.size()) +
                                 " frames but " + std::to_string(roi.times.size()) + " times");
  }
  for (std::size_t t = 0; t < roi.track.size(); ++t) {
    if (roi.track[t].size() != roi.vertices.size() || !all_finite(roi.track[t])) {
      out.report("S008", path, "ROI track frame " + std::to_string(t) + " is malformed",
                 detail_index(t));
      break;
    }
  }
  for (std::size_t t = 0; t < roi.times.size(); ++t) {
    if (!finite(roi.times[t]) || (t > 0 && !(roi.times[t] > roi.times[t - 1]))) {
      out.report("S005", path, "ROI times are not strictly increasing at " + std::to_string(t),
                 detail_index(t));
      break;
    }
  }
}

void add_source(Container& c, const SignalSource& src) {
  if (!is_valid_name(src.source_id)) {
    throw Error(Errc::kInvalidName, "invalid source id '" + src.source_id + "'");
  }
  ModelIndex index = build_index(c);
  const std::string path = source_path(src.source_id);
  if (index.has_source(src.source_id)) {
    throw Error(Errc::kDuplicateSourceId, "source '" + src.source_id + "' already exists", path);
  }
  Reporter out(Reporter::Mode::kWriter);
  check_source(src, index, path, out);
  for (const auto& [k, v] : src.static_meta) {
    if (k.empty()) throw Error(Errc::kInvalidName, "empty metadata key", path);
  }
  transactional(c, [&] {
    ObjectId sources = require_group_path(c, "/sources");
    ObjectId id = c.create_group(sources, src.source_id);
    c.set_attribute(id, "kind", std::string(source_kind_name(src.kind)));
    if (src.parent) c.set_attribute(id, "parent", *src.parent);
    if (src.position) {
      c.set_attribute(id, "position", std::vector<double>(src.position->begin(), src.position->end()));
    }
    for (const auto& [k, v] : src.static_meta) c.set_attribute(id, "meta." + k, v);
    if (src.roi) {
      ObjectId roi = c.create_group(id, "roi");
      put_dataset(c, roi, "vertices", flatten(src.roi->vertices), {src.roi->vertices.size(), 2});
      if (!src.roi->times.empty()) {
        std::vector<double> track;
        for (const auto& frame : src.roi->track) {
          auto f = flatten(frame);
          track.insert(track.end(), f.begin(), f.end());
        }
        put_dataset(c, roi, "track", track, {src.roi->track.size(), src.roi->vertices.size(), 2});
        put_vector(c, roi, "times", src.roi->times);
      }
    }
  });
}

SignalSource read_source(ReadContext& ctx, std::string_view source_id) {
  const std::string path = source_path(source_id);
  auto id = ctx.c.try_resolve(path);
  if (!id || split_path(path).size() != 2) {
    throw Error(Errc::kNoSuchSource, "no source '" + std::string(source_id) + "'", path);
  }
  if (ctx.c.kind(*id) != ObjectKind::kGroup) ctx.out.fatal("L002", path, "source is not a group");
  SignalSource src;
  src.source_id = std::string(source_id);
  auto kind_name = opt_attr<std::string>(ctx, *id, "kind");
  auto kind = kind_name ? parse_source_kind(*kind_name) : std::nullopt;
  if (!kind) ctx.out.fatal("S001", path, "kind is missing or not a recognized source type");
  src.kind = *kind;
  src.parent = opt_attr<std::string>(ctx, *id, "parent");
  if (auto pos = ctx.c.find_attribute(*id, "position")) {
    auto* v = std::get_if<std::vector<double>>(&*pos);
    if (!v || v->size() != 3) {
      ctx.out.fatal("S007", path, "position must be an f64 triple");
    }
    src.position = std::array<double, 3>{(*v)[0], (*v)[1], (*v)[2]};
  }
  src.static_meta = strip_prefix(ctx.c.attributes(*id), "meta.");
  if (auto roi = child_group(ctx, *id, "roi")) {
    RoiGeometry geo;
    Tensor v = req_dataset(ctx, *roi, "vertices", is_f64, 2);
    if (v.shape[1] != 2) ctx.out.fatal("S008", path, "ROI vertices must be V x 2");
    const auto& vflat = std::get<std::vector<double>>(v.data);
    geo.vertices = points(vflat, 0, vflat.size() / 2);
    auto track = opt_dataset(ctx, *roi, "track", is_f64, 3);
    auto times = opt_vector<double>(ctx, *roi, "times");
    if (track.has_value() != times.has_value()) {
      ctx.out.fatal("S005", path, "ROI track and times must be stored together");
    }
    if (track) {
      if (track->shape[1] != v.shape[0] || track->shape[2] != 2) {
        ctx.out.fatal("S008", path, "ROI track must be T x V x 2 with V matching the outline");
      }
      const auto& tflat = std::get<std::vector<double>>(track->data);
      const std::size_t per = static_cast<std::size_t>(track->shape[1] * 2);
      if (per > 0) {
        for (std::size_t off = 0; off + per <= tflat.size(); off += per) {
          geo.track.push_back(points(tflat, off, per / 2));
        }
      } else if (ctx.payload) {
        geo.track.resize(track->shape[0]);
      }
      geo.times = std::move(*times);
      if (ctx.payload && track->shape[0] != geo.times.size()) {
        ctx.out.report("S005", path, "ROI track has " + fmt(track->shape[0]) + " frames but " +
                                         fmt(std::uint64_t{geo.times.size()}) + " times");
      }
    }
    src.roi = std::move(geo);
  }
  return src;
}

SignalSource get_source(const Container& c, std::string_view source_id) {
  Reporter out(Reporter::Mode::kReader);
  ReadContext ctx{c, out};
  return read_source(ctx, source_id);
}

std::vector<std::string> list_sources(const Container& c) {
  std::vector<std::string> ids;
  for (const auto& [id, kind] : build_index(c).sources) ids.push_back(id);
  return ids;
}

std::vector<SourceNode> source_tree(const Container& c) {
  ModelIndex index = build_index(c);
  std::map<std::string, std::vector<std::string>> children;
  std::vector<std::string> roots;
  for (const auto& [id, kind] : index.sources) {
    auto it = index.source_parents.find(id);
    if (it != index.source_parents.end() && index.has_source(it->second) && it->second != id) {
      children[it->second].push_back(id);
    } else {
      roots.push_back(id);
    }
  }
  std::set<std::string> placed;
  std::function<SourceNode(const std::string&)> build = [&](const std::string& id) {
    placed.insert(id);
    SourceNode node{id, index.sources.at(id).value_or(SourceKind::kElectrode), {}};
    for (const auto& ch : children[id]) {
      if (!placed.contains(ch)) node.children.push_back(build(ch));
    }
    return node;
  };
  std::vector<SourceNode> forest;
  for (const auto& r : roots) forest.push_back(build(r));
  return forest;
}

}  // namespace ephyspack
