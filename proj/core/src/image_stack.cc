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

#include "model_internal.h"

namespace ephyspack {

using namespace detail;

namespace {

constexpr std::pair<DimSemantic, std::string_view> kDims[] = {
    {DimSemantic::kTime, "time"}, {DimSemantic::kY, "y"},         {DimSemantic::kX, "x"},
    {DimSemantic::kZ, "z"},       {DimSemantic::kPlane, "plane"}, {DimSemantic::kChannel, "channel"},
};

std::optional<std::uint64_t> extent_of(const ImageStack& st, DimSemantic dim) {
  if (st.dims.size() != st.pixels.rank()) return std::nullopt;
  for (std::size_t d = 0; d < st.dims.size(); ++d) {
    if (st.dims[d] == dim) return st.pixels.shape[d];
  }
  return std::nullopt;
}

}  // namespace

std::string_view dim_semantic_name(DimSemantic dim) {
  for (const auto& [d, n] : kDims) {
    if (d == dim) return n;
  }
  return "?";
}

std::optional<DimSemantic> parse_dim_semantic(std::string_view name) {
  for (const auto& [d, n] : kDims) {
    if (n == name) return d;
  }
  return std::nullopt;
}

void check_image_stack(const ImageStack& st, const ModelIndex& index, const std::string& path,
                       Reporter& out) {
  if (!finite(st.start_time)) out.report("I009", path, "start_time is not finite");
  if (!finite(st.duration) || st.duration < 0) {
    out.report("I009", path, "duration " + fmt(st.duration) + " is negative or not finite");
  }
  if (!is_numeric(st.pixels.dtype())) out.report("L005", path + "/pixels", "pixels must be numeric");
  if (st.pixels.rank() != 3 && st.pixels.rank() != 4) {
    out.report("I007", path, "pixels have rank " + std::to_string(st.pixels.rank()) +
                                 ", expected 3 or 4");
  }
  if (st.dims.size() != st.pixels.rank()) {
    out.report("I001", path, std::to_string(st.dims.size()) + " dimension labels for rank " +
                                 std::to_string(st.pixels.rank()));
  }
  auto time_dims = std::count(st.dims.begin(), st.dims.end(), DimSemantic::kTime);
  if (time_dims != 1) {
    out.report("I002", path, std::to_string(time_dims) + " dimensions are labelled time");
  } else if (auto t = extent_of(st, DimSemantic::kTime); t && *t != st.frame_times.size()) {
    out.report("I003", path, std::to_string(st.frame_times.size()) + " frame times for " +
                                 fmt(*t) + " frames");
  }
  for (std::size_t k = 0; k < st.frame_times.size(); ++k) {
    if (!finite(st.frame_times[k]) || (k > 0 && !(st.frame_times[k] > st.frame_times[k - 1]))) {
      out.report("I004", path, "frame times not strictly increasing at " + std::to_string(k),
                 detail_index(k));
      break;
    }
  }
  if (st.pixel_unit.empty()) out.report("I005", path, "pixel unit is empty");
  if (const auto* rect = std::get_if<RectangularGeometry>(&st.geometry)) {
    if (!finite(rect->dy) || !finite(rect->dx) || rect->dy <= 0 || rect->dx <= 0 ||
        !finite(rect->origin[0]) || !finite(rect->origin[1])) {
      out.report("I006", path, "rectangular pitch must be positive and finite");
    }
  } else {
    const auto& coords = std::get<ExplicitGeometry>(st.geometry).coords;
    auto h = extent_of(st, DimSemantic::kY);
    auto w = extent_of(st, DimSemantic::kX);
    if (!h || !w) {
      out.report("I006", path, "explicit pixel coordinates need y and x dimensions");
    } else if (coords.size() != *h * *w * 2) {
      out.report("I006", path, "explicit coordinates hold " + std::to_string(coords.size()) +
                                   " values, expected " + fmt(*h) + " x " + fmt(*w) + " x 2");
    }
    if (!std::all_of(coords.begin(), coords.end(), [](double v) { return finite(v); })) {
      out.report("I006", path, "explicit pixel coordinate is not finite");
    }
  }
  for (const auto& s : st.sources) {
    if (!index.has_source(s)) {
      out.report("I008", path, "source '" + s + "' does not exist", AttrMap{{"source", s}});
    }
  }
}

std::string write_image_stack(Container& c, const ImageStack& st) {
  const std::string path = entity_path(st.name);
  Reporter out(Reporter::Mode::kWriter);
  check_image_stack(st, build_index(c), path, out);
  return transactional(c, [&] {
    ObjectId id = group_for_new_entity(c, st.name, entity_kind_name(EntityKind::kImageStack));
    c.set_attribute(id, "label", st.label);
    c.set_attribute(id, "start_time", st.start_time);
    c.set_attribute(id, "duration", st.duration);
    c.set_attribute(id, "pixel_unit", st.pixel_unit);
    std::vector<std::string> dims;
    for (auto d : st.dims) dims.emplace_back(dim_semantic_name(d));
    c.set_attribute(id, "dim_semantics", dims);
    put_tensor(c, id, "pixels", st.pixels);
    put_vector(c, id, "frame_times", st.frame_times);
    if (const auto* rect = std::get_if<RectangularGeometry>(&st.geometry)) {
      c.set_attribute(id, "geometry", std::string("rectangular"));
      c.set_attribute(id, "dy", rect->dy);
      c.set_attribute(id, "dx", rect->dx);
      c.set_attribute(id, "origin", std::vector<double>{rect->origin[0], rect->origin[1]});
    } else {
      c.set_attribute(id, "geometry", std::string("explicit"));
      auto h = *extent_of(st, DimSemantic::kY);
      auto w = *extent_of(st, DimSemantic::kX);
      put_dataset(c, id, "pixel_coords", std::get<ExplicitGeometry>(st.geometry).coords, {h, w, 2});
    }
    if (!st.sources.empty()) put_vector(c, id, "sources", st.sources);
    return path;
  });
}

ImageStack read_image_stack(ReadContext& ctx, std::string_view path_view) {
  const std::string path(path_view);
  ObjectId id = open_entity(ctx, path, EntityKind::kImageStack);
  ImageStack st;
  st.name = split_path(path).back();
  st.label = req_attr<std::string>(ctx, id, "label");
  st.start_time = req_attr<double>(ctx, id, "start_time");
  st.duration = req_attr<double>(ctx, id, "duration");
  st.pixel_unit = req_attr<std::string>(ctx, id, "pixel_unit");
  for (const auto& name : req_attr<std::vector<std::string>>(ctx, id, "dim_semantics")) {
    auto d = parse_dim_semantic(name);
    if (!d) ctx.out.fatal("I007", path, "unknown dimension semantic '" + name + "'");
    st.dims.push_back(*d);
  }
  st.pixels = req_dataset(ctx, id, "pixels", any_numeric, -1);
  Tensor frames = req_dataset(ctx, id, "frame_times", is_f64, 1);
  st.frame_times = std::get<std::vector<double>>(std::move(frames.data));
  auto geometry = req_attr<std::string>(ctx, id, "geometry");
  if (geometry == "rectangular") {
    RectangularGeometry rect;
    rect.dy = req_attr<double>(ctx, id, "dy");
    rect.dx = req_attr<double>(ctx, id, "dx");
    auto origin = req_attr<std::vector<double>>(ctx, id, "origin");
    if (origin.size() != 2) ctx.out.fatal("I006", path, "origin must be an f64 pair");
    rect.origin = {origin[0], origin[1]};
    st.geometry = rect;
  } else if (geometry == "explicit") {
    Tensor coords = req_dataset(ctx, id, "pixel_coords", is_f64, 3);
    if (coords.shape[2] != 2) ctx.out.report("I006", path, "pixel_coords must be H x W x 2");
    st.geometry = ExplicitGeometry{std::get<std::vector<double>>(std::move(coords.data))};
  } else {
    ctx.out.fatal("L004", path, "geometry must be 'rectangular' or 'explicit'");
  }
  if (auto s = opt_vector<std::string>(ctx, id, "sources")) st.sources = std::move(*s);
  return st;
}

ImageStack read_image_stack(const Container& c, std::string_view path) {
  Reporter out(Reporter::Mode::kReader);
  ReadContext ctx{c, out};
  return read_image_stack(ctx, path);
}

}  // namespace ephyspack
