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
#include <cmath>
#include <fstream>
#include <limits>

#include "ephyspack/ingest.h"
#include "ephyspack/model.h"
#include "model_internal.h"
#include "rewrite.h"

namespace ephyspack {
namespace {

using detail::DatasetContent;

constexpr const char* kRaw = "/data/raw";
constexpr const char* kTemp = "/data/temperature";
constexpr const char* kSpikes = "/data/spikes";
constexpr const char* kSorting = "/data/spikes/props/sorting";
constexpr const char* kStim = "/data/stimuli";
constexpr const char* kStack = "/data/imaging";
constexpr const char* kHist = "/data/spike_histogram";
constexpr const char* kRel1 = "/relations/derived/rel-000001";
constexpr const char* kGroup = "/relations/groups/session1";
constexpr const char* kRoi = "/sources/roi1";

using AttrFn = std::function<bool(AttrMap&)>;
using DataFn = std::function<bool(DatasetContent&)>;
using FinishFn = std::function<bool(Container&)>;
using ByteFn = std::function<bool(std::vector<char>&, const Container&)>;

// Edits collected by one mutation; each must find its target.
class Plan {
 public:
  void attrs(std::string path, AttrFn fn) { attr_edits_.push_back({std::move(path), std::move(fn), false}); }
  void set(std::string path, std::string key, AttrValue v) {
    attrs(std::move(path), [key = std::move(key), v = std::move(v)](AttrMap& a) {
      if (!a.contains(key)) return false;
      a[key] = v;
      return true;
    });
  }
  void erase(std::string path, std::string key) {
    attrs(std::move(path), [key = std::move(key)](AttrMap& a) { return a.erase(key) > 0; });
  }
  void data(std::string path, DataFn fn) { data_edits_.push_back({std::move(path), std::move(fn), false}); }
  void drop(std::string path) { drops_.push_back({std::move(path), false, false}); }
  void drop_children(std::string path) { drops_.push_back({std::move(path), true, false}); }
  void finish(FinishFn fn) { finish_ = std::move(fn); }
  void bytes(ByteFn fn) { bytes_ = std::move(fn); }

  // Returns false when some edit found no target.
  bool run(const std::filesystem::path& in, const std::filesystem::path& out) {
    if (bytes_) return run_bytes(in, out);
    bool finished = !finish_;
    detail::RewriteHooks hooks;
    hooks.keep = [&](const std::string& path) {
      for (auto& d : drops_) {
        const bool hit = d.children ? path.size() > d.path.size() && path.rfind(d.path + "/", 0) == 0
                                    : path == d.path;
        if (hit) {
          d.hit = true;
          return false;
        }
      }
      return true;
    };
    hooks.edit_attrs = [&](const std::string& path, AttrMap& a) {
      for (auto& e : attr_edits_) {
        if (e.path == path) e.hit = e.fn(a) || e.hit;
      }
    };
    hooks.edit_data = [&](const std::string& path, DatasetContent& d) {
      for (auto& e : data_edits_) {
        if (e.path == path) e.hit = e.fn(d) || e.hit;
      }
    };
    hooks.finish = [&](Container& c) { finished = finish_ ? finish_(c) : true; };
    detail::rewrite_container(in, out, hooks);
    return finished && std::all_of(attr_edits_.begin(), attr_edits_.end(), [](auto& e) { return e.hit; }) &&
           std::all_of(data_edits_.begin(), data_edits_.end(), [](auto& e) { return e.hit; }) &&
           std::all_of(drops_.begin(), drops_.end(), [](auto& d) { return d.hit; });
  }

 private:
  template <typename Fn>
  struct Edit {
    std::string path;
    Fn fn;
    bool hit;
  };
  struct Drop {
    std::string path;
    bool children;
    bool hit;
  };

  bool run_bytes(const std::filesystem::path& in, const std::filesystem::path& out) {
    std::vector<char> buf;
    {
      std::ifstream f(in, std::ios::binary);
      if (!f) throw Error(Errc::kIoFailure, "cannot read " + in.string(), in.string());
      buf.assign(std::istreambuf_iterator<char>(f), {});
    }
    bool ok;
    {
      const Container c = Container::open(in);
      ok = bytes_(buf, c);
    }
    if (!ok) return false;
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw Error(Errc::kIoFailure, "cannot write " + out.string(), out.string());
    return true;
  }

  std::vector<Edit<AttrFn>> attr_edits_;
  std::vector<Edit<DataFn>> data_edits_;
  std::vector<Drop> drops_;
  FinishFn finish_;
  ByteFn bytes_;
};

template <typename T>
std::vector<T>* vec(DatasetContent& d) {
  return std::get_if<std::vector<T>>(&d.data);
}

void resize_rows(DatasetContent& d, std::uint64_t rows) {
  const std::uint64_t row = d.shape.size() > 1 ? product(d.shape) / std::max<std::uint64_t>(d.shape[0], 1) : 1;
  std::visit([&](auto& v) { v.resize(rows * row); }, d.data);
  d.shape[0] = rows;
}

bool drop_last_row(DatasetContent& d) {
  if (d.shape.empty() || d.shape[0] == 0) return false;
  resize_rows(d, d.shape[0] - 1);
  return true;
}

DataFn swap_first_two() {
  return [](DatasetContent& d) {
    auto* v = vec<double>(d);
    if (!v || v->size() < 2 || (*v)[0] == (*v)[1]) return false;
    std::swap((*v)[0], (*v)[1]);
    return true;
  };
}

template <typename T>
DataFn set_first(T value) {
  return [value](DatasetContent& d) {
    auto* v = vec<T>(d);
    if (!v || v->empty()) return false;
    v->front() = value;
    return true;
  };
}

bool put_strings(Container& c, ObjectId parent, std::string_view name, std::vector<std::string> v) {
  detail::put_vector(c, parent, name, v);
  return true;
}

std::optional<ObjectId> group_at(const Container& c, std::string_view path) {
  auto id = c.try_resolve(path);
  if (id && c.kind(*id) == ObjectKind::kGroup) return id;
  return std::nullopt;
}

void add_square_roi(Container& c, ObjectId source) {
  ObjectId roi = c.create_group(source, "roi");
  detail::put_dataset(c, roi, "vertices", std::vector<double>{0, 0, 0, 1, 1, 1, 1, 0}, {4, 2});
}

void patch_u16(std::vector<char>& buf, std::size_t at, std::uint16_t v) {
  buf[at] = static_cast<char>(v & 0xff);
  buf[at + 1] = static_cast<char>(v >> 8);
}

struct Mutation {
  MutationInfo info;
  std::function<void(Plan&)> build;
};

const std::vector<Mutation>& registry() {
  static const std::vector<Mutation> all = [] {
    std::vector<Mutation> m;
    auto add = [&](std::string id, std::string rule, std::string description, std::function<void(Plan&)> fn) {
      m.push_back({{std::move(id), std::move(rule), std::move(description)}, std::move(fn)});
    };
    const double nan = std::numeric_limits<double>::quiet_NaN();

    // generic arrays
    add("array-empty-description", "A001", "blank the histogram description",
        [](Plan& p) { p.set(kHist, "description", std::string()); });
    add("array-empty-dim-description", "A002", "blank the first dimension description",
        [](Plan& p) { p.data(std::string(kHist) + "/dim_descriptions", set_first<std::string>("")); });
    add("array-heading-count", "A003", "add three headings to a ten-bin dimension", [](Plan& p) {
      p.finish([](Container& c) {
        auto h = group_at(c, kHist);
        if (!h || c.find_child(*h, "headings")) return false;
        return put_strings(c, c.create_group(*h, "headings"), "0", {"a", "b", "c"});
      });
    });
    add("array-negative-weight", "A004", "add a category with weight -1", [](Plan& p) {
      p.finish([](Container& c) {
        auto h = group_at(c, kHist);
        if (!h || c.find_child(*h, "categories")) return false;
        ObjectId cg = c.create_group(*h, "categories");
        put_strings(c, cg, "names", {"noise"});
        detail::put_vector(c, cg, "weights", std::vector<double>{-1.0});
        return true;
      });
    });
    add("array-dangling-reference", "A005", "point the histogram reference at a missing entity",
        [](Plan& p) { p.data(std::string(kHist) + "/references/paths", set_first<std::string>("/data/missing")); });

    // container bytes
    add("flip-magic", "C001", "invert the first magic byte", [](Plan& p) {
      p.bytes([](std::vector<char>& b, const Container&) {
        b[0] = static_cast<char>(~b[0]);
        return true;
      });
    });
    add("bump-major-version", "C002", "set the major version to 2", [](Plan& p) {
      p.bytes([](std::vector<char>& b, const Container&) {
        patch_u16(b, kSuperblockVersionOffset, 2);
        return true;
      });
    });
    add("flip-footer-byte", "C003", "flip a bit in the first footer section body", [](Plan& p) {
      p.bytes([](std::vector<char>& b, const Container& c) {
        const std::uint64_t at = c.superblock().footer_offset + 12;
        if (at >= b.size()) return false;
        b[at] = static_cast<char>(b[at] ^ 0x01);
        return true;
      });
    });
    add("truncate-footer", "C004", "cut the file at the footer offset", [](Plan& p) {
      p.bytes([](std::vector<char>& b, const Container& c) {
        b.resize(c.superblock().footer_offset);
        return true;
      });
    });
    add("flip-chunk-byte", "C005", "flip a bit in the first stored chunk payload", [](Plan& p) {
      p.bytes([](std::vector<char>& b, const Container& c) {
        for (const auto& r : c.chunk_records()) {
          if (r.payload_length == 0) continue;
          b[r.payload_offset] = static_cast<char>(b[r.payload_offset] ^ 0x01);
          return true;
        }
        return false;
      });
    });
    add("flip-uuid-byte", "C006", "flip a bit in the superblock UUID", [](Plan& p) {
      p.bytes([](std::vector<char>& b, const Container&) {
        b[kSuperblockUuidOffset] = static_cast<char>(b[kSuperblockUuidOffset] ^ 0x01);
        return true;
      });
    });

    // signal events
    add("events-unsorted", "E001", "swap the first two spike times",
        [](Plan& p) { p.data(std::string(kSpikes) + "/event_times", swap_first_two()); });
    add("event-outside-window", "E002", "push the last spike past the recording end", [](Plan& p) {
      p.data(std::string(kSpikes) + "/event_times", [](DatasetContent& d) {
        auto* v = vec<double>(d);
        if (!v || v->empty()) return false;
        v->back() += 1e6;
        return true;
      });
    });
    add("waveform-offsets", "E003", "break the final waveform offset", [](Plan& p) {
      p.data(std::string(kSorting) + "/waveforms/offsets", [](DatasetContent& d) {
        auto* v = vec<std::uint64_t>(d);
        if (!v || v->empty()) return false;
        v->back() += 1;
        return true;
      });
    });
    add("multi-unit-offsets", "E003", "break the final multi-unit offset", [](Plan& p) {
      p.data(std::string(kSorting) + "/units/offsets", [](DatasetContent& d) {
        auto* v = vec<std::uint64_t>(d);
        if (!v || v->empty()) return false;
        v->back() += 1;
        return true;
      });
    });
    add("scale-prob-row", "E004", "scale the first probability row by 0.9", [](Plan& p) {
      p.data(std::string(kSorting) + "/units/probs", [](DatasetContent& d) {
        auto* v = vec<double>(d);
        if (!v || d.shape.size() != 2 || d.shape[0] == 0) return false;
        for (std::uint64_t j = 0; j < d.shape[1]; ++j) (*v)[j] *= 0.9;
        return true;
      });
    });
    add("unit-source-not-neuron", "E005", "map the first unit to the amplifier",
        [](Plan& p) { p.data(std::string(kSorting) + "/unit_sources/source_id", set_first<std::string>("amp1")); });
    add("event-channel-dangling", "E006", "name a missing source as a per-event channel",
        [](Plan& p) { p.data(std::string(kSorting) + "/channels", set_first<std::string>("missing")); });
    add("drop-event-channels", "E007", "remove session and per-event channels", [](Plan& p) {
      p.data(std::string(kSpikes) + "/source_channels", [](DatasetContent& d) {
        resize_rows(d, 0);
        return true;
      });
      p.drop(std::string(kSorting) + "/channels");
      p.drop(std::string(kSorting) + "/channel_offsets");
    });
    add("unit-table-short", "E008", "drop the last exclusive unit assignment",
        [](Plan& p) { p.data(std::string(kSorting) + "/units/unit_of", drop_last_row); });
    add("prob-table-short", "E008", "drop the last probability row",
        [](Plan& p) { p.data(std::string(kSorting) + "/units/probs", drop_last_row); });
    add("empty-trigger-type", "E009", "blank the session trigger type",
        [](Plan& p) { p.set(kSpikes, "trigger.type", std::string()); });
    add("waveform-zero-rate", "E010", "set the waveform rate to zero",
        [](Plan& p) { p.set(std::string(kSorting) + "/waveforms", "rate_hz", 0.0); });
    add("feature-heading-extra", "E011", "append a feature heading", [](Plan& p) {
      p.data(std::string(kSorting) + "/features/headings", [](DatasetContent& d) {
        auto* v = vec<std::string>(d);
        if (!v) return false;
        v->push_back("extra");
        d.shape[0] = v->size();
        return true;
      });
    });
    add("template-zero-rate", "E012", "set the template rate to zero",
        [](Plan& p) { p.set(std::string(kSpikes) + "/templates", "rate_hz", 0.0); });
    add("events-negative-duration", "E013", "make the spike recording duration negative",
        [](Plan& p) { p.set(kSpikes, "duration", -1.0); });

    // global metadata
    add("drop-global", "G001", "remove the global metadata group", [](Plan& p) { p.drop("/global"); });
    add("drop-uuid-attr", "G002", "remove the file_uuid attribute", [](Plan& p) { p.erase("/global", "file_uuid"); });
    add("uuid-mismatch", "G003", "store a different UUID in the metadata", [](Plan& p) {
      p.attrs("/global", [](AttrMap& a) {
        auto* s = a.contains("file_uuid") ? std::get_if<std::string>(&a["file_uuid"]) : nullptr;
        if (!s) return false;
        auto other = Uuid::from_bits_v4(0x0123456789abcdefULL, 0xfedcba9876543210ULL).to_string();
        *s = other == *s ? Uuid::from_bits_v4(1, 2).to_string() : other;
        return true;
      });
    });
    add("version-mismatch", "G004", "store format_minor 7",
        [](Plan& p) { p.set("/global", "format_minor", std::uint64_t{7}); });
    add("session-start-no-offset", "G005", "drop the zone offset from session_start",
        [](Plan& p) { p.set("/global", "session_start", std::string("2026-01-05T09:30:00")); });
    add("identification-not-string", "G006", "store a number as identification", [](Plan& p) {
      p.attrs("/", [](AttrMap& a) {
        a["id.lab"] = 3.0;
        return true;
      });
    });

    // image stacks
    add("dim-semantics-short", "I001", "drop the last dimension semantic", [](Plan& p) {
      p.attrs(kStack, [](AttrMap& a) {
        auto* v = a.contains("dim_semantics") ? std::get_if<std::vector<std::string>>(&a["dim_semantics"]) : nullptr;
        if (!v || v->empty()) return false;
        v->pop_back();
        return true;
      });
    });
    add("no-time-dimension", "I002", "relabel the time dimension as z", [](Plan& p) {
      p.attrs(kStack, [](AttrMap& a) {
        auto* v = a.contains("dim_semantics") ? std::get_if<std::vector<std::string>>(&a["dim_semantics"]) : nullptr;
        if (!v) return false;
        auto it = std::find(v->begin(), v->end(), "time");
        if (it == v->end()) return false;
        *it = "z";
        return true;
      });
    });
    add("frame-times-short", "I003", "drop the last frame time",
        [](Plan& p) { p.data(std::string(kStack) + "/frame_times", drop_last_row); });
    add("frame-times-unordered", "I004", "swap the first two frame times",
        [](Plan& p) { p.data(std::string(kStack) + "/frame_times", swap_first_two()); });
    add("empty-pixel-unit", "I005", "blank the pixel unit", [](Plan& p) { p.set(kStack, "pixel_unit", std::string()); });
    add("negative-pixel-pitch", "I006", "make the pixel pitch negative", [](Plan& p) { p.set(kStack, "dy", -1.0); });
    add("unknown-dim-semantic", "I007", "rename a dimension to an unknown semantic", [](Plan& p) {
      p.attrs(kStack, [](AttrMap& a) {
        auto* v = a.contains("dim_semantics") ? std::get_if<std::vector<std::string>>(&a["dim_semantics"]) : nullptr;
        if (!v || v->empty()) return false;
        v->back() = "wavelength";
        return true;
      });
    });
    add("stack-source-dangling", "I008", "name a missing source for the stack",
        [](Plan& p) { p.data(std::string(kStack) + "/sources", set_first<std::string>("missing")); });
    add("stack-negative-duration", "I009", "make the stack duration negative",
        [](Plan& p) { p.set(kStack, "duration", -1.0); });

    // layout
    add("drop-groups-group", "L001", "remove /relations/groups", [](Plan& p) { p.drop("/relations/groups"); });
    add("extra-top-level", "L002", "add an unexpected top-level group", [](Plan& p) {
      p.finish([](Container& c) {
        c.create_group(kRootId, "scratch");
        return true;
      });
    });
    add("drop-entity-kind", "L003", "remove entity_kind from the stimuli", [](Plan& p) { p.erase(kStim, "entity_kind"); });
    add("drop-start-time", "L004", "remove start_time from the raw series", [](Plan& p) { p.erase(kRaw, "start_time"); });
    add("drop-values", "L005", "remove the raw sample values", [](Plan& p) { p.drop(std::string(kRaw) + "/values"); });
    add("drop-all-entities", "L006", "remove every entity and relationship", [](Plan& p) {
      p.drop_children("/data");
      p.drop_children("/relations/derived");
      p.drop_children("/relations/groups");
    });

    // relationships
    add("derivation-dangling-input", "R001", "point a derivation input at a missing entity",
        [](Plan& p) { p.data(std::string(kRel1) + "/inputs", set_first<std::string>("/data/missing")); });
    add("derivation-cycle", "R002", "close the derivation chain into a loop", [](Plan& p) {
      p.finish([](Container& c) {
        auto derived = group_at(c, "/relations/derived");
        if (!derived || !c.try_resolve(kRaw) || !c.try_resolve(kHist) || c.find_child(*derived, "rel-999999")) {
          return false;
        }
        ObjectId r = c.create_group(*derived, "rel-999999");
        c.set_attribute(r, "activity", std::string("feedback"));
        c.set_attribute(r, "timestamp", std::string("2026-01-05T12:00:00Z"));
        put_strings(c, r, "inputs", {kHist});
        put_strings(c, r, "outputs", {kRaw});
        put_strings(c, r, "agents", {"mutator"});
        return true;
      });
    });
    add("derivation-no-agents", "R003", "remove every agent", [](Plan& p) {
      p.data(std::string(kRel1) + "/agents", [](DatasetContent& d) {
        resize_rows(d, 0);
        return true;
      });
    });
    add("derivation-empty-activity", "R004", "blank the activity", [](Plan& p) { p.set(kRel1, "activity", std::string()); });
    add("derivation-no-inputs", "R005", "remove every input", [](Plan& p) {
      p.data(std::string(kRel1) + "/inputs", [](DatasetContent& d) {
        resize_rows(d, 0);
        return true;
      });
    });
    add("grouping-duplicate-member", "R006", "repeat the first member", [](Plan& p) {
      p.data(std::string(kGroup) + "/members", [](DatasetContent& d) {
        auto* v = vec<std::string>(d);
        if (!v || v->empty()) return false;
        v->push_back(v->front());
        d.shape[0] = v->size();
        return true;
      });
    });
    add("grouping-dangling-member", "R007", "replace the first member with a missing path",
        [](Plan& p) { p.data(std::string(kGroup) + "/members", set_first<std::string>("/data/missing")); });
    add("override-non-member", "R008", "attach an override to a non-member", [](Plan& p) {
      p.finish([](Container& c) {
        auto ov = group_at(c, std::string(kGroup) + "/overrides");
        if (!ov) return false;
        for (const auto& e : c.list_children(*ov)) {
          c.set_attribute(e.id, "member", std::string("/data/missing"));
          return true;
        }
        return false;
      });
    });
    add("derivation-bad-timestamp", "R009", "replace the timestamp with free text",
        [](Plan& p) { p.set(kRel1, "timestamp", std::string("last tuesday")); });

    // sources
    add("source-unknown-kind", "S001", "give the amplifier an unknown kind",
        [](Plan& p) { p.set("/sources/amp1", "kind", std::string("Toaster")); });
    add("source-dangling-parent", "S002", "point the array at a missing parent",
        [](Plan& p) { p.set("/sources/tt1", "parent", std::string("missing")); });
    add("source-parent-cycle", "S003", "make the subject a child of its region", [](Plan& p) {
      p.attrs("/sources/subj1", [](AttrMap& a) {
        a["parent"] = std::string("ca1");
        return true;
      });
    });
    add("roi-on-electrode", "S004", "attach an ROI outline to an electrode", [](Plan& p) {
      p.finish([](Container& c) {
        auto e = group_at(c, "/sources/tt1e1");
        if (!e || c.find_child(*e, "roi")) return false;
        add_square_roi(c, *e);
        return true;
      });
    });
    add("roi-times-unordered", "S005", "swap the first two ROI track times",
        [](Plan& p) { p.data(std::string(kRoi) + "/roi/times", swap_first_two()); });
    add("add-roi-source", "S006", "add an ROI source", [](Plan& p) {
      p.finish([](Container& c) {
        auto s = group_at(c, "/sources");
        if (!s || c.find_child(*s, "roi_extra")) return false;
        ObjectId r = c.create_group(*s, "roi_extra");
        c.set_attribute(r, "kind", std::string("ROI"));
        add_square_roi(c, r);
        return true;
      });
    });
    add("position-not-finite", "S007", "store a NaN electrode coordinate", [nan](Plan& p) {
      p.attrs("/sources/tt1e1", [nan](AttrMap& a) {
        auto* v = a.contains("position") ? std::get_if<std::vector<double>>(&a["position"]) : nullptr;
        if (!v || v->empty()) return false;
        (*v)[0] = nan;
        return true;
      });
    });
    add("roi-two-vertices", "S008", "cut the ROI outline to two vertices", [](Plan& p) {
      p.data(std::string(kRoi) + "/roi/vertices", [](DatasetContent& d) {
        if (d.shape.size() != 2 || d.shape[0] < 3) return false;
        resize_rows(d, 2);
        return true;
      });
    });

    // time series
    add("empty-unit", "T001", "blank the raw series unit", [](Plan& p) { p.set(kRaw, "unit", std::string()); });
    add("timestamps-unordered", "T002", "swap the first two timestamps",
        [](Plan& p) { p.data(std::string(kTemp) + "/timestamps", swap_first_two()); });
    add("timestamp-outside-window", "T003", "push the last timestamp past the window end", [](Plan& p) {
      p.data(std::string(kTemp) + "/timestamps", [](DatasetContent& d) {
        auto* v = vec<double>(d);
        if (!v || v->empty()) return false;
        v->back() += 1e6;
        return true;
      });
    });
    add("timestamps-short", "T004", "drop the last timestamp",
        [](Plan& p) { p.data(std::string(kTemp) + "/timestamps", drop_last_row); });
    add("zero-rate", "T005", "set the raw sampling rate to zero", [](Plan& p) { p.set(kRaw, "rate_hz", 0.0); });
    add("sync-marker-out-of-range", "T006", "move a sync marker past the last sample", [](Plan& p) {
      p.data(std::string(kRaw) + "/sync_index", [](DatasetContent& d) {
        auto* v = vec<std::uint64_t>(d);
        if (!v) return false;
        v->assign(1, std::numeric_limits<std::uint32_t>::max());
        d.shape = {1};
        return true;
      });
      p.data(std::string(kRaw) + "/sync_time", [](DatasetContent& d) {
        auto* v = vec<double>(d);
        if (!v) return false;
        v->assign(1, 1e9);
        d.shape = {1};
        return true;
      });
    });
    add("sources-short", "T007", "drop the last raw series source",
        [](Plan& p) { p.data(std::string(kRaw) + "/sources", drop_last_row); });
    add("source-dangling", "T008", "name a missing source for the raw series",
        [](Plan& p) { p.data(std::string(kRaw) + "/sources", set_first<std::string>("missing")); });
    add("duration-mismatch", "T009", "remove sync markers and double the duration", [](Plan& p) {
      p.data(std::string(kRaw) + "/sync_index", [](DatasetContent& d) {
        resize_rows(d, 0);
        return true;
      });
      p.data(std::string(kRaw) + "/sync_time", [](DatasetContent& d) {
        resize_rows(d, 0);
        return true;
      });
      p.attrs(kRaw, [](AttrMap& a) {
        auto* v = a.contains("duration") ? std::get_if<double>(&a["duration"]) : nullptr;
        if (!v) return false;
        *v = 2 * *v + 1;
        return true;
      });
    });
    add("units-count", "T010", "store one more per-channel unit than channels", [](Plan& p) {
      p.erase(kRaw, "unit");
      p.finish([](Container& c) {
        auto raw = group_at(c, kRaw);
        auto values = raw ? c.find_child(*raw, "values") : std::nullopt;
        if (!values) return false;
        const auto channels = c.dataset_info(*values).shape.at(1);
        put_strings(c, *raw, "units", std::vector<std::string>(channels + 1, "uV"));
        return true;
      });
    });
    add("series-negative-duration", "T011", "make the temperature duration negative",
        [](Plan& p) { p.set(kTemp, "duration", -1.0); });
    add("empty-label", "T012", "blank the raw series label", [](Plan& p) { p.set(kRaw, "label", std::string()); });

    // experimental events
    add("stim-unsorted", "X001", "swap the first two stimulus times",
        [](Plan& p) { p.data(std::string(kStim) + "/event_times", swap_first_two()); });
    add("stim-outside-window", "X002", "end the monitoring window at its start", [](Plan& p) {
      p.attrs(kStim, [](AttrMap& a) {
        if (!a.contains("monitor_start") || !a.contains("monitor_end")) return false;
        a["monitor_end"] = a["monitor_start"];
        return true;
      });
    });
    add("stim-inverted-window", "X003", "start the monitoring window after its end", [](Plan& p) {
      p.attrs(kStim, [](AttrMap& a) {
        auto* end = a.contains("monitor_end") ? std::get_if<double>(&a["monitor_end"]) : nullptr;
        if (!end) return false;
        a["monitor_start"] = *end + 1.0;
        return true;
      });
    });
    add("stim-property-short", "X004", "drop the last intensity value",
        [](Plan& p) { p.data(std::string(kStim) + "/props/intensity/values", drop_last_row); });
    add("stim-empty-description", "X005", "blank the stimulus description",
        [](Plan& p) { p.set(kStim, "description", std::string()); });

    std::sort(m.begin(), m.end(), [](const Mutation& a, const Mutation& b) { return a.info.id < b.info.id; });
    return m;
  }();
  return all;
}

}  // namespace

const std::vector<MutationInfo>& mutation_catalog() {
  static const std::vector<MutationInfo> infos = [] {
    std::vector<MutationInfo> out;
    for (const auto& m : registry()) out.push_back(m.info);
    return out;
  }();
  return infos;
}

void mutate_for_test(const std::filesystem::path& in_path, std::string_view mutation_id,
                     const std::filesystem::path& out_path) {
  const auto& all = registry();
  auto it = std::lower_bound(all.begin(), all.end(), mutation_id,
                             [](const Mutation& m, std::string_view id) { return m.info.id < id; });
  if (it == all.end() || it->info.id != mutation_id) {
    throw Error(Errc::kUnknownMutation, "unknown mutation '" + std::string(mutation_id) + "'");
  }
  if (std::filesystem::exists(out_path)) {
    throw Error(Errc::kPathExists, out_path.string() + " already exists", out_path.string());
  }
  Plan plan;
  it->build(plan);
  bool applied = false;
  try {
    applied = plan.run(in_path, out_path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(out_path, ec);
    throw;
  }
  if (!applied) {
    std::error_code ec;
    std::filesystem::remove(out_path, ec);
    throw Error(Errc::kMutationNotApplicable,
                "mutation '" + it->info.id + "' finds no target in " + in_path.string(), in_path.string());
  }
}

}  // namespace ephyspack
