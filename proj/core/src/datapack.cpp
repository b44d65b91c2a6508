#include "rankqa/datapack.hpp"

#include <algorithm>
#include <atomic>

#include <nlohmann/json.hpp>

#include "rankqa/text.hpp"

namespace rankqa {

using nlohmann::json;

namespace {

std::atomic<PackId> g_next_pack_id{1};

json attrs_to_json(const AttrMap& attrs) {
  json out = json::object();
  for (const auto& [key, value] : attrs) {
    if (std::holds_alternative<double>(value)) {
      out[key] = std::get<double>(value);
    } else {
      out[key] = std::get<std::string>(value);
    }
  }
  return out;
}

AttrMap attrs_from_json(const json& j) {
  AttrMap attrs;
  for (const auto& [key, value] : j.items()) {
    if (value.is_number()) {
      attrs[key] = value.get<double>();
    } else if (value.is_string()) {
      attrs[key] = value.get<std::string>();
    } else {
      throw MalformedPack("attribute '" + key + "' is neither number nor string");
    }
  }
  return attrs;
}

const json& require(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw MalformedPack(std::string("missing field '") + field + "'");
  return *it;
}

}  // namespace

DataPack::DataPack() : DataPack(std::string()) {}

DataPack::DataPack(std::string text)
    : pack_id_(g_next_pack_id.fetch_add(1)),
      text_(std::move(text)),
      length_(utf8_length(text_)) {}

AnnotationId DataPack::add_span(std::string kind, std::size_t begin, std::size_t end,
                                AttrMap attributes) {
  if (kind.empty()) throw OutOfBounds("span kind must be non-empty");
  if (begin > end || end > length_) {
    throw OutOfBounds("span [" + std::to_string(begin) + "," + std::to_string(end) +
                      ") outside text of length " + std::to_string(length_));
  }
  const AnnotationId id = take_id();
  spans_.push_back({id, std::move(kind), begin, end, std::move(attributes)});
  return id;
}

AnnotationId DataPack::add_link(std::string kind, AnnotationId parent, AnnotationId child) {
  if (!has_annotation(parent) || !has_annotation(child)) {
    throw UnresolvedReference("link endpoint does not resolve in pack " +
                              std::to_string(pack_id_));
  }
  const AnnotationId id = take_id();
  links_.push_back({id, std::move(kind), parent, child});
  return id;
}

AnnotationId DataPack::add_group(std::string kind, std::vector<AnnotationId> members) {
  if (members.empty()) throw UnresolvedReference("group members must be non-empty");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (AnnotationId m : members) {
    if (!has_annotation(m)) {
      throw UnresolvedReference("group member " + std::to_string(m) + " does not resolve");
    }
  }
  const AnnotationId id = take_id();
  groups_.push_back({id, std::move(kind), std::move(members)});
  return id;
}

std::vector<SpanAnnotation> DataPack::get_spans(
    std::string_view kind, std::optional<std::pair<std::size_t, std::size_t>> range) const {
  std::vector<SpanAnnotation> out;
  for (const auto& span : spans_) {
    if (span.kind != kind) continue;
    if (range) {
      const auto [rb, re] = *range;
      const bool overlaps = span.begin < re && span.end > rb;
      const bool empty_inside = span.begin == span.end && span.begin >= rb && span.begin < re;
      if (!overlaps && !empty_inside) continue;
    }
    out.push_back(span);
  }
  std::sort(out.begin(), out.end(), [](const SpanAnnotation& a, const SpanAnnotation& b) {
    return std::tie(a.begin, a.end, a.id) < std::tie(b.begin, b.end, b.id);
  });
  return out;
}

std::string DataPack::covered_text(AnnotationId id) const {
  for (const auto& span : spans_) {
    if (span.id == id) return utf8_substr(text_, span.begin, span.end);
  }
  throw UnresolvedReference("no span with id " + std::to_string(id));
}

bool DataPack::has_annotation(AnnotationId id) const {
  auto by_id = [id](const auto& a) { return a.id == id; };
  return std::any_of(spans_.begin(), spans_.end(), by_id) ||
         std::any_of(links_.begin(), links_.end(), by_id) ||
         std::any_of(groups_.begin(), groups_.end(), by_id);
}

void DataPack::set_metadata(std::string key, std::string value) {
  metadata_[std::move(key)] = std::move(value);
}

std::optional<std::string> DataPack::get_metadata(std::string_view key) const {
  auto it = metadata_.find(std::string(key));
  if (it == metadata_.end()) return std::nullopt;
  return it->second;
}

namespace {

json pack_to_json(const DataPack& pack) {
  json j;
  j["pack_id"] = pack.pack_id();
  j["text"] = pack.text();
  json anns = json::array();
  for (const auto& s : pack.spans()) {
    anns.push_back({{"id", s.id},
                    {"kind", s.kind},
                    {"begin", s.begin},
                    {"end", s.end},
                    {"attributes", attrs_to_json(s.attributes)}});
  }
  j["annotations"] = std::move(anns);
  json links = json::array();
  for (const auto& l : pack.links()) {
    links.push_back({{"id", l.id}, {"kind", l.kind}, {"parent", l.parent}, {"child", l.child}});
  }
  j["links"] = std::move(links);
  json groups = json::array();
  for (const auto& g : pack.groups()) {
    groups.push_back({{"id", g.id}, {"kind", g.kind}, {"members", g.members}});
  }
  j["groups"] = std::move(groups);
  j["metadata"] = pack.metadata();
  return j;
}

}  // namespace

std::string DataPack::serialize() const { return pack_to_json(*this).dump(); }

DataPack DataPack::deserialize(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw MalformedPack(std::string("invalid pack document: ") + e.what());
  }
  if (!j.is_object()) throw MalformedPack("pack document must be an object");
  try {
    DataPack pack(require(j, "text").get<std::string>());
    pack.pack_id_ = require(j, "pack_id").get<PackId>();
    AnnotationId max_id = 0;
    for (const auto& a : require(j, "annotations")) {
      SpanAnnotation s;
      s.id = require(a, "id").get<AnnotationId>();
      s.kind = require(a, "kind").get<std::string>();
      s.begin = require(a, "begin").get<std::size_t>();
      s.end = require(a, "end").get<std::size_t>();
      s.attributes = attrs_from_json(require(a, "attributes"));
      if (s.kind.empty() || s.begin > s.end || s.end > pack.length_) {
        throw MalformedPack("annotation " + std::to_string(s.id) + " violates span invariant");
      }
      if (pack.has_annotation(s.id)) {
        throw MalformedPack("duplicate annotation id " + std::to_string(s.id));
      }
      max_id = std::max(max_id, s.id);
      pack.spans_.push_back(std::move(s));
    }
    for (const auto& l : require(j, "links")) {
      LinkAnnotation link;
      link.id = require(l, "id").get<AnnotationId>();
      link.kind = require(l, "kind").get<std::string>();
      link.parent = require(l, "parent").get<AnnotationId>();
      link.child = require(l, "child").get<AnnotationId>();
      if (pack.has_annotation(link.id)) {
        throw MalformedPack("duplicate annotation id " + std::to_string(link.id));
      }
      max_id = std::max(max_id, link.id);
      pack.links_.push_back(std::move(link));
    }
    for (const auto& g : require(j, "groups")) {
      GroupAnnotation group;
      group.id = require(g, "id").get<AnnotationId>();
      group.kind = require(g, "kind").get<std::string>();
      group.members = require(g, "members").get<std::vector<AnnotationId>>();
      if (group.members.empty()) throw MalformedPack("group with no members");
      if (pack.has_annotation(group.id)) {
        throw MalformedPack("duplicate annotation id " + std::to_string(group.id));
      }
      max_id = std::max(max_id, group.id);
      pack.groups_.push_back(std::move(group));
    }
    // link/group endpoints must resolve now that everything is loaded
    for (const auto& l : pack.links_) {
      if (!pack.has_annotation(l.parent) || !pack.has_annotation(l.child)) {
        throw MalformedPack("link " + std::to_string(l.id) + " endpoint does not resolve");
      }
    }
    for (const auto& g : pack.groups_) {
      for (AnnotationId m : g.members) {
        if (!pack.has_annotation(m)) {
          throw MalformedPack("group " + std::to_string(g.id) + " member does not resolve");
        }
      }
    }
    pack.metadata_ = require(j, "metadata").get<std::map<std::string, std::string>>();
    pack.next_id_ = max_id + 1;
    return pack;
  } catch (const json::exception& e) {
    throw MalformedPack(std::string("invalid pack document: ") + e.what());
  }
}

bool DataPack::operator==(const DataPack& other) const {
  return pack_id_ == other.pack_id_ && text_ == other.text_ && spans_ == other.spans_ &&
         links_ == other.links_ && groups_ == other.groups_ && metadata_ == other.metadata_;
}

DataPack& MultiPack::add_pack(std::string name, DataPack pack) {
  if (packs_.count(name) > 0) {
    throw UnresolvedReference("duplicate pack name '" + name + "'");
  }
  order_.push_back(name);
  auto [it, inserted] = packs_.emplace(std::move(name), std::move(pack));
  return it->second;
}

DataPack& MultiPack::pack(std::string_view name) {
  auto it = packs_.find(std::string(name));
  if (it == packs_.end()) throw UnresolvedReference("no pack named '" + std::string(name) + "'");
  return it->second;
}

const DataPack& MultiPack::pack(std::string_view name) const {
  auto it = packs_.find(std::string(name));
  if (it == packs_.end()) throw UnresolvedReference("no pack named '" + std::string(name) + "'");
  return it->second;
}

bool MultiPack::has_pack(std::string_view name) const {
  return packs_.count(std::string(name)) > 0;
}

void MultiPack::check_ref(const PackRef& ref) const {
  auto it = packs_.find(ref.pack);
  if (it == packs_.end() || !it->second.has_annotation(ref.annotation)) {
    throw UnresolvedReference("cross-link endpoint (" + ref.pack + ", " +
                              std::to_string(ref.annotation) + ") does not resolve");
  }
}

AnnotationId MultiPack::add_cross_link(std::string kind, PackRef parent, PackRef child) {
  check_ref(parent);
  check_ref(child);
  const AnnotationId id = next_link_id_++;
  cross_links_.push_back({id, std::move(kind), std::move(parent), std::move(child)});
  return id;
}

std::string MultiPack::serialize() const {
  json j;
  json packs = json::object();
  for (const auto& name : order_) {
    packs[name] = pack_to_json(packs_.at(name));
  }
  j["packs"] = std::move(packs);
  j["pack_order"] = order_;
  json links = json::array();
  for (const auto& l : cross_links_) {
    links.push_back({{"id", l.id},
                     {"kind", l.kind},
                     {"parent", {{"pack", l.parent.pack}, {"annotation", l.parent.annotation}}},
                     {"child", {{"pack", l.child.pack}, {"annotation", l.child.annotation}}}});
  }
  j["cross_links"] = std::move(links);
  return j.dump();
}

MultiPack MultiPack::deserialize(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw MalformedPack(std::string("invalid multipack document: ") + e.what());
  }
  try {
    MultiPack mp;
    const auto& packs = require(j, "packs");
    for (const auto& name : require(j, "pack_order")) {
      const std::string pack_name = name.get<std::string>();
      mp.add_pack(pack_name, DataPack::deserialize(packs.at(pack_name).dump()));
    }
    AnnotationId max_id = 0;
    for (const auto& l : require(j, "cross_links")) {
      CrossLink link;
      link.id = require(l, "id").get<AnnotationId>();
      link.kind = require(l, "kind").get<std::string>();
      link.parent = {require(require(l, "parent"), "pack").get<std::string>(),
                     require(require(l, "parent"), "annotation").get<AnnotationId>()};
      link.child = {require(require(l, "child"), "pack").get<std::string>(),
                    require(require(l, "child"), "annotation").get<AnnotationId>()};
      mp.check_ref(link.parent);
      mp.check_ref(link.child);
      max_id = std::max(max_id, link.id);
      mp.cross_links_.push_back(std::move(link));
    }
    mp.next_link_id_ = max_id + 1;
    return mp;
  } catch (const json::exception& e) {
    throw MalformedPack(std::string("invalid multipack document: ") + e.what());
  }
}

}  // namespace rankqa
