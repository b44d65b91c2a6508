#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rankqa/errors.hpp"

namespace rankqa {

using AnnotationId = std::uint64_t;
using PackId = std::uint64_t;

/// Attribute values are numbers or strings.
using AttrValue = std::variant<double, std::string>;
using AttrMap = std::map<std::string, AttrValue>;

struct SpanAnnotation {
  AnnotationId id = 0;
  std::string kind;
  std::size_t begin = 0;  // codepoint offsets into the pack text
  std::size_t end = 0;
  AttrMap attributes;

  bool operator==(const SpanAnnotation&) const = default;
};

struct LinkAnnotation {
  AnnotationId id = 0;
  std::string kind;
  AnnotationId parent = 0;
  AnnotationId child = 0;

  bool operator==(const LinkAnnotation&) const = default;
};

struct GroupAnnotation {
  AnnotationId id = 0;
  std::string kind;
  std::vector<AnnotationId> members;  // kept sorted, unique

  bool operator==(const GroupAnnotation&) const = default;
};

/// A text payload with typed annotations. The text is immutable after
/// construction; annotations only accumulate, so any stage downstream of
/// another sees a superset of its annotations.
class DataPack {
public:
  DataPack();
  explicit DataPack(std::string text);

  PackId pack_id() const { return pack_id_; }
  const std::string& text() const { return text_; }
  /// Text length in codepoints (the unit of all offsets).
  std::size_t length() const { return length_; }

  /// Adds a span; offsets must satisfy 0 <= begin <= end <= length().
  AnnotationId add_span(std::string kind, std::size_t begin, std::size_t end,
                        AttrMap attributes = {});
  /// Adds a link between two existing annotations of this pack.
  AnnotationId add_link(std::string kind, AnnotationId parent, AnnotationId child);
  /// Adds a group over a non-empty set of existing annotations.
  AnnotationId add_group(std::string kind, std::vector<AnnotationId> members);

  /// Spans of `kind` intersecting `range` (all spans of the kind when
  /// absent), sorted by (begin, end, id). An empty span matches a range
  /// containing its position.
  std::vector<SpanAnnotation> get_spans(
      std::string_view kind,
      std::optional<std::pair<std::size_t, std::size_t>> range = std::nullopt) const;

  /// Pack text covered by the span with the given id.
  std::string covered_text(AnnotationId id) const;

  const std::vector<SpanAnnotation>& spans() const { return spans_; }
  const std::vector<LinkAnnotation>& links() const { return links_; }
  const std::vector<GroupAnnotation>& groups() const { return groups_; }
  std::size_t annotation_count() const {
    return spans_.size() + links_.size() + groups_.size();
  }
  bool has_annotation(AnnotationId id) const;

  const std::map<std::string, std::string>& metadata() const { return metadata_; }
  void set_metadata(std::string key, std::string value);
  std::optional<std::string> get_metadata(std::string_view key) const;

  /// Stable self-describing JSON document; see README for the schema.
  std::string serialize() const;
  /// Inverse of serialize. Throws MalformedPack on anything else.
  static DataPack deserialize(std::string_view bytes);

  bool operator==(const DataPack& other) const;

private:
  friend class MultiPack;

  PackId pack_id_;
  std::string text_;
  std::size_t length_ = 0;
  std::vector<SpanAnnotation> spans_;
  std::vector<LinkAnnotation> links_;
  std::vector<GroupAnnotation> groups_;
  std::map<std::string, std::string> metadata_;
  AnnotationId next_id_ = 1;

  AnnotationId take_id() { return next_id_++; }
};

/// Endpoint of a cross-pack link: (pack name, annotation id).
struct PackRef {
  std::string pack;
  AnnotationId annotation = 0;

  bool operator==(const PackRef&) const = default;
};

struct CrossLink {
  AnnotationId id = 0;
  std::string kind;
  PackRef parent;
  PackRef child;

  bool operator==(const CrossLink&) const = default;
};

/// A named bundle of DataPacks (e.g. "query", "passage_7") plus links whose
/// endpoints live in different packs.
class MultiPack {
public:
  /// Adds a pack under a unique name and returns a reference to it.
  DataPack& add_pack(std::string name, DataPack pack);
  DataPack& pack(std::string_view name);
  const DataPack& pack(std::string_view name) const;
  bool has_pack(std::string_view name) const;
  /// Pack names in insertion order.
  const std::vector<std::string>& pack_names() const { return order_; }
  std::size_t pack_count() const { return order_.size(); }

  /// Adds a cross-pack link; both endpoints must resolve.
  AnnotationId add_cross_link(std::string kind, PackRef parent, PackRef child);
  const std::vector<CrossLink>& cross_links() const { return cross_links_; }

  std::string serialize() const;
  static MultiPack deserialize(std::string_view bytes);

private:
  std::vector<std::string> order_;
  std::map<std::string, DataPack> packs_;
  std::vector<CrossLink> cross_links_;
  AnnotationId next_link_id_ = 1;

  void check_ref(const PackRef& ref) const;
};

}  // namespace rankqa
