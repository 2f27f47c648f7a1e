#include "mti/modsti.hpp"

#include <algorithm>
#include <set>

#include "generated/mods_ti_dtd.hpp"
#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "mti/text.hpp"
#include "mti/xml.hpp"

namespace mti {

namespace {

constexpr std::string_view kModsNs = "http://www.loc.gov/mods/v3";
const std::set<std::string> kAnnotationTrees = {"provenance", "spatialAnnotations", "temporalAnnotations",
                                                "thematicAnnotations"};

template <typename T>
void sort_canonical(std::vector<T>& v) {
  std::stable_sort(v.begin(), v.end(), [](const T& a, const T& b) {
    if (a.segment != b.segment) return a.segment < b.segment;
    if (a.span.start != b.span.start) return a.span.start < b.span.start;
    if (a.span.end != b.span.end) return a.span.end > b.span.end;
    return a.id < b.id;
  });
}

std::string num(std::size_t v) { return std::to_string(v); }

Granularity coarser(Granularity a, Granularity b) { return static_cast<int>(a) < static_cast<int>(b) ? a : b; }

using Attrs = std::vector<std::pair<std::string, std::string>>;

Attrs span_attrs(const std::string& id, std::size_t segment, const Span& span) {
  return {{"id", id}, {"segment", num(segment)}, {"start", num(span.start)}, {"end", num(span.end)}};
}

// Attribute accessors raising SchemaViolation with the element path.
struct Reader {
  const xml::Element& e;
  std::string path;

  std::string req(std::string_view name) const {
    auto v = e.attribute(name);
    if (!v) throw Error(ErrorCode::SchemaViolation, path + ": missing attribute '" + std::string(name) + "'");
    return *v;
  }
  std::string opt(std::string_view name) const { return e.attribute(name).value_or(""); }
  std::size_t size(std::string_view name) const {
    const std::string v = req(name);
    try {
      const auto n = text::parse_int(v);
      if (n < 0) throw Error(ErrorCode::MalformedInput, "negative");
      return static_cast<std::size_t>(n);
    } catch (const Error&) {
      throw Error(ErrorCode::SchemaViolation, path + ": attribute '" + std::string(name) + "' is not a count: " + v);
    }
  }
  std::int64_t integer(std::string_view name) const {
    const std::string v = req(name);
    try {
      return text::parse_int(v);
    } catch (const Error&) {
      throw Error(ErrorCode::SchemaViolation, path + ": attribute '" + std::string(name) + "' is not an integer: " + v);
    }
  }
  double real(std::string_view name) const {
    const std::string v = req(name);
    try {
      return text::parse_double(v);
    } catch (const Error&) {
      throw Error(ErrorCode::SchemaViolation, path + ": attribute '" + std::string(name) + "' is not a number: " + v);
    }
  }
  Span span() const {
    Span s{size("start"), size("end")};
    if (s.start >= s.end) throw Error(ErrorCode::SchemaViolation, path + ": empty or inverted span");
    return s;
  }
  std::string text_child() const {
    const xml::Element* t = e.child("text");
    if (t == nullptr) throw Error(ErrorCode::SchemaViolation, path + ": missing <text>");
    return t->text;
  }
  template <typename F>
  auto convert(std::string_view what, F f) const {
    try {
      return f();
    } catch (const Error& err) {
      throw Error(ErrorCode::SchemaViolation, path + ": bad " + std::string(what) + ": " + err.what());
    }
  }
};

std::string child_path(const std::string& parent, const xml::Element& c, std::map<std::string, int>& seen) {
  return parent + "/" + c.name + "[" + std::to_string(++seen[c.name]) + "]";
}

}  // namespace

std::string_view mods_ti_dtd_text() { return generated::kModsTiDtd; }

const xml::Dtd& mods_ti_dtd() {
  static const xml::Dtd dtd = xml::Dtd::parse(generated::kModsTiDtd);
  return dtd;
}

void canonicalize(ModsTiRecord& r) {
  sort_canonical(r.spatial);
  sort_canonical(r.organizations);
  sort_canonical(r.temporal);
  sort_canonical(r.thematic);
}

std::string to_mods_ti_xml(const ModsTiRecord& input) {
  ModsTiRecord r = input;
  canonicalize(r);
  xml::Writer w;
  w.declaration();
  w.doctype("mods", kModsTiSystemId);
  w.open("mods", {{"xmlns", std::string(kModsNs)}, {"version", "3.7"}});
  mods_core::write(w, r.document);
  if (r.provenance) {
    w.open("provenance", {{"version", r.provenance->pipeline_version},
                          {"totalSeconds", text::format_double(r.provenance->total_seconds)}});
    for (const auto& s : r.provenance->stages) {
      w.empty("stage", {{"name", s.stage}, {"seconds", text::format_double(s.seconds)}});
    }
    w.close();
  }

  w.open("spatialAnnotations");
  for (const auto& e : r.spatial) {
    Attrs a = span_attrs(e.id, e.segment, e.span);
    a.insert(a.begin() + 1, {"kind", std::string(to_string(e.kind))});
    if (e.relation) a.emplace_back("relation", std::string(to_string(*e.relation)));
    if (!e.head.empty()) a.emplace_back("head", e.head);
    if (!e.rule.empty()) a.emplace_back("rule", e.rule);
    a.emplace_back("confidence", text::format_double(e.confidence));
    w.open("es", a);
    w.leaf("text", e.surface);
    for (const auto& ind : e.indicators) {
      w.leaf("indicator", ind.surface,
             {{"category", std::string(to_string(ind.category))},
              {"lang", ind.lang},
              {"start", num(ind.span.start)},
              {"end", num(ind.span.end)}});
    }
    for (const auto& ref : e.anchors) w.empty("anchor", {{"ref", ref}});
    for (const auto id : e.candidates) w.empty("candidate", {{"gazetteerId", std::to_string(id)}});
    if (e.footprint) {
      w.empty("footprint", {{"gazetteerId", std::to_string(e.footprint->gazetteer_id)},
                            {"lat", text::format_double(e.footprint->lat)},
                            {"lon", text::format_double(e.footprint->lon)}});
    }
    w.close();
  }
  for (const auto& o : r.organizations) {
    Attrs a = span_attrs(o.id, o.segment, o.span);
    a.emplace_back("trigger", o.trigger);
    w.open("organization", a);
    w.leaf("text", o.surface);
    w.close();
  }
  w.close();

  w.open("temporalAnnotations");
  for (const auto& t : r.temporal) {
    Attrs a = span_attrs(t.id, t.segment, t.span);
    a.emplace_back("category", std::string(to_string(t.category)));
    a.emplace_back("value", t.value());
    a.emplace_back("granularity", std::string(to_string(coarser(t.begin.granularity(), t.end.granularity()))));
    w.open("te", a);
    w.leaf("text", t.surface);
    w.close();
  }
  w.close();

  w.open("thematicAnnotations");
  for (const auto& c : r.thematic) {
    Attrs a = span_attrs(c.id, c.segment, c.span);
    a.emplace_back("concept", c.concept_id);
    a.emplace_back("matchedVia", std::string(to_string(c.matched_via)));
    w.open("the", a);
    w.leaf("text", c.surface);
    for (const auto& b : c.broader_chain) w.empty("broader", {{"concept", b}});
    w.close();
  }
  w.close();

  w.close();
  return w.str();
}

namespace {

xml::Element parse_tree(std::string_view bytes) {
  try {
    return xml::parse(bytes);
  } catch (const Error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("/: not well-formed: ") + e.what());
  }
}

// The DTD covers what the serializer writes; extra MODS elements under the
// root are accepted and handed to the MODS reader.
std::vector<std::string> validate_tree(const xml::Element& root) {
  const xml::Dtd& dtd = mods_ti_dtd();
  if (root.name != "mods") return {"/" + root.name + ": root element must be <mods>"};
  xml::Element stripped = root;
  std::erase_if(stripped.children, [&](const xml::Element& c) { return !dtd.declares(c.name); });
  return dtd.validate(stripped, "mods");
}

}  // namespace

std::vector<std::string> validate_mods_ti_xml(std::string_view bytes) {
  xml::Element root;
  try {
    root = xml::parse(bytes);
  } catch (const Error& e) {
    return {std::string("/: not well-formed: ") + e.what()};
  }
  if (root.name != "mods") return {"/" + root.name + ": root element must be <mods>"};
  return mods_ti_dtd().validate(root, "mods");
}

ModsTiRecord parse_mods_ti_xml(std::string_view bytes) {
  const xml::Element root = parse_tree(bytes);
  const auto errors = validate_tree(root);
  if (!errors.empty()) {
    std::string msg = errors.front();
    if (errors.size() > 1) msg += " (+" + std::to_string(errors.size() - 1) + " more)";
    throw Error(ErrorCode::SchemaViolation, msg);
  }

  ModsTiRecord r;
  IngestOptions options;
  r.document = mods_core::read(root, options, kAnnotationTrees);

  std::map<std::string, int> seen;
  for (const auto& tree : root.children) {
    const std::string tree_path = child_path("/mods[1]", tree, seen);
    std::map<std::string, int> inner;
    if (tree.name == "provenance") {
      Reader rd{tree, tree_path};
      Provenance p;
      p.pipeline_version = rd.req("version");
      p.total_seconds = rd.real("totalSeconds");
      for (const auto& s : tree.children) {
        Reader sr{s, child_path(tree_path, s, inner)};
        p.stages.push_back({sr.req("name"), sr.real("seconds")});
      }
      r.provenance = std::move(p);
    } else if (tree.name == "spatialAnnotations") {
      for (const auto& c : tree.children) {
        Reader rd{c, child_path(tree_path, c, inner)};
        if (c.name == "organization") {
          OrganizationEntity o;
          o.id = rd.req("id");
          o.segment = rd.size("segment");
          o.span = rd.span();
          o.trigger = rd.req("trigger");
          o.surface = rd.text_child();
          r.organizations.push_back(std::move(o));
          continue;
        }
        SpatialEntity e;
        e.id = rd.req("id");
        e.kind = rd.convert("kind", [&] { return spatial_kind_from_string(rd.req("kind")); });
        e.segment = rd.size("segment");
        e.span = rd.span();
        if (c.attribute("relation")) {
          e.relation = rd.convert("relation", [&] { return indicator_category_from_string(rd.req("relation")); });
        }
        e.head = rd.opt("head");
        e.rule = rd.opt("rule");
        e.confidence = rd.real("confidence");
        e.surface = rd.text_child();
        std::map<std::string, int> leaf;
        for (const auto& g : c.children) {
          Reader gr{g, child_path(rd.path, g, leaf)};
          if (g.name == "indicator") {
            SpatialIndicator ind;
            ind.surface = g.text;
            ind.category = gr.convert("category", [&] { return indicator_category_from_string(gr.req("category")); });
            ind.lang = gr.req("lang");
            ind.span = gr.span();
            e.indicators.push_back(std::move(ind));
          } else if (g.name == "anchor") {
            e.anchors.push_back(gr.req("ref"));
          } else if (g.name == "candidate") {
            e.candidates.push_back(gr.integer("gazetteerId"));
          } else if (g.name == "footprint") {
            e.footprint = Footprint{gr.integer("gazetteerId"), gr.real("lat"), gr.real("lon")};
          }
        }
        if ((e.kind == SpatialKind::Relative) != (e.relation.has_value() && !e.anchors.empty())) {
          throw Error(ErrorCode::SchemaViolation, rd.path + ": relative entities need a relation and anchors, absolute ones neither");
        }
        r.spatial.push_back(std::move(e));
      }
    } else if (tree.name == "temporalAnnotations") {
      for (const auto& c : tree.children) {
        Reader rd{c, child_path(tree_path, c, inner)};
        TemporalEntity t;
        t.id = rd.req("id");
        t.segment = rd.size("segment");
        t.span = rd.span();
        t.category = rd.req("category") == "Period" ? TemporalCategory::Period : TemporalCategory::Date;
        rd.convert("value", [&] {
          TemporalEntity::parse_value(rd.req("value"), t.category, t.begin, t.end);
          return 0;
        });
        t.surface = rd.text_child();
        r.temporal.push_back(std::move(t));
      }
    } else if (tree.name == "thematicAnnotations") {
      for (const auto& c : tree.children) {
        Reader rd{c, child_path(tree_path, c, inner)};
        ThematicEntity t;
        t.id = rd.req("id");
        t.segment = rd.size("segment");
        t.span = rd.span();
        t.concept_id = rd.req("concept");
        t.matched_via = rd.req("matchedVia") == "AltLabel" ? MatchedVia::AltLabel : MatchedVia::PrefLabel;
        t.surface = rd.text_child();
        for (const auto* b : c.children_named("broader")) t.broader_chain.push_back(b->attribute("concept").value_or(""));
        r.thematic.push_back(std::move(t));
      }
    }
  }
  for (const auto& e : r.spatial) {
    for (const auto& a : e.anchors) {
      const auto it = std::find_if(r.spatial.begin(), r.spatial.end(), [&](const SpatialEntity& s) { return s.id == a; });
      if (it == r.spatial.end() || it->kind != SpatialKind::Absolute) {
        throw Error(ErrorCode::SchemaViolation, "/mods[1]/spatialAnnotations[1]: anchor '" + a + "' of " + e.id +
                                                    " is not an absolute entity");
      }
    }
    if (e.footprint && std::find(e.candidates.begin(), e.candidates.end(), e.footprint->gazetteer_id) == e.candidates.end()) {
      throw Error(ErrorCode::SchemaViolation, "/mods[1]/spatialAnnotations[1]: footprint of " + e.id + " is not a candidate");
    }
  }
  return r;
}

}  // namespace mti
