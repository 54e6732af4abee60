#include "nhpd/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "nhpd/errors.hpp"

namespace nhpd {

namespace {

struct Line {
  std::size_t number;
  std::string_view text;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T to_number(std::string_view tok, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, "expected a number, got \"" + std::string(tok) + "\"");
  return value;
}

/// Body lines of one $Section ... $EndSection block.
struct Section {
  std::string name;
  std::size_t header_line = 0;
  std::vector<Line> body;
};

class LineCursor {
 public:
  LineCursor(const Section& s) : s_(s) {}

  bool done() const { return i_ >= s_.body.size(); }

  const Line& next() {
    if (done()) throw ParseError(s_.header_line, "section $" + s_.name + " ends prematurely");
    return s_.body[i_++];
  }

  std::vector<std::string_view> next_tokens(std::size_t& line_no) {
    const Line& l = next();
    line_no = l.number;
    return split_ws(l.text);
  }

 private:
  const Section& s_;
  std::size_t i_ = 0;
};

std::vector<Section> split_sections(std::string_view text) {
  std::vector<Section> sections;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  Section* open = nullptr;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '$') {
      std::string_view tag = line.substr(1);
      if (open == nullptr) {
        if (tag.starts_with("End")) throw ParseError(line_no, "unexpected " + std::string(line));
        sections.push_back(Section{std::string(tag), line_no, {}});
        open = &sections.back();
      } else if (tag == "End" + open->name) {
        open = nullptr;
      } else {
        throw ParseError(line_no, "expected $End" + open->name + ", got " + std::string(line));
      }
    } else if (open != nullptr) {
      open->body.push_back(Line{line_no, line});
    } else {
      throw ParseError(line_no, "content outside of any section");
    }
    if (end == text.size()) break;
  }
  if (open != nullptr) throw ParseError(line_no, "missing $End" + open->name);
  return sections;
}

int nodes_per_element(int type, std::size_t line) {
  switch (type) {
    case 1: return 2;   // 2-node line
    case 2: return 3;   // 3-node triangle
    case 15: return 1;  // point
    default:
      throw ParseError(line, "unsupported element type " + std::to_string(type) +
                                 " (only 2-node lines, 3-node triangles and points)");
  }
}

struct RawElement {
  std::int64_t id;
  int type;
  int dimension;
  std::vector<int> physical_tags;
  std::vector<std::int64_t> nodes;
  std::size_t line;
};

struct RawMesh {
  std::vector<Node> nodes;
  std::vector<std::size_t> node_lines;
  std::vector<RawElement> elements;
  std::map<std::pair<int, int>, std::string> names;  // (dim, tag) -> name
};

int element_dimension(int type) { return type == 2 ? 2 : (type == 1 ? 1 : 0); }

void parse_physical_names(const Section& s, RawMesh& raw) {
  LineCursor cur(s);
  std::size_t ln = 0;
  auto head = cur.next_tokens(ln);
  if (head.size() != 1) throw ParseError(ln, "malformed $PhysicalNames header");
  const auto count = to_number<std::size_t>(head[0], ln);
  for (std::size_t k = 0; k < count; ++k) {
    const Line& l = cur.next();
    auto toks = split_ws(l.text);
    if (toks.size() < 3) throw ParseError(l.number, "malformed physical name entry");
    const int dim = to_number<int>(toks[0], l.number);
    const int tag = to_number<int>(toks[1], l.number);
    auto q0 = l.text.find('"');
    auto q1 = l.text.rfind('"');
    if (q0 == std::string_view::npos || q1 == q0)
      throw ParseError(l.number, "physical name must be quoted");
    raw.names[{dim, tag}] = std::string(l.text.substr(q0 + 1, q1 - q0 - 1));
  }
}

void parse_v2(const std::vector<Section>& sections, RawMesh& raw) {
  for (const auto& s : sections) {
    if (s.name == "PhysicalNames") {
      parse_physical_names(s, raw);
    } else if (s.name == "Nodes") {
      LineCursor cur(s);
      std::size_t ln = 0;
      auto head = cur.next_tokens(ln);
      if (head.size() != 1) throw ParseError(ln, "malformed $Nodes header");
      const auto count = to_number<std::size_t>(head[0], ln);
      raw.nodes.reserve(count);
      for (std::size_t k = 0; k < count; ++k) {
        auto t = cur.next_tokens(ln);
        if (t.size() < 3) throw ParseError(ln, "node line needs id x y [z]");
        raw.nodes.push_back(Node{to_number<std::int64_t>(t[0], ln), to_number<double>(t[1], ln),
                                 to_number<double>(t[2], ln)});
        raw.node_lines.push_back(ln);
      }
    } else if (s.name == "Elements") {
      LineCursor cur(s);
      std::size_t ln = 0;
      auto head = cur.next_tokens(ln);
      if (head.size() != 1) throw ParseError(ln, "malformed $Elements header");
      const auto count = to_number<std::size_t>(head[0], ln);
      for (std::size_t k = 0; k < count; ++k) {
        auto t = cur.next_tokens(ln);
        if (t.size() < 3) throw ParseError(ln, "malformed element line");
        RawElement e;
        e.line = ln;
        e.id = to_number<std::int64_t>(t[0], ln);
        e.type = to_number<int>(t[1], ln);
        e.dimension = element_dimension(e.type);
        const auto ntags = to_number<std::size_t>(t[2], ln);
        const int nn = nodes_per_element(e.type, ln);
        if (t.size() != 3 + ntags + static_cast<std::size_t>(nn))
          throw ParseError(ln, "element " + std::string(t[0]) + " has the wrong number of fields");
        if (ntags >= 1) {
          const int phys = to_number<int>(t[3], ln);
          if (phys != 0) e.physical_tags.push_back(phys);
        }
        for (int n = 0; n < nn; ++n) e.nodes.push_back(to_number<std::int64_t>(t[3 + ntags + n], ln));
        raw.elements.push_back(std::move(e));
      }
    }
  }
}

void parse_v4(const std::vector<Section>& sections, RawMesh& raw) {
  // (dim, entity tag) -> physical tags
  std::map<std::pair<int, int>, std::vector<int>> entity_physicals;
  for (const auto& s : sections) {
    if (s.name == "PhysicalNames") {
      parse_physical_names(s, raw);
    } else if (s.name == "Entities") {
      LineCursor cur(s);
      std::size_t ln = 0;
      auto head = cur.next_tokens(ln);
      if (head.size() != 4) throw ParseError(ln, "malformed $Entities header");
      std::array<std::size_t, 4> counts{};
      for (int d = 0; d < 4; ++d) counts[d] = to_number<std::size_t>(head[d], ln);
      for (int d = 0; d < 4; ++d) {
        for (std::size_t k = 0; k < counts[d]; ++k) {
          auto t = cur.next_tokens(ln);
          // points: tag x y z nphys ...; others: tag 6 bbox values nphys ...
          const std::size_t at = d == 0 ? 4 : 7;
          if (t.size() <= at) throw ParseError(ln, "malformed entity line");
          const int tag = to_number<int>(t[0], ln);
          const auto nphys = to_number<std::size_t>(t[at], ln);
          if (t.size() < at + 1 + nphys) throw ParseError(ln, "malformed entity physical tags");
          auto& phys = entity_physicals[{d, tag}];
          for (std::size_t p = 0; p < nphys; ++p) phys.push_back(std::abs(to_number<int>(t[at + 1 + p], ln)));
        }
      }
    } else if (s.name == "Nodes") {
      LineCursor cur(s);
      std::size_t ln = 0;
      auto head = cur.next_tokens(ln);
      if (head.size() != 4) throw ParseError(ln, "malformed $Nodes header");
      const auto blocks = to_number<std::size_t>(head[0], ln);
      raw.nodes.reserve(to_number<std::size_t>(head[1], ln));
      for (std::size_t b = 0; b < blocks; ++b) {
        auto bh = cur.next_tokens(ln);
        if (bh.size() != 4) throw ParseError(ln, "malformed node block header");
        const auto n = to_number<std::size_t>(bh[3], ln);
        std::vector<std::int64_t> tags(n);
        for (std::size_t k = 0; k < n; ++k) {
          auto t = cur.next_tokens(ln);
          if (t.size() != 1) throw ParseError(ln, "expected one node tag per line");
          tags[k] = to_number<std::int64_t>(t[0], ln);
        }
        for (std::size_t k = 0; k < n; ++k) {
          auto t = cur.next_tokens(ln);
          if (t.size() < 3) throw ParseError(ln, "node coordinates need x y z");
          raw.nodes.push_back(Node{tags[k], to_number<double>(t[0], ln), to_number<double>(t[1], ln)});
          raw.node_lines.push_back(ln);
        }
      }
    } else if (s.name == "Elements") {
      LineCursor cur(s);
      std::size_t ln = 0;
      auto head = cur.next_tokens(ln);
      if (head.size() != 4) throw ParseError(ln, "malformed $Elements header");
      const auto blocks = to_number<std::size_t>(head[0], ln);
      for (std::size_t b = 0; b < blocks; ++b) {
        auto bh = cur.next_tokens(ln);
        if (bh.size() != 4) throw ParseError(ln, "malformed element block header");
        const int dim = to_number<int>(bh[0], ln);
        const int entity = to_number<int>(bh[1], ln);
        const int type = to_number<int>(bh[2], ln);
        const auto n = to_number<std::size_t>(bh[3], ln);
        const int nn = nodes_per_element(type, ln);
        std::vector<int> phys;
        if (auto it = entity_physicals.find({dim, entity}); it != entity_physicals.end()) phys = it->second;
        for (std::size_t k = 0; k < n; ++k) {
          auto t = cur.next_tokens(ln);
          if (t.size() != 1 + static_cast<std::size_t>(nn))
            throw ParseError(ln, "element line has the wrong number of nodes");
          RawElement e;
          e.line = ln;
          e.id = to_number<std::int64_t>(t[0], ln);
          e.type = type;
          e.dimension = element_dimension(type);
          e.physical_tags = phys;
          for (int m = 0; m < nn; ++m) e.nodes.push_back(to_number<std::int64_t>(t[1 + m], ln));
          raw.elements.push_back(std::move(e));
        }
      }
    }
  }
}

double signed_area2(const Node& a, const Node& b, const Node& c) {
  return (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
}

}  // namespace

double Mesh::area(const Triangle& t) const {
  return 0.5 * signed_area2(nodes[t.vertices[0]], nodes[t.vertices[1]], nodes[t.vertices[2]]);
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (const auto& t : triangles) sum += area(t);
  return sum;
}

const PhysicalGroup* Mesh::find_group(std::string_view name) const {
  for (const auto& g : groups)
    if (g.name == name) return &g;
  return nullptr;
}

std::optional<std::size_t> Mesh::node_index(std::int64_t id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const Node& n, std::int64_t v) { return n.id < v; });
  if (it != nodes.end() && it->id == id) return static_cast<std::size_t>(it - nodes.begin());
  // Nodes are sorted by id after parsing; fall back for hand-built meshes.
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  return std::nullopt;
}

Mesh parse_msh(std::string_view text) {
  const auto sections = split_sections(text);
  if (sections.empty() || sections.front().name != "MeshFormat")
    throw ParseError(1, "file must start with $MeshFormat");
  const Section& fmt = sections.front();
  if (fmt.body.empty()) throw ParseError(fmt.header_line, "empty $MeshFormat");
  const auto ft = split_ws(fmt.body.front().text);
  const std::size_t fl = fmt.body.front().number;
  if (ft.size() != 3) throw ParseError(fl, "malformed $MeshFormat header");
  const std::string version(ft[0]);
  const int file_type = to_number<int>(ft[1], fl);
  if (file_type != 0) throw ParseError(fl, "binary MSH files are not supported; re-export as ASCII");
  if (version != "2.2" && version != "4.1")
    throw ParseError(fl, "unsupported MSH version " + version + " (expected 2.2 or 4.1)");

  RawMesh raw;
  if (version == "2.2")
    parse_v2(sections, raw);
  else
    parse_v4(sections, raw);

  Mesh mesh;
  // Sort nodes by id so node_index can binary-search.
  std::vector<std::size_t> order(raw.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw.nodes[a].id < raw.nodes[b].id; });
  mesh.nodes.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && raw.nodes[order[k]].id == raw.nodes[order[k - 1]].id)
      throw MeshIntegrityError("duplicate node id " + std::to_string(raw.nodes[order[k]].id) + " (line " +
                               std::to_string(raw.node_lines[order[k]]) + ")");
    mesh.nodes.push_back(raw.nodes[order[k]]);
  }
  mesh.referenced.assign(mesh.nodes.size(), false);

  std::map<std::pair<int, int>, std::vector<std::size_t>> group_nodes;
  for (const auto& e : raw.elements) {
    std::vector<std::size_t> idx;
    idx.reserve(e.nodes.size());
    for (auto id : e.nodes) {
      auto i = mesh.node_index(id);
      if (!i)
        throw MeshIntegrityError("element " + std::to_string(e.id) + " (line " + std::to_string(e.line) +
                                 ") references unknown node " + std::to_string(id));
      idx.push_back(*i);
      mesh.referenced[*i] = true;
    }
    for (int p : e.physical_tags) {
      auto& v = group_nodes[{e.dimension, p}];
      v.insert(v.end(), idx.begin(), idx.end());
    }
    if (e.type == 2) {
      Triangle t{e.id, {idx[0], idx[1], idx[2]}};
      const double a2 = signed_area2(mesh.nodes[idx[0]], mesh.nodes[idx[1]], mesh.nodes[idx[2]]);
      if (a2 == 0.0) throw DegenerateElementError(e.id);
      if (a2 < 0.0) std::swap(t.vertices[1], t.vertices[2]);
      mesh.triangles.push_back(t);
    }
  }
  for (auto& [key, nodes] : group_nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    PhysicalGroup g;
    g.dimension = key.first;
    g.tag = key.second;
    auto it = raw.names.find(key);
    g.name = it != raw.names.end() ? it->second : std::to_string(key.second);
    g.nodes = std::move(nodes);
    mesh.groups.push_back(std::move(g));
  }
  return mesh;
}

Mesh read_msh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mesh file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_msh(ss.str());
}

std::string write_msh(const Mesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  // Groups are renumbered 1..n. Lower-dimensional groups are written as point
  // elements (dimension 0); 2D groups tag the triangles they fully contain.
  auto out_dim = [](const PhysicalGroup& g) { return g.dimension == 2 ? 2 : 0; };
  if (!mesh.groups.empty()) {
    out << "$PhysicalNames\n" << mesh.groups.size() << '\n';
    for (std::size_t k = 0; k < mesh.groups.size(); ++k)
      out << out_dim(mesh.groups[k]) << ' ' << k + 1 << " \"" << mesh.groups[k].name << "\"\n";
    out << "$EndPhysicalNames\n";
  }
  out << "$Nodes\n" << mesh.nodes.size() << '\n';
  for (const auto& n : mesh.nodes) out << n.id << ' ' << n.x << ' ' << n.y << " 0\n";
  out << "$EndNodes\n";

  std::size_t count = mesh.triangles.size();
  for (const auto& g : mesh.groups)
    if (g.dimension != 2) count += g.nodes.size();
  auto triangle_tag = [&](const Triangle& t) {
    for (std::size_t k = 0; k < mesh.groups.size(); ++k) {
      const auto& g = mesh.groups[k];
      if (g.dimension != 2) continue;
      bool all = true;
      for (auto v : t.vertices) all = all && std::binary_search(g.nodes.begin(), g.nodes.end(), v);
      if (all) return static_cast<int>(k + 1);
    }
    return 0;
  };
  out << "$Elements\n" << count << '\n';
  std::int64_t next_id = 1;
  for (const auto& t : mesh.triangles) next_id = std::max(next_id, t.id + 1);
  for (const auto& t : mesh.triangles) {
    const int tag = triangle_tag(t);
    out << t.id << " 2 2 " << tag << ' ' << tag;
    for (auto v : t.vertices) out << ' ' << mesh.nodes[v].id;
    out << '\n';
  }
  for (std::size_t k = 0; k < mesh.groups.size(); ++k) {
    const auto& g = mesh.groups[k];
    if (g.dimension == 2) continue;
    for (auto v : g.nodes) out << next_id++ << " 15 2 " << k + 1 << ' ' << k + 1 << ' ' << mesh.nodes[v].id << '\n';
  }
  out << "$EndElements\n";
  return out.str();
}

std::vector<MaterialPoint> lump_volumes(const Mesh& mesh, double thickness) {
  if (!(thickness > 0.0)) throw ConfigError("material.thickness", "must be positive");
  std::vector<double> area(mesh.nodes.size(), 0.0);
  std::vector<bool> in_triangle(mesh.nodes.size(), false);
  for (const auto& t : mesh.triangles) {
    const double third = mesh.area(t) / 3.0;
    for (auto v : t.vertices) {
      area[v] += third;
      in_triangle[v] = true;
    }
  }
  std::vector<MaterialPoint> points;
  points.reserve(mesh.nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (!in_triangle[i]) {
      const bool anchor = i < mesh.referenced.size() && mesh.referenced[i];
      if (anchor) continue;
      throw IsolatedNodeError(mesh.nodes[i].id);
    }
    MaterialPoint p;
    p.node = i;
    p.x = mesh.nodes[i].x;
    p.y = mesh.nodes[i].y;
    p.volume = area[i] * thickness;
    points.push_back(p);
  }
  return points;
}

}  // namespace nhpd
