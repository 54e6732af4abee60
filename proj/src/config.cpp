#include "nhpd/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace nhpd {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "config" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError(join(path, key), "unknown key");
  }
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(field, "must be finite");
  return d;
}

double number(const json& obj, const char* key, const std::string& path, double fallback) {
  return obj.contains(key) ? number(obj[key], join(path, key)) : fallback;
}

double required_number(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(join(path, key), "missing key");
  return number(obj[key], join(path, key));
}

std::size_t count(const json& obj, const char* key, const std::string& path, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj[key];
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(join(path, key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

bool flag(const json& obj, const char* key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return obj[key].get<bool>();
}

std::string text(const json& obj, const char* key, const std::string& path, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) throw ConfigError(join(path, key), "expected a string");
  return obj[key].get<std::string>();
}

std::string required_text(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(join(path, key), "missing key");
  return text(obj, key, path, "");
}

template <class F>
auto with_field(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    if (e.field() == field) throw;
    const std::string what = e.what();
    throw ConfigError(field, what.substr(std::min(what.size(), e.field().size() + 2)));
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

// "value", "increment" (+ optional "base") or "table"; exactly one form.
Schedule schedule(const json& obj, const std::string& path, const char* value_key) {
  const int forms = int(obj.contains(value_key)) + int(obj.contains("increment")) + int(obj.contains("table"));
  if (forms != 1)
    throw ConfigError(path, std::string("give exactly one of \"") + value_key + "\", \"increment\" or \"table\"");
  Schedule s;
  if (obj.contains(value_key)) {
    s.base = number(obj[value_key], join(path, value_key));
  } else if (obj.contains("increment")) {
    s.increment = number(obj["increment"], join(path, "increment"));
    s.base = number(obj, "base", path, 0.0);
  } else {
    const auto& t = obj["table"];
    if (!t.is_array() || t.empty()) throw ConfigError(join(path, "table"), "expected a non-empty array");
    for (std::size_t i = 0; i < t.size(); ++i)
      s.table.push_back(number(t[i], join(path, "table[" + std::to_string(i) + "]")));
  }
  if (obj.contains("base") && !obj.contains("increment")) throw ConfigError(join(path, "base"), "only valid with increment");
  return s;
}

json schedule_json(const Schedule& s, const char* value_key, json obj) {
  if (!s.table.empty()) {
    obj["table"] = s.table;
  } else if (s.increment != 0.0) {
    obj["increment"] = s.increment;
    obj["base"] = s.base;
  } else {
    obj[value_key] = s.base;
  }
  return obj;
}

Dof dof_field(const json& obj, const std::string& path, Dof fallback, bool required) {
  if (!obj.contains("dof")) {
    if (required) throw ConfigError(join(path, "dof"), "missing key");
    return fallback;
  }
  return with_field(join(path, "dof"), [&] { return parse_dof(text(obj, "dof", path, "")); });
}

std::size_t error_line(const std::string& src, std::size_t byte) {
  byte = std::min(byte, src.size());
  return 1 + static_cast<std::size_t>(std::count(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

double adjusted_strength(double strength, double lambda, double reference_lambda) {
  if (!(lambda >= 1.0) || !(reference_lambda >= 1.0)) throw ConfigError("sweep.lambdas", "horizon factors must be >= 1");
  return strength * (3.0 * reference_lambda - 1.0) / (3.0 * lambda - 1.0);
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base) {
  check_keys(doc, "", {"mesh", "points", "groups", "material", "model", "slots", "boundary", "loads", "program",
                       "output", "sweep", "simd"});
  RunConfig c;
  if (doc.contains("mesh") && doc.contains("points")) throw ConfigError("mesh", "give either mesh or points, not both");
  if (doc.contains("mesh")) {
    std::filesystem::path p = required_text(doc, "mesh", "");
    c.mesh = p.is_relative() ? base / p : p;
  } else if (doc.contains("points")) {
    const auto& pts = doc["points"];
    if (!pts.is_array() || pts.empty()) throw ConfigError("points", "expected a non-empty array of [x, y, volume]");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string f = "points[" + std::to_string(i) + "]";
      if (!pts[i].is_array() || pts[i].size() != 3) throw ConfigError(f, "expected [x, y, volume]");
      c.points.push_back({number(pts[i][0], f), number(pts[i][1], f), number(pts[i][2], f)});
    }
    if (doc.contains("groups")) {
      const auto& g = doc["groups"];
      if (!g.is_object()) throw ConfigError("groups", "expected an object of name -> point indices");
      for (const auto& [name, list] : g.items()) {
        const std::string f = "groups." + name;
        if (!list.is_array()) throw ConfigError(f, "expected an array of point indices");
        auto& dst = c.point_groups[name];
        for (const auto& v : list) {
          if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<std::size_t>() >= c.points.size())
            throw ConfigError(f, "point index out of range");
          dst.push_back(v.get<std::size_t>());
        }
      }
    }
  } else {
    throw ConfigError("mesh", "missing key (or give inline points)");
  }
  if (doc.contains("groups") && !doc.contains("points")) throw ConfigError("groups", "only valid with inline points");

  if (!doc.contains("material")) throw ConfigError("material", "missing key");
  const auto& m = doc["material"];
  check_keys(m, "material", {"E", "nu", "Ft", "thickness", "plane"});
  c.material.youngs_modulus = required_number(m, "E", "material");
  c.material.poisson_ratio = required_number(m, "nu", "material");
  c.material.tensile_strength = required_number(m, "Ft", "material");
  c.material.thickness = number(m, "thickness", "material", 1.0);
  c.material.plane = with_field("material.plane", [&] { return parse_plane_mode(text(m, "plane", "material", "stress")); });

  if (doc.contains("model")) {
    const auto& md = doc["model"];
    check_keys(md, "model", {"lambda", "correction"});
    c.lambda = number(md, "lambda", "model", 3.0);
    if (md.contains("correction")) {
      const auto& cr = md["correction"];
      check_keys(cr, "model.correction", {"enabled", "probe_strain", "tolerance", "max_iterations", "mode"});
      c.correct = flag(cr, "enabled", "model.correction", true);
      c.correction.probe_strain = number(cr, "probe_strain", "model.correction", c.correction.probe_strain);
      c.correction.tolerance = number(cr, "tolerance", "model.correction", c.correction.tolerance);
      c.correction.max_iterations = count(cr, "max_iterations", "model.correction", c.correction.max_iterations);
      c.correction.mode = with_field("model.correction.mode", [&] {
        return parse_correction_mode(text(cr, "mode", "model.correction", "energy_ratio"));
      });
    }
  }

  if (doc.contains("slots")) {
    const auto& s = doc["slots"];
    if (!s.is_array()) throw ConfigError("slots", "expected an array of [x1, y1, x2, y2]");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string f = "slots[" + std::to_string(i) + "]";
      if (!s[i].is_array() || s[i].size() != 4) throw ConfigError(f, "expected [x1, y1, x2, y2]");
      c.slots.push_back({{number(s[i][0], f), number(s[i][1], f)}, {number(s[i][2], f), number(s[i][3], f)}});
    }
  }

  if (doc.contains("boundary")) {
    const auto& b = doc["boundary"];
    if (!b.is_array()) throw ConfigError("boundary", "expected an array");
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string f = "boundary[" + std::to_string(i) + "]";
      check_keys(b[i], f, {"group", "dof", "value", "increment", "base", "table"});
      c.boundary.push_back({required_text(b[i], "group", f), dof_field(b[i], f, Dof::Ux, true), schedule(b[i], f, "value")});
    }
  }
  if (doc.contains("loads")) {
    const auto& l = doc["loads"];
    if (!l.is_array()) throw ConfigError("loads", "expected an array");
    for (std::size_t i = 0; i < l.size(); ++i) {
      const std::string f = "loads[" + std::to_string(i) + "]";
      check_keys(l[i], f, {"group", "dof", "total", "increment", "base", "table"});
      c.loads.push_back({required_text(l[i], "group", f), dof_field(l[i], f, Dof::Uy, true), schedule(l[i], f, "total")});
    }
  }

  if (doc.contains("program")) {
    const auto& p = doc["program"];
    const std::string f = "program";
    check_keys(p, f, {"steps", "break_batch", "tolerance", "max_nr_iterations", "max_break_rounds", "monitor",
                      "stop_below_peak_fraction"});
    auto& ps = c.program;
    ps.steps = count(p, "steps", f, ps.steps);
    ps.break_batch = count(p, "break_batch", f, ps.break_batch);
    ps.tolerance = number(p, "tolerance", f, ps.tolerance);
    ps.max_nr_iterations = count(p, "max_nr_iterations", f, ps.max_nr_iterations);
    ps.max_break_rounds = count(p, "max_break_rounds", f, ps.max_break_rounds);
    ps.stop_below_peak_fraction = number(p, "stop_below_peak_fraction", f, ps.stop_below_peak_fraction);
    if (p.contains("monitor")) {
      const auto& mo = p["monitor"];
      check_keys(mo, "program.monitor", {"group", "dof"});
      ps.monitor_group = required_text(mo, "group", "program.monitor");
      ps.monitor_dof = dof_field(mo, "program.monitor", Dof::Uy, false);
    }
  }

  if (doc.contains("output")) {
    const auto& o = doc["output"];
    check_keys(o, "output", {"directory", "fields", "every"});
    std::filesystem::path dir = text(o, "directory", "output", "out");
    c.output.directory = dir.is_relative() ? base / dir : dir;
    c.output.fields = flag(o, "fields", "output", true);
    c.output.every = count(o, "every", "output", 0);
  } else {
    c.output.directory = base / "out";
  }

  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    check_keys(s, "sweep", {"lambdas", "adjust_strength", "reference_lambda", "reference_peak"});
    if (s.contains("lambdas")) {
      if (!s["lambdas"].is_array()) throw ConfigError("sweep.lambdas", "expected an array");
      for (const auto& v : s["lambdas"]) c.sweep.lambdas.push_back(number(v, "sweep.lambdas"));
    }
    c.sweep.adjust_strength = flag(s, "adjust_strength", "sweep", true);
    c.sweep.reference_lambda = number(s, "reference_lambda", "sweep", 3.0);
    c.sweep.reference_peak = number(s, "reference_peak", "sweep", c.sweep.reference_peak);
  }

  c.simd = text(doc, "simd", "", "auto");
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  c.material.validate();
  if (!(c.lambda >= 1.0)) throw ConfigError("model.lambda", "horizon factor must be >= 1");
  c.correction.validate();
  if (c.boundary.empty() && c.loads.empty() && c.program.steps > 0 && !c.program.monitor_group.empty())
    throw ConfigError("boundary", "a monitored run needs at least one boundary or load block");
  const auto& p = c.program;
  if (p.steps == 0) throw ConfigError("program.steps", "must be at least 1");
  if (p.break_batch == 0) throw ConfigError("program.break_batch", "must be at least 1");
  if (!(p.tolerance > 0.0)) throw ConfigError("program.tolerance", "must be positive");
  if (p.max_nr_iterations == 0) throw ConfigError("program.max_nr_iterations", "must be at least 1");
  if (p.max_break_rounds == 0) throw ConfigError("program.max_break_rounds", "must be at least 1");
  if (p.stop_below_peak_fraction < 0.0 || p.stop_below_peak_fraction >= 1.0)
    throw ConfigError("program.stop_below_peak_fraction", "must lie in [0, 1)");
  for (std::size_t i = 0; i < c.boundary.size(); ++i)
    if (!c.boundary[i].value.table.empty() && c.boundary[i].value.table.size() < p.steps)
      throw ConfigError("boundary[" + std::to_string(i) + "].table", "shorter than program.steps");
  for (std::size_t i = 0; i < c.loads.size(); ++i)
    if (!c.loads[i].total.table.empty() && c.loads[i].total.table.size() < p.steps)
      throw ConfigError("loads[" + std::to_string(i) + "].table", "shorter than program.steps");
  for (double l : c.sweep.lambdas)
    if (!(l >= 1.0)) throw ConfigError("sweep.lambdas", "horizon factors must be >= 1");
  if (!(c.sweep.reference_lambda >= 1.0)) throw ConfigError("sweep.reference_lambda", "must be >= 1");
  if (!(c.sweep.reference_peak > 0.0)) throw ConfigError("sweep.reference_peak", "must be positive");
  if (c.simd != "auto" && c.simd != "scalar" && c.simd != "avx2")
    throw ConfigError("simd", "expected auto, scalar or avx2");
}

void check_groups(const RunConfig& c, const Mesh& mesh) {
  const auto need = [&](const std::string& group, const std::string& field) {
    if (!mesh.find_group(group)) {
      std::string known;
      for (const auto& g : mesh.groups) known += (known.empty() ? "" : ", ") + g.name;
      throw ConfigError(field, "unknown physical group \"" + group + "\" (mesh has: " + known + ")");
    }
  };
  for (std::size_t i = 0; i < c.boundary.size(); ++i) need(c.boundary[i].group, "boundary[" + std::to_string(i) + "].group");
  for (std::size_t i = 0; i < c.loads.size(); ++i) need(c.loads[i].group, "loads[" + std::to_string(i) + "].group");
  if (!c.program.monitor_group.empty()) need(c.program.monitor_group, "program.monitor.group");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string src = ss.str();
  json doc;
  try {
    doc = json::parse(src, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ParseError(error_line(src, e.byte), std::string("config: ") + e.what());
  }
  RunConfig c = parse_config(doc, path.parent_path());
  c.source = path;
  if (c.mesh) {
    check_groups(c, read_msh(*c.mesh));
  } else {
    const auto need = [&](const std::string& g, const std::string& field) {
      if (!c.point_groups.count(g)) throw ConfigError(field, "unknown point group \"" + g + "\"");
    };
    for (std::size_t i = 0; i < c.boundary.size(); ++i) need(c.boundary[i].group, "boundary[" + std::to_string(i) + "].group");
    for (std::size_t i = 0; i < c.loads.size(); ++i) need(c.loads[i].group, "loads[" + std::to_string(i) + "].group");
    if (!c.program.monitor_group.empty()) need(c.program.monitor_group, "program.monitor.group");
  }
  return c;
}

json to_json(const RunConfig& c) {
  json doc;
  if (c.mesh) {
    doc["mesh"] = std::filesystem::absolute(*c.mesh).lexically_normal().string();
  } else {
    doc["points"] = json::array();
    for (const auto& p : c.points) doc["points"].push_back({p[0], p[1], p[2]});
    doc["groups"] = json::object();
    for (const auto& [name, list] : c.point_groups) doc["groups"][name] = list;
  }
  doc["material"] = {{"E", c.material.youngs_modulus},
                     {"nu", c.material.poisson_ratio},
                     {"Ft", c.material.tensile_strength},
                     {"thickness", c.material.thickness},
                     {"plane", to_string(c.material.plane)}};
  doc["model"] = {{"lambda", c.lambda},
                  {"correction",
                   {{"enabled", c.correct},
                    {"probe_strain", c.correction.probe_strain},
                    {"tolerance", c.correction.tolerance},
                    {"max_iterations", c.correction.max_iterations},
                    {"mode", to_string(c.correction.mode)}}}};
  doc["slots"] = json::array();
  for (const auto& s : c.slots) doc["slots"].push_back({s.p.x, s.p.y, s.q.x, s.q.y});
  doc["boundary"] = json::array();
  for (const auto& b : c.boundary)
    doc["boundary"].push_back(schedule_json(b.value, "value", {{"group", b.group}, {"dof", to_string(b.dof)}}));
  doc["loads"] = json::array();
  for (const auto& l : c.loads)
    doc["loads"].push_back(schedule_json(l.total, "total", {{"group", l.group}, {"dof", to_string(l.dof)}}));
  const auto& p = c.program;
  doc["program"] = {{"steps", p.steps},
                    {"break_batch", p.break_batch},
                    {"tolerance", p.tolerance},
                    {"max_nr_iterations", p.max_nr_iterations},
                    {"max_break_rounds", p.max_break_rounds},
                    {"stop_below_peak_fraction", p.stop_below_peak_fraction}};
  if (!p.monitor_group.empty()) doc["program"]["monitor"] = {{"group", p.monitor_group}, {"dof", to_string(p.monitor_dof)}};
  doc["output"] = {{"directory", std::filesystem::absolute(c.output.directory).lexically_normal().string()},
                   {"fields", c.output.fields},
                   {"every", c.output.every}};
  doc["sweep"] = {{"lambdas", c.sweep.lambdas},
                  {"adjust_strength", c.sweep.adjust_strength},
                  {"reference_lambda", c.sweep.reference_lambda},
                  {"reference_peak", c.sweep.reference_peak}};
  doc["simd"] = c.simd;
  return doc;
}

}  // namespace nhpd
