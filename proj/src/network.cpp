#include "mvf/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include "json.hpp"
#include "mvf/errors.hpp"

namespace mvf {

namespace {

std::string class_to_string(VesselClass c) {
  switch (c) {
    case VesselClass::arterial: return "arterial";
    case VesselClass::venous: return "venous";
    case VesselClass::capillary: return "capillary";
    default: return "unlabeled";
  }
}

VesselClass class_from_string(const std::string& s) {
  if (s == "arterial") return VesselClass::arterial;
  if (s == "venous") return VesselClass::venous;
  if (s == "capillary") return VesselClass::capillary;
  if (s == "unlabeled") return VesselClass::unlabeled;
  throw ParseError("unknown vessel class '" + s + "'");
}

}  // namespace

void VascularNetwork::finalize(const RheologyParams& rheology) {
  adjacency.assign(nodes.size(), {});
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id != static_cast<int>(i))
      throw ValidationError("node ids must be dense and ordered after load");
    bool has_p = nodes[i].boundary_pressure.has_value();
    if ((nodes[i].kind == NodeKind::boundary) != has_p)
      throw ValidationError("node " + std::to_string(i) +
                            ": boundary_pressure present iff node is a boundary node");
  }
  for (size_t k = 0; k < segments.size(); ++k) {
    Segment& s = segments[k];
    s.id = static_cast<int>(k);
    if (s.n1 < 0 || s.n1 >= static_cast<int>(nodes.size()) || s.n2 < 0 ||
        s.n2 >= static_cast<int>(nodes.size()))
      throw ValidationError("segment " + std::to_string(k) + ": unknown node");
    if (s.n1 == s.n2)
      throw ValidationError("segment " + std::to_string(k) + ": endpoints must be distinct");
    if (s.radius <= 0.0)
      throw ValidationError("segment " + std::to_string(k) + ": radius must be positive");
    s.length = norm(nodes[s.n2].position - nodes[s.n1].position);
    if (s.length <= 0.0)
      throw ValidationError("segment " + std::to_string(k) + ": zero length");
    s.mu_bl = in_vivo_viscosity(dimensionless_diameter(2.0 * s.radius), rheology);
    adjacency[s.n1].push_back(s.id);
    adjacency[s.n2].push_back(s.id);
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind == NodeKind::boundary && adjacency[i].size() != 1)
      throw ValidationError("boundary node " + std::to_string(i) + " has degree " +
                            std::to_string(adjacency[i].size()) + ", expected 1");
  }

  // Connectivity over the segment graph.
  if (nodes.empty()) throw ValidationError("network has no nodes");
  std::vector<int> component(nodes.size(), -1);
  int n_comp = 0;
  for (size_t start = 0; start < nodes.size(); ++start) {
    if (component[start] >= 0) continue;
    std::queue<int> bfs;
    bfs.push(static_cast<int>(start));
    component[start] = n_comp;
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      for (int sid : adjacency[u]) {
        int v = other_end(sid, u);
        if (component[v] < 0) {
          component[v] = n_comp;
          bfs.push(v);
        }
      }
    }
    ++n_comp;
  }
  if (n_comp > 1) {
    std::vector<int> sizes(n_comp, 0);
    for (int c : component) sizes[c]++;
    std::ostringstream msg;
    msg << "network graph is disconnected: " << n_comp << " components of sizes";
    for (int s : sizes) msg << " " << s;
    throw ValidationError(msg.str());
  }
}

std::vector<int> VascularNetwork::boundary_node_ids() const {
  std::vector<int> out;
  for (const auto& n : nodes)
    if (n.kind == NodeKind::boundary) out.push_back(n.id);
  return out;
}

VascularNetwork parse_network_json(const std::string& text, const RheologyParams& rheology,
                                   double merge_tol) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("network JSON: ") + e.what());
  }
  if (!j.contains("nodes") || !j.contains("segments"))
    throw ParseError("network JSON: missing 'nodes' or 'segments' array");

  struct RawNode {
    int id;
    Vec3 pos;
    std::optional<double> pressure;
    VesselClass cls;
  };
  std::vector<RawNode> raw;
  raw.reserve(j["nodes"].size());
  size_t record = 0;
  try {
    for (const auto& n : j["nodes"]) {
      RawNode r;
      r.id = n.at("id").get<int>();
      r.pos = {n.at("x").get<double>(), n.at("y").get<double>(), n.at("z").get<double>()};
      if (n.contains("boundary_pressure")) r.pressure = n["boundary_pressure"].get<double>();
      r.cls = n.contains("class") ? class_from_string(n["class"].get<std::string>())
                                  : VesselClass::unlabeled;
      raw.push_back(r);
      ++record;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("network JSON: node record " + std::to_string(record) + ": " + e.what());
  }

  // Merge nodes that coincide within merge_tol (quadratic scan over a
  // position-sorted order keeps it near-linear for real inputs).
  std::vector<int> order(raw.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return raw[a].pos.x < raw[b].pos.x; });
  std::vector<int> merge_target(raw.size(), -1);
  for (size_t a = 0; a < order.size(); ++a) {
    int ia = order[a];
    if (merge_target[ia] >= 0) continue;
    for (size_t b = a + 1; b < order.size(); ++b) {
      int ib = order[b];
      if (raw[ib].pos.x - raw[ia].pos.x > merge_tol) break;
      if (merge_target[ib] >= 0) continue;
      if (norm(raw[ib].pos - raw[ia].pos) <= merge_tol) {
        if (raw[ia].pressure && raw[ib].pressure && *raw[ia].pressure != *raw[ib].pressure)
          throw ValidationError("duplicate nodes " + std::to_string(raw[ia].id) + " and " +
                                std::to_string(raw[ib].id) +
                                " carry conflicting boundary pressures");
        if (!raw[ia].pressure && raw[ib].pressure) raw[ia].pressure = raw[ib].pressure;
        if (raw[ia].cls == VesselClass::unlabeled) raw[ia].cls = raw[ib].cls;
        merge_target[ib] = ia;
      }
    }
  }

  VascularNetwork net;
  std::map<int, int> id_map;  // original id -> dense id
  for (size_t i = 0; i < raw.size(); ++i) {
    if (merge_target[i] >= 0) continue;
    NetworkNode n;
    n.id = static_cast<int>(net.nodes.size());
    n.position = raw[i].pos;
    n.boundary_pressure = raw[i].pressure;
    n.kind = raw[i].pressure ? NodeKind::boundary : NodeKind::interior;
    n.vessel_class = raw[i].cls;
    if (id_map.count(raw[i].id))
      throw ParseError("network JSON: duplicate node id " + std::to_string(raw[i].id));
    id_map[raw[i].id] = n.id;
    net.nodes.push_back(n);
  }
  for (size_t i = 0; i < raw.size(); ++i)
    if (merge_target[i] >= 0) id_map[raw[i].id] = id_map[raw[merge_target[i]].id];

  record = 0;
  try {
    for (const auto& s : j["segments"]) {
      Segment seg;
      int o1 = s.at("n1").get<int>();
      int o2 = s.at("n2").get<int>();
      auto i1 = id_map.find(o1);
      auto i2 = id_map.find(o2);
      if (i1 == id_map.end())
        throw ValidationError("segment record " + std::to_string(record) + ": unknown node " +
                              std::to_string(o1));
      if (i2 == id_map.end())
        throw ValidationError("segment record " + std::to_string(record) + ": unknown node " +
                              std::to_string(o2));
      seg.n1 = i1->second;
      seg.n2 = i2->second;
      seg.radius = s.at("radius").get<double>();
      net.segments.push_back(seg);
      ++record;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("network JSON: segment record " + std::to_string(record) + ": " + e.what());
  }

  net.finalize(rheology);
  return net;
}

VascularNetwork load_network(const std::string& path, const RheologyParams& rheology,
                             double merge_tol) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_network_json(buf.str(), rheology, merge_tol);
}

std::string network_to_json(const VascularNetwork& net) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : net.nodes) {
    nlohmann::json e;
    e["id"] = n.id;
    e["x"] = n.position.x;
    e["y"] = n.position.y;
    e["z"] = n.position.z;
    if (n.boundary_pressure) e["boundary_pressure"] = *n.boundary_pressure;
    if (n.vessel_class != VesselClass::unlabeled) e["class"] = class_to_string(n.vessel_class);
    j["nodes"].push_back(e);
  }
  j["segments"] = nlohmann::json::array();
  for (const auto& s : net.segments) {
    nlohmann::json e;
    e["id"] = s.id;
    e["n1"] = s.n1;
    e["n2"] = s.n2;
    e["radius"] = s.radius;
    j["segments"].push_back(e);
  }
  return j.dump(2);
}

VascularNetwork prune_dead_ends(const VascularNetwork& net, const RheologyParams& rheology) {
  std::vector<bool> node_alive(net.nodes.size(), true);
  std::vector<bool> seg_alive(net.segments.size(), true);
  std::vector<int> degree(net.nodes.size());
  for (size_t i = 0; i < net.nodes.size(); ++i) degree[i] = net.degree(static_cast<int>(i));

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < net.nodes.size(); ++i) {
      if (!node_alive[i] || net.nodes[i].kind == NodeKind::boundary) continue;
      if (degree[i] == 1) {
        for (int sid : net.adjacency[i]) {
          if (!seg_alive[sid]) continue;
          seg_alive[sid] = false;
          int other = net.other_end(sid, static_cast<int>(i));
          degree[other]--;
        }
        node_alive[i] = false;
        degree[i] = 0;
        changed = true;
      } else if (degree[i] == 0) {
        node_alive[i] = false;  // isolated leftover
        changed = true;
      }
    }
  }

  VascularNetwork out;
  std::vector<int> remap(net.nodes.size(), -1);
  for (size_t i = 0; i < net.nodes.size(); ++i) {
    if (!node_alive[i]) continue;
    NetworkNode n = net.nodes[i];
    n.id = static_cast<int>(out.nodes.size());
    remap[i] = n.id;
    out.nodes.push_back(n);
  }
  for (const auto& s : net.segments) {
    if (!seg_alive[s.id]) continue;
    Segment ns = s;
    ns.n1 = remap[s.n1];
    ns.n2 = remap[s.n2];
    out.segments.push_back(ns);
  }
  if (out.nodes.empty() || out.segments.empty())
    throw ValidationError("dead-end pruning removed the entire network");
  out.finalize(rheology);
  return out;
}

std::pair<std::set<int>, std::set<int>> split_by_threshold(const VascularNetwork& net,
                                                           double threshold_radius) {
  if (threshold_radius < 0.0)
    throw ValidationError("split_by_threshold: threshold must be non-negative");
  std::set<int> large, capillary;
  for (const auto& s : net.segments) {
    if (s.radius >= threshold_radius)
      large.insert(s.id);
    else
      capillary.insert(s.id);
  }
  return {large, capillary};
}

void validate_positions(const VascularNetwork& net, const Box3& domain) {
  for (const auto& n : net.nodes)
    if (!domain.contains(n.position))
      throw ValidationError("node " + std::to_string(n.id) + " lies outside the domain box");
}

}  // namespace mvf
