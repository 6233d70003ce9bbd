#include "tsg/graph/graph.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <sstream>
#include <tuple>

namespace tsg::graph {

using lang::ConfigValue;
using lang::Endpoint;
using lang::LinkChain;
using lang::LinkOp;
using lang::NodeDecl;
using lang::PortKind;
using lang::PortRef;

const char* to_string(NodeState state) {
  switch (state) {
    case NodeState::Created: return "created";
    case NodeState::Initialized: return "initialized";
    case NodeState::Running: return "running";
    case NodeState::Terminated: return "terminated";
  }
  return "?";
}

std::string buffer_id(const EdgeSource& src) {
  return src.is_self() ? src.node + ".self" : src.node + ".out" + std::to_string(*src.output);
}

const NodeInstance* Tsg::find_node(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

NodeInstance* Tsg::find_node(const std::string& id) {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

const Edge* Tsg::find_edge(const std::string& id) const {
  for (const Edge& e : edges_)
    if (e.id == id) return &e;
  return nullptr;
}

std::vector<ViewGroup> Tsg::views() const {
  std::vector<ViewGroup> out;
  for (const NodeInstance& n : nodes_) {
    if (n.class_name != kViewClass) continue;
    std::vector<const Edge*> slots;
    for (const Edge& e : edges_)
      if (e.dst.node == n.id && !e.dst.is_config()) slots.push_back(&e);
    std::stable_sort(slots.begin(), slots.end(),
                     [](const Edge* a, const Edge* b) { return a->dst.index < b->dst.index; });
    ViewGroup g{n.id, {}};
    for (const Edge* e : slots) g.slots.push_back(e->id);
    out.push_back(std::move(g));
  }
  return out;
}

NodeInstance& Tsg::add_node(NodeInstance node) {
  if (index_.count(node.id)) throw BuildError("duplicate instance name '" + node.id + "'");
  index_[node.id] = nodes_.size();
  nodes_.push_back(std::move(node));
  return nodes_.back();
}

const Edge& Tsg::push_edge(EdgeSource src, EdgeTarget dst) {
  Edge e;
  e.id = "e" + std::to_string(next_edge_++);
  e.buffer = buffer_id(src);
  e.src = std::move(src);
  e.dst = std::move(dst);
  edges_.push_back(std::move(e));
  return edges_.back();
}

lang::NodeDecl* Tsg::decl_for(const std::string& id) {
  auto it = decl_sites_.find(id);
  if (it == decl_sites_.end()) return nullptr;
  lang::Statement& st = doc_.statements[it->second.statement];
  if (!it->second.endpoint) return &std::get<NodeDecl>(st);
  auto& ep = std::get<LinkChain>(st).endpoints[*it->second.endpoint];
  return &std::get<NodeDecl>(ep.target);
}

namespace {

void check_target(const NodeClassSpec& spec, const NodeInstance& node, const EdgeTarget& dst) {
  if (dst.is_config()) {
    if (!spec.accepts_config(dst.index))
      throw BuildError("config index -" + std::to_string(dst.index) + " out of range for " + node.id + " (" +
                       spec.class_name + ")");
  } else if (!spec.accepts_input(dst.index)) {
    throw BuildError("input index " + std::to_string(dst.index) + " out of range for " + node.id + " (" +
                     spec.class_name + ")");
  }
}

void check_source(const NodeClassSpec& src_spec, const NodeInstance& src_node, const EdgeSource& src,
                  const NodeClassSpec& dst_spec, const NodeInstance& dst_node) {
  if (src.is_self()) {
    if (!dst_spec.is_view)
      throw BuildError("node-self link from " + src_node.id + " must target a View, not " + dst_node.id);
    return;
  }
  if (!src_spec.accepts_output(*src.output))
    throw BuildError("output index " + std::to_string(*src.output) + " out of range for " + src_node.id + " (" +
                     src_spec.class_name + ")");
}

}  // namespace

class Builder {
 public:
  Builder(const lang::TsgDocument& doc, const NodeRegistry& reg) : doc_(doc), reg_(reg) {}

  Tsg run() {
    tsg_.doc_ = doc_;
    for (const NodeDecl* d : lang::collect_declarations(doc_)) {
      if (!d->name) continue;
      if (!explicit_names_.insert(*d->name).second) throw BuildError("duplicate instance name '" + *d->name + "'");
    }

    // Instances, in order of first appearance.
    for (std::size_t s = 0; s < doc_.statements.size(); ++s) {
      const auto& st = doc_.statements[s];
      if (const auto* decl = std::get_if<NodeDecl>(&st)) {
        declare(*decl, s, std::nullopt);
        continue;
      }
      const auto& chain = std::get<LinkChain>(st);
      endpoint_ids_.emplace_back();
      for (std::size_t e = 0; e < chain.endpoints.size(); ++e) {
        const Endpoint& ep = chain.endpoints[e];
        if (const NodeDecl* d = ep.decl()) {
          endpoint_ids_.back().push_back(declare(*d, s, e));
        } else {
          const std::string& ref = *ep.reference();
          if (!explicit_names_.count(ref) && !tsg_.find_node(ref)) {
            const bool used_as_source = e + 1 < chain.endpoints.size();
            const bool used_as_target = e > 0;
            if (used_as_source && !used_as_target) throw BuildError("unknown instance '" + ref + "'");
            NodeInstance view;
            view.id = ref;
            view.class_name = std::string(kViewClass);
            tsg_.add_node(std::move(view));
          }
          endpoint_ids_.back().push_back(ref);
        }
      }
    }

    // Edges, in statement order.
    std::size_t chain_no = 0;
    for (const auto& st : doc_.statements) {
      const auto* chain = std::get_if<LinkChain>(&st);
      if (!chain) continue;
      const auto& ids = endpoint_ids_[chain_no++];
      for (std::size_t i = 0; i < chain->ops.size(); ++i) link(*chain, i, ids[i], ids[i + 1]);
    }
    return std::move(tsg_);
  }

 private:
  const lang::TsgDocument& doc_;
  const NodeRegistry& reg_;
  Tsg tsg_;
  std::set<std::string> explicit_names_;
  std::map<std::string, int> anon_counters_;
  std::vector<std::vector<std::string>> endpoint_ids_;  // per link chain

  std::string declare(const NodeDecl& d, std::size_t statement, std::optional<std::size_t> endpoint) {
    if (!reg_.find(d.class_name)) throw BuildError("unknown node class '" + d.class_name + "'");
    const NodeClassSpec& spec = reg_.at(d.class_name);
    if (!spec.variadic_configs && d.args.size() > spec.configs.size())
      throw BuildError("too many configuration arguments for " + d.class_name);
    NodeInstance node;
    if (d.name) {
      node.id = *d.name;
    } else {
      int& n = anon_counters_[d.class_name];
      do {
        node.id = d.class_name + "-" + std::to_string(++n);
      } while (explicit_names_.count(node.id) || tsg_.find_node(node.id));
    }
    node.class_name = d.class_name;
    for (std::size_t i = 0; i < d.args.size(); ++i) node.static_configs[static_cast<int>(i) + 1] = d.args[i];
    tsg_.decl_sites_[node.id] = Tsg::DeclSite{statement, endpoint};
    return tsg_.add_node(std::move(node)).id;
  }

  void link(const LinkChain& chain, std::size_t op_index, const std::string& left, const std::string& right) {
    const Endpoint& lep = chain.endpoints[op_index];
    const Endpoint& rep = chain.endpoints[op_index + 1];
    const std::vector<PortRef> rports = rep.input_ports.value_or(std::vector<PortRef>{{PortKind::Input, 0}});
    const NodeInstance& lnode = *tsg_.find_node(left);
    const NodeInstance& rnode = *tsg_.find_node(right);
    const NodeClassSpec& lspec = reg_.at(lnode.class_name);
    const NodeClassSpec& rspec = reg_.at(rnode.class_name);

    if (chain.ops[op_index] == LinkOp::SelfLink) {
      for (const PortRef& p : rports) {
        EdgeSource src{left, std::nullopt};
        EdgeTarget dst{right, p.kind, p.index};
        check_source(lspec, lnode, src, rspec, rnode);
        check_target(rspec, rnode, dst);
        tsg_.push_edge(std::move(src), std::move(dst));
      }
      return;
    }
    const std::vector<PortRef> lports = lep.output_ports.value_or(std::vector<PortRef>{{PortKind::Output, 0}});
    const std::size_t pairs = std::min(lports.size(), rports.size());
    for (std::size_t k = 0; k < pairs; ++k) {
      EdgeSource src{left, lports[k].index};
      EdgeTarget dst{right, rports[k].kind, rports[k].index};
      check_source(lspec, lnode, src, rspec, rnode);
      check_target(rspec, rnode, dst);
      tsg_.push_edge(std::move(src), std::move(dst));
    }
  }
};

namespace {

Endpoint reference_endpoint(const std::string& id) {
  Endpoint ep;
  ep.target = id;
  return ep;
}

}  // namespace

Tsg build_graph(const lang::TsgDocument& doc, const NodeRegistry& registry) { return Builder(doc, registry).run(); }

const Edge& add_edge(Tsg& tsg, const NodeRegistry& registry, EdgeSource src, EdgeTarget dst) {
  const NodeInstance* src_node = tsg.find_node(src.node);
  if (!src_node) throw BuildError("unknown instance '" + src.node + "'");
  const NodeInstance* dst_node = tsg.find_node(dst.node);
  if (!dst_node) throw BuildError("unknown instance '" + dst.node + "'");
  if (dst.kind == PortKind::Output) throw BuildError("edge target must be an input or a config argument");
  if (src.is_self() && dst.is_config()) throw BuildError("node-self link cannot target a configuration argument");
  const NodeClassSpec& sspec = registry.at(src_node->class_name);
  const NodeClassSpec& dspec = registry.at(dst_node->class_name);
  check_source(sspec, *src_node, src, dspec, *dst_node);
  check_target(dspec, *dst_node, dst);

  // Anonymous endpoints get their generated id written into the document so
  // the appended statement can refer to them.
  for (const std::string* id : {&src.node, &dst.node}) {
    if (lang::NodeDecl* d = tsg.decl_for(*id); d && !d->name) d->name = *id;
  }

  LinkChain chain;
  Endpoint left = reference_endpoint(src.node);
  Endpoint right = reference_endpoint(dst.node);
  if (!src.is_self()) left.output_ports = std::vector<PortRef>{{PortKind::Output, *src.output}};
  right.input_ports = std::vector<PortRef>{{dst.kind, dst.index}};
  chain.endpoints = {std::move(left), std::move(right)};
  chain.ops = {src.is_self() ? LinkOp::SelfLink : LinkOp::Link};
  tsg.doc_.statements.emplace_back(std::move(chain));

  return tsg.push_edge(std::move(src), std::move(dst));
}

void set_config_value(Tsg& tsg, const NodeRegistry& registry, const std::string& instance, int config_index,
                      ConfigValue value) {
  NodeInstance* node = tsg.find_node(instance);
  if (!node) throw BuildError("unknown instance '" + instance + "'");
  if (node->state == NodeState::Terminated) throw BuildError("node terminated: " + instance);
  const NodeClassSpec& spec = registry.at(node->class_name);
  if (!spec.accepts_config(config_index))
    throw BuildError("config index " + std::to_string(config_index) + " out of range for " + instance + " (" +
                     spec.class_name + ")");
  lang::NodeDecl* decl = tsg.decl_for(instance);
  if (!decl) throw BuildError(instance + " has no declaration to configure");
  if (decl->args.size() < static_cast<std::size_t>(config_index)) decl->args.resize(config_index, ConfigValue::nil());
  decl->args[config_index - 1] = value;
  node->static_configs[config_index] = std::move(value);
}

std::vector<Neighbor> neighbors(const Tsg& tsg, const std::string& instance, Direction direction) {
  if (!tsg.find_node(instance)) throw BuildError("unknown instance '" + instance + "'");
  std::vector<std::pair<std::tuple<int, int, std::size_t>, const Edge*>> keyed;
  const auto& edges = tsg.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (direction == Direction::Forward && e.src.node == instance)
      keyed.push_back({{e.src.is_self() ? INT_MAX : *e.src.output, 0, i}, &e});
    else if (direction == Direction::Backward && e.dst.node == instance)
      keyed.push_back({{e.dst.is_config() ? 1 : 0, e.dst.index, i}, &e});
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Neighbor> out;
  for (const auto& [key, e] : keyed) {
    const std::string& other = direction == Direction::Forward ? e->dst.node : e->src.node;
    out.push_back({e, tsg.find_node(other)});
  }
  return out;
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string export_dot(const Tsg& tsg) {
  std::ostringstream out;
  out << "digraph tsg {\n";
  for (const NodeInstance& n : tsg.nodes()) {
    out << "  " << dot_quote(n.id) << " [label=" << dot_quote(n.id + " : " + n.class_name);
    if (n.class_name == kViewClass) out << ", shape=box3d";
    out << "];\n";
  }
  for (const Edge& e : tsg.edges()) {
    out << "  " << dot_quote(e.src.node) << " -> " << dot_quote(e.dst.node) << " [";
    if (e.src.is_self()) {
      out << "style=dotted";
    } else {
      out << (e.dst.is_config() ? "style=dashed" : "style=solid");
      out << ", taillabel=\"" << *e.src.output << "\"";
    }
    out << ", headlabel=\"" << (e.dst.is_config() ? "-" : "") << e.dst.index << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::vector<BufferPlan> plan_buffers(const Tsg& tsg, const NodeRegistry& registry) {
  std::vector<BufferPlan> out;
  for (const NodeInstance& n : tsg.nodes()) {
    const NodeClassSpec& spec = registry.at(n.class_name);
    int count = static_cast<int>(spec.outputs.size());
    bool self = false;
    for (const Edge& e : tsg.edges()) {
      if (e.src.node != n.id) continue;
      if (e.src.is_self()) self = true;
      else count = std::max(count, *e.src.output + 1);
    }
    for (int i = 0; i < count; ++i) {
      EdgeSource src{n.id, i};
      out.push_back({buffer_id(src), n.id, i});
    }
    if (self) out.push_back({buffer_id(EdgeSource{n.id, std::nullopt}), n.id, std::nullopt});
  }
  return out;
}

std::map<std::string, std::vector<std::string>> semantic_groups(const Tsg& tsg, const NodeRegistry& registry) {
  std::map<std::string, std::vector<std::string>> groups{{"nodes", {}}, {"outputs", {}}, {"views", {}}, {"decisions", {}}};
  for (const NodeInstance& n : tsg.nodes()) {
    groups["nodes"].push_back(n.id);
    if (n.class_name == kViewClass) groups["views"].push_back(n.id);
    if (n.class_name == "Decision" || n.class_name == "Decision-summary") groups["decisions"].push_back(n.id);
  }
  for (const BufferPlan& b : plan_buffers(tsg, registry)) groups["outputs"].push_back(b.id);
  return groups;
}

bool equivalent(const Tsg& a, const Tsg& b) {
  if (a.nodes().size() != b.nodes().size() || a.edges().size() != b.edges().size()) return false;
  for (const NodeInstance& n : a.nodes()) {
    const NodeInstance* m = b.find_node(n.id);
    if (!m || m->class_name != n.class_name || m->static_configs != n.static_configs) return false;
  }
  auto links = [](const Tsg& t) {
    std::multiset<std::pair<EdgeSource, EdgeTarget>> s;
    for (const Edge& e : t.edges()) s.insert({e.src, e.dst});
    return s;
  };
  return links(a) == links(b);
}

}  // namespace tsg::graph
