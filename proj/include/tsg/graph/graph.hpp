#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsg/graph/registry.hpp"
#include "tsg/lang/ast.hpp"

namespace tsg::graph {

enum class NodeState { Created, Initialized, Running, Terminated };

const char* to_string(NodeState state);

struct NodeInstance {
  std::string id;
  std::string class_name;
  std::map<int, lang::ConfigValue> static_configs;  // 1-based
  NodeState state = NodeState::Created;
};

/// Output side of an edge. An empty `output` is the node itself (`-->`).
struct EdgeSource {
  std::string node;
  std::optional<int> output;

  bool is_self() const { return !output.has_value(); }
  friend bool operator==(const EdgeSource&, const EdgeSource&) = default;
  friend auto operator<=>(const EdgeSource&, const EdgeSource&) = default;
};

struct EdgeTarget {
  std::string node;
  lang::PortKind kind = lang::PortKind::Input;  // Input or Config
  int index = 0;

  bool is_config() const { return kind == lang::PortKind::Config; }
  friend bool operator==(const EdgeTarget&, const EdgeTarget&) = default;
  friend auto operator<=>(const EdgeTarget&, const EdgeTarget&) = default;
};

struct Edge {
  std::string id;
  EdgeSource src;
  EdgeTarget dst;
  std::string buffer;  // shared by every edge leaving the same output
};

struct ViewGroup {
  std::string view;
  std::vector<std::string> slots;  // edge ids ordered by input index
};

class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string buffer_id(const EdgeSource& src);

class Builder;

/// A resolved troubleshooting graph. Node order is the order in which
/// instances first appear in the document.
class Tsg {
 public:
  const std::vector<NodeInstance>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const lang::TsgDocument& document() const { return doc_; }

  const NodeInstance* find_node(const std::string& id) const;
  NodeInstance* find_node(const std::string& id);
  const Edge* find_edge(const std::string& id) const;

  std::vector<ViewGroup> views() const;

 private:
  friend class Builder;
  friend Tsg build_graph(const lang::TsgDocument&, const NodeRegistry&);
  friend const Edge& add_edge(Tsg&, const NodeRegistry&, EdgeSource, EdgeTarget);
  friend void set_config_value(Tsg&, const NodeRegistry&, const std::string&, int, lang::ConfigValue);

  struct DeclSite {
    std::size_t statement = 0;
    std::optional<std::size_t> endpoint;  // nullopt for a standalone declaration
  };

  NodeInstance& add_node(NodeInstance node);
  const Edge& push_edge(EdgeSource src, EdgeTarget dst);
  lang::NodeDecl* decl_for(const std::string& id);

  std::vector<NodeInstance> nodes_;
  std::map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::size_t next_edge_ = 0;
  lang::TsgDocument doc_;
  std::map<std::string, DeclSite> decl_sites_;
};

/// Resolves a document into instances and edges. Anonymous instances are
/// named `<Class>-<N>` with a per-class counter; names the document binds
/// explicitly are skipped. Throws BuildError on unknown classes, unknown
/// source instances, out-of-range ports, duplicate names, or `-->` aimed at
/// a non-View.
Tsg build_graph(const lang::TsgDocument& doc, const NodeRegistry& registry);

/// Adds an edge at run time and appends the equivalent linking statement to
/// the origin document (naming anonymous endpoints in place if needed).
const Edge& add_edge(Tsg& tsg, const NodeRegistry& registry, EdgeSource src, EdgeTarget dst);

/// Replaces a static configuration argument and mirrors it into the
/// origin document.
void set_config_value(Tsg& tsg, const NodeRegistry& registry, const std::string& instance, int config_index,
                      lang::ConfigValue value);

enum class Direction { Forward, Backward };

struct Neighbor {
  const Edge* edge;
  const NodeInstance* node;
};

/// Forward: outgoing edges ordered by output index (the node-self edge
/// last), then creation. Backward: incoming edges ordered by input index,
/// config links after inputs, then creation.
std::vector<Neighbor> neighbors(const Tsg& tsg, const std::string& instance, Direction direction);

/// Graphviz text. Input links are solid, config links dashed, node-self
/// links dotted.
std::string export_dot(const Tsg& tsg);

/// Buffer ids the engine allocates: one per declared output (variadic
/// outputs up to the highest linked index) plus `<node>.self` for every
/// node linked to a View with `-->`.
struct BufferPlan {
  std::string id;
  std::string node;
  std::optional<int> output;
};
std::vector<BufferPlan> plan_buffers(const Tsg& tsg, const NodeRegistry& registry);

/// Groups "nodes", "outputs", "views" and "decisions".
std::map<std::string, std::vector<std::string>> semantic_groups(const Tsg& tsg, const NodeRegistry& registry);

/// Same instances (id, class, static configuration) and the same multiset
/// of links, ignoring edge ids and run-time state.
bool equivalent(const Tsg& a, const Tsg& b);

}  // namespace tsg::graph
