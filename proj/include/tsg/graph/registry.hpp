#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsg::engine {
class NodeContext;
}

namespace tsg::graph {

struct PortDoc {
  std::string name;
  std::string doc;
};

struct ConfigDoc {
  std::string name;
  std::string doc;
  bool required = false;
};

using NodeCallback = std::function<void(engine::NodeContext&)>;

struct NodeCallbacks {
  NodeCallback init;
  NodeCallback exec;
  NodeCallback term;
};

/// Self-description of a node class plus its life-cycle behaviour.
///
/// Port lists document the fixed ports. A variadic side accepts any index;
/// indices past the documented list are named `<last-name>-<index>`.
struct NodeClassSpec {
  std::string class_name;
  std::string doc;
  std::vector<PortDoc> inputs;
  std::vector<ConfigDoc> configs;  // index 1 is configs[0]
  std::vector<PortDoc> outputs;
  bool variadic_inputs = false;
  bool variadic_configs = false;
  bool variadic_outputs = false;
  bool is_view = false;
  NodeCallbacks callbacks;

  bool accepts_input(int index) const;
  bool accepts_output(int index) const;
  bool accepts_config(int index) const;  // 1-based
  std::string input_name(int index) const;
  std::string output_name(int index) const;
  std::string config_name(int index) const;
};

class RegistryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Name → NodeClassSpec table. Always contains the built-in `View` class.
class NodeRegistry {
 public:
  NodeRegistry();

  /// Throws RegistryError on a duplicate name, a missing life-cycle
  /// callback, or empty documentation.
  void register_class(NodeClassSpec spec);

  const NodeClassSpec* find(std::string_view class_name) const;
  const NodeClassSpec& at(std::string_view class_name) const;
  bool contains(std::string_view class_name) const { return find(class_name) != nullptr; }
  std::vector<std::string> class_names() const;

 private:
  std::map<std::string, NodeClassSpec, std::less<>> classes_;
};

inline constexpr std::string_view kViewClass = "View";

}  // namespace tsg::graph
