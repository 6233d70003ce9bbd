#include "tsg/graph/registry.hpp"

namespace tsg::graph {

namespace {

bool in_range(int index, std::size_t declared, bool variadic) {
  if (index < 0) return false;
  return variadic || static_cast<std::size_t>(index) < declared;
}

template <typename Doc>
std::string port_name(const std::vector<Doc>& docs, int index, const char* fallback) {
  if (index >= 0 && static_cast<std::size_t>(index) < docs.size()) return docs[index].name;
  const std::string base = docs.empty() ? fallback : docs.back().name;
  return base + "-" + std::to_string(index);
}

}  // namespace

bool NodeClassSpec::accepts_input(int index) const { return in_range(index, inputs.size(), variadic_inputs); }
bool NodeClassSpec::accepts_output(int index) const { return in_range(index, outputs.size(), variadic_outputs); }
bool NodeClassSpec::accepts_config(int index) const {
  return index >= 1 && in_range(index - 1, configs.size(), variadic_configs);
}
std::string NodeClassSpec::input_name(int index) const { return port_name(inputs, index, "in"); }
std::string NodeClassSpec::output_name(int index) const { return port_name(outputs, index, "out"); }
std::string NodeClassSpec::config_name(int index) const { return port_name(configs, index - 1, "arg"); }

NodeRegistry::NodeRegistry() {
  NodeClassSpec view;
  view.class_name = std::string(kViewClass);
  view.doc = "Groups nodes and outputs so they are displayed together. Inputs are display slots.";
  view.inputs = {{"slot", "Grouped node or output"}};
  view.variadic_inputs = true;
  view.is_view = true;
  auto noop = [](engine::NodeContext&) {};
  view.callbacks = {noop, noop, noop};
  classes_.emplace(view.class_name, std::move(view));
}

void NodeRegistry::register_class(NodeClassSpec spec) {
  if (spec.class_name.empty()) throw RegistryError("node class needs a name");
  if (classes_.count(spec.class_name)) throw RegistryError("node class '" + spec.class_name + "' already registered");
  if (!spec.callbacks.init || !spec.callbacks.exec || !spec.callbacks.term)
    throw RegistryError("node class '" + spec.class_name + "' must provide init, exec and term callbacks");
  if (spec.doc.empty()) throw RegistryError("node class '" + spec.class_name + "' has no documentation");
  auto undocumented = [](const auto& list) {
    for (const auto& p : list)
      if (p.name.empty() || p.doc.empty()) return true;
    return false;
  };
  if (undocumented(spec.inputs) || undocumented(spec.outputs) || undocumented(spec.configs))
    throw RegistryError("node class '" + spec.class_name + "' has undocumented interfaces");
  std::string name = spec.class_name;
  classes_.emplace(std::move(name), std::move(spec));
}

const NodeClassSpec* NodeRegistry::find(std::string_view class_name) const {
  auto it = classes_.find(class_name);
  return it == classes_.end() ? nullptr : &it->second;
}

const NodeClassSpec& NodeRegistry::at(std::string_view class_name) const {
  if (const auto* spec = find(class_name)) return *spec;
  throw RegistryError("unknown node class '" + std::string(class_name) + "'");
}

std::vector<std::string> NodeRegistry::class_names() const {
  std::vector<std::string> out;
  for (const auto& [name, spec] : classes_) out.push_back(name);
  return out;
}

}  // namespace tsg::graph
