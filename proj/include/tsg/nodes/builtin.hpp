#pragma once

#include "tsg/graph/registry.hpp"

namespace tsg::nodes {

/// Adds every built-in node class to `registry`.
void register_builtin_nodes(graph::NodeRegistry& registry);

graph::NodeRegistry make_builtin_registry();

}  // namespace tsg::nodes
