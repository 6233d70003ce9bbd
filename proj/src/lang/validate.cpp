#include "tsg/lang/validate.hpp"

#include <map>
#include <set>

namespace tsg::lang {

namespace {

using graph::NodeClassSpec;
using graph::NodeRegistry;

class Validator {
 public:
  Validator(const TsgDocument& doc, const NodeRegistry& registry) : doc_(doc), reg_(registry) {}

  std::vector<Diagnostic> run() {
    collect();
    for (const Statement& st : doc_.statements)
      if (const auto* chain = std::get_if<LinkChain>(&st)) check_chain(*chain);
    check_required_configs();
    return std::move(out_);
  }

 private:
  const TsgDocument& doc_;
  const NodeRegistry& reg_;
  std::vector<Diagnostic> out_;
  std::map<std::string, const NodeDecl*> declared_;
  std::set<std::pair<std::string, int>> linked_configs_;  // (instance, config index)

  void error(const SourceSpan& span, std::string msg) { out_.push_back({Severity::Error, std::move(msg), span}); }
  void warn(const SourceSpan& span, std::string msg) { out_.push_back({Severity::Warning, std::move(msg), span}); }

  void collect() {
    for (const NodeDecl* d : collect_declarations(doc_)) {
      const NodeClassSpec* spec = reg_.find(d->class_name);
      if (!spec) {
        error(d->span, "unknown node class '" + d->class_name + "'");
      } else if (!spec->variadic_configs && d->args.size() > spec->configs.size()) {
        error(d->span, "too many configuration arguments for " + d->class_name + ": " +
                           std::to_string(d->args.size()) + " given, " + std::to_string(spec->configs.size()) +
                           " declared");
      }
      if (!d->name) continue;
      auto [it, fresh] = declared_.emplace(*d->name, d);
      if (!fresh) error(d->span, "duplicate instance name '" + *d->name + "'");
    }
  }

  // Class spec of an endpoint, or nullptr when it cannot be resolved (the
  // problem has already been reported). `as_source` selects the rules for
  // the left side of an operator.
  const NodeClassSpec* resolve(const Endpoint& ep, bool as_source, std::string& instance) {
    if (const NodeDecl* d = ep.decl()) {
      instance = d->name ? *d->name : "";
      return reg_.find(d->class_name);
    }
    instance = *ep.reference();
    auto it = declared_.find(instance);
    if (it != declared_.end()) return reg_.find(it->second->class_name);
    if (as_source) {
      error(ep.span, "unknown instance '" + instance + "'");
      return nullptr;
    }
    return reg_.find(graph::kViewClass);
  }

  void check_chain(const LinkChain& chain) {
    for (std::size_t i = 0; i < chain.ops.size(); ++i) {
      const Endpoint& left = chain.endpoints[i];
      const Endpoint& right = chain.endpoints[i + 1];
      std::string left_name, right_name;
      const NodeClassSpec* src = resolve(left, true, left_name);
      const NodeClassSpec* dst = resolve(right, false, right_name);

      const std::vector<PortRef> in_ports = right.input_ports.value_or(std::vector<PortRef>{{PortKind::Input, 0}});
      if (dst) {
        for (const PortRef& p : in_ports) {
          if (p.kind == PortKind::Config) {
            if (!dst->accepts_config(p.index))
              error(right.span, "config index -" + std::to_string(p.index) + " out of range for " + dst->class_name);
            else if (!right_name.empty())
              linked_configs_.emplace(right_name, p.index);
          } else if (!dst->accepts_input(p.index)) {
            error(right.span, "input index " + std::to_string(p.index) + " out of range for " + dst->class_name);
          }
        }
      }

      if (chain.ops[i] == LinkOp::SelfLink) {
        if (dst && !dst->is_view)
          error(right.span, "'-->' target '" + (right_name.empty() ? dst->class_name : right_name) + "' is not a View");
        continue;
      }

      const std::vector<PortRef> out_ports = left.output_ports.value_or(std::vector<PortRef>{{PortKind::Output, 0}});
      if (src) {
        for (const PortRef& p : out_ports)
          if (!src->accepts_output(p.index))
            error(left.span, "output index " + std::to_string(p.index) + " out of range for " + src->class_name +
                                 " (" + std::to_string(src->outputs.size()) + " declared)");
      }
      if (out_ports.size() != in_ports.size())
        error(chain.span, "port list arity mismatch " + std::to_string(out_ports.size()) + " vs " +
                              std::to_string(in_ports.size()));
    }
  }

  void check_required_configs() {
    for (const NodeDecl* d : collect_declarations(doc_)) {
      const NodeClassSpec* spec = reg_.find(d->class_name);
      if (!spec) continue;
      for (std::size_t i = 0; i < spec->configs.size(); ++i) {
        if (!spec->configs[i].required) continue;
        const int index = static_cast<int>(i) + 1;
        const bool given = i < d->args.size() && !d->args[i].is_nil();
        const bool linked = d->name && linked_configs_.count({*d->name, index});
        if (!given && !linked)
          warn(d->span, d->class_name + " requires configuration argument " + std::to_string(index) + " (" +
                            spec->configs[i].name + ")");
      }
    }
  }
};

}  // namespace

std::vector<Diagnostic> validate_document(const TsgDocument& doc, const graph::NodeRegistry& registry) {
  return Validator(doc, registry).run();
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

std::string format_diagnostic(const Diagnostic& d, const std::string& source_name) {
  return source_name + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " +
         (d.severity == Severity::Error ? "error: " : "warning: ") + d.message;
}

}  // namespace tsg::lang
