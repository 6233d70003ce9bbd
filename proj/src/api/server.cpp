#include "tsg/api/server.hpp"

#include <httplib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "tsg/lang/serializer.hpp"

namespace tsg::api {

using engine::Engine;
using nlohmann::json;

json class_json(const graph::NodeClassSpec& spec) {
  auto ports = [](const std::vector<graph::PortDoc>& list) {
    json out = json::array();
    for (const auto& p : list) out.push_back({{"name", p.name}, {"doc", p.doc}});
    return out;
  };
  json configs = json::array();
  for (std::size_t i = 0; i < spec.configs.size(); ++i)
    configs.push_back({{"index", i + 1}, {"name", spec.configs[i].name}, {"doc", spec.configs[i].doc},
                       {"required", spec.configs[i].required}});
  return {{"class", spec.class_name},
          {"doc", spec.doc},
          {"inputs", ports(spec.inputs)},
          {"outputs", ports(spec.outputs)},
          {"configs", configs},
          {"variadic_inputs", spec.variadic_inputs},
          {"variadic_outputs", spec.variadic_outputs},
          {"variadic_configs", spec.variadic_configs},
          {"is_view", spec.is_view}};
}

json edge_json(const graph::Edge& e) {
  json src = {{"node", e.src.node}};
  src["output"] = e.src.output ? json(*e.src.output) : json(nullptr);
  const char* style = e.src.is_self() ? "dotted" : e.dst.is_config() ? "dashed" : "solid";
  return {{"id", e.id},
          {"src", src},
          {"dst", {{"node", e.dst.node}, {"kind", e.dst.is_config() ? "config" : "input"}, {"index", e.dst.index}}},
          {"buffer", e.buffer},
          {"style", style}};
}

json record_json(const engine::BufferRecord& r) {
  return {{"seq", r.seq},
          {"timestamp", r.timestamp},
          {"origin", engine::to_string(r.origin)},
          {"kind", engine::to_string(r.kind)},
          {"text", r.text}};
}

json topology_json(const Engine& engine, std::uint64_t revision) {
  const graph::Tsg& tsg = engine.tsg();
  json nodes = json::array();
  json classes = json::object();
  for (const auto& n : tsg.nodes()) {
    json configs = json::object();
    for (const auto& [index, value] : n.static_configs)
      configs[std::to_string(index)] = lang::serialize_value(value);
    nodes.push_back({{"id", n.id}, {"class", n.class_name}, {"state", graph::to_string(n.state)}, {"configs", configs}});
    if (const auto* spec = engine.registry().find(n.class_name)) classes[n.class_name] = class_json(*spec);
  }
  json edges = json::array();
  for (const auto& e : tsg.edges()) edges.push_back(edge_json(e));
  json views = json::array();
  for (const auto& v : tsg.views()) views.push_back({{"view", v.view}, {"slots", v.slots}});
  json buffers = json::array();
  for (const engine::Buffer* b : engine.buffers()) {
    json entry = {{"id", b->id()}, {"node", b->owner()}, {"length", b->size()}};
    entry["output"] = b->output() ? json(*b->output()) : json(nullptr);
    buffers.push_back(entry);
  }
  return {{"revision", revision},
          {"nodes", nodes},
          {"edges", edges},
          {"views", views},
          {"buffers", buffers},
          {"groups", graph::semantic_groups(tsg, engine.registry())},
          {"classes", classes}};
}

std::size_t write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("cannot write '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot replace '" + path + "'");
  }
  return text.size();
}

namespace {

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, const std::string& message) : std::runtime_error(message), status(status) {}
  int status;
};

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw HttpError(400, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw HttpError(400, std::string("malformed JSON: ") + e.what());
  }
}

std::uint64_t query_number(const httplib::Request& req, const char* key, std::uint64_t fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string v = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const unsigned long long n = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(key);
    return n;
  } catch (const std::exception&) {
    throw HttpError(400, std::string("bad '") + key + "' parameter");
  }
}

int json_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_number_integer()) throw HttpError(400, std::string("'") + key + "' must be an integer");
  return j[key].get<int>();
}

graph::EdgeSource parse_source(const json& j) {
  if (!j.is_object() || !j.contains("node") || !j["node"].is_string())
    throw HttpError(400, "'src' needs a node name");
  graph::EdgeSource src{j["node"].get<std::string>(), std::nullopt};
  if (!j.value("self", false)) src.output = json_int(j, "output", 0);
  return src;
}

graph::EdgeTarget parse_target(const json& j) {
  if (!j.is_object() || !j.contains("node") || !j["node"].is_string())
    throw HttpError(400, "'dst' needs a node name");
  const std::string kind = j.value("kind", "input");
  if (kind != "input" && kind != "config") throw HttpError(400, "'dst.kind' must be input or config");
  return {j["node"].get<std::string>(), kind == "config" ? lang::PortKind::Config : lang::PortKind::Input,
          json_int(j, "index", kind == "config" ? 1 : 0)};
}

}  // namespace

struct ApiServer::Impl {
  EngineLoop* loop;
  ApiOptions options;
  EventHub* hub;
  httplib::Server server;
  std::thread thread;
  int listener = -1;

  template <typename F>
  auto engine_call(F&& f) {
    if (!loop) throw HttpError(503, "no engine attached");
    try {
      return loop->call(std::forward<F>(f));
    } catch (const LoopStopped& e) {
      throw HttpError(503, e.what());
    }
  }

  template <typename H>
  auto guarded(H handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const HttpError& e) {
        send(res, e.status, {{"error", e.what()}});
      } catch (const graph::BuildError& e) {
        send(res, 400, {{"error", e.what()}});
      } catch (const engine::EngineError& e) {
        send(res, 400, {{"error", e.what()}});
      } catch (const std::invalid_argument& e) {
        send(res, 400, {{"error", e.what()}});
      } catch (const std::exception& e) {
        send(res, 500, {{"error", e.what()}});
      }
    };
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Get("/api/v1/status", guarded([this](const httplib::Request&, httplib::Response& res) {
      send(res, 200, engine_call([this](Engine& e) {
             return json{{"running", e.running()},
                         {"revision", loop->revision()},
                         {"errors", e.error_count()},
                         {"events", e.events().size()},
                         {"queue", e.queue()},
                         {"now", e.clock().now()},
                         {"virtual_clock", e.clock().is_virtual()}};
           }));
    }));

    server.Get("/api/v1/topology", guarded([this](const httplib::Request&, httplib::Response& res) {
      send(res, 200, engine_call([this](Engine& e) { return topology_json(e, loop->revision()); }));
    }));

    server.Get("/api/v1/classes", guarded([this](const httplib::Request&, httplib::Response& res) {
      send(res, 200, engine_call([](Engine& e) {
             json out = json::array();
             for (const auto& name : e.registry().class_names()) out.push_back(class_json(e.registry().at(name)));
             return out;
           }));
    }));

    server.Get(R"(/api/v1/classes/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string name = req.matches[1];
      send(res, 200, engine_call([&](Engine& e) {
             const auto* spec = e.registry().find(name);
             if (!spec) throw HttpError(404, "unknown node class '" + name + "'");
             return class_json(*spec);
           }));
    }));

    server.Get("/api/v1/buffers", guarded([this](const httplib::Request&, httplib::Response& res) {
      send(res, 200, engine_call([](Engine& e) { return topology_json(e, 0)["buffers"]; }));
    }));

    server.Get(R"(/api/v1/buffers/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const std::uint64_t from = query_number(req, "from", 0);
      const std::uint64_t limit = std::min<std::uint64_t>(query_number(req, "limit", 100), options.page_cap);
      send(res, 200, engine_call([&](Engine& e) {
             const engine::Buffer* b = e.buffer(id);
             if (!b) throw HttpError(404, "unknown buffer '" + id + "'");
             json records = json::array();
             std::uint64_t seq = from;
             for (; seq < b->size() && seq - from < limit; ++seq) records.push_back(record_json(b->at(seq)));
             return json{{"buffer", id}, {"length", b->size()}, {"records", records},
                         {"next", std::max<std::uint64_t>(seq, from)}};
           }));
    }));

    server.Post(R"(/api/v1/buffers/([^/]+)/inject)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const json body = body_of(req);
      if (!body.contains("text") || !body["text"].is_string()) throw HttpError(400, "'text' must be a string");
      const std::string text = body["text"];
      send(res, 200, engine_call([&](Engine& e) {
             if (!e.buffer(id)) throw HttpError(404, "unknown buffer '" + id + "'");
             return json{{"buffer", id}, {"seq", e.inject(id, text)}};
           }));
    }));

    server.Post("/api/v1/edges", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = body_of(req);
      graph::EdgeSource src = parse_source(body.value("src", json()));
      graph::EdgeTarget dst = parse_target(body.value("dst", json()));
      send(res, 201, engine_call([&](Engine& e) {
             if (!e.running()) throw HttpError(409, "engine is not running");
             const graph::Edge& edge = e.add_edge(src, dst);
             json out = edge_json(edge);
             return json{{"edge", out}, {"revision", loop->bump_revision()}};
           }));
    }));

    server.Put(R"(/api/v1/nodes/([^/]+)/config/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string node = req.matches[1];
      const int index = std::stoi(req.matches[2]);
      const json body = body_of(req);
      if (!body.contains("value")) throw HttpError(400, "'value' is required");
      const lang::ConfigValue value = body["value"].is_null() ? lang::ConfigValue::nil()
                                      : body["value"].is_string()
                                          ? lang::ConfigValue::from_text(body["value"].get<std::string>())
                                          : lang::ConfigValue::from_text(body["value"].dump());
      send(res, 200, engine_call([&](Engine& e) {
             if (!e.running()) throw HttpError(409, "engine is not running");
             if (!e.tsg().find_node(node)) throw HttpError(404, "unknown instance '" + node + "'");
             e.set_config(node, index, value);
             return json{{"node", node}, {"index", index}, {"value", lang::serialize_value(value)},
                         {"revision", loop->bump_revision()}};
           }));
    }));

    server.Get(R"(/api/v1/nodes/([^/]+)/neighbors)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string node = req.matches[1];
      const std::string direction = req.has_param("direction") ? req.get_param_value("direction") : "forward";
      if (direction != "forward" && direction != "backward" && direction != "outputs")
        throw HttpError(400, "direction must be forward, backward or outputs");
      send(res, 200, engine_call([&](Engine& e) {
             if (!e.tsg().find_node(node)) throw HttpError(404, "unknown instance '" + node + "'");
             json out = json::array();
             if (direction == "outputs") {
               for (const engine::Buffer* b : e.buffers())
                 if (b->owner() == node)
                   out.push_back({{"buffer", b->id()}, {"output", b->output() ? json(*b->output()) : json(nullptr)},
                                  {"length", b->size()}});
             } else {
               const auto dir = direction == "forward" ? graph::Direction::Forward : graph::Direction::Backward;
               for (const auto& n : graph::neighbors(e.tsg(), node, dir))
                 out.push_back({{"node", n.node->id}, {"edge", edge_json(*n.edge)}});
             }
             return json{{"node", node}, {"direction", direction}, {"neighbors", out}};
           }));
    }));

    server.Post("/api/v1/commit", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = body_of(req);
      const std::string path = body.value("path", options.document_path);
      if (path.empty()) throw HttpError(400, "no document path");
      auto [text, revision] = engine_call([this](Engine& e) {
        const std::uint64_t rev = loop->revision();
        std::string t = rev == 0 && !options.original_text.empty() ? options.original_text
                                                                   : lang::serialize_document(e.tsg().document());
        return std::make_pair(std::move(t), rev);
      });
      std::size_t bytes = 0;
      try {
        bytes = write_atomically(path, text);
      } catch (const std::exception& e) {
        throw HttpError(500, e.what());
      }
      send(res, 200, {{"path", path}, {"bytes", bytes}, {"revision", revision}});
    }));

    server.Post("/api/v1/clock", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = body_of(req);
      if (!body.contains("advance_to") || !body["advance_to"].is_number_integer())
        throw HttpError(400, "'advance_to' must be an integer (ms)");
      const engine::Instant t = body["advance_to"].get<engine::Instant>();
      send(res, 200, engine_call([&](Engine& e) {
             if (!e.clock().is_virtual()) throw HttpError(409, "the engine runs on the real clock");
             if (t < e.clock().now()) throw HttpError(400, "cannot move the clock backwards");
             e.advance_to(t);
             return json{{"now", e.clock().now()}};
           }));
    }));

    server.Get("/api/v1/events/log", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::uint64_t since = query_number(req, "since", 0);
      const std::uint64_t limit = std::min<std::uint64_t>(query_number(req, "limit", 100), options.page_cap);
      const EventFilter filter = EventFilter::parse(req.get_param_value("node"), req.get_param_value("kind"),
                                                    req.get_param_value("buffer"));
      send(res, 200, engine_call([&](Engine& e) {
             json out = json::array();
             std::uint64_t next = since;
             for (std::uint64_t i = since; i < e.events().size() && out.size() < limit; ++i) {
               next = i + 1;
               if (filter.matches(e.events()[i])) out.push_back(engine::to_json(e.events()[i]));
             }
             return json{{"events", out}, {"next", next}, {"total", e.events().size()}};
           }));
    }));

    server.Get("/api/v1/events", guarded([this](const httplib::Request& req, httplib::Response& res) {
      EventFilter filter = EventFilter::parse(req.get_param_value("node"), req.get_param_value("kind"),
                                              req.get_param_value("buffer"));
      const bool replay = req.has_param("since");
      const std::uint64_t since = query_number(req, "since", 0);
      auto sub = engine_call([&](Engine& e) {
        std::vector<engine::EngineEvent> backlog;
        if (replay)
          for (std::uint64_t i = since; i < e.events().size(); ++i) backlog.push_back(e.events()[i]);
        return hub->subscribe(std::move(filter), backlog);
      });
      res.set_header("Cache-Control", "no-cache");
      EventHub* h = hub;
      res.set_chunked_content_provider(
          "text/event-stream",
          [sub](std::size_t, httplib::DataSink& sink) {
            std::vector<StreamMessage> batch;
            const bool more = sub->next(batch, std::chrono::milliseconds(200));
            for (const auto& m : batch) {
              const std::string text = format_sse(m);
              if (!sink.write(text.data(), text.size())) return false;
            }
            if (!more) sink.done();
            return true;
          },
          [h, sub](bool) { h->unsubscribe(sub); });
    }));
  }
};

ApiServer::ApiServer(EngineLoop* loop, ApiOptions options)
    : hub_(std::make_unique<EventHub>(options.event_queue_capacity)), impl_(std::make_unique<Impl>()) {
  impl_->loop = loop;
  impl_->options = std::move(options);
  impl_->hub = hub_.get();
  impl_->routes();
  if (loop) {
    EventHub* hub = hub_.get();
    impl_->listener = loop->call([hub](Engine& e) { return e.subscribe([hub](const engine::EngineEvent& ev) { hub->publish(ev); }); });
  }
}

ApiServer::~ApiServer() {
  stop();
  if (impl_->loop && impl_->listener >= 0) {
    try {
      const int token = impl_->listener;
      impl_->loop->call([token](Engine& e) { e.unsubscribe(token); });
    } catch (const LoopStopped&) {
      impl_->loop->engine().unsubscribe(impl_->listener);
    }
  }
}

int ApiServer::start(const std::string& host, int port) {
  if (impl_->thread.joinable()) throw std::runtime_error("API server already running");
  port_ = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) {
    port_ = 0;
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

bool ApiServer::listen(const std::string& host, int port) {
  port_ = port;
  return impl_->server.listen(host, port);
}

void ApiServer::stop() {
  hub_->close();
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace tsg::api
