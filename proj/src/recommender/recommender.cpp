#include "tsg/recommender/recommender.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tsg/lang/parser.hpp"

namespace tsg::recommender {

namespace fs = std::filesystem;
using nlohmann::json;

std::map<std::string, std::size_t> count_classes(const lang::TsgDocument& doc) {
  std::map<std::string, std::size_t> counts;
  std::set<std::string> declared;
  for (const lang::NodeDecl* d : lang::collect_declarations(doc)) {
    ++counts[d->class_name];
    if (d->name) declared.insert(*d->name);
  }
  std::set<std::string> views;
  for (const lang::Statement& st : doc.statements) {
    const auto* chain = std::get_if<lang::LinkChain>(&st);
    if (!chain) continue;
    for (std::size_t i = 1; i < chain->endpoints.size(); ++i)
      if (const std::string* ref = chain->endpoints[i].reference())
        if (!declared.count(*ref)) views.insert(*ref);
  }
  if (!views.empty()) counts[std::string(graph::kViewClass)] += views.size();
  return counts;
}

std::vector<std::string> find_tsg_files(const std::string& dir) {
  std::vector<std::string> out;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec))
    if (it->is_regular_file() && it->path().extension() == ".tsg") out.push_back(it->path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace {

json load_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) return json::object();
  try {
    json j = json::parse(in);
    if (j.value("version", 0) == 1 && j.contains("files") && j["files"].is_object()) return j["files"];
  } catch (const json::exception&) {
  }
  return json::object();
}

void save_cache(const std::string& path, const json& files) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) return;
    out << json{{"version", 1}, {"files", files}}.dump(2) << "\n";
    if (!out) return;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
}

}  // namespace

RepositoryIndex index_repository(const std::vector<std::string>& paths, const std::string& cache_path) {
  RepositoryIndex index;
  const json cache = cache_path.empty() ? json::object() : load_cache(cache_path);
  json fresh = json::object();
  for (const std::string& path : paths) {
    IndexedFile file{path, false, "", ""};
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      file.error = "cannot read file";
      index.files.push_back(std::move(file));
      continue;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    file.sha256 = sha256_hex(text);

    json entry;
    if (cache.contains(file.sha256)) {
      entry = cache[file.sha256];
    } else {
      try {
        entry = {{"ok", true}, {"counts", count_classes(lang::parse_document(text, path))}};
      } catch (const lang::ParseError& e) {
        entry = {{"ok", false}, {"error", e.what()}};
      }
    }
    fresh[file.sha256] = entry;
    file.ok = entry.value("ok", false);
    file.error = entry.value("error", "");
    if (file.ok)
      for (const auto& [cls, n] : entry.at("counts").items()) index.counts[cls] += n.get<std::size_t>();
    index.files.push_back(std::move(file));
  }
  if (!cache_path.empty()) save_cache(cache_path, fresh);
  return index;
}

std::vector<Suggestion> PopularityRecommender::recommend(const std::set<std::string>& current_classes, int k) const {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  std::vector<Suggestion> out;
  for (const auto& [cls, n] : index_.counts)
    if (n > 0 && !current_classes.count(cls)) out.emplace_back(cls, n);
  std::stable_sort(out.begin(), out.end(), [](const Suggestion& a, const Suggestion& b) { return a.second > b.second; });
  if (out.size() > static_cast<std::size_t>(k)) out.resize(k);
  return out;
}

void RecommenderSet::add(std::unique_ptr<Recommender> recommender) {
  const std::string name = recommender->name();
  if (!items_.emplace(name, std::move(recommender)).second)
    throw std::invalid_argument("recommender '" + name + "' already registered");
}

const Recommender* RecommenderSet::find(const std::string& name) const {
  auto it = items_.find(name);
  return it == items_.end() ? nullptr : it->second.get();
}

std::vector<std::string> RecommenderSet::names() const {
  std::vector<std::string> out;
  for (const auto& [name, r] : items_) out.push_back(name);
  return out;
}

std::set<std::string> classes_in(const graph::Tsg& tsg) {
  std::set<std::string> out;
  for (const auto& n : tsg.nodes()) out.insert(n.class_name);
  return out;
}

std::vector<Suggestion> recommend_nodes(const RepositoryIndex& index, const std::set<std::string>& current_classes,
                                        int k) {
  return PopularityRecommender(index).recommend(current_classes, k);
}

std::vector<Suggestion> recommend_nodes(const RepositoryIndex& index, const graph::Tsg& current, int k) {
  return recommend_nodes(index, classes_in(current), k);
}

}  // namespace tsg::recommender
