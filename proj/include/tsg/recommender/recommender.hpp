#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tsg/graph/graph.hpp"
#include "tsg/lang/ast.hpp"

namespace tsg::recommender {

struct IndexedFile {
  std::string path;
  bool ok = false;
  std::string error;  // parse or read failure
  std::string sha256;
};

/// Class-name occurrence counts over the successfully parsed files.
struct RepositoryIndex {
  std::map<std::string, std::size_t> counts;
  std::vector<IndexedFile> files;
};

/// Every declaration (named, anonymous or inline) counts once; each
/// undeclared name used as a link target counts once as View.
std::map<std::string, std::size_t> count_classes(const lang::TsgDocument& doc);

/// All `.tsg` files below `dir`, sorted by path.
std::vector<std::string> find_tsg_files(const std::string& dir);

/// Parses each file and sums the class counts. With a non-empty
/// `cache_path`, per-file counts are looked up by content hash in that
/// JSON file and the file is rewritten with the current entries.
RepositoryIndex index_repository(const std::vector<std::string>& paths, const std::string& cache_path = "");

std::string sha256_hex(const std::string& data);

using Suggestion = std::pair<std::string, std::size_t>;

/// Suggestion source. Implementations must be deterministic in their
/// arguments and safe to query concurrently.
class Recommender {
 public:
  virtual ~Recommender() = default;
  virtual std::string name() const = 0;
  virtual std::vector<Suggestion> recommend(const std::set<std::string>& current_classes, int k) const = 0;
};

/// Most frequent classes first, ties in name order, skipping classes the
/// current graph already uses.
class PopularityRecommender : public Recommender {
 public:
  explicit PopularityRecommender(RepositoryIndex index) : index_(std::move(index)) {}
  std::string name() const override { return "popularity"; }
  std::vector<Suggestion> recommend(const std::set<std::string>& current_classes, int k) const override;
  const RepositoryIndex& index() const { return index_; }

 private:
  RepositoryIndex index_;
};

class RecommenderSet {
 public:
  /// Throws std::invalid_argument on a duplicate name.
  void add(std::unique_ptr<Recommender> recommender);
  const Recommender* find(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::unique_ptr<Recommender>> items_;
};

std::set<std::string> classes_in(const graph::Tsg& tsg);

/// Throws std::invalid_argument when k < 1.
std::vector<Suggestion> recommend_nodes(const RepositoryIndex& index, const graph::Tsg& current, int k);
std::vector<Suggestion> recommend_nodes(const RepositoryIndex& index, const std::set<std::string>& current_classes,
                                        int k);

}  // namespace tsg::recommender
