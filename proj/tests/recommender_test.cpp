#include <doctest.h>

#include <algorithm>

#include "repo_gen.hpp"
#include "support.hpp"
#include "tsg/recommender/recommender.hpp"

using namespace tsg;
using namespace tsg::recommender;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("tsg-rec-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<Suggestion> oracle(const std::map<std::string, std::size_t>& counts, const std::set<std::string>& current,
                               int k) {
  std::vector<Suggestion> all;
  for (const auto& [name, n] : counts)
    if (!current.count(name)) all.emplace_back(name, n);
  std::sort(all.begin(), all.end(), [](const Suggestion& a, const Suggestion& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (all.size() > static_cast<std::size_t>(k)) all.resize(static_cast<std::size_t>(k));
  return all;
}

}  // namespace

TEST_CASE("counts of the small topology example") {
  const auto doc = lang::parse_file(tsg::testing::fixture("topology.tsg"));
  CHECK(count_classes(doc) == std::map<std::string, std::size_t>{{"Clock", 1}, {"Topology-SDN", 1}, {"Graph", 1},
                                                                  {"View", 1}});
  const auto idx = index_repository({tsg::testing::fixture("topology.tsg")});
  CHECK(idx.counts.at("View") == 1);
  REQUIRE(idx.files.size() == 1);
  CHECK(idx.files[0].ok);
}

TEST_CASE("popularity ordering and exclusion") {
  RepositoryIndex idx;
  idx.counts = {{"Ping", 3}, {"Decision", 2}, {"Clock", 1}};
  CHECK(recommend_nodes(idx, std::set<std::string>{"Ping"}, 2) ==
        std::vector<Suggestion>{{"Decision", 2}, {"Clock", 1}});
  CHECK(recommend_nodes(RepositoryIndex{}, std::set<std::string>{}, 3).empty());
  CHECK(recommend_nodes(idx, std::set<std::string>{"Ping", "Decision", "Clock"}, 3).empty());
  CHECK_THROWS_AS(recommend_nodes(idx, std::set<std::string>{}, 0), std::invalid_argument);

  idx.counts = {{"b", 2}, {"a", 2}, {"c", 2}};
  CHECK(recommend_nodes(idx, std::set<std::string>{}, 2) == std::vector<Suggestion>{{"a", 2}, {"b", 2}});
}

TEST_CASE("current classes come from the graph") {
  const auto registry = nodes::make_builtin_registry();
  const auto g = tsg::testing::build(tsg::testing::read_text(tsg::testing::fixture("topology.tsg")), registry);
  CHECK(classes_in(g) == std::set<std::string>{"Clock", "Topology-SDN", "Graph", "View"});
  RepositoryIndex idx;
  idx.counts = {{"Clock", 9}, {"Ping", 1}};
  CHECK(recommend_nodes(idx, g, 5) == std::vector<Suggestion>{{"Ping", 1}});
}

TEST_CASE("corrupt files are flagged and skipped") {
  TempDir dir("corrupt");
  std::ofstream(dir.path / "good.tsg") << "p :: Ping(localhost, x); p -> d :: Decision(l);\n";
  std::ofstream(dir.path / "bad.tsg") << "p :: Ping(\n";
  std::ofstream(dir.path / "ignored.txt") << "p :: Clock(1);\n";
  const auto files = find_tsg_files(dir.path.string());
  REQUIRE(files.size() == 2);
  const auto idx = index_repository(files);
  CHECK(idx.counts == std::map<std::string, std::size_t>{{"Decision", 1}, {"Ping", 1}});
  CHECK_FALSE(idx.files[0].ok);
  CHECK(idx.files[0].error.find("unclosed argument list") != std::string::npos);
  CHECK(idx.files[1].ok);
  CHECK(index_repository({}).counts.empty());
}

TEST_CASE("random repositories agree with the generator's own counts") {
  for (std::uint32_t seed = 1; seed <= 30; ++seed) {
    TempDir dir("rand" + std::to_string(seed));
    const auto repo = tsg::testing::make_repo(seed, dir.path);
    const auto idx = index_repository(find_tsg_files(dir.path.string()));
    CAPTURE(seed);
    CHECK(idx.counts == repo.counts);
    CHECK(idx.files.size() == repo.files);
    CHECK(static_cast<std::size_t>(std::count_if(idx.files.begin(), idx.files.end(),
                                                 [](const IndexedFile& f) { return !f.ok; })) == repo.corrupt);
    std::mt19937 rng(seed);
    for (int q = 0; q < 10; ++q) {
      std::set<std::string> current;
      for (const auto& c : repo.classes)
        if (rng() % 3 == 0) current.insert(c);
      const int k = 1 + static_cast<int>(rng() % 8);
      CHECK(recommend_nodes(idx, current, k) == oracle(repo.counts, current, k));
      CHECK(recommend_nodes(idx, current, k) == recommend_nodes(idx, current, k));
    }
  }
}

TEST_CASE("index cache reuses entries by content hash") {
  TempDir dir("cache");
  std::ofstream(dir.path / "a.tsg") << "c :: Clock(1); c -> v;\n";
  std::ofstream(dir.path / "b.tsg") << "p :: Ping(nil, x);\n";
  const std::string cache = (dir.path / "index.json").string();
  const auto files = find_tsg_files(dir.path.string());
  const auto first = index_repository(files, cache);
  REQUIRE(fs::exists(cache));
  auto j = nlohmann::json::parse(tsg::testing::read_text(cache));
  CHECK(j["version"] == 1);
  CHECK(j["files"].size() == 2);
  CHECK(j["files"].contains(sha256_hex("p :: Ping(nil, x);\n")));

  // A poisoned cache entry proves the second run reads the cache.
  j["files"][sha256_hex("p :: Ping(nil, x);\n")]["counts"] = {{"Cached", 7}};
  std::ofstream(cache) << j.dump();
  const auto second = index_repository(files, cache);
  CHECK(second.counts.at("Cached") == 7);
  CHECK(second.counts.count("Ping") == 0);

  std::ofstream(dir.path / "b.tsg") << "p :: Ping(nil, y);\n";
  CHECK(index_repository(files, cache).counts.at("Ping") == 1);
  CHECK(index_repository(files, cache).counts == first.counts);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("recommender set") {
  RecommenderSet set;
  RepositoryIndex idx;
  idx.counts = {{"Ping", 2}};
  set.add(std::make_unique<PopularityRecommender>(idx));
  CHECK(set.names() == std::vector<std::string>{"popularity"});
  REQUIRE(set.find("popularity"));
  CHECK(set.find("popularity")->recommend({}, 1) == std::vector<Suggestion>{{"Ping", 2}});
  CHECK(set.find("other") == nullptr);
  CHECK_THROWS_AS(set.add(std::make_unique<PopularityRecommender>(idx)), std::invalid_argument);
}
