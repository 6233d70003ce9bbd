#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>

namespace tsg::testing {

/// A directory of generated `.tsg` files together with the class counts
/// the generator put into them.
struct SyntheticRepo {
  std::map<std::string, std::size_t> counts;
  std::size_t files = 0;
  std::size_t corrupt = 0;
  std::set<std::string> classes;  // every class name the generator may use
};

inline SyntheticRepo make_repo(std::uint32_t seed, const std::filesystem::path& dir) {
  std::mt19937 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  SyntheticRepo repo;
  const int class_count = pick(1, 20);
  for (int c = 0; c < class_count; ++c) repo.classes.insert("C" + std::to_string(c));
  auto random_class = [&] { return "C" + std::to_string(pick(0, class_count - 1)); };

  std::filesystem::create_directories(dir / "sub");
  repo.files = static_cast<std::size_t>(pick(0, 50));
  for (std::size_t f = 0; f < repo.files; ++f) {
    const auto path = dir / (f % 3 == 0 ? "sub" : "") / ("f" + std::to_string(f) + ".tsg");
    std::ofstream out(path);
    if (pick(0, 9) == 0) {
      out << "broken :: " << random_class() << "(unterminated\n";
      ++repo.corrupt;
      continue;
    }
    std::map<std::string, std::size_t> local;
    const int decls = pick(0, 5);
    for (int d = 0; d < decls; ++d) {
      const std::string cls = random_class();
      out << "n" << d << " :: " << cls << "(" << (pick(0, 1) ? "x" : "") << ");\n";
      ++local[cls];
    }
    std::set<std::string> views;
    const int chains = pick(0, 4);
    for (int k = 0; k < chains; ++k) {
      std::string line;
      if (decls > 0 && pick(0, 1)) {
        line = "n" + std::to_string(pick(0, decls - 1));
      } else {
        const std::string cls = random_class();
        line = cls + "()";
        ++local[cls];
      }
      const int hops = pick(1, 3);
      for (int h = 0; h < hops; ++h) {
        line += " -> ";
        const bool last = h + 1 == hops;
        if (last && pick(0, 2) == 0) {
          const std::string v = "v" + std::to_string(pick(0, 2));
          line += v;
          views.insert(v);
        } else if (decls > 0 && pick(0, 2) == 0) {
          line += "n" + std::to_string(pick(0, decls - 1));
        } else {
          const std::string cls = random_class();
          if (pick(0, 1)) {
            line += "i" + std::to_string(k) + "_" + std::to_string(h) + " :: " + cls + "()";
          } else {
            line += cls + "()";
          }
          ++local[cls];
        }
      }
      out << line << ";\n";
    }
    if (!views.empty()) local["View"] += views.size();
    for (const auto& [cls, n] : local) repo.counts[cls] += n;
  }
  return repo;
}

}  // namespace tsg::testing
