#include "files.hpp"

#include <atomic>
#include <sstream>
#include <unistd.h>

namespace fixture {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("mmgl_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void materialize_images(mmgl::MultimodalGraph& graph, const std::filesystem::path& root) {
  graph.asset_root = root;
  for (const auto& n : graph.nodes) {
    if (!n.image_path) continue;
    const auto path = root / *n.image_path;
    std::filesystem::create_directories(path.parent_path());
    write_text(path, "image bytes of node " + std::to_string(n.id));
  }
}

}  // namespace fixture
