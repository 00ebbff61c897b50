#include "hsurf/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "hsurf/errors.hpp"

namespace hsurf {

namespace {
std::mutex g_write_mutex;
}

void atomic_write(const std::string& path, const std::string& content) {
  std::lock_guard<std::mutex> lock(g_write_mutex);
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::filesystem::path tmp =
      target.parent_path() / (".tmp-" + target.filename().string());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.good()) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace hsurf
