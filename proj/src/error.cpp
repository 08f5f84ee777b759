#include "hetpart/error.hpp"

#include <fstream>
#include <sstream>

namespace hetpart {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(errc::kNotFound, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file_atomic(const std::filesystem::path& path,
                            const std::string& contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(errc::kIo, "cannot write " + tmp.string());
    }
    out << contents;
    if (!out) {
      throw Error(errc::kIo, "short write on " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(errc::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

}  // namespace hetpart
