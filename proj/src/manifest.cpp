#include "swarmcast/manifest.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "swarmcast/io.hpp"

namespace swarmcast {

void RunManifest::write(const std::string& primary_output) const {
  nlohmann::ordered_json doc;
  doc["version"] = kVersionString;
  doc["command"] = command;
  doc["argv"] = argv;
  doc["config"] = config;
  doc["seeds"] = seeds;
  doc["inputs"] = inputs;
  doc["outputs"] = outputs;
  doc["wall_time_s"] = wall_time_s;
  write_text_file(primary_output + ".manifest.json", doc.dump(2) + "\n");
}

DirectoryLock::DirectoryLock(const std::string& output_path) {
  std::filesystem::path dir = std::filesystem::path(output_path).parent_path();
  if (dir.empty()) dir = ".";
  lock_path_ = (dir / ".swarmcast.lock").string();
  const int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::IoError,
                "output directory is locked by another run (" + lock_path_ +
                    " exists); remove it if that run is gone");
  }
  ::close(fd);
}

DirectoryLock::~DirectoryLock() {
  ::unlink(lock_path_.c_str());
}

}  // namespace swarmcast
