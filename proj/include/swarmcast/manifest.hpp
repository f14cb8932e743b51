#pragma once

#include <map>
#include <string>
#include <vector>

#include "swarmcast/types.hpp"

namespace swarmcast {

inline constexpr const char* kVersionString = "swarmcast 0.1.0";

// Provenance record written next to each command's primary output as
// <output>.manifest.json. Everything needed to reproduce the artifact:
// command, flags, seeds, input and output paths.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::map<std::string, std::string> config;  // flag -> value snapshot
  std::map<std::string, std::uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_time_s = 0.0;

  void write(const std::string& primary_output) const;
};

// Exclusive marker file in the output directory; a second concurrent
// command targeting the same directory fails fast instead of interleaving
// writes. Removed on destruction.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::string& output_path);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::string lock_path_;
};

}  // namespace swarmcast
