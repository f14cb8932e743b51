#pragma once

#include <string>
#include <vector>

#include "swarmcast/types.hpp"

namespace swarmcast {

// Shortest decimal form that round-trips to the exact same double.
// All file writers go through this so outputs are byte-reproducible.
std::string format_double(double value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// State-vector file: CSV, one row per frame, k columns, no header.
void save_states_csv(const std::vector<StateVector>& states, const std::string& path);
std::vector<StateVector> load_states_csv(const std::string& path);

// Metrics file rows: chunk_id, frame_index, metric, value.
struct MetricRow {
  int chunk_id = -1;
  std::int64_t frame_index = -1;
  std::string metric;
  double value = 0.0;
};

void save_metrics_csv(const std::vector<MetricRow>& rows, const std::string& path);

}  // namespace swarmcast
