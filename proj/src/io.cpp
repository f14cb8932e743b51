#include "swarmcast/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace swarmcast {

std::string format_double(double value) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path);
  }
  out << content;
  if (!out) {
    throw Error(ErrorCode::IoError, "write failed for " + path);
  }
}

void save_states_csv(const std::vector<StateVector>& states, const std::string& path) {
  std::ostringstream out;
  for (const StateVector& s : states) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (i > 0) out << ',';
      out << format_double(s[i]);
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<StateVector> load_states_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<StateVector> states;
  std::istringstream lines(text);
  std::string line;
  Eigen::Index width = -1;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) {
        throw Error(ErrorCode::ParseError,
                    path + ":" + std::to_string(line_no) + ": bad number");
      }
      row.push_back(v);
      p = res.ptr;
      if (p < end) {
        if (*p != ',') {
          throw Error(ErrorCode::ParseError,
                      path + ":" + std::to_string(line_no) + ": expected ','");
        }
        ++p;
      }
    }
    StateVector s(static_cast<Eigen::Index>(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) s[static_cast<Eigen::Index>(i)] = row[i];
    if (width < 0) {
      width = s.size();
    } else if (s.size() != width) {
      throw Error(ErrorCode::LengthMismatch,
                  path + ":" + std::to_string(line_no) + ": ragged row width");
    }
    states.push_back(std::move(s));
  }
  return states;
}

void save_metrics_csv(const std::vector<MetricRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "chunk_id,frame_index,metric,value\n";
  for (const MetricRow& r : rows) {
    out << r.chunk_id << ',' << r.frame_index << ',' << r.metric << ','
        << format_double(r.value) << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace swarmcast
