#pragma once

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "admm4dvar/assim/admm.hpp"
#include "admm4dvar/assim/baselines.hpp"
#include "admm4dvar/assim/landscape.hpp"
#include "admm4dvar/core/errors.hpp"
#include "admm4dvar/core/poisson.hpp"

// Plain CSV artifacts. Reals are printed with 17 significant digits so a file
// round-trips to the same doubles.
namespace admm4dvar::io {

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using MetaEntries = std::vector<std::pair<std::string, std::string>>;

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path.string()) {
    if (path.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
    }
    file_.reset(std::fopen(path_.c_str(), "wb"));
    if (!file_) throw IoError("cannot open for writing", path_);
  }

  void line(const std::string& text) {
    if (std::fputs(text.c_str(), file_.get()) < 0 || std::fputc('\n', file_.get()) == EOF)
      throw IoError("write failed", path_);
  }

  void close() {
    std::FILE* f = file_.release();
    if (std::fclose(f) != 0) throw IoError("close failed", path_);
  }

 private:
  std::string path_;
  std::unique_ptr<std::FILE, FileCloser> file_;
};

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_real(const std::string& field, const std::string& path) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE)
    throw IoError("malformed number '" + field + "'", path);
  return v;
}

inline std::size_t parse_index(const std::string& field, const std::string& path) {
  const double v = parse_real(field, path);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) throw IoError("malformed index '" + field + "'", path);
  return static_cast<std::size_t>(v);
}

}  // namespace detail

/// `k,component,value` with one row per entry; `index_stride` scales k.
inline void write_states(const std::filesystem::path& path, const std::vector<StateVector>& states,
                         std::size_t index_stride = 1) {
  detail::Writer w(path);
  w.line("k,component,value");
  for (std::size_t k = 0; k < states.size(); ++k)
    for (std::size_t c = 0; c < states[k].size(); ++c)
      w.line(std::to_string(k * index_stride) + "," + std::to_string(c) + "," + format_real(states[k][c]));
  w.close();
}

/// Inverse of write_states (stride 1). Rows may come in any order but every
/// (k, component) pair in the dense rectangle must appear exactly once.
inline std::vector<StateVector> read_states(const std::filesystem::path& path) {
  const std::string p = path.string();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading", p);
  std::string line;
  if (!std::getline(in, line) || line != "k,component,value") throw IoError("expected header k,component,value", p);

  struct Entry {
    std::size_t k, c;
    double v;
  };
  std::vector<Entry> entries;
  std::size_t max_k = 0, max_c = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line);
    if (f.size() != 3) throw IoError("expected three fields in '" + line + "'", p);
    Entry e{detail::parse_index(f[0], p), detail::parse_index(f[1], p), detail::parse_real(f[2], p)};
    max_k = std::max(max_k, e.k);
    max_c = std::max(max_c, e.c);
    entries.push_back(e);
  }
  if (entries.empty()) throw IoError("no data rows", p);
  std::vector<StateVector> out(max_k + 1, StateVector(max_c + 1, 0.0));
  std::vector<char> seen((max_k + 1) * (max_c + 1), 0);
  for (const auto& e : entries) {
    char& s = seen[e.k * (max_c + 1) + e.c];
    if (s) throw IoError("duplicate entry for k=" + std::to_string(e.k), p);
    s = 1;
    out[e.k][e.c] = e.v;
  }
  for (char s : seen)
    if (!s) throw IoError("missing entries", p);
  return out;
}

inline void write_history(const std::filesystem::path& path, const std::vector<IterationRecord>& history) {
  detail::Writer w(path);
  w.line("iter,total_error,constraint_error,objective");
  for (const auto& r : history)
    w.line(std::to_string(r.iter) + "," + format_real(r.total_error) + "," + format_real(r.constraint_error) + "," +
           format_real(r.objective));
  w.close();
}

inline void write_history(const std::filesystem::path& path, const std::vector<BaselineRecord>& history) {
  detail::Writer w(path);
  w.line("iter,objective,grad_norm,step_size");
  for (const auto& r : history)
    w.line(std::to_string(r.iter) + "," + format_real(r.objective) + "," + format_real(r.grad_norm) + "," +
           format_real(r.step_size));
  w.close();
}

inline void write_landscape(const std::filesystem::path& path, const std::vector<LandscapeCell>& cells) {
  detail::Writer w(path);
  w.line("x0,y0,z0,F");
  for (const auto& c : cells)
    w.line(format_real(c.x0) + "," + format_real(c.y0) + "," + format_real(c.z0) + "," + format_real(c.value));
  w.close();
}

/// One 2D interior field as `i,j,omega` (grid indices 1..m-1).
inline void write_field(const std::filesystem::path& path, ConstView field, const Grid2D& g) {
  if (field.size() != g.interior_dim()) throw ConfigError("write_field: field does not match grid");
  detail::Writer w(path);
  w.line("i,j,omega");
  for (std::size_t i = 1; i < g.m; ++i)
    for (std::size_t j = 1; j < g.m; ++j)
      w.line(std::to_string(i) + "," + std::to_string(j) + "," + format_real(field[g.index(i, j)]));
  w.close();
}

/// `key = value` lines in the given order.
inline void write_meta(const std::filesystem::path& path, const MetaEntries& entries) {
  detail::Writer w(path);
  for (const auto& [k, v] : entries) w.line(k + " = " + v);
  w.close();
}

}  // namespace admm4dvar::io
