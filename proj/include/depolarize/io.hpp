#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "depolarize/dynamics.hpp"
#include "depolarize/error.hpp"
#include "depolarize/graph.hpp"

namespace depolarize::io {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '\r')) ++k;
    const std::size_t start = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r') ++k;
    if (k > start) out.push_back(line.substr(start, k - start));
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
std::optional<T> parse_number(std::string_view token) {
  T value{};
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

[[noreturn]] inline void fail(const std::string& source, std::size_t line_no, const std::string& what) {
  throw IoError(source + ":" + std::to_string(line_no) + ": " + what);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

// "# vertices: N" header written by write_edge_list.
inline std::optional<std::size_t> vertex_count_pragma(std::string_view comment) {
  comment.remove_prefix(1);
  comment = trim(comment);
  constexpr std::string_view key = "vertices:";
  if (comment.substr(0, key.size()) != key) return std::nullopt;
  return parse_number<std::size_t>(trim(comment.substr(key.size())));
}

}  // namespace detail

/// Reads a whitespace-separated `i j [w]` edge list with 0-based ids.
///
/// Lines starting with '#' are comments, except that a `# vertices: N` line
/// fixes the vertex count (so trailing isolated vertices survive a round
/// trip). Otherwise n = 1 + max id, unless `vertex_count` overrides both.
/// Weights default to 1; self-loops, duplicates (in either orientation),
/// non-positive weights and weights above w_max are rejected.
inline Graph read_edge_list(std::istream& in, double w_max = 1.0, std::optional<std::size_t> vertex_count = {},
                            const std::string& source = "<edge list>") {
  struct Row {
    Vertex i, j;
    double w;
  };
  std::vector<Row> rows;
  std::set<std::pair<Vertex, Vertex>> seen;
  std::optional<std::size_t> pragma_count;
  std::size_t max_id = 0;
  bool any = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = detail::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (auto c = detail::vertex_count_pragma(view)) pragma_count = c;
      continue;
    }
    const auto tokens = detail::split_ws(view);
    if (tokens.size() < 2 || tokens.size() > 3) detail::fail(source, line_no, "expected `i j [w]`");
    const auto i = detail::parse_number<std::size_t>(tokens[0]);
    const auto j = detail::parse_number<std::size_t>(tokens[1]);
    if (!i || !j) detail::fail(source, line_no, "vertex ids must be non-negative integers");
    double w = 1.0;
    if (tokens.size() == 3) {
      const auto parsed = detail::parse_number<double>(tokens[2]);
      if (!parsed) detail::fail(source, line_no, "weight is not a real number");
      w = *parsed;
    }
    if (*i == *j) detail::fail(source, line_no, "self-loop");
    if (!(w > 0.0) || w > w_max) detail::fail(source, line_no, "weight must lie in (0, w_max]");
    const auto key = std::minmax(*i, *j);
    if (!seen.insert(key).second) detail::fail(source, line_no, "duplicate edge");
    rows.push_back({key.first, key.second, w});
    max_id = std::max(max_id, key.second);
    any = true;
  }
  if (in.bad()) throw IoError("read error in " + source);
  std::size_t n = vertex_count.value_or(pragma_count.value_or(any ? max_id + 1 : 0));
  if (n == 0) throw IoError(source + ": edge list has no vertices");
  if (any && max_id >= n) throw IoError(source + ": vertex id " + std::to_string(max_id) + " exceeds vertex count");
  Graph g(n, w_max);
  for (const Row& r : rows) g.set_weight(r.i, r.j, r.w);
  return g;
}

inline Graph read_edge_list(const std::string& path, double w_max = 1.0,
                            std::optional<std::size_t> vertex_count = {}) {
  auto in = detail::open_input(path);
  return read_edge_list(in, w_max, vertex_count, path);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# vertices: " << g.n() << '\n';
  for (Vertex i = 0; i < g.n(); ++i)
    for (Vertex j : g.neighbors(i))
      if (j > i) out << i << ' ' << j << ' ' << format_double(g.weights()(i, j)) << '\n';
}

inline void write_edge_list(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_edge_list(out, g);
  if (!out) throw IoError("write failed for " + path);
}

/// One opinion per line, in [0, 1]; '#' comments and blank lines skipped.
inline Opinions read_opinions(std::istream& in, const std::string& source = "<opinions>") {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto x = detail::parse_number<double>(view);
    if (!x) detail::fail(source, line_no, "opinion is not a real number");
    if (!(*x >= 0.0 && *x <= 1.0)) detail::fail(source, line_no, "innate opinion outside [0, 1]");
    values.push_back(*x);
  }
  if (in.bad()) throw IoError("read error in " + source);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline Opinions read_opinions(const std::string& path) {
  auto in = detail::open_input(path);
  return read_opinions(in, path);
}

inline void write_opinions(std::ostream& out, const Opinions& s) {
  for (Eigen::Index k = 0; k < s.size(); ++k) out << format_double(s(k)) << '\n';
}

inline void write_opinions(const std::string& path, const Opinions& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_opinions(out, s);
  if (!out) throw IoError("write failed for " + path);
}

struct Preprocessed {
  Graph graph;
  Opinions opinions;
  std::vector<Vertex> original_ids;  ///< new id -> old id
};

/// Drops isolated vertices and renumbers the rest in their original order.
inline Preprocessed drop_isolated(const Graph& g, const Opinions& s) {
  check_dimensions(g, s, "drop_isolated");
  std::vector<Vertex> keep;
  std::vector<Vertex> new_id(g.n(), 0);
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!g.neighbors(v).empty()) {
      new_id[v] = keep.size();
      keep.push_back(v);
    }
  }
  if (keep.empty()) throw IoError("drop_isolated: graph has no edges");
  Graph out(keep.size(), g.w_max());
  Opinions s_out(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Vertex v = keep[k];
    s_out(static_cast<Eigen::Index>(k)) = s(static_cast<Eigen::Index>(v));
    for (Vertex u : g.neighbors(v))
      if (u > v) out.set_weight(new_id[v], new_id[u], g.weights()(v, u));
  }
  return {std::move(out), std::move(s_out), std::move(keep)};
}

}  // namespace depolarize::io
