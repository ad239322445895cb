#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "apisift/ast.hpp"

namespace apisift {

enum class Direction { Up, Down };

/// A (terminal, path, terminal) triple. `kinds` lists the node kinds from the
/// left terminal to the right one; `moves[i]` is the edge from kinds[i] to
/// kinds[i+1], all Ups (towards the common ancestor) before all Downs.
struct PathContext {
  std::string left;
  std::vector<std::string> kinds;
  std::vector<Direction> moves;
  std::string right;
  std::size_t left_index = 0;   // terminal ordinal in source order
  std::size_t right_index = 0;

  std::size_t length() const { return moves.size(); }
  bool operator==(const PathContext&) const = default;
};

/// "Name^Call_MethodName": kinds joined by '^' (up) or '_' (down).
std::string path_string(const PathContext& ctx);

struct PathLimits {
  std::size_t max_length = 8;
  std::size_t max_width = 2;
};

/// All terminal pairs (left before right in source order) whose connecting
/// path has at most `max_length` edges and whose branch child indices at the
/// lowest common ancestor differ by at most `max_width`. Throws ConfigError
/// when max_length < 2 or max_width < 1.
std::vector<PathContext> extract_path_contexts(const AstNode& ast, PathLimits limits = {});

}  // namespace apisift
