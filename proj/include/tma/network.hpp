#pragma once

#include <string>

#include "tma/layer.hpp"

namespace tma {

// Parses the line-oriented network description:
//
//   # comment
//   input <H> <W> <C>
//   precision int5|int8
//   conv <name> kernel=<k|khXkw> filters=<K> stride=<s|shXsv> [pad=<p>]
//        [requant=<shift>] [pool=<k>:<s>] [precision=int5|int8]
//   fc   <name> outputs=<K> [requant=<shift>] [precision=int5|int8]
//
// Every layer's input shape is derived from the previous layer (after
// pooling); FC layers consume the flattened output. Errors carry the line
// number, the run throws them as std::invalid_argument.
NetworkSpec load_network(const std::string& path);
NetworkSpec parse_network(const std::string& text, const std::string& origin);

}  // namespace tma
