#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "actdiag/diagram.hpp"
#include "actdiag/errors.hpp"

namespace actdiag {

/// Parse failure, carrying the 1-based row number it was detected on (0 when
/// the problem is not tied to one row, e.g. a dangling predecessor).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what);
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class SerializeError : public Error {
 public:
  using Error::Error;
};

/// Reads the Draw.io-compatible CSV encoding.
///
/// Each row is `node_id, node_type, predecessor_id, transition_label[, node_label];`.
/// Rows end with ';' or a newline, fields are trimmed, double-quoted fields
/// may contain ',' ';' and doubled quotes. A node with several predecessors
/// appears once per incoming transition. The optional fifth field carries the
/// node label; without it Action/Decision labels default to the node id.
/// An unquoted label field of "ε" or "epsilon" means unlabelled.
ActivityDiagram parse_csv(std::string_view text);

/// Canonical serialization: rows sorted by (node_id, predecessor_id, label),
/// fields joined by ", ", each row terminated by ";\n". Throws SerializeError
/// on control characters in any field.
std::string serialize_csv(const ActivityDiagram& ad);

/// Returns the CSV payload of an LLM reply: the first fenced block if there is
/// one, otherwise the lines that look like rows. Falls back to the whole text.
std::string extract_csv_block(std::string_view reply);

}  // namespace actdiag
