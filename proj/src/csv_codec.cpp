#include "actdiag/csv_codec.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

namespace actdiag {
namespace {

struct Field {
  std::string text;
  bool quoted = false;
};

struct Row {
  std::size_t number = 0;
  std::vector<Field> fields;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Splits the input into rows of raw fields, honouring double quotes.
std::vector<Row> tokenize(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  Field field;
  std::string raw;  // unquoted characters of the current field
  bool in_quotes = false;
  bool saw_quote = false;
  bool after_quote = false;
  std::size_t row_number = 0;

  auto finish_field = [&] {
    if (saw_quote) {
      field.quoted = true;
      if (!trim(raw).empty()) {
        throw ParseError(row_number + 1, "unexpected characters around quoted field");
      }
    } else {
      field.text = std::string(trim(raw));
    }
    row.fields.push_back(std::move(field));
    field = Field{};
    raw.clear();
    saw_quote = false;
    after_quote = false;
  };
  auto finish_row = [&] {
    finish_field();
    bool blank = row.fields.size() == 1 && !row.fields[0].quoted && row.fields[0].text.empty();
    if (!blank) {
      row.number = ++row_number;
      rows.push_back(std::move(row));
    }
    row = Row{};
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field.text.push_back(c);
      }
      continue;
    }
    if (c == '"' && !saw_quote && trim(raw).empty()) {
      in_quotes = true;
      saw_quote = true;
      raw.clear();
    } else if (c == ',') {
      finish_field();
    } else if (c == ';' || c == '\n') {
      finish_row();
    } else if (after_quote && !is_space(c)) {
      throw ParseError(row_number + 1, "unexpected characters after quoted field");
    } else {
      raw.push_back(c);
    }
  }
  if (in_quotes) throw ParseError(row_number + 1, "unterminated quoted field");
  finish_row();
  return rows;
}

std::string label_value(const Field& f) {
  if (!f.quoted && (f.text == "ε" || f.text == "epsilon")) return {};
  return f.text;
}

bool needs_quotes(std::string_view s) {
  if (s.empty()) return false;
  if (s.find_first_of(",;\"") != std::string_view::npos) return true;
  if (is_space(s.front()) || is_space(s.back())) return true;
  return s == "ε" || s == "epsilon";
}

std::string encode_field(std::string_view s) {
  for (unsigned char c : s) {
    if (c < 0x20 || c == 0x7f) {
      throw SerializeError("field contains a control character: cannot encode");
    }
  }
  if (!needs_quotes(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::string default_label(const Node& n) {
  switch (n.kind) {
    case NodeKind::Initial: return std::string(kDefaultInitialLabel);
    case NodeKind::End: return std::string(kDefaultEndLabel);
    default: return n.id;
  }
}

}  // namespace

ParseError::ParseError(std::size_t row, const std::string& what)
    : Error(row == 0 ? "parse error: " + what
                     : "parse error at row " + std::to_string(row) + ": " + what),
      row_(row) {}

ActivityDiagram parse_csv(std::string_view text) {
  std::vector<Row> rows = tokenize(text);

  // A leading header row is recognised by an unknown type token together with
  // a first field that no other row uses as a node id.
  if (!rows.empty() && rows.front().fields.size() >= 2 &&
      !parse_node_kind(rows.front().fields[1].text)) {
    const std::string& first = rows.front().fields[0].text;
    bool used = std::any_of(rows.begin() + 1, rows.end(), [&](const Row& r) {
      return (!r.fields.empty() && r.fields[0].text == first) ||
             (r.fields.size() > 2 && r.fields[2].text == first);
    });
    if (!used) rows.erase(rows.begin());
  }

  struct NodeInfo {
    NodeKind kind;
    std::optional<std::string> label;
    std::size_t first_row;
  };
  std::map<std::string, NodeInfo> nodes;
  std::vector<std::pair<Transition, std::size_t>> transitions;
  std::set<std::tuple<std::string, std::string, std::string, std::string>> seen_rows;

  for (const Row& row : rows) {
    if (row.fields.size() != 4 && row.fields.size() != 5) {
      throw ParseError(row.number, "expected 4 or 5 fields, got " +
                                       std::to_string(row.fields.size()));
    }
    const std::string& id = row.fields[0].text;
    const std::string& type = row.fields[1].text;
    const std::string& pred = row.fields[2].text;
    std::string guard = label_value(row.fields[3]);
    if (id.empty()) throw ParseError(row.number, "empty node id");
    auto kind = parse_node_kind(type);
    if (!kind) throw ParseError(row.number, "unknown node type '" + type + "'");

    if (!seen_rows.emplace(id, type, pred, guard).second) {
      throw ParseError(row.number, "duplicate row for node '" + id + "'");
    }

    std::optional<std::string> label;
    if (row.fields.size() == 5) {
      std::string l = label_value(row.fields[4]);
      if (!l.empty()) label = std::move(l);
    }

    auto [it, inserted] = nodes.try_emplace(id, NodeInfo{*kind, label, row.number});
    if (!inserted) {
      if (it->second.kind != *kind) {
        throw ParseError(row.number, "node '" + id + "' declared as both " +
                                         std::string(to_string(it->second.kind)) + " and " +
                                         type);
      }
      if (label) {
        if (it->second.label && *it->second.label != *label) {
          throw ParseError(row.number, "conflicting labels for node '" + id + "'");
        }
        it->second.label = label;
      }
    }

    if (pred.empty()) {
      if (!guard.empty()) {
        throw ParseError(row.number, "transition label without a predecessor");
      }
      continue;
    }
    Transition t{pred, id, std::nullopt};
    if (!guard.empty()) t.label = std::move(guard);
    transitions.emplace_back(std::move(t), row.number);
  }

  std::vector<Node> out_nodes;
  out_nodes.reserve(nodes.size());
  for (auto& [id, info] : nodes) {
    std::string label;
    if (info.label) {
      label = *info.label;
    } else if (info.kind == NodeKind::Action || info.kind == NodeKind::Decision) {
      label = id;
    }
    out_nodes.push_back({id, info.kind, std::move(label)});
  }
  std::vector<Transition> out_ts;
  out_ts.reserve(transitions.size());
  for (auto& [t, row] : transitions) {
    if (!nodes.contains(t.source)) {
      throw ParseError(row, "predecessor '" + t.source + "' of node '" + t.target +
                                "' is never declared");
    }
    out_ts.push_back(std::move(t));
  }
  try {
    return ActivityDiagram(std::move(out_nodes), std::move(out_ts));
  } catch (const DiagramError& e) {
    throw ParseError(0, e.what());
  }
}

std::string serialize_csv(const ActivityDiagram& ad) {
  struct OutRow {
    std::string id;
    std::string pred;
    std::optional<std::string> guard;
    const Node* node;
  };
  std::vector<OutRow> rows;
  for (const auto& n : ad.nodes()) {
    bool has_pred = false;
    for (const auto& t : ad.transitions()) {
      if (t.target != n.id) continue;
      rows.push_back({n.id, t.source, t.label, &n});
      has_pred = true;
    }
    if (!has_pred) rows.push_back({n.id, "", std::nullopt, &n});
  }
  std::sort(rows.begin(), rows.end(), [](const OutRow& a, const OutRow& b) {
    if (a.id != b.id) return a.id < b.id;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.guard < b.guard;
  });

  std::ostringstream out;
  const Node* last = nullptr;
  for (const auto& r : rows) {
    out << encode_field(r.id) << ", " << to_string(r.node->kind) << ", " << encode_field(r.pred)
        << ", " << encode_field(r.guard.value_or(""));
    if (r.node != last && r.node->label != default_label(*r.node)) {
      out << ", " << encode_field(r.node->label);
    }
    last = r.node;
    out << ";\n";
  }
  return out.str();
}

std::string extract_csv_block(std::string_view reply) {
  auto open = reply.find("```");
  if (open != std::string_view::npos) {
    auto body_start = reply.find('\n', open);
    if (body_start != std::string_view::npos) {
      ++body_start;
      auto close = reply.find("```", body_start);
      return std::string(reply.substr(body_start, close == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : close - body_start));
    }
  }

  std::string kept;
  std::istringstream lines{std::string(reply)};
  std::string line;
  while (std::getline(lines, line)) {
    std::string_view t = trim(line);
    if (!t.empty() && t.back() == ';' && std::count(t.begin(), t.end(), ',') >= 3) {
      kept.append(t);
      kept.push_back('\n');
    }
  }
  return kept.empty() ? std::string(reply) : kept;
}

}  // namespace actdiag
