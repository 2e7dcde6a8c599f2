#include "actdiag/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "actdiag/csv_codec.hpp"
#include "actdiag/validator.hpp"

namespace actdiag {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(trim(line.substr(start, tab == std::string_view::npos ? tab : tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("cannot write " + path.string());
}

ActivityDiagram load_diagram(const std::filesystem::path& path) {
  return parse_csv(read_file(path));
}

Manifest Manifest::parse(std::string_view text, const std::filesystem::path& base_dir) {
  Manifest m;
  std::set<std::string, std::less<>> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '@') {
      auto rest = line.substr(1);
      auto sp = rest.find_first_of(" \t");
      auto key = rest.substr(0, sp);
      if (key.empty()) throw ManifestError(line_no, "metadata line without a key");
      m.metadata[std::string(key)] = sp == std::string_view::npos ? "" : std::string(trim(rest.substr(sp)));
      continue;
    }
    auto fields = split_tabs(raw);
    if (fields.size() != 3) {
      throw ManifestError(line_no, "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    for (auto f : fields) {
      if (f.empty()) throw ManifestError(line_no, "empty field");
    }
    // Ids name run directories and label rows of the aggregate CSV files.
    const auto id = fields[0];
    if (id == "." || id == ".." || id == "ALL" || id.find_first_of(",/\\\"") != std::string_view::npos) {
      throw ManifestError(line_no, "entry id '" + std::string(id) + "' is reserved or contains , / \\ or \"");
    }
    if (!ids.insert(std::string(fields[0])).second) {
      throw ManifestError(line_no, "duplicate entry id '" + std::string(fields[0]) + "'");
    }
    auto resolve = [&](std::string_view p) {
      std::filesystem::path path{std::string(p)};
      return path.is_relative() ? base_dir / path : path;
    };
    m.entries.push_back({std::string(fields[0]), resolve(fields[1]), resolve(fields[2])});
  }
  return m;
}

Manifest Manifest::load(const std::filesystem::path& path) {
  Manifest m = parse(read_file(path), path.parent_path());
  for (const auto& e : m.entries) {
    for (const auto& p : {e.description_path, e.ground_truth_path}) {
      if (!std::filesystem::is_regular_file(p)) {
        throw Error("entry '" + e.id + "': missing file " + p.string());
      }
    }
    ActivityDiagram truth = [&] {
      try {
        return load_diagram(e.ground_truth_path);
      } catch (const ParseError& err) {
        throw Error("entry '" + e.id + "': ground truth " + e.ground_truth_path.string() + ": " + err.what());
      }
    }();
    auto report = validate(truth);
    if (!report.sound()) {
      throw Error("entry '" + e.id + "': ground truth is not structurally sound:\n" + format_report(report));
    }
  }
  return m;
}

const DatasetEntry* Manifest::find(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

}  // namespace actdiag
