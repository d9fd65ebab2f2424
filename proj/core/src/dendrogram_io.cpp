#include <cstdio>

#include "cdisc/clustering.hpp"
#include "cdisc/error.hpp"
#include "json.hpp"
#include "text_io.hpp"

namespace cdisc {

using ordered_json = nlohmann::ordered_json;

std::string format_dendrogram(const Dendrogram& dend) {
  std::string out;
  for (const auto& m : dend.merges()) {
    ordered_json rec;
    rec["left"] = m.left;
    rec["right"] = m.right;
    rec["height"] = m.height;
    rec["size"] = m.size;
    out += rec.dump();
    out.push_back('\n');
  }
  return out;
}

Dendrogram parse_dendrogram(std::string_view text) {
  std::vector<Merge> merges;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      merges.push_back({rec.at("left").get<std::size_t>(), rec.at("right").get<std::size_t>(),
                        rec.at("height").get<double>(), rec.at("size").get<std::size_t>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::parse, "dendrogram line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  const auto leaves = merges.size() + 1;
  return Dendrogram(leaves, std::move(merges));
}

void save_dendrogram(const std::filesystem::path& path, const Dendrogram& dend) {
  detail::write_file(path, format_dendrogram(dend));
}

Dendrogram load_dendrogram(const std::filesystem::path& path) { return parse_dendrogram(detail::read_file(path)); }

void save_item_table(const std::filesystem::path& path, const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += std::to_string(i) + "\t" + items[i] + "\n";
  detail::write_file(path, out);
}

std::vector<std::string> load_item_table(const std::filesystem::path& path) {
  std::vector<std::string> items;
  auto text = detail::read_file(path);
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.substr(0, tab) != std::to_string(items.size())) {
      throw Error(Errc::parse, "item table line " + std::to_string(line_no) + ": expected '" +
                                   std::to_string(items.size()) + "\\t<token>'");
    }
    items.emplace_back(line.substr(tab + 1));
  }
  return items;
}

void save_distances(const std::filesystem::path& path, const DistanceMatrix& dist) {
  std::string out = std::to_string(dist.n()) + " " + std::string(to_string(dist.metric())) + "\n";
  char buf[32];
  for (double v : dist.values()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out += buf;
  }
  detail::write_file(path, out);
}

DistanceMatrix load_distances(const std::filesystem::path& path) {
  auto text = detail::read_file(path);
  auto lines = detail::split_lines(text);
  if (lines.empty()) throw Error(Errc::parse, "distance file is empty");
  auto header = detail::split_whitespace(lines[0]);
  if (header.size() != 2) throw Error(Errc::parse, "distance file header must be '<n> <metric>'");
  const auto n = detail::parse_size(header[0]);
  const Metric metric = parse_metric(header[1]);
  std::vector<double> values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto v = detail::trim(lines[i]);
    if (!v.empty()) values.push_back(detail::parse_double(v));
  }
  return DistanceMatrix(n, std::move(values), metric);
}

void save_assignment(const std::filesystem::path& path, const ClusterAssignment& assignment,
                     const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    out += std::to_string(i) + "\t" + (i < items.size() ? items[i] : std::string()) + "\t" +
           std::to_string(assignment.labels[i]) + "\n";
  }
  detail::write_file(path, out);
}

ClusterAssignment load_assignment(const std::filesystem::path& path) {
  ClusterAssignment out;
  auto text = detail::read_file(path);
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto last_tab = line.rfind('\t');
    if (last_tab == std::string_view::npos) {
      throw Error(Errc::parse, "assignment line " + std::to_string(line_no) + ": missing cluster column");
    }
    auto label = detail::parse_size(line.substr(last_tab + 1));
    out.labels.push_back(label);
    out.k = std::max(out.k, label + 1);
  }
  return out;
}

}  // namespace cdisc
