#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "refscore/errors.hpp"
#include "refscore/evalharness.hpp"

namespace refscore {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

ordered_json cell_json(const AlignmentCell& c) {
  ordered_json j;
  j["pearson"] = c.pearson ? ordered_json(fmt(*c.pearson)) : ordered_json("undefined");
  j["spearman"] = c.spearman ? ordered_json(fmt(*c.spearman)) : ordered_json("undefined");
  return j;
}

std::string cell_text(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string("undefined");
}

}  // namespace

std::string alignment_report_json(const AlignmentReport& report) {
  ordered_json j;
  j["pair_count"] = report.pair_count;
  j["rows"] = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["name"] = row.name;
    r["modified_pyramid"] = cell_json(row.modified_pyramid);
    r["linguistic_quality"] = cell_json(row.linguistic_quality);
    r["overall"] = cell_json(row.overall);
    j["rows"].push_back(std::move(r));
  }
  j["dropped"] = report.dropped;
  return j.dump(2) + "\n";
}

std::string alignment_report_table(const AlignmentReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(18) << "row"
     << std::setw(12) << "mp.pcc" << std::setw(12) << "mp.scc"
     << std::setw(12) << "lq.pcc" << std::setw(12) << "lq.scc"
     << std::setw(12) << "ov.pcc" << std::setw(12) << "ov.scc" << '\n';
  for (const auto& row : report.rows) {
    os << std::left << std::setw(18) << row.name
       << std::setw(12) << cell_text(row.modified_pyramid.pearson)
       << std::setw(12) << cell_text(row.modified_pyramid.spearman)
       << std::setw(12) << cell_text(row.linguistic_quality.pearson)
       << std::setw(12) << cell_text(row.linguistic_quality.spearman)
       << std::setw(12) << cell_text(row.overall.pearson)
       << std::setw(12) << cell_text(row.overall.spearman) << '\n';
  }
  for (const auto& d : report.dropped) os << "dropped: " << d << '\n';
  return os.str();
}

std::string cross_domain_json(const std::vector<CrossDomainCell>& cells) {
  ordered_json j = ordered_json::array();
  for (const auto& c : cells) {
    ordered_json cell;
    cell["source"] = c.source;
    cell["target"] = c.target;
    cell["target_size"] = c.target_size;
    cell["accuracy"] = fmt(c.accuracy);
    cell["in_domain"] = c.in_domain;
    cell["delta_vs_in_domain"] = fmt(c.delta_vs_in_domain);
    j.push_back(std::move(cell));
  }
  return j.dump(2) + "\n";
}

std::string cross_domain_table(const std::vector<CrossDomainCell>& cells) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "source" << std::setw(16) << "target" << std::setw(10)
     << "size" << std::setw(12) << "acc(%)" << std::setw(10) << "delta" << '\n';
  for (const auto& c : cells) {
    os << std::left << std::setw(16) << c.source << std::setw(16) << c.target << std::setw(10)
       << c.target_size << std::setw(12) << fmt(c.accuracy) << std::setw(10)
       << fmt(c.delta_vs_in_domain) << (c.in_domain ? " (in-domain)" : "") << '\n';
  }
  return os.str();
}

std::string eval_report_json(const EvalReport& report) {
  ordered_json j;
  j["task"] = report.task == EvalTask::classification ? "classification" : "regression";
  j["metric"] = fmt(report.metric);
  j["metric_name"] = report.task == EvalTask::classification ? "accuracy_pct" : "pcc_x100";
  j["dataset"] = report.dataset_id;
  j["model"] = report.model_id;
  j["sample_count"] = report.sample_count;
  return j.dump(2) + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw FormatError("cannot write " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw FormatError("cannot rename " + tmp + " to " + path);
}

}  // namespace refscore
