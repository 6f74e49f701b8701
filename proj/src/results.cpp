#include "imbench/results.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace imbench {

namespace {

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw std::runtime_error("bad " + what + " '" + s + "'");
  return v;
}

}  // namespace

std::string format_rate(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", rate);
  return buf;
}

CellKey key_of(const CellResult& r) {
  return {r.dataset, format_rate(r.rate), r.solution, to_string(r.metric), r.repetition};
}

std::map<GroupKey, GroupMean> ResultTable::means() const {
  std::map<GroupKey, GroupMean> out;
  for (const auto& r : rows) {
    auto& g = out[GroupKey{r.dataset, r.rate, r.solution, r.metric}];
    g.strategy = r.strategy;
    g.classifier = r.classifier;
    if (!r.ok) {
      g.failed = true;
      continue;
    }
    g.mean += r.value;
    ++g.count;
  }
  for (auto& [key, g] : out) {
    if (g.count > 0) g.mean /= g.count;
  }
  return out;
}

void write_results_header(std::ostream& out) {
  out << kResultsSchema << '\n'
      << "dataset,rate,solution,strategy,classifier,metric,repetition,status,value,seed,params,message\n";
}

void write_result_row(std::ostream& out, const CellResult& r) {
  std::string params;
  for (const auto& [name, value] : r.params) {
    if (!params.empty()) params += ';';
    params += name + "=" + real(value);
  }
  out << sanitize(r.dataset) << ',' << format_rate(r.rate) << ',' << r.solution << ',' << r.strategy
      << ',' << r.classifier << ',' << to_string(r.metric) << ',' << r.repetition << ','
      << (r.ok ? "ok" : "failed") << ',' << (r.ok ? real(r.value) : "") << ',' << r.seed << ','
      << params << ',' << sanitize(r.message) << '\n';
}

ResultTable read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read results file '" + path.string() + "'");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  ResultTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    const std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) break;  // incomplete trailing line
    const std::string line = content.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kResultsSchema) {
        throw std::runtime_error("'" + path.string() + "' is not an imbench results file (v1)");
      }
      continue;
    }
    if (line_no == 2 || line.empty()) continue;

    const auto f = split(line, ',');
    if (f.size() != 12) {
      throw std::runtime_error("results file line " + std::to_string(line_no) + ": expected 12 fields");
    }
    CellResult r;
    r.dataset = f[0];
    r.rate = parse_real(f[1], "rate");
    r.solution = f[2];
    r.strategy = f[3];
    r.classifier = f[4];
    r.metric = parse_metric(f[5]);
    r.repetition = static_cast<int>(parse_real(f[6], "repetition"));
    r.ok = f[7] == "ok";
    if (r.ok) r.value = parse_real(f[8], "value");
    r.seed = std::strtoull(f[9].c_str(), nullptr, 10);
    for (const auto& kv : split(f[10], ';')) {
      const auto eq = kv.find('=');
      if (eq != std::string::npos) r.params[kv.substr(0, eq)] = parse_real(kv.substr(eq + 1), "parameter");
    }
    r.message = f[11];
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace imbench
