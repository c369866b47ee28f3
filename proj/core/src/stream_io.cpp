#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cliquewatch/error.hpp"
#include "cliquewatch/stream.hpp"
#include "cliquewatch/text.hpp"

namespace cliquewatch {

namespace {

using nlohmann::json;

struct RawRecord {
  std::size_t line;
  double t;
  std::vector<long long> nodes;
};

bool is_blank(const std::string& line) { return trim(line).empty(); }

}  // namespace

ParsedStream parse_stream(std::istream& in, std::size_t node_count_override) {
  std::size_t node_count = node_count_override;
  bool header_seen = false;
  double window_length = 0.0;
  std::vector<RawRecord> records;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, std::string("malformed JSON record: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(lineno, "record must be a JSON object");

    if (record.contains("N") && !record.contains("t")) {
      if (header_seen) throw ParseError(lineno, "duplicate header record");
      if (!records.empty()) throw ParseError(lineno, "header must precede event records");
      const auto& n = record["N"];
      if (!n.is_number_integer() || n.get<long long>() <= 0) {
        throw ParseError(lineno, "header field N must be a positive integer");
      }
      header_seen = true;
      if (node_count_override == 0) node_count = n.get<std::size_t>();
      if (record.contains("window_length")) {
        const auto& w = record["window_length"];
        if (!w.is_number() || !(w.get<double>() > 0.0)) {
          throw ParseError(lineno, "header field window_length must be a positive number");
        }
        window_length = w.get<double>();
      }
      continue;
    }

    if (!record.contains("t") || !record["t"].is_number()) {
      throw ParseError(lineno, "event record needs a numeric field \"t\"");
    }
    if (!record.contains("nodes") || !record["nodes"].is_array()) {
      throw ParseError(lineno, "event record needs an array field \"nodes\"");
    }
    RawRecord raw{lineno, record["t"].get<double>(), {}};
    for (const auto& v : record["nodes"]) {
      if (!v.is_number_integer()) throw ParseError(lineno, "node indices must be integers");
      raw.nodes.push_back(v.get<long long>());
    }
    records.push_back(std::move(raw));
  }

  if (node_count == 0) {
    throw ParseError(lineno == 0 ? 1 : lineno,
                     "no header record {\"N\": ...} and no node count given");
  }

  std::vector<Event> events;
  events.reserve(records.size());
  for (const auto& r : records) {
    if (r.nodes.empty()) {
      throw ValidationError("line " + std::to_string(r.line) + ": event has an empty node list");
    }
    Fingerprint fp(node_count);
    for (long long v : r.nodes) {
      if (v < 0 || static_cast<unsigned long long>(v) >= node_count) {
        throw IndexError("line " + std::to_string(r.line) + ": node index " + std::to_string(v) +
                         " outside [0, " + std::to_string(node_count) + ")");
      }
      fp.set(static_cast<NodeIndex>(v));
    }
    if (!std::isfinite(r.t) || r.t < 0.0) {
      throw ValidationError("line " + std::to_string(r.line) +
                            ": timestamp must be finite and non-negative");
    }
    events.push_back(Event{r.t, std::move(fp)});
  }
  return ParsedStream{EventStream(node_count, std::move(events)), window_length};
}

ParsedStream parse_stream_text(const std::string& text, std::size_t node_count_override) {
  std::istringstream in(text);
  return parse_stream(in, node_count_override);
}

ParsedStream read_stream_file(const std::string& path, std::size_t node_count_override) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stream file '" + path + "'");
  return parse_stream(in, node_count_override);
}

void write_stream(std::ostream& out, const EventStream& stream, double window_length) {
  out << "{\"N\":" << stream.node_count();
  if (window_length > 0.0) out << ",\"window_length\":" << format_double(window_length);
  out << "}\n";
  for (const Event& e : stream.events()) {
    out << "{\"t\":" << format_double(e.timestamp) << ",\"nodes\":[";
    bool first = true;
    for (NodeIndex j : e.fingerprint.participants()) {
      if (!first) out << ',';
      out << j;
      first = false;
    }
    out << "]}\n";
  }
}

void write_stream_file(const std::string& path, const EventStream& stream, double window_length) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write stream file '" + path + "'");
  write_stream(out, stream, window_length);
}

void write_graph_csv(std::ostream& out, const AggregatedGraph& graph) {
  out << "u,v,weight\n";
  for (const auto& t : graph.triples()) out << t.u << ',' << t.v << ',' << t.weight << '\n';
}

}  // namespace cliquewatch
