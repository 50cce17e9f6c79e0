#include "selfsep/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "selfsep/error.hpp"

namespace selfsep {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  require(res.ec == std::errc(), ErrorCode::numeric, "double formatting failed");
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  require(res.ec == std::errc() && res.ptr == text.data() + text.size(),
          ErrorCode::parse, "bad numeric field: " + std::string(text));
  return value;
}

uint64_t parse_u64(std::string_view text) {
  uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  require(res.ec == std::errc() && res.ptr == text.data() + text.size(),
          ErrorCode::parse, "bad integer field: " + std::string(text));
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void atomic_write_file(const std::filesystem::path& path,
                       std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::io, "cannot open " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    require(out.good(), ErrorCode::io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorCode::io, "rename failed: " + path.string());
}

namespace {

Fidelity parse_fidelity(std::string_view text) {
  if (text == "low") return Fidelity::low;
  if (text == "high") return Fidelity::high;
  raise(ErrorCode::parse, "bad fidelity field: " + std::string(text));
}

void append_record_fields(std::string& out, const DatasetRecord& r) {
  const auto& g = r.sample.geometry;
  out += std::to_string(r.encounter_id);
  out += ',';
  out += to_string(r.fidelity);
  for (double v : {g.ownship.x, g.ownship.y, g.ownship.vx, g.ownship.vy,
                   g.intruder.x, g.intruder.y, g.intruder.vx, g.intruder.vy,
                   r.sample.a1, r.sample.a2}) {
    out += ',';
    out += format_double(v);
  }
  out += ',';
  out += std::to_string(r.seed);
}

DatasetRecord record_from_fields(const std::vector<std::string_view>& f) {
  DatasetRecord r;
  r.encounter_id = parse_u64(f[0]);
  r.fidelity = parse_fidelity(f[1]);
  auto& g = r.sample.geometry;
  g.ownship.x = parse_double(f[2]);
  g.ownship.y = parse_double(f[3]);
  g.ownship.vx = parse_double(f[4]);
  g.ownship.vy = parse_double(f[5]);
  g.intruder.x = parse_double(f[6]);
  g.intruder.y = parse_double(f[7]);
  g.intruder.vx = parse_double(f[8]);
  g.intruder.vy = parse_double(f[9]);
  r.sample.a1 = parse_double(f[10]);
  r.sample.a2 = parse_double(f[11]);
  r.seed = parse_u64(f[12]);
  return r;
}

// Reads lines, tolerating a trailing newline; strips one trailing CR so files
// that passed through CRLF translation still parse.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

std::string dataset_to_csv(const Dataset& data) {
  std::string out(kDatasetHeader);
  out += '\n';
  for (const auto& r : data) {
    append_record_fields(out, r);
    out += '\n';
  }
  return out;
}

Dataset dataset_from_csv(std::istream& in) {
  std::string line;
  require(next_line(in, line), ErrorCode::parse, "empty dataset file");
  require(line == kDatasetHeader, ErrorCode::parse,
          "unexpected dataset header: " + line);
  Dataset data;
  while (next_line(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    require(fields.size() == 13, ErrorCode::parse,
            "dataset row needs 13 fields, got " + std::to_string(fields.size()));
    data.push_back(record_from_fields(fields));
  }
  return data;
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  atomic_write_file(path, dataset_to_csv(data));
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  return dataset_from_csv(in);
}

std::string ensemble_rows_to_csv(const std::vector<EnsembleRow>& rows) {
  std::string out(kEnsembleHeader);
  out += '\n';
  for (const auto& row : rows) {
    append_record_fields(out, row.record);
    out += ',';
    out += format_double(row.weights.w1);
    out += ',';
    out += format_double(row.weights.w2);
    out += '\n';
  }
  return out;
}

std::vector<EnsembleRow> ensemble_rows_from_csv(std::istream& in) {
  std::string line;
  require(next_line(in, line), ErrorCode::parse, "empty ensemble file");
  require(line == kEnsembleHeader, ErrorCode::parse,
          "unexpected ensemble header: " + line);
  std::vector<EnsembleRow> rows;
  while (next_line(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    require(fields.size() == 15, ErrorCode::parse,
            "ensemble row needs 15 fields, got " + std::to_string(fields.size()));
    EnsembleRow row;
    row.record = record_from_fields(fields);
    row.weights.w1 = parse_double(fields[13]);
    row.weights.w2 = parse_double(fields[14]);
    rows.push_back(row);
  }
  return rows;
}

void write_ensemble_rows(const std::vector<EnsembleRow>& rows,
                         const std::filesystem::path& path) {
  atomic_write_file(path, ensemble_rows_to_csv(rows));
}

std::vector<EnsembleRow> read_ensemble_rows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  return ensemble_rows_from_csv(in);
}

}  // namespace selfsep
