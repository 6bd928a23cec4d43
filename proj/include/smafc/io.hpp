#pragma once

// Artifact serialization. Matrices go to JSON as parallel real and imaginary
// row-major grids so nothing downstream needs a complex-number parser; CSV is
// reserved for anything meant to be plotted. Every file write is atomic
// (temp file in the same directory, then rename), and numbers are printed in
// shortest round-trip form so identical data always produces identical bytes.

#include <smafc/afc.hpp>
#include <smafc/array.hpp>
#include <smafc/core.hpp>
#include <smafc/process.hpp>
#include <smafc/rng.hpp>
#include <smafc/schedule.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace smafc {

using json = nlohmann::json;

inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string content_hash_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string(buf);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("read_file: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("atomic_write: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ConfigError("atomic_write: short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// complex matrices

inline json cmatrix_to_json(const CMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rrow = json::array();
    json irow = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline CMatrix cmatrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw ConfigError("matrix json: expected object with re and im grids");
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows < 1 || cols < 1) throw ConfigError("matrix json: empty shape");
  const json& re = j.at("re");
  const json& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows || static_cast<Eigen::Index>(im.size()) != rows)
    throw ConfigError("matrix json: row count mismatch");
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& rrow = re.at(static_cast<std::size_t>(i));
    const json& irow = im.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(rrow.size()) != cols ||
        static_cast<Eigen::Index>(irow.size()) != cols)
      throw ConfigError("matrix json: column count mismatch");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = Complex(rrow.at(static_cast<std::size_t>(k)).get<double>(),
                        irow.at(static_cast<std::size_t>(k)).get<double>());
  }
  return m;
}

inline json density_to_json(const DensityMatrix& rho) {
  json j = cmatrix_to_json(rho.matrix());
  j["kind"] = "density_matrix";
  j["dim"] = rho.dim();
  return j;
}

inline DensityMatrix density_from_json(const json& j) {
  return DensityMatrix(cmatrix_from_json(j));
}

inline json process_to_json(const ProcessMatrix& p) {
  json j = cmatrix_to_json(p.chi());
  j["kind"] = "process_matrix";
  j["dim"] = p.dim();
  return j;
}

inline ProcessMatrix process_from_json(const json& j) {
  CMatrix chi = cmatrix_from_json(j);
  const auto d2 = chi.rows();
  const int dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d2))));
  if (static_cast<Eigen::Index>(dim) * dim != d2)
    throw ConfigError("process json: chi must be d^2 x d^2");
  if (j.contains("dim") && j.at("dim").get<int>() != dim)
    throw ConfigError("process json: declared dimension disagrees with the chi shape");
  return ProcessMatrix(dim, chi);
}

// ---------------------------------------------------------------------------
// counts, states, schedules

inline json count_record_to_json(const CountRecord& rec) {
  json bins = json::array();
  for (const TimeBin& b : rec.bins) bins.push_back(json{{"start", b.start}, {"width", b.width}});
  return json{{"setting_id", rec.setting_id},
              {"bins", std::move(bins)},
              {"counts", rec.counts},
              {"trials", rec.trials},
              {"seed", rec.seed}};
}

inline CountRecord count_record_from_json(const json& j) {
  CountRecord rec;
  rec.setting_id = j.at("setting_id").get<std::string>();
  for (const json& b : j.at("bins"))
    rec.bins.push_back({b.at("start").get<double>(), b.at("width").get<double>()});
  rec.counts = j.at("counts").get<std::vector<std::int64_t>>();
  rec.trials = j.at("trials").get<std::int64_t>();
  rec.seed = j.at("seed").get<std::uint64_t>();
  if (rec.counts.size() != rec.bins.size())
    throw ConfigError("count record json: one count per bin required");
  return rec;
}

inline json path_state_to_json(const PathState& s) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < s.coefficients.size(); ++i) {
    re.push_back(s.coefficients[i].real());
    im.push_back(s.coefficients[i].imag());
  }
  return json{{"channels", s.channels}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline PathState path_state_from_json(const json& j) {
  auto channels = j.at("channels").get<std::vector<int>>();
  const json& re = j.at("re");
  const json& im = j.at("im");
  if (re.size() != channels.size() || im.size() != channels.size())
    throw ConfigError("path state json: coefficient count mismatch");
  CVector c(static_cast<Eigen::Index>(channels.size()));
  for (std::size_t i = 0; i < channels.size(); ++i)
    c[static_cast<Eigen::Index>(i)] = Complex(re.at(i).get<double>(), im.at(i).get<double>());
  return PathState(std::move(channels), std::move(c));
}

inline json schedule_to_json(const Schedule& s) {
  json writes = json::array();
  for (const WriteEvent& w : s.writes)
    writes.push_back(json{{"qubit", w.qubit}, {"channel", w.channel}, {"time", w.time}});
  json reads = json::array();
  for (const ReadEvent& r : s.reads) reads.push_back(json{{"qubit", r.qubit}, {"time", r.time}});
  json pulses = json::object();
  for (const auto& [channel, events] : s.electric_pulses) {
    json list = json::array();
    for (const PulseEvent& p : events)
      list.push_back(json{{"time", p.time}, {"polarity", p.polarity}});
    pulses[std::to_string(channel)] = std::move(list);
  }
  return json{{"aod_rise_time", s.aod_rise_time},
              {"writes", std::move(writes)},
              {"reads", std::move(reads)},
              {"electric_pulses", std::move(pulses)}};
}

inline Schedule schedule_from_json(const json& j) {
  Schedule s;
  s.aod_rise_time = j.at("aod_rise_time").get<double>();
  for (const json& w : j.at("writes"))
    s.writes.push_back(
        {w.at("qubit").get<int>(), w.at("channel").get<int>(), w.at("time").get<double>()});
  for (const json& r : j.at("reads"))
    s.reads.push_back({r.at("qubit").get<int>(), r.at("time").get<double>()});
  for (const auto& [key, list] : j.at("electric_pulses").items()) {
    std::vector<PulseEvent>& events = s.electric_pulses[std::stoi(key)];
    for (const json& p : list)
      events.push_back({p.at("time").get<double>(), p.at("polarity").get<int>()});
  }
  return s;
}

inline json qubit_report_to_json(const QubitReport& r) {
  json records = json::array();
  for (const CountRecord& rec : r.records) records.push_back(count_record_to_json(rec));
  return json{{"qubit", r.qubit},
              {"channel", r.channel},
              {"echo_order", r.echo_order},
              {"read_time", r.read_time},
              {"expected_efficiency", r.expected_efficiency},
              {"f_early", r.f_early},
              {"f_late", r.f_late},
              {"f_superposition", r.f_superposition},
              {"visibility", r.visibility},
              {"f_total", r.f_total},
              {"records", std::move(records)}};
}

// ---------------------------------------------------------------------------
// CSV

// Rectangular numeric table. The optional comment line carries run metadata
// (seed, scenario) without disturbing header-based readers.
inline std::string csv_table(const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows,
                             const std::string& comment = {}) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const std::vector<double>& row : rows) {
    if (row.size() != header.size()) throw ConfigError("csv_table: ragged row");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string csv_histogram(const CountRecord& rec) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < rec.bins.size(); ++i)
    rows.push_back({rec.bins[i].start, rec.bins[i].width, static_cast<double>(rec.counts[i])});
  return csv_table({"bin_start", "bin_width", "count"}, rows,
                   "setting=" + rec.setting_id + " trials=" + std::to_string(rec.trials) +
                       " seed=" + std::to_string(rec.seed));
}

// Bar-chart export: one row per matrix element with magnitude and phase.
inline std::string csv_matrix_bars(const CMatrix& m, const std::string& comment = {}) {
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      rows.push_back({static_cast<double>(i), static_cast<double>(j), std::abs(m(i, j)),
                      std::arg(m(i, j))});
  return csv_table({"row", "col", "abs", "phase"}, rows, comment);
}

// Chronological event listing of a schedule. Write and read rows carry the
// qubit and its storage channel; pulse rows carry the channel and polarity.
inline std::string csv_schedule_timeline(const Schedule& s, const std::string& comment = {}) {
  struct Row {
    double time;
    int kind; // 0 write, 1 pulse, 2 read; ties resolve in operation order
    std::string text;
  };
  std::vector<Row> rows;
  std::map<int, int> channel_of;
  for (const WriteEvent& w : s.writes) {
    channel_of[w.qubit] = w.channel;
    rows.push_back({w.time, 0,
                    format_double(w.time) + ",write," + std::to_string(w.qubit) + "," +
                        std::to_string(w.channel) + ","});
  }
  for (const auto& [channel, events] : s.electric_pulses)
    for (const PulseEvent& p : events)
      rows.push_back({p.time, 1,
                      format_double(p.time) + ",pulse,," + std::to_string(channel) + "," +
                          std::to_string(p.polarity)});
  for (const ReadEvent& r : s.reads) {
    auto it = channel_of.find(r.qubit);
    rows.push_back({r.time, 2,
                    format_double(r.time) + ",read," + std::to_string(r.qubit) + "," +
                        (it == channel_of.end() ? std::string() : std::to_string(it->second)) +
                        ","});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.kind < b.kind;
  });
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "time,event,qubit,channel,polarity\n";
  for (const Row& r : rows) out += r.text + "\n";
  return out;
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

} // namespace smafc
