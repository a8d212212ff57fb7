#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cohortlab/errors.hpp"
#include "cohortlab/panel.hpp"

namespace cohortlab {

namespace {

constexpr const char* kStudentHeader =
    "student_id,degree_id,cohort,gender,province_id,flfp_origin,region_study,ability,"
    "hs_grade,parent_tertiary,parent_high_ses,mother_working,employed,log_earnings,"
    "log_hours,fulltime,log_wage";
constexpr const char* kMoverSuffix = ",work_province_id,q4_flfp";
constexpr const char* kProvinceHeader = "province_id,region_id,flfp";

// shortest round-trip representation
void append_double(std::string& out, double v) {
  if (std::isnan(v)) return;  // missing -> empty field
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void append_int(std::string& out, long long v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

double parse_double(std::string_view s, const char* col, std::size_t line_no) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataContractError("bad numeric field '" + std::string(s) + "' in column " + col +
                            " at line " + std::to_string(line_no));
  }
  return v;
}

long long parse_int(std::string_view s, const char* col, std::size_t line_no) {
  long long v;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataContractError("bad integer field '" + std::string(s) + "' in column " + col +
                            " at line " + std::to_string(line_no));
  }
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataContractError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataContractError("cannot open for reading: " + path);
  return in;
}

}  // namespace

void write_students_csv(const std::string& path, const CohortPanel& panel) {
  panel.validate();
  auto out = open_out(path);
  const bool mover = panel.has_mover_columns();
  out << kStudentHeader << (mover ? kMoverSuffix : "") << '\n';
  std::string line;
  line.reserve(256);
  for (std::size_t i = 0; i < panel.size(); ++i) {
    line.clear();
    append_int(line, panel.student_id[i]);
    line += ',';
    append_int(line, panel.degree_id[i]);
    line += ',';
    append_int(line, panel.cohort[i]);
    line += ',';
    line += panel.female[i] ? 'F' : 'M';
    line += ',';
    append_int(line, panel.province_id[i]);
    line += ',';
    append_double(line, panel.flfp_origin[i]);
    line += ',';
    append_int(line, panel.region_study[i]);
    line += ',';
    append_double(line, panel.ability[i]);
    line += ',';
    append_double(line, panel.hs_grade[i]);
    line += ',';
    append_int(line, panel.parent_tertiary[i]);
    line += ',';
    append_int(line, panel.parent_high_ses[i]);
    line += ',';
    append_int(line, panel.mother_working[i]);
    line += ',';
    append_int(line, panel.employed[i]);
    line += ',';
    if (panel.employed[i]) append_double(line, panel.log_earnings[i]);
    line += ',';
    if (panel.employed[i]) append_double(line, panel.log_hours[i]);
    line += ',';
    if (panel.employed[i]) append_int(line, panel.fulltime[i]);
    line += ',';
    if (panel.employed[i]) append_double(line, panel.log_wage[i]);
    if (mover) {
      line += ',';
      append_int(line, panel.work_province[i]);
      line += ',';
      append_int(line, panel.q4_flfp[i]);
    }
    line += '\n';
    out << line;
  }
}

CohortPanel read_students_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw DataContractError("empty students file: " + path);
  bool mover;
  if (line == kStudentHeader) {
    mover = false;
  } else if (line == std::string(kStudentHeader) + kMoverSuffix) {
    mover = true;
  } else {
    throw DataContractError("students.csv header does not match the contract: " + path);
  }

  CohortPanel p;
  std::size_t line_no = 1;
  const std::size_t want_fields = mover ? 19 : 17;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != want_fields) {
      throw DataContractError("wrong field count at line " + std::to_string(line_no) + " in " +
                              path);
    }
    p.student_id.push_back(static_cast<std::int32_t>(parse_int(f[0], "student_id", line_no)));
    p.degree_id.push_back(static_cast<std::int32_t>(parse_int(f[1], "degree_id", line_no)));
    p.cohort.push_back(static_cast<std::int32_t>(parse_int(f[2], "cohort", line_no)));
    if (f[3] == "F") {
      p.female.push_back(1);
    } else if (f[3] == "M") {
      p.female.push_back(0);
    } else {
      throw DataContractError("gender must be F or M at line " + std::to_string(line_no));
    }
    p.province_id.push_back(static_cast<std::int32_t>(parse_int(f[4], "province_id", line_no)));
    p.flfp_origin.push_back(parse_double(f[5], "flfp_origin", line_no));
    p.region_study.push_back(static_cast<std::int32_t>(parse_int(f[6], "region_study", line_no)));
    p.ability.push_back(parse_double(f[7], "ability", line_no));
    p.hs_grade.push_back(parse_double(f[8], "hs_grade", line_no));
    p.parent_tertiary.push_back(static_cast<std::uint8_t>(parse_int(f[9], "parent_tertiary", line_no)));
    p.parent_high_ses.push_back(static_cast<std::uint8_t>(parse_int(f[10], "parent_high_ses", line_no)));
    p.mother_working.push_back(static_cast<std::uint8_t>(parse_int(f[11], "mother_working", line_no)));
    const auto emp = static_cast<std::uint8_t>(parse_int(f[12], "employed", line_no));
    p.employed.push_back(emp);
    p.log_earnings.push_back(parse_double(f[13], "log_earnings", line_no));
    p.log_hours.push_back(parse_double(f[14], "log_hours", line_no));
    p.fulltime.push_back(emp && !f[15].empty()
                             ? static_cast<std::uint8_t>(parse_int(f[15], "fulltime", line_no))
                             : 0);
    p.log_wage.push_back(parse_double(f[16], "log_wage", line_no));
    if (mover) {
      p.work_province.push_back(
          static_cast<std::int32_t>(parse_int(f[17], "work_province_id", line_no)));
      p.q4_flfp.push_back(static_cast<std::int8_t>(parse_int(f[18], "q4_flfp", line_no)));
    }
  }
  p.validate();
  return p;
}

void write_provinces_csv(const std::string& path, const std::vector<Province>& provinces) {
  auto out = open_out(path);
  out << kProvinceHeader << '\n';
  std::string line;
  for (const auto& pr : provinces) {
    line.clear();
    append_int(line, pr.id);
    line += ',';
    append_int(line, pr.region);
    line += ',';
    append_double(line, pr.flfp);
    line += '\n';
    out << line;
  }
}

std::vector<Province> read_provinces_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != kProvinceHeader) {
    throw DataContractError("provinces.csv header does not match the contract: " + path);
  }
  std::vector<Province> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 3) {
      throw DataContractError("wrong field count at line " + std::to_string(line_no) + " in " +
                              path);
    }
    Province pr;
    pr.id = static_cast<std::int32_t>(parse_int(f[0], "province_id", line_no));
    pr.region = static_cast<std::int32_t>(parse_int(f[1], "region_id", line_no));
    pr.flfp = parse_double(f[2], "flfp", line_no);
    out.push_back(pr);
  }
  return out;
}

void write_exposures_csv(const std::string& path, const CohortPanel& panel,
                         const ExposureColumns& exposures) {
  auto out = open_out(path);
  out << "student_id,degree_id,cohort,gender,own_flfp,loo_female_mean,loo_female_missing,"
         "loo_male_mean,loo_male_missing,cell_n_female,cell_n_male\n";
  std::string line;
  for (std::size_t i = 0; i < panel.size(); ++i) {
    line.clear();
    append_int(line, panel.student_id[i]);
    line += ',';
    append_int(line, panel.degree_id[i]);
    line += ',';
    append_int(line, panel.cohort[i]);
    line += ',';
    line += panel.female[i] ? 'F' : 'M';
    line += ',';
    append_double(line, panel.flfp_origin[i]);
    line += ',';
    append_double(line, exposures.loo_female_mean[i]);
    line += ',';
    append_int(line, exposures.loo_female_missing[i]);
    line += ',';
    append_double(line, exposures.loo_male_mean[i]);
    line += ',';
    append_int(line, exposures.loo_male_missing[i]);
    line += ',';
    append_int(line, exposures.cell_n_female[i]);
    line += ',';
    append_int(line, exposures.cell_n_male[i]);
    line += '\n';
    out << line;
  }
}

}  // namespace cohortlab
