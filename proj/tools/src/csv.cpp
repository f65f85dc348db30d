#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "digest.hpp"
#include "json17.hpp"
#include "wate/errors.hpp"
#include "wate/version.hpp"

namespace watecli {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& tok, std::size_t line_no,
                    const std::string& col) {
  double value = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw wate::InputError("line " + std::to_string(line_no) + ": " + col +
                           " is not a number (got '" + tok + "')");
  return value;
}

int parse_binary(const std::string& tok, std::size_t line_no,
                 const std::string& col) {
  int value = 0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || (value != 0 && value != 1))
    throw wate::InputError("line " + std::to_string(line_no) + ": " + col +
                           " must be 0 or 1 (got '" + tok + "')");
  return value;
}

std::string quote_csv(const std::string& text) {
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += "\"\"";
    out += ch;
  }
  out += "\"";
  return out;
}

}  // namespace

wate::Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw wate::InputError("cannot open '" + path + "'");
  wate::Dataset data;
  std::string line;
  std::size_t line_no = 0;
  std::size_t d = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> tokens = split_fields(line);
    if (!have_header) {
      if (tokens.size() < 3)
        throw wate::InputError("line 1: header must be x1,...,xd,a,y");
      d = tokens.size() - 2;
      for (std::size_t j = 0; j < d; ++j)
        if (tokens[j] != "x" + std::to_string(j + 1))
          throw wate::InputError("line 1: expected column 'x" +
                                 std::to_string(j + 1) + "', got '" +
                                 tokens[j] + "'");
      if (tokens[d] != "a" || tokens[d + 1] != "y")
        throw wate::InputError(
            "line 1: the last two columns must be 'a' and 'y'");
      data.d = static_cast<int>(d);
      have_header = true;
      continue;
    }
    if (tokens.size() != d + 2)
      throw wate::InputError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(d + 2) + " fields, got " +
                             std::to_string(tokens.size()));
    wate::Sample s;
    s.x.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      const std::string col = "x" + std::to_string(j + 1);
      s.x[j] = parse_double(tokens[j], line_no, col);
      if (!(s.x[j] >= 0.0) || !(s.x[j] <= 1.0))
        throw wate::InputError("line " + std::to_string(line_no) + ": " + col +
                               " must lie in [0,1]");
    }
    s.a = parse_binary(tokens[d], line_no, "a");
    s.y = parse_binary(tokens[d + 1], line_no, "y");
    data.samples.push_back(std::move(s));
  }
  if (!have_header)
    throw wate::InputError("empty file: missing header x1,...,xd,a,y");
  if (data.samples.empty())
    throw wate::InputError("no data rows after the header");
  data.validate();
  return data;
}

std::string provenance_line(const std::string& digest, std::uint64_t seed) {
  return "# wate " + std::string(wate::version) + " digest=" + digest +
         " seed=" + std::to_string(seed) + "\n";
}

std::string eif_csv(const std::vector<double>& d_values,
                    const std::string& digest, std::uint64_t seed) {
  std::string out = provenance_line(digest, seed);
  out += "index,d_full\n";
  for (std::size_t i = 0; i < d_values.size(); ++i)
    out += std::to_string(i) + "," + format17(d_values[i]) + "\n";
  return out;
}

std::string mc_rows_csv(const wate::McResult& result,
                        const std::string& digest, std::uint64_t seed) {
  std::string out = provenance_line(digest, seed);
  out +=
      "rep,failed,psi_hat,sigma2,ci_lo,ci_hi,covered,t_hat0,t_hat1,"
      "fallback0,fallback1,failure\n";
  for (const wate::McRow& r : result.rows) {
    out += std::to_string(r.rep);
    out += r.failed ? ",1," : ",0,";
    out += format17(r.psi_hat) + "," + format17(r.sigma2) + ",";
    out += format17(r.ci_lo) + "," + format17(r.ci_hi) + ",";
    out += r.covered ? "1," : "0,";
    out += format17(r.t_hat0) + "," + format17(r.t_hat1) + ",";
    out += r.fallback0 ? "1," : "0,";
    out += r.fallback1 ? "1," : "0,";
    out += quote_csv(r.failure) + "\n";
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw wate::InputError("cannot write '" + path + "'");
  out << content;
  if (!out) throw wate::InputError("write failed for '" + path + "'");
}

}  // namespace watecli
