#include "cvqkd/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cvqkd {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw error(std::string(what) + ": trailing junk");
    return v;
  } catch (const std::invalid_argument&) {
    throw error(std::string(what) + ": not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    throw error(std::string(what) + ": out of range: '" + s + "'");
  }
}

// RFC 4180 line split honouring quoted fields.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

constexpr char binary_magic[4] = {'C', 'V', 'Q', 'K'};
constexpr std::uint32_t binary_version = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof(bits));
  put_u64(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw error("binary records: truncated stream");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw error("binary records: truncated stream");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double x;
  std::memcpy(&x, &bits, sizeof(x));
  return x;
}

}  // namespace

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string out = "\"";
  for (char ch : raw) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_records_csv(std::ostream& out,
                       const std::vector<SymbolRecord>& records) {
  out << "# schema: " << records_csv_schema << "\n";
  out << "alice_q,alice_p,basis,bob_q,bob_p,u_q,u_p\n";
  for (const auto& rec : records) {
    out << format_double(rec.alice_q) << ',' << format_double(rec.alice_p)
        << ',' << to_string(rec.basis) << ',' << format_double(rec.bob_q)
        << ',' << format_double(rec.bob_p) << ',' << format_double(rec.u_q)
        << ',' << format_double(rec.u_p) << '\n';
  }
}

std::vector<SymbolRecord> read_records_csv(std::istream& in) {
  std::vector<SymbolRecord> records;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "alice_q,alice_p,basis,bob_q,bob_p,u_q,u_p")
        throw error("records csv: unexpected header: '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw error("records csv: expected 7 fields");
    SymbolRecord rec;
    rec.alice_q = parse_double(f[0], "alice_q");
    rec.alice_p = parse_double(f[1], "alice_p");
    rec.basis = basis_from_string(f[2]);
    rec.bob_q = parse_double(f[3], "bob_q");
    rec.bob_p = parse_double(f[4], "bob_p");
    rec.u_q = parse_double(f[5], "u_q");
    rec.u_p = parse_double(f[6], "u_p");
    records.push_back(rec);
  }
  if (!header_seen) throw error("records csv: missing header row");
  return records;
}

void write_records_binary(std::ostream& out,
                          const std::vector<SymbolRecord>& records) {
  out.write(binary_magic, 4);
  put_u32(out, binary_version);
  put_u64(out, records.size());
  for (const auto& rec : records) {
    put_f64(out, rec.alice_q);
    put_f64(out, rec.alice_p);
    put_f64(out, static_cast<double>(static_cast<int>(rec.basis)));
    put_f64(out, rec.bob_q);
    put_f64(out, rec.bob_p);
    put_f64(out, rec.u_q);
    put_f64(out, rec.u_p);
  }
}

std::vector<SymbolRecord> read_records_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, binary_magic, 4) != 0)
    throw error("binary records: bad magic");
  const std::uint32_t version = get_u32(in);
  if (version != binary_version)
    throw error("binary records: unsupported version " +
                std::to_string(version));
  const std::uint64_t count = get_u64(in);
  std::vector<SymbolRecord> records(count);
  for (auto& rec : records) {
    rec.alice_q = get_f64(in);
    rec.alice_p = get_f64(in);
    const double basis = get_f64(in);
    if (basis != 0.0 && basis != 1.0 && basis != 2.0)
      throw error("binary records: invalid basis code");
    rec.basis = static_cast<Basis>(static_cast<int>(basis));
    rec.bob_q = get_f64(in);
    rec.bob_p = get_f64(in);
    rec.u_q = get_f64(in);
    rec.u_p = get_f64(in);
  }
  return records;
}

namespace {
bool has_binary_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return false;
  const std::string ext = path.substr(dot + 1);
  return ext == "bin" || ext == "dat";
}
}  // namespace

void dump_records(const std::string& path,
                  const std::vector<SymbolRecord>& records) {
  std::ofstream out(path, std::ios::binary);  // binary: keep \n verbatim
  if (!out) throw error("dump_records: cannot open '" + path + "'");
  if (has_binary_extension(path))
    write_records_binary(out, records);
  else
    write_records_csv(out, records);
  if (!out) throw error("dump_records: write failed for '" + path + "'");
}

std::vector<SymbolRecord> load_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("load_records: cannot open '" + path + "'");
  return has_binary_extension(path) ? read_records_binary(in)
                                    : read_records_csv(in);
}

}  // namespace cvqkd
