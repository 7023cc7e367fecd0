#pragma once

// Serialization of symbol records and tabular results: RFC 4180 CSV with a
// schema-version comment line, and a little-endian float64 binary container.
// All floating-point text uses %.17g so values round-trip exactly and output
// is byte-reproducible.

#include <iosfwd>
#include <string>
#include <vector>

#include "cvqkd/simulate.hpp"

namespace cvqkd {

inline constexpr const char* records_csv_schema = "cvqkd.records/1";
inline constexpr const char* sweep_csv_schema = "cvqkd.sweep/1";
inline constexpr const char* budget_csv_schema = "cvqkd.budget/1";
inline constexpr const char* keyrate_csv_schema = "cvqkd.keyrate/1";

// Shortest exact decimal form of a double (printf %.17g).
std::string format_double(double x);

// RFC 4180 field quoting (quotes fields containing comma, quote or newline).
std::string csv_field(const std::string& raw);

// Records as CSV: "# schema: cvqkd.records/1", a header row
// alice_q,alice_p,basis,bob_q,bob_p,u_q,u_p, then one row per symbol.
void write_records_csv(std::ostream& out,
                       const std::vector<SymbolRecord>& records);
std::vector<SymbolRecord> read_records_csv(std::istream& in);

// Records as binary: magic "CVQK", uint32 version (1), uint64 count, then
// 7 little-endian float64 per record in CSV column order (basis encoded
// 0 = q, 1 = p, 2 = both).
void write_records_binary(std::ostream& out,
                          const std::vector<SymbolRecord>& records);
std::vector<SymbolRecord> read_records_binary(std::istream& in);

// Convenience file wrappers; format chosen by extension (.bin/.dat binary,
// anything else CSV).
void dump_records(const std::string& path,
                  const std::vector<SymbolRecord>& records);
std::vector<SymbolRecord> load_records(const std::string& path);

}  // namespace cvqkd
