#pragma once

// CSV ingestion and emission for the command-line tool. Input format:
// mandatory header "x1,...,xd,a,y", '.' decimal separator, UTF-8, one
// observation per line. All errors are wate::InputError and name the
// offending line (1-based, counting the header as line 1).

#include <string>
#include <vector>

#include "wate/model.hpp"
#include "wate/simlab.hpp"

namespace watecli {

wate::Dataset read_dataset_csv(const std::string& path);

// "# wate <version> digest=<hex> seed=<seed>" provenance comment line.
std::string provenance_line(const std::string& digest, std::uint64_t seed);

// index,d_full per sample.
std::string eif_csv(const std::vector<double>& d_values,
                    const std::string& digest, std::uint64_t seed);

// One row per replication.
std::string mc_rows_csv(const wate::McResult& result,
                        const std::string& digest, std::uint64_t seed);

void write_file(const std::string& path, const std::string& content);

}  // namespace watecli
