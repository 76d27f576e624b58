#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "biasamp/labels.hpp"

namespace biasamp {

/// Input-data problem the caller can fix; carries line-numbered context.
/// CLI commands map this to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One parsed CSV record; quoted fields with embedded commas/quotes are
/// handled, so public tabular exports load as-is.
std::vector<std::string> split_csv_line(const std::string& line);

/// Instance-level prediction file: header `id,a,t,a_hat,t_hat` with the
/// prediction columns optional. Codes are dense nonnegative integers;
/// truth and prediction channels share a cardinality (max code + 1 over
/// both). ids must be unique.
struct PredictionsFile {
  std::vector<long> ids;
  PairedDataset data;
};

PredictionsFile read_predictions_csv(std::istream& in,
                                     const std::string& source_name);
PredictionsFile read_predictions_file(const std::string& path);

void write_predictions_csv(const PredictionsFile& file, std::ostream& out);
void write_predictions_file(const PredictionsFile& file,
                            const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace biasamp
