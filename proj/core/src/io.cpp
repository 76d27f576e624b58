#include "biasamp/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace biasamp {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

namespace {

long parse_code(const std::string& field, std::size_t line_no,
                const std::string& column, const std::string& source) {
  if (field.empty()) {
    throw ValidationError(source + ": line " + std::to_string(line_no) +
                          ": empty value in column '" + column + "'");
  }
  std::size_t consumed = 0;
  long value = 0;
  try {
    value = std::stol(field, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != field.size() || value < 0) {
    throw ValidationError(source + ": line " + std::to_string(line_no) +
                          ": column '" + column +
                          "' must be a nonnegative integer, got '" + field + "'");
  }
  return value;
}

// Dense-code check across a truth channel and its optional predictions.
int finish_channel(const std::string& name, std::vector<int>& truth,
                   std::vector<int>* predicted, const std::string& source) {
  int max_code = 0;
  for (int c : truth) max_code = std::max(max_code, c);
  if (predicted) {
    for (int c : *predicted) max_code = std::max(max_code, c);
  }
  int cardinality = max_code + 1;
  if (cardinality < 2) {
    throw ValidationError(source + ": column '" + name +
                          "' has a single class; need at least 2");
  }
  std::vector<bool> seen(static_cast<std::size_t>(cardinality), false);
  for (int c : truth) seen[static_cast<std::size_t>(c)] = true;
  if (predicted) {
    for (int c : *predicted) seen[static_cast<std::size_t>(c)] = true;
  }
  for (int c = 0; c < cardinality; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) {
      throw ValidationError(source + ": column '" + name +
                            "' codes are not dense: class " +
                            std::to_string(c) + " never occurs");
    }
  }
  return cardinality;
}

}  // namespace

PredictionsFile read_predictions_csv(std::istream& in,
                                     const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(source_name + ": empty file");
  }
  auto header = split_csv_line(line);
  auto column = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  int col_id = column("id");
  int col_a = column("a");
  int col_t = column("t");
  int col_a_hat = column("a_hat");
  int col_t_hat = column("t_hat");
  if (col_id < 0 || col_a < 0 || col_t < 0) {
    throw ValidationError(source_name +
                          ": line 1: header must contain id,a,t columns");
  }

  PredictionsFile file;
  std::vector<int> a, t, a_hat, t_hat;
  std::unordered_set<long> seen_ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ValidationError(source_name + ": line " + std::to_string(line_no) +
                            ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(fields.size()));
    }
    long id = parse_code(fields[static_cast<std::size_t>(col_id)], line_no, "id",
                         source_name);
    if (!seen_ids.insert(id).second) {
      throw ValidationError(source_name + ": line " + std::to_string(line_no) +
                            ": duplicate id " + std::to_string(id));
    }
    file.ids.push_back(id);
    a.push_back(static_cast<int>(parse_code(
        fields[static_cast<std::size_t>(col_a)], line_no, "a", source_name)));
    t.push_back(static_cast<int>(parse_code(
        fields[static_cast<std::size_t>(col_t)], line_no, "t", source_name)));
    if (col_a_hat >= 0) {
      a_hat.push_back(static_cast<int>(
          parse_code(fields[static_cast<std::size_t>(col_a_hat)], line_no,
                     "a_hat", source_name)));
    }
    if (col_t_hat >= 0) {
      t_hat.push_back(static_cast<int>(
          parse_code(fields[static_cast<std::size_t>(col_t_hat)], line_no,
                     "t_hat", source_name)));
    }
  }
  if (file.ids.empty()) {
    throw ValidationError(source_name + ": no data rows");
  }

  int a_card = finish_channel("a", a, col_a_hat >= 0 ? &a_hat : nullptr,
                              source_name);
  int t_card = finish_channel("t", t, col_t_hat >= 0 ? &t_hat : nullptr,
                              source_name);
  file.data.a = CategoricalLabels{std::move(a), a_card};
  file.data.t = CategoricalLabels{std::move(t), t_card};
  if (col_a_hat >= 0) {
    file.data.a_hat = CategoricalLabels{std::move(a_hat), a_card};
  }
  if (col_t_hat >= 0) {
    file.data.t_hat = CategoricalLabels{std::move(t_hat), t_card};
  }
  return file;
}

PredictionsFile read_predictions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  return read_predictions_csv(in, path);
}

void write_predictions_csv(const PredictionsFile& file, std::ostream& out) {
  out << "id,a,t";
  if (file.data.a_hat) out << ",a_hat";
  if (file.data.t_hat) out << ",t_hat";
  out << '\n';
  for (std::size_t i = 0; i < file.ids.size(); ++i) {
    out << file.ids[i] << ',' << file.data.a.codes[i] << ','
        << file.data.t.codes[i];
    if (file.data.a_hat) out << ',' << file.data.a_hat->codes[i];
    if (file.data.t_hat) out << ',' << file.data.t_hat->codes[i];
    out << '\n';
  }
}

void write_predictions_file(const PredictionsFile& file,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_predictions_csv(file, out);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
}

}  // namespace biasamp
