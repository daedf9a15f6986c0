#include "impure/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "impure/error.hpp"

namespace impure {

namespace {

Rng seeded_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

Density ensure_sampler(const Density& d) {
  return d.can_sample() ? d : with_rejection_sampler(d);
}

}  // namespace

EmpiricalPopulation sample_population(const Density& positive, const Density& negative,
                                      double prevalence, std::size_t size,
                                      std::uint64_t seed, SamplingMode mode) {
  if (positive.dim() != negative.dim()) {
    throw InputError("positive and negative densities differ in dimension");
  }
  if (!(prevalence >= 0.0 && prevalence <= 1.0)) {
    throw InputError("prevalence must lie in [0,1]");
  }
  if (size == 0) throw InputError("population size must be positive");

  const Density pos = ensure_sampler(positive);
  const Density neg = ensure_sampler(negative);
  Rng rng = seeded_rng(seed);

  EmpiricalPopulation pop;
  pop.dim = positive.dim();
  pop.declared_prevalence = prevalence;
  pop.points.reserve(size);
  std::vector<std::uint8_t> labels;
  labels.reserve(size);

  if (mode == SamplingMode::exact_count) {
    const double target = prevalence * static_cast<double>(size);
    const double rounded = std::round(target);
    if (std::abs(target - rounded) > 1e-9 * std::max(1.0, target)) {
      std::ostringstream msg;
      msg << "exact-count sampling needs prevalence * size to be an integer (got " << target
          << ")";
      throw InputError(msg.str());
    }
    const auto positives = static_cast<std::size_t>(rounded);
    for (std::size_t i = 0; i < positives; ++i) {
      pop.points.push_back(pos.sample(rng));
      labels.push_back(1);
    }
    for (std::size_t i = positives; i < size; ++i) {
      pop.points.push_back(neg.sample(rng));
      labels.push_back(0);
    }
    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Point> shuffled;
    std::vector<std::uint8_t> shuffled_labels;
    shuffled.reserve(size);
    shuffled_labels.reserve(size);
    for (auto i : order) {
      shuffled.push_back(std::move(pop.points[i]));
      shuffled_labels.push_back(labels[i]);
    }
    pop.points = std::move(shuffled);
    labels = std::move(shuffled_labels);
  } else {
    std::bernoulli_distribution coin(prevalence);
    for (std::size_t i = 0; i < size; ++i) {
      const bool positive_draw = coin(rng);
      pop.points.push_back(positive_draw ? pos.sample(rng) : neg.sample(rng));
      labels.push_back(positive_draw ? 1 : 0);
    }
  }
  pop.hidden_labels = std::move(labels);
  return pop;
}

FileFormat format_for_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".json" ? FileFormat::json : FileFormat::csv;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_double(const std::string& field, double& out) {
  if (field.empty()) return false;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (*begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

EmpiricalPopulation load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  EmpiricalPopulation pop;
  std::vector<std::uint8_t> labels;
  std::optional<std::size_t> label_column;
  std::size_t columns = 0;
  bool first_row = true;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_double(fields[i], values[i])) {
        numeric = false;
        break;
      }
    }
    if (first_row) {
      first_row = false;
      columns = fields.size();
      if (!numeric) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
          std::string name = fields[i];
          std::transform(name.begin(), name.end(), name.begin(),
                         [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
          if (name == "label") label_column = i;
        }
        continue;
      }
    }
    if (fields.size() != columns) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": expected " << columns << " columns, found "
          << fields.size();
      throw InputError(msg.str());
    }
    if (!numeric) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": malformed numeric field";
      throw ParseError(msg.str());
    }
    Point p;
    p.reserve(columns);
    for (std::size_t i = 0; i < columns; ++i) {
      if (label_column && i == *label_column) {
        if (values[i] != 0.0 && values[i] != 1.0) {
          std::ostringstream msg;
          msg << path.string() << ":" << line_no << ": label must be 0 or 1";
          throw ParseError(msg.str());
        }
        labels.push_back(static_cast<std::uint8_t>(values[i]));
      } else {
        p.push_back(values[i]);
      }
    }
    pop.points.push_back(std::move(p));
  }
  if (pop.points.empty()) {
    throw InputError("'" + path.string() + "' contains no data rows");
  }
  pop.dim = pop.points.front().size();
  if (pop.dim == 0) throw InputError("'" + path.string() + "' has no coordinate columns");
  if (label_column) pop.hidden_labels = std::move(labels);
  return pop;
}

EmpiricalPopulation load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  EmpiricalPopulation pop;
  try {
    const auto& pts = doc.at("points");
    for (const auto& row : pts) pop.points.push_back(row.get<Point>());
    if (pop.points.empty()) throw InputError("'" + path.string() + "' contains no points");
    pop.dim = doc.contains("dim") ? doc.at("dim").get<std::size_t>() : pop.points.front().size();
    if (doc.contains("prevalence") && !doc.at("prevalence").is_null()) {
      pop.declared_prevalence = doc.at("prevalence").get<double>();
    }
    if (doc.contains("labels")) {
      pop.hidden_labels = doc.at("labels").get<std::vector<std::uint8_t>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  for (std::size_t i = 0; i < pop.points.size(); ++i) {
    if (pop.points[i].size() != pop.dim) {
      std::ostringstream msg;
      msg << path.string() << ": point " << i << " has dimension " << pop.points[i].size()
          << ", expected " << pop.dim;
      throw InputError(msg.str());
    }
  }
  if (pop.hidden_labels && pop.hidden_labels->size() != pop.points.size()) {
    throw InputError(path.string() + ": labels and points differ in length");
  }
  return pop;
}

}  // namespace

EmpiricalPopulation load_population(const std::filesystem::path& path, FileFormat format) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: '" + path.string() + "'");
  return format == FileFormat::json ? load_json(path) : load_csv(path);
}

EmpiricalPopulation load_population(const std::filesystem::path& path) {
  return load_population(path, format_for_path(path));
}

void save_population(const EmpiricalPopulation& population,
                     const std::filesystem::path& path, FileFormat format,
                     bool include_labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const bool labels = include_labels && population.hidden_labels.has_value();
  if (format == FileFormat::json) {
    nlohmann::json doc;
    doc["dim"] = population.dim;
    doc["points"] = population.points;
    doc["prevalence"] = population.declared_prevalence
                            ? nlohmann::json(*population.declared_prevalence)
                            : nlohmann::json(nullptr);
    if (labels) doc["labels"] = *population.hidden_labels;
    out << doc.dump(2) << '\n';
  } else {
    for (std::size_t i = 0; i < population.dim; ++i) out << (i ? "," : "") << 'x' << i;
    if (labels) out << ",label";
    out << '\n';
    out << std::setprecision(17);
    for (std::size_t k = 0; k < population.size(); ++k) {
      const auto& p = population.points[k];
      for (std::size_t i = 0; i < p.size(); ++i) out << (i ? "," : "") << p[i];
      if (labels) out << ',' << static_cast<int>((*population.hidden_labels)[k]);
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace impure
