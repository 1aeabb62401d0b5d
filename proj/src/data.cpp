#include "harmonium/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "harmonium/error.hpp"
#include "harmonium/rng.hpp"

namespace harmonium {

namespace {

constexpr std::uint64_t kKfoldStream = 0x6b666f6c64ULL;

std::vector<std::string> split_record(const std::string& line, bool& ok) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  ok = true;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) ok = false;
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::optional<double> parse_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

double lower_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> present_values(const RawColumn& c) {
  std::vector<double> out;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!c.missing[i]) out.push_back(c.numbers[i]);
  return out;
}

bool low_variance(const std::vector<double>& bits, double threshold) {
  if (bits.empty()) return false;
  const double on = std::accumulate(bits.begin(), bits.end(), 0.0) / static_cast<double>(bits.size());
  return on > threshold || (1.0 - on) > threshold;
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::binary: return "binary";
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::time: return "time";
    case ColumnKind::event_indicator: return "event_indicator";
    case ColumnKind::ignore: return "ignore";
  }
  return "unknown";
}

ColumnKind parse_column_kind(std::string_view text) {
  for (auto k : {ColumnKind::categorical, ColumnKind::binary, ColumnKind::numeric, ColumnKind::time,
                 ColumnKind::event_indicator, ColumnKind::ignore})
    if (to_string(k) == text) return k;
  throw DataError("unknown column kind '" + std::string(text) + "'");
}

void SchemaDeclaration::validate() const {
  std::set<std::string> names;
  for (const auto& c : columns)
    if (!names.insert(c.name).second) throw DataError("duplicate column '" + c.name + "'");
  std::map<std::string, int> links;
  for (const auto& c : columns) {
    if (c.kind != ColumnKind::time) continue;
    const auto* ind = find(c.indicator);
    if (c.indicator.empty() || !ind || ind->kind != ColumnKind::event_indicator)
      throw DataError("time column '" + c.name + "' needs an event_indicator column");
    ++links[c.indicator];
  }
  for (const auto& c : columns) {
    if (c.kind != ColumnKind::event_indicator) continue;
    if (links[c.name] != 1)
      throw DataError("event_indicator '" + c.name + "' must be linked to exactly one time column");
  }
}

const ColumnDeclaration* SchemaDeclaration::find(std::string_view name) const {
  for (const auto& c : columns)
    if (c.name == name) return &c;
  return nullptr;
}

SchemaDeclaration SchemaDeclaration::from_json(const nlohmann::json& j) {
  SchemaDeclaration d;
  try {
    for (const auto& c : j.at("columns")) {
      ColumnDeclaration col;
      col.name = c.at("name").get<std::string>();
      col.kind = parse_column_kind(c.at("kind").get<std::string>());
      if (c.contains("indicator")) col.indicator = c.at("indicator").get<std::string>();
      d.columns.push_back(std::move(col));
    }
    if (j.contains("missing")) d.missing_sentinel = j.at("missing").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("schema declaration: ") + e.what());
  }
  d.validate();
  return d;
}

nlohmann::json SchemaDeclaration::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns) {
    nlohmann::json col = {{"name", c.name}, {"kind", std::string(to_string(c.kind))}};
    if (!c.indicator.empty()) col["indicator"] = c.indicator;
    cols.push_back(std::move(col));
  }
  return {{"columns", cols}, {"missing", missing_sentinel}};
}

SchemaDeclaration SchemaDeclaration::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema '" + path.string() + "'");
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("schema '" + path.string() + "': " + e.what());
  }
}

void SchemaDeclaration::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write schema '" + path.string() + "'");
  out << to_json().dump(2) << '\n';
  if (!out) throw IoError("failed writing schema '" + path.string() + "'");
}

const RawColumn& RawDataset::column(std::string_view name) const {
  for (const auto& c : columns)
    if (c.name == name) return c;
  throw DataError("unknown column '" + std::string(name) + "'");
}

RawDataset RawDataset::select_rows(std::span<const std::size_t> rows) const {
  RawDataset out;
  for (const auto& c : columns) {
    RawColumn r{c.name, c.kind, c.indicator, {}, {}, {}};
    for (std::size_t i : rows) {
      if (i >= c.size()) throw DataError("row index out of range");
      if (c.kind == ColumnKind::categorical)
        r.labels.push_back(c.labels[i]);
      else
        r.numbers.push_back(c.numbers[i]);
      r.missing.push_back(c.missing[i]);
    }
    out.columns.push_back(std::move(r));
  }
  return out;
}

RawDataset parse_csv(std::istream& in, const SchemaDeclaration& declaration, const std::string& source) {
  declaration.validate();
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line()) throw DataError(source + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  bool ok = true;
  std::vector<std::string> header = split_record(line, ok);
  for (auto& h : header) h = trim(h);
  if (!ok) throw DataError(source + ": malformed header");

  std::vector<int> slot(header.size(), -1);
  RawDataset data;
  for (const auto& decl : declaration.columns) {
    const auto it = std::find(header.begin(), header.end(), decl.name);
    if (it == header.end()) throw DataError(source + ": declared column '" + decl.name + "' not in header");
    if (decl.kind == ColumnKind::ignore) continue;
    slot[static_cast<std::size_t>(it - header.begin())] = static_cast<int>(data.columns.size());
    data.columns.push_back(RawColumn{decl.name, decl.kind, decl.indicator, {}, {}, {}});
  }
  for (std::size_t i = 0; i < header.size(); ++i)
    if (!declaration.find(header[i])) throw DataError(source + ": unknown column '" + header[i] + "'");

  std::vector<std::size_t> malformed;
  while (next_line()) {
    if (trim(line).empty()) continue;
    auto fields = split_record(line, ok);
    if (!ok || fields.size() != header.size()) {
      malformed.push_back(line_no);
      continue;
    }
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (slot[f] < 0) continue;
      RawColumn& col = data.columns[static_cast<std::size_t>(slot[f])];
      const std::string cell = trim(fields[f]);
      const bool missing = cell.empty() || cell == declaration.missing_sentinel;
      col.missing.push_back(missing ? 1 : 0);
      if (col.kind == ColumnKind::categorical) {
        col.labels.push_back(missing ? std::string() : cell);
        continue;
      }
      if (missing) {
        col.numbers.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const auto where = "column '" + col.name + "' line " + std::to_string(line_no);
      const auto v = parse_number(cell);
      if (!v) throw DataError(source + ": non-numeric value '" + cell + "' in " + where);
      if ((col.kind == ColumnKind::binary || col.kind == ColumnKind::event_indicator) && *v != 0.0 &&
          *v != 1.0)
        throw DataError(source + ": non-binary value '" + cell + "' in " + where);
      if (col.kind == ColumnKind::time && *v < 0.0)
        throw DataError(source + ": negative time '" + cell + "' in " + where);
      col.numbers.push_back(*v);
    }
  }
  if (!malformed.empty()) {
    std::ostringstream msg;
    msg << source << ": " << malformed.size() << " malformed row(s) at line(s)";
    for (std::size_t i = 0; i < malformed.size() && i < 20; ++i) msg << ' ' << malformed[i];
    if (malformed.size() > 20) msg << " ...";
    throw DataError(msg.str());
  }
  return data;
}

RawDataset ingest_csv(const std::filesystem::path& path, const SchemaDeclaration& declaration) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_csv(in, declaration, path.string());
}

void write_csv(std::ostream& out, const RawDataset& data, const std::string& missing_sentinel) {
  for (std::size_t c = 0; c < data.columns.size(); ++c)
    out << (c ? "," : "") << quote_field(data.columns[c].name);
  out << '\n';
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
      const RawColumn& col = data.columns[c];
      if (c) out << ',';
      if (col.missing[r])
        out << missing_sentinel;
      else if (col.kind == ColumnKind::categorical)
        out << quote_field(col.labels[r]);
      else
        out << format_number(col.numbers[r]);
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const RawDataset& data, const std::string& missing_sentinel) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_csv(out, data, missing_sentinel);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

VariableSchema PreprocessState::schema() const {
  std::vector<VariableSpec> vars;
  for (const auto& b : binaries)
    if (b.kept) vars.push_back({b.name, VariableGroup::binary, std::nullopt});
  for (const auto& c : categoricals)
    for (std::size_t k = 0; k < c.categories.size(); ++k)
      if (c.kept[k]) vars.push_back({c.name + "=" + c.categories[k], VariableGroup::binary, std::nullopt});
  for (const auto& t : times) vars.push_back({t.name, VariableGroup::time_to_event, t.horizon});
  for (const auto& n : numerics) vars.push_back({n.name, VariableGroup::numeric, std::nullopt});
  return VariableSchema(std::move(vars));
}

ImputationValues PreprocessState::imputation() const {
  ImputationValues fill;
  for (const auto& b : binaries)
    if (b.kept) fill.binary.push_back(b.median);
  for (const auto& c : categoricals)
    for (std::size_t k = 0; k < c.categories.size(); ++k)
      if (c.kept[k]) fill.binary.push_back(c.medians[k]);
  for (const auto& t : times) fill.time.push_back(t.median);
  for (const auto& n : numerics) fill.numeric.push_back(n.median);
  return fill;
}

double PreprocessState::scale_time(std::size_t i, double raw) const { return raw / times.at(i).horizon; }
double PreprocessState::unscale_time(std::size_t i, double scaled) const { return scaled * times.at(i).horizon; }
double PreprocessState::standardize(std::size_t i, double raw) const {
  return (raw - numerics.at(i).mean) / numerics.at(i).sd;
}
double PreprocessState::unstandardize(std::size_t i, double z) const {
  return z * numerics.at(i).sd + numerics.at(i).mean;
}

nlohmann::json PreprocessState::to_json() const {
  nlohmann::json j;
  j["binaries"] = nlohmann::json::array();
  for (const auto& b : binaries) j["binaries"].push_back({{"name", b.name}, {"kept", b.kept}, {"median", b.median}});
  j["categoricals"] = nlohmann::json::array();
  for (const auto& c : categoricals) {
    std::vector<bool> kept(c.kept.begin(), c.kept.end());
    j["categoricals"].push_back(
        {{"name", c.name}, {"categories", c.categories}, {"kept", kept}, {"medians", c.medians}});
  }
  j["times"] = nlohmann::json::array();
  for (const auto& t : times)
    j["times"].push_back({{"name", t.name}, {"indicator", t.indicator}, {"horizon", t.horizon}, {"median", t.median}});
  j["numerics"] = nlohmann::json::array();
  for (const auto& n : numerics)
    j["numerics"].push_back({{"name", n.name}, {"mean", n.mean}, {"sd", n.sd}, {"median", n.median}});
  nlohmann::json opts = {{"drop_low_variance", options.drop_low_variance},
                         {"low_variance_threshold", options.low_variance_threshold}};
  opts["time_epsilon"] = options.time_epsilon ? nlohmann::json(*options.time_epsilon) : nlohmann::json();
  j["options"] = opts;
  return j;
}

PreprocessState PreprocessState::from_json(const nlohmann::json& j) {
  PreprocessState s;
  try {
    for (const auto& b : j.at("binaries"))
      s.binaries.push_back({b.at("name"), b.at("kept"), b.at("median")});
    for (const auto& c : j.at("categoricals")) {
      Categorical cat;
      cat.name = c.at("name");
      cat.categories = c.at("categories").get<std::vector<std::string>>();
      for (bool k : c.at("kept").get<std::vector<bool>>()) cat.kept.push_back(k ? 1 : 0);
      cat.medians = c.at("medians").get<std::vector<double>>();
      s.categoricals.push_back(std::move(cat));
    }
    for (const auto& t : j.at("times"))
      s.times.push_back({t.at("name"), t.at("indicator"), t.at("horizon"), t.at("median")});
    for (const auto& n : j.at("numerics"))
      s.numerics.push_back({n.at("name"), n.at("mean"), n.at("sd"), n.at("median")});
    const auto& o = j.at("options");
    s.options.drop_low_variance = o.at("drop_low_variance");
    s.options.low_variance_threshold = o.at("low_variance_threshold");
    if (!o.at("time_epsilon").is_null()) s.options.time_epsilon = o.at("time_epsilon").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("preprocess state: ") + e.what());
  }
  return s;
}

PreprocessState fit_preprocess(const RawDataset& raw, const PreprocessOptions& options) {
  PreprocessState s;
  s.options = options;
  for (const auto& col : raw.columns) {
    const std::size_t present =
        static_cast<std::size_t>(std::count(col.missing.begin(), col.missing.end(), std::uint8_t{0}));
    if (present == 0) throw DataError("column '" + col.name + "' has no observed values");
    switch (col.kind) {
      case ColumnKind::binary: {
        const auto v = present_values(col);
        s.binaries.push_back(
            {col.name, !(options.drop_low_variance && low_variance(v, options.low_variance_threshold)),
             lower_median(v)});
        break;
      }
      case ColumnKind::categorical: {
        PreprocessState::Categorical cat;
        cat.name = col.name;
        std::set<std::string> labels;
        for (std::size_t i = 0; i < col.size(); ++i)
          if (!col.missing[i]) labels.insert(col.labels[i]);
        cat.categories.assign(labels.begin(), labels.end());
        for (const auto& label : cat.categories) {
          std::vector<double> bits;
          for (std::size_t i = 0; i < col.size(); ++i)
            if (!col.missing[i]) bits.push_back(col.labels[i] == label ? 1.0 : 0.0);
          cat.kept.push_back(options.drop_low_variance && low_variance(bits, options.low_variance_threshold) ? 0 : 1);
          cat.medians.push_back(lower_median(bits));
        }
        s.categoricals.push_back(std::move(cat));
        break;
      }
      case ColumnKind::time: {
        const auto v = present_values(col);
        const double horizon = *std::max_element(v.begin(), v.end());
        if (!(horizon > 0.0)) throw DataError("time column '" + col.name + "' has no positive values");
        std::vector<double> positive;
        for (double t : v)
          if (t > 0.0) positive.push_back(t / horizon);
        s.times.push_back({col.name, col.indicator, horizon, median(positive)});
        break;
      }
      case ColumnKind::numeric: {
        const auto v = present_values(col);
        const double n = static_cast<double>(v.size());
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / n);
        if (!(sd > 0.0)) throw DataError("numeric column '" + col.name + "' has zero variance");
        s.numerics.push_back({col.name, mean, sd, (median(v) - mean) / sd});
        break;
      }
      case ColumnKind::event_indicator:
      case ColumnKind::ignore:
        break;
    }
  }
  return s;
}

PreparedData apply_preprocess(const RawDataset& raw, const PreprocessState& state) {
  PreparedData out;
  out.schema = state.schema();
  const std::size_t n = raw.rows();
  const std::size_t na = out.schema.n_binary(), nb = out.schema.n_time(), nc = out.schema.n_numeric();
  out.observations.assign(n, Observation::empty(na, nb, nc));

  auto expect = [&](const std::string& name, ColumnKind kind) -> const RawColumn& {
    const RawColumn& col = raw.column(name);
    if (col.kind != kind)
      throw DataError("column '" + name + "' is " + std::string(to_string(col.kind)) + ", expected " +
                      std::string(to_string(kind)));
    return col;
  };

  std::size_t a = 0;
  for (const auto& b : state.binaries) {
    const RawColumn& col = expect(b.name, ColumnKind::binary);
    if (!b.kept) continue;
    for (std::size_t r = 0; r < n; ++r) {
      if (col.missing[r])
        out.observations[r].set_binary_missing(a);
      else
        out.observations[r].set_binary(a, col.numbers[r]);
    }
    ++a;
  }
  for (const auto& c : state.categoricals) {
    const RawColumn& col = expect(c.name, ColumnKind::categorical);
    std::vector<std::size_t> dummy(c.categories.size(), 0);
    std::size_t width = 0;
    for (std::size_t k = 0; k < c.categories.size(); ++k)
      if (c.kept[k]) dummy[k] = a + width++;
    for (std::size_t r = 0; r < n; ++r) {
      Observation& o = out.observations[r];
      if (col.missing[r]) {
        for (std::size_t k = 0; k < width; ++k) o.set_binary_missing(a + k);
        continue;
      }
      const auto it = std::find(c.categories.begin(), c.categories.end(), col.labels[r]);
      if (it == c.categories.end()) ++out.unseen_categories;
      for (std::size_t k = 0; k < c.categories.size(); ++k)
        if (c.kept[k]) o.set_binary(dummy[k], it != c.categories.end() && *it == c.categories[k] ? 1.0 : 0.0);
    }
    a += width;
  }
  for (std::size_t t = 0; t < state.times.size(); ++t) {
    const auto& spec = state.times[t];
    const RawColumn& col = expect(spec.name, ColumnKind::time);
    const RawColumn& ind = expect(spec.indicator, ColumnKind::event_indicator);
    for (std::size_t r = 0; r < n; ++r) {
      Observation& o = out.observations[r];
      if (col.missing[r]) continue;  // stays censored at 0
      double xi = state.scale_time(t, col.numbers[r]);
      const bool event = !ind.missing[r] && ind.numbers[r] == 1.0;
      if (event) {
        if (xi > 1.0) {
          xi = 1.0;
          ++out.clamped_times;
        }
        if (xi == 0.0) {
          if (!state.options.time_epsilon)
            throw DataError("column '" + spec.name + "' row " + std::to_string(r) + ": event at time 0");
          xi = *state.options.time_epsilon;
        }
        o.set_time(t, xi);
      } else {
        if (xi > kMaxCensoringTime) {
          if (xi > 1.0) ++out.clamped_times;
          xi = kMaxCensoringTime;
        }
        o.censor_time(t, xi);
      }
    }
  }
  for (std::size_t c = 0; c < state.numerics.size(); ++c) {
    const RawColumn& col = expect(state.numerics[c].name, ColumnKind::numeric);
    for (std::size_t r = 0; r < n; ++r) {
      if (col.missing[r])
        out.observations[r].set_numeric_missing(c);
      else
        out.observations[r].set_numeric(c, state.standardize(c, col.numbers[r]));
    }
  }
  for (const auto& o : out.observations) validate_observation(o, na, nb, nc);
  return out;
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_split(
    std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n)
    throw ConfigError("k-fold: k must satisfy 2 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream rng(seed, kKfoldStream);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
    std::swap(order[i], order[std::min(j, i)]);
  }
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    auto& [train, test] = folds[f];
    test.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                order.begin() + static_cast<std::ptrdiff_t>(start + size));
    train.reserve(n - size);
    for (std::size_t i = 0; i < n; ++i)
      if (i < start || i >= start + size) train.push_back(order[i]);
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    start += size;
  }
  return folds;
}

}  // namespace harmonium
