#include "harmonium/cli/archive.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "harmonium/error.hpp"

namespace harmonium::cli {

namespace {

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    const std::size_t n = std::min<std::size_t>(3, bytes.size() - i);
    std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
    if (n > 1) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (n > 2) chunk |= bytes[i + 2];
    for (std::size_t k = 0; k < 4; ++k)
      out.push_back(k <= n ? kAlphabet[(chunk >> (18 - 6 * k)) & 0x3f] : '=');
  }
  return out;
}

std::vector<unsigned char> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw FormatError("tensor payload length is not a multiple of 4");
  std::vector<unsigned char> out;
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t chunk = 0;
    std::size_t pad = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      std::uint32_t v = 0;
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        ++pad;
      } else {
        const auto pos = kAlphabet.find(c);
        if (pos == std::string_view::npos || pad > 0) throw FormatError("invalid base64 in tensor payload");
        v = static_cast<std::uint32_t>(pos);
      }
      chunk = (chunk << 6) | v;
    }
    for (std::size_t k = 0; k < 3 - pad; ++k) out.push_back(static_cast<unsigned char>((chunk >> (16 - 8 * k)) & 0xff));
  }
  return out;
}

nlohmann::json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", encode_tensor(m.values())}};
}

Matrix matrix_from(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  Matrix m(rows, cols);
  const auto values = decode_tensor(j.at("data").get<std::string>(), rows * cols);
  std::copy(values.begin(), values.end(), m.values().begin());
  return m;
}

nlohmann::json vector_json(const std::vector<double>& v) {
  return {{"size", v.size()}, {"data", encode_tensor(v)}};
}

std::vector<double> vector_from(const nlohmann::json& j) {
  return decode_tensor(j.at("data").get<std::string>(), j.at("size").get<std::size_t>());
}

nlohmann::json record_json(const EpochRecord& r) {
  return {{"epoch", r.epoch},
          {"positive_energy", r.positive_energy},
          {"negative_energy", r.negative_energy},
          {"gradient_norm", r.gradient_norm},
          {"parameter_norm", r.parameter_norm},
          {"reconstruction_error", r.reconstruction_error}};
}

EpochRecord record_from(const nlohmann::json& j) {
  return {j.at("epoch"), j.at("positive_energy"), j.at("negative_energy"),
          j.at("gradient_norm"), j.at("parameter_norm"), j.at("reconstruction_error")};
}

}  // namespace

std::string encode_tensor(std::span<const double> values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (std::size_t k = 0; k < 8; ++k) bytes[8 * i + k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xff);
  }
  return base64_encode(bytes);
}

std::vector<double> decode_tensor(std::string_view text, std::size_t expected) {
  const auto bytes = base64_decode(text);
  if (bytes.size() != expected * 8)
    throw FormatError("tensor payload holds " + std::to_string(bytes.size() / 8) + " values, expected " +
                      std::to_string(expected));
  std::vector<double> values(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint64_t bits = 0;
    for (std::size_t k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[8 * i + k]) << (8 * k);
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

nlohmann::json to_json(const ModelArchive& a) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : a.schema.variables()) {
    nlohmann::json var = {{"name", v.name}, {"group", std::string(to_string(v.group))}};
    var["horizon"] = v.time_horizon ? nlohmann::json(*v.time_horizon) : nlohmann::json();
    vars.push_back(std::move(var));
  }
  const auto& p = a.parameters;
  nlohmann::json params = {
      {"w_binary", matrix_json(p.w_binary)}, {"w_time", matrix_json(p.w_time)},
      {"w_numeric", matrix_json(p.w_numeric)}, {"v_shape", matrix_json(p.v_shape)},
      {"a_binary", vector_json(p.a_binary)}, {"a_time", vector_json(p.a_time)},
      {"c_shape", vector_json(p.c_shape)}, {"a_numeric", vector_json(p.a_numeric)},
      {"sigma", vector_json(p.sigma)}, {"b_latent", vector_json(p.b_latent)}};
  const auto& c = a.config;
  nlohmann::json config = {{"n_hidden", c.n_hidden}, {"learning_rate", c.learning_rate},
                           {"epochs", c.epochs}, {"minibatch_size", c.minibatch_size},
                           {"cd_steps", c.cd_steps}, {"persistent", c.persistent},
                           {"momentum", c.momentum}, {"l2_penalty", c.l2_penalty},
                           {"seed", c.seed}, {"threads", c.threads}};
  nlohmann::json log = nlohmann::json::array();
  for (const auto& r : a.log_tail) log.push_back(record_json(r));
  return {{"format", "harmonium-model"},
          {"version", a.version},
          {"seed", a.seed},
          {"schema", vars},
          {"preprocess", a.preprocess.to_json()},
          {"parameters", params},
          {"config", config},
          {"training", {{"epochs_completed", a.epochs_completed}, {"log_tail", log}}}};
}

ModelArchive archive_from_json(const nlohmann::json& j) {
  ModelArchive a;
  try {
    if (j.at("format").get<std::string>() != "harmonium-model") throw FormatError("not a harmonium model archive");
    a.version = j.at("version").get<int>();
    if (a.version != kArchiveVersion)
      throw FormatError("archive version " + std::to_string(a.version) + " is not supported (expected " +
                        std::to_string(kArchiveVersion) + ")");
    a.seed = j.at("seed").get<std::uint64_t>();
    std::vector<VariableSpec> vars;
    for (const auto& v : j.at("schema")) {
      VariableSpec s{v.at("name"), parse_variable_group(v.at("group").get<std::string>()), std::nullopt};
      if (!v.at("horizon").is_null()) s.time_horizon = v.at("horizon").get<double>();
      vars.push_back(std::move(s));
    }
    a.schema = VariableSchema(std::move(vars));
    a.preprocess = PreprocessState::from_json(j.at("preprocess"));
    const auto& p = j.at("parameters");
    auto& t = a.parameters;
    t.w_binary = matrix_from(p.at("w_binary"));
    t.w_time = matrix_from(p.at("w_time"));
    t.w_numeric = matrix_from(p.at("w_numeric"));
    t.v_shape = matrix_from(p.at("v_shape"));
    t.a_binary = vector_from(p.at("a_binary"));
    t.a_time = vector_from(p.at("a_time"));
    t.c_shape = vector_from(p.at("c_shape"));
    t.a_numeric = vector_from(p.at("a_numeric"));
    t.sigma = vector_from(p.at("sigma"));
    t.b_latent = vector_from(p.at("b_latent"));
    t.validate();
    if (t.n_binary() != a.schema.n_binary() || t.n_time() != a.schema.n_time() ||
        t.n_numeric() != a.schema.n_numeric())
      throw FormatError("archive parameters do not match its schema");
    const auto& c = j.at("config");
    a.config.n_hidden = c.at("n_hidden");
    a.config.learning_rate = c.at("learning_rate");
    a.config.epochs = c.at("epochs");
    a.config.minibatch_size = c.at("minibatch_size");
    a.config.cd_steps = c.at("cd_steps");
    a.config.persistent = c.at("persistent");
    a.config.momentum = c.at("momentum");
    a.config.l2_penalty = c.at("l2_penalty");
    a.config.seed = c.at("seed");
    a.config.threads = c.at("threads");
    a.epochs_completed = j.at("training").at("epochs_completed");
    for (const auto& r : j.at("training").at("log_tail")) a.log_tail.push_back(record_from(r));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model archive: ") + e.what());
  } catch (const NumericalError& e) {
    throw FormatError(std::string("model archive: ") + e.what());
  }
  return a;
}

std::string serialize(const ModelArchive& archive) { return to_json(archive).dump(1) + "\n"; }

void save_archive(const std::filesystem::path& path, const ModelArchive& archive) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model '" + path.string() + "'");
  out << serialize(archive);
  if (!out) throw IoError("failed writing model '" + path.string() + "'");
}

ModelArchive load_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("model '" + path.string() + "': " + e.what());
  }
  return archive_from_json(j);
}

}  // namespace harmonium::cli
