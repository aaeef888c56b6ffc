#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "deepclife/error.hpp"
#include "deepclife/trainer.hpp"

namespace deepclife {

namespace {

std::string hex(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::hex);
  if (ec != std::errc()) throw NumericalError("cannot format value for checkpoint");
  return std::string(buf, ptr);
}

double unhex(const std::string& token) {
  double x = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), x, std::chars_format::hex);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw DataError("checkpoint: malformed value '" + token + "'");
  }
  return x;
}

template <class Block>
void write_block(std::ostream& out, const std::string& tag, const Block& block) {
  out << tag << ' ' << block.size();
  for (Eigen::Index i = 0; i < block.size(); ++i) out << ' ' << hex(block.data()[i]);
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::istringstream line(const std::string& expected_tag) {
    std::string text;
    if (!std::getline(in_, text)) throw DataError("checkpoint truncated before '" + expected_tag + "'");
    std::istringstream ss(text);
    std::string tag;
    ss >> tag;
    if (tag != expected_tag) {
      throw DataError("checkpoint: expected '" + expected_tag + "', found '" + tag + "'");
    }
    return ss;
  }

  template <class Block>
  void block(const std::string& tag, Block& block) {
    auto ss = line(tag);
    Eigen::Index size = 0;
    ss >> size;
    if (size != block.size()) throw DataError("checkpoint: size mismatch in '" + tag + "'");
    std::string token;
    for (Eigen::Index i = 0; i < size; ++i) {
      if (!(ss >> token)) throw DataError("checkpoint: short block '" + tag + "'");
      block.data()[i] = unhex(token);
    }
  }

  std::istream& stream() { return in_; }

 private:
  std::istream& in_;
};

}  // namespace

void save_checkpoint(std::ostream& out, const TrainedModel& model) {
  const auto& p = model.params;
  out << kCheckpointMagic << '\n';
  out << "seed " << model.config.seed << '\n';
  const auto kv = model.config.to_key_values();
  out << "config " << kv.entries().size() << '\n';
  kv.write(out);
  out << "termination " << to_string(model.termination) << '\n';
  out << "log_rate " << hex(p.log_rate) << '\n';
  out << "activation " << to_string(p.activation) << '\n';
  out << "layers " << p.layers.size() << '\n';
  for (const auto& l : p.layers) {
    out << "shape " << l.weight.rows() << ' ' << l.weight.cols() << '\n';
    write_block(out, "weight", l.weight);
    write_block(out, "bias", l.bias);
  }
  out << "batchnorm " << p.norms.size() << '\n';
  for (const auto& b : p.norms) {
    write_block(out, "gamma", b.gamma);
    write_block(out, "beta", b.beta);
    write_block(out, "running_mean", b.running_mean);
    write_block(out, "running_var", b.running_var);
  }
  write_block(out, "scaler_mean", model.scaler.mean);
  write_block(out, "scaler_scale", model.scaler.scale);
  out << "end\n";
}

void save_checkpoint(const std::string& path, const TrainedModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint " + path);
  save_checkpoint(out, model);
  if (!out) throw DataError("failed writing checkpoint " + path);
}

TrainedModel load_checkpoint(std::istream& in) {
  std::string magic;
  if (!std::getline(in, magic) || magic != kCheckpointMagic) {
    throw DataError("not a checkpoint (missing DEEPCLIFE1 header)");
  }
  Reader r(in);
  TrainedModel m;
  std::uint64_t seed = 0;
  r.line("seed") >> seed;

  std::size_t entries = 0;
  r.line("config") >> entries;
  std::ostringstream config_text;
  for (std::size_t i = 0; i < entries; ++i) {
    std::string text;
    if (!std::getline(in, text)) throw DataError("checkpoint truncated in config block");
    config_text << text << '\n';
  }
  std::istringstream config_in(config_text.str());
  m.config = TrainConfig::from_key_values(KeyValueConfig::parse(config_in));
  if (m.config.seed != seed) throw DataError("checkpoint: seed does not match config echo");

  std::string word;
  r.line("termination") >> word;
  m.termination = parse_termination_choice(word);
  r.line("log_rate") >> word;
  m.params.log_rate = unhex(word);
  r.line("activation") >> word;
  m.params.activation = parse_activation(word);

  std::size_t layer_count = 0;
  r.line("layers") >> layer_count;
  for (std::size_t l = 0; l < layer_count; ++l) {
    Eigen::Index rows = 0, cols = 0;
    r.line("shape") >> rows >> cols;
    if (rows <= 0 || cols <= 0) throw DataError("checkpoint: bad layer shape");
    DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    r.block("weight", layer.weight);
    r.block("bias", layer.bias);
    m.params.layers.push_back(std::move(layer));
  }
  std::size_t norm_count = 0;
  r.line("batchnorm") >> norm_count;
  if (norm_count != 0 && norm_count + 1 != layer_count) {
    throw DataError("checkpoint: batch-norm count does not match hidden layers");
  }
  for (std::size_t h = 0; h < norm_count; ++h) {
    const auto width = m.params.layers[h].weight.rows();
    BatchNorm bn{Eigen::VectorXd(width), Eigen::VectorXd(width), Eigen::VectorXd(width),
                 Eigen::VectorXd(width)};
    r.block("gamma", bn.gamma);
    r.block("beta", bn.beta);
    r.block("running_mean", bn.running_mean);
    r.block("running_var", bn.running_var);
    m.params.norms.push_back(std::move(bn));
  }
  const auto width = static_cast<Eigen::Index>(m.params.input_width());
  m.scaler.mean.resize(width);
  m.scaler.scale.resize(width);
  r.block("scaler_mean", m.scaler.mean);
  r.block("scaler_scale", m.scaler.scale);
  r.line("end");
  return m;
}

TrainedModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path);
  return load_checkpoint(in);
}

}  // namespace deepclife
