#include "deepclife/network.hpp"

#include <cmath>

#include "deepclife/error.hpp"

namespace deepclife {

std::string to_string(Activation a) { return a == Activation::kRelu ? "relu" : "tanh"; }

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + name + "' (expected relu or tanh)");
}

std::size_t ModelParams::input_width() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weight.cols());
}

std::size_t ModelParams::clusters() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weight.rows());
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 1;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  for (const auto& b : norms) n += static_cast<std::size_t>(b.gamma.size() + b.beta.size());
  return n;
}

Eigen::VectorXd ModelParams::flatten() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  auto put = [&](const auto& block) {
    flat.segment(at, block.size()) = Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
    at += block.size();
  };
  for (const auto& l : layers) {
    put(l.weight);
    put(l.bias);
  }
  for (const auto& b : norms) {
    put(b.gamma);
    put(b.beta);
  }
  flat(at) = log_rate;
  return flat;
}

void ModelParams::assign(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
    throw ConfigError("flat parameter vector has the wrong size");
  }
  Eigen::Index at = 0;
  auto take = [&](auto& block) {
    Eigen::Map<Eigen::VectorXd>(block.data(), block.size()) = flat.segment(at, block.size());
    at += block.size();
  };
  for (auto& l : layers) {
    take(l.weight);
    take(l.bias);
  }
  for (auto& b : norms) {
    take(b.gamma);
    take(b.beta);
  }
  log_rate = flat(at);
}

Eigen::VectorXd ModelParams::weight_mask() const {
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  for (const auto& l : layers) {
    mask.segment(at, l.weight.size()).setOnes();
    at += l.weight.size() + l.bias.size();
  }
  return mask;
}

ModelParams initialize_params(std::size_t input_width, std::size_t clusters,
                              std::size_t hidden_layers, std::size_t hidden_units,
                              Activation activation, bool batch_norm,
                              double log_rate, std::mt19937_64& rng) {
  if (input_width == 0) throw ConfigError("network input width must be positive");
  if (clusters < 2) throw ConfigError("the network needs at least two output clusters");
  if (hidden_layers > 0 && hidden_units == 0) throw ConfigError("hidden_units must be positive");

  ModelParams p;
  p.activation = activation;
  p.log_rate = log_rate;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::size_t fan_in = input_width;
  for (std::size_t l = 0; l <= hidden_layers; ++l) {
    const std::size_t out = l == hidden_layers ? clusters : hidden_units;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    DenseLayer layer{Eigen::MatrixXd(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(fan_in)),
                     Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out))};
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = bound * unit(rng);
    }
    p.layers.push_back(std::move(layer));
    if (batch_norm && l < hidden_layers) {
      const auto n = static_cast<Eigen::Index>(out);
      p.norms.push_back({Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n),
                         Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n)});
    }
    fan_in = out;
  }
  return p;
}

namespace {

void softmax_rows(Eigen::MatrixXd& logits) {
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    const double top = row.maxCoeff();
    row = (row.array() - top).exp();
    row /= row.sum();
  }
}

}  // namespace

ForwardPass forward_pass(const ModelParams& params, const Eigen::MatrixXd& features,
                         Mode mode) {
  if (params.layers.empty()) throw ConfigError("network has no layers");
  if (static_cast<std::size_t>(features.cols()) != params.input_width()) {
    throw DataError("feature width " + std::to_string(features.cols()) +
                    " does not match network input width " +
                    std::to_string(params.input_width()));
  }
  ForwardPass pass;
  pass.mode = mode;
  Eigen::MatrixXd x = features;
  const std::size_t hidden = params.hidden_layers();
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    pass.layer_inputs.push_back(x);
    Eigen::MatrixXd z = (x * layer.weight.transpose()).rowwise() + layer.bias.transpose();
    if (l == hidden) {
      softmax_rows(z);
      pass.alpha = std::move(z);
      break;
    }
    if (params.batch_norm()) {
      const auto& bn = params.norms[l];
      Eigen::RowVectorXd mean, var;
      if (mode == Mode::kTraining) {
        mean = z.colwise().mean();
        var = (z.rowwise() - mean).array().square().colwise().mean();
      } else {
        mean = bn.running_mean.transpose();
        var = bn.running_var.transpose();
      }
      const Eigen::RowVectorXd inv_std = (var.array() + kBatchNormEpsilon).rsqrt();
      Eigen::MatrixXd zhat = (z.rowwise() - mean).array().rowwise() * inv_std.array();
      z = (zhat.array().rowwise() * bn.gamma.transpose().array()).rowwise() +
          bn.beta.transpose().array();
      pass.normalized.push_back(std::move(zhat));
      pass.batch_mean.push_back(std::move(mean));
      pass.batch_var.push_back(std::move(var));
    }
    pass.activated_from.push_back(z);
    if (params.activation == Activation::kRelu) {
      x = z.cwiseMax(0.0);
    } else {
      x = z.array().tanh();
    }
  }
  return pass;
}

Eigen::MatrixXd forward(const ModelParams& params, const Eigen::MatrixXd& features, Mode mode) {
  return forward_pass(params, features, mode).alpha;
}

Eigen::VectorXd backward(const ModelParams& params, const ForwardPass& pass,
                         const Eigen::MatrixXd& grad_alpha) {
  if (grad_alpha.rows() != pass.alpha.rows() || grad_alpha.cols() != pass.alpha.cols()) {
    throw DataError("upstream gradient shape does not match the forward pass");
  }
  std::vector<Eigen::MatrixXd> grad_w(params.layers.size());
  std::vector<Eigen::VectorXd> grad_b(params.layers.size());
  std::vector<Eigen::VectorXd> grad_gamma(params.norms.size());
  std::vector<Eigen::VectorXd> grad_beta(params.norms.size());

  // Softmax Jacobian-vector product.
  const Eigen::VectorXd inner = (grad_alpha.array() * pass.alpha.array()).rowwise().sum();
  Eigen::MatrixXd dz = pass.alpha.array() * (grad_alpha.colwise() - inner).array();

  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const auto& layer = params.layers[l];
    const auto& x = pass.layer_inputs[l];
    grad_w[l] = dz.transpose() * x;
    grad_b[l] = dz.colwise().sum().transpose();
    if (l == 0) break;

    // Back through the previous hidden layer's activation and batch norm.
    const std::size_t h = l - 1;
    Eigen::MatrixXd dx = dz * layer.weight;
    const auto& pre = pass.activated_from[h];
    if (params.activation == Activation::kRelu) {
      dx = (pre.array() > 0.0).select(dx, 0.0);
    } else {
      dx = dx.array() * (1.0 - x.array().square());
    }
    if (params.batch_norm()) {
      const auto& bn = params.norms[h];
      const auto& zhat = pass.normalized[h];
      grad_gamma[h] = (dx.array() * zhat.array()).colwise().sum().transpose();
      grad_beta[h] = dx.colwise().sum().transpose();
      const Eigen::RowVectorXd inv_std = (pass.batch_var[h].array() + kBatchNormEpsilon).rsqrt();
      Eigen::MatrixXd dzhat = dx.array().rowwise() * bn.gamma.transpose().array();
      if (pass.mode == Mode::kTraining) {
        const double n = static_cast<double>(dzhat.rows());
        const Eigen::RowVectorXd sum_d = dzhat.colwise().sum();
        const Eigen::RowVectorXd sum_dz = (dzhat.array() * zhat.array()).colwise().sum();
        dx = ((n * dzhat.array()).rowwise() - sum_d.array() -
              zhat.array().rowwise() * sum_dz.array())
                 .rowwise() *
             (inv_std.array() / n);
      } else {
        dx = dzhat.array().rowwise() * inv_std.array();
      }
    }
    dz = std::move(dx);
  }

  Eigen::VectorXd flat = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.parameter_count()));
  Eigen::Index at = 0;
  auto put = [&](const auto& block) {
    flat.segment(at, block.size()) = Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
    at += block.size();
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    put(grad_w[l]);
    put(grad_b[l]);
  }
  for (std::size_t h = 0; h < params.norms.size(); ++h) {
    put(grad_gamma[h]);
    put(grad_beta[h]);
  }
  return flat;
}

void update_running_statistics(ModelParams& params, const ForwardPass& pass) {
  if (pass.mode != Mode::kTraining) return;
  for (std::size_t h = 0; h < params.norms.size(); ++h) {
    auto& bn = params.norms[h];
    const double n = static_cast<double>(pass.layer_inputs[h].rows());
    const double unbias = n > 1.0 ? n / (n - 1.0) : 1.0;
    bn.running_mean = (1.0 - kBatchNormMomentum) * bn.running_mean +
                      kBatchNormMomentum * pass.batch_mean[h].transpose();
    bn.running_var = (1.0 - kBatchNormMomentum) * bn.running_var +
                     kBatchNormMomentum * unbias * pass.batch_var[h].transpose();
  }
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))),
      v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (grad.size() != m_.size() || params.size() != m_.size()) {
    throw NumericalError("Adam step with mismatched sizes");
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

}  // namespace deepclife
