#ifndef DEEPCLIFE_NETWORK_HPP_
#define DEEPCLIFE_NETWORK_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

namespace deepclife {

enum class Activation { kRelu, kTanh };

std::string to_string(Activation a);
Activation parse_activation(const std::string& name);

/// Batch statistics come from the batch in training mode and from the
/// running averages in inference mode.
enum class Mode { kTraining, kInference };

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct BatchNorm {
  Eigen::VectorXd gamma;
  Eigen::VectorXd beta;
  Eigen::VectorXd running_mean;
  Eigen::VectorXd running_var;
};

inline constexpr double kBatchNormMomentum = 0.1;
inline constexpr double kBatchNormEpsilon = 1e-5;

/// Feedforward cluster-assignment network followed by a K-way softmax, plus
/// the unconstrained log-rate of the learnable termination model.
///
/// Flattened parameter order: for each layer its weight (column-major) and
/// bias, then for each hidden layer with batch norm its gamma and beta, and
/// finally log_rate.
struct ModelParams {
  std::vector<DenseLayer> layers;  // hidden layers then the output layer
  std::vector<BatchNorm> norms;    // one per hidden layer, or empty
  Activation activation = Activation::kRelu;
  double log_rate = 0.0;

  std::size_t input_width() const;
  std::size_t clusters() const;
  std::size_t hidden_layers() const { return layers.empty() ? 0 : layers.size() - 1; }
  bool batch_norm() const { return !norms.empty(); }

  std::size_t parameter_count() const;
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);
  /// 1 at flat positions holding layer weights (the L2-penalized entries).
  Eigen::VectorXd weight_mask() const;
};

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero, batch-norm
/// gamma one and beta zero.
ModelParams initialize_params(std::size_t input_width, std::size_t clusters,
                              std::size_t hidden_layers, std::size_t hidden_units,
                              Activation activation, bool batch_norm,
                              double log_rate, std::mt19937_64& rng);

/// Intermediate values of one forward evaluation, kept for backpropagation.
struct ForwardPass {
  Mode mode = Mode::kInference;
  std::vector<Eigen::MatrixXd> layer_inputs;  // input of each layer
  std::vector<Eigen::MatrixXd> normalized;    // z-hat per hidden layer (BN)
  std::vector<Eigen::RowVectorXd> batch_mean;
  std::vector<Eigen::RowVectorXd> batch_var;
  std::vector<Eigen::MatrixXd> activated_from;  // pre-activation per hidden layer
  Eigen::MatrixXd alpha;                        // n x K softmax outputs
};

ForwardPass forward_pass(const ModelParams& params, const Eigen::MatrixXd& features,
                         Mode mode);

/// Cluster probabilities (rows on the simplex).
Eigen::MatrixXd forward(const ModelParams& params, const Eigen::MatrixXd& features,
                        Mode mode = Mode::kInference);

/// Flat gradient of a loss with upstream gradient `grad_alpha` (n x K) on
/// the softmax outputs. The log_rate slot is left at zero.
Eigen::VectorXd backward(const ModelParams& params, const ForwardPass& pass,
                         const Eigen::MatrixXd& grad_alpha);

/// Folds the batch statistics of a training pass into the running averages.
void update_running_statistics(ModelParams& params, const ForwardPass& pass);

/// Adam on a flat parameter vector (minimization).
class Adam {
 public:
  Adam(std::size_t size, double learning_rate, double beta1 = 0.9,
       double beta2 = 0.999, double epsilon = 1e-8);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

}  // namespace deepclife

#endif  // DEEPCLIFE_NETWORK_HPP_
