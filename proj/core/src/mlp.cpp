#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdisc/classify.hpp"
#include "cdisc/error.hpp"
#include "rng.hpp"

namespace cdisc {
namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using MatMap = Eigen::Map<Mat>;
using ConstMatMap = Eigen::Map<const Mat>;
using ConstVecMap = Eigen::Map<const Vec>;

ConstMatMap weights_of(const DenseLayer& l) {
  return {l.weights.data(), static_cast<Eigen::Index>(l.outputs), static_cast<Eigen::Index>(l.inputs)};
}

ConstVecMap bias_of(const DenseLayer& l) { return {l.bias.data(), static_cast<Eigen::Index>(l.outputs)}; }

void softmax_rows(Mat& z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

Mat gather(const LabeledDataset& data, std::span<const std::size_t> rows) {
  Mat x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.dim));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = data.row(rows[r]);
    std::copy(src.begin(), src.end(), x.row(static_cast<Eigen::Index>(r)).data());
  }
  return x;
}

// activations[0] is the input; activations[i] the output of layer i-1
// (post-ReLU for hidden layers, softmax for the last).
std::vector<Mat> forward(const std::vector<DenseLayer>& layers, Mat x) {
  std::vector<Mat> acts;
  acts.reserve(layers.size() + 1);
  acts.push_back(std::move(x));
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Mat z = acts.back() * weights_of(layers[i]).transpose();
    z.rowwise() += bias_of(layers[i]).transpose();
    if (i + 1 < layers.size()) {
      z = z.cwiseMax(0.0);
    } else {
      softmax_rows(z);
    }
    acts.push_back(std::move(z));
  }
  return acts;
}

double cross_entropy(const Mat& probs, const LabeledDataset& data, std::span<const std::size_t> rows) {
  double total = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double p = probs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(data.labels[rows[r]]));
    total -= std::log(std::max(p, 1e-300));
  }
  return total / static_cast<double>(rows.size());
}

void check_data(const MlpClassifier& net, const LabeledDataset& data, std::span<const std::size_t> rows) {
  if (rows.empty()) throw Error(Errc::empty_dataset, "no rows given");
  if (data.dim != net.input_dim()) throw Error(Errc::dimension_mismatch, "dataset dimension does not match network");
  for (auto r : rows) {
    if (data.labels.at(r) >= net.classes()) throw Error(Errc::invalid_argument, "label id exceeds network outputs");
  }
}

}  // namespace

MlpClassifier::MlpClassifier(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::size_t classes,
                             std::uint64_t seed) {
  if (input_dim == 0 || classes == 0) throw Error(Errc::invalid_argument, "network needs inputs and outputs");
  detail::Rng rng(detail::derive_seed(seed, 0x3e1));
  std::size_t in = input_dim;
  auto widths = hidden;
  widths.push_back(classes);
  for (auto out : widths) {
    if (out == 0) throw Error(Errc::invalid_argument, "layer width must be positive");
    DenseLayer l{in, out, std::vector<double>(in * out), std::vector<double>(out, 0.0)};
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    for (auto& w : l.weights) w = detail::normal(rng) * scale;
    layers_.push_back(std::move(l));
    in = out;
  }
}

MlpClassifier::MlpClassifier(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(Errc::invalid_model, "network has no layers");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.inputs == 0 || l.outputs == 0 || l.weights.size() != l.inputs * l.outputs || l.bias.size() != l.outputs) {
      throw Error(Errc::invalid_model, "layer " + std::to_string(i) + " has inconsistent shape");
    }
    if (i > 0 && layers_[i - 1].outputs != l.inputs) {
      throw Error(Errc::invalid_model, "layer " + std::to_string(i) + " does not chain to the previous layer");
    }
  }
}

std::vector<double> MlpClassifier::predict_proba(std::span<const double> x) const {
  if (x.size() != input_dim()) throw Error(Errc::dimension_mismatch, "input has the wrong dimension");
  Mat in(1, static_cast<Eigen::Index>(x.size()));
  std::copy(x.begin(), x.end(), in.data());
  auto acts = forward(layers_, std::move(in));
  const auto& p = acts.back();
  return {p.data(), p.data() + p.size()};
}

std::size_t MlpClassifier::predict(std::span<const double> x) const {
  auto p = predict_proba(x);
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

double MlpClassifier::loss(const LabeledDataset& data, std::span<const std::size_t> rows) const {
  check_data(*this, data, rows);
  auto acts = forward(layers_, gather(data, rows));
  return cross_entropy(acts.back(), data, rows);
}

double MlpClassifier::loss_and_gradient(const LabeledDataset& data, std::span<const std::size_t> rows,
                                        std::vector<DenseLayer>& grad) const {
  check_data(*this, data, rows);
  auto acts = forward(layers_, gather(data, rows));
  const double value = cross_entropy(acts.back(), data, rows);

  grad.resize(layers_.size());
  const double inv_b = 1.0 / static_cast<double>(rows.size());
  Mat delta = acts.back();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    delta(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(data.labels[rows[r]])) -= 1.0;
  }
  delta *= inv_b;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const auto& l = layers_[i];
    auto& g = grad[i];
    g.inputs = l.inputs;
    g.outputs = l.outputs;
    g.weights.resize(l.weights.size());
    g.bias.resize(l.bias.size());
    MatMap gw(g.weights.data(), static_cast<Eigen::Index>(l.outputs), static_cast<Eigen::Index>(l.inputs));
    gw.noalias() = delta.transpose() * acts[i];
    Eigen::Map<Vec>(g.bias.data(), static_cast<Eigen::Index>(l.outputs)) = delta.colwise().sum().transpose();
    if (i > 0) {
      Mat prev = delta * weights_of(l);
      // ReLU derivative from the stored post-activation.
      prev.array() *= (acts[i].array() > 0.0).cast<double>();
      delta = std::move(prev);
    }
  }
  return value;
}

MlpClassifier train_mlp(const LabeledDataset& train, const MlpConfig& cfg, std::vector<double>* epoch_loss) {
  if (train.empty()) throw Error(Errc::empty_dataset, "training set is empty");
  const std::size_t classes = std::max<std::size_t>(
      train.label_names.size(), *std::max_element(train.labels.begin(), train.labels.end()) + 1);
  MlpClassifier net(train.dim, cfg.hidden, classes, cfg.seed);
  detail::Rng rng(detail::derive_seed(cfg.seed, 0x3e2));

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = cfg.batch_size == 0 ? order.size() : std::min(cfg.batch_size, order.size());
  std::vector<DenseLayer> grad;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < order.size()) detail::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const auto n = std::min(batch, order.size() - start);
      net.loss_and_gradient(train, std::span(order).subspan(start, n), grad);
      auto& layers = net.layers();
      for (std::size_t i = 0; i < layers.size(); ++i) {
        for (std::size_t j = 0; j < layers[i].weights.size(); ++j) {
          layers[i].weights[j] -= cfg.learning_rate * grad[i].weights[j];
        }
        for (std::size_t j = 0; j < layers[i].bias.size(); ++j) {
          layers[i].bias[j] -= cfg.learning_rate * grad[i].bias[j];
        }
      }
    }
    if (epoch_loss) {
      std::vector<std::size_t> all(train.size());
      std::iota(all.begin(), all.end(), 0);
      epoch_loss->push_back(net.loss(train, all));
    }
  }
  return net;
}

}  // namespace cdisc
