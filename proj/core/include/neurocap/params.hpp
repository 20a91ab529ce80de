#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "neurocap/autodiff.hpp"
#include "neurocap/rng.hpp"

namespace neurocap::nn {

// Named, ordered tensor collection. Order is creation order and defines
// checkpoint layout.
class ParamStore {
  public:
    Mat& add(const std::string& name, Mat value);
    Mat& at(const std::string& name);
    const Mat& at(const std::string& name) const;
    bool has(const std::string& name) const { return tensors_.count(name) > 0; }

    const std::vector<std::string>& names() const { return order_; }
    long long scalar_count() const;
    bool all_finite() const;

    bool operator==(const ParamStore& other) const;

  private:
    std::vector<std::string> order_;
    std::unordered_map<std::string, Mat> tensors_;
};

// Binds a ParamStore's tensors into one tape as leaves, lazily. All
// leaves share the trainable flag; gradients are read back by name.
class Binding {
  public:
    Binding(Tape& tape, const ParamStore& store, bool trainable)
        : tape_(&tape), store_(&store), trainable_(trainable) {}

    int operator()(const std::string& name);

    std::unordered_map<std::string, Mat> grads() const;

  private:
    Tape* tape_;
    const ParamStore* store_;
    bool trainable_;
    std::unordered_map<std::string, int> vars_;
};

Mat trunc_normal(Eigen::Index rows, Eigen::Index cols, double std_dev, Rng& rng);

// Decoupled-weight-decay Adam over a ParamStore.
class AdamW {
  public:
    AdamW(double lr, double beta1, double beta2, double weight_decay, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), wd_(weight_decay), eps_(eps) {}

    void step(ParamStore& params, const std::unordered_map<std::string, Mat>& grads);
    int steps_taken() const { return t_; }

  private:
    double lr_, beta1_, beta2_, wd_, eps_;
    int t_ = 0;
    std::unordered_map<std::string, Mat> m_, v_;
};

}  // namespace neurocap::nn
