#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace neurocap::nn {

using Mat = Eigen::MatrixXd;

// Reverse-mode tape over dense double matrices. Values are computed
// eagerly; each op that can need gradients records a backward closure.
// One tape per forward pass, ids are indices into the node list.
class Tape {
  public:
    using BackFn = std::function<void(Tape&)>;

    int leaf(Mat value, bool needs_grad = false);
    int push(Mat value, bool needs_grad, BackFn back);

    const Mat& val(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    bool needs_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].needs_grad; }

    // Gradient accumulator for a node, zero-initialized on first touch.
    Mat& grad(int id);
    bool has_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].grad_init; }

    // Seeds d(loss)/d(loss) = 1 (loss must be 1x1) and sweeps the tape
    // in reverse.
    void backward(int loss_id);

    std::size_t size() const { return nodes_.size(); }

  private:
    struct Node {
        Mat value;
        Mat grad;
        BackFn back;
        bool needs_grad = false;
        bool grad_init = false;
    };
    std::vector<Node> nodes_;
};

int matmul(Tape& t, int a, int b);
int add(Tape& t, int a, int b);
int sub(Tape& t, int a, int b);
// Broadcasts a 1xD row over every row of a.
int add_rowvec(Tape& t, int a, int row);
int add_const(Tape& t, int a, const Mat& c);
int mul_scalar(Tape& t, int a, double s);
int hadamard_const(Tape& t, int a, const Mat& m);
int transpose(Tape& t, int a);
int concat_rows(Tape& t, int a, int b);
int concat_cols(Tape& t, const std::vector<int>& parts);
int slice_rows(Tape& t, int a, int row0, int nrows);
int slice_cols(Tape& t, int a, int col0, int ncols);
// Row gather: out.row(i) = table.row(indices[i]). Backward scatter-adds.
int gather_rows(Tape& t, int table, const std::vector<int>& indices);
int row_softmax(Tape& t, int a);
int row_log_softmax(Tape& t, int a);
// Per-row layer norm with learned 1xD gain/bias.
int layer_norm(Tape& t, int x, int gain, int bias, double eps = 1e-5);
int gelu(Tape& t, int a);
int reduce_sum(Tape& t, int a);     // 1x1
int sum_squares(Tape& t, int a);    // 1x1
// Sum of -logp[i, targets[i]] over positions whose target != skip_id.
// Pass skip_id = -1 to keep every position.
int pick_nll(Tape& t, int logp, const std::vector<int>& targets, int skip_id);

}  // namespace neurocap::nn
