#include "neurocap/autodiff.hpp"

#include <cmath>
#include <numbers>

#include "neurocap/error.hpp"

namespace neurocap::nn {

namespace {

void check_dims(bool ok, const char* op) {
    if (!ok) throw Error(ErrorCategory::model, std::string("shape mismatch in ") + op);
}

Mat row_softmax_value(const Mat& x) {
    Mat y(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double m = x.row(i).maxCoeff();
        Eigen::RowVectorXd e = (x.row(i).array() - m).exp().matrix();
        y.row(i) = e / e.sum();
    }
    return y;
}

}  // namespace

int Tape::leaf(Mat value, bool needs_grad) {
    return push(std::move(value), needs_grad, nullptr);
}

int Tape::push(Mat value, bool needs_grad, BackFn back) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    n.back = needs_grad ? std::move(back) : nullptr;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

Mat& Tape::grad(int id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.grad_init) {
        n.grad = Mat::Zero(n.value.rows(), n.value.cols());
        n.grad_init = true;
    }
    return n.grad;
}

void Tape::backward(int loss_id) {
    const Mat& l = val(loss_id);
    check_dims(l.rows() == 1 && l.cols() == 1, "backward (loss must be scalar)");
    grad(loss_id)(0, 0) = 1.0;
    for (int id = loss_id; id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (n.grad_init && n.back) n.back(*this);
    }
}

int matmul(Tape& t, int a, int b) {
    const Mat& A = t.val(a);
    const Mat& B = t.val(b);
    check_dims(A.cols() == B.rows(), "matmul");
    const bool ng = t.needs_grad(a) || t.needs_grad(b);
    const int out = static_cast<int>(t.size());
    return t.push(A * B, ng, [a, b, out](Tape& tp) {
        const Mat& g = tp.grad(out);
        if (tp.needs_grad(a)) tp.grad(a).noalias() += g * tp.val(b).transpose();
        if (tp.needs_grad(b)) tp.grad(b).noalias() += tp.val(a).transpose() * g;
    });
}

int add(Tape& t, int a, int b) {
    const Mat& A = t.val(a);
    const Mat& B = t.val(b);
    check_dims(A.rows() == B.rows() && A.cols() == B.cols(), "add");
    const bool ng = t.needs_grad(a) || t.needs_grad(b);
    const int out = static_cast<int>(t.size());
    return t.push(A + B, ng, [a, b, out](Tape& tp) {
        const Mat& g = tp.grad(out);
        if (tp.needs_grad(a)) tp.grad(a) += g;
        if (tp.needs_grad(b)) tp.grad(b) += g;
    });
}

int sub(Tape& t, int a, int b) {
    const Mat& A = t.val(a);
    const Mat& B = t.val(b);
    check_dims(A.rows() == B.rows() && A.cols() == B.cols(), "sub");
    const bool ng = t.needs_grad(a) || t.needs_grad(b);
    const int out = static_cast<int>(t.size());
    return t.push(A - B, ng, [a, b, out](Tape& tp) {
        const Mat& g = tp.grad(out);
        if (tp.needs_grad(a)) tp.grad(a) += g;
        if (tp.needs_grad(b)) tp.grad(b) -= g;
    });
}

int add_rowvec(Tape& t, int a, int row) {
    const Mat& A = t.val(a);
    const Mat& R = t.val(row);
    check_dims(R.rows() == 1 && R.cols() == A.cols(), "add_rowvec");
    const bool ng = t.needs_grad(a) || t.needs_grad(row);
    const int out = static_cast<int>(t.size());
    Mat C = A;
    C.rowwise() += R.row(0);
    return t.push(std::move(C), ng, [a, row, out](Tape& tp) {
        const Mat& g = tp.grad(out);
        if (tp.needs_grad(a)) tp.grad(a) += g;
        if (tp.needs_grad(row)) tp.grad(row) += g.colwise().sum();
    });
}

int add_const(Tape& t, int a, const Mat& c) {
    const Mat& A = t.val(a);
    check_dims(A.rows() == c.rows() && A.cols() == c.cols(), "add_const");
    const bool ng = t.needs_grad(a);
    const int out = static_cast<int>(t.size());
    return t.push(A + c, ng, [a, out](Tape& tp) { tp.grad(a) += tp.grad(out); });
}

int mul_scalar(Tape& t, int a, double s) {
    const bool ng = t.needs_grad(a);
    const int out = static_cast<int>(t.size());
    return t.push(t.val(a) * s, ng, [a, s, out](Tape& tp) { tp.grad(a) += s * tp.grad(out); });
}

int hadamard_const(Tape& t, int a, const Mat& m) {
    const Mat& A = t.val(a);
    check_dims(A.rows() == m.rows() && A.cols() == m.cols(), "hadamard_const");
    const bool ng = t.needs_grad(a);
    const int out = static_cast<int>(t.size());
    Mat C = A.cwiseProduct(m);
    return t.push(std::move(C), ng, [a, m, out](Tape& tp) {
        tp.grad(a) += tp.grad(out).cwiseProduct(m);
    });
}

int transpose(Tape& t, int a) {
    const bool ng = t.needs_grad(a);
    const int out = static_cast<int>(t.size());
    return t.push(t.val(a).transpose(), ng, [a, out](Tape& tp) {
        tp.grad(a) += tp.grad(out).transpose();
    });
}

int concat_rows(Tape& t, int a, int b) {
    const Mat& A = t.val(a);
    const Mat& B = t.val(b);
    check_dims(A.cols() == B.cols(), "concat_rows");
    Mat C(A.rows() + B.rows(), A.cols());
    C.topRows(A.rows()) = A;
    C.bottomRows(B.rows()) = B;
    const bool ng = t.needs_grad(a) || t.needs_grad(b);
    const int out = static_cast<int>(t.size());
    const Eigen::Index ra = A.rows(), rb = B.rows();
    return t.push(std::move(C), ng, [a, b, out, ra, rb](Tape& tp) {
        const Mat& g = tp.grad(out);
        if (tp.needs_grad(a)) tp.grad(a) += g.topRows(ra);
        if (tp.needs_grad(b)) tp.grad(b) += g.bottomRows(rb);
    });
}

int concat_cols(Tape& t, const std::vector<int>& parts) {
    check_dims(!parts.empty(), "concat_cols");
    Eigen::Index rows = t.val(parts[0]).rows(), cols = 0;
    bool ng = false;
    for (int p : parts) {
        check_dims(t.val(p).rows() == rows, "concat_cols");
        cols += t.val(p).cols();
        ng = ng || t.needs_grad(p);
    }
    Mat C(rows, cols);
    std::vector<Eigen::Index> offsets(parts.size());
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        offsets[i] = at;
        C.middleCols(at, t.val(parts[i]).cols()) = t.val(parts[i]);
        at += t.val(parts[i]).cols();
    }
    const int out = static_cast<int>(t.size());
    return t.push(std::move(C), ng, [parts, offsets, out](Tape& tp) {
        const Mat& g = tp.grad(out);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (tp.needs_grad(parts[i]))
                tp.grad(parts[i]) += g.middleCols(offsets[i], tp.val(parts[i]).cols());
        }
    });
}

int slice_rows(Tape& t, int a, int row0, int nrows) {
    const Mat& A = t.val(a);
    check_dims(row0 >= 0 && nrows >= 0 && row0 + nrows <= A.rows(), "slice_rows");
    const bool ng = t.needs_grad(a);
    const int out = static_cast<int>(t.size());
    return t.push(A.middleRows(row0, nrows), ng, [a, row0, nrows, out](Tape& tp) {
        tp.grad(a).middleRows(row0, nrows) += tp.grad(out);
    });
}

int slice_cols(Tape& t, int a, int col0, int ncols) {
    const Mat& A = t.val(a);
    check_dims(col0 >= 0 && ncols >= 0 && col0 + ncols <= A.cols(), "slice_cols");
    const bool ng = t.needs_grad(a);
    const int out = static_cast<int>(t.size());
    return t.push(A.middleCols(col0, ncols), ng, [a, col0, ncols, out](Tape& tp) {
        tp.grad(a).middleCols(col0, ncols) += tp.grad(out);
    });
}

int gather_rows(Tape& t, int table, const std::vector<int>& indices) {
    const Mat& T = t.val(table);
    Mat C(static_cast<Eigen::Index>(indices.size()), T.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        check_dims(indices[i] >= 0 && indices[i] < T.rows(), "gather_rows");
        C.row(static_cast<Eigen::Index>(i)) = T.row(indices[i]);
    }
    const bool ng = t.needs_grad(table);
    const int out = static_cast<int>(t.size());
    return t.push(std::move(C), ng, [table, indices, out](Tape& tp) {
        const Mat& g = tp.grad(out);
        Mat& gt = tp.grad(table);
        for (std::size_t i = 0; i < indices.size(); ++i)
            gt.row(indices[i]) += g.row(static_cast<Eigen::Index>(i));
    });
}

int row_softmax(Tape& t, int a) {
    Mat y = row_softmax_value(t.val(a));
    const bool ng = t.needs_grad(a);
    const int out = static_cast<int>(t.size());
    return t.push(std::move(y), ng, [a, out](Tape& tp) {
        const Mat& y = tp.val(out);
        const Mat& g = tp.grad(out);
        Mat& ga = tp.grad(a);
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            const double dot = g.row(i).dot(y.row(i));
            ga.row(i) += (y.row(i).array() * (g.row(i).array() - dot)).matrix();
        }
    });
}

int row_log_softmax(Tape& t, int a) {
    const Mat& x = t.val(a);
    Mat y(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double m = x.row(i).maxCoeff();
        const double lse = m + std::log((x.row(i).array() - m).exp().sum());
        y.row(i) = (x.row(i).array() - lse).matrix();
    }
    const bool ng = t.needs_grad(a);
    const int out = static_cast<int>(t.size());
    return t.push(std::move(y), ng, [a, out](Tape& tp) {
        const Mat& y = tp.val(out);
        const Mat& g = tp.grad(out);
        Mat& ga = tp.grad(a);
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            const double gsum = g.row(i).sum();
            ga.row(i) += (g.row(i).array() - gsum * y.row(i).array().exp()).matrix();
        }
    });
}

int layer_norm(Tape& t, int x, int gain, int bias, double eps) {
    const Mat& X = t.val(x);
    const Mat& G = t.val(gain);
    const Mat& B = t.val(bias);
    check_dims(G.rows() == 1 && B.rows() == 1 && G.cols() == X.cols() && B.cols() == X.cols(),
               "layer_norm");
    const Eigen::Index d = X.cols();
    Mat xhat(X.rows(), d);
    Eigen::VectorXd inv_sigma(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double mu = X.row(i).mean();
        const double var = (X.row(i).array() - mu).square().sum() / static_cast<double>(d);
        const double is = 1.0 / std::sqrt(var + eps);
        inv_sigma(i) = is;
        xhat.row(i) = ((X.row(i).array() - mu) * is).matrix();
    }
    Mat Y = (xhat.array().rowwise() * G.row(0).array()).matrix();
    Y.rowwise() += B.row(0);
    const bool ng = t.needs_grad(x) || t.needs_grad(gain) || t.needs_grad(bias);
    const int out = static_cast<int>(t.size());
    return t.push(std::move(Y), ng, [x, gain, bias, out, xhat, inv_sigma](Tape& tp) {
        const Mat& g = tp.grad(out);
        const Mat& G = tp.val(gain);
        if (tp.needs_grad(gain)) tp.grad(gain) += g.cwiseProduct(xhat).colwise().sum();
        if (tp.needs_grad(bias)) tp.grad(bias) += g.colwise().sum();
        if (tp.needs_grad(x)) {
            Mat& gx = tp.grad(x);
            for (Eigen::Index i = 0; i < g.rows(); ++i) {
                Eigen::RowVectorXd gy = g.row(i).cwiseProduct(G.row(0));
                const double m1 = gy.mean();
                const double m2 = gy.cwiseProduct(xhat.row(i)).mean();
                gx.row(i) += inv_sigma(i) *
                             (gy.array() - m1 - xhat.row(i).array() * m2).matrix();
            }
        }
    });
}

int gelu(Tape& t, int a) {
    const Mat& X = t.val(a);
    Mat Y = (0.5 * X.array() * (1.0 + (X.array() / std::numbers::sqrt2).erf())).matrix();
    const bool ng = t.needs_grad(a);
    const int out = static_cast<int>(t.size());
    return t.push(std::move(Y), ng, [a, out](Tape& tp) {
        const Mat& X = tp.val(a);
        const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
        Mat d = (0.5 * (1.0 + (X.array() / std::numbers::sqrt2).erf()) +
                 X.array() * (-0.5 * X.array().square()).exp() * inv_sqrt2pi)
                    .matrix();
        tp.grad(a) += tp.grad(out).cwiseProduct(d);
    });
}

int reduce_sum(Tape& t, int a) {
    Mat s(1, 1);
    s(0, 0) = t.val(a).sum();
    const bool ng = t.needs_grad(a);
    const int out = static_cast<int>(t.size());
    return t.push(std::move(s), ng, [a, out](Tape& tp) {
        tp.grad(a).array() += tp.grad(out)(0, 0);
    });
}

int sum_squares(Tape& t, int a) {
    Mat s(1, 1);
    s(0, 0) = t.val(a).squaredNorm();
    const bool ng = t.needs_grad(a);
    const int out = static_cast<int>(t.size());
    return t.push(std::move(s), ng, [a, out](Tape& tp) {
        tp.grad(a) += 2.0 * tp.grad(out)(0, 0) * tp.val(a);
    });
}

int pick_nll(Tape& t, int logp, const std::vector<int>& targets, int skip_id) {
    const Mat& L = t.val(logp);
    check_dims(static_cast<Eigen::Index>(targets.size()) <= L.rows(), "pick_nll");
    double s = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] == skip_id) continue;
        check_dims(targets[i] >= 0 && targets[i] < L.cols(), "pick_nll");
        s -= L(static_cast<Eigen::Index>(i), targets[i]);
    }
    Mat out_val(1, 1);
    out_val(0, 0) = s;
    const bool ng = t.needs_grad(logp);
    const int out = static_cast<int>(t.size());
    return t.push(std::move(out_val), ng, [logp, targets, skip_id, out](Tape& tp) {
        const double g = tp.grad(out)(0, 0);
        Mat& gl = tp.grad(logp);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (targets[i] == skip_id) continue;
            gl(static_cast<Eigen::Index>(i), targets[i]) -= g;
        }
    });
}

}  // namespace neurocap::nn
