#include "neurocap/params.hpp"

#include <cmath>
#include <cstring>

#include "neurocap/error.hpp"

namespace neurocap::nn {

Mat& ParamStore::add(const std::string& name, Mat value) {
    if (tensors_.count(name))
        throw Error(ErrorCategory::model, "duplicate parameter name " + name);
    order_.push_back(name);
    return tensors_[name] = std::move(value);
}

Mat& ParamStore::at(const std::string& name) {
    auto it = tensors_.find(name);
    if (it == tensors_.end())
        throw Error(ErrorCategory::model, "unknown parameter name " + name);
    return it->second;
}

const Mat& ParamStore::at(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end())
        throw Error(ErrorCategory::model, "unknown parameter name " + name);
    return it->second;
}

long long ParamStore::scalar_count() const {
    long long n = 0;
    for (const auto& name : order_) n += static_cast<long long>(at(name).size());
    return n;
}

bool ParamStore::all_finite() const {
    for (const auto& name : order_)
        if (!at(name).allFinite()) return false;
    return true;
}

bool ParamStore::operator==(const ParamStore& other) const {
    if (order_ != other.order_) return false;
    for (const auto& name : order_) {
        const Mat& a = at(name);
        const Mat& b = other.at(name);
        if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
        if (std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) != 0)
            return false;
    }
    return true;
}

int Binding::operator()(const std::string& name) {
    auto it = vars_.find(name);
    if (it != vars_.end()) return it->second;
    const int id = tape_->leaf(store_->at(name), trainable_);
    vars_[name] = id;
    return id;
}

std::unordered_map<std::string, Mat> Binding::grads() const {
    std::unordered_map<std::string, Mat> out;
    for (const auto& [name, id] : vars_) {
        if (tape_->has_grad(id)) {
            out[name] = tape_->grad(id);
        } else {
            const Mat& v = tape_->val(id);
            out[name] = Mat::Zero(v.rows(), v.cols());
        }
    }
    return out;
}

Mat trunc_normal(Eigen::Index rows, Eigen::Index cols, double std_dev, Rng& rng) {
    std::normal_distribution<double> dist(0.0, std_dev);
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            double x = dist(rng);
            while (std::abs(x) > 2.0 * std_dev) x = dist(rng);
            m(i, j) = x;
        }
    }
    return m;
}

void AdamW::step(ParamStore& params, const std::unordered_map<std::string, Mat>& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (const auto& name : params.names()) {
        auto git = grads.find(name);
        if (git == grads.end()) continue;
        const Mat& g = git->second;
        Mat& w = params.at(name);
        Mat& m = m_.try_emplace(name, Mat::Zero(w.rows(), w.cols())).first->second;
        Mat& v = v_.try_emplace(name, Mat::Zero(w.rows(), w.cols())).first->second;
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = (beta2_ * v.array() + (1.0 - beta2_) * g.array().square()).matrix();
        const Mat mhat = m / bc1;
        const Mat vhat = v / bc2;
        w -= (lr_ * mhat.array() / (vhat.array().sqrt() + eps_)).matrix();
        w -= lr_ * wd_ * w;
    }
}

}  // namespace neurocap::nn
