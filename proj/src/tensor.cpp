#include "ncage/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <unordered_set>

namespace ncage {

namespace detail {

struct Node {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
    std::vector<double> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Pushes this node's grad into its parents.
    std::function<void(Node&)> backward;
};

struct TensorAccess {
    static Node& node(const Tensor& t) { return *t.node_; }
    static const std::shared_ptr<Node>& ptr(const Tensor& t) { return t.node_; }
    static Tensor wrap(std::shared_ptr<Node> n) { return Tensor(std::move(n)); }
};

}  // namespace detail

using detail::Node;
using detail::TensorAccess;

namespace {

thread_local bool t_grad_disabled = false;

std::string shape_str(const Tensor& t) {
    return "(" + std::to_string(t.rows()) + "," + std::to_string(t.cols()) + ")";
}

// Output node; tracks gradients iff any input does.
Tensor make_result(std::size_t rows, std::size_t cols, std::vector<double> data,
                   std::initializer_list<Tensor> inputs, std::function<void(Node&)> backward) {
    auto node = std::make_shared<Node>();
    node->rows = rows;
    node->cols = cols;
    node->data = std::move(data);
    if (!t_grad_disabled) {
        for (const auto& in : inputs) {
            if (in.requires_grad()) node->requires_grad = true;
        }
    }
    if (node->requires_grad) {
        node->grad.assign(rows * cols, 0.0);
        for (const auto& in : inputs) node->parents.push_back(TensorAccess::ptr(in));
        node->backward = std::move(backward);
    }
    return TensorAccess::wrap(std::move(node));
}

// c[M,N] += a[M,K] * b[K,N]
void gemm_nn(const double* a, const double* b, double* c, std::size_t M, std::size_t K,
             std::size_t N) {
    for (std::size_t i = 0; i < M; ++i) {
        double* crow = c + i * N;
        const double* arow = a + i * K;
        for (std::size_t k = 0; k < K; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b + k * N;
            for (std::size_t j = 0; j < N; ++j) crow[j] += aik * brow[j];
        }
    }
}

// c[M,K] += a[M,N] * b[K,N]^T
void gemm_nt(const double* a, const double* b, double* c, std::size_t M, std::size_t N,
             std::size_t K) {
    for (std::size_t i = 0; i < M; ++i) {
        const double* arow = a + i * N;
        double* crow = c + i * K;
        for (std::size_t k = 0; k < K; ++k) {
            const double* brow = b + k * N;
            double acc = 0.0;
            for (std::size_t j = 0; j < N; ++j) acc += arow[j] * brow[j];
            crow[k] += acc;
        }
    }
}

// c[K,N] += a[M,K]^T * b[M,N]
void gemm_tn(const double* a, const double* b, double* c, std::size_t M, std::size_t K,
             std::size_t N) {
    for (std::size_t i = 0; i < M; ++i) {
        const double* arow = a + i * K;
        const double* brow = b + i * N;
        for (std::size_t k = 0; k < K; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            double* crow = c + k * N;
            for (std::size_t j = 0; j < N; ++j) crow[j] += aik * brow[j];
        }
    }
}

// out[N,F] += s * d[N,F]
void csr_mm(const SparseMatrix& s, const double* d, double* out, std::size_t F) {
    auto rp = s.row_ptr();
    auto cols = s.cols();
    auto vals = s.values();
    for (std::size_t i = 0; i < s.size(); ++i) {
        double* orow = out + i * F;
        for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) {
            const double w = vals[e];
            const double* drow = d + static_cast<std::size_t>(cols[e]) * F;
            for (std::size_t j = 0; j < F; ++j) orow[j] += w * drow[j];
        }
    }
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t n, std::vector<std::size_t> row_ptr,
                           std::vector<NodeId> cols, std::vector<double> values)
    : row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(std::move(values)) {
    if (row_ptr_.size() != n + 1 || row_ptr_.front() != 0 || row_ptr_.back() != cols_.size() ||
        cols_.size() != values_.size()) {
        throw ShapeMismatch("sparse matrix: inconsistent CSR arrays");
    }
    for (NodeId c : cols_) {
        if (c >= n) throw ShapeMismatch("sparse matrix: column index out of range");
    }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<std::size_t> rp(n + 1);
    std::vector<NodeId> cols(n);
    for (std::size_t i = 0; i < n; ++i) {
        rp[i + 1] = i + 1;
        cols[i] = static_cast<NodeId>(i);
    }
    return SparseMatrix(n, std::move(rp), std::move(cols), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::adjacency(const Graph& g) {
    auto off = g.offsets();
    auto idx = g.indices();
    return SparseMatrix(g.num_nodes(), {off.begin(), off.end()}, {idx.begin(), idx.end()},
                        std::vector<double>(idx.size(), 1.0));
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
    for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
        if (cols_[e] == c) return values_[e];
    }
    return 0.0;
}

std::vector<double> SparseMatrix::to_dense() const {
    const std::size_t n = size();
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) out[i * n + cols_[e]] += values_[e];
    }
    return out;
}

NoGradGuard::NoGradGuard() : previous_(t_grad_disabled) { t_grad_disabled = true; }
NoGradGuard::~NoGradGuard() { t_grad_disabled = previous_; }

Tensor::Tensor() : Tensor(0, 0) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : Tensor(rows, cols, std::vector<double>(rows * cols, fill)) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : node_(std::make_shared<Node>()) {
    if (data.size() != rows * cols) {
        throw ShapeMismatch("tensor data length " + std::to_string(data.size()) +
                            " does not match shape (" + std::to_string(rows) + "," +
                            std::to_string(cols) + ")");
    }
    node_->rows = rows;
    node_->cols = cols;
    node_->data = std::move(data);
}

Tensor Tensor::parameter(std::size_t rows, std::size_t cols, std::vector<double> data) {
    Tensor t(rows, cols, std::move(data));
    t.node_->requires_grad = true;
    t.node_->grad.assign(rows * cols, 0.0);
    return t;
}

std::size_t Tensor::rows() const noexcept { return node_->rows; }
std::size_t Tensor::cols() const noexcept { return node_->cols; }
std::span<double> Tensor::data() { return node_->data; }
std::span<const double> Tensor::data() const { return node_->data; }
std::span<double> Tensor::grad() { return node_->grad; }
std::span<const double> Tensor::grad() const { return node_->grad; }
bool Tensor::requires_grad() const noexcept { return node_->requires_grad; }

double Tensor::item() const {
    if (size() != 1) throw ShapeMismatch("item() on tensor of shape " + shape_str(*this));
    return node_->data[0];
}

void Tensor::zero_grad() { std::fill(node_->grad.begin(), node_->grad.end(), 0.0); }

Tensor Tensor::detach() const { return Tensor(rows(), cols(), node_->data); }

void Tensor::backward() {
    if (!node_->requires_grad) return;
    // Iterative post-order DFS gives a topological order (parents first).
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
    seen.insert(node_.get());
    while (!stack.empty()) {
        auto& [n, next] = stack.back();
        if (next < n->parents.size()) {
            Node* p = n->parents[next++].get();
            if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(n);
            stack.pop_back();
        }
    }
    std::fill(node_->grad.begin(), node_->grad.end(), 1.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if ((*it)->backward) (*it)->backward(**it);
    }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) {
        throw ShapeMismatch("matmul: " + shape_str(a) + " x " + shape_str(b));
    }
    const std::size_t M = a.rows(), K = a.cols(), N = b.cols();
    std::vector<double> out(M * N, 0.0);
    gemm_nn(a.data().data(), b.data().data(), out.data(), M, K, N);
    return make_result(M, N, std::move(out), {a, b}, [M, K, N](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        if (pa.requires_grad) gemm_nt(self.grad.data(), pb.data.data(), pa.grad.data(), M, N, K);
        if (pb.requires_grad) gemm_tn(pa.data.data(), self.grad.data(), pb.grad.data(), M, K, N);
    });
}

Tensor spmm(std::shared_ptr<const SparseMatrix> s, const Tensor& d) {
    if (!s || s->size() != d.rows()) {
        throw ShapeMismatch("spmm: sparse (" + std::to_string(s ? s->size() : 0) + "," +
                            std::to_string(s ? s->size() : 0) + ") x " + shape_str(d));
    }
    const std::size_t F = d.cols();
    std::vector<double> out(s->size() * F, 0.0);
    csr_mm(*s, d.data().data(), out.data(), F);
    return make_result(s->size(), F, std::move(out), {d}, [s, F](Node& self) {
        Node& pd = *self.parents[0];
        csr_mm(*s, self.grad.data(), pd.grad.data(), F);
    });
}

Tensor spmm(const SparseMatrix& s, const Tensor& d) {
    return spmm(std::make_shared<const SparseMatrix>(s), d);
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeMismatch("add: " + shape_str(a) + " + " + shape_str(b));
    }
    std::vector<double> out(a.size());
    auto ad = a.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] + bd[i];
    return make_result(a.rows(), a.cols(), std::move(out), {a, b}, [](Node& self) {
        for (auto& p : self.parents) {
            if (!p->requires_grad) continue;
            for (std::size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
        }
    });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
    if (row.rows() != 1 || row.cols() != a.cols()) {
        throw ShapeMismatch("add_row: " + shape_str(a) + " + " + shape_str(row));
    }
    const std::size_t R = a.rows(), C = a.cols();
    std::vector<double> out(a.size());
    auto ad = a.data();
    auto rd = row.data();
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) out[i * C + j] = ad[i * C + j] + rd[j];
    return make_result(R, C, std::move(out), {a, row}, [R, C](Node& self) {
        Node& pa = *self.parents[0];
        Node& pr = *self.parents[1];
        for (std::size_t i = 0; i < R; ++i) {
            for (std::size_t j = 0; j < C; ++j) {
                const double g = self.grad[i * C + j];
                if (pa.requires_grad) pa.grad[i * C + j] += g;
                if (pr.requires_grad) pr.grad[j] += g;
            }
        }
    });
}

Tensor relu(const Tensor& a) {
    std::vector<double> out(a.size());
    auto ad = a.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] > 0.0 ? ad[i] : 0.0;
    return make_result(a.rows(), a.cols(), std::move(out), {a}, [](Node& self) {
        Node& p = *self.parents[0];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            if (p.data[i] > 0.0) p.grad[i] += self.grad[i];
        }
    });
}

Tensor tanh(const Tensor& a) {
    std::vector<double> out(a.size());
    auto ad = a.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(ad[i]);
    return make_result(a.rows(), a.cols(), std::move(out), {a}, [](Node& self) {
        Node& p = *self.parents[0];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            p.grad[i] += self.grad[i] * (1.0 - self.data[i] * self.data[i]);
        }
    });
}

Tensor scale(const Tensor& a, double factor) {
    std::vector<double> out(a.size());
    auto ad = a.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] * factor;
    return make_result(a.rows(), a.cols(), std::move(out), {a}, [factor](Node& self) {
        Node& p = *self.parents[0];
        for (std::size_t i = 0; i < self.grad.size(); ++i) p.grad[i] += self.grad[i] * factor;
    });
}

Tensor gather_rows(const Tensor& a, std::span<const NodeId> ids) {
    const std::size_t C = a.cols();
    std::vector<double> out(ids.size() * C);
    auto ad = a.data();
    for (std::size_t r = 0; r < ids.size(); ++r) {
        if (ids[r] >= a.rows()) {
            throw InvalidParameter("gather_rows: id " + std::to_string(ids[r]) +
                                   " out of range for " + std::to_string(a.rows()) + " rows");
        }
        std::copy_n(ad.begin() + static_cast<std::ptrdiff_t>(ids[r] * C), C, out.begin() + static_cast<std::ptrdiff_t>(r * C));
    }
    std::vector<NodeId> rows(ids.begin(), ids.end());
    return make_result(ids.size(), C, std::move(out), {a}, [rows = std::move(rows), C](Node& self) {
        Node& p = *self.parents[0];
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t j = 0; j < C; ++j) p.grad[rows[r] * C + j] += self.grad[r * C + j];
        }
    });
}

Tensor mse_loss(const Tensor& pred, const Tensor& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw ShapeMismatch("mse_loss: " + shape_str(pred) + " vs " + shape_str(target));
    }
    if (pred.size() == 0) throw ShapeMismatch("mse_loss: empty batch");
    auto pd = pred.data();
    auto td = target.data();
    const double inv = 1.0 / static_cast<double>(pred.size());
    double acc = 0.0;
    std::vector<double> diff(pred.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = pd[i] - td[i];
        acc += diff[i] * diff[i];
    }
    return make_result(1, 1, {acc * inv}, {pred},
                       [diff = std::move(diff), inv](Node& self) {
                           Node& p = *self.parents[0];
                           const double g = self.grad[0] * 2.0 * inv;
                           for (std::size_t i = 0; i < diff.size(); ++i) p.grad[i] += g * diff[i];
                       });
}

Tensor l2_regularization(std::span<const Tensor> weights) {
    double acc = 0.0;
    for (const auto& w : weights)
        for (double x : w.data()) acc += x * x;
    auto node = std::make_shared<Node>();
    node->rows = 1;
    node->cols = 1;
    node->data = {acc};
    if (!t_grad_disabled) {
        for (const auto& w : weights) {
            if (w.requires_grad()) node->requires_grad = true;
        }
    }
    if (node->requires_grad) {
        node->grad.assign(1, 0.0);
        for (const auto& w : weights) node->parents.push_back(TensorAccess::ptr(w));
        node->backward = [](Node& self) {
            const double g = 2.0 * self.grad[0];
            for (auto& p : self.parents) {
                if (!p->requires_grad) continue;
                for (std::size_t i = 0; i < p->data.size(); ++i) p->grad[i] += g * p->data[i];
            }
        };
    }
    return TensorAccess::wrap(std::move(node));
}

void clip_gradients(std::span<Tensor> params, double lo, double hi) {
    for (auto& p : params)
        for (double& g : p.grad()) g = std::clamp(g, lo, hi);
}

void AdamState::reset(std::span<const Tensor> params) {
    t = 0;
    m.clear();
    v.clear();
    for (const auto& p : params) {
        m.emplace_back(p.size(), 0.0);
        v.emplace_back(p.size(), 0.0);
    }
}

void adam_step(std::span<Tensor> params, AdamState& state, double lr) {
    if (state.m.empty() && !params.empty()) {
        auto t = state.t;
        state.reset(params);
        state.t = t;
    }
    if (state.m.size() != params.size()) throw ShapeMismatch("adam: state/parameter count mismatch");
    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto x = params[k].data();
        auto g = params[k].grad();
        auto& m = state.m[k];
        auto& v = state.v[k];
        if (m.size() != x.size() || g.size() != x.size()) {
            throw ShapeMismatch("adam: moment shape mismatch for parameter " + std::to_string(k));
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            x[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
        }
    }
}

}  // namespace ncage
