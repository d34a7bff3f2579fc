#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ncage/errors.hpp"
#include "ncage/graph.hpp"

namespace ncage {

// Square CSR matrix with real values. Used as a constant operand of spmm;
// callers guarantee structural and numerical symmetry.
class SparseMatrix {
public:
    SparseMatrix() : row_ptr_{0} {}
    SparseMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<NodeId> cols,
                 std::vector<double> values);

    static SparseMatrix identity(std::size_t n);
    // Plain 0/1 adjacency matrix of g.
    static SparseMatrix adjacency(const Graph& g);

    std::size_t size() const noexcept { return row_ptr_.size() - 1; }
    std::size_t nnz() const noexcept { return cols_.size(); }
    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const NodeId> cols() const noexcept { return cols_; }
    std::span<const double> values() const noexcept { return values_; }

    double at(std::size_t r, std::size_t c) const;
    std::vector<double> to_dense() const;  // row-major n*n

private:
    std::vector<std::size_t> row_ptr_;
    std::vector<NodeId> cols_;
    std::vector<double> values_;
};

namespace detail {
struct Node;
struct TensorAccess;
}  // namespace detail

// Dense row-major matrix and a node of the reverse-mode graph. Copies share
// the underlying node, like a handle; ops always allocate fresh outputs.
class Tensor {
public:
    Tensor();
    Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
    Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);

    // Leaf that accumulates gradients.
    static Tensor parameter(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const noexcept;
    std::size_t cols() const noexcept;
    std::size_t size() const noexcept { return rows() * cols(); }

    std::span<double> data();
    std::span<const double> data() const;
    // Empty unless requires_grad().
    std::span<double> grad();
    std::span<const double> grad() const;

    double operator()(std::size_t r, std::size_t c) const { return data()[r * cols() + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data()[r * cols() + c]; }
    double item() const;

    bool requires_grad() const noexcept;

    // Seeds this tensor's gradient with ones and propagates to every
    // ancestor in reverse topological order, each node visited once.
    // Gradients accumulate into leaves until zero_grad().
    void backward();
    void zero_grad();

    // Same values, no history, no gradient.
    Tensor detach() const;

private:
    explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
    std::shared_ptr<detail::Node> node_;

    friend struct detail::TensorAccess;
};

// While alive, ops on the constructing thread record no history and allocate
// no gradients. Used for inference.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

Tensor matmul(const Tensor& a, const Tensor& b);
// s * d where s is (N,N) and d is (N,F). The backward pass multiplies by s
// again, relying on symmetry.
Tensor spmm(std::shared_ptr<const SparseMatrix> s, const Tensor& d);
// Copies s when d tracks gradients.
Tensor spmm(const SparseMatrix& s, const Tensor& d);
Tensor add(const Tensor& a, const Tensor& b);
// a (R,C) plus a (1,C) row broadcast to every row.
Tensor add_row(const Tensor& a, const Tensor& row);
Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor scale(const Tensor& a, double factor);
// Rows of a in the order given by ids; duplicates allowed. Backward
// scatter-adds into the selected rows.
Tensor gather_rows(const Tensor& a, std::span<const NodeId> ids);

// Mean squared difference over all entries; target is treated as constant.
Tensor mse_loss(const Tensor& pred, const Tensor& target);
// Sum of squared entries over all given tensors (no 1/2 factor).
Tensor l2_regularization(std::span<const Tensor> weights);

void clip_gradients(std::span<Tensor> params, double lo = -1.0, double hi = 1.0);

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t t = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;

    // Zero moments shaped like params; t reset to 0.
    void reset(std::span<const Tensor> params);
};

// One bias-corrected Adam update with learning rate lr. Moments are sized on
// first use.
void adam_step(std::span<Tensor> params, AdamState& state, double lr);

}  // namespace ncage
