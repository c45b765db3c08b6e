#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "partscape/error.hpp"
#include "partscape/matrix.hpp"

namespace partscape {

/// Exact balanced transportation problem
///   min sum_ab f_ab c_ab  s.t.  sum_b f_ab = supply_a, sum_a f_ab = demand_b, f >= 0
/// solved with the transportation simplex (northwest-corner start, MODI
/// potentials, stepping-stone pivots). Buffers are kept between calls.
class TransportSolver {
public:
    /// Largest allowed |sum(supply) - sum(demand)|.
    static constexpr double balance_tolerance = 1e-9;

    double solve(std::span<const double> supply, std::span<const double> demand, const Matrix& cost) {
        validate(supply, demand, cost);
        rows_ = supply.size();
        cols_ = demand.size();
        flow_.assign(rows_ * cols_, 0.0);
        basic_.assign(rows_ * cols_, 0);
        basis_.clear();
        northwest_corner(supply, demand);

        double max_cost = 0.0;
        for (double c : cost.data()) max_cost = std::max(max_cost, c);
        const double tolerance = 1e-12 * std::max(1.0, max_cost);

        const std::size_t cells = rows_ * cols_;
        const std::size_t bland_after = 50 * cells;
        const std::size_t give_up = 10000 * cells + 1000;
        for (std::size_t iter = 0;; ++iter) {
            if (iter > give_up) throw NumericError("transportation simplex failed to converge");
            compute_potentials(cost);
            std::size_t entering = cells;
            double best = -tolerance;
            for (std::size_t cell = 0; cell < cells; ++cell) {
                if (basic_[cell]) continue;
                const double reduced = cost.data()[cell] - u_[cell / cols_] - v_[cell % cols_];
                if (reduced < best) {
                    entering = cell;
                    if (iter >= bland_after) break;  // Bland: first improving cell
                    best = reduced;
                }
            }
            if (entering == cells) break;
            pivot(entering);
        }

        double total = 0.0;
        for (std::size_t cell = 0; cell < cells; ++cell) total += flow_[cell] * cost.data()[cell];
        return std::max(0.0, total);
    }

    /// Flow of the last solve, row-major rows x cols.
    Matrix flow() const {
        Matrix out(rows_, cols_);
        std::copy(flow_.begin(), flow_.end(), out.data().begin());
        return out;
    }

private:
    static void validate(std::span<const double> supply, std::span<const double> demand, const Matrix& cost) {
        if (supply.empty() || demand.empty()) throw ParameterError("transport needs nonempty weight vectors");
        if (cost.rows() != supply.size() || cost.cols() != demand.size())
            throw DimensionError("ground cost matrix is " + std::to_string(cost.rows()) + "x" +
                                 std::to_string(cost.cols()) + ", weights are " +
                                 std::to_string(supply.size()) + " and " + std::to_string(demand.size()));
        double sa = 0.0;
        double sb = 0.0;
        for (double w : supply) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("transport weights must be nonnegative");
            sa += w;
        }
        for (double w : demand) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("transport weights must be nonnegative");
            sb += w;
        }
        if (std::abs(sa - sb) > balance_tolerance)
            throw BalanceError("transport weights are unbalanced: " + std::to_string(sa) + " vs " +
                               std::to_string(sb));
        for (double c : cost.data())
            if (!(c >= 0.0) || !std::isfinite(c)) throw ParameterError("ground costs must be nonnegative and finite");
    }

    // Produces exactly rows + cols - 1 basic cells forming a spanning tree,
    // degenerate zero-flow cells included.
    void northwest_corner(std::span<const double> supply, std::span<const double> demand) {
        left_.assign(supply.begin(), supply.end());
        need_.assign(demand.begin(), demand.end());
        std::size_t i = 0;
        std::size_t j = 0;
        while (true) {
            const double x = std::min(left_[i], need_[j]);
            const std::size_t cell = i * cols_ + j;
            flow_[cell] = x;
            basic_[cell] = 1;
            basis_.push_back(cell);
            left_[i] -= x;
            need_[j] -= x;
            if (i + 1 == rows_ && j + 1 == cols_) break;
            if (i + 1 == rows_) ++j;
            else if (j + 1 == cols_) ++i;
            else if (left_[i] <= need_[j]) ++i;
            else ++j;
        }
    }

    void compute_potentials(const Matrix& cost) {
        constexpr double unset = std::numeric_limits<double>::quiet_NaN();
        u_.assign(rows_, unset);
        v_.assign(cols_, unset);
        u_[0] = 0.0;
        std::size_t assigned = 1;
        const std::size_t nodes = rows_ + cols_;
        while (assigned < nodes) {
            bool progress = false;
            for (std::size_t cell : basis_) {
                const std::size_t i = cell / cols_;
                const std::size_t j = cell % cols_;
                const bool has_u = !std::isnan(u_[i]);
                const bool has_v = !std::isnan(v_[j]);
                if (has_u && !has_v) {
                    v_[j] = cost.data()[cell] - u_[i];
                    ++assigned;
                    progress = true;
                } else if (!has_u && has_v) {
                    u_[i] = cost.data()[cell] - v_[j];
                    ++assigned;
                    progress = true;
                }
            }
            if (!progress) throw NumericError("transportation basis is not a spanning tree");
        }
    }

    // Adds `entering` to the basis and removes the blocking cell of the cycle
    // it closes through the basis tree.
    void pivot(std::size_t entering) {
        const std::size_t nodes = rows_ + cols_;
        const std::size_t none = std::numeric_limits<std::size_t>::max();
        const std::size_t start = entering / cols_;          // row node
        const std::size_t goal = rows_ + entering % cols_;   // column node
        parent_cell_.assign(nodes, none);
        parent_node_.assign(nodes, none);
        queue_.clear();
        queue_.push_back(start);
        parent_node_[start] = start;
        for (std::size_t head = 0; head < queue_.size() && parent_node_[goal] == none; ++head) {
            const std::size_t node = queue_[head];
            for (std::size_t cell : basis_) {
                const std::size_t row = cell / cols_;
                const std::size_t col = rows_ + cell % cols_;
                std::size_t next = none;
                if (node == row) next = col;
                else if (node == col) next = row;
                if (next == none || parent_node_[next] != none) continue;
                parent_node_[next] = node;
                parent_cell_[next] = cell;
                queue_.push_back(next);
            }
        }
        if (parent_node_[goal] == none) throw NumericError("no stepping-stone path in transportation basis");

        // Walk from the column end back to the row: edges alternate -, +, -, ...
        path_.clear();
        for (std::size_t node = goal; node != start; node = parent_node_[node]) path_.push_back(parent_cell_[node]);

        std::size_t leaving = none;
        double theta = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < path_.size(); k += 2) {
            const std::size_t cell = path_[k];
            if (flow_[cell] < theta || (flow_[cell] == theta && cell < leaving)) {
                theta = flow_[cell];
                leaving = cell;
            }
        }
        for (std::size_t k = 0; k < path_.size(); ++k) {
            if (k % 2 == 0) flow_[path_[k]] = std::max(0.0, flow_[path_[k]] - theta);
            else flow_[path_[k]] += theta;
        }
        flow_[entering] = theta;
        flow_[leaving] = 0.0;
        basic_[leaving] = 0;
        basic_[entering] = 1;
        *std::find(basis_.begin(), basis_.end(), leaving) = entering;
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> flow_;
    std::vector<char> basic_;
    std::vector<std::size_t> basis_;
    std::vector<double> u_, v_, left_, need_;
    std::vector<std::size_t> parent_cell_, parent_node_, queue_, path_;
};

/// Earthmover's distance between two weight vectors under a ground cost.
inline double transport_emd(std::span<const double> supply, std::span<const double> demand,
                            const Matrix& cost) {
    thread_local TransportSolver solver;
    return solver.solve(supply, demand, cost);
}

}  // namespace partscape
