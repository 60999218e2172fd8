#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pnk/scalar.hpp"

namespace pnk {

class LinalgError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major sparse matrix. Each row is a column-sorted list of nonzero
/// entries; zeros are never stored.
template <class S>
class SparseMatrix {
public:
    using Entry = std::pair<std::size_t, S>;
    using Row = std::vector<Entry>;
    using T = scalar_traits<S>;

    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows) {}

    static SparseMatrix identity(std::size_t n) {
        SparseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.data_[i].emplace_back(i, T::one());
        return m;
    }

    std::size_t rows() const { return data_.size(); }
    std::size_t cols() const { return cols_; }
    const Row& row(std::size_t i) const { return data_.at(i); }

    /// Replaces row i; entries may be unsorted and contain duplicates, which
    /// are summed.
    void set_row(std::size_t i, Row entries) {
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& a, const Entry& b) { return a.first < b.first; });
        Row out;
        for (auto& [j, v] : entries) {
            if (j >= cols_) throw LinalgError("column index out of range");
            if (!out.empty() && out.back().first == j)
                out.back().second += v;
            else
                out.emplace_back(j, std::move(v));
        }
        std::erase_if(out, [](const Entry& e) { return T::is_zero(e.second); });
        data_.at(i) = std::move(out);
    }

    S at(std::size_t i, std::size_t j) const {
        const auto& r = data_.at(i);
        auto it = std::lower_bound(r.begin(), r.end(), j,
                                   [](const Entry& e, std::size_t c) { return e.first < c; });
        return (it != r.end() && it->first == j) ? it->second : T::zero();
    }

    std::size_t nonzeros() const {
        std::size_t n = 0;
        for (const auto& r : data_) n += r.size();
        return n;
    }

    S row_sum(std::size_t i) const {
        S s = T::zero();
        for (const auto& e : data_.at(i)) s += e.second;
        return s;
    }

    /// Every row sums to one (exactly, or within tol for floats).
    bool is_stochastic(double tol = kDefaultTolerance) const {
        for (std::size_t i = 0; i < rows(); ++i) {
            for (const auto& e : data_[i])
                if (e.second < T::zero()) return false;
            if (!T::near(row_sum(i), T::one(), tol)) return false;
        }
        return true;
    }

    bool operator==(const SparseMatrix& o) const { return cols_ == o.cols_ && data_ == o.data_; }

    /// Entrywise comparison; exact scalars compare exactly.
    bool near(const SparseMatrix& o, double tol) const {
        if (rows() != o.rows() || cols() != o.cols()) return false;
        for (std::size_t i = 0; i < rows(); ++i) {
            const auto &a = data_[i], &b = o.data_[i];
            std::size_t x = 0, y = 0;
            while (x < a.size() || y < b.size()) {
                if (y == b.size() || (x < a.size() && a[x].first < b[y].first)) {
                    if (!T::near(a[x++].second, T::zero(), tol)) return false;
                } else if (x == a.size() || b[y].first < a[x].first) {
                    if (!T::near(b[y++].second, T::zero(), tol)) return false;
                } else {
                    if (!T::near(a[x++].second, b[y++].second, tol)) return false;
                }
            }
        }
        return true;
    }

    nlohmann::json to_json() const {
        nlohmann::json entries = nlohmann::json::array();
        for (std::size_t i = 0; i < rows(); ++i)
            for (const auto& [j, v] : data_[i]) entries.push_back({i, j, T::str(v)});
        return {{"rows", rows()}, {"cols", cols()}, {"entries", entries}};
    }

private:
    std::size_t cols_ = 0;
    std::vector<Row> data_;
};

template <class S>
SparseMatrix<S> mat_mul(const SparseMatrix<S>& a, const SparseMatrix<S>& b) {
    if (a.cols() != b.rows())
        throw LinalgError("mat_mul: dimension mismatch (" + std::to_string(a.cols()) + " vs " +
                          std::to_string(b.rows()) + ")");
    SparseMatrix<S> out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        typename SparseMatrix<S>::Row acc;
        for (const auto& [k, v] : a.row(i))
            for (const auto& [j, w] : b.row(k)) acc.emplace_back(j, v * w);
        out.set_row(i, std::move(acc));
    }
    return out;
}

/// r*A + (1-r)*B.
template <class S>
SparseMatrix<S> convex(const S& r, const SparseMatrix<S>& a, const SparseMatrix<S>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw LinalgError("convex: dimension mismatch");
    SparseMatrix<S> out(a.rows(), a.cols());
    const S rc = scalar_traits<S>::one() - r;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        typename SparseMatrix<S>::Row acc;
        for (const auto& [j, v] : a.row(i)) acc.emplace_back(j, r * v);
        for (const auto& [j, v] : b.row(i)) acc.emplace_back(j, rc * v);
        out.set_row(i, std::move(acc));
    }
    return out;
}

namespace detail {

/// Strongly connected components of the graph with an edge i->j per stored
/// entry of the square matrix q. Components come out in reverse topological
/// order: every edge leaving a component points to an earlier one.
template <class S>
std::vector<std::vector<std::size_t>> tarjan_scc(const SparseMatrix<S>& q) {
    const std::size_t n = q.rows();
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, kUnset), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    std::size_t counter = 0;
    // iterative DFS: (node, next edge position)
    std::vector<std::pair<std::size_t, std::size_t>> dfs;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        dfs.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!dfs.empty()) {
            auto& [v, pos] = dfs.back();
            const auto& row = q.row(v);
            if (pos < row.size()) {
                std::size_t w = row[pos++].first;
                if (index[w] == kUnset) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    dfs.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            std::size_t done = v;
            dfs.pop_back();
            if (!dfs.empty()) low[dfs.back().first] = std::min(low[dfs.back().first], low[done]);
            if (low[done] == index[done]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                } while (w != done);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }
    return comps;
}

/// Solves M X = B in place for a dense square M and dense right-hand sides
/// (one column per entry of b's inner vectors). Gaussian elimination with
/// partial pivoting on the largest magnitude.
template <class S>
void dense_solve(std::vector<std::vector<S>>& m, std::vector<std::vector<S>>& b) {
    using T = scalar_traits<S>;
    const std::size_t n = m.size();
    const std::size_t k = n ? b[0].size() : 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (T::abs(m[r][c]) > T::abs(m[piv][c])) piv = r;
        if (T::is_zero(m[piv][c])) throw LinalgError("singular system: I - Q is not invertible");
        std::swap(m[c], m[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            if (T::is_zero(m[r][c])) continue;
            S f = m[r][c] / m[c][c];
            for (std::size_t j = c; j < n; ++j)
                if (!T::is_zero(m[c][j])) m[r][j] -= f * m[c][j];
            for (std::size_t j = 0; j < k; ++j)
                if (!T::is_zero(b[c][j])) b[r][j] -= f * b[c][j];
        }
    }
    for (std::size_t c = n; c-- > 0;) {
        for (std::size_t j = 0; j < k; ++j) {
            S acc = b[c][j];
            for (std::size_t x = c + 1; x < n; ++x)
                if (!T::is_zero(m[c][x])) acc -= m[c][x] * b[x][j];
            b[c][j] = acc / m[c][c];
        }
    }
}

template <class S>
void check_residual(double residual, const char* what) {
    if (scalar_traits<S>::exact ? residual != 0.0 : residual >= kDefaultTolerance)
        throw LinalgError(std::string(what) + ": residual " + std::to_string(residual) +
                          " exceeds budget");
}

}  // namespace detail

/// Absorption probabilities A = (I - Q)^-1 R of an absorbing chain with
/// transient-to-transient block Q and transient-to-absorbing block R.
/// Components of Q are solved one at a time, sinks first, so each dense
/// elimination only spans one strongly connected block. The result is
/// checked against (I - Q) A = R; `residual` receives the max-norm error.
template <class S>
SparseMatrix<S> solve_absorption(const SparseMatrix<S>& q, const SparseMatrix<S>& r,
                                 double* residual = nullptr) {
    using T = scalar_traits<S>;
    const std::size_t n = q.rows();
    if (q.cols() != n || r.rows() != n) throw LinalgError("solve_absorption: dimension mismatch");
    SparseMatrix<S> a(n, r.cols());
    std::vector<std::size_t> local(n);
    for (const auto& comp : detail::tarjan_scc(q)) {
        for (std::size_t x = 0; x < comp.size(); ++x) local[comp[x]] = x;
        auto inside = [&](std::size_t j) {
            return std::binary_search(comp.begin(), comp.end(), j);
        };
        // rhs rows: R_C + Q_{C,out} A_out, collected over a compact column set
        std::vector<typename SparseMatrix<S>::Row> rhs(comp.size());
        for (std::size_t x = 0; x < comp.size(); ++x) {
            auto& acc = rhs[x];
            for (const auto& e : r.row(comp[x])) acc.push_back(e);
            for (const auto& [j, v] : q.row(comp[x]))
                if (!inside(j))
                    for (const auto& [c, w] : a.row(j)) acc.emplace_back(c, v * w);
        }
        std::vector<std::size_t> cols;
        for (const auto& row : rhs)
            for (const auto& e : row) cols.push_back(e.first);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        auto col_of = [&](std::size_t c) {
            return static_cast<std::size_t>(std::lower_bound(cols.begin(), cols.end(), c) - cols.begin());
        };
        std::vector<std::vector<S>> m(comp.size(), std::vector<S>(comp.size(), T::zero()));
        std::vector<std::vector<S>> b(comp.size(), std::vector<S>(cols.size(), T::zero()));
        for (std::size_t x = 0; x < comp.size(); ++x) {
            m[x][x] = T::one();
            for (const auto& [j, v] : q.row(comp[x]))
                if (inside(j)) m[x][local[j]] -= v;
            for (const auto& [c, v] : rhs[x]) b[x][col_of(c)] += v;
        }
        detail::dense_solve(m, b);
        for (std::size_t x = 0; x < comp.size(); ++x) {
            typename SparseMatrix<S>::Row row;
            for (std::size_t c = 0; c < cols.size(); ++c)
                if (!T::is_zero(b[x][c])) row.emplace_back(cols[c], b[x][c]);
            a.set_row(comp[x], std::move(row));
        }
    }
    // (I - Q) A - R
    double worst = 0.0;
    auto qa = mat_mul(q, a);
    for (std::size_t i = 0; i < n; ++i) {
        typename SparseMatrix<S>::Row diff;
        for (const auto& e : a.row(i)) diff.push_back(e);
        for (const auto& [j, v] : qa.row(i)) diff.emplace_back(j, -v);
        for (const auto& [j, v] : r.row(i)) diff.emplace_back(j, -v);
        SparseMatrix<S> tmp(1, a.cols());
        tmp.set_row(0, std::move(diff));
        for (const auto& e : tmp.row(0)) worst = std::max(worst, std::fabs(T::to_double(e.second)));
        if (T::exact && !tmp.row(0).empty()) worst = std::max(worst, 1.0);
    }
    if (residual) *residual = worst;
    detail::check_residual<S>(worst, "solve_absorption");
    return a;
}

/// A single row of (I - Q)^-1 R, for the chain started in transient state
/// `start`. Expected visit counts are propagated forward through the
/// components of Q in topological order, so only states reachable from
/// `start` are ever touched.
template <class S>
std::vector<std::pair<std::size_t, S>> absorption_row(const SparseMatrix<S>& q,
                                                      const SparseMatrix<S>& r, std::size_t start,
                                                      double* residual = nullptr) {
    using T = scalar_traits<S>;
    const std::size_t n = q.rows();
    if (q.cols() != n || r.rows() != n || start >= n)
        throw LinalgError("absorption_row: dimension mismatch");
    auto comps = detail::tarjan_scc(q);
    std::vector<std::size_t> comp_of(n), local(n);
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (std::size_t x = 0; x < comps[c].size(); ++x) {
            comp_of[comps[c][x]] = c;
            local[comps[c][x]] = x;
        }
    std::vector<S> inflow(n, T::zero()), visits(n, T::zero());
    inflow[start] = T::one();
    std::vector<char> live(comps.size(), 0);
    live[comp_of[start]] = 1;
    // reverse of Tarjan order is topological: sources first
    for (std::size_t c = comps.size(); c-- > 0;) {
        if (!live[c]) continue;
        const auto& comp = comps[c];
        // x^T (I - Q_CC) = inflow^T  <=>  (I - Q_CC)^T x = inflow
        std::vector<std::vector<S>> m(comp.size(), std::vector<S>(comp.size(), T::zero()));
        std::vector<std::vector<S>> b(comp.size(), std::vector<S>(1, T::zero()));
        for (std::size_t x = 0; x < comp.size(); ++x) {
            m[x][x] = T::one();
            b[x][0] = inflow[comp[x]];
        }
        for (std::size_t x = 0; x < comp.size(); ++x)
            for (const auto& [j, v] : q.row(comp[x]))
                if (comp_of[j] == c) m[local[j]][x] -= v;
        if (comp.size() == 1) {
            if (T::is_zero(m[0][0])) throw LinalgError("singular system: I - Q is not invertible");
            b[0][0] = b[0][0] / m[0][0];
        } else {
            detail::dense_solve(m, b);
        }
        for (std::size_t x = 0; x < comp.size(); ++x) {
            const S& xv = b[x][0];
            visits[comp[x]] = xv;
            if (T::is_zero(xv)) continue;
            for (const auto& [j, v] : q.row(comp[x]))
                if (comp_of[j] != c) {
                    inflow[j] += xv * v;
                    live[comp_of[j]] = 1;
                }
        }
    }
    // visits^T (I - Q) - e_start
    double worst = 0.0;
    {
        std::vector<S> lhs = visits;
        for (std::size_t i = 0; i < n; ++i)
            if (!T::is_zero(visits[i]))
                for (const auto& [j, v] : q.row(i)) lhs[j] -= visits[i] * v;
        lhs[start] -= T::one();
        for (const auto& v : lhs) {
            if (T::exact && !T::is_zero(v)) worst = std::max(worst, 1.0);
            worst = std::max(worst, std::fabs(T::to_double(v)));
        }
    }
    if (residual) *residual = worst;
    detail::check_residual<S>(worst, "absorption_row");
    SparseMatrix<S> out(1, r.cols());
    typename SparseMatrix<S>::Row acc;
    for (std::size_t i = 0; i < n; ++i)
        if (!T::is_zero(visits[i]))
            for (const auto& [j, v] : r.row(i)) acc.emplace_back(j, visits[i] * v);
    out.set_row(0, std::move(acc));
    return out.row(0);
}

}  // namespace pnk
