#include "rarsched/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace rarsched {

namespace {

constexpr double kTol = 1e-9;

// Dense simplex tableau over equality rows with nonnegative variables.
struct Tableau {
    int rows = 0;
    int cols = 0;  // structural + slacks + artificials
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<int> basis;  // column basic in each row

    void pivot(int row, int col) {
        const double p = a[row][col];
        for (int c = 0; c < cols; ++c) a[row][c] /= p;
        b[row] /= p;
        for (int r = 0; r < rows; ++r) {
            if (r == row) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (int c = 0; c < cols; ++c) a[r][c] -= f * a[row][c];
            b[r] -= f * b[row];
        }
        basis[row] = col;
    }

    // Minimizes cost over the current basis with Bland's rule. `allowed`
    // filters the columns that may enter. Returns false when unbounded.
    bool run(const std::vector<double>& cost, const std::vector<bool>& allowed) {
        while (true) {
            std::vector<double> basic_cost(rows);
            for (int r = 0; r < rows; ++r) basic_cost[r] = cost[basis[r]];

            // reduced cost of column j: c_j - sum_r c_basis[r] * a[r][j]
            int entering = -1;
            for (int c = 0; c < cols && entering < 0; ++c) {
                if (!allowed[c]) continue;
                double rc = cost[c];
                for (int r = 0; r < rows; ++r) rc -= basic_cost[r] * a[r][c];
                if (rc < -kTol) entering = c;  // Bland: first eligible index
            }
            if (entering < 0) return true;

            int leaving = -1;
            double best_ratio = 0;
            for (int r = 0; r < rows; ++r) {
                if (a[r][entering] <= kTol) continue;
                const double ratio = b[r] / a[r][entering];
                if (leaving < 0 || ratio < best_ratio - kTol ||
                    (std::abs(ratio - best_ratio) <= kTol && basis[r] < basis[leaving]))
                    leaving = r, best_ratio = ratio;
            }
            if (leaving < 0) return false;
            pivot(leaving, entering);
        }
    }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    const int n = lp.num_variables();

    // Every finite upper bound becomes an explicit row; all variables are
    // nonnegative by construction.
    std::vector<LinearProgram::Row> rows = lp.rows();
    for (int v = 0; v < n; ++v)
        if (lp.upper()[v] != LinearProgram::kUnbounded)
            rows.push_back({{{v, 1.0}}, 'L', lp.upper()[v]});

    const int m = static_cast<int>(rows.size());
    Tableau t;
    t.rows = m;

    // Count slack columns first so artificial columns land at the end.
    int slack_count = 0;
    for (const auto& row : rows)
        if (row.sense != 'E') slack_count++;

    std::vector<int> artificial_cols;
    t.cols = n + slack_count;
    t.a.assign(m, std::vector<double>(n + slack_count, 0.0));
    t.b.assign(m, 0.0);
    t.basis.assign(m, -1);

    int next_slack = n;
    for (int r = 0; r < m; ++r) {
        double sign = rows[r].rhs < 0 ? -1.0 : 1.0;
        for (const auto& [v, coeff] : rows[r].terms) t.a[r][v] += sign * coeff;
        t.b[r] = sign * rows[r].rhs;
        char sense = rows[r].sense;
        if (sign < 0 && sense == 'L') sense = 'G';
        else if (sign < 0 && sense == 'G') sense = 'L';
        if (rows[r].sense != 'E') {
            const double dir = sense == 'L' ? 1.0 : -1.0;
            t.a[r][next_slack] = dir;
            if (dir > 0) t.basis[r] = next_slack;  // slack can start basic
            next_slack++;
        }
    }

    // Artificial columns for rows without a basic slack.
    for (int r = 0; r < m; ++r) {
        if (t.basis[r] >= 0) continue;
        for (auto& row : t.a) row.push_back(0.0);
        t.a[r].back() = 1.0;
        t.basis[r] = t.cols;
        artificial_cols.push_back(t.cols);
        t.cols++;
    }

    LpSolution solution;

    // Phase 1: drive the artificials to zero.
    if (!artificial_cols.empty()) {
        std::vector<double> cost(t.cols, 0.0);
        for (int c : artificial_cols) cost[c] = 1.0;
        std::vector<bool> allowed(t.cols, true);
        if (!t.run(cost, allowed)) throw std::logic_error("solve_lp: phase one unbounded");

        double infeasibility = 0;
        for (int r = 0; r < m; ++r)
            for (int c : artificial_cols)
                if (t.basis[r] == c) infeasibility += t.b[r];
        if (infeasibility > 1e-7) {
            solution.status = LpSolution::Status::infeasible;
            return solution;
        }
        // Pivot any zero-level artificial out of the basis when possible.
        for (int r = 0; r < m; ++r) {
            bool artificial = false;
            for (int c : artificial_cols) artificial |= (t.basis[r] == c);
            if (!artificial) continue;
            for (int c = 0; c < n + slack_count; ++c) {
                if (std::abs(t.a[r][c]) > kTol) {
                    t.pivot(r, c);
                    break;
                }
            }
        }
    }

    // Phase 2: the real objective, artificials barred from entering.
    std::vector<double> cost(t.cols, 0.0);
    for (int v = 0; v < n; ++v) cost[v] = lp.objective()[v];
    std::vector<bool> allowed(t.cols, true);
    for (int c : artificial_cols) allowed[c] = false;
    if (!t.run(cost, allowed)) throw std::logic_error("solve_lp: objective unbounded below");

    solution.status = LpSolution::Status::optimal;
    solution.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
        if (t.basis[r] < n) solution.x[t.basis[r]] = t.b[r];
    solution.objective = 0;
    for (int v = 0; v < n; ++v) solution.objective += lp.objective()[v] * solution.x[v];
    return solution;
}

}  // namespace rarsched
