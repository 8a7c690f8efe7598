#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace rarsched {

// A small dense linear program: minimize c.x subject to rows of sense <=, >=
// or ==, with every variable in [0, upper]. Built for the desk-scale
// relaxations in this project, not for large instances.
class LinearProgram {
  public:
    static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

    int add_variable(double upper = kUnbounded, double objective = 0.0) {
        upper_.push_back(upper);
        objective_.push_back(objective);
        return static_cast<int>(upper_.size()) - 1;
    }

    void set_objective(int var, double coefficient) { objective_[var] = coefficient; }

    void add_constraint(std::vector<std::pair<int, double>> terms, char sense, double rhs) {
        rows_.push_back({std::move(terms), sense, rhs});
    }

    int num_variables() const { return static_cast<int>(upper_.size()); }

    struct Row {
        std::vector<std::pair<int, double>> terms;
        char sense;  // 'L' <=, 'G' >=, 'E' ==
        double rhs;
    };

    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<double>& objective() const { return objective_; }
    const std::vector<double>& upper() const { return upper_; }

  private:
    std::vector<double> upper_;
    std::vector<double> objective_;
    std::vector<Row> rows_;
};

struct LpSolution {
    enum class Status { optimal, infeasible };
    Status status = Status::infeasible;
    double objective = 0;
    std::vector<double> x;
};

// Two-phase dense simplex with Bland's pivoting rule. Deterministic: the same
// program always yields the same basic optimal solution.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace rarsched
