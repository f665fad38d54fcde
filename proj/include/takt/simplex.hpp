#pragma once

#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace takt {

// Bounded-variable revised primal simplex, built for a column-generation
// master: columns and rows arrive incrementally, and re-solves after adding
// columns warm-start from the previous basis (the old basis stays primal
// feasible because new columns enter nonbasic at zero).  Adding a row or
// moving a bound that strands a basic value outside its range falls back to
// a cold two-phase solve.
//
// Row senses are kept as given; internally each row is normalized to a
// nonnegative right-hand side.  Duals are reported in the caller's original
// row orientation, so for a minimization problem an active "<=" row yields a
// nonpositive dual and a ">=" row a nonnegative one.

enum class LpSense { le, ge, eq };

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::iteration_limit;
    double objective = 0.0;
    std::vector<double> x;      // user variables only
    std::vector<double> duals;  // one per row
    int iterations = 0;
};

class SimplexLp {
  public:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    int add_variable(double cost, double lo = 0.0, double up = kInf);
    int add_row(LpSense sense, double rhs);
    // One call per (row, var) pair; duplicate pairs are not merged.
    void add_coef(int row, int var, double a);
    void set_cost(int var, double cost);
    void set_bounds(int var, double lo, double up);

    int num_vars() const { return static_cast<int>(user_vars_.size()); }
    int num_rows() const { return static_cast<int>(rhs_.size()); }
    double variable_cost(int var) const;
    std::pair<double, double> variable_bounds(int var) const;

    LpResult solve(int max_iterations = 0);  // 0 = automatic cap

    // Polled every few thousand pivots; returning true stops the solve with
    // LpStatus::iteration_limit.  Lets a caller enforce a wall-clock budget
    // without the solver knowing about clocks.
    void set_interrupt(std::function<bool()> cb) { interrupt_ = std::move(cb); }
    bool interrupt_fired() const { return interrupt_fired_; }

    // Slack value per row at the current basis point (normalized, >= 0 at a
    // feasible point; 0 for eq rows).  Meaningful only after a solve.
    std::vector<double> row_slacks() const;

    // Removes rows in place while keeping the current basis warm.  A row is
    // removed only if its slack is basic (always true when the slack is
    // strictly positive) and its artificial, if any, is nonbasic; requested
    // rows failing that stay, as does everything when no warm basis exists.
    // Returns the old -> new row index map, -1 for removed rows.
    std::vector<int> drop_rows(const std::vector<char>& drop);

  private:
    enum VarState : unsigned char { at_lower, at_upper, basic };

    struct Internal {
        double cost = 0.0;
        double lo = 0.0;
        double up = kInf;
        std::vector<std::pair<int, double>> col;  // (row, coef)
    };

    int new_internal(double cost, double lo, double up);
    void invalidate();
    bool repair_basis(int max_iterations, int& iters);
    bool refactorize();
    void compute_basic_values();
    bool basis_feasible() const;
    void cold_start_basis();
    LpStatus run(const std::vector<double>& cost, int max_iterations, int& iters);
    double reduced_cost(const std::vector<double>& y, int v,
                        const std::vector<double>& cost) const;

    std::vector<Internal> vars_;
    std::vector<int> user_vars_;   // user index -> internal index
    std::vector<double> rhs_;      // normalized, >= 0
    std::vector<LpSense> sense_;   // normalized sense
    std::vector<char> flipped_;    // row was multiplied by -1 at add time
    std::vector<int> slack_of_;    // internal var id or -1
    std::vector<int> art_of_;      // internal var id or -1

    std::vector<int> basis_;         // row -> internal var
    std::vector<VarState> state_;    // internal var -> state
    std::vector<double> xb_;         // basic values, aligned with basis_
    std::vector<double> binv_;       // dense m*m row-major
    bool warm_ok_ = false;
    // binv_ matches basis_ (pivots eta-update it in place), so a re-solve
    // after column adds or bound moves can skip the O(m^3) refactorization.
    bool binv_valid_ = false;
    int pivots_since_factor_ = 0;

    std::function<bool()> interrupt_;
    bool interrupt_fired_ = false;

    int refactor_interval() const;
};

}  // namespace takt
