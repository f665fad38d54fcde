#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "takt/flowcuts.hpp"
#include "takt/instance.hpp"
#include "takt/linegraph.hpp"
#include "takt/simplex.hpp"
#include "takt/timetable.hpp"

namespace takt {

// Restricted master: one cover row per line (exactly one schedule group),
// plus packing rows over event windows, plus routing optimality cuts.
//
// Packing rows live in implicit pools: for every (station, segment, track,
// kind) with a positive headway there is one candidate row per anchor
// instant.  Only rows the current LP point violates are materialized, which
// is equivalent to solving with the full pool active (a satisfied packing
// row has dual zero), so solve_lp() loops activation and re-solve until the
// point satisfies every pooled row.

enum class RowKind {
    cover,
    dep_headway,
    arr_headway,
    platform,
    overtake,
    crossing,
    sibling,
    symmetry,
};

const char* row_kind_name(RowKind k);

// One event filter with a cyclic half-open time window [w0, w0+wlen).
// -1 means "any" for the id fields; kind is 0 = departure, 1 = arrival.
struct WindowTerm {
    int line = -1;
    int dir = -1;
    int dup = -1;
    int station = -1;
    int segment = -1;
    int parallel = -1;
    int kind = -1;
    int w0 = 0;
    int wlen = 0;
};

struct MasterRow {
    RowKind kind = RowKind::cover;
    double rhs = 1.0;
    std::vector<WindowTerm> terms;
    int line = -1;  // cover rows only
};

struct Column {
    int line = -1;
    std::vector<int> path;  // one node per layer
    long long cost = 0;
    std::vector<TrackEvent> events;
    std::vector<long long> arcs;  // sorted ride-arc keys
    bool dummy = false;
};

struct ActiveRowDual {
    double y = 0.0;
    const MasterRow* row = nullptr;
};

struct CutDual {
    double y = 0.0;
    const FlowCut* cut = nullptr;
};

struct DualSnapshot {
    std::vector<double> cover;  // per line
    std::vector<ActiveRowDual> rows;
    std::vector<CutDual> cuts;
};

struct LpSummary {
    LpStatus status = LpStatus::iteration_limit;
    double objective = 0.0;
    int lp_iterations = 0;
    int activation_rounds = 0;
    int rows_activated = 0;
};

struct MasterOptions {
    bool lazy_headways = false;
    double alpha = 0.0;  // weight of routing terms; 0 disables z costs
    // optional per-commodity lower bounds on the routing variables, valid
    // for every timetable (idealized-network bounds)
    std::vector<double> z_lower;
};

class Master {
  public:
    Master(const NetworkInstance& inst, const std::vector<LineGraph>& graphs,
           MasterOptions opt);

    // Returns {column index, true} for a fresh column, {existing, false} for
    // a duplicate (same line and node path).
    std::pair<int, bool> add_column(int line, const std::vector<int>& path);

    // Immediately-active packing row (separated cuts).  Returns false when an
    // identical row is already present.
    bool add_cut_row(MasterRow row);
    int add_flow_cut(FlowCut cut);

    LpSummary solve_lp();
    // Deadline hook handed down to the simplex; when it returns true mid-solve
    // the current solve_lp() comes back with a non-optimal status.  Kept here
    // as well so a compaction rebuild of the LP re-installs it.
    void set_interrupt(std::function<bool()> cb) {
        interrupt_cb_ = std::move(cb);
        lp_.set_interrupt(interrupt_cb_);
    }
    // Scans the implicit pools against the last LP point and activates every
    // locally-maximal violated row.  solve_lp() calls this itself unless
    // lazy_headways is set, in which case the separation pass drives it.
    int activate_violated_pool_rows();

    const NetworkInstance& instance() const { return inst_; }
    const std::vector<LineGraph>& graphs() const { return graphs_; }
    bool lazy_headways() const { return opt_.lazy_headways; }
    size_t num_columns() const { return cols_.size(); }
    const Column& column(int idx) const { return cols_[idx]; }
    double column_value(int idx) const;
    double objective() const { return last_obj_; }
    double z_value(int commodity) const;
    bool dummy_active(double tol = 1e-6) const;
    long long dummy_cost() const { return dummy_cost_; }
    int active_row_count() const;
    int flow_cut_count() const { return static_cast<int>(cuts_.size()); }
    int rows_of_kind(RowKind k) const;

    DualSnapshot duals() const;

    // x-weight per graph node for one line, dummies excluded.
    std::unordered_map<int, double> node_usage(int line) const;

    // Dive / neighborhood controls: bounds only, columns are never deleted.
    void reset_column_bounds();
    void restrict_line_to_node(int line, int layer, int node);
    void restrict_line_to_path(int line, const std::vector<int>& path);

    // Rebuilds the LP without packing rows that are strictly slack at the
    // last solved point; covers and routing cuts always stay.  A dropped row
    // re-activates through the pools or the separation pass the moment it is
    // violated again, so this only sheds dead weight.  Returns rows dropped.
    int compact_rows(double keep_tol = 1e-7);

    // Integral extraction: per line the unique column with weight > 0.5.
    // Returns nothing when the point is fractional or a dummy carries weight.
    std::optional<std::vector<int>> integral_columns(double tol = 1e-6) const;
    std::optional<TimetableSolution> extract_integral(double tol = 1e-6) const;

  private:
    double row_coef(const MasterRow& row, const Column& col) const;
    double cut_coef(const FlowCut& cut, const Column& col) const;
    void attach_column_to_lp(int idx);
    int activate_row(MasterRow row);
    void ensure_z_var(int commodity);
    int scan_pool_class(RowKind kind, const std::vector<WindowTerm>& proto, int wlen);
    uint64_t row_signature(const MasterRow& row) const;

    const NetworkInstance& inst_;
    const std::vector<LineGraph>& graphs_;
    MasterOptions opt_;
    SimplexLp lp_;
    std::function<bool()> interrupt_cb_;

    std::vector<Column> cols_;
    std::vector<int> col_var_;  // column -> lp variable
    std::unordered_map<uint64_t, std::vector<int>> col_index_;
    std::vector<std::vector<int>> line_cols_;
    std::vector<int> dummy_col_;  // per line
    long long dummy_cost_ = 0;

    std::vector<int> cover_row_;           // line -> lp row
    std::deque<MasterRow> active_rows_;    // stable addresses
    std::vector<int> active_row_lp_;       // parallel lp row ids
    std::unordered_map<uint64_t, int> row_sigs_;
    std::deque<FlowCut> cuts_;
    std::vector<int> cut_row_lp_;
    std::unordered_map<int, int> z_var_;  // commodity -> lp variable

    // pool classes for the implicit packing pools
    struct PoolClass {
        RowKind kind;
        int wlen;
        std::vector<WindowTerm> proto;  // windows filled in per anchor
    };
    std::vector<PoolClass> pool_;
    void build_pools();

    LpResult last_;
    double last_obj_ = 0.0;
};

}  // namespace takt
