#include "takt/master.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <tuple>

namespace takt {

namespace {

constexpr double kXTol = 1e-9;
constexpr double kViolTol = 1e-6;

uint64_t fnv1a(uint64_t h, uint64_t v) {
    h ^= v;
    return h * 1099511628211ull;
}

uint64_t path_key(int line, const std::vector<int>& path) {
    uint64_t h = 1469598103934665603ull;
    h = fnv1a(h, static_cast<uint64_t>(line));
    for (int n : path) h = fnv1a(h, static_cast<uint64_t>(n) + 0x9e3779b9u);
    return h;
}

bool term_matches(const WindowTerm& t, const TrackEvent& e, int T) {
    if (t.line >= 0 && t.line != e.line) return false;
    if (t.dir >= 0 && t.dir != e.direction) return false;
    if (t.dup >= 0 && t.dup != e.dup) return false;
    if (t.station >= 0 && t.station != e.station) return false;
    if (t.segment >= 0 && t.segment != e.segment) return false;
    if (t.parallel >= 0 && t.parallel != e.parallel) return false;
    if (t.kind >= 0) {
        int k = e.kind == EventKind::departure ? 0 : 1;
        if (t.kind != k) return false;
    }
    return t.wlen > 0 && cyc_delta(t.w0, e.time, T) < t.wlen;
}

// same field checks, ignoring the window
bool term_matches_class(const WindowTerm& t, const TrackEvent& e) {
    if (t.line >= 0 && t.line != e.line) return false;
    if (t.station >= 0 && t.station != e.station) return false;
    if (t.segment >= 0 && t.segment != e.segment) return false;
    if (t.parallel >= 0 && t.parallel != e.parallel) return false;
    if (t.kind >= 0) {
        int k = e.kind == EventKind::departure ? 0 : 1;
        if (t.kind != k) return false;
    }
    return true;
}

bool term_less(const WindowTerm& a, const WindowTerm& b) {
    return std::tie(a.line, a.dir, a.dup, a.station, a.segment, a.parallel, a.kind, a.w0,
                    a.wlen) < std::tie(b.line, b.dir, b.dup, b.station, b.segment,
                                       b.parallel, b.kind, b.w0, b.wlen);
}

}  // namespace

const char* row_kind_name(RowKind k) {
    switch (k) {
        case RowKind::cover: return "cover";
        case RowKind::dep_headway: return "dep_headway";
        case RowKind::arr_headway: return "arr_headway";
        case RowKind::platform: return "platform";
        case RowKind::overtake: return "overtake";
        case RowKind::crossing: return "crossing";
        case RowKind::sibling: return "sibling";
        case RowKind::symmetry: return "symmetry";
    }
    return "?";
}

Master::Master(const NetworkInstance& inst, const std::vector<LineGraph>& graphs,
               MasterOptions opt)
    : inst_(inst), graphs_(graphs), opt_(opt) {
    int L = static_cast<int>(inst.lines.size());
    line_cols_.resize(L);
    cover_row_.resize(L);
    dummy_col_.resize(L);

    long long lb_sum = 0;
    for (const LineGraph& g : graphs_) {
        long long lb = g.base_cost;
        for (int j = 1; j < g.layers; ++j)
            lb += static_cast<long long>(g.mult) * (g.dwell_lo_out[j] + g.dwell_lo_in[j]);
        lb_sum += lb;
    }
    dummy_cost_ = 10 * std::max<long long>(lb_sum, 1);

    for (int l = 0; l < L; ++l) cover_row_[l] = lp_.add_row(LpSense::eq, 1.0);

    for (int l = 0; l < L; ++l) {
        Column c;
        c.line = l;
        c.cost = dummy_cost_;
        c.dummy = true;
        int idx = static_cast<int>(cols_.size());
        cols_.push_back(std::move(c));
        line_cols_[l].push_back(idx);
        dummy_col_[l] = idx;
        attach_column_to_lp(idx);
    }

    build_pools();
}

void Master::build_pools() {
    const int nseg = static_cast<int>(inst_.segments.size());
    for (int s = 0; s < nseg; ++s) {
        const TrackSegment& seg = inst_.segments[s];
        int par = seg.parallel_tracks_per_direction();
        for (int st : {seg.station_a, seg.station_b}) {
            int d = inst_.dep_headway(s, st);
            int a = inst_.arr_headway(s, st);
            for (int c = 0; c < par; ++c) {
                if (d > 0) {
                    WindowTerm t;
                    t.station = st;
                    t.segment = s;
                    t.parallel = c;
                    t.kind = 0;
                    pool_.push_back({RowKind::dep_headway, d, {t}});
                }
                if (a > 0) {
                    WindowTerm t;
                    t.station = st;
                    t.segment = s;
                    t.parallel = c;
                    t.kind = 1;
                    pool_.push_back({RowKind::arr_headway, a, {t}});
                }
            }
        }
    }
    for (size_t st = 0; st < inst_.stations.size(); ++st) {
        if (!inst_.stations[st].single_platform) continue;
        int h = inst_.platform_headway(static_cast<int>(st));
        if (h <= 0) continue;
        WindowTerm t;
        t.station = static_cast<int>(st);
        t.kind = 1;
        pool_.push_back({RowKind::platform, h, {t}});
    }
    int hw_s = inst_.params.hw_sibling;
    if (hw_s > 0) {
        for (auto [la, lb] : inst_.siblings) {
            const Line& a = inst_.lines[la];
            const Line& b = inst_.lines[lb];
            for (int sa : a.segments) {
                if (std::find(b.segments.begin(), b.segments.end(), sa) == b.segments.end())
                    continue;
                for (int st : {inst_.segments[sa].station_a, inst_.segments[sa].station_b}) {
                    WindowTerm ta, tb;
                    ta.line = la;
                    ta.station = st;
                    ta.segment = sa;
                    ta.kind = 0;
                    tb = ta;
                    tb.line = lb;
                    pool_.push_back({RowKind::sibling, hw_s, {ta, tb}});
                }
            }
        }
    }
}

std::pair<int, bool> Master::add_column(int line, const std::vector<int>& path) {
    uint64_t key = path_key(line, path);
    auto it = col_index_.find(key);
    if (it != col_index_.end()) {
        for (int idx : it->second)
            if (cols_[idx].line == line && cols_[idx].path == path) return {idx, false};
    }

    const LineGraph& g = graphs_[line];
    Column c;
    c.line = line;
    c.path = path;
    c.cost = path_cost(inst_, g, path);
    for (int node : path) append_node_events(inst_, g, node, c.events);
    int other = g.travel_dir == kOutbound ? kInbound : kOutbound;
    int half = g.mult == 2 ? g.T / 2 : 0;
    for (int j = 0; j < g.layers; ++j) {
        int node = path[j];
        for (int dup = 0; dup < g.mult; ++dup) {
            int off = dup * half;
            c.arcs.push_back(
                ride_arc_key(line, g.travel_dir, j, pmod(g.out_dep(node) + off, g.T)));
            if (!g.rush)
                c.arcs.push_back(ride_arc_key(line, other, g.layers - 1 - j,
                                              pmod(g.in_dep(node) + off, g.T)));
        }
    }
    std::sort(c.arcs.begin(), c.arcs.end());

    int idx = static_cast<int>(cols_.size());
    cols_.push_back(std::move(c));
    col_index_[key].push_back(idx);
    line_cols_[line].push_back(idx);
    attach_column_to_lp(idx);
    return {idx, true};
}

double Master::row_coef(const MasterRow& row, const Column& col) const {
    if (row.kind == RowKind::cover) return col.line == row.line ? 1.0 : 0.0;
    for (const TrackEvent& e : col.events)
        for (const WindowTerm& t : row.terms)
            if (term_matches(t, e, inst_.params.period)) return 1.0;
    return 0.0;
}

double Master::cut_coef(const FlowCut& cut, const Column& col) const {
    double s = 0.0;
    for (long long a : col.arcs) {
        auto it = cut.arc_pi.find(a);
        if (it != cut.arc_pi.end()) s -= it->second;
    }
    return s;
}

void Master::attach_column_to_lp(int idx) {
    const Column& c = cols_[idx];
    int var = lp_.add_variable(static_cast<double>(c.cost), 0.0, SimplexLp::kInf);
    col_var_.push_back(var);
    lp_.add_coef(cover_row_[c.line], var, 1.0);
    for (size_t i = 0; i < active_rows_.size(); ++i) {
        double a = row_coef(active_rows_[i], c);
        if (a != 0.0) lp_.add_coef(active_row_lp_[i], var, a);
    }
    for (size_t i = 0; i < cuts_.size(); ++i) {
        double a = cut_coef(cuts_[i], c);
        if (a != 0.0) lp_.add_coef(cut_row_lp_[i], var, a);
    }
}

uint64_t Master::row_signature(const MasterRow& row) const {
    uint64_t h = 1469598103934665603ull;
    h = fnv1a(h, static_cast<uint64_t>(row.kind));
    h = fnv1a(h, static_cast<uint64_t>(row.rhs * 16.0));
    for (const WindowTerm& t : row.terms) {
        for (int v : {t.line, t.dir, t.dup, t.station, t.segment, t.parallel, t.kind, t.w0,
                      t.wlen})
            h = fnv1a(h, static_cast<uint64_t>(v + 7));
    }
    return h;
}

int Master::activate_row(MasterRow row) {
    std::sort(row.terms.begin(), row.terms.end(), term_less);
    uint64_t sig = row_signature(row);
    auto it = row_sigs_.find(sig);
    if (it != row_sigs_.end()) return -1;

    int lp_row = lp_.add_row(LpSense::le, row.rhs);
    active_rows_.push_back(std::move(row));
    active_row_lp_.push_back(lp_row);
    int ridx = static_cast<int>(active_rows_.size()) - 1;
    row_sigs_[sig] = ridx;
    const MasterRow& r = active_rows_.back();
    for (size_t idx = 0; idx < cols_.size(); ++idx) {
        double a = row_coef(r, cols_[idx]);
        if (a != 0.0) lp_.add_coef(lp_row, col_var_[idx], a);
    }
    return ridx;
}

bool Master::add_cut_row(MasterRow row) { return activate_row(std::move(row)) >= 0; }

void Master::ensure_z_var(int commodity) {
    if (z_var_.count(commodity)) return;
    double w = opt_.alpha * inst_.od[commodity].demand;
    double lo = 0.0;
    if (commodity < static_cast<int>(opt_.z_lower.size()))
        lo = std::max(0.0, opt_.z_lower[commodity]);
    z_var_[commodity] = lp_.add_variable(w, lo, SimplexLp::kInf);
}

int Master::add_flow_cut(FlowCut cut) {
    ensure_z_var(cut.commodity);
    int lp_row = lp_.add_row(LpSense::ge, cut.rhs);
    lp_.add_coef(lp_row, z_var_[cut.commodity], 1.0);
    cuts_.push_back(std::move(cut));
    cut_row_lp_.push_back(lp_row);
    const FlowCut& c = cuts_.back();
    for (size_t idx = 0; idx < cols_.size(); ++idx) {
        double a = cut_coef(c, cols_[idx]);
        if (a != 0.0) lp_.add_coef(lp_row, col_var_[idx], a);
    }
    return static_cast<int>(cuts_.size()) - 1;
}

int Master::scan_pool_class(RowKind kind, const std::vector<WindowTerm>& proto, int wlen) {
    const int T = inst_.params.period;
    std::vector<double> hist(T, 0.0);
    bool any = false;
    for (size_t idx = 0; idx < cols_.size(); ++idx) {
        double x = last_.x.empty() ? 0.0 : last_.x[col_var_[idx]];
        if (x <= kXTol || cols_[idx].dummy) continue;
        for (const TrackEvent& e : cols_[idx].events)
            for (const WindowTerm& t : proto)
                if (term_matches_class(t, e)) {
                    hist[e.time] += x;
                    any = true;
                    break;
                }
    }
    if (!any) return 0;

    std::vector<double> wsum(T, 0.0);
    double s = 0.0;
    for (int d = 0; d < wlen && d < T; ++d) s += hist[d];
    for (int w0 = 0; w0 < T; ++w0) {
        wsum[w0] = s;
        s -= hist[w0];
        s += hist[(w0 + wlen) % T];
    }

    std::vector<int> anchors;
    double best = 0.0;
    int best_w0 = -1;
    for (int w0 = 0; w0 < T; ++w0) {
        if (wsum[w0] <= 1.0 + kViolTol) continue;
        if (wsum[w0] > best) {
            best = wsum[w0];
            best_w0 = w0;
        }
        double prev = wsum[(w0 + T - 1) % T];
        double next = wsum[(w0 + 1) % T];
        if (wsum[w0] >= prev && wsum[w0] >= next && (wsum[w0] > prev || wsum[w0] > next))
            anchors.push_back(w0);
    }
    if (anchors.empty() && best_w0 >= 0) anchors.push_back(best_w0);

    int added = 0;
    for (int w0 : anchors) {
        MasterRow row;
        row.kind = kind;
        row.rhs = 1.0;
        row.terms = proto;
        for (WindowTerm& t : row.terms) {
            t.w0 = w0;
            t.wlen = wlen;
        }
        if (activate_row(std::move(row)) >= 0) ++added;
    }
    return added;
}

int Master::activate_violated_pool_rows() {
    int added = 0;
    for (const PoolClass& pc : pool_) added += scan_pool_class(pc.kind, pc.proto, pc.wlen);
    return added;
}

LpSummary Master::solve_lp() {
    LpSummary sum;
    for (;;) {
        LpResult res = lp_.solve();
        if (res.status == LpStatus::iteration_limit && !lp_.interrupt_fired()) {
            if (std::getenv("TT_LOG"))
                std::fprintf(stderr,
                             "[master] lp retry: %d iterations at %d rows, %d vars\n",
                             res.iterations, lp_.num_rows(), lp_.num_vars());
            int cap = 3 * (2000 + 200 * lp_.num_rows() + 20 * lp_.num_vars());
            res = lp_.solve(cap);
        }
        if (res.status != LpStatus::optimal) {
            // Interrupted by the caller's deadline, or numerically dead even
            // after the in-solver cold restart.  Hand the status back instead
            // of throwing; the search layer treats the node as a dead end.
            sum.lp_iterations += res.iterations;
            sum.status = res.status;
            return sum;
        }
        sum.lp_iterations += res.iterations;
        ++sum.activation_rounds;
        last_ = std::move(res);
        last_obj_ = last_.objective;
        if (opt_.lazy_headways) break;
        int n = activate_violated_pool_rows();
        if (n == 0) break;
        sum.rows_activated += n;
    }
    sum.status = LpStatus::optimal;
    sum.objective = last_obj_;
    return sum;
}

double Master::column_value(int idx) const {
    if (last_.x.empty()) return 0.0;
    return last_.x[col_var_[idx]];
}

double Master::z_value(int commodity) const {
    auto it = z_var_.find(commodity);
    if (it == z_var_.end() || last_.x.empty()) return 0.0;
    return last_.x[it->second];
}

bool Master::dummy_active(double tol) const {
    for (int idx : dummy_col_)
        if (column_value(idx) > tol) return true;
    return false;
}

int Master::active_row_count() const {
    return static_cast<int>(active_rows_.size() + cuts_.size()) +
           static_cast<int>(cover_row_.size());
}

int Master::rows_of_kind(RowKind k) const {
    if (k == RowKind::cover) return static_cast<int>(cover_row_.size());
    int n = 0;
    for (const MasterRow& r : active_rows_)
        if (r.kind == k) ++n;
    return n;
}

DualSnapshot Master::duals() const {
    DualSnapshot d;
    d.cover.resize(cover_row_.size(), 0.0);
    if (last_.duals.empty()) return d;
    for (size_t l = 0; l < cover_row_.size(); ++l) d.cover[l] = last_.duals[cover_row_[l]];
    for (size_t i = 0; i < active_rows_.size(); ++i) {
        double y = last_.duals[active_row_lp_[i]];
        if (y > 1e-12 || y < -1e-12) d.rows.push_back({y, &active_rows_[i]});
    }
    for (size_t i = 0; i < cuts_.size(); ++i) {
        double y = last_.duals[cut_row_lp_[i]];
        if (y > 1e-12 || y < -1e-12) d.cuts.push_back({y, &cuts_[i]});
    }
    return d;
}

std::unordered_map<int, double> Master::node_usage(int line) const {
    std::unordered_map<int, double> usage;
    for (int idx : line_cols_[line]) {
        if (cols_[idx].dummy) continue;
        double x = column_value(idx);
        if (x <= kXTol) continue;
        for (int node : cols_[idx].path) usage[node] += x;
    }
    return usage;
}

void Master::reset_column_bounds() {
    for (size_t idx = 0; idx < cols_.size(); ++idx)
        if (!cols_[idx].dummy) lp_.set_bounds(col_var_[idx], 0.0, SimplexLp::kInf);
}

int Master::compact_rows(double keep_tol) {
    if (last_.x.empty() || active_rows_.empty()) return 0;
    std::vector<double> sl = lp_.row_slacks();
    std::vector<char> drop(lp_.num_rows(), 0);
    for (size_t i = 0; i < active_rows_.size(); ++i) {
        int lr = active_row_lp_[i];
        if (lr < static_cast<int>(sl.size()) && sl[lr] > keep_tol) drop[lr] = 1;
    }

    // In-place removal keeps the warm basis (columns, bounds, and states all
    // survive); only what the solver actually removed leaves the bookkeeping.
    std::vector<int> rmap = lp_.drop_rows(drop);

    std::deque<MasterRow> rows;
    std::vector<int> new_lp;
    int dropped = 0;
    row_sigs_.clear();
    for (size_t i = 0; i < active_rows_.size(); ++i) {
        int nr = rmap[active_row_lp_[i]];
        if (nr < 0) {
            ++dropped;
            continue;
        }
        new_lp.push_back(nr);
        row_sigs_[row_signature(active_rows_[i])] = static_cast<int>(rows.size());
        rows.push_back(std::move(active_rows_[i]));
    }
    active_rows_ = std::move(rows);
    active_row_lp_ = std::move(new_lp);
    for (int& r : cover_row_) r = rmap[r];
    for (int& r : cut_row_lp_) r = rmap[r];
    return dropped;
}

void Master::restrict_line_to_node(int line, int layer, int node) {
    for (int idx : line_cols_[line]) {
        if (cols_[idx].dummy) continue;
        if (cols_[idx].path[layer] != node) lp_.set_bounds(col_var_[idx], 0.0, 0.0);
    }
}

void Master::restrict_line_to_path(int line, const std::vector<int>& path) {
    for (int idx : line_cols_[line]) {
        if (cols_[idx].dummy) continue;
        if (cols_[idx].path != path) lp_.set_bounds(col_var_[idx], 0.0, 0.0);
    }
}

std::optional<std::vector<int>> Master::integral_columns(double tol) const {
    std::vector<int> pick(line_cols_.size(), -1);
    for (size_t l = 0; l < line_cols_.size(); ++l) {
        for (int idx : line_cols_[l]) {
            double x = column_value(idx);
            if (x <= tol) continue;
            if (cols_[idx].dummy) return std::nullopt;
            if (x < 1.0 - 1e-4) return std::nullopt;  // fractional
            if (pick[l] >= 0) return std::nullopt;
            pick[l] = idx;
        }
        if (pick[l] < 0) return std::nullopt;
    }
    return pick;
}

std::optional<TimetableSolution> Master::extract_integral(double tol) const {
    auto pick = integral_columns(tol);
    if (!pick) return std::nullopt;
    TimetableSolution sol;
    for (size_t l = 0; l < line_cols_.size(); ++l) {
        auto trains = decode_path(inst_, graphs_[l], cols_[(*pick)[l]].path);
        for (TrainPath& tp : trains) {
            sol.path_length += tp.duration;
            sol.trains.push_back(std::move(tp));
        }
    }
    return sol;
}

}  // namespace takt
