#include "takt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace takt {

namespace {
// Dual feasibility tolerance.  Must sit above the noise the eta updates leave
// in y between refactorizations, or pricing chases phantom reduced costs
// around degenerate plateaus without ever proving optimality.
constexpr double kPriceTol = 1e-7;
constexpr double kRatioTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kPivotTol = 1e-10;
}  // namespace

// Dense refactorization costs O(m^3); an eta update costs O(m^2) per pivot.
// Spacing refactorizations ~m pivots apart keeps the amortized cost per pivot
// at O(m^2) while still bounding rounding drift in binv_.
int SimplexLp::refactor_interval() const {
    int m = num_rows();
    return std::clamp(m, 64, 512);
}

int SimplexLp::new_internal(double cost, double lo, double up) {
    vars_.push_back({cost, lo, up, {}});
    state_.push_back(at_lower);
    return static_cast<int>(vars_.size()) - 1;
}

int SimplexLp::add_variable(double cost, double lo, double up) {
    int iv = new_internal(cost, lo, up);
    user_vars_.push_back(iv);
    return static_cast<int>(user_vars_.size()) - 1;
}

int SimplexLp::add_row(LpSense sense, double rhs) {
    bool flip = rhs < 0.0;
    if (flip) {
        rhs = -rhs;
        if (sense == LpSense::le)
            sense = LpSense::ge;
        else if (sense == LpSense::ge)
            sense = LpSense::le;
    }
    int row = static_cast<int>(rhs_.size());
    rhs_.push_back(rhs);
    sense_.push_back(sense);
    flipped_.push_back(flip ? 1 : 0);

    int slack = -1, art = -1;
    if (sense == LpSense::le) {
        slack = new_internal(0.0, 0.0, kInf);
        vars_[slack].col.push_back({row, 1.0});
    } else if (sense == LpSense::ge) {
        slack = new_internal(0.0, 0.0, kInf);  // surplus
        vars_[slack].col.push_back({row, -1.0});
        art = new_internal(0.0, 0.0, 0.0);
        vars_[art].col.push_back({row, 1.0});
    } else {
        art = new_internal(0.0, 0.0, 0.0);
        vars_[art].col.push_back({row, 1.0});
    }
    slack_of_.push_back(slack);
    art_of_.push_back(art);
    invalidate();
    return row;
}

void SimplexLp::add_coef(int row, int var, double a) {
    int iv = user_vars_.at(var);
    if (flipped_[row]) a = -a;
    vars_[iv].col.push_back({row, a});
    if (state_[iv] == basic) invalidate();
}

void SimplexLp::set_cost(int var, double cost) { vars_[user_vars_.at(var)].cost = cost; }

void SimplexLp::set_bounds(int var, double lo, double up) {
    int iv = user_vars_.at(var);
    vars_[iv].lo = lo;
    vars_[iv].up = up;
    if (state_[iv] == at_upper && up == kInf) state_[iv] = at_lower;
}

double SimplexLp::variable_cost(int var) const { return vars_[user_vars_.at(var)].cost; }

std::pair<double, double> SimplexLp::variable_bounds(int var) const {
    const Internal& v = vars_[user_vars_.at(var)];
    return {v.lo, v.up};
}

void SimplexLp::invalidate() {
    warm_ok_ = false;
    binv_valid_ = false;
}

bool SimplexLp::refactorize() {
    binv_valid_ = false;
    int m = num_rows();
    std::vector<double> B(static_cast<size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k)
        for (auto [r, a] : vars_[basis_[k]].col) B[static_cast<size_t>(r) * m + k] += a;

    binv_.assign(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) binv_[static_cast<size_t>(i) * m + i] = 1.0;

    // Gauss-Jordan with partial pivoting; binv_ accumulates B^-1.
    for (int col = 0; col < m; ++col) {
        int piv = col;
        double best = std::fabs(B[static_cast<size_t>(col) * m + col]);
        for (int i = col + 1; i < m; ++i) {
            double v = std::fabs(B[static_cast<size_t>(i) * m + col]);
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best < kPivotTol) return false;
        if (piv != col) {
            for (int j = 0; j < m; ++j) {
                std::swap(B[static_cast<size_t>(piv) * m + j],
                          B[static_cast<size_t>(col) * m + j]);
                std::swap(binv_[static_cast<size_t>(piv) * m + j],
                          binv_[static_cast<size_t>(col) * m + j]);
            }
        }
        double inv = 1.0 / B[static_cast<size_t>(col) * m + col];
        for (int j = 0; j < m; ++j) {
            B[static_cast<size_t>(col) * m + j] *= inv;
            binv_[static_cast<size_t>(col) * m + j] *= inv;
        }
        for (int i = 0; i < m; ++i) {
            if (i == col) continue;
            double f = B[static_cast<size_t>(i) * m + col];
            if (f == 0.0) continue;
            for (int j = 0; j < m; ++j) {
                B[static_cast<size_t>(i) * m + j] -= f * B[static_cast<size_t>(col) * m + j];
                binv_[static_cast<size_t>(i) * m + j] -=
                    f * binv_[static_cast<size_t>(col) * m + j];
            }
        }
    }
    pivots_since_factor_ = 0;
    binv_valid_ = true;
    return true;
}

void SimplexLp::compute_basic_values() {
    int m = num_rows();
    std::vector<double> eff(rhs_);
    std::vector<char> in_basis(vars_.size(), 0);
    for (int k = 0; k < m; ++k) in_basis[basis_[k]] = 1;
    for (size_t v = 0; v < vars_.size(); ++v) {
        if (in_basis[v]) continue;
        double xv = state_[v] == at_upper ? vars_[v].up : vars_[v].lo;
        if (xv == 0.0) continue;
        for (auto [r, a] : vars_[v].col) eff[r] -= a * xv;
    }
    xb_.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += binv_[static_cast<size_t>(i) * m + j] * eff[j];
        xb_[i] = s;
    }
}

bool SimplexLp::basis_feasible() const {
    for (int k = 0; k < num_rows(); ++k) {
        const Internal& v = vars_[basis_[k]];
        if (xb_[k] < v.lo - kFeasTol || xb_[k] > v.up + kFeasTol) return false;
    }
    return true;
}

void SimplexLp::cold_start_basis() {
    int m = num_rows();
    basis_.assign(m, -1);
    for (auto& st : state_) st = at_lower;
    for (int i = 0; i < m; ++i) {
        if (art_of_[i] >= 0) {
            vars_[art_of_[i]].up = kInf;  // opened for phase 1
            basis_[i] = art_of_[i];
        } else {
            basis_[i] = slack_of_[i];
        }
        state_[basis_[i]] = basic;
    }
}

double SimplexLp::reduced_cost(const std::vector<double>& y, int v,
                               const std::vector<double>& cost) const {
    double d = cost[v];
    for (auto [r, a] : vars_[v].col) d -= y[r] * a;
    return d;
}

// After a bound move strands basic values outside their ranges, drive just
// those variables back instead of restarting two-phase from scratch.  Each
// violated bound is relaxed away and the true bound re-imposed from the other
// side ([lo,up] -> [-inf,lo] for a value below lo), so minimizing +-1 costs on
// the violators is exactly "minimize total violation" and the ratio test parks
// them on the true bound without overshooting.
bool SimplexLp::repair_basis(int max_iterations, int& iters) {
    int m = num_rows();
    std::vector<double> cost(vars_.size(), 0.0);
    struct Saved {
        int v;
        double lo, up;
        char below;  // value was below lo (else above up)
    };
    std::vector<Saved> saved;
    for (int k = 0; k < m; ++k) {
        int v = basis_[k];
        Internal& bv = vars_[v];
        if (xb_[k] < bv.lo - kFeasTol) {
            saved.push_back({v, bv.lo, bv.up, 1});
            bv.up = bv.lo;
            bv.lo = -kInf;
            cost[v] = -1.0;
        } else if (xb_[k] > bv.up + kFeasTol) {
            saved.push_back({v, bv.lo, bv.up, 0});
            bv.lo = bv.up;
            bv.up = kInf;
            cost[v] = 1.0;
        }
    }
    if (saved.empty()) return true;

    LpStatus st = run(cost, max_iterations, iters);

    for (const Saved& s : saved) {
        vars_[s.v].lo = s.lo;
        vars_[s.v].up = s.up;
        if (state_[s.v] == basic) continue;
        // A violator that left the basis parked on its temporary bound, whose
        // value equals the true bound it was pushed toward.
        state_[s.v] = s.below ? at_lower : at_upper;
    }
    if (st != LpStatus::optimal) return false;
    for (int k = 0; k < m; ++k) {
        const Internal& bv = vars_[basis_[k]];
        if (xb_[k] < bv.lo - kFeasTol || xb_[k] > bv.up + kFeasTol) return false;
    }
    return true;
}

LpStatus SimplexLp::run(const std::vector<double>& cost, int max_iterations, int& iters) {
    int m = num_rows();
    std::vector<double> y(m), w(m);
    std::vector<int> cand;
    bool scramble = false;
    bool y_fresh = false;

    const bool log = std::getenv("TT_LOG") != nullptr;
    int win = 0, win_degen = 0, win_scram = 0;
    auto objective_now = [&] {
        double z = 0.0;
        for (size_t v = 0; v < vars_.size(); ++v) {
            if (state_[v] == basic || cost[v] == 0.0) continue;
            z += cost[v] * (state_[v] == at_upper ? vars_[v].up : vars_[v].lo);
        }
        for (int k = 0; k < m; ++k) z += cost[basis_[k]] * xb_[k];
        return z;
    };

    // Stall detection by objective progress, not by step sizes: a degenerate
    // crawl can consist of theta ~ 1e-8 moves that a consecutive-zero-step
    // counter never notices.  Escalation per stalled window: refresh the
    // factorization (dual noise can manufacture a stall), then force a
    // minimum ratio-test step so variables stop parking exactly on bounds
    // and the tie structure of the degenerate vertex dissolves, then also
    // scramble the entering choice.  Everything resets once progress
    // resumes; the tiny infeasibilities the forced steps leave behind are
    // swept up by the feasibility check after the run.
    const int stall_window = 500 + 2 * m;
    int since_check = 0;
    bool tried_refresh = false;
    bool step_floor = false;
    double z_at_check = std::numeric_limits<double>::infinity();

    for (;;) {
        if (iters >= max_iterations) return LpStatus::iteration_limit;
        if (interrupt_ && (iters & 511) == 0 && interrupt_()) {
            interrupt_fired_ = true;
            return LpStatus::iteration_limit;
        }
        if (pivots_since_factor_ >= refactor_interval()) {
            if (!refactorize()) return LpStatus::iteration_limit;
            compute_basic_values();
            y_fresh = false;
        }

        if (!y_fresh) {
            // Full BTRAN; afterwards a basis change updates y in O(m) via the
            // leaving row of the new inverse, so this runs only after a
            // refactorization.
            for (int i = 0; i < m; ++i) {
                double s = 0.0;
                for (int k = 0; k < m; ++k)
                    s += cost[basis_[k]] * binv_[static_cast<size_t>(k) * m + i];
                y[i] = s;
            }
            y_fresh = true;
        }

        int enter = -1;
        double enter_d = 0.0;
        if (!scramble) {
            double best = kPriceTol;
            for (size_t v = 0; v < vars_.size(); ++v) {
                if (state_[v] == basic) continue;
                if (vars_[v].up - vars_[v].lo < kPivotTol) continue;  // fixed
                double d = reduced_cost(y, v, cost);
                double score = state_[v] == at_lower ? -d : d;
                if (score <= best) continue;
                best = score;
                enter = static_cast<int>(v);
                enter_d = d;
            }
        } else {
            // Long degenerate stretches under steepest-reduced-cost pricing
            // mean the rule keeps steering into the same stalled corner, and
            // first-index (Bland) rules crawl for tens of thousands of
            // pivots.  A hash-picked improving candidate breaks the pattern
            // in a handful of pivots and stays deterministic.
            cand.clear();
            for (size_t v = 0; v < vars_.size(); ++v) {
                if (state_[v] == basic) continue;
                if (vars_[v].up - vars_[v].lo < kPivotTol) continue;
                double d = reduced_cost(y, v, cost);
                double score = state_[v] == at_lower ? -d : d;
                if (score > kPriceTol) cand.push_back(static_cast<int>(v));
            }
            if (!cand.empty()) {
                uint64_t h = static_cast<uint64_t>(iters) * 0x9E3779B97F4A7C15ull;
                h ^= h >> 31;
                h *= 0x94D049BB133111EBull;
                h ^= h >> 29;
                enter = cand[h % cand.size()];
                enter_d = reduced_cost(y, enter, cost);
            }
        }
        if (enter < 0) {
            // Only trust an optimality claim made against a long eta chain
            // after refreshing the factorization; stale y can hide a genuine
            // candidate just as easily as it invents phantom ones.  A short
            // chain leaves dual noise orders of magnitude below the pricing
            // tolerance, so re-verifying it would only burn the O(m^3).
            if (pivots_since_factor_ > refactor_interval() / 8) {
                if (!refactorize()) return LpStatus::iteration_limit;
                compute_basic_values();
                y_fresh = false;
                continue;
            }
            return LpStatus::optimal;
        }

        double sigma = state_[enter] == at_lower ? 1.0 : -1.0;
        std::fill(w.begin(), w.end(), 0.0);
        for (auto [r, a] : vars_[enter].col)
            for (int i = 0; i < m; ++i) w[i] += binv_[static_cast<size_t>(i) * m + r] * a;

        // Harris two-pass ratio test.  Pass 1 finds the step admissible when
        // every bound is relaxed by the feasibility tolerance; pass 2 picks,
        // among rows whose true limit fits under it, the largest |pivot|
        // (smallest basis index under Bland).  Degenerate pivots then land on
        // numerically solid rows instead of whatever ties first, which keeps
        // the eta-updated inverse from decaying into singularity.
        double flip_limit = vars_[enter].up - vars_[enter].lo;
        double relaxed = flip_limit;
        for (int k = 0; k < m; ++k) {
            double delta = -sigma * w[k];  // change of xb_[k] per unit step
            const Internal& bv = vars_[basis_[k]];
            double lim;
            if (delta < -kRatioTol) {
                lim = (xb_[k] - bv.lo + kFeasTol) / (-delta);
            } else if (delta > kRatioTol && bv.up < kInf) {
                lim = (bv.up - xb_[k] + kFeasTol) / delta;
            } else {
                continue;
            }
            if (lim < relaxed) relaxed = lim;
        }
        if (relaxed == kInf) return LpStatus::unbounded;

        int leave = -1;
        double leave_mag = 0.0;
        char leave_to = 0;  // 0 lower, 1 upper
        double theta = flip_limit;
        for (int k = 0; k < m; ++k) {
            double delta = -sigma * w[k];
            const Internal& bv = vars_[basis_[k]];
            double limit;
            char to;
            if (delta < -kRatioTol) {
                limit = (xb_[k] - bv.lo) / (-delta);
                to = 0;
            } else if (delta > kRatioTol && bv.up < kInf) {
                limit = (bv.up - xb_[k]) / delta;
                to = 1;
            } else {
                continue;
            }
            if (limit < 0.0) limit = 0.0;
            if (limit > relaxed) continue;
            double mag = std::fabs(w[k]);
            if (mag > leave_mag) {
                leave = k;
                leave_mag = mag;
                leave_to = to;
                theta = limit;
            }
        }

        ++iters;
        if (++since_check >= stall_window) {
            double z = objective_now();
            if (z > z_at_check - 1e-7 * (1.0 + std::fabs(z_at_check))) {
                if (!tried_refresh)
                    tried_refresh = true, pivots_since_factor_ = refactor_interval();
                else if (!step_floor)
                    step_floor = true;
                else
                    scramble = true;
            } else {
                scramble = false;
                step_floor = false;
                tried_refresh = false;
            }
            z_at_check = z;
            since_check = 0;
        }
        if (log) {
            win_degen += theta <= 1e-9;
            win_scram += scramble;
            if (++win == 20000) {
                std::fprintf(stderr, "[lp] it=%d z=%.8g degen=%d scram=%d\n", iters,
                             objective_now(), win_degen, win_scram);
                win = win_degen = win_scram = 0;
            }
        }

        if (leave < 0) {
            // Entering variable swings to its other bound; basis unchanged.
            theta = flip_limit;
            for (int k = 0; k < m; ++k) xb_[k] -= sigma * w[k] * theta;
            state_[enter] = state_[enter] == at_lower ? at_upper : at_lower;
            continue;
        }

        // The leaving variable still snaps to its bound, so the overshoot
        // lands as an invisible (and tolerably tiny) infeasibility on the
        // other basics instead of as a zero-length step.
        if (step_floor && theta < 1e-9) theta = std::min(1e-9, flip_limit);

        double enter_val = state_[enter] == at_lower ? vars_[enter].lo + theta
                                                     : vars_[enter].up - theta;
        for (int k = 0; k < m; ++k) xb_[k] -= sigma * w[k] * theta;
        int out_var = basis_[leave];
        state_[out_var] = leave_to ? at_upper : at_lower;
        basis_[leave] = enter;
        state_[enter] = basic;
        xb_[leave] = enter_val;

        double pivot = w[leave];
        if (std::fabs(pivot) < kPivotTol) {
            if (!refactorize()) return LpStatus::iteration_limit;
            compute_basic_values();
            y_fresh = false;
            continue;
        }
        double* prow = &binv_[static_cast<size_t>(leave) * m];
        double inv = 1.0 / pivot;
        for (int j = 0; j < m; ++j) prow[j] *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            double f = w[i];
            if (f == 0.0) continue;
            double* row = &binv_[static_cast<size_t>(i) * m];
            for (int j = 0; j < m; ++j) row[j] -= f * prow[j];
        }
        // Dual update: y' = y + d_q * (row r of the new inverse) zeroes the
        // entering variable's reduced cost and keeps every other basic
        // reduced cost at zero.  prow already carries the 1/pivot scaling.
        for (int i = 0; i < m; ++i) y[i] += enter_d * prow[i];
        ++pivots_since_factor_;
    }
}

std::vector<int> SimplexLp::drop_rows(const std::vector<char>& drop_req) {
    int m = num_rows();
    std::vector<int> rmap(m);
    for (int r = 0; r < m; ++r) rmap[r] = r;
    if (!warm_ok_ || static_cast<int>(basis_.size()) != m) return rmap;

    std::vector<char> drop(m, 0);
    std::vector<char> erase_var(vars_.size(), 0);
    bool any = false;
    for (int r = 0; r < m && r < static_cast<int>(drop_req.size()); ++r) {
        if (!drop_req[r]) continue;
        int s = slack_of_[r];
        int a = art_of_[r];
        if (s < 0 || state_[s] != basic) continue;
        if (a >= 0 && state_[a] == basic) continue;
        drop[r] = 1;
        erase_var[s] = 1;
        if (a >= 0) erase_var[a] = 1;
        any = true;
    }
    if (!any) return rmap;

    int nr = 0;
    for (int r = 0; r < m; ++r) rmap[r] = drop[r] ? -1 : nr++;
    std::vector<int> vmap(vars_.size(), -1);
    int nv = 0;
    for (size_t v = 0; v < vars_.size(); ++v)
        if (!erase_var[v]) vmap[v] = nv++;

    std::vector<Internal> nvars;
    std::vector<VarState> nstate;
    nvars.reserve(nv);
    nstate.reserve(nv);
    for (size_t v = 0; v < vars_.size(); ++v) {
        if (erase_var[v]) continue;
        Internal iv = std::move(vars_[v]);
        size_t w = 0;
        for (auto [r, a] : iv.col)
            if (!drop[r]) iv.col[w++] = {rmap[r], a};
        iv.col.resize(w);
        nvars.push_back(std::move(iv));
        nstate.push_back(state_[v]);
    }
    vars_ = std::move(nvars);
    state_ = std::move(nstate);
    for (int& uv : user_vars_) uv = vmap[uv];

    auto compact_rows_of = [&](auto& arr) {
        int w = 0;
        for (int r = 0; r < m; ++r)
            if (!drop[r]) arr[w++] = arr[r];
        arr.resize(w);
    };
    compact_rows_of(rhs_);
    compact_rows_of(sense_);
    compact_rows_of(flipped_);
    compact_rows_of(slack_of_);
    compact_rows_of(art_of_);
    for (int& s : slack_of_)
        if (s >= 0) s = vmap[s];
    for (int& a : art_of_)
        if (a >= 0) a = vmap[a];

    // Each removed row takes exactly one basic variable (its slack) with it,
    // so the surviving basis stays square; its columns restricted to the kept
    // rows stay independent because every removed slack column was a distinct
    // unit vector on a removed row.
    std::vector<int> nbasis;
    nbasis.reserve(nr);
    for (int v : basis_)
        if (vmap[v] >= 0) nbasis.push_back(vmap[v]);
    basis_ = std::move(nbasis);
    if (static_cast<int>(basis_.size()) != nr) {
        invalidate();  // defensive: should be unreachable
    } else {
        xb_.assign(nr, 0.0);
        binv_valid_ = false;
    }
    return rmap;
}

std::vector<double> SimplexLp::row_slacks() const {
    std::vector<double> out(num_rows(), 0.0);
    std::vector<int> pos(vars_.size(), -1);
    for (size_t k = 0; k < basis_.size(); ++k) pos[basis_[k]] = static_cast<int>(k);
    for (int r = 0; r < num_rows(); ++r) {
        int s = slack_of_[r];
        if (s < 0) continue;
        if (state_[s] == basic) {
            int k = pos[s];
            out[r] = k >= 0 && k < static_cast<int>(xb_.size()) ? xb_[k] : 0.0;
        } else {
            out[r] = state_[s] == at_upper ? vars_[s].up : vars_[s].lo;
        }
    }
    return out;
}

LpResult SimplexLp::solve(int max_iterations) {
    LpResult res;
    interrupt_fired_ = false;
    int m = num_rows();
    if (max_iterations <= 0)
        max_iterations = 2000 + 200 * m + 20 * static_cast<int>(vars_.size());

    if (m == 0) {
        res.status = LpStatus::optimal;
        res.x.resize(user_vars_.size());
        for (size_t u = 0; u < user_vars_.size(); ++u) {
            const Internal& v = vars_[user_vars_[u]];
            res.x[u] = state_[user_vars_[u]] == at_upper ? v.up : v.lo;
            res.objective += v.cost * res.x[u];
        }
        return res;
    }

    std::vector<double> cost(vars_.size());
    for (size_t v = 0; v < vars_.size(); ++v) cost[v] = vars_[v].cost;

    // A run that stops on iteration_limit long before the cap means the
    // factorization broke down numerically; one restart from a fresh
    // artificial basis recovers, anything beyond that is a real failure.
    const bool log = std::getenv("TT_LOG") != nullptr;
    auto stage = [&](const char* name, int before) {
        if (log && res.iterations - before > 20000)
            std::fprintf(stderr, "[lp] %s: %d pivots (m=%d n=%zu)\n", name,
                         res.iterations - before, m, vars_.size());
    };

    LpStatus st = LpStatus::iteration_limit;
    for (int attempt = 0; attempt < 2 && st != LpStatus::optimal; ++attempt) {
        bool need_cold = attempt > 0 || !warm_ok_;
        if (!need_cold && !binv_valid_ && !refactorize()) need_cold = true;
        if (!need_cold) {
            compute_basic_values();
            if (!basis_feasible()) {
                int it0 = res.iterations;
                if (!repair_basis(max_iterations, res.iterations)) need_cold = true;
                stage("repair", it0);
            }
        }

        if (need_cold) {
            cold_start_basis();
            if (!refactorize()) {
                res.status = LpStatus::iteration_limit;
                return res;
            }
            compute_basic_values();
            std::vector<double> phase1(vars_.size(), 0.0);
            for (int i = 0; i < m; ++i)
                if (art_of_[i] >= 0) phase1[art_of_[i]] = 1.0;
            int it1 = res.iterations;
            st = run(phase1, max_iterations, res.iterations);
            stage("phase1", it1);
            if (st != LpStatus::optimal && st != LpStatus::unbounded) {
                if (st == LpStatus::iteration_limit && res.iterations < max_iterations &&
                    !interrupt_fired_ && attempt == 0)
                    continue;
                res.status = st;
                warm_ok_ = false;
                return res;
            }
            double art_sum = 0.0;
            for (int i = 0; i < m; ++i) {
                int av = art_of_[i];
                if (av < 0) continue;
                if (state_[av] == basic) {
                    for (int k = 0; k < m; ++k)
                        if (basis_[k] == av) art_sum += std::fabs(xb_[k]);
                } else if (state_[av] == at_upper) {
                    art_sum += vars_[av].up;
                }
                vars_[av].up = 0.0;  // locked again after phase 1
                if (state_[av] != basic) state_[av] = at_lower;
            }
            if (art_sum > 1e-6) {
                res.status = LpStatus::infeasible;
                warm_ok_ = false;
                return res;
            }
        }

        int it2 = res.iterations;
        st = run(cost, max_iterations, res.iterations);
        stage("phase2", it2);
        if (st == LpStatus::iteration_limit &&
            (res.iterations >= max_iterations || interrupt_fired_))
            break;
    }
    // The relaxed ratio test and forced stall steps both let basic values
    // drift a hair past their bounds; re-derive the point and repair before
    // reporting it as optimal.
    for (int round = 0; st == LpStatus::optimal && round < 2; ++round) {
        compute_basic_values();
        if (basis_feasible()) break;
        if (!repair_basis(max_iterations, res.iterations)) {
            st = LpStatus::iteration_limit;
            break;
        }
        int it4 = res.iterations;
        st = run(cost, max_iterations, res.iterations);
        stage("sweep", it4);
    }
    if (st == LpStatus::optimal && !basis_feasible()) st = LpStatus::iteration_limit;
    res.status = st;
    if (st != LpStatus::optimal) {
        warm_ok_ = false;
        return res;
    }
    warm_ok_ = true;

    std::vector<double> xfull(vars_.size());
    for (size_t v = 0; v < vars_.size(); ++v)
        xfull[v] = state_[v] == at_upper ? vars_[v].up : vars_[v].lo;
    for (int k = 0; k < m; ++k) xfull[basis_[k]] = xb_[k];

    res.x.resize(user_vars_.size());
    for (size_t u = 0; u < user_vars_.size(); ++u) {
        res.x[u] = xfull[user_vars_[u]];
        res.objective += vars_[user_vars_[u]].cost * res.x[u];
    }
    res.duals.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += cost[basis_[k]] * binv_[static_cast<size_t>(k) * m + i];
        res.duals[i] = flipped_[i] ? -s : s;
    }
    return res;
}

}  // namespace takt
