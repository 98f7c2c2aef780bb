#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "cnf.hpp"
#include "errors.hpp"

namespace sortnet {

// Conflict-driven clause-learning solver backing the embedded solve mode.
// Textbook architecture: two watched literals, first-UIP learning with basic
// clause minimization, activity-ordered decisions with phase saving, Luby
// restarts, and periodic deletion of unhelpful learnt clauses. It is meant
// for the moderate formulas this library produces, not for competition use.
//
// The formula passed to the constructor must outlive the solver; satisfying
// assignments are checked against it before they are reported.
class CdclSolver {
public:
    explicit CdclSolver(const CnfFormula& formula) : formula_(formula) {
        nv_ = formula.num_vars();
        assigns_.assign(nv_, 0);
        level_.assign(nv_, 0);
        reason_.assign(nv_, kNoRef);
        activity_.assign(nv_, 0.0);
        polarity_.assign(nv_, 0);
        seen_.assign(nv_, 0);
        heap_pos_.assign(nv_, -1);
        watches_.assign(static_cast<std::size_t>(2) * nv_, {});
        for (int v = nv_ - 1; v >= 0; --v)
            heap_insert(v);
        load_clauses();
    }

    // Runs the search. A non-positive time limit means no limit.
    SolverStatus solve(double time_limit_seconds = 0.0) {
        deadline_active_ = time_limit_seconds > 0.0;
        if (deadline_active_)
            deadline_ = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(time_limit_seconds));
        if (!ok_)
            return SolverStatus::Unsat;
        if (propagate() != kNoRef)
            return ok_ = false, SolverStatus::Unsat;

        int restart_number = 0;
        while (true) {
            const std::uint64_t restart_budget = 128 * luby(restart_number++);
            const SolverStatus status = search(restart_budget);
            if (status != SolverStatus::Unknown || out_of_time_)
                return status;
        }
    }

    // model()[v] is the value of external variable v after a Sat result.
    const std::vector<std::uint8_t>& model() const { return model_; }

    // Level-0 propagation fixpoint as external literals, or nothing if the
    // formula is already conflicting at the root.
    std::optional<std::vector<Lit>> root_implied() {
        if (!ok_ || propagate() != kNoRef)
            return std::nullopt;
        std::vector<Lit> out;
        out.reserve(trail_.size());
        for (const std::uint32_t il : trail_)
            out.push_back(to_external(il));
        return out;
    }

    std::uint64_t conflicts() const { return conflicts_; }

private:
    using CRef = std::uint32_t;
    static constexpr CRef kNoRef = std::numeric_limits<CRef>::max();

    struct Watcher {
        CRef cref;
        std::uint32_t blocker;
    };

    // --- literal plumbing ------------------------------------------------
    // Internal literal: 2*var_index + sign, sign 1 = negated.
    static std::uint32_t internal(Lit l) {
        return 2u * static_cast<std::uint32_t>(lit_var(l) - 1) + (l < 0 ? 1u : 0u);
    }
    static Lit to_external(std::uint32_t il) {
        const Lit v = static_cast<Lit>((il >> 1) + 1);
        return (il & 1u) ? -v : v;
    }
    // +1 true, -1 false, 0 unassigned.
    int lit_value(std::uint32_t il) const {
        const int av = assigns_[il >> 1];
        return (il & 1u) ? -av : av;
    }

    // --- clause arena -----------------------------------------------------
    // Layout: [size][flags][lit...]; flags bit0 = learnt, upper bits = LBD.
    std::uint32_t cl_size(CRef c) const { return arena_[c]; }
    bool cl_learnt(CRef c) const { return arena_[c + 1] & 1u; }
    std::uint32_t cl_lbd(CRef c) const { return arena_[c + 1] >> 1; }
    void cl_set_lbd(CRef c, std::uint32_t lbd) { arena_[c + 1] = (lbd << 1) | (arena_[c + 1] & 1u); }
    std::uint32_t* cl_lits(CRef c) { return arena_.data() + c + 2; }
    const std::uint32_t* cl_lits(CRef c) const { return arena_.data() + c + 2; }

    CRef alloc_clause(const std::vector<std::uint32_t>& lits, bool learnt, std::uint32_t lbd) {
        const CRef c = static_cast<CRef>(arena_.size());
        arena_.push_back(static_cast<std::uint32_t>(lits.size()));
        arena_.push_back((lbd << 1) | (learnt ? 1u : 0u));
        arena_.insert(arena_.end(), lits.begin(), lits.end());
        return c;
    }

    void attach(CRef c) {
        const std::uint32_t* lits = cl_lits(c);
        watches_[lits[0]].push_back({c, lits[1]});
        watches_[lits[1]].push_back({c, lits[0]});
    }

    void detach(CRef c) {
        const std::uint32_t* lits = cl_lits(c);
        for (int w = 0; w < 2; ++w) {
            auto& list = watches_[lits[w]];
            for (std::size_t idx = 0; idx < list.size(); ++idx) {
                if (list[idx].cref == c) {
                    list[idx] = list.back();
                    list.pop_back();
                    break;
                }
            }
        }
    }

    // --- loading ----------------------------------------------------------
    void load_clauses() {
        std::vector<std::uint32_t> lits;
        for (std::size_t idx = 0; idx < formula_.clause_count() && ok_; ++idx) {
            lits.clear();
            for (const Lit l : formula_.clause(idx))
                lits.push_back(internal(l));
            std::sort(lits.begin(), lits.end());
            lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
            bool tautology = false;
            for (std::size_t x = 0; x + 1 < lits.size(); ++x)
                if ((lits[x] ^ 1u) == lits[x + 1])
                    tautology = true;
            if (tautology)
                continue;
            if (lits.empty()) {
                ok_ = false;
            } else if (lits.size() == 1) {
                const int val = lit_value(lits[0]);
                if (val < 0)
                    ok_ = false;
                else if (val == 0)
                    enqueue(lits[0], kNoRef);
            } else {
                attach(alloc_clause(lits, false, 0));
            }
        }
    }

    // --- trail ------------------------------------------------------------
    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    void enqueue(std::uint32_t il, CRef from) {
        const std::uint32_t vi = il >> 1;
        assigns_[vi] = (il & 1u) ? -1 : 1;
        level_[vi] = decision_level();
        reason_[vi] = from;
        trail_.push_back(il);
    }

    void cancel_until(int lvl) {
        if (decision_level() <= lvl)
            return;
        const std::size_t bound = trail_lim_[static_cast<std::size_t>(lvl)];
        for (std::size_t idx = trail_.size(); idx-- > bound;) {
            const std::uint32_t vi = trail_[idx] >> 1;
            polarity_[vi] = assigns_[vi] > 0 ? 1 : 0;
            assigns_[vi] = 0;
            reason_[vi] = kNoRef;
            if (heap_pos_[vi] < 0)
                heap_insert(static_cast<int>(vi));
        }
        trail_.resize(bound);
        trail_lim_.resize(static_cast<std::size_t>(lvl));
        qhead_ = trail_.size();
    }

    // --- propagation ------------------------------------------------------
    CRef propagate() {
        CRef conflict = kNoRef;
        while (qhead_ < trail_.size()) {
            const std::uint32_t p = trail_[qhead_++];
            ++propagations_;
            const std::uint32_t false_lit = p ^ 1u;
            auto& list = watches_[false_lit];
            std::size_t keep = 0;
            std::size_t idx = 0;
            for (; idx < list.size(); ++idx) {
                const Watcher w = list[idx];
                if (lit_value(w.blocker) > 0) {
                    list[keep++] = w;
                    continue;
                }
                const CRef c = w.cref;
                std::uint32_t* lits = cl_lits(c);
                if (lits[0] == false_lit)
                    std::swap(lits[0], lits[1]);
                const std::uint32_t first = lits[0];
                if (first != w.blocker && lit_value(first) > 0) {
                    list[keep++] = {c, first};
                    continue;
                }
                const std::uint32_t size = cl_size(c);
                bool moved = false;
                for (std::uint32_t k = 2; k < size; ++k) {
                    if (lit_value(lits[k]) >= 0) {
                        std::swap(lits[1], lits[k]);
                        watches_[lits[1]].push_back({c, first});
                        moved = true;
                        break;
                    }
                }
                if (moved)
                    continue;
                if (lit_value(first) < 0) {
                    conflict = c;
                    qhead_ = trail_.size();
                    for (; idx < list.size(); ++idx)
                        list[keep++] = list[idx];
                    break;
                }
                list[keep++] = {c, first};
                enqueue(first, c);
            }
            list.resize(keep);
            if (conflict != kNoRef)
                break;
        }
        return conflict;
    }

    // --- conflict analysis --------------------------------------------------
    void bump_var(std::uint32_t vi) {
        activity_[vi] += var_inc_;
        if (activity_[vi] > 1e100) {
            for (double& a : activity_)
                a *= 1e-100;
            var_inc_ *= 1e-100;
        }
        if (heap_pos_[vi] >= 0)
            heap_up(heap_pos_[vi]);
    }

    // First-UIP learning. Returns the backtrack level; the learnt clause is
    // left in learnt_ with the asserting literal first.
    int analyze(CRef conflict) {
        learnt_.clear();
        learnt_.push_back(0); // room for the asserting literal
        int path = 0;
        std::uint32_t p = std::numeric_limits<std::uint32_t>::max();
        std::size_t index = trail_.size();

        CRef c = conflict;
        while (true) {
            const std::uint32_t size = cl_size(c);
            const std::uint32_t* lits = cl_lits(c);
            const std::uint32_t start = (p == std::numeric_limits<std::uint32_t>::max()) ? 0 : 1;
            for (std::uint32_t k = start; k < size; ++k) {
                const std::uint32_t q = lits[k];
                const std::uint32_t vi = q >> 1;
                if (!seen_[vi] && level_[vi] > 0) {
                    seen_[vi] = 1;
                    bump_var(vi);
                    if (level_[vi] >= decision_level())
                        ++path;
                    else
                        learnt_.push_back(q);
                }
            }
            while (!seen_[trail_[index - 1] >> 1])
                --index;
            p = trail_[--index];
            seen_[p >> 1] = 0;
            --path;
            if (path == 0)
                break;
            c = reason_[p >> 1];
        }
        learnt_[0] = p ^ 1u;

        // Cheap minimization: drop literals implied by the rest of the clause
        // through their own reason clause. Every literal of the original
        // clause needs its seen flag cleared afterwards, including removed
        // ones.
        to_clear_ = learnt_;
        std::size_t kept = 1;
        for (std::size_t x = 1; x < learnt_.size(); ++x) {
            const std::uint32_t vi = learnt_[x] >> 1;
            const CRef r = reason_[vi];
            bool redundant = r != kNoRef;
            if (redundant) {
                const std::uint32_t rsize = cl_size(r);
                const std::uint32_t* rlits = cl_lits(r);
                for (std::uint32_t k = 1; k < rsize && redundant; ++k) {
                    const std::uint32_t rvi = rlits[k] >> 1;
                    if (!seen_[rvi] && level_[rvi] > 0)
                        redundant = false;
                }
            }
            if (!redundant)
                learnt_[kept++] = learnt_[x];
        }
        learnt_.resize(kept);

        int bt_level = 0;
        if (learnt_.size() > 1) {
            std::size_t max_at = 1;
            for (std::size_t x = 2; x < learnt_.size(); ++x)
                if (level_[learnt_[x] >> 1] > level_[learnt_[max_at] >> 1])
                    max_at = x;
            std::swap(learnt_[1], learnt_[max_at]);
            bt_level = level_[learnt_[1] >> 1];
        }

        for (const std::uint32_t q : to_clear_)
            seen_[q >> 1] = 0;
        return bt_level;
    }

    // LBD of the pending learnt clause; call before backtracking so the
    // levels are still the conflict-time ones.
    std::uint32_t compute_lbd() {
        ++lbd_stamp_counter_;
        if (lbd_stamp_.size() < static_cast<std::size_t>(nv_) + 2)
            lbd_stamp_.assign(static_cast<std::size_t>(nv_) + 2, 0);
        std::uint32_t lbd = 0;
        for (const std::uint32_t q : learnt_) {
            const int lvl = level_[q >> 1];
            if (lbd_stamp_[static_cast<std::size_t>(lvl)] != lbd_stamp_counter_) {
                lbd_stamp_[static_cast<std::size_t>(lvl)] = lbd_stamp_counter_;
                ++lbd;
            }
        }
        return lbd;
    }

    // --- decision heuristic -------------------------------------------------
    void heap_insert(int vi) {
        heap_pos_[static_cast<std::uint32_t>(vi)] = static_cast<int>(heap_.size());
        heap_.push_back(vi);
        heap_up(heap_pos_[static_cast<std::uint32_t>(vi)]);
    }

    void heap_up(int pos) {
        const int vi = heap_[static_cast<std::size_t>(pos)];
        while (pos > 0) {
            const int parent = (pos - 1) / 2;
            if (activity_[static_cast<std::uint32_t>(heap_[static_cast<std::size_t>(parent)])] >=
                activity_[static_cast<std::uint32_t>(vi)])
                break;
            heap_[static_cast<std::size_t>(pos)] = heap_[static_cast<std::size_t>(parent)];
            heap_pos_[static_cast<std::uint32_t>(heap_[static_cast<std::size_t>(pos)])] = pos;
            pos = parent;
        }
        heap_[static_cast<std::size_t>(pos)] = vi;
        heap_pos_[static_cast<std::uint32_t>(vi)] = pos;
    }

    void heap_down(int pos) {
        const int size = static_cast<int>(heap_.size());
        const int vi = heap_[static_cast<std::size_t>(pos)];
        while (true) {
            int child = 2 * pos + 1;
            if (child >= size)
                break;
            if (child + 1 < size &&
                activity_[static_cast<std::uint32_t>(heap_[static_cast<std::size_t>(child + 1)])] >
                    activity_[static_cast<std::uint32_t>(heap_[static_cast<std::size_t>(child)])])
                ++child;
            if (activity_[static_cast<std::uint32_t>(heap_[static_cast<std::size_t>(child)])] <=
                activity_[static_cast<std::uint32_t>(vi)])
                break;
            heap_[static_cast<std::size_t>(pos)] = heap_[static_cast<std::size_t>(child)];
            heap_pos_[static_cast<std::uint32_t>(heap_[static_cast<std::size_t>(pos)])] = pos;
            pos = child;
        }
        heap_[static_cast<std::size_t>(pos)] = vi;
        heap_pos_[static_cast<std::uint32_t>(vi)] = pos;
    }

    int pop_unassigned() {
        while (!heap_.empty()) {
            const int vi = heap_[0];
            const int last = heap_.back();
            heap_.pop_back();
            heap_pos_[static_cast<std::uint32_t>(vi)] = -1;
            if (!heap_.empty()) {
                heap_[0] = last;
                heap_pos_[static_cast<std::uint32_t>(last)] = 0;
                heap_down(0);
            }
            if (assigns_[static_cast<std::uint32_t>(vi)] == 0)
                return vi;
        }
        return -1;
    }

    // --- learnt clause management --------------------------------------------
    void reduce_learnts() {
        std::sort(learnts_.begin(), learnts_.end(), [this](CRef a, CRef b) {
            if (cl_lbd(a) != cl_lbd(b))
                return cl_lbd(a) > cl_lbd(b);
            return cl_size(a) > cl_size(b);
        });
        const std::size_t target = learnts_.size() / 2;
        std::size_t removed = 0;
        std::size_t kept = 0;
        for (std::size_t x = 0; x < learnts_.size(); ++x) {
            const CRef c = learnts_[x];
            const bool locked = reason_[cl_lits(c)[0] >> 1] == c && lit_value(cl_lits(c)[0]) > 0;
            if (removed < target && !locked && cl_lbd(c) > 2 && cl_size(c) > 2) {
                detach(c);
                ++removed;
            } else {
                learnts_[kept++] = c;
            }
        }
        learnts_.resize(kept);
    }

    // --- search ---------------------------------------------------------------
    bool out_of_time() {
        if (!deadline_active_)
            return false;
        return std::chrono::steady_clock::now() >= deadline_;
    }

    SolverStatus search(std::uint64_t conflict_budget) {
        std::uint64_t local_conflicts = 0;
        while (true) {
            const CRef conflict = propagate();
            if (conflict != kNoRef) {
                ++conflicts_;
                ++local_conflicts;
                if (decision_level() == 0) {
                    ok_ = false;
                    return SolverStatus::Unsat;
                }
                const int bt = analyze(conflict);
                const std::uint32_t lbd = compute_lbd();
                cancel_until(bt);
                if (learnt_.size() == 1) {
                    enqueue(learnt_[0], kNoRef);
                } else {
                    const CRef c = alloc_clause(learnt_, true, lbd);
                    learnts_.push_back(c);
                    attach(c);
                    enqueue(learnt_[0], c);
                }
                var_inc_ /= 0.95;
                if (conflicts_ >= next_reduce_) {
                    reduce_learnts();
                    ++reduce_count_;
                    next_reduce_ = conflicts_ + 2000 + 500 * reduce_count_;
                }
                if ((conflicts_ & 1023u) == 0 && out_of_time()) {
                    out_of_time_ = true;
                    cancel_until(0);
                    return SolverStatus::Unknown;
                }
                if (local_conflicts >= conflict_budget) {
                    cancel_until(0);
                    return SolverStatus::Unknown; // restart
                }
            } else {
                if ((++decisions_ & 8191u) == 0 && out_of_time()) {
                    out_of_time_ = true;
                    cancel_until(0);
                    return SolverStatus::Unknown;
                }
                const int vi = pop_unassigned();
                if (vi < 0) {
                    build_model();
                    cancel_until(0);
                    return SolverStatus::Sat;
                }
                trail_lim_.push_back(trail_.size());
                enqueue(2u * static_cast<std::uint32_t>(vi) + (polarity_[static_cast<std::uint32_t>(vi)] ? 0u : 1u),
                        kNoRef);
            }
        }
    }

    void build_model() {
        model_.assign(static_cast<std::size_t>(nv_) + 1, 0);
        for (int v = 1; v <= nv_; ++v)
            model_[static_cast<std::size_t>(v)] = assigns_[static_cast<std::uint32_t>(v - 1)] > 0 ? 1 : 0;
        // Guard against watcher bookkeeping bugs: the reported model must
        // satisfy every original clause.
        for (std::size_t idx = 0; idx < formula_.clause_count(); ++idx) {
            bool satisfied = false;
            for (const Lit l : formula_.clause(idx)) {
                const bool val = model_[static_cast<std::size_t>(lit_var(l))] != 0;
                if (val == lit_positive(l)) {
                    satisfied = true;
                    break;
                }
            }
            if (!satisfied)
                throw integrity_error("embedded solver produced a non-model");
        }
    }

    static std::uint64_t luby(int x) {
        // Finite subsequences of the Luby sequence: 1 1 2 1 1 2 4 ...
        int size = 1;
        int seq = 0;
        while (size < x + 1) {
            ++seq;
            size = 2 * size + 1;
        }
        while (size - 1 != x) {
            size = (size - 1) / 2;
            --seq;
            x = x % size;
        }
        return std::uint64_t{1} << seq;
    }

    // --- state ------------------------------------------------------------
    const CnfFormula& formula_;
    int nv_ = 0;
    bool ok_ = true;
    bool deadline_active_ = false;
    bool out_of_time_ = false;
    std::chrono::steady_clock::time_point deadline_{};

    std::vector<std::uint32_t> arena_;
    std::vector<std::vector<Watcher>> watches_;
    std::vector<CRef> learnts_;

    std::vector<std::int8_t> assigns_;
    std::vector<int> level_;
    std::vector<CRef> reason_;
    std::vector<std::uint32_t> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_ = 0;

    std::vector<double> activity_;
    double var_inc_ = 1.0;
    std::vector<std::uint8_t> polarity_;
    std::vector<std::uint8_t> seen_;
    std::vector<int> heap_;
    std::vector<int> heap_pos_;

    std::vector<std::uint32_t> learnt_;
    std::vector<std::uint32_t> to_clear_;
    std::vector<std::uint64_t> lbd_stamp_;
    std::uint64_t lbd_stamp_counter_ = 0;

    std::uint64_t conflicts_ = 0;
    std::uint64_t decisions_ = 0;
    std::uint64_t propagations_ = 0;
    std::uint64_t next_reduce_ = 2000;
    std::uint64_t reduce_count_ = 0;

    std::vector<std::uint8_t> model_;
};

} // namespace sortnet
