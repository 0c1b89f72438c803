#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qca/laur.hpp"
#include "qca/module.hpp"
#include "qca/params.hpp"

namespace qca {

enum class Status { Holds, HoldsModKernel, HoldsWithErratum, Fails, Inconclusive };

inline const char *status_str(Status s) {
    switch (s) {
    case Status::Holds: return "holds";
    case Status::HoldsModKernel: return "holds-mod-kernel";
    case Status::HoldsWithErratum: return "holds-with-erratum";
    case Status::Fails: return "fails";
    case Status::Inconclusive: return "inconclusive-truncation";
    }
    return "?";
}

struct CheckReport {
    std::string id;
    Status status = Status::Holds;
    std::string witness; // present iff status == Fails
    std::string note;
    std::map<std::string, std::string> params;
    int minimal_N = -1;
    int n_instances = 0;
    int n_holds = 0;
    int n_inconclusive = 0;
};

/*
 * Inspecting a computed difference: `nonzero` means a reliably computed
 * coefficient differs (a genuine counterexample); `uncertain` means the value
 * passed through the overflow bucket or a degree cap, so only an inconclusive
 * verdict is allowed. An uncertain coefficient never counts as nonzero.
 */
struct DiffView {
    bool nonzero = false;
    bool uncertain = false;
    std::string where; // location of the first reliable nonzero
    std::string value;
};

inline void probe_diff(const HSeries &v, int hmod, DiffView &d, const std::string &at) {
    if (!v.is_zero_mod(hmod) && !d.nonzero) {
        d.nonzero = true;
        d.where = at;
        d.value = v.truncated(hmod).str();
    }
}

template <typename Idx>
void probe_diff(const SparseVec<Idx> &v, int hmod, DiffView &d, const std::string &at) {
    if (v.ovf) {
        d.uncertain = true;
        return;
    }
    for (const auto &[i, x] : v.c) {
        if (d.nonzero) break;
        probe_diff(x, hmod, d, at + " @basis " + idx_str(i));
    }
}

template <typename C>
void probe_diff(const ParamPoly<C> &p, int hmod, DiffView &d, const std::string &at) {
    if (p.clipped()) d.uncertain = true;
    for (const auto &[m, v] : p.terms()) {
        std::string loc = at;
        for (int q = 0; q < NPARAMS; ++q)
            if (m[static_cast<size_t>(q)] > 0)
                loc += std::string(" ") + param_name(q) + "^" + std::to_string(m[static_cast<size_t>(q)]);
        DiffView sub;
        probe_diff(v, hmod, sub, loc);
        if (sub.uncertain) d.uncertain = true;
        if (sub.nonzero && !d.nonzero) {
            d.nonzero = true;
            d.where = sub.where;
            d.value = sub.value;
        }
    }
}

template <int K, typename C>
void probe_diff(const Laur<K, C> &f, int hmod, DiffView &d, const std::string &at) {
    for (const auto &[e, v] : f.terms()) {
        std::string loc = at;
        for (int ax = 0; ax < K; ++ax)
            if (e[static_cast<size_t>(ax)] != 0)
                loc += std::string(" ") + f.var(ax) + "^" + std::to_string(e[static_cast<size_t>(ax)]);
        DiffView sub;
        probe_diff(v, hmod, sub, loc);
        if (sub.uncertain) d.uncertain = true;
        if (sub.nonzero && !d.nonzero) {
            d.nonzero = true;
            d.where = sub.where;
            d.value = sub.value;
        }
    }
}

// Accumulates per-instance verdicts into one report, in deterministic order:
// any reliable counterexample wins, otherwise inconclusive instances are
// counted and the remaining conclusive ones must all hold.
class CheckAccum {
  public:
    explicit CheckAccum(std::string id) { rep_.id = std::move(id); }

    template <typename T> void instance(const T &diff, int hmod, const std::string &label) {
        DiffView d;
        probe_diff(diff, hmod, d, "");
        instance_view(d, label);
    }

    void instance_view(const DiffView &d, const std::string &label) {
        ++rep_.n_instances;
        if (d.uncertain) {
            ++rep_.n_inconclusive;
            return;
        }
        if (d.nonzero) {
            if (rep_.status != Status::Fails) {
                rep_.status = Status::Fails;
                rep_.witness = label + ":" + d.where + " = " + d.value;
            }
            return;
        }
        ++rep_.n_holds;
    }

    void holds_instance() {
        ++rep_.n_instances;
        ++rep_.n_holds;
    }
    void inconclusive_instance() {
        ++rep_.n_instances;
        ++rep_.n_inconclusive;
    }
    void fail_instance(const std::string &witness) {
        ++rep_.n_instances;
        if (rep_.status != Status::Fails) {
            rep_.status = Status::Fails;
            rep_.witness = witness;
        }
    }

    bool failed() const { return rep_.status == Status::Fails; }

    CheckReport finish() {
        if (rep_.status != Status::Fails) {
            if (rep_.n_instances > 0 && rep_.n_inconclusive == rep_.n_instances)
                rep_.status = Status::Inconclusive;
            else
                rep_.status = Status::Holds;
        }
        return rep_;
    }

    CheckReport &raw() { return rep_; }

  private:
    CheckReport rep_;
};

inline std::string report_line(const CheckReport &r) {
    std::ostringstream os;
    os << r.id << ": " << status_str(r.status);
    if (r.minimal_N >= 0) os << " (N=" << r.minimal_N << ")";
    os << " [" << r.n_holds << "/" << r.n_instances << " conclusive";
    if (r.n_inconclusive) os << ", " << r.n_inconclusive << " inconclusive";
    os << "]";
    if (!r.witness.empty()) os << " witness: " << r.witness;
    if (!r.note.empty()) os << " note: " << r.note;
    return os.str();
}

} // namespace qca
