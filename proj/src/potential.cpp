#include "dynjt/potential.hpp"

#include <algorithm>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dynjt {
namespace {

constexpr std::size_t kMaxCells = std::size_t{1} << 28;

// outputs at least this large go through OpenMP
constexpr std::size_t kParallelThreshold = std::size_t{1} << 14;

std::size_t checked_cells(const std::vector<int>& cards) {
    std::size_t cells = 1;
    for (int c : cards) {
        if (c < 1) throw std::invalid_argument("cardinality must be positive");
        cells *= static_cast<std::size_t>(c);
        if (cells > kMaxCells) throw std::length_error("potential exceeds the cell limit");
    }
    return cells;
}

// stride of each frame variable inside pot; 0 when the variable is absent
std::vector<std::size_t> strides_in(const Potential& pot, const std::vector<VarId>& frame) {
    const auto& scope = pot.scope();
    const auto& cards = pot.cards();
    std::vector<std::size_t> own(scope.size(), 1);
    for (int k = static_cast<int>(scope.size()) - 2; k >= 0; --k)
        own[static_cast<std::size_t>(k)] =
            own[static_cast<std::size_t>(k) + 1] * static_cast<std::size_t>(cards[static_cast<std::size_t>(k) + 1]);
    std::vector<std::size_t> strides(frame.size(), 0);
    for (std::size_t f = 0; f < frame.size(); ++f) {
        const int pos = pot.position_of(frame[f]);
        if (pos >= 0) strides[f] = own[static_cast<std::size_t>(pos)];
    }
    return strides;
}

void decode_digits(std::size_t index, const std::vector<int>& cards, std::vector<int>& digits) {
    digits.assign(cards.size(), 0);
    for (int k = static_cast<int>(cards.size()) - 1; k >= 0; --k) {
        const auto c = static_cast<std::size_t>(cards[static_cast<std::size_t>(k)]);
        digits[static_cast<std::size_t>(k)] = static_cast<int>(index % c);
        index /= c;
    }
}

// odometer walk over [begin, end) of the result frame, multiplying aligned
// cells of p and q
void multiply_walk(const double* pv, const double* qv, const std::vector<int>& cards,
                   const std::vector<std::size_t>& ps, const std::vector<std::size_t>& qs,
                   double* out, std::size_t begin, std::size_t end) {
    const int nd = static_cast<int>(cards.size());
    std::vector<int> digits;
    decode_digits(begin, cards, digits);
    std::size_t ip = 0, iq = 0;
    for (int k = 0; k < nd; ++k) {
        ip += static_cast<std::size_t>(digits[static_cast<std::size_t>(k)]) * ps[static_cast<std::size_t>(k)];
        iq += static_cast<std::size_t>(digits[static_cast<std::size_t>(k)]) * qs[static_cast<std::size_t>(k)];
    }
    for (std::size_t i = begin; i < end; ++i) {
        out[i] = pv[ip] * qv[iq];
        for (int d = nd - 1; d >= 0; --d) {
            const auto du = static_cast<std::size_t>(d);
            ++digits[du];
            ip += ps[du];
            iq += qs[du];
            if (digits[du] < cards[du]) break;
            digits[du] = 0;
            ip -= static_cast<std::size_t>(cards[du]) * ps[du];
            iq -= static_cast<std::size_t>(cards[du]) * qs[du];
        }
    }
}

// gather walk: one output cell per kept instantiation, summed over the
// eliminated variables in a fixed mixed-radix order (ascending source index,
// the same order the scatter reference accumulates in)
void gather_walk(const double* pv, const std::vector<int>& kcards, const std::vector<std::size_t>& kstr,
                 const std::vector<int>& ecards, const std::vector<std::size_t>& estr, double* out,
                 std::size_t begin, std::size_t end) {
    const int nk = static_cast<int>(kcards.size());
    const int ne = static_cast<int>(ecards.size());
    std::vector<int> kd;
    decode_digits(begin, kcards, kd);
    std::size_t base = 0;
    for (int k = 0; k < nk; ++k)
        base += static_cast<std::size_t>(kd[static_cast<std::size_t>(k)]) * kstr[static_cast<std::size_t>(k)];
    std::vector<int> ed(static_cast<std::size_t>(ne));
    for (std::size_t i = begin; i < end; ++i) {
        std::fill(ed.begin(), ed.end(), 0);
        std::size_t off = 0;
        double acc = pv[base];
        for (;;) {
            int d = ne - 1;
            for (; d >= 0; --d) {
                const auto du = static_cast<std::size_t>(d);
                ++ed[du];
                off += estr[du];
                if (ed[du] < ecards[du]) break;
                ed[du] = 0;
                off -= static_cast<std::size_t>(ecards[du]) * estr[du];
            }
            if (d < 0) break;
            acc += pv[base + off];
        }
        out[i] = acc;
        for (int d = nk - 1; d >= 0; --d) {
            const auto du = static_cast<std::size_t>(d);
            ++kd[du];
            base += kstr[du];
            if (kd[du] < kcards[du]) break;
            kd[du] = 0;
            base -= static_cast<std::size_t>(kcards[du]) * kstr[du];
        }
    }
}

template <typename Walk>
void run_chunked(std::size_t cells, Walk&& walk) {
#ifdef _OPENMP
    if (cells >= kParallelThreshold && !omp_in_parallel()) {
#pragma omp parallel
        {
            const auto nt = static_cast<std::size_t>(omp_get_num_threads());
            const auto ti = static_cast<std::size_t>(omp_get_thread_num());
            const std::size_t chunk = (cells + nt - 1) / nt;
            const std::size_t b = std::min(cells, chunk * ti);
            const std::size_t e = std::min(cells, b + chunk);
            if (b < e) walk(b, e);
        }
        return;
    }
#endif
    walk(std::size_t{0}, cells);
}

void check_keep(const Potential& p, const std::vector<VarId>& keep) {
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (!p.has(keep[i])) throw std::invalid_argument("marginalize: variable not in scope");
        for (std::size_t j = i + 1; j < keep.size(); ++j)
            if (keep[i] == keep[j]) throw std::invalid_argument("marginalize: duplicate variable in keep");
    }
}

}  // namespace

Potential::Potential(std::vector<VarId> scope, std::vector<int> cards, std::vector<double> values)
    : scope_(std::move(scope)), cards_(std::move(cards)), values_(std::move(values)) {
    if (scope_.size() != cards_.size())
        throw std::invalid_argument("scope and cardinalities differ in length");
    for (std::size_t i = 0; i < scope_.size(); ++i)
        for (std::size_t j = i + 1; j < scope_.size(); ++j)
            if (scope_[i] == scope_[j]) throw std::invalid_argument("duplicate variable in scope");
    if (values_.size() != checked_cells(cards_))
        throw std::invalid_argument("value table does not match the scope cardinalities");
}

int Potential::position_of(VarId v) const {
    for (std::size_t k = 0; k < scope_.size(); ++k)
        if (scope_[k] == v) return static_cast<int>(k);
    return -1;
}

double Potential::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

Potential unit_potential() { return Potential(); }

Potential from_cpt(const Cpt& cpt, const BeliefNetwork& net) {
    std::vector<VarId> scope = cpt.parents;
    scope.push_back(cpt.child);
    std::vector<int> cards;
    cards.reserve(scope.size());
    for (VarId v : scope) cards.push_back(net.cardinality(v));
    return Potential(std::move(scope), std::move(cards), cpt.table);
}

Potential multiply(const Potential& p, const Potential& q, OpCounter& counter) {
    std::vector<VarId> scope = p.scope();
    std::vector<int> cards = p.cards();
    for (std::size_t k = 0; k < q.scope().size(); ++k)
        if (!p.has(q.scope()[k])) {
            scope.push_back(q.scope()[k]);
            cards.push_back(q.cards()[k]);
        }
    const std::size_t cells = checked_cells(cards);
    const auto ps = strides_in(p, scope);
    const auto qs = strides_in(q, scope);
    std::vector<double> out(cells);
    run_chunked(cells, [&](std::size_t b, std::size_t e) {
        multiply_walk(p.values().data(), q.values().data(), cards, ps, qs, out.data(), b, e);
    });
    counter.multiplications += cells;
    return Potential(std::move(scope), std::move(cards), std::move(out));
}

Potential marginalize(const Potential& p, const std::vector<VarId>& keep, OpCounter& counter) {
    check_keep(p, keep);
    std::vector<int> kcards(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
        kcards[i] = p.cards()[static_cast<std::size_t>(p.position_of(keep[i]))];
    std::vector<VarId> elim;
    std::vector<int> ecards;
    for (std::size_t k = 0; k < p.scope().size(); ++k) {
        if (std::find(keep.begin(), keep.end(), p.scope()[k]) == keep.end()) {
            elim.push_back(p.scope()[k]);
            ecards.push_back(p.cards()[k]);
        }
    }
    const std::size_t outCells = checked_cells(kcards);
    const auto kstr = strides_in(p, keep);
    const auto estr = strides_in(p, elim);
    std::vector<double> out(outCells);
    run_chunked(outCells, [&](std::size_t b, std::size_t e) {
        gather_walk(p.values().data(), kcards, kstr, ecards, estr, out.data(), b, e);
    });
    counter.additions += p.size() - outCells;
    return Potential(keep, std::move(kcards), std::move(out));
}

Potential reduce_evidence(const Potential& p, VarId var, int state, OpCounter& counter) {
    const int pos = p.position_of(var);
    if (pos < 0) throw std::invalid_argument("reduce_evidence: variable not in scope");
    const int card = p.cards()[static_cast<std::size_t>(pos)];
    if (state < 0 || state >= card) throw std::out_of_range("reduce_evidence: state out of range");
    std::size_t stride = 1;
    for (std::size_t k = static_cast<std::size_t>(pos) + 1; k < p.cards().size(); ++k)
        stride *= static_cast<std::size_t>(p.cards()[k]);
    std::vector<double> out(p.size(), 0.0);
    const std::size_t block = stride * static_cast<std::size_t>(card);
    const double* pv = p.values().data();
    for (std::size_t b = static_cast<std::size_t>(state) * stride; b < p.size(); b += block)
        std::copy(pv + b, pv + b + stride, out.begin() + static_cast<std::ptrdiff_t>(b));
    counter.multiplications += p.size();
    return Potential(p.scope(), p.cards(), std::move(out));
}

std::pair<Potential, double> normalize(const Potential& p) {
    const double s = p.sum();
    if (s <= 0.0) throw ZeroEvidenceError();
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p.values()[i] / s;
    return {Potential(p.scope(), p.cards(), std::move(out)), s};
}

namespace ref {

Potential multiply(const Potential& p, const Potential& q, OpCounter& counter) {
    std::vector<VarId> scope = p.scope();
    std::vector<int> cards = p.cards();
    for (std::size_t k = 0; k < q.scope().size(); ++k)
        if (!p.has(q.scope()[k])) {
            scope.push_back(q.scope()[k]);
            cards.push_back(q.cards()[k]);
        }
    const std::size_t cells = checked_cells(cards);
    const auto ps = strides_in(p, scope);
    const auto qs = strides_in(q, scope);
    const int nd = static_cast<int>(cards.size());
    std::vector<double> out(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        std::size_t rem = i, ip = 0, iq = 0;
        for (int k = nd - 1; k >= 0; --k) {
            const auto ku = static_cast<std::size_t>(k);
            const auto d = rem % static_cast<std::size_t>(cards[ku]);
            rem /= static_cast<std::size_t>(cards[ku]);
            ip += d * ps[ku];
            iq += d * qs[ku];
        }
        out[i] = p.values()[ip] * q.values()[iq];
    }
    counter.multiplications += cells;
    return Potential(std::move(scope), std::move(cards), std::move(out));
}

Potential marginalize(const Potential& p, const std::vector<VarId>& keep, OpCounter& counter) {
    check_keep(p, keep);
    std::vector<int> kcards(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
        kcards[i] = p.cards()[static_cast<std::size_t>(p.position_of(keep[i]))];
    const std::size_t outCells = checked_cells(kcards);

    // scatter form: walk the source once, accumulate into the kept projection
    std::vector<std::size_t> ostr(keep.size(), 1);
    for (int k = static_cast<int>(keep.size()) - 2; k >= 0; --k)
        ostr[static_cast<std::size_t>(k)] =
            ostr[static_cast<std::size_t>(k) + 1] * static_cast<std::size_t>(kcards[static_cast<std::size_t>(k) + 1]);
    std::vector<int> keepPos(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) keepPos[i] = p.position_of(keep[i]);

    const auto& cards = p.cards();
    std::vector<double> out(outCells, 0.0);
    std::vector<int> digits;
    for (std::size_t i = 0; i < p.size(); ++i) {
        decode_digits(i, cards, digits);
        std::size_t oidx = 0;
        for (std::size_t k = 0; k < keep.size(); ++k)
            oidx += static_cast<std::size_t>(digits[static_cast<std::size_t>(keepPos[k])]) * ostr[k];
        out[oidx] += p.values()[i];
    }
    counter.additions += p.size() - outCells;
    return Potential(keep, std::move(kcards), std::move(out));
}

}  // namespace ref

}  // namespace dynjt
