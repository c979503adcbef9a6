#include "kv2vect/chain.hpp"

#include <stdexcept>
#include <string>

namespace kvt::kv {

using lin::ExactScalar;
using lin::Matrix;
using lin::ScalarMode;

Chain make_chain(KVObject src, std::vector<KVOneMor> atoms) {
    KVObject at = src;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!(atoms[i].src == at))
            throw std::invalid_argument(
                "chain: atom " + std::to_string(i) + " expects rank " +
                std::to_string(atoms[i].src.rank) + ", chain is at rank " +
                std::to_string(at.rank));
        at = atoms[i].tgt;
    }
    return {src, std::move(atoms)};
}

KVObject chain_object_at(const Chain& ch, std::size_t cut) {
    if (cut > ch.atoms.size())
        throw std::invalid_argument("chain cut " + std::to_string(cut) +
                                    " past end " +
                                    std::to_string(ch.atoms.size()));
    return cut == 0 ? ch.src : ch.atoms[cut - 1].tgt;
}

KVObject chain_tgt(const Chain& ch) {
    return chain_object_at(ch, ch.atoms.size());
}

KVOneMor chain_composite(const Chain& ch) {
    KVOneMor acc = id1(ch.src);
    for (std::size_t i = 0; i < ch.atoms.size(); ++i)
        acc = i == 0 ? ch.atoms[0] : compose1(ch.atoms[i], acc);
    return acc;
}

ChainIndexer::ChainIndexer(Chain ch, std::size_t source_cell)
    : chain_(std::move(ch)), s_(source_cell) {
    if (s_ >= chain_.src.rank)
        throw std::invalid_argument("chain indexer: source cell out of range");
    N_.resize(chain_.atoms.size() + 1);
    N_[0].assign(chain_.src.rank, 0);
    N_[0][s_] = 1;
    for (std::size_t i = 0; i < chain_.atoms.size(); ++i) {
        const KVOneMor& a = chain_.atoms[i];
        N_[i + 1].assign(a.tgt.rank, 0);
        for (std::size_t t = 0; t < a.tgt.rank; ++t)
            for (std::size_t c = 0; c < a.src.rank; ++c)
                N_[i + 1][t] += a.dims[t][c] * N_[i][c];
    }
}

std::size_t ChainIndexer::dim(std::size_t target_cell) const {
    if (target_cell >= N_.back().size())
        throw std::invalid_argument("chain indexer: target cell out of range");
    return N_.back()[target_cell];
}

std::size_t ChainIndexer::rank(const ChainTuple& t) const {
    const std::size_t k = chain_.atoms.size();
    if (t.cvec.size() != k + 1 || t.uvec.size() != k)
        throw std::logic_error("chain tuple has wrong arity");
    if (t.cvec[0] != s_)
        throw std::logic_error("chain tuple starts at the wrong cell");
    std::size_t r = 0;
    for (std::size_t ii = k; ii-- > 0;) {
        const KVOneMor& a = chain_.atoms[ii];
        const std::size_t tgt = t.cvec[ii + 1], c = t.cvec[ii];
        if (tgt >= a.tgt.rank || c >= a.src.rank)
            throw std::logic_error("chain tuple cell out of range at atom " +
                                   std::to_string(ii));
        if (t.uvec[ii] >= a.dims[tgt][c] || N_[ii][c] == 0)
            throw std::logic_error("chain tuple index out of range at atom " +
                                   std::to_string(ii));
        std::size_t off = 0;
        for (std::size_t cp = 0; cp < c; ++cp)
            off += a.dims[tgt][cp] * N_[ii][cp];
        r += off + t.uvec[ii] * N_[ii][c];
    }
    return r;
}

ChainTuple ChainIndexer::unrank(std::size_t target_cell, std::size_t r) const {
    const std::size_t k = chain_.atoms.size();
    if (r >= dim(target_cell))
        throw std::logic_error("chain unrank index out of range");
    ChainTuple t;
    t.cvec.assign(k + 1, 0);
    t.uvec.assign(k, 0);
    t.cvec[0] = s_;
    t.cvec[k] = target_cell;
    for (std::size_t ii = k; ii-- > 0;) {
        const KVOneMor& a = chain_.atoms[ii];
        const std::size_t tgt = t.cvec[ii + 1];
        std::size_t c = 0, acc = 0;
        for (;; ++c) {
            std::size_t w = a.dims[tgt][c] * N_[ii][c];
            if (r < acc + w) break;
            acc += w;
        }
        r -= acc;
        t.uvec[ii] = r / N_[ii][c];
        r %= N_[ii][c];
        t.cvec[ii] = c;
    }
    return t;
}

namespace {

Chain subchain(const Chain& ch, std::size_t pos, std::size_t len) {
    return {chain_object_at(ch, pos),
            {ch.atoms.begin() + static_cast<std::ptrdiff_t>(pos),
             ch.atoms.begin() + static_cast<std::ptrdiff_t>(pos + len)}};
}

// Shared engine: validates the rewrite data, prepares indexers, and exposes
// the per-cell block computation so open moves fill the whole grid while
// traced moves touch only the diagonal.
class Rewriter {
  public:
    Rewriter(const Chain& ch, std::size_t pos, std::size_t len,
             const KVTwoMor& theta, const std::vector<KVOneMor>& repl)
        : ch_(ch), pos_(pos), len_(len), theta_(theta) {
        if (pos + len > ch.atoms.size())
            throw std::invalid_argument("chain rewrite segment out of range");
        segment_ = subchain(ch, pos, len);
        repl_chain_ = make_chain(chain_object_at(ch, pos), repl);
        if (!(chain_tgt(repl_chain_) == chain_object_at(ch, pos + len)))
            throw std::invalid_argument(
                "chain rewrite replacement ends at the wrong object");
        if (!(theta.src == chain_composite(segment_)))
            throw std::invalid_argument(
                "chain rewrite: theta source is not the segment composite");
        if (!(theta.tgt == chain_composite(repl_chain_)))
            throw std::invalid_argument(
                "chain rewrite: theta target is not the replacement composite");
        result_.src = ch.src;
        result_.atoms.assign(ch.atoms.begin(),
                             ch.atoms.begin() + static_cast<std::ptrdiff_t>(pos));
        result_.atoms.insert(result_.atoms.end(), repl.begin(), repl.end());
        result_.atoms.insert(result_.atoms.end(),
                             ch.atoms.begin() + static_cast<std::ptrdiff_t>(pos + len),
                             ch.atoms.end());
        const std::size_t mid = chain_object_at(ch, pos).rank;
        seg_idx_.reserve(mid);
        repl_idx_.reserve(mid);
        for (std::size_t c = 0; c < mid; ++c) {
            seg_idx_.emplace_back(segment_, c);
            repl_idx_.emplace_back(repl_chain_, c);
        }
    }

    const Chain& result() const { return result_; }

    Matrix cell(const ChainIndexer& src_idx, const ChainIndexer& res_idx,
                std::size_t t) const {
        const std::size_t cols = src_idx.dim(t), rows = res_idx.dim(t);
        Matrix out(rows, cols, theta_.mode);
        const std::size_t k = ch_.atoms.size(), rlen = repl_chain_.atoms.size();
        for (std::size_t r0 = 0; r0 < cols; ++r0) {
            ChainTuple tup = src_idx.unrank(t, r0);
            const std::size_t c_bot = tup.cvec[pos_],
                              c_top = tup.cvec[pos_ + len_];
            ChainTuple seg;
            seg.cvec.assign(tup.cvec.begin() + static_cast<std::ptrdiff_t>(pos_),
                            tup.cvec.begin() + static_cast<std::ptrdiff_t>(pos_ + len_ + 1));
            seg.uvec.assign(tup.uvec.begin() + static_cast<std::ptrdiff_t>(pos_),
                            tup.uvec.begin() + static_cast<std::ptrdiff_t>(pos_ + len_));
            const std::size_t seg_rank = seg_idx_[c_bot].rank(seg);
            const Matrix& B = theta_.blocks[c_top][c_bot];
            for (std::size_t rn = 0; rn < B.rows(); ++rn) {
                const ExactScalar& coeff = B.at(rn, seg_rank);
                if (coeff.is_zero()) continue;
                ChainTuple rep = repl_idx_[c_bot].unrank(c_top, rn);
                ChainTuple nt;
                nt.cvec.reserve(k - len_ + rlen + 1);
                nt.uvec.reserve(k - len_ + rlen);
                nt.cvec.assign(tup.cvec.begin(),
                               tup.cvec.begin() + static_cast<std::ptrdiff_t>(pos_ + 1));
                nt.cvec.insert(nt.cvec.end(), rep.cvec.begin() + 1, rep.cvec.end());
                nt.cvec.insert(nt.cvec.end(),
                               tup.cvec.begin() + static_cast<std::ptrdiff_t>(pos_ + len_ + 1),
                               tup.cvec.end());
                nt.uvec.assign(tup.uvec.begin(),
                               tup.uvec.begin() + static_cast<std::ptrdiff_t>(pos_));
                nt.uvec.insert(nt.uvec.end(), rep.uvec.begin(), rep.uvec.end());
                nt.uvec.insert(nt.uvec.end(),
                               tup.uvec.begin() + static_cast<std::ptrdiff_t>(pos_ + len_),
                               tup.uvec.end());
                out.at(res_idx.rank(nt), r0) += coeff;
            }
        }
        return out;
    }

  private:
    const Chain& ch_;
    std::size_t pos_, len_;
    const KVTwoMor& theta_;
    Chain segment_, repl_chain_, result_;
    std::vector<ChainIndexer> seg_idx_, repl_idx_;
};

}  // namespace

ChainMove chain_apply(const Chain& ch, std::size_t pos, std::size_t len,
                      const KVTwoMor& theta,
                      const std::vector<KVOneMor>& repl) {
    Rewriter rw(ch, pos, len, theta, repl);
    const Chain& res = rw.result();
    KVOneMor src_comp = chain_composite(ch), tgt_comp = chain_composite(res);
    std::vector<std::vector<Matrix>> blocks(tgt_comp.tgt.rank);
    std::vector<ChainIndexer> src_idx, res_idx;
    for (std::size_t s = 0; s < ch.src.rank; ++s) {
        src_idx.emplace_back(ch, s);
        res_idx.emplace_back(res, s);
    }
    for (std::size_t t = 0; t < tgt_comp.tgt.rank; ++t) {
        blocks[t].reserve(ch.src.rank);
        for (std::size_t s = 0; s < ch.src.rank; ++s)
            blocks[t].push_back(rw.cell(src_idx[s], res_idx[s], t));
    }
    return {res, KVTwoMor{std::move(src_comp), std::move(tgt_comp), theta.mode,
                          std::move(blocks)}};
}

ChainMove unit_r(const Chain& ch, std::size_t cut, const KVOneMor& f,
                 ScalarMode mode) {
    if (!(chain_object_at(ch, cut) == f.src))
        throw std::invalid_argument("unit_r: cut object is not the source of f");
    Adjunction adj = right_adjoint(f, mode);
    return chain_apply(ch, cut, 0, adj.unit, {f, adj.adj});
}

ChainMove unit_l(const Chain& ch, std::size_t cut, const KVOneMor& f,
                 ScalarMode mode) {
    if (!(chain_object_at(ch, cut) == f.tgt))
        throw std::invalid_argument("unit_l: cut object is not the target of f");
    Adjunction adj = left_adjoint(f, mode);
    return chain_apply(ch, cut, 0, adj.unit, {adj.adj, f});
}

ChainMove counit_r(const Chain& ch, std::size_t pos, const KVOneMor& f,
                   ScalarMode mode) {
    Adjunction adj = right_adjoint(f, mode);
    if (pos + 2 > ch.atoms.size() || !(ch.atoms[pos] == adj.adj) ||
        !(ch.atoms[pos + 1] == f))
        throw std::invalid_argument(
            "counit_r: segment is not [f^r, f] for the given f");
    return chain_apply(ch, pos, 2, adj.counit, {});
}

ChainMove counit_l(const Chain& ch, std::size_t pos, const KVOneMor& f,
                   ScalarMode mode) {
    Adjunction adj = left_adjoint(f, mode);
    if (pos + 2 > ch.atoms.size() || !(ch.atoms[pos] == f) ||
        !(ch.atoms[pos + 1] == adj.adj))
        throw std::invalid_argument(
            "counit_l: segment is not [f, f^l] for the given f");
    return chain_apply(ch, pos, 2, adj.counit, {});
}

ChainMove fuse(const Chain& ch, std::size_t pos, std::size_t len,
               ScalarMode mode) {
    KVOneMor fused = chain_composite(subchain(ch, pos, len));
    return chain_apply(ch, pos, len, id2(fused, mode), {fused});
}

ChainMove split(const Chain& ch, std::size_t pos,
                const std::vector<KVOneMor>& repl, ScalarMode mode) {
    if (pos >= ch.atoms.size())
        throw std::invalid_argument("split: position out of range");
    const KVOneMor& atom = ch.atoms[pos];
    return chain_apply(ch, pos, 1, id2(atom, mode), repl);
}

ChainMove drop_identity(const Chain& ch, std::size_t pos, ScalarMode mode) {
    if (pos >= ch.atoms.size() ||
        !(ch.atoms[pos] == id1(chain_object_at(ch, pos))))
        throw std::invalid_argument("drop_identity: atom is not an identity");
    return chain_apply(ch, pos, 1, id2(ch.atoms[pos], mode), {});
}

KVTwoMor theta_from_map(
    const Chain& src, const Chain& dst, ScalarMode mode,
    const std::function<ChainTuple(const ChainTuple&)>& map) {
    if (!(src.src == dst.src) || !(chain_tgt(src) == chain_tgt(dst)))
        throw std::invalid_argument("theta_from_map: chains are not parallel");
    KVOneMor sc = chain_composite(src), dc = chain_composite(dst);
    std::vector<std::vector<Matrix>> blocks(sc.tgt.rank);
    for (std::size_t t = 0; t < sc.tgt.rank; ++t) blocks[t].reserve(sc.src.rank);
    for (std::size_t s = 0; s < sc.src.rank; ++s) {
        ChainIndexer si(src, s), di(dst, s);
        for (std::size_t t = 0; t < sc.tgt.rank; ++t) {
            Matrix m(di.dim(t), si.dim(t), mode);
            for (std::size_t r = 0; r < si.dim(t); ++r) {
                ChainTuple out = map(si.unrank(t, r));
                if (out.cvec.empty() || out.cvec.back() != t)
                    throw std::logic_error(
                        "theta_from_map: image tuple leaves the cell");
                m.at(di.rank(out), r) = ExactScalar::one(mode);
            }
            blocks[t].push_back(std::move(m));
        }
    }
    return make_two_mor(std::move(sc), std::move(dc), mode, std::move(blocks));
}

TracedChain make_traced(KVObject base, std::vector<KVOneMor> atoms) {
    Chain open = make_chain(base, atoms);
    if (!(chain_tgt(open) == base))
        throw std::invalid_argument("traced chain does not close up");
    return {base, std::move(open.atoms)};
}

Chain open_chain(const TracedChain& tc) { return {tc.base, tc.atoms}; }

TracedLayout traced_layout(const TracedChain& tc) {
    TracedLayout lay;
    Chain open = open_chain(tc);
    for (std::size_t i = 0; i < tc.base.rank; ++i) {
        ChainIndexer idx(open, i);
        lay.offsets.push_back(lay.total);
        lay.cell_dims.push_back(idx.dim(i));
        lay.total += idx.dim(i);
    }
    return lay;
}

TracedMove traced_apply(const TracedChain& tc, std::size_t pos,
                        std::size_t len, const KVTwoMor& theta,
                        const std::vector<KVOneMor>& repl) {
    Chain open = open_chain(tc);
    Rewriter rw(open, pos, len, theta, repl);
    TracedChain res{tc.base, rw.result().atoms};
    Matrix m(0, 0, theta.mode);
    for (std::size_t i = 0; i < tc.base.rank; ++i) {
        ChainIndexer src_idx(open, i), res_idx(rw.result(), i);
        m = direct_sum(m, rw.cell(src_idx, res_idx, i));
    }
    return {std::move(res), std::move(m)};
}

TracedMove traced_unit_r(const TracedChain& tc, std::size_t cut,
                         const KVOneMor& f, ScalarMode mode) {
    if (!(chain_object_at(open_chain(tc), cut) == f.src))
        throw std::invalid_argument("unit_r: cut object is not the source of f");
    Adjunction adj = right_adjoint(f, mode);
    return traced_apply(tc, cut, 0, adj.unit, {f, adj.adj});
}

TracedMove traced_unit_l(const TracedChain& tc, std::size_t cut,
                         const KVOneMor& f, ScalarMode mode) {
    if (!(chain_object_at(open_chain(tc), cut) == f.tgt))
        throw std::invalid_argument("unit_l: cut object is not the target of f");
    Adjunction adj = left_adjoint(f, mode);
    return traced_apply(tc, cut, 0, adj.unit, {adj.adj, f});
}

TracedMove traced_counit_r(const TracedChain& tc, std::size_t pos,
                           const KVOneMor& f, ScalarMode mode) {
    Adjunction adj = right_adjoint(f, mode);
    if (pos + 2 > tc.atoms.size() || !(tc.atoms[pos] == adj.adj) ||
        !(tc.atoms[pos + 1] == f))
        throw std::invalid_argument(
            "counit_r: segment is not [f^r, f] for the given f");
    return traced_apply(tc, pos, 2, adj.counit, {});
}

TracedMove traced_counit_l(const TracedChain& tc, std::size_t pos,
                           const KVOneMor& f, ScalarMode mode) {
    Adjunction adj = left_adjoint(f, mode);
    if (pos + 2 > tc.atoms.size() || !(tc.atoms[pos] == f) ||
        !(tc.atoms[pos + 1] == adj.adj))
        throw std::invalid_argument(
            "counit_l: segment is not [f, f^l] for the given f");
    return traced_apply(tc, pos, 2, adj.counit, {});
}

TracedMove traced_fuse(const TracedChain& tc, std::size_t pos, std::size_t len,
                       ScalarMode mode) {
    if (pos + len > tc.atoms.size())
        throw std::invalid_argument("fuse: segment out of range");
    KVOneMor fused = chain_composite(subchain(open_chain(tc), pos, len));
    return traced_apply(tc, pos, len, id2(fused, mode), {fused});
}

TracedMove traced_split(const TracedChain& tc, std::size_t pos,
                        const std::vector<KVOneMor>& repl, ScalarMode mode) {
    if (pos >= tc.atoms.size())
        throw std::invalid_argument("split: position out of range");
    return traced_apply(tc, pos, 1, id2(tc.atoms[pos], mode), repl);
}

TracedMove traced_drop_identity(const TracedChain& tc, std::size_t pos,
                                ScalarMode mode) {
    Chain open = open_chain(tc);
    if (pos >= tc.atoms.size() ||
        !(tc.atoms[pos] == id1(chain_object_at(open, pos))))
        throw std::invalid_argument("drop_identity: atom is not an identity");
    return traced_apply(tc, pos, 1, id2(tc.atoms[pos], mode), {});
}

TracedMove traced_rotate(const TracedChain& tc, std::size_t r,
                         ScalarMode mode) {
    const std::size_t k = tc.atoms.size();
    if (r > k)
        throw std::invalid_argument("rotate: amount exceeds chain length");
    Chain open = open_chain(tc);
    TracedChain res;
    res.base = chain_object_at(open, k - r);
    res.atoms.reserve(k);
    for (std::size_t j = 0; j < k; ++j)
        res.atoms.push_back(tc.atoms[(k - r + j) % k]);
    Chain open_res = open_chain(res);

    TracedLayout old_lay = traced_layout(tc), new_lay = traced_layout(res);
    Matrix m(new_lay.total, old_lay.total, mode);
    std::vector<ChainIndexer> new_idx;
    for (std::size_t b = 0; b < res.base.rank; ++b)
        new_idx.emplace_back(open_res, b);
    for (std::size_t i = 0; i < tc.base.rank; ++i) {
        ChainIndexer old_idx(open, i);
        for (std::size_t r0 = 0; r0 < old_idx.dim(i); ++r0) {
            ChainTuple tup = old_idx.unrank(i, r0);
            const std::size_t b = tup.cvec[k - r];
            ChainTuple nt;
            nt.cvec.resize(k + 1);
            nt.uvec.resize(k);
            for (std::size_t j = 0; j <= k; ++j)
                nt.cvec[j] = j <= r ? tup.cvec[k - r + j] : tup.cvec[j - r];
            for (std::size_t j = 0; j < k; ++j)
                nt.uvec[j] = j < r ? tup.uvec[k - r + j] : tup.uvec[j - r];
            m.at(new_lay.offsets[b] + new_idx[b].rank(nt),
                 old_lay.offsets[i] + r0) = ExactScalar::one(mode);
        }
    }
    return {std::move(res), std::move(m)};
}

}  // namespace kvt::kv
