#include "kv2vect/kv.hpp"

#include <stdexcept>
#include <string>

namespace kvt::kv {

using lin::ExactScalar;
using lin::Matrix;
using lin::ScalarMode;

KVObject unit_object() { return {1}; }
KVObject tensor(KVObject a, KVObject b) { return {a.rank * b.rank}; }
KVObject op(KVObject a) { return a; }

KVOneMor make_one_mor(KVObject src, KVObject tgt,
                      std::vector<std::vector<std::size_t>> dims) {
    if (dims.size() != tgt.rank)
        throw std::invalid_argument("one_mor: grid has " +
                                    std::to_string(dims.size()) +
                                    " rows, target rank is " +
                                    std::to_string(tgt.rank));
    for (const auto& row : dims)
        if (row.size() != src.rank)
            throw std::invalid_argument("one_mor: grid row has " +
                                        std::to_string(row.size()) +
                                        " cells, source rank is " +
                                        std::to_string(src.rank));
    return {src, tgt, std::move(dims)};
}

KVOneMor id1(KVObject a) {
    std::vector<std::vector<std::size_t>> d(a.rank,
                                            std::vector<std::size_t>(a.rank, 0));
    for (std::size_t i = 0; i < a.rank; ++i) d[i][i] = 1;
    return {a, a, std::move(d)};
}

KVOneMor compose1(const KVOneMor& g, const KVOneMor& f) {
    if (!(f.tgt == g.src))
        throw std::invalid_argument("compose1: middle objects disagree, " +
                                    std::to_string(f.tgt.rank) + " vs " +
                                    std::to_string(g.src.rank));
    std::vector<std::vector<std::size_t>> d(
        g.tgt.rank, std::vector<std::size_t>(f.src.rank, 0));
    for (std::size_t i = 0; i < g.tgt.rank; ++i)
        for (std::size_t k = 0; k < f.src.rank; ++k) {
            std::size_t s = 0;
            for (std::size_t j = 0; j < g.src.rank; ++j)
                s += g.dims[i][j] * f.dims[j][k];
            d[i][k] = s;
        }
    return {f.src, g.tgt, std::move(d)};
}

KVOneMor tensor(const KVOneMor& f, const KVOneMor& g) {
    KVObject src = tensor(f.src, g.src), tgt = tensor(f.tgt, g.tgt);
    std::vector<std::vector<std::size_t>> d(
        tgt.rank, std::vector<std::size_t>(src.rank, 0));
    for (std::size_t i1 = 0; i1 < f.tgt.rank; ++i1)
        for (std::size_t i2 = 0; i2 < g.tgt.rank; ++i2)
            for (std::size_t j1 = 0; j1 < f.src.rank; ++j1)
                for (std::size_t j2 = 0; j2 < g.src.rank; ++j2)
                    d[i1 * g.tgt.rank + i2][j1 * g.src.rank + j2] =
                        f.dims[i1][j1] * g.dims[i2][j2];
    return {src, tgt, std::move(d)};
}

KVOneMor transpose_mor(const KVOneMor& f) {
    std::vector<std::vector<std::size_t>> d(
        f.src.rank, std::vector<std::size_t>(f.tgt.rank, 0));
    for (std::size_t i = 0; i < f.tgt.rank; ++i)
        for (std::size_t j = 0; j < f.src.rank; ++j) d[j][i] = f.dims[i][j];
    return {f.tgt, f.src, std::move(d)};
}

KVOneMor sigma1(KVObject a, KVObject b) {
    KVObject src = tensor(a, b), tgt = tensor(b, a);
    std::vector<std::vector<std::size_t>> d(
        tgt.rank, std::vector<std::size_t>(src.rank, 0));
    for (std::size_t x = 0; x < a.rank; ++x)
        for (std::size_t y = 0; y < b.rank; ++y)
            d[y * a.rank + x][x * b.rank + y] = 1;
    return {src, tgt, std::move(d)};
}

KVTwoMor make_two_mor(KVOneMor src, KVOneMor tgt, ScalarMode mode,
                      std::vector<std::vector<Matrix>> blocks) {
    if (!(src.src == tgt.src) || !(src.tgt == tgt.tgt))
        throw std::invalid_argument("two_mor: 1-morphisms are not parallel");
    if (blocks.size() != src.tgt.rank)
        throw std::invalid_argument("two_mor: block grid has wrong row count");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].size() != src.src.rank)
            throw std::invalid_argument("two_mor: block row " +
                                        std::to_string(i) + " has wrong size");
        for (std::size_t j = 0; j < blocks[i].size(); ++j) {
            const Matrix& m = blocks[i][j];
            if (m.rows() != tgt.dims[i][j] || m.cols() != src.dims[i][j])
                throw std::invalid_argument(
                    "two_mor: block (" + std::to_string(i) + "," +
                    std::to_string(j) + ") is " + std::to_string(m.rows()) +
                    "x" + std::to_string(m.cols()) + ", cell wants " +
                    std::to_string(tgt.dims[i][j]) + "x" +
                    std::to_string(src.dims[i][j]));
            if (!(m.mode() == mode))
                throw std::invalid_argument("two_mor: block (" +
                                            std::to_string(i) + "," +
                                            std::to_string(j) +
                                            ") has a foreign scalar mode");
        }
    }
    return {std::move(src), std::move(tgt), mode, std::move(blocks)};
}

KVTwoMor id2(const KVOneMor& f, ScalarMode mode) {
    std::vector<std::vector<Matrix>> blocks(f.tgt.rank);
    for (std::size_t i = 0; i < f.tgt.rank; ++i) {
        blocks[i].reserve(f.src.rank);
        for (std::size_t j = 0; j < f.src.rank; ++j)
            blocks[i].push_back(Matrix::identity(f.dims[i][j], mode));
    }
    return {f, f, mode, std::move(blocks)};
}

KVTwoMor vcompose2(const KVTwoMor& b, const KVTwoMor& a) {
    if (!(a.tgt == b.src))
        throw std::invalid_argument(
            "vcompose2: target of first is not source of second");
    if (!(a.mode == b.mode))
        throw std::invalid_argument("vcompose2: mixed scalar modes");
    std::vector<std::vector<Matrix>> blocks(a.src.tgt.rank);
    for (std::size_t i = 0; i < a.src.tgt.rank; ++i) {
        blocks[i].reserve(a.src.src.rank);
        for (std::size_t j = 0; j < a.src.src.rank; ++j)
            blocks[i].push_back(mat_mul(b.blocks[i][j], a.blocks[i][j]));
    }
    return {a.src, b.tgt, a.mode, std::move(blocks)};
}

KVTwoMor hcompose2(const KVTwoMor& b, const KVTwoMor& a) {
    if (!(a.src.tgt == b.src.src))
        throw std::invalid_argument(
            "hcompose2: middle objects disagree");
    if (!(a.mode == b.mode))
        throw std::invalid_argument("hcompose2: mixed scalar modes");
    KVOneMor src = compose1(b.src, a.src), tgt = compose1(b.tgt, a.tgt);
    const std::size_t rows = tgt.tgt.rank, cols = src.src.rank;
    std::vector<std::vector<Matrix>> blocks(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        blocks[i].reserve(cols);
        for (std::size_t k = 0; k < cols; ++k) {
            Matrix cell(0, 0, a.mode);
            for (std::size_t j = 0; j < a.src.tgt.rank; ++j)
                cell = direct_sum(cell,
                                  kron(b.blocks[i][j], a.blocks[j][k]));
            blocks[i].push_back(std::move(cell));
        }
    }
    return {std::move(src), std::move(tgt), a.mode, std::move(blocks)};
}

KVTwoMor hchain(const std::vector<KVTwoMor>& thetas) {
    if (thetas.empty())
        throw std::invalid_argument("hchain: empty list has no boundary");
    KVTwoMor acc = thetas[0];
    for (std::size_t i = 1; i < thetas.size(); ++i)
        acc = hcompose2(thetas[i], acc);
    return acc;
}

KVTwoMor tensor(const KVTwoMor& a, const KVTwoMor& b) {
    if (!(a.mode == b.mode))
        throw std::invalid_argument("tensor: mixed scalar modes");
    KVOneMor src = tensor(a.src, b.src), tgt = tensor(a.tgt, b.tgt);
    const std::size_t bt = b.src.tgt.rank, bs = b.src.src.rank;
    std::vector<std::vector<Matrix>> blocks(tgt.tgt.rank);
    for (std::size_t i1 = 0; i1 < a.src.tgt.rank; ++i1)
        for (std::size_t i2 = 0; i2 < bt; ++i2) {
            auto& row = blocks[i1 * bt + i2];
            row.reserve(src.src.rank);
            for (std::size_t j1 = 0; j1 < a.src.src.rank; ++j1)
                for (std::size_t j2 = 0; j2 < bs; ++j2)
                    row.push_back(kron(a.blocks[i1][j1], b.blocks[i2][j2]));
        }
    return {std::move(src), std::move(tgt), a.mode, std::move(blocks)};
}

namespace {

// Shared delta builder for the four unit/counit shapes. The nontrivial cell
// of the composite enumerates (c, u_outer, u_inner) with c ascending and the
// later-applied factor major; both u's run over the same cell of f, and the
// 2-morphism is supported where they agree.
Matrix delta_column(const KVOneMor& composite, const KVOneMor& f,
                    bool middle_is_tgt, std::size_t fixed, bool row_form,
                    ScalarMode mode) {
    // fixed is the diagonal cell index on the identity side; the composite
    // cell (fixed, fixed) decodes as (c, u_major, u_minor).
    std::size_t n = composite.dims[fixed][fixed];
    Matrix m = row_form ? Matrix(1, n, mode) : Matrix(n, 1, mode);
    std::size_t offset = 0;
    const std::size_t middle = middle_is_tgt ? f.tgt.rank : f.src.rank;
    for (std::size_t c = 0; c < middle; ++c) {
        std::size_t d = middle_is_tgt ? f.dims[c][fixed] : f.dims[fixed][c];
        for (std::size_t u = 0; u < d; ++u) {
            std::size_t idx = offset + u * d + u;
            if (row_form)
                m.at(0, idx) = ExactScalar::one(mode);
            else
                m.at(idx, 0) = ExactScalar::one(mode);
        }
        offset += d * d;
    }
    return m;
}

KVTwoMor delta_two_mor(const KVOneMor& id_side, const KVOneMor& comp_side,
                       const KVOneMor& f, bool middle_is_tgt, bool row_form,
                       ScalarMode mode) {
    const KVOneMor& src = row_form ? comp_side : id_side;
    const KVOneMor& tgt = row_form ? id_side : comp_side;
    std::vector<std::vector<Matrix>> blocks(tgt.tgt.rank);
    for (std::size_t i = 0; i < tgt.tgt.rank; ++i) {
        blocks[i].reserve(src.src.rank);
        for (std::size_t j = 0; j < src.src.rank; ++j) {
            if (i == j)
                blocks[i].push_back(
                    delta_column(comp_side, f, middle_is_tgt, i, row_form, mode));
            else
                blocks[i].push_back(
                    Matrix(tgt.dims[i][j], src.dims[i][j], mode));
        }
    }
    return {src, tgt, mode, std::move(blocks)};
}

}  // namespace

Adjunction right_adjoint(const KVOneMor& f, ScalarMode mode) {
    KVOneMor fr = transpose_mor(f);
    // unit: id_src => f^r o f. Cell (x,x) of the composite enumerates
    // (y, u_{f^r}, u_f) with u_{f^r} major; support where the u's agree.
    KVTwoMor unit = delta_two_mor(id1(f.src), compose1(fr, f), f,
                                  /*middle_is_tgt=*/true, /*row_form=*/false,
                                  mode);
    // counit: f o f^r => id_tgt. Cell (y,y) enumerates (x, u_f, u_{f^r}).
    KVTwoMor counit = delta_two_mor(id1(f.tgt), compose1(f, fr), f,
                                    /*middle_is_tgt=*/false, /*row_form=*/true,
                                    mode);
    return {std::move(fr), std::move(unit), std::move(counit)};
}

Adjunction left_adjoint(const KVOneMor& f, ScalarMode mode) {
    KVOneMor fl = transpose_mor(f);
    // unit: id_tgt => f o f^l. Cell (y,y) enumerates (x, u_f, u_{f^l}).
    KVTwoMor unit = delta_two_mor(id1(f.tgt), compose1(f, fl), f,
                                  /*middle_is_tgt=*/false, /*row_form=*/false,
                                  mode);
    // counit: f^l o f => id_src. Cell (x,x) enumerates (y, u_{f^l}, u_f).
    KVTwoMor counit = delta_two_mor(id1(f.src), compose1(fl, f), f,
                                    /*middle_is_tgt=*/true, /*row_form=*/true,
                                    mode);
    return {std::move(fl), std::move(unit), std::move(counit)};
}

DualityData duality_data(KVObject a) {
    KVObject aa = tensor(op(a), a);
    std::vector<std::vector<std::size_t>> ev_d(
        1, std::vector<std::size_t>(aa.rank, 0));
    for (std::size_t x = 0; x < a.rank; ++x) ev_d[0][x * a.rank + x] = 1;
    KVOneMor ev{aa, unit_object(), std::move(ev_d)};
    KVOneMor coev = transpose_mor(ev);
    return {op(a), std::move(ev), std::move(coev)};
}

EvAdjoints ev_adjoints(KVObject a, ScalarMode mode) {
    KVOneMor ev = duality_data(a).ev;
    Adjunction r = right_adjoint(ev, mode);
    Adjunction l = left_adjoint(ev, mode);
    return {std::move(l.adj), std::move(r.adj), std::move(r.unit),
            std::move(r.counit), std::move(l.unit), std::move(l.counit)};
}

SerrePair serre(KVObject a) { return {id1(a), id1(a)}; }

}  // namespace kvt::kv
