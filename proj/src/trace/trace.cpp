#include "trace/trace.hpp"

#include <stdexcept>
#include <string>

namespace kvt::tr {

using kv::Chain;
using kv::ChainIndexer;
using kv::ChainMove;
using kv::ChainTuple;
using kv::KVObject;
using kv::KVOneMor;
using kv::KVTwoMor;
using kv::TracedChain;
using kv::TracedMove;
using lin::ExactScalar;
using lin::Matrix;
using lin::ScalarMode;

namespace {

void require_endo(const KVOneMor& phi, const char* what) {
    if (!(phi.src == phi.tgt))
        throw std::invalid_argument(std::string(what) +
                                    ": expected an endomorphism");
}

void require_trace_map_boundaries(const KVOneMor& psi, const KVTwoMor& alpha,
                                  const KVOneMor& phi,
                                  const KVOneMor& phi_prime) {
    require_endo(phi, "trace_map phi");
    require_endo(phi_prime, "trace_map phi_prime");
    if (!(psi.src == phi.src) || !(psi.tgt == phi_prime.src))
        throw std::invalid_argument("trace_map: psi does not connect the two "
                                    "endomorphism objects");
    if (!(alpha.src == compose1(psi, phi)) ||
        !(alpha.tgt == compose1(phi_prime, psi)))
        throw std::invalid_argument(
            "trace_map: alpha must map psi o phi to phi_prime o psi");
}

// ev_A o (phi (x) id_A): the pairing 1-morphism A (x) A -> 1 of phi.
KVOneMor pairing_mor(const KVOneMor& phi) {
    auto d = kv::duality_data(phi.src);
    return compose1(d.ev, kv::tensor(phi, kv::id1(phi.src)));
}

Matrix fold_product(const std::vector<Matrix>& steps) {
    Matrix acc = steps.front();
    for (std::size_t i = 1; i < steps.size(); ++i) acc = mat_mul(steps[i], acc);
    return acc;
}

}  // namespace

CommutingPair make_commuting_pair(KVOneMor phi_a, KVOneMor phi_b,
                                  KVTwoMor alpha) {
    require_endo(phi_a, "commuting pair phi_a");
    require_endo(phi_b, "commuting pair phi_b");
    if (!(phi_a.src == phi_b.src))
        throw std::invalid_argument(
            "commuting pair: endomorphisms live on different objects");
    if (!(alpha.src == compose1(phi_a, phi_b)) ||
        !(alpha.tgt == compose1(phi_b, phi_a)))
        throw std::invalid_argument(
            "commuting pair: alpha must map phi_a o phi_b to phi_b o phi_a");
    return {std::move(phi_a), std::move(phi_b), std::move(alpha)};
}

TraceSpace trace_of(const KVOneMor& phi) {
    require_endo(phi, "trace_of");
    const KVObject a = phi.src;

    TraceSpace ts;
    for (std::size_t i = 0; i < a.rank; ++i) {
        ts.block_layout.emplace_back(i, phi.dims[i][i]);
        ts.dim += phi.dims[i][i];
    }

    // Independent evaluation as the closed loop ev o (phi (x) id) o coev,
    // checked tuple by tuple against the diagonal layout.
    auto d = kv::duality_data(a);
    Chain loop = kv::make_chain(
        kv::unit_object(),
        {d.coev, kv::tensor(phi, kv::id1(a)), d.ev});
    ChainIndexer idx(loop, 0);
    if (idx.dim(0) != ts.dim)
        throw std::logic_error("trace_of: loop dimension disagrees with the "
                               "diagonal layout");
    std::size_t r = 0;
    for (const auto& [cell, cd] : ts.block_layout)
        for (std::size_t u = 0; u < cd; ++u, ++r) {
            ChainTuple t = idx.unrank(0, r);
            if (t.cvec[2] != cell * a.rank + cell || t.uvec[1] != u)
                throw std::logic_error(
                    "trace_of: loop enumeration misaligned with the diagonal "
                    "layout");
        }
    return ts;
}

Matrix trace_2mor(const KVTwoMor& theta) {
    require_endo(theta.src, "trace_2mor source");
    require_endo(theta.tgt, "trace_2mor target");
    if (!(theta.src.src == theta.tgt.src))
        throw std::invalid_argument(
            "trace_2mor: source and target endomorphisms live on different "
            "objects");
    Matrix acc(0, 0, theta.mode);
    for (std::size_t i = 0; i < theta.src.src.rank; ++i)
        acc = direct_sum(acc, theta.blocks[i][i]);
    return acc;
}

Matrix cyclic(const KVOneMor& phi, const KVOneMor& psi, ScalarMode mode) {
    if (!(phi.src == psi.tgt) || !(phi.tgt == psi.src))
        throw std::invalid_argument("cyclic: morphisms are not a composable "
                                    "loop");
    TracedChain tc = kv::make_traced(psi.src, {psi, phi});
    return kv::traced_rotate(tc, 1, mode).m;
}

Matrix bv_check(const KVOneMor& phi, ScalarMode mode) {
    require_endo(phi, "bv_check");
    const KVObject a = phi.src;
    TracedChain two = kv::make_traced(a, {kv::id1(a), kv::id1(a)});
    TracedMove d0 = kv::traced_drop_identity(two, 0, mode);
    TracedMove d1 = kv::traced_drop_identity(two, 1, mode);
    TracedMove rot = kv::traced_rotate(two, 1, mode);
    // d1 is a bijection between unit-loop bases, so its inverse is its
    // transpose.
    return mat_mul(d0.m, mat_mul(rot.m, lin::transpose(d1.m)));
}

Matrix trace_map(const KVOneMor& psi, const KVTwoMor& alpha,
                 const KVOneMor& phi, const KVOneMor& phi_prime) {
    require_trace_map_boundaries(psi, alpha, phi, phi_prime);
    const ScalarMode mode = alpha.mode;

    TracedChain t0 = kv::make_traced(phi.src, {phi});
    TracedMove m1 = kv::traced_unit_r(t0, 1, psi, mode);   // [phi, psi, psi^r]
    TracedMove m2 = kv::traced_apply(m1.result, 0, 2, alpha,
                                     {psi, phi_prime});    // [psi, phi', psi^r]
    TracedMove m3 = kv::traced_rotate(m2.result, 1, mode); // [psi^r, psi, phi']
    TracedMove m4 = kv::traced_counit_r(m3.result, 0, psi, mode);  // [phi']
    return fold_product({m1.m, m2.m, m3.m, m4.m});
}

Matrix trace_map_alt(const KVOneMor& psi, const KVTwoMor& alpha,
                     const KVOneMor& phi, const KVOneMor& phi_prime) {
    require_trace_map_boundaries(psi, alpha, phi, phi_prime);
    const ScalarMode mode = alpha.mode;
    const KVOneMor psi_r = kv::transpose_mor(psi);

    // beta: phi o psi^r => psi^r o phi_prime on an open chain.
    Chain open = kv::make_chain(psi.tgt, {psi_r, phi});
    ChainMove o1 = kv::unit_r(open, 2, psi, mode);  // [psi^r, phi, psi, psi^r]
    ChainMove o2 = kv::chain_apply(o1.result, 1, 2, alpha,
                                   {psi, phi_prime});
    ChainMove o3 = kv::counit_r(o2.result, 0, psi, mode);  // [phi', psi^r]
    KVTwoMor beta = vcompose2(o3.mor, vcompose2(o2.mor, o1.mor));

    TracedChain t0 = kv::make_traced(phi.src, {phi});
    TracedMove m1 = kv::traced_unit_r(t0, 0, psi, mode);  // [psi, psi^r, phi]
    TracedMove m2 = kv::traced_apply(m1.result, 1, 2, beta,
                                     {phi_prime, psi_r});  // [psi, phi', psi^r]
    TracedMove m3 = kv::traced_rotate(m2.result, 1, mode);
    TracedMove m4 = kv::traced_counit_r(m3.result, 0, psi, mode);
    return fold_product({m1.m, m2.m, m3.m, m4.m});
}

KVTwoMor induced_commutor(const CommutingPair& pair) {
    const ScalarMode mode = pair.alpha.mode;
    const KVOneMor ar = kv::transpose_mor(pair.phi_a);

    Chain ch = kv::make_chain(pair.phi_a.src, {ar, pair.phi_b});
    ChainMove o1 = kv::unit_r(ch, 2, pair.phi_a, mode);  // [a^r, b, a, a^r]
    ChainMove o2 = kv::chain_apply(o1.result, 1, 2, pair.alpha,
                                   {pair.phi_a, pair.phi_b});
    ChainMove o3 = kv::counit_r(o2.result, 0, pair.phi_a, mode);  // [b, a^r]
    return vcompose2(o3.mor, vcompose2(o2.mor, o1.mor));
}

TraceDuality trace_duality(const KVOneMor& phi, ScalarMode mode) {
    require_endo(phi, "trace_duality");
    const KVObject a = phi.src;
    auto d = kv::duality_data(a);
    const KVOneMor ev_phi = pairing_mor(phi);
    const KVOneMor ev_phi_r = pairing_mor(kv::transpose_mor(phi));
    const KVOneMor coev_phi_r = kv::transpose_mor(ev_phi_r);
    const KVOneMor coev_phi = kv::transpose_mor(ev_phi);

    // coev: two unit insertions starting from the empty loop. The final
    // chain enumerates the nonzero tuples as (Tr(phi^r) index major,
    // Tr(phi) index minor), i.e. directly in the kron basis.
    TracedChain empty = kv::make_traced(kv::unit_object(), {});
    TracedMove u1 = kv::traced_unit_r(empty, 0, coev_phi_r, mode);
    TracedMove u2 = kv::traced_unit_l(u1.result, 1, d.coev, mode);
    Matrix coev = mat_mul(u2.m, u1.m);

    // ev: the matching loop contracted by two counits.
    TracedChain paired = kv::make_traced(
        kv::unit_object(), {coev_phi, d.ev, d.coev, ev_phi});
    TracedMove e1 = kv::traced_counit_r(paired, 1, d.coev, mode);
    TracedMove e2 = kv::traced_counit_r(e1.result, 0, ev_phi, mode);
    Matrix ev = mat_mul(e2.m, e1.m);
    return {std::move(coev), std::move(ev)};
}

ExactScalar pairing_trace(const Matrix& m, const TraceDuality& dual,
                          ScalarMode mode) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("pairing_trace: matrix is not square");
    const std::size_t d = m.rows();
    const std::size_t dr = d == 0 ? 0 : dual.coev.rows() / d;
    if (dual.coev.rows() != dr * d || dual.ev.cols() != d * dr)
        throw std::invalid_argument("pairing_trace: duality data does not "
                                    "match the matrix dimension");
    // swap: Tr(phi)^dual (x) Tr(phi) -> Tr(phi) (x) Tr(phi)^dual
    std::vector<std::size_t> perm(dr * d);
    for (std::size_t i = 0; i < dr; ++i)
        for (std::size_t j = 0; j < d; ++j) perm[i * d + j] = j * dr + i;
    Matrix swap = lin::permutation_matrix(perm, mode);
    Matrix mid = kron(m, Matrix::identity(dr, mode));
    Matrix val = mat_mul(dual.ev, mat_mul(mid, mat_mul(swap, dual.coev)));
    return val.at(0, 0);
}

namespace {

ExactScalar checked_trace(const Matrix& m, const TraceDuality& dual,
                          ScalarMode mode) {
    ExactScalar plain = mat_trace(m);
    if (!(pairing_trace(m, dual, mode) == plain))
        throw std::logic_error(
            "secondary trace: pairing trace disagrees with the matrix trace");
    return plain;
}

}  // namespace

ExactScalar secondary_trace_b(const CommutingPair& pair) {
    const ScalarMode mode = pair.alpha.mode;
    Matrix m = trace_map(pair.phi_a, pair.alpha, pair.phi_b, pair.phi_b);
    return checked_trace(m, trace_duality(pair.phi_b, mode), mode);
}

ExactScalar secondary_trace_a(const CommutingPair& pair) {
    const ScalarMode mode = pair.alpha.mode;
    const KVOneMor ar = kv::transpose_mor(pair.phi_a);
    Matrix m = trace_map(pair.phi_b, induced_commutor(pair), ar, ar);
    return checked_trace(m, trace_duality(ar, mode), mode);
}

KVTwoMor shear_commutor(const CommutingPair& pair) {
    const ScalarMode mode = pair.alpha.mode;
    const KVOneMor p = compose1(pair.phi_a, pair.phi_b);

    Chain ch = kv::make_chain(pair.phi_a.src, {pair.phi_b, p});
    ChainMove s1 = kv::split(ch, 1, {pair.phi_b, pair.phi_a}, mode);
    ChainMove s2 = kv::chain_apply(s1.result, 1, 2, pair.alpha,
                                   {pair.phi_a, pair.phi_b});
    ChainMove s3 = kv::fuse(s2.result, 0, 2, mode);  // [p, phi_b]
    return vcompose2(s3.mor, vcompose2(s2.mor, s1.mor));
}

Matrix shear_map(const CommutingPair& pair) {
    const KVOneMor p = compose1(pair.phi_a, pair.phi_b);
    return trace_map(p, shear_commutor(pair), pair.phi_b, pair.phi_b);
}

KVTwoMor mate(const KVOneMor& psi, const KVTwoMor& alpha, const KVOneMor& phi,
              const KVOneMor& phi_prime) {
    require_trace_map_boundaries(psi, alpha, phi, phi_prime);
    const ScalarMode mode = alpha.mode;
    const KVOneMor psi_r = kv::transpose_mor(psi);
    const KVOneMor phip_r = kv::transpose_mor(phi_prime);

    Chain ch = kv::make_chain(psi.tgt, {phip_r, psi_r});
    ChainMove o1 = kv::unit_r(ch, 2, phi, mode);
    ChainMove o2 = kv::unit_r(o1.result, 3, psi, mode);
    ChainMove o3 = kv::chain_apply(o2.result, 2, 2, alpha, {psi, phi_prime});
    ChainMove o4 = kv::counit_r(o3.result, 1, psi, mode);
    ChainMove o5 = kv::counit_r(o4.result, 0, phi_prime, mode);
    KVTwoMor acc = o1.mor;
    for (const KVTwoMor* step : {&o2.mor, &o3.mor, &o4.mor, &o5.mor})
        acc = vcompose2(*step, acc);
    return acc;
}

Matrix dual_trace_map(const KVOneMor& psi, const KVTwoMor& alpha,
                      const KVOneMor& phi, const KVOneMor& phi_prime) {
    require_trace_map_boundaries(psi, alpha, phi, phi_prime);
    const ScalarMode mode = alpha.mode;
    const KVOneMor psi_r = kv::transpose_mor(psi);
    const KVOneMor phi_r = kv::transpose_mor(phi);
    const KVOneMor phip_r = kv::transpose_mor(phi_prime);

    Matrix direct =
        trace_map(psi_r, mate(psi, alpha, phi, phi_prime), phip_r, phi_r);

    // Adjoint of the forward map under the trace_duality pairings.
    Matrix fwd = trace_map(psi, alpha, phi, phi_prime);
    TraceDuality dphi = trace_duality(phi, mode);
    TraceDuality dphip = trace_duality(phi_prime, mode);
    const std::size_t n = fwd.cols(), np = fwd.rows();
    Matrix adj = mat_mul(
        kron(Matrix::identity(n, mode), dphip.ev),
        mat_mul(kron(Matrix::identity(n, mode),
                     kron(fwd, Matrix::identity(np, mode))),
                kron(dphi.coev, Matrix::identity(np, mode))));
    if (!(direct == adj))
        throw std::logic_error(
            "dual_trace_map: chain evaluation disagrees with the "
            "pairing-adjoint evaluation");
    return direct;
}

}  // namespace kvt::tr
