#include "morse/morse.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace kvt::morse {
namespace {

using kv::Chain;
using kv::ChainMove;
using kv::ChainTuple;
using kv::KVObject;
using kv::KVOneMor;
using kv::KVTwoMor;
using lin::ExactScalar;
using lin::Matrix;
using lin::ScalarMode;

// ---------------------------------------------------------------------------
// The critical poset. Points 0..8 encode (z1, z2) as idx(z1)*3 + idx(z2).
// Each cover is a gradient step raising z1 + z2 by one unit; the saddles of
// one handle cover only their own minimum-side events, which is what makes
// both s_a and s_b downward closed.

constexpr std::array<std::pair<unsigned, unsigned>, 12> kCovers = {{
    {0, 1},
    {0, 3},
    {1, 2},
    {1, 4},
    {3, 6},
    {3, 4},
    {2, 5},
    {6, 7},
    {4, 7},
    {4, 5},
    {7, 8},
    {5, 8},
}};

constexpr unsigned mask_of(std::initializer_list<unsigned> pts) {
    unsigned m = 0;
    for (unsigned p : pts) m |= 1u << p;
    return m;
}

struct NamedSet {
    Node node;
    const char* name;
    unsigned mask;
};

constexpr std::array<NamedSet, kNodeCount> kNamed = {{
    {Node::Empty, "empty", mask_of({})},
    {Node::M, "m", mask_of({0})},
    {Node::MA, "m_a", mask_of({0, 3})},
    {Node::MB, "m_b", mask_of({0, 1})},
    {Node::MAB, "m_a|m_b", mask_of({0, 1, 3})},
    {Node::Cross, "cross", mask_of({0, 1, 3, 4})},
    {Node::SA, "s_a", mask_of({0, 3, 6})},
    {Node::SB, "s_b", mask_of({0, 1, 2})},
    {Node::SAMB, "s_a|m_b", mask_of({0, 1, 3, 6})},
    {Node::MASB, "m_a|s_b", mask_of({0, 1, 2, 3})},
    {Node::SACross, "s_a|cross", mask_of({0, 1, 3, 4, 6})},
    {Node::CrossSB, "cross|s_b", mask_of({0, 1, 2, 3, 4})},
    {Node::SASB, "s_a|s_b", mask_of({0, 1, 2, 3, 6})},
    {Node::SACrossSB, "s_a|cross|s_b", mask_of({0, 1, 2, 3, 4, 6})},
    {Node::BigA, "M_a", mask_of({0, 1, 3, 4, 6, 7})},
    {Node::BigB, "M_b", mask_of({0, 1, 2, 3, 4, 5})},
    {Node::BigASB, "M_a|s_b", mask_of({0, 1, 2, 3, 4, 6, 7})},
    {Node::SABigB, "s_a|M_b", mask_of({0, 1, 2, 3, 4, 5, 6})},
    {Node::BigAB, "M_a|M_b", mask_of({0, 1, 2, 3, 4, 5, 6, 7})},
    {Node::Full, "full", mask_of({0, 1, 2, 3, 4, 5, 6, 7, 8})},
}};

std::string mask_str(unsigned mask) {
    std::string s = "{";
    for (unsigned p = 0; p < CriticalPoset::n_points; ++p)
        if (mask & (1u << p)) {
            if (s.size() > 1) s += ", ";
            s += point_name(p);
        }
    return s + "}";
}

std::optional<Node> named_node(unsigned mask) {
    for (const auto& e : kNamed)
        if (e.mask == mask) return e.node;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Chain realizations. Every named set is realized as a chain of strand atoms
// over the unit object: a four-strand birth, endomorphisms acting on single
// strands, saddle caps/cups closing or opening a strand pair, and the final
// four-strand death. Strand cells of A (x) A (x) A (x) A are encoded
// left-major: strand 1 is the most significant digit.

std::size_t enc4(std::size_t s1, std::size_t s2, std::size_t s3,
                 std::size_t s4, std::size_t n) {
    return ((s1 * n + s2) * n + s3) * n + s4;
}

std::array<std::size_t, 4> dec4(std::size_t c, std::size_t n) {
    std::array<std::size_t, 4> s;
    s[3] = c % n;
    c /= n;
    s[2] = c % n;
    c /= n;
    s[1] = c % n;
    s[0] = c / n;
    return s;
}

std::size_t enc2(std::size_t a, std::size_t b, std::size_t n) {
    return a * n + b;
}

std::array<std::size_t, 2> dec2(std::size_t c, std::size_t n) {
    return {c / n, c % n};
}

struct Ctx {
    ScalarMode mode{0};
    std::size_t n = 0;  // rank of the base object
    KVObject A, A2, A3, A4;
    KVOneMor fa, fb, far, fbr;  // the commuting endos and their transposes
    KVTwoMor commutor;          // fb o fa^r => fa^r o fb
    KVOneMor coev4;             // 1 -> A4, cups pairing strands (1,2), (3,4)
    KVOneMor ev4;               // A4 -> 1, caps pairing strands (1,4), (2,3)
    KVOneMor cap14, cup14;      // close / reopen the outer pair (1,4)
    KVOneMor cap12, cup12;      // close / reopen the inner pair (1,2)
};

// x acting on strand i of the four-strand object (identity elsewhere). The
// paired tensor index of the single non-identity factor is x's own index, so
// every chain tuple below carries bare x-multiplicities.
KVOneMor strand4(const Ctx& c, const KVOneMor& x, int i) {
    switch (i) {
        case 1:
            return kv::tensor(x, kv::id1(c.A3));
        case 2:
            return kv::tensor(kv::tensor(kv::id1(c.A), x), kv::id1(c.A2));
        case 3:
            return kv::tensor(kv::tensor(kv::id1(c.A2), x), kv::id1(c.A));
        default:
            return kv::tensor(kv::id1(c.A3), x);
    }
}

KVOneMor strand2(const Ctx& c, const KVOneMor& x, int i) {
    return i == 1 ? kv::tensor(x, kv::id1(c.A)) : kv::tensor(kv::id1(c.A), x);
}

Ctx make_ctx(const tr::CommutingPair& pair) {
    Ctx c;
    c.mode = pair.alpha.mode;
    c.A = pair.phi_a.src;
    c.n = c.A.rank;
    c.A2 = kv::tensor(c.A, c.A);
    c.A3 = kv::tensor(c.A2, c.A);
    c.A4 = kv::tensor(c.A3, c.A);
    c.fa = pair.phi_a;
    c.fb = pair.phi_b;
    c.far = kv::transpose_mor(pair.phi_a);
    c.fbr = kv::transpose_mor(pair.phi_b);
    c.commutor = tr::induced_commutor(pair);

    std::size_t n = c.n, n4 = c.A4.rank, n2 = c.A2.rank;

    // birth: two adjacent cups, cells (x, x, y, y)
    std::vector<std::vector<std::size_t>> dc(n4, std::vector<std::size_t>(1, 0));
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) dc[enc4(x, x, y, y, n)][0] = 1;
    c.coev4 = kv::make_one_mor(kv::unit_object(), c.A4, std::move(dc));

    // death: two nested caps, cells (x, y, y, x)
    std::vector<std::vector<std::size_t>> de(1, std::vector<std::size_t>(n4, 0));
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) de[0][enc4(x, y, y, x, n)] = 1;
    c.ev4 = kv::make_one_mor(c.A4, kv::unit_object(), std::move(de));

    // cap14 contracts the outer pair and keeps (s2, s3)
    std::vector<std::vector<std::size_t>> c14(n2,
                                              std::vector<std::size_t>(n4, 0));
    for (std::size_t s1 = 0; s1 < n; ++s1)
        for (std::size_t s2 = 0; s2 < n; ++s2)
            for (std::size_t s3 = 0; s3 < n; ++s3)
                c14[enc2(s2, s3, n)][enc4(s1, s2, s3, s1, n)] = 1;
    c.cap14 = kv::make_one_mor(c.A4, c.A2, std::move(c14));
    c.cup14 = kv::transpose_mor(c.cap14);

    // cap12 contracts the inner pair and keeps (s3, s4)
    std::vector<std::vector<std::size_t>> c12(n2,
                                              std::vector<std::size_t>(n4, 0));
    for (std::size_t s1 = 0; s1 < n; ++s1)
        for (std::size_t s3 = 0; s3 < n; ++s3)
            for (std::size_t s4 = 0; s4 < n; ++s4)
                c12[enc2(s3, s4, n)][enc4(s1, s1, s3, s4, n)] = 1;
    c.cap12 = kv::make_one_mor(c.A4, c.A2, std::move(c12));
    c.cup12 = kv::transpose_mor(c.cap12);
    return c;
}

Chain node_chain(const Ctx& c, Node v) {
    const KVObject u = kv::unit_object();
    auto a1 = [&](const KVOneMor& x) { return strand4(c, x, 1); };
    switch (v) {
        case Node::Empty:
        case Node::Full:
            return kv::make_chain(u, {});
        case Node::M:
            return kv::make_chain(u, {c.coev4, c.ev4});
        case Node::MA:
            return kv::make_chain(u, {c.coev4, a1(c.fa), a1(c.far), c.ev4});
        case Node::MB:
            return kv::make_chain(u, {c.coev4, a1(c.fb), a1(c.fbr), c.ev4});
        case Node::MAB:
            return kv::make_chain(
                u, {c.coev4, a1(c.fa), a1(c.far), a1(c.fb), a1(c.fbr), c.ev4});
        case Node::Cross:
            return kv::make_chain(
                u, {c.coev4, a1(c.fa), a1(c.fb), a1(c.far), a1(c.fbr), c.ev4});
        case Node::SA:
        case Node::BigA:
            return kv::make_chain(
                u, {c.coev4, a1(c.fa), c.cap14, c.cup14, a1(c.far), c.ev4});
        case Node::SB:
        case Node::BigB:
            return kv::make_chain(
                u, {c.coev4, a1(c.fb), c.cap12, c.cup12, a1(c.fbr), c.ev4});
        case Node::SAMB:
            return kv::make_chain(u, {c.coev4, a1(c.fa), c.cap14, c.cup14,
                                      a1(c.far), a1(c.fb), a1(c.fbr), c.ev4});
        case Node::MASB:
            return kv::make_chain(u, {c.coev4, a1(c.fa), a1(c.far), a1(c.fb),
                                      c.cap12, c.cup12, a1(c.fbr), c.ev4});
        case Node::SACross:
            return kv::make_chain(u, {c.coev4, a1(c.fa), c.cap14, c.cup14,
                                      a1(c.fb), a1(c.far), a1(c.fbr), c.ev4});
        case Node::CrossSB:
            return kv::make_chain(u, {c.coev4, a1(c.fa), a1(c.fb), a1(c.far),
                                      c.cap12, c.cup12, a1(c.fbr), c.ev4});
        case Node::SASB:
            return kv::make_chain(
                u, {c.coev4, a1(c.fa), c.cap14, c.cup14, a1(c.far), a1(c.fb),
                    c.cap12, c.cup12, a1(c.fbr), c.ev4});
        case Node::SACrossSB:
            return kv::make_chain(
                u, {c.coev4, a1(c.fa), c.cap14, c.cup14, a1(c.fb), a1(c.far),
                    c.cap12, c.cup12, a1(c.fbr), c.ev4});
        case Node::BigASB:
            return kv::make_chain(u, {c.coev4, a1(c.fa), c.cap14, c.cup14,
                                      a1(c.far), c.cap12, c.cup12, c.ev4});
        case Node::SABigB:
            return kv::make_chain(u, {c.coev4, c.cap14, c.cup14, a1(c.fb),
                                      c.cap12, c.cup12, a1(c.fbr), c.ev4});
        case Node::BigAB:
            return kv::make_chain(
                u, {c.coev4, c.cap14, c.cup14, c.cap12, c.cup12, c.ev4});
    }
    throw std::logic_error("unhandled node");
}

std::size_t chain_dim(const Chain& ch) {
    return kv::chain_composite(ch).dims[0][0];
}

// ---------------------------------------------------------------------------
// Elementary strand rewrites. Each one is a bijection of segment tuples
// (bottom cell, middle cell, top cell; u per atom) with both boundary cells
// pinned, realized through theta_from_map, which re-ranks the image tuple
// and throws if the map is not cell-correct.

ChainMove rewrite_segment(
    const Ctx& c, const Chain& ch, std::size_t pos, std::vector<KVOneMor> repl,
    const std::function<ChainTuple(const ChainTuple&)>& map) {
    Chain src = kv::make_chain(kv::chain_object_at(ch, pos),
                               {ch.atoms[pos], ch.atoms[pos + 1]});
    Chain dst = kv::make_chain(src.src, repl);
    KVTwoMor theta = kv::theta_from_map(src, dst, c.mode, map);
    return kv::chain_apply(ch, pos, 2, theta, std::move(repl));
}

// [x@1, ev4] => [x^r@4, ev4]. A source tuple has bottom s with s2 = s3 and
// middle (s4, s2, s3, s4): the caps force the middle's strand 1 and 4 to
// agree, so x was evaluated as x[s4][s1]. Moving x to strand 4 as x^r keeps
// the bottom cell and replaces the middle by (s1, s2, s3, s1); the
// multiplicity index still ranges over x[s4][s1] and passes through.
ChainMove slide_1_to_4_across_ev(const Ctx& c, const Chain& ch,
                                 std::size_t pos, const KVOneMor& x) {
    return rewrite_segment(
        c, ch, pos, {strand4(c, kv::transpose_mor(x), 4), c.ev4},
        [&](const ChainTuple& t) {
            auto s = dec4(t.cvec[0], c.n);
            ChainTuple r = t;
            r.cvec[1] = enc4(s[0], s[1], s[2], s[0], c.n);
            return r;
        });
}

// [cup14, x@4] => [cup14, x^r@1]. The top cell t = (t1, ca, cb, t4) has the
// cup's middle (t1, ca, cb, t1) below it, so x acted as x[t4][t1]. After the
// slide the middle is (t4, ca, cb, t4) and x^r on strand 1 is evaluated at
// x^r[t1][t4] = x[t4][t1]: same index space, u passes through.
ChainMove slide_4_to_1_across_cup14(const Ctx& c, const Chain& ch,
                                    std::size_t pos, const KVOneMor& x) {
    return rewrite_segment(
        c, ch, pos, {c.cup14, strand4(c, kv::transpose_mor(x), 1)},
        [&](const ChainTuple& t) {
            auto f = dec4(t.cvec[2], c.n);
            ChainTuple r = t;
            r.cvec[1] = enc4(f[3], f[1], f[2], f[3], c.n);
            return r;
        });
}

// [x@1, cap12] => [x^r@2, cap12]. Bottom s; the cap forces the middle's
// strands 1 and 2 to agree, so the middle is (s2, s2, s3, s4) and x acted as
// x[s2][s1]. Slid to strand 2 as x^r the middle becomes (s1, s1, s3, s4).
ChainMove slide_1_to_2_across_cap12(const Ctx& c, const Chain& ch,
                                    std::size_t pos, const KVOneMor& x) {
    return rewrite_segment(
        c, ch, pos, {strand4(c, kv::transpose_mor(x), 2), c.cap12},
        [&](const ChainTuple& t) {
            auto s = dec4(t.cvec[0], c.n);
            ChainTuple r = t;
            r.cvec[1] = enc4(s[0], s[0], s[2], s[3], c.n);
            return r;
        });
}

// [coev4, x@2] => [coev4, x^r@1]. Top cell t = (t1, t2, t3, t3); the birth
// put (t1, t1, t3, t3) below, so x acted as x[t2][t1]. Slid to strand 1 as
// x^r the middle becomes (t2, t2, t3, t3).
ChainMove slide_2_to_1_across_coev(const Ctx& c, const Chain& ch,
                                   std::size_t pos, const KVOneMor& x) {
    return rewrite_segment(
        c, ch, pos, {c.coev4, strand4(c, kv::transpose_mor(x), 1)},
        [&](const ChainTuple& t) {
            auto f = dec4(t.cvec[2], c.n);
            ChainTuple r = t;
            r.cvec[1] = enc4(f[1], f[1], f[2], f[3], c.n);
            return r;
        });
}

// [cup14, x@2of4] => [x@1of2, cup14]. Top t = (t1, m, cb, t1) with the cup's
// (t1, ca, cb, t1) below: x acted on the kept strand, x[m][ca], and commutes
// with the cup. The new middle is the two-strand cell (m, cb); the atom
// order flips, so the two u slots swap (the cup slot is one-dimensional).
ChainMove pass_2of4_down_cup14(const Ctx& c, const Chain& ch, std::size_t pos,
                               const KVOneMor& x) {
    return rewrite_segment(
        c, ch, pos, {strand2(c, x, 1), c.cup14}, [&](const ChainTuple& t) {
            auto f = dec4(t.cvec[2], c.n);
            ChainTuple r = t;
            r.cvec[1] = enc2(f[1], f[2], c.n);
            std::swap(r.uvec[0], r.uvec[1]);
            return r;
        });
}

// [cap14, x@1of2] => [x@2of4, cap14]. Bottom s with s1 = s4; the cap kept
// (s2, s3) and x acted as x[m][s2] with m the first digit of the top cell.
// Moved below the cap, x acts on strand 2: new middle (s1, m, s3, s4).
ChainMove pass_1of2_up_cap14(const Ctx& c, const Chain& ch, std::size_t pos,
                             const KVOneMor& x) {
    return rewrite_segment(
        c, ch, pos, {strand4(c, x, 2), c.cap14}, [&](const ChainTuple& t) {
            auto s = dec4(t.cvec[0], c.n);
            auto f = dec2(t.cvec[2], c.n);
            ChainTuple r = t;
            r.cvec[1] = enc4(s[0], f[0], s[2], s[3], c.n);
            std::swap(r.uvec[0], r.uvec[1]);
            return r;
        });
}

// [cup12, x@4of4] => [x@2of2, cup12]. Top t = (t1, t1, ca, m) with the
// cup's (t1, t1, ca, cb) below: x acted as x[m][cb] on the second kept
// strand. New middle: the two-strand cell (ca, m).
ChainMove pass_4of4_down_cup12(const Ctx& c, const Chain& ch, std::size_t pos,
                               const KVOneMor& x) {
    return rewrite_segment(
        c, ch, pos, {strand2(c, x, 2), c.cup12}, [&](const ChainTuple& t) {
            auto f = dec4(t.cvec[2], c.n);
            ChainTuple r = t;
            r.cvec[1] = enc2(f[2], f[3], c.n);
            std::swap(r.uvec[0], r.uvec[1]);
            return r;
        });
}

// [cap12, x@2of2] => [x@4of4, cap12]. Bottom s with s1 = s2; the cap kept
// (s3, s4) and x acted as x[m][s4] with m the second digit of the top cell.
// Moved below the cap, x acts on strand 4: new middle (s1, s2, s3, m).
ChainMove pass_2of2_up_cap12(const Ctx& c, const Chain& ch, std::size_t pos,
                             const KVOneMor& x) {
    return rewrite_segment(
        c, ch, pos, {strand4(c, x, 4), c.cap12}, [&](const ChainTuple& t) {
            auto s = dec4(t.cvec[0], c.n);
            auto f = dec2(t.cvec[2], c.n);
            ChainTuple r = t;
            r.cvec[1] = enc4(s[0], s[1], s[2], f[1], c.n);
            std::swap(r.uvec[0], r.uvec[1]);
            return r;
        });
}

// [x@i, y@j] => [y@j, x@i] for disjoint strands i != j. The middle cell
// swaps which strand has been updated (read the y-output from the top
// cell); the two u slots swap with the atoms.
ChainMove swap_disjoint(const Ctx& c, const Chain& ch, std::size_t pos,
                        const KVOneMor& x, int i, const KVOneMor& y, int j) {
    return rewrite_segment(
        c, ch, pos, {strand4(c, y, j), strand4(c, x, i)},
        [&, i, j](const ChainTuple& t) {
            auto s = dec4(t.cvec[0], c.n);
            auto f = dec4(t.cvec[2], c.n);
            s[j - 1] = f[j - 1];
            ChainTuple r = t;
            r.cvec[1] = enc4(s[0], s[1], s[2], s[3], c.n);
            std::swap(r.uvec[0], r.uvec[1]);
            return r;
        });
}

// Whiskered commutor: rewrites a [fa^r@1, fb@1] segment to [fb@1, fa^r@1].
// The segment composite is (fb o fa^r) (x) id on the other three strands;
// per boundary cell the identity strands pin a single middle cell, so the
// whiskered block is exactly the commutor block and the bases line up.
ChainMove apply_commutor(const Ctx& c, const Chain& ch, std::size_t pos) {
    KVTwoMor theta =
        kv::tensor(c.commutor, kv::id2(kv::id1(c.A3), c.mode));
    return kv::chain_apply(ch, pos, 2, theta,
                           {strand4(c, c.fb, 1), strand4(c, c.far, 1)});
}

// ---------------------------------------------------------------------------
// Generating steps. A Walk tracks the current chain and the accumulated
// matrix on the one composite cell.

struct Walk {
    const Ctx& c;
    Chain ch;
    Matrix m;

    Walk(const Ctx& ctx, const Chain& start)
        : c(ctx), ch(start),
          m(Matrix::identity(chain_dim(start), ctx.mode)) {}

    void step(const ChainMove& mv) {
        ch = mv.result;
        m = lin::mat_mul(mv.mor.blocks[0][0], m);
    }
};

constexpr int edge_key(Node a, Node b) {
    return (static_cast<int>(a) << 8) | static_cast<int>(b);
}

constexpr std::array<std::pair<Node, Node>, 30> kEdges = {{
    {Node::Empty, Node::M},
    {Node::M, Node::MA},
    {Node::M, Node::MB},
    {Node::MA, Node::MAB},
    {Node::MB, Node::MAB},
    {Node::MA, Node::SA},
    {Node::MB, Node::SB},
    {Node::MAB, Node::Cross},
    {Node::MAB, Node::SAMB},
    {Node::MAB, Node::MASB},
    {Node::SA, Node::SAMB},
    {Node::SB, Node::MASB},
    {Node::Cross, Node::SACross},
    {Node::Cross, Node::CrossSB},
    {Node::SAMB, Node::SACross},
    {Node::MASB, Node::CrossSB},
    {Node::SAMB, Node::SASB},
    {Node::MASB, Node::SASB},
    {Node::SASB, Node::SACrossSB},
    {Node::SACross, Node::SACrossSB},
    {Node::CrossSB, Node::SACrossSB},
    {Node::SACross, Node::BigA},
    {Node::CrossSB, Node::BigB},
    {Node::SACrossSB, Node::BigASB},
    {Node::SACrossSB, Node::SABigB},
    {Node::BigA, Node::BigASB},
    {Node::BigB, Node::SABigB},
    {Node::BigASB, Node::BigAB},
    {Node::SABigB, Node::BigAB},
    {Node::BigAB, Node::Full},
}};

Matrix all_ones(std::size_t rows, std::size_t cols, ScalarMode mode) {
    Matrix m(rows, cols, mode);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m.at(i, j) = ExactScalar::from_int(1, mode);
    return m;
}

Matrix edge_matrix(const Ctx& c, Node u, Node v) {
    // The two boundary steps are not chain rewrites. The birth/death loop
    // [coev4, ev4] has the n all-equal tuples (x, x, x, x) as basis; under
    // that identification with Tr(id_A) the unit of the cup-cap adjunction
    // is the all-ones column and its counit the all-ones row: each loop
    // enters or leaves with coefficient one.
    if (u == Node::Empty && v == Node::M) return all_ones(c.n, 1, c.mode);

    Walk w(c, node_chain(c, u));
    auto a1 = [&](const KVOneMor& x) { return strand4(c, x, 1); };

    switch (edge_key(u, v)) {
        case edge_key(Node::M, Node::MA):
            w.step(kv::unit_r(w.ch, 1, a1(c.fa), c.mode));
            break;
        case edge_key(Node::M, Node::MB):
            w.step(kv::unit_r(w.ch, 1, a1(c.fb), c.mode));
            break;
        case edge_key(Node::MA, Node::MAB):
            w.step(kv::unit_r(w.ch, 3, a1(c.fb), c.mode));
            break;
        case edge_key(Node::MB, Node::MAB):
            w.step(kv::unit_r(w.ch, 1, a1(c.fa), c.mode));
            break;
        case edge_key(Node::MA, Node::SA):
            w.step(kv::unit_r(w.ch, 2, c.cap14, c.mode));
            break;
        case edge_key(Node::MB, Node::SB):
            w.step(kv::unit_r(w.ch, 2, c.cap12, c.mode));
            break;
        case edge_key(Node::MAB, Node::Cross):
            w.step(apply_commutor(c, w.ch, 2));
            break;
        case edge_key(Node::MAB, Node::SAMB):
            w.step(kv::unit_r(w.ch, 2, c.cap14, c.mode));
            break;
        case edge_key(Node::MAB, Node::MASB):
            w.step(kv::unit_r(w.ch, 4, c.cap12, c.mode));
            break;
        case edge_key(Node::SA, Node::SAMB):
            w.step(kv::unit_r(w.ch, 5, a1(c.fb), c.mode));
            break;
        case edge_key(Node::SB, Node::MASB):
            w.step(kv::unit_r(w.ch, 1, a1(c.fa), c.mode));
            break;
        case edge_key(Node::Cross, Node::SACross):
            w.step(kv::unit_r(w.ch, 2, c.cap14, c.mode));
            break;
        case edge_key(Node::Cross, Node::CrossSB):
            w.step(kv::unit_r(w.ch, 4, c.cap12, c.mode));
            break;
        case edge_key(Node::SAMB, Node::SACross):
            w.step(apply_commutor(c, w.ch, 4));
            break;
        case edge_key(Node::MASB, Node::CrossSB):
            w.step(apply_commutor(c, w.ch, 2));
            break;
        case edge_key(Node::SAMB, Node::SASB):
            w.step(kv::unit_r(w.ch, 6, c.cap12, c.mode));
            break;
        case edge_key(Node::MASB, Node::SASB):
            w.step(kv::unit_r(w.ch, 2, c.cap14, c.mode));
            break;
        case edge_key(Node::SASB, Node::SACrossSB):
            w.step(apply_commutor(c, w.ch, 4));
            break;
        case edge_key(Node::SACross, Node::SACrossSB):
            w.step(kv::unit_r(w.ch, 6, c.cap12, c.mode));
            break;
        case edge_key(Node::CrossSB, Node::SACrossSB):
            w.step(kv::unit_r(w.ch, 2, c.cap14, c.mode));
            break;

        case edge_key(Node::SACross, Node::BigA):
            // Carry fb once around the a-handle and cancel it:
            // [coev4, fa@1, cap14, cup14, fb@1, fa^r@1, fb^r@1, ev4]
            w.step(slide_1_to_4_across_ev(c, w.ch, 6, c.fbr));   // fb^r@1 -> fb@4
            w.step(swap_disjoint(c, w.ch, 5, c.far, 1, c.fb, 4));
            w.step(swap_disjoint(c, w.ch, 4, c.fb, 1, c.fb, 4));
            w.step(slide_4_to_1_across_cup14(c, w.ch, 3, c.fb)); // fb@4 -> fb^r@1
            w.step(kv::counit_r(w.ch, 4, a1(c.fb), c.mode));     // [fb^r, fb] -> 1
            break;
        case edge_key(Node::CrossSB, Node::BigB):
            // Carry fa once around the b-handle and cancel it:
            // [coev4, fa@1, fb@1, fa^r@1, cap12, cup12, fb^r@1, ev4]
            w.step(slide_1_to_2_across_cap12(c, w.ch, 3, c.far)); // fa^r@1 -> fa@2
            w.step(swap_disjoint(c, w.ch, 2, c.fb, 1, c.fa, 2));
            w.step(swap_disjoint(c, w.ch, 1, c.fa, 1, c.fa, 2));
            w.step(slide_2_to_1_across_coev(c, w.ch, 0, c.fa));   // fa@2 -> fa^r@1
            w.step(kv::counit_r(w.ch, 1, a1(c.fa), c.mode));      // [fa^r, fa] -> 1
            break;
        case edge_key(Node::SACrossSB, Node::BigASB):
            // Same fb carry, now passing through the b-saddle pair:
            // [coev4, fa@1, cap14, cup14, fb@1, fa^r@1, cap12, cup12, fb^r@1, ev4]
            w.step(slide_1_to_4_across_ev(c, w.ch, 8, c.fbr));
            w.step(pass_4of4_down_cup12(c, w.ch, 7, c.fb));
            w.step(pass_2of2_up_cap12(c, w.ch, 6, c.fb));
            w.step(swap_disjoint(c, w.ch, 5, c.far, 1, c.fb, 4));
            w.step(swap_disjoint(c, w.ch, 4, c.fb, 1, c.fb, 4));
            w.step(slide_4_to_1_across_cup14(c, w.ch, 3, c.fb));
            w.step(kv::counit_r(w.ch, 4, a1(c.fb), c.mode));
            break;
        case edge_key(Node::SACrossSB, Node::SABigB):
            // Same fa carry, now passing through the a-saddle pair:
            // [coev4, fa@1, cap14, cup14, fb@1, fa^r@1, cap12, cup12, fb^r@1, ev4]
            w.step(slide_1_to_2_across_cap12(c, w.ch, 5, c.far));
            w.step(swap_disjoint(c, w.ch, 4, c.fb, 1, c.fa, 2));
            w.step(pass_2of4_down_cup14(c, w.ch, 3, c.fa));
            w.step(pass_1of2_up_cap14(c, w.ch, 2, c.fa));
            w.step(swap_disjoint(c, w.ch, 1, c.fa, 1, c.fa, 2));
            w.step(slide_2_to_1_across_coev(c, w.ch, 0, c.fa));
            w.step(kv::counit_r(w.ch, 1, a1(c.fa), c.mode));
            break;
        case edge_key(Node::BigA, Node::BigASB):
            w.step(kv::unit_r(w.ch, 5, c.cap12, c.mode));
            break;
        case edge_key(Node::BigB, Node::SABigB):
            w.step(kv::unit_r(w.ch, 1, c.cap14, c.mode));
            break;
        case edge_key(Node::BigASB, Node::BigAB):
            // Close the fa loop through both saddles:
            // [coev4, fa@1, cap14, cup14, fa^r@1, cap12, cup12, ev4]
            w.step(slide_1_to_2_across_cap12(c, w.ch, 4, c.far));
            w.step(pass_2of4_down_cup14(c, w.ch, 3, c.fa));
            w.step(pass_1of2_up_cap14(c, w.ch, 2, c.fa));
            w.step(swap_disjoint(c, w.ch, 1, c.fa, 1, c.fa, 2));
            w.step(slide_2_to_1_across_coev(c, w.ch, 0, c.fa));
            w.step(kv::counit_r(w.ch, 1, a1(c.fa), c.mode));
            break;
        case edge_key(Node::SABigB, Node::BigAB):
            // Close the fb loop through both saddles:
            // [coev4, cap14, cup14, fb@1, cap12, cup12, fb^r@1, ev4]
            w.step(slide_1_to_4_across_ev(c, w.ch, 6, c.fbr));
            w.step(pass_4of4_down_cup12(c, w.ch, 5, c.fb));
            w.step(pass_2of2_up_cap12(c, w.ch, 4, c.fb));
            w.step(swap_disjoint(c, w.ch, 3, c.fb, 1, c.fb, 4));
            w.step(slide_4_to_1_across_cup14(c, w.ch, 2, c.fb));
            w.step(kv::counit_r(w.ch, 3, a1(c.fb), c.mode));
            break;
        case edge_key(Node::BigAB, Node::Full): {
            // Contract the inner and outer saddle pairs, then close the
            // remaining birth/death loop with the all-ones counit row.
            w.step(kv::counit_r(w.ch, 3, c.cup12, c.mode));
            w.step(kv::counit_r(w.ch, 1, c.cup14, c.mode));
            if (!(w.ch == node_chain(c, Node::M)))
                throw std::logic_error("boundary step left a wrong chain");
            return lin::mat_mul(all_ones(1, c.n, c.mode), w.m);
        }
        default:
            throw std::invalid_argument("not a generating step: " +
                                        std::string(node_name(u)) + " -> " +
                                        node_name(v));
    }

    if (!(w.ch == node_chain(c, v)))
        throw std::logic_error(std::string("generating step ") + node_name(u) +
                               " -> " + node_name(v) +
                               " produced the wrong chain");
    return w.m;
}

// ---------------------------------------------------------------------------
// Dynamic programme over the step graph. Each edge raises the point count by
// one, so ascending popcount is a topological order. Whenever two paths meet
// their composites must agree; otherwise the functor would be ill-defined.

struct EdgeCache {
    const Ctx& c;
    std::map<int, Matrix> cache;

    const Matrix& get(Node u, Node v) {
        int k = edge_key(u, v);
        auto it = cache.find(k);
        if (it == cache.end())
            it = cache.emplace(k, edge_matrix(c, u, v)).first;
        return it->second;
    }
};

const std::vector<Node>& nodes_by_popcount() {
    static const std::vector<Node> order = [] {
        std::vector<Node> v;
        for (const auto& e : kNamed) v.push_back(e.node);
        std::stable_sort(v.begin(), v.end(), [](Node a, Node b) {
            return std::popcount(node_mask(a)) < std::popcount(node_mask(b));
        });
        return v;
    }();
    return order;
}

Matrix t_mor(EdgeCache& ec, Node p, Node q) {
    const Ctx& c = ec.c;
    unsigned qmask = node_mask(q);
    std::map<Node, Matrix> val;
    val.emplace(p, Matrix::identity(chain_dim(node_chain(c, p)), c.mode));
    for (Node u : nodes_by_popcount()) {
        auto it = val.find(u);
        if (it == val.end()) continue;
        for (const auto& [a, b] : kEdges) {
            if (a != u || (node_mask(b) & ~qmask)) continue;
            Matrix cand = lin::mat_mul(ec.get(u, b), it->second);
            auto jt = val.find(b);
            if (jt == val.end())
                val.emplace(b, std::move(cand));
            else if (!(jt->second == cand))
                throw std::logic_error(
                    std::string("path dependence at ") + node_name(b) +
                    ": two step compositions from " + node_name(p) +
                    " disagree");
        }
    }
    auto it = val.find(q);
    if (it == val.end())
        throw std::invalid_argument(
            std::string("inclusion ") + node_name(p) + " <= " + node_name(q) +
            " does not decompose into generating steps");
    return it->second;
}

Node require_named(const SaturatedSet& s) {
    if (auto n = named_node(s.mask)) return *n;
    throw std::invalid_argument("set " + mask_str(s.mask) +
                                " is not among the named saturated sets");
}

std::size_t diag_dim(const KVOneMor& f) {
    std::size_t d = 0;
    for (std::size_t x = 0; x < f.src.rank; ++x) d += f.dims[x][x];
    return d;
}

// The saddle chain of f enumerates its loops as (v, x, u4, u1) with v, u4
// the reopened outer loop (a Tr(f^r) index) and x, u1 the inner loop (a
// Tr(f) index), v most significant and x interleaved before the u's. The
// duality data uses flat kron orders, so collect the relabel as a
// permutation: kron(Tr(f^r), Tr(f)) when outer_major, else
// kron(Tr(f), Tr(f^r)).
Matrix saddle_relabel(const Ctx& c, const KVOneMor& f, bool outer_major) {
    std::vector<std::size_t> off(c.n + 1, 0);
    for (std::size_t x = 0; x < c.n; ++x) off[x + 1] = off[x] + f.dims[x][x];
    std::size_t d = off[c.n];
    Matrix p(d * d, d * d, c.mode);
    std::size_t chain_rank = 0;
    for (std::size_t v = 0; v < c.n; ++v)
        for (std::size_t x = 0; x < c.n; ++x)
            for (std::size_t u4 = 0; u4 < f.dims[v][v]; ++u4)
                for (std::size_t u1 = 0; u1 < f.dims[x][x]; ++u1) {
                    std::size_t outer = off[v] + u4, inner = off[x] + u1;
                    std::size_t kr = outer_major ? outer * d + inner
                                                 : inner * d + outer;
                    p.at(kr, chain_rank++) = ExactScalar::from_int(1, c.mode);
                }
    return p;
}

// Factor swap kron(U, V) -> kron(V, U) for du = dim U, dv = dim V.
Matrix kron_swap(std::size_t du, std::size_t dv, ScalarMode mode) {
    Matrix s(du * dv, du * dv, mode);
    for (std::size_t i = 0; i < du; ++i)
        for (std::size_t j = 0; j < dv; ++j)
            s.at(j * du + i, i * dv + j) = ExactScalar::from_int(1, mode);
    return s;
}

std::string mor_brief(const KVOneMor& f) {
    std::ostringstream out;
    out << "[" << f.src.rank << "->" << f.tgt.rank << "] dims ";
    for (std::size_t t = 0; t < f.tgt.rank; ++t) {
        out << (t ? "; " : "(");
        for (std::size_t s = 0; s < f.src.rank; ++s)
            out << (s ? "," : "") << f.dims[t][s];
    }
    out << ")";
    return out.str();
}

std::string pair_brief(const tr::CommutingPair& pair) {
    std::ostringstream out;
    out << "phi_a " << mor_brief(pair.phi_a) << "\nphi_b "
        << mor_brief(pair.phi_b) << "\nalpha blocks:\n";
    for (std::size_t t = 0; t < pair.alpha.src.tgt.rank; ++t)
        for (std::size_t s = 0; s < pair.alpha.src.src.rank; ++s) {
            const Matrix& m = pair.alpha.blocks[t][s];
            if (m.rows() == 0 || m.cols() == 0) continue;
            out << "  (" << t << "," << s << ") " << m.str() << "\n";
        }
    return out.str();
}

}  // namespace

CriticalPoset critical_poset() {
    CriticalPoset p;
    p.covers.assign(kCovers.begin(), kCovers.end());
    return p;
}

std::string point_name(unsigned p) {
    static const char* z[3] = {"-1", "i", "1"};
    return std::string("(") + z[p / 3] + "," + z[p % 3] + ")";
}

std::vector<SaturatedSet> saturated_sets() {
    std::vector<SaturatedSet> out;
    for (unsigned mask = 0; mask < (1u << CriticalPoset::n_points); ++mask) {
        bool closed = true;
        for (const auto& [lo, hi] : kCovers)
            if ((mask & (1u << hi)) && !(mask & (1u << lo))) {
                closed = false;
                break;
            }
        if (closed) out.push_back({mask});
    }
    std::sort(out.begin(), out.end(),
              [](const SaturatedSet& a, const SaturatedSet& b) {
                  auto pa = std::popcount(a.mask), pb = std::popcount(b.mask);
                  return pa != pb ? pa < pb : a.mask < b.mask;
              });
    return out;
}

const std::vector<Node>& all_nodes() {
    static const std::vector<Node> nodes = [] {
        std::vector<Node> v;
        for (const auto& e : kNamed) v.push_back(e.node);
        return v;
    }();
    return nodes;
}

const char* node_name(Node n) {
    for (const auto& e : kNamed)
        if (e.node == n) return e.name;
    throw std::logic_error("unknown node");
}

unsigned node_mask(Node n) {
    for (const auto& e : kNamed)
        if (e.node == n) return e.mask;
    throw std::logic_error("unknown node");
}

tr::TraceSpace T_object(const SaturatedSet& p, const tr::CommutingPair& pair) {
    Ctx c = make_ctx(pair);
    std::size_t d = chain_dim(node_chain(c, require_named(p)));
    tr::TraceSpace ts;
    ts.dim = d;
    if (d > 0) ts.block_layout.push_back({0, d});
    return ts;
}

lin::Matrix T_morphism(const SaturatedSet& p, const SaturatedSet& q,
                       const tr::CommutingPair& pair) {
    Node np = require_named(p), nq = require_named(q);
    if (p.mask & ~q.mask)
        throw std::invalid_argument("set " + mask_str(p.mask) +
                                    " is not contained in " +
                                    mask_str(q.mask));
    Ctx c = make_ctx(pair);
    EdgeCache ec{c, {}};
    return t_mor(ec, np, nq);
}

MainReport verify_main(const tr::CommutingPair& pair) {
    Ctx c = make_ctx(pair);
    EdgeCache ec{c, {}};
    MainReport rep;
    std::ostringstream bad;
    bool ok = true;

    auto check_scalar = [&](const char* what, const ExactScalar& l,
                            const ExactScalar& r) {
        if (!(l == r)) {
            ok = false;
            bad << what << ": " << l.str() << " != " << r.str() << "\n";
        }
    };
    auto check_mat = [&](const char* what, const Matrix& l, const Matrix& r) {
        if (!(l == r)) {
            ok = false;
            bad << what << ":\n  lhs " << l.str() << "\n  rhs " << r.str()
                << "\n";
        }
    };

    // The two distinguished maximal chains: over the a-handle first, and
    // over the b-handle first.
    auto fold_path = [&](std::initializer_list<Node> path) {
        Matrix m = Matrix::identity(1, c.mode);
        const Node* it = path.begin();
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            m = lin::mat_mul(ec.get(it[i], it[i + 1]), m);
        return m.at(0, 0);
    };
    rep.via_a = fold_path({Node::Empty, Node::M, Node::MA, Node::SA,
                           Node::SAMB, Node::SACross, Node::BigA, Node::BigASB,
                           Node::BigAB, Node::Full});
    rep.via_b = fold_path({Node::Empty, Node::M, Node::MB, Node::SB,
                           Node::MASB, Node::CrossSB, Node::BigB, Node::SABigB,
                           Node::BigAB, Node::Full});
    rep.sec_a = tr::secondary_trace_a(pair);
    rep.sec_b = tr::secondary_trace_b(pair);

    check_scalar("a-chain vs b-chain", rep.via_a, rep.via_b);
    check_scalar("a-chain vs secondary trace over Tr(phi_a^r)", rep.via_a,
                 rep.sec_a);
    check_scalar("b-chain vs secondary trace over Tr(phi_b)", rep.via_b,
                 rep.sec_b);

    // Full dynamic programme: all 42 maximal chains must agree.
    try {
        Matrix full = t_mor(ec, Node::Empty, Node::Full);
        check_scalar("step graph vs a-chain", full.at(0, 0), rep.via_a);
    } catch (const std::logic_error& e) {
        ok = false;
        bad << e.what() << "\n";
    }

    // Saddle and maximum values against the trace duality data, up to the
    // loop relabels of the saddle chains.
    tr::TraceDuality da = tr::trace_duality(pair.phi_a, c.mode);
    tr::TraceDuality db = tr::trace_duality(pair.phi_b, c.mode);
    std::size_t dta = diag_dim(pair.phi_a), dtb = diag_dim(pair.phi_b);
    Matrix pa = saddle_relabel(c, pair.phi_a, true);
    Matrix qa = saddle_relabel(c, pair.phi_a, false);
    Matrix sb = kron_swap(dtb, dtb, c.mode);

    Matrix coev_a = lin::mat_mul(pa, t_mor(ec, Node::Empty, Node::SA));
    Matrix coev_b = t_mor(ec, Node::Empty, Node::SB);
    check_mat("a-saddle vs coevaluation of Tr(phi_a)", coev_a, da.coev);
    check_mat("b-saddle vs coevaluation of Tr(phi_b)", coev_b, db.coev);

    Matrix ev_a = lin::mat_mul(t_mor(ec, Node::BigA, Node::Full),
                               lin::transpose(qa));
    Matrix ev_b = lin::mat_mul(t_mor(ec, Node::BigB, Node::Full),
                               lin::transpose(sb));
    check_mat("a-maximum vs evaluation of Tr(phi_a)", ev_a, da.ev);
    check_mat("b-maximum vs evaluation of Tr(phi_b)", ev_b, db.ev);

    // Between saddle and maximum the other endomorphism walks once around
    // the closed handle: the induced trace map on one tensor factor.
    Matrix ga = t_mor(ec, Node::SA, Node::BigA);
    Matrix expect_a =
        lin::kron(tr::trace_map(pair.phi_b, c.commutor, c.far, c.far),
                  Matrix::identity(dta, c.mode));
    check_mat("a-handle monodromy vs trace map on Tr(phi_a^r)",
              lin::mat_mul(pa, lin::mat_mul(ga, lin::transpose(pa))),
              expect_a);

    Matrix gb = t_mor(ec, Node::SB, Node::BigB);
    Matrix expect_b =
        lin::kron(Matrix::identity(dtb, c.mode),
                  tr::trace_map(pair.phi_a, pair.alpha, pair.phi_b,
                                pair.phi_b));
    check_mat("b-handle monodromy vs trace map on Tr(phi_b)", gb, expect_b);

    // Snake compatibility of the extracted duality pairs.
    auto check_snakes = [&](const char* what, const Matrix& ev,
                            const Matrix& coev, std::size_t d) {
        Matrix i = Matrix::identity(d, c.mode);
        check_mat(what,
                  lin::mat_mul(lin::kron(ev, i), lin::kron(i, coev)), i);
        check_mat(what,
                  lin::mat_mul(lin::kron(i, ev), lin::kron(coev, i)), i);
    };
    check_snakes("a-saddle snake", ev_a, coev_a, dta);
    check_snakes("b-saddle snake", ev_b, coev_b, dtb);

    rep.ok = ok;
    if (!ok) rep.detail = pair_brief(pair) + bad.str();
    return rep;
}

}  // namespace kvt::morse
