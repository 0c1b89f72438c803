#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace qca;

namespace {

Op gen_mode_matrix(const ZFBuild &B, int gen, int n) {
    int dim = B.A.dim();
    Op op(dim);
    for (int j = 0; j < dim; ++j) {
        Vec col = B.model.mode_apply(gen, n, j);
        op.ovf_col[static_cast<size_t>(j)] = col.ovf;
        col.ovf = false;
        op.col[static_cast<size_t>(j)] = col;
    }
    return op;
}

} // namespace

TEST_CASE("free-module counts match the enumerated basis") {
    auto B = fx::bos(4);
    auto free_counts = zf_free_counts(2, 4);
    REQUIRE(free_counts[0] == 1);
    REQUIRE(free_counts[1] == 2);
    REQUIRE(free_counts[2] == 5);
    REQUIRE(free_counts[3] == 10);
    REQUIRE(free_counts[4] == 20);
    REQUIRE(B.A.dim() == 1 + 2 + 5 + 10 + 20);
    for (const auto &r : B.diagnostics) REQUIRE(r.status == Status::Holds);
}

TEST_CASE("annihilation and delta contraction on two-letter words") {
    auto B = fx::bos(3);
    int ib = 0, ig = 1;
    // b(n)1 = 0 for n >= 0
    for (int n = 0; n <= 3; ++n) {
        Vec v = B.model.mode_apply(ib, n, B.A.V.vacuum);
        REQUIRE(is_zero(v));
    }
    // b(0) g(-1) 1 = <b,g> 1
    int jg = B.model.index.at(Word{Letter{ig, -1}});
    Vec v = B.model.mode_apply(ib, 0, jg);
    REQUIRE(v == B.A.V.vac());
    // g(0) b(-1) 1 = <g,b> 1 = -1
    int jb = B.model.index.at(Word{Letter{ib, -1}});
    Vec w = B.model.mode_apply(ig, 0, jb);
    REQUIRE(w == mul(B.A.V.vac(), rat(-1)));
    // already-normal word stays put: prepending b(-1) to b(-1)b(-2)1
    int j12 = B.model.index.at(Word{Letter{ib, -1}, Letter{ib, -2}});
    Vec u = B.model.mode_apply(ib, -1, j12);
    Word expect{Letter{ib, -1}, Letter{ib, -1}, Letter{ib, -2}};
    REQUIRE(u == B.A.V.unit(B.model.index.at(expect)));
}

TEST_CASE("two applications of the relation") {
    auto B = fx::bos(3);
    int ib = 0, ig = 1;
    int jgg = B.model.index.at(Word{Letter{ig, -1}, Letter{ig, -1}});
    // b(0) g(-1) g(-1) 1 = 2 <b,g> g(-1) 1
    Vec v = B.model.mode_apply(ib, 0, jgg);
    int jg = B.model.index.at(Word{Letter{ig, -1}});
    REQUIRE(v == mul(B.A.V.unit(jg), rat(2)));
}

TEST_CASE("classical mode algebra matches the closed-form exchange bracket") {
    // the oriented quotient realizes [p(m), q(n)] = <p,q> delta_{m+n,-1}
    auto B = fx::bos(3);
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
            for (int m = -2; m <= 2; ++m)
                for (int n = -2; n <= 2; ++n) {
                    Op pm = gen_mode_matrix(B, p, m);
                    Op qn = gen_mode_matrix(B, q, n);
                    Op comm = pm.compose(qn) - qn.compose(pm);
                    Rat expect = 0;
                    if (m + n == -1)
                        expect = B.model.spec
                                     .form[static_cast<size_t>(p)][static_cast<size_t>(q)]
                                     .constant_term();
                    Op want = Op::identity(B.A.dim(), 1).scaled(expect);
                    for (int j = 0; j < B.A.dim(); ++j) {
                        if (comm.ovf_col[static_cast<size_t>(j)] ||
                            comm.col[static_cast<size_t>(j)].ovf)
                            continue; // depth-truncated column
                        Vec d = comm.col[static_cast<size_t>(j)] - want.col[static_cast<size_t>(j)];
                        INFO("p=" << p << " q=" << q << " m=" << m << " n=" << n << " j=" << j);
                        REQUIRE(d.c.empty());
                    }
                }
}

TEST_CASE("local confluence probe covers all short words") {
    auto B = fx::bos(3);
    bool found = false;
    for (const auto &r : B.diagnostics)
        if (r.id == "zf.local_confluence") {
            found = true;
            REQUIRE(r.status == Status::Holds);
            REQUIRE(r.n_instances > 100);
        }
    REQUIRE(found);
}

TEST_CASE("T acts as the translation derivation and kills the vacuum") {
    auto B = fx::bos(4);
    const Module &V = B.A.V;
    REQUIRE(is_zero(V.t_apply(V.vac())));
    int jb = B.model.index.at(Word{Letter{0, -1}});
    int jb2 = B.model.index.at(Word{Letter{0, -2}});
    REQUIRE(V.t_apply(V.unit(jb)) == V.unit(jb2));
    for (int n = -2; n <= 2; ++n) {
        Op gn = gen_mode_matrix(B, 1, n);
        Op gn1 = gen_mode_matrix(B, 1, n - 1);
        for (int j = 0; j < B.A.dim(); ++j) {
            Vec lhs = V.t_apply(gn.apply(V.unit(j))) - gn.apply(V.t_apply(V.unit(j)));
            Vec rhs = mul(gn1.apply(V.unit(j)), Rat(-n));
            Vec d = lhs - rhs;
            if (d.ovf) continue;
            INFO("n=" << n << " j=" << j);
            REQUIRE(d.c.empty());
        }
    }
}

TEST_CASE("h-deformed build keeps the braiding 1 + O(h)") {
    auto B = fx::zf_h(3);
    REQUIRE(B.S.heuristic);
    std::string why;
    REQUIRE(B.S.is_one_plus_h(&why));
    // b(0)g(-1)1 stays <b,g>1 for s(x)=x: every correction term ends in an
    // annihilator on the vacuum
    int jg = B.model.index.at(Word{Letter{1, -1}});
    Vec v = B.model.mode_apply(0, 0, jg);
    REQUIRE(v == B.A.V.vac());
}

TEST_CASE("generator lambda product uses divided powers") {
    auto B = fx::bos(3);
    int jg = B.model.index.at(Word{Letter{1, -1}});
    auto [divided, plain] = generator_lambda(B, 0, jg);
    REQUIRE(divided.coeff1(P_LAM, 0) == B.A.V.vac());
    int jb1 = B.model.index.at(Word{Letter{0, -1}});
    VecPoly tbl = B.A.tab.lam[static_cast<size_t>(jb1)][static_cast<size_t>(jg)];
    REQUIRE((tbl - divided).stored_zero());
    // only the lambda^0 mode survives on this pair, so both conventions agree
    REQUIRE((plain - divided).stored_zero());
    // b(2) pairs against g(-3): a lambda^2 mode, where the conventions differ
    // by the 1/2! divided power
    int jg3 = B.model.index.at(Word{Letter{1, -3}});
    auto [div2, plain2] = generator_lambda(B, 0, jg3);
    REQUIRE(div2.coeff1(P_LAM, 2) == mul(B.A.V.vac(), rat(1, 2)));
    REQUIRE(plain2.coeff1(P_LAM, 2) == B.A.V.vac());
    REQUIRE_FALSE((plain2 - div2).stored_zero());
}

TEST_CASE("deformed two-letter normal form traced by hand") {
    // relation for s(x)=x: P(m) Q(n) w = <P,Q> delta_{m+n,-1} w + Q(n) P(m) w
    //                      + h [ Q(n+1) P(m) - Q(n) P(m+1) ] w
    auto B = fx::zf_h(3);
    int ib = 0, ig = 1;
    // b(-2)g(-1)1 is descending (key(b,-2) > key(g,-1)); by hand:
    //   = g(-1)b(-2)1 + h g(0)b(-2)1 - h g(-1)b(-1)1
    //   g(0)b(-2)1 reorders to b(-2)g(0)1 = 0 (+h^2 terms, truncated);
    //   g(-1)b(-1)1 reorders to b(-1)g(-1)1 (+h^2).
    // So: g(-1)b(-2)1 - h b(-1)g(-1)1.
    Word start{Letter{ib, -2}, Letter{ig, -1}};
    LinComb nf = B.model.normal_form(start, HSeries::one(2));
    REQUIRE(!nf.ovf);
    Word w_classical{Letter{ig, -1}, Letter{ib, -2}};
    Word w_corr{Letter{ib, -1}, Letter{ig, -1}};
    REQUIRE(nf.t.size() == 2);
    REQUIRE(nf.t.at(w_classical) == HSeries::one(2));
    REQUIRE(nf.t.at(w_corr) == -HSeries::h_power(2, 1));
}
